"""Detect whether G_S ⊗ I simplifies on a state, with a checkable verdict.

Two modes: the state has no support on strings with x_{|S} all ones (G fixes
it), or some qubit i in S is 1 on the whole support (G acts as the smaller
gate on S minus i).
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .errors import ArgumentError, DomainError
from .gate import PhaseGateSpec, apply, eigen_mask
from .models import SimplificationKind, TAU_ZERO
from .state import PureState, distance, index_mask
from .strings import PartialString, format_qubits

log = logger.bind(component="simplify")


@dataclass(frozen=True)
class SimplificationVerdict:
    kind: SimplificationKind
    witness_index: int | None = None
    max_offending_amplitude: float = 0.0

    @property
    def simplifies(self) -> bool:
        return self.kind != SimplificationKind.NONE

    def __str__(self) -> str:
        if self.kind == SimplificationKind.REDUCES:
            return f"reduces (i={self.witness_index})"
        return self.kind.value


def _zero_bit_mask(psi: PureState, qubit: int) -> np.ndarray:
    bit = index_mask(psi.carrier, [qubit])
    return (np.arange(psi.amplitudes.size) & bit) == 0


def detect_simplification(
    psi: PureState, s: Iterable[int], tol: float = TAU_ZERO
) -> SimplificationVerdict:
    """Classify psi as fixed_point, reduces (smallest witness i), or none.

    fixed_point wins when both modes hold.
    """
    targets = frozenset(s)
    if not targets:
        raise ArgumentError("simplification is undefined for S = ∅ (G_∅ is a global phase)")
    if not targets <= psi.qubits:
        raise DomainError(f"S={format_qubits(targets)} outside carrier {format_qubits(psi.carrier)}")

    moduli = np.abs(psi.amplitudes)
    on_ones = moduli[eigen_mask(psi, targets)]
    ones_peak = float(on_ones.max()) if on_ones.size else 0.0
    if ones_peak <= tol:
        log.debug(f"fixed_point for S={format_qubits(targets)} (peak {ones_peak:.3g})")
        return SimplificationVerdict(SimplificationKind.FIXED_POINT, None, ones_peak)

    for i in sorted(targets):
        zero_peak = float(moduli[_zero_bit_mask(psi, i)].max())
        if zero_peak <= tol:
            log.debug(f"reduces at i={i} (peak {zero_peak:.3g})")
            return SimplificationVerdict(SimplificationKind.REDUCES, i, zero_peak)

    return SimplificationVerdict(SimplificationKind.NONE, None, ones_peak)


def verify_simplification(
    psi: PureState,
    gate: PhaseGateSpec,
    verdict: SimplificationVerdict,
    tol: float = TAU_ZERO,
) -> bool:
    """Check the verdict against statevectors: G psi = psi, or G psi = G' psi."""
    if verdict.kind == SimplificationKind.NONE:
        return False
    bound = 2.0 * tol * math.sqrt(psi.amplitudes.size)
    out = apply(gate, psi)
    if verdict.kind == SimplificationKind.FIXED_POINT:
        gap = distance(out, psi)
    else:
        if verdict.witness_index not in gate.targets:
            return False
        smaller = PhaseGateSpec(gate.targets - {verdict.witness_index}, gate.theta)
        gap = distance(out, apply(smaller, psi))
    log.debug(f"verify_simplification({verdict}) gap={gap:.3g} bound={bound:.3g}")
    return gap <= bound


def support_string_with_zero(
    psi: PureState, qubit: int, tol: float = TAU_ZERO
) -> PartialString | None:
    """Smallest-index string x with x_qubit = 0 and |<x|psi>| > tol."""
    candidates = np.flatnonzero(_zero_bit_mask(psi, qubit) & (np.abs(psi.amplitudes) > tol))
    if candidates.size == 0:
        return None
    return PartialString.from_index(psi.carrier, int(candidates[0]))


def support_string_with_zero_in(
    psi: PureState, members: Iterable[int], tol: float = TAU_ZERO
) -> PartialString | None:
    """Smallest-index support string with a 0 somewhere in `members`."""
    wanted = sorted(frozenset(members))
    if not wanted:
        return None
    hit = np.zeros(psi.amplitudes.size, dtype=bool)
    for q in wanted:
        hit |= _zero_bit_mask(psi, q)
    candidates = np.flatnonzero(hit & (np.abs(psi.amplitudes) > tol))
    if candidates.size == 0:
        return None
    return PartialString.from_index(psi.carrier, int(candidates[0]))


@dataclass(frozen=True)
class NonSimplificationWitnesses:
    u: PartialString
    zero_strings: dict[int, PartialString]


def non_simplification_witnesses(
    psi: PureState, s: Iterable[int], tol: float = TAU_ZERO
) -> NonSimplificationWitnesses | None:
    """u with u_{|S} = 1 on the support, and per i in S a support string with x_i = 0.

    None when G simplifies on psi.
    """
    targets = frozenset(s)
    verdict = detect_simplification(psi, targets, tol)
    if verdict.simplifies:
        return None
    hits = np.flatnonzero(eigen_mask(psi, targets) & (np.abs(psi.amplitudes) > tol))
    u = PartialString.from_index(psi.carrier, int(hits[0]))
    zeros: dict[int, PartialString] = {}
    for i in sorted(targets):
        found = support_string_with_zero(psi, i, tol)
        assert found is not None, "non-simplifying state lost its zero string"
        zeros[i] = found
    return NonSimplificationWitnesses(u=u, zero_strings=zeros)
