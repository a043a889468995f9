"""Generalized controlled-phase gate G_eta on a target set S, applied as G_S ⊗ I."""

from __future__ import annotations

import cmath
import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .errors import DomainError, InvalidPhaseError
from .models import TAU_ETA
from .state import PureState, index_mask
from .strings import QubitSet, as_qubit_set, format_qubits

log = logger.bind(component="gate")


@dataclass(frozen=True)
class PhaseGateSpec:
    """Target set S and phase eta = exp(i*theta), eta != 1.

    eta is kept as an angle so |eta| = 1 holds exactly; the rectangular form
    is evaluated on demand.
    """

    targets: QubitSet
    theta: float

    @property
    def eta(self) -> complex:
        return cmath.exp(1j * self.theta)

    def __str__(self) -> str:
        return f"G(S={format_qubits(self.targets)}, theta={self.theta:.6g})"


def make_gate(targets: Iterable[int], theta: float, tol: float = TAU_ETA) -> PhaseGateSpec:
    """Build a gate; theta = pi gives C-SIGN on the target qubits."""
    s = as_qubit_set(targets)
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvalidPhaseError(f"theta must be finite, got {theta}")
    if abs(cmath.exp(1j * theta) - 1.0) <= tol:
        raise InvalidPhaseError(
            f"theta={theta:g} gives eta within {tol:g} of 1; the gate would be the identity"
        )
    return PhaseGateSpec(targets=s, theta=theta)


def adjoint(gate: PhaseGateSpec) -> PhaseGateSpec:
    """G_eta^* = G_{eta^*}."""
    return PhaseGateSpec(targets=gate.targets, theta=-gate.theta)


def eigen_mask(psi: PureState, targets: Iterable[int]) -> np.ndarray:
    """Boolean mask of basis indices x with x_{|S} all ones."""
    mask = index_mask(psi.carrier, targets)
    indices = np.arange(psi.amplitudes.size)
    return (indices & mask) == mask


def apply(gate: PhaseGateSpec, psi: PureState) -> PureState:
    """Multiply every amplitude with x_{|S} = 1_{|S} by eta.

    For S = ∅ the mask is empty, every index matches, and the whole state is
    multiplied by eta (G_∅ := eta I).
    """
    if not gate.targets <= psi.qubits:
        raise DomainError(
            f"gate targets {format_qubits(gate.targets)} outside carrier "
            f"{format_qubits(psi.carrier)}"
        )
    hit = eigen_mask(psi, gate.targets)
    out = psi.amplitudes.copy()
    out[hit] *= gate.eta
    out.flags.writeable = False
    log.debug(f"apply({gate}) touched {int(hit.sum())} of {out.size} amplitudes")
    return PureState(carrier=psi.carrier, amplitudes=out)
