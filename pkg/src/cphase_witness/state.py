"""Pure statevectors on a carrier set of qubits.

Amplitudes are stored densely; index bit order follows the sorted carrier
with the smallest qubit most significant. Factor states carry their own
carrier (A or B) so inner products on a side need no re-indexing.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .errors import DomainError, NormalizationError, ShapeError
from .models import MAX_QUBITS, TAU_NORM
from .strings import PartialString, QubitSet, format_qubits

log = logger.bind(component="state")


@dataclass(frozen=True, eq=False)
class PureState:
    """Immutable unit vector over 2^|carrier| basis strings."""

    carrier: tuple[int, ...]
    amplitudes: np.ndarray

    @property
    def n(self) -> int:
        return len(self.carrier)

    @property
    def qubits(self) -> QubitSet:
        return frozenset(self.carrier)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_tensor(self) -> np.ndarray:
        """Amplitudes as a (2,)*n array, axis i = i-th smallest carrier qubit."""
        return self.amplitudes.reshape((2,) * self.n)

    def __repr__(self) -> str:
        return f"PureState(carrier={format_qubits(self.carrier)}, dim={self.amplitudes.size})"


def _sorted_carrier(carrier: Iterable[int]) -> tuple[int, ...]:
    members = [int(q) for q in carrier]
    if len(set(members)) != len(members):
        raise DomainError(f"carrier has duplicate qubits: {members}")
    if any(q < 1 for q in members):
        raise DomainError(f"qubit indices are 1-based, got {members}")
    return tuple(sorted(members))


def make_state(
    carrier: Iterable[int],
    amplitudes: Iterable[complex] | np.ndarray,
    renormalize: bool = False,
    tol: float = TAU_NORM,
    max_qubits: int = MAX_QUBITS,
) -> PureState:
    """Validate amplitudes into a PureState.

    Raises ShapeError on a length other than 2^|carrier| and
    NormalizationError when the squared norm is off by more than `tol`
    (unless `renormalize` is set).
    """
    qubits = _sorted_carrier(carrier)
    if len(qubits) > max_qubits:
        raise ShapeError(f"{len(qubits)} qubits exceeds the configured cap of {max_qubits}")
    vec = np.array(amplitudes, dtype=np.complex128).reshape(-1)
    expected = 1 << len(qubits)
    if vec.size != expected:
        raise ShapeError(
            f"carrier {format_qubits(qubits)} needs {expected} amplitudes, got {vec.size}"
        )

    if not np.all(np.isfinite(vec)):
        raise NormalizationError(float("nan"), tol)
    norm_sq = float(np.vdot(vec, vec).real)
    if renormalize:
        if not (np.isfinite(norm_sq) and norm_sq > 0.0):
            raise NormalizationError(norm_sq, tol)
        vec = vec / np.sqrt(norm_sq)
    elif not abs(norm_sq - 1.0) <= tol:
        raise NormalizationError(norm_sq, tol)

    vec.flags.writeable = False
    return PureState(carrier=qubits, amplitudes=vec)


def index_mask(carrier: Iterable[int], subset: Iterable[int]) -> int:
    """Bitmask over basis indices of `carrier` selecting the qubits in `subset`."""
    qubits = _sorted_carrier(carrier)
    width = len(qubits)
    mask = 0
    wanted = frozenset(subset)
    missing = wanted - frozenset(qubits)
    if missing:
        raise DomainError(
            f"{format_qubits(missing)} not in carrier {format_qubits(qubits)}"
        )
    for pos, q in enumerate(qubits):
        if q in wanted:
            mask |= 1 << (width - 1 - pos)
    return mask


def amplitude(psi: PureState, x: PartialString) -> complex:
    """The coefficient <x|psi>; dom(x) must equal the carrier."""
    if x.domain != psi.qubits:
        raise DomainError(
            f"string on {format_qubits(x.domain)} does not match carrier "
            f"{format_qubits(psi.carrier)}"
        )
    return complex(psi.amplitudes[x.index])


def tensor(psi_a: PureState, psi_b: PureState) -> PureState:
    """psi_a ⊗ psi_b on the union of the (disjoint) carriers."""
    overlap = psi_a.qubits & psi_b.qubits
    if overlap:
        raise DomainError(f"tensor of states with overlapping carriers {format_qubits(overlap)}")
    joined = psi_a.carrier + psi_b.carrier
    target = tuple(sorted(joined))
    outer = np.multiply.outer(psi_a.as_tensor(), psi_b.as_tensor())
    perm = [joined.index(q) for q in target]
    vec = np.transpose(outer, perm).reshape(-1).copy()
    vec.flags.writeable = False
    return PureState(carrier=target, amplitudes=vec)


def swap_qubits(psi: PureState, i: int, j: int) -> PureState:
    """Exchange the roles of qubits i and j."""
    if i not in psi.qubits or j not in psi.qubits:
        raise DomainError(f"swap({i},{j}) outside carrier {format_qubits(psi.carrier)}")
    axes = list(range(psi.n))
    pi, pj = psi.carrier.index(i), psi.carrier.index(j)
    axes[pi], axes[pj] = axes[pj], axes[pi]
    vec = np.transpose(psi.as_tensor(), axes).reshape(-1).copy()
    vec.flags.writeable = False
    return PureState(carrier=psi.carrier, amplitudes=vec)


def inner(psi: PureState, phi: PureState) -> complex:
    """<psi|phi> on a shared carrier."""
    if psi.carrier != phi.carrier:
        raise DomainError("inner product of states on different carriers")
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def distance(psi: PureState, phi: PureState) -> float:
    """||psi - phi|| on a shared carrier."""
    if psi.carrier != phi.carrier:
        raise DomainError("distance between states on different carriers")
    return float(np.linalg.norm(psi.amplitudes - phi.amplitudes))


def basis_state(carrier: Iterable[int], x: PartialString | str) -> PureState:
    qubits = _sorted_carrier(carrier)
    if isinstance(x, str):
        x = PartialString.from_bits(qubits, x)
    if x.domain != frozenset(qubits):
        raise DomainError(f"basis string {x} does not cover carrier {format_qubits(qubits)}")
    vec = np.zeros(1 << len(qubits), dtype=np.complex128)
    vec[x.index] = 1.0
    return make_state(qubits, vec)


def plus_state(carrier: Iterable[int]) -> PureState:
    """|+...+> on the carrier."""
    qubits = _sorted_carrier(carrier)
    dim = 1 << len(qubits)
    return make_state(qubits, np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128))
