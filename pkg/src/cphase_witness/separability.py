"""S-separability of pure states with bipartition certificates.

A state is S-separable when it factors across some bipartition (A, B) of its
qubits with both sides meeting S. Rank-one detection of the A×B
matricization is done two independent ways: singular values (numpy SVD) and
the vanishing of every 2×2 minor.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .errors import ArgumentError, DomainError, NotSeparableError
from .models import TAU_SEP
from .state import PureState, make_state, tensor
from .strings import QubitSet, format_qubits

log = logger.bind(component="separability")

# Entries at or below this modulus are skipped when fixing the factor phase.
_PHASE_FLOOR = 1e-12


@dataclass(frozen=True)
class Bipartition:
    a: QubitSet
    b: QubitSet

    def splits(self, s: QubitSet) -> bool:
        return bool(self.a & s) and bool(self.b & s)

    def __str__(self) -> str:
        return f"({format_qubits(self.a)}|{format_qubits(self.b)})"


@dataclass(frozen=True)
class RankVerdict:
    is_rank_one: bool
    singular_values: tuple[float, ...] | None = None
    max_minor: float | None = None

    @property
    def sigma2(self) -> float:
        if not self.singular_values or len(self.singular_values) < 2:
            return 0.0
        return self.singular_values[1]


@dataclass(frozen=True, eq=False)
class SeparationCertificate:
    """A split of S plus factor states with tensor(factor_a, factor_b) ≈ psi."""

    split: Bipartition
    factor_a: PureState
    factor_b: PureState
    residual: float
    singular_values: tuple[float, ...]

    def reconstruct(self) -> PureState:
        return tensor(self.factor_a, self.factor_b)


def _ordered_splits(universe: tuple[int, ...], anchor: int) -> Iterator[Bipartition]:
    """Unordered bipartitions of `universe` with `anchor` in A.

    Ordered by |A| ascending, then lexicographically on sorted A.
    """
    everything = frozenset(universe)
    for size in range(1, len(universe)):
        for combo in itertools.combinations(universe, size):
            if anchor not in combo:
                continue
            a = frozenset(combo)
            yield Bipartition(a=a, b=everything - a)


def bipartitions_splitting(s: Iterable[int], n: int) -> list[Bipartition]:
    """Every bipartition of [n] with both sides meeting S, each once.

    A holds the smallest index of S. Empty when |S| < 2.
    """
    targets = frozenset(s)
    if len(targets) < 2:
        return []
    universe = tuple(range(1, n + 1))
    if not targets <= frozenset(universe):
        raise DomainError(f"S={format_qubits(targets)} not inside [1..{n}]")
    return [p for p in _ordered_splits(universe, min(targets)) if p.splits(targets)]


def bipartitions(n: int) -> list[Bipartition]:
    """All unordered bipartitions of [n] (qubit 1 on side A)."""
    if n < 2:
        return []
    return list(_ordered_splits(tuple(range(1, n + 1)), 1))


def reshape(psi: PureState, split: Bipartition) -> np.ndarray:
    """Matricize psi: row index from the string on A, column from B."""
    if split.a & split.b or (split.a | split.b) != psi.qubits:
        raise DomainError(
            f"split {split} does not partition carrier {format_qubits(psi.carrier)}"
        )
    rows = [psi.carrier.index(q) for q in sorted(split.a)]
    cols = [psi.carrier.index(q) for q in sorted(split.b)]
    moved = np.transpose(psi.as_tensor(), rows + cols)
    return moved.reshape(1 << len(rows), 1 << len(cols))


def singular_values(matrix: np.ndarray) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linalg.svd(matrix, compute_uv=False))


def schmidt_values(psi: PureState, split: Bipartition) -> tuple[float, ...]:
    """All singular values of the A×B matricization, descending."""
    return singular_values(reshape(psi, split))


def rank_one_svd(matrix: np.ndarray, tol: float = TAU_SEP) -> RankVerdict:
    """Rank one iff sigma_2 <= tol."""
    sigma = singular_values(matrix)
    sigma2 = sigma[1] if len(sigma) > 1 else 0.0
    return RankVerdict(is_rank_one=sigma2 <= tol, singular_values=sigma)


def rank_one_minors(matrix: np.ndarray, tol: float = TAU_SEP) -> RankVerdict:
    """Rank one iff every 2×2 minor M_ij M_kl - M_il M_kj is <= tol in modulus."""
    m = np.asarray(matrix, dtype=np.complex128)
    worst = 0.0
    for i, k in itertools.combinations(range(m.shape[0]), 2):
        minors = np.multiply.outer(m[i], m[k]) - np.multiply.outer(m[k], m[i])
        if minors.size:
            worst = max(worst, float(np.abs(minors).max()))
    return RankVerdict(is_rank_one=worst <= tol, max_minor=worst)


def _phase_fixed(vec: np.ndarray) -> np.ndarray:
    """Rotate vec so its first non-negligible entry is real positive."""
    for entry in vec:
        magnitude = abs(entry)
        if magnitude > _PHASE_FLOOR:
            return vec * (np.conj(entry) / magnitude)
    return vec


def factorize(
    psi: PureState, split: Bipartition, tol: float = TAU_SEP
) -> tuple[PureState, PureState]:
    """Factor psi across `split` into (factor on A, factor on B).

    factor_a is the dominant left singular vector with its first nonzero
    entry real positive; factor_b absorbs the remaining phase, so the tensor
    product reconstructs psi itself (not just its ray).
    """
    matrix = reshape(psi, split)
    u, sigma, _ = np.linalg.svd(matrix)
    sigma_t = tuple(float(v) for v in sigma)
    sigma2 = sigma_t[1] if len(sigma_t) > 1 else 0.0
    if sigma2 > tol:
        raise NotSeparableError(
            f"psi is not a product across {split}: sigma_2={sigma2:.6g} > {tol:g}",
            list(sigma_t),
        )
    left = _phase_fixed(u[:, 0])
    right = left.conj() @ matrix
    factor_a = make_state(sorted(split.a), left, renormalize=True)
    factor_b = make_state(sorted(split.b), right, renormalize=True)
    return factor_a, factor_b


def find_separation(
    psi: PureState, s: Iterable[int], tol: float = TAU_SEP
) -> SeparationCertificate | None:
    """First S-splitting bipartition with a rank-one matricization, or None.

    None means psi is S-entangled at `tol`.
    """
    targets = frozenset(s)
    if len(targets) < 2:
        raise ArgumentError(f"S-separability needs |S| >= 2, got S={format_qubits(targets)}")
    if not targets <= psi.qubits:
        raise DomainError(f"S={format_qubits(targets)} outside carrier {format_qubits(psi.carrier)}")

    for split in _ordered_splits(psi.carrier, min(targets)):
        if not split.splits(targets):
            continue
        matrix = reshape(psi, split)
        verdict = rank_one_svd(matrix, tol)
        if tol / 10.0 <= verdict.sigma2 <= tol * 10.0:
            log.warning(f"sigma_2={verdict.sigma2:.3g} across {split} is within 10x of tol={tol:g}")
        if not verdict.is_rank_one:
            continue
        factor_a, factor_b = factorize(psi, split, tol)
        rebuilt = tensor(factor_a, factor_b)
        residual = float(np.abs(rebuilt.amplitudes - psi.amplitudes).max())
        log.debug(f"separable across {split}: sigma={verdict.singular_values[:2]}, residual={residual:.3g}")
        return SeparationCertificate(
            split=split,
            factor_a=factor_a,
            factor_b=factor_b,
            residual=residual,
            singular_values=verdict.singular_values or (),
        )
    log.debug(f"S-entangled for S={format_qubits(targets)}")
    return None


def verify_certificate(
    psi: PureState, s: Iterable[int], cert: SeparationCertificate, tol: float = TAU_SEP
) -> bool:
    """Check a certificate independently: the split meets S and rebuilds psi."""
    if not cert.split.splits(frozenset(s)):
        return False
    rebuilt = cert.reconstruct()
    if rebuilt.carrier != psi.carrier:
        return False
    return float(np.abs(rebuilt.amplitudes - psi.amplitudes).max()) <= tol


def splitting_spectrum(
    psi: PureState, s: Iterable[int]
) -> list[tuple[Bipartition, tuple[float, ...]]]:
    """Singular values across every S-splitting bipartition (diagnostics)."""
    targets = frozenset(s)
    if len(targets) < 2:
        return []
    return [
        (split, singular_values(reshape(psi, split)))
        for split in _ordered_splits(psi.carrier, min(targets))
        if split.splits(targets)
    ]


def min_second_singular_value(psi: PureState, s: Iterable[int]) -> float:
    """Smallest sigma_2 over the S-splitting bipartitions."""
    spectrum = splitting_spectrum(psi, s)
    if not spectrum:
        return 0.0
    return min((sv[1] if len(sv) > 1 else 0.0) for _, sv in spectrum)


def is_everywhere_entangled(psi: PureState, tol: float = TAU_SEP) -> bool:
    """Not separable across any bipartition of the carrier."""
    if psi.n < 2:
        return False
    return find_separation(psi, psi.carrier, tol) is None
