"""Checkers and solution samplers for the coefficient lemmas.

Each lemma takes complex numbers a, b, c, d and eta != 1 with

    a·b = eta c·d   at the all-ones index
    a·b = c·d       everywhere else

and concludes that (when the all-ones a and b entries are nonzero) one of
two groups of c or d entries vanishes. Arity decides the index shapes:

    4sets   a_{jk} b_{lm} = c_{jl} d_{km}      a, b, c, d all 2x2
    3sets   a_{jk} b_m    = c_j d_{km}         a, d 2x2; b, c 2-vectors
    2sets   a_j b_m       = c_j d_m            all 2-vectors
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .errors import ArgumentError, InvalidPhaseError
from .models import LEMMA_TOL, TAU_ETA, ConclusionBranch, LemmaArity

log = logger.bind(component="lemmas")

_SHAPES: dict[LemmaArity, tuple[tuple[int, ...], ...]] = {
    LemmaArity.FOUR: ((2, 2), (2, 2), (2, 2), (2, 2)),
    LemmaArity.THREE: ((2, 2), (2,), (2,), (2, 2)),
    LemmaArity.TWO: ((2,), (2,), (2,), (2,)),
}

# Free parameters of each solution family; every one must be nonzero.
FREE_PARAMETERS: dict[tuple[LemmaArity, ConclusionBranch], tuple[str, ...]] = {
    (LemmaArity.FOUR, ConclusionBranch.C_ZERO): ("a10", "a11", "b10", "b11", "c11"),
    (LemmaArity.FOUR, ConclusionBranch.D_ZERO): ("a11", "c10", "c11", "d11"),
    (LemmaArity.THREE, ConclusionBranch.C_ZERO): ("a11", "c1", "d11", "d01", "d10"),
    (LemmaArity.THREE, ConclusionBranch.D_ZERO): ("a11", "c0", "c1", "d11", "d01"),
    (LemmaArity.TWO, ConclusionBranch.C_ZERO): ("a1", "c1", "d1", "d0"),
    (LemmaArity.TWO, ConclusionBranch.D_ZERO): ("a1", "c1", "d1", "c0"),
}

# Parameters that may be 0 (the default); a nonzero value widens the family.
OPTIONAL_PARAMETERS: dict[tuple[LemmaArity, ConclusionBranch], tuple[str, ...]] = {
    (LemmaArity.FOUR, ConclusionBranch.D_ZERO): ("a01",),
}


@dataclass(frozen=True, eq=False)
class LemmaSystem:
    arity: LemmaArity
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    eta: complex

    def __post_init__(self) -> None:
        arity = LemmaArity(self.arity)
        object.__setattr__(self, "arity", arity)
        for name, shape in zip("abcd", _SHAPES[arity]):
            value = np.asarray(getattr(self, name), dtype=np.complex128)
            if value.shape != shape:
                raise ArgumentError(
                    f"{arity} system needs {name} of shape {shape}, got {value.shape}"
                )
            object.__setattr__(self, name, value)
        object.__setattr__(self, "eta", complex(self.eta))

    @property
    def all_ones_a(self) -> complex:
        return complex(self.a[1, 1] if self.a.ndim == 2 else self.a[1])

    @property
    def all_ones_b(self) -> complex:
        return complex(self.b[1, 1] if self.b.ndim == 2 else self.b[1])


def make_lemma_system(
    arity: LemmaArity | str,
    a: Sequence[complex],
    b: Sequence[complex],
    c: Sequence[complex],
    d: Sequence[complex],
    eta: complex,
) -> LemmaSystem:
    """Build a system from flat row-major lists (a00, a01, a10, a11 for 2x2)."""
    arity = LemmaArity(arity)
    arrays = []
    for name, values, shape in zip("abcd", (a, b, c, d), _SHAPES[arity]):
        flat = np.asarray(values, dtype=np.complex128).reshape(-1)
        if flat.size != math.prod(shape):
            raise ArgumentError(
                f"{arity} system needs {math.prod(shape)} values for {name}, got {flat.size}"
            )
        arrays.append(flat.reshape(shape))
    return LemmaSystem(arity, *arrays, eta=eta)


@dataclass(frozen=True)
class LemmaReport:
    arity: LemmaArity
    hypothesis_holds: bool
    nondegenerate: bool
    conclusion_branch: ConclusionBranch
    max_residual: float
    conclusion_residual: float = 0.0

    @property
    def violated(self) -> bool:
        return self.conclusion_branch == ConclusionBranch.VIOLATED


def hypothesis_terms(sys: LemmaSystem) -> Iterator[tuple[complex, complex, bool]]:
    """Yield (a·b, c·d, is_all_ones) for every hypothesis equation."""
    a, b, c, d = sys.a, sys.b, sys.c, sys.d
    if sys.arity == LemmaArity.FOUR:
        for j, k, ell, m in itertools.product((0, 1), repeat=4):
            yield a[j, k] * b[ell, m], c[j, ell] * d[k, m], bool(j & k & ell & m)
    elif sys.arity == LemmaArity.THREE:
        for j, k, m in itertools.product((0, 1), repeat=3):
            yield a[j, k] * b[m], c[j] * d[k, m], bool(j & k & m)
    else:
        for j, m in itertools.product((0, 1), repeat=2):
            yield a[j] * b[m], c[j] * d[m], bool(j & m)


def hypothesis_residual(sys: LemmaSystem) -> float:
    worst = 0.0
    for ab, cd, all_ones in hypothesis_terms(sys):
        rhs = sys.eta * cd if all_ones else cd
        worst = max(worst, abs(ab - rhs))
    return worst


def _branch_groups(sys: LemmaSystem) -> tuple[list[complex], list[complex]]:
    """Entries that vanish on the c branch and on the d branch."""
    c, d = sys.c, sys.d
    if sys.arity == LemmaArity.FOUR:
        return [c[0, 0], c[0, 1], c[1, 0]], [d[0, 0], d[0, 1], d[1, 0]]
    if sys.arity == LemmaArity.THREE:
        return [c[0]], [d[0, 0], d[1, 0]]
    return [c[0]], [d[0]]


def _conclusion_products(sys: LemmaSystem) -> list[complex]:
    """Products the lemma's closing equation forces to zero."""
    a, b, c, d = sys.a, sys.b, sys.c, sys.d
    if sys.arity == LemmaArity.FOUR:
        out: list[complex] = []
        for r, s in itertools.product((0, 1), repeat=2):
            out += [a[r, 0] * b[0, s], a[0, r] * b[s, 0], c[r, 0] * d[0, s], c[0, r] * d[s, 0]]
        return out
    if sys.arity == LemmaArity.THREE:
        return [a[0, 0] * b[0], c[0] * d[0, 0], a[0, 1] * b[0], c[0] * d[1, 0]]
    return [a[0] * b[0], c[0] * d[0]]


def _scale(sys: LemmaSystem) -> float:
    return max(1.0, *(float(np.abs(arr).max()) for arr in (sys.a, sys.b, sys.c, sys.d)))


def check_lemma(sys: LemmaSystem, tol: float = LEMMA_TOL) -> LemmaReport:
    """Check hypotheses, then (if they hold non-degenerately) the conclusion.

    Entries count as nonzero above 10·tol. The c branch is reported first when
    both groups vanish. A system whose hypotheses fail, or whose all-ones a or
    b entry is zero, says nothing about the conclusion and reports vacuous.
    """
    if abs(sys.eta - 1.0) <= TAU_ETA:
        raise InvalidPhaseError(f"eta={sys.eta} is within {TAU_ETA:g} of 1")

    residual = hypothesis_residual(sys)
    holds = residual <= tol
    zero_tol = 10.0 * tol
    nondegenerate = abs(sys.all_ones_a) > zero_tol and abs(sys.all_ones_b) > zero_tol

    if not (holds and nondegenerate):
        branch = ConclusionBranch.VACUOUS
        conclusion = 0.0
    else:
        c_group, d_group = _branch_groups(sys)
        conclusion = max(abs(p) for p in _conclusion_products(sys))
        if conclusion > zero_tol * _scale(sys):
            branch = ConclusionBranch.VIOLATED
        elif all(abs(v) <= zero_tol for v in c_group):
            branch = ConclusionBranch.C_ZERO
        elif all(abs(v) <= zero_tol for v in d_group):
            branch = ConclusionBranch.D_ZERO
        else:
            branch = ConclusionBranch.VIOLATED

    if branch == ConclusionBranch.VIOLATED:
        log.error(f"{sys.arity} lemma conclusion fails: residual={residual:.3g}, conclusion={conclusion:.3g}")
    return LemmaReport(
        arity=sys.arity,
        hypothesis_holds=holds,
        nondegenerate=nondegenerate,
        conclusion_branch=branch,
        max_residual=residual,
        conclusion_residual=conclusion,
    )


def _expect(sys: LemmaSystem, arity: LemmaArity) -> None:
    if sys.arity != arity:
        raise ArgumentError(f"expected a {arity} system, got {sys.arity}")


def check_lemma_4sets(sys: LemmaSystem, tol: float = LEMMA_TOL) -> LemmaReport:
    _expect(sys, LemmaArity.FOUR)
    return check_lemma(sys, tol)


def check_lemma_3sets(sys: LemmaSystem, tol: float = LEMMA_TOL) -> LemmaReport:
    _expect(sys, LemmaArity.THREE)
    return check_lemma(sys, tol)


def check_lemma_2sets(sys: LemmaSystem, tol: float = LEMMA_TOL) -> LemmaReport:
    _expect(sys, LemmaArity.TWO)
    return check_lemma(sys, tol)


def remark_residuals(sys: LemmaSystem) -> dict[str, float]:
    """Residuals of c01c10 = eta c00c11 and d01d10 = eta d00d11 where they apply.

    Only meaningful on nondegenerate systems that satisfy the hypotheses.
    """
    c, d, eta = sys.c, sys.d, sys.eta
    out: dict[str, float] = {}
    if sys.arity == LemmaArity.FOUR:
        out["c"] = abs(c[0, 1] * c[1, 0] - eta * c[0, 0] * c[1, 1])
    if sys.arity in (LemmaArity.FOUR, LemmaArity.THREE):
        out["d"] = abs(d[0, 1] * d[1, 0] - eta * d[0, 0] * d[1, 1])
    return out


def build_lemma_system(
    arity: LemmaArity | str,
    eta: complex,
    params: Mapping[str, complex],
    branch: ConclusionBranch | str,
) -> LemmaSystem:
    """Solve the hypotheses for the dependent entries of a solution family.

    The free parameters for each (arity, branch) are listed in
    FREE_PARAMETERS; all must be nonzero. Those in OPTIONAL_PARAMETERS default
    to 0. Entries outside the family are 0.
    """
    arity = LemmaArity(arity)
    branch = ConclusionBranch(branch)
    key = (arity, branch)
    if key not in FREE_PARAMETERS:
        raise ArgumentError(f"no solution family for {arity} on {branch}")
    if abs(eta - 1.0) <= TAU_ETA:
        raise InvalidPhaseError(f"eta={eta} is within {TAU_ETA:g} of 1")
    names = FREE_PARAMETERS[key]
    missing = [n for n in names if n not in params]
    if missing:
        raise ArgumentError(f"{arity}/{branch} family needs parameters {missing}")
    p = {n: complex(params[n]) for n in names}
    if any(v == 0 for v in p.values()):
        raise ArgumentError(f"free parameters must be nonzero: {p}")
    for name in OPTIONAL_PARAMETERS.get(key, ()):
        p[name] = complex(params.get(name, 0))

    eta = complex(eta)
    a = np.zeros(_SHAPES[arity][0], dtype=np.complex128)
    b = np.zeros(_SHAPES[arity][1], dtype=np.complex128)
    c = np.zeros(_SHAPES[arity][2], dtype=np.complex128)
    d = np.zeros(_SHAPES[arity][3], dtype=np.complex128)

    if arity == LemmaArity.FOUR and branch == ConclusionBranch.D_ZERO:
        a[1, 1] = p["a11"]
        c[1, 0], c[1, 1] = p["c10"], p["c11"]
        d[1, 1] = p["d11"]
        b[0, 1] = c[1, 0] * d[1, 1] / a[1, 1]
        b[1, 1] = eta * c[1, 1] * d[1, 1] / a[1, 1]
        a[0, 1] = p["a01"]
        c[0, 0] = a[0, 1] * c[1, 0] / a[1, 1]
        c[0, 1] = eta * a[0, 1] * c[1, 1] / a[1, 1]
    elif arity == LemmaArity.FOUR:
        a[1, 0], a[1, 1] = p["a10"], p["a11"]
        b[1, 0], b[1, 1] = p["b10"], p["b11"]
        c[1, 1] = p["c11"]
        for k, m in itertools.product((0, 1), repeat=2):
            d[k, m] = a[1, k] * b[1, m] / c[1, 1]
        d[1, 1] /= eta
    elif arity == LemmaArity.THREE and branch == ConclusionBranch.D_ZERO:
        a[1, 1], c[0], c[1] = p["a11"], p["c0"], p["c1"]
        d[1, 1], d[0, 1] = p["d11"], p["d01"]
        b[1] = eta * c[1] * d[1, 1] / a[1, 1]
        a[0, 0] = a[1, 1] * c[0] * d[0, 1] / (eta * c[1] * d[1, 1])
        a[0, 1] = a[1, 1] * c[0] / (eta * c[1])
        a[1, 0] = a[1, 1] * d[0, 1] / (eta * d[1, 1])
    elif arity == LemmaArity.THREE:
        a[1, 1], c[1] = p["a11"], p["c1"]
        d[1, 1], d[0, 1], d[1, 0] = p["d11"], p["d01"], p["d10"]
        b[0] = c[1] * d[1, 0] / a[1, 1]
        b[1] = eta * c[1] * d[1, 1] / a[1, 1]
        a[1, 0] = a[1, 1] * d[0, 1] / (eta * d[1, 1])
        d[0, 0] = d[0, 1] * d[1, 0] / (eta * d[1, 1])
    elif branch == ConclusionBranch.C_ZERO:
        a[1], c[1], d[1], d[0] = p["a1"], p["c1"], p["d1"], p["d0"]
        b[0] = c[1] * d[0] / a[1]
        b[1] = eta * c[1] * d[1] / a[1]
    else:
        a[1], c[1], d[1], c[0] = p["a1"], p["c1"], p["d1"], p["c0"]
        b[1] = eta * c[1] * d[1] / a[1]
        a[0] = a[1] * c[0] / (eta * c[1])

    return LemmaSystem(arity, a, b, c, d, eta=eta)


def sample_lemma_system(
    arity: LemmaArity | str,
    eta: complex,
    seed: int,
    branch: ConclusionBranch | str | None = None,
) -> LemmaSystem:
    """A nondegenerate solution with free parameters on the unit circle.

    The branch is drawn from the seed unless given. Optional parameters are
    0 or on the unit circle with equal odds.
    """
    arity = LemmaArity(arity)
    rng = np.random.Generator(np.random.Philox(seed))
    if branch is None:
        branch = ConclusionBranch.C_ZERO if rng.random() < 0.5 else ConclusionBranch.D_ZERO
    branch = ConclusionBranch(branch)
    names = FREE_PARAMETERS[(arity, branch)]
    angles = rng.random(len(names))
    params = {n: cmath.exp(2j * math.pi * t) for n, t in zip(names, angles)}
    for name in OPTIONAL_PARAMETERS.get((arity, branch), ()):
        params[name] = cmath.exp(2j * math.pi * rng.random()) if rng.random() < 0.5 else 0
    return build_lemma_system(arity, eta, params, branch)
