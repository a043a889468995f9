"""Seeded state generators and the trichotomy / lemma fuzz drivers.

Every random draw comes from numpy's Philox counter-based generator, so a
(family, n, seed) triple produces the same state on every platform. Complex
Gaussians are built by Box-Muller from Philox uniforms.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .concurrency import current_rss_mb, run_trials
from .errors import ArgumentError, DegenerateFamilyError, DomainError, WitnessError
from .lemmas import check_lemma, remark_residuals, sample_lemma_system
from .models import (
    LEMMA_TOL,
    MAX_QUBITS,
    TAU_SEP,
    TAU_ZERO,
    ConclusionBranch,
    FamilyKind,
    LemmaArity,
)
from .separability import Bipartition, bipartitions_splitting
from .state import PureState, basis_state, make_state, plus_state, tensor
from .strings import QubitSet, format_qubits, full_set
from .theorem import verify_trichotomy

log = logger.bind(component="harness")

_MAX_RESAMPLES = 16

DEFAULT_FAMILIES: tuple[FamilyKind, ...] = tuple(FamilyKind)


def trial_seed(seed: int, index: int) -> int:
    """64-bit seed for trial `index`, derived through a SeedSequence."""
    sequence = np.random.SeedSequence([seed, index])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def complex_gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard complex normals by Box-Muller on Philox uniforms."""
    u1 = rng.random(size)
    u2 = rng.random(size)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    return radius * np.exp(2j * math.pi * u2)


@dataclass(frozen=True)
class StateFamily:
    """A generator recipe: kind, seed and the kind's own parameters.

    split is used by product, targets by the forced kinds, witness by
    forced_reduce (defaults to min(targets)), bits by basis.
    """

    kind: FamilyKind
    seed: int = 0
    split: Bipartition | None = None
    targets: QubitSet | None = None
    witness: int | None = None
    bits: str | None = None

    def describe(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "seed": self.seed}
        if self.split is not None:
            out["split"] = str(self.split)
        if self.targets is not None:
            out["S"] = sorted(self.targets)
        if self.witness is not None:
            out["i"] = self.witness
        if self.bits is not None:
            out["bits"] = self.bits
        return out


def _haar(rng: np.random.Generator, carrier: Sequence[int]) -> PureState:
    return make_state(carrier, complex_gaussian(rng, 1 << len(carrier)), renormalize=True)


def _in_boundary_band(psi: PureState, tau_zero: float) -> bool:
    moduli = np.abs(psi.amplitudes)
    return bool(np.any((moduli >= tau_zero / 10.0) & (moduli <= tau_zero * 10.0)))


def _zeroed(psi: PureState, drop: np.ndarray, family: StateFamily) -> PureState:
    vec = psi.amplitudes.copy()
    vec[drop] = 0.0
    if float(np.vdot(vec, vec).real) == 0.0:
        raise DegenerateFamilyError(f"{family.kind} left no support after zeroing")
    return make_state(psi.carrier, vec, renormalize=True)


def _draw(rng: np.random.Generator, family: StateFamily, n: int) -> PureState:
    carrier = tuple(range(1, n + 1))
    indices = np.arange(1 << n)

    if family.kind == FamilyKind.HAAR:
        return _haar(rng, carrier)

    if family.kind == FamilyKind.PRODUCT:
        if n < 2:
            raise ArgumentError("product family needs n >= 2")
        split = family.split or Bipartition(frozenset({1}), full_set(n) - {1})
        if (split.a | split.b) != full_set(n) or split.a & split.b or not split.a or not split.b:
            raise DomainError(f"split {split} is not a bipartition of [1..{n}]")
        return tensor(_haar(rng, sorted(split.a)), _haar(rng, sorted(split.b)))

    targets = family.targets if family.targets is not None else full_set(n)
    if not targets <= full_set(n):
        raise DomainError(f"S={format_qubits(targets)} not inside [1..{n}]")

    if family.kind == FamilyKind.FORCED_FIXED_POINT:
        mask = sum(1 << (n - q) for q in targets)
        return _zeroed(_haar(rng, carrier), (indices & mask) == mask, family)

    if family.kind == FamilyKind.FORCED_REDUCE:
        if not targets:
            raise DegenerateFamilyError("forced_reduce needs a nonempty S")
        witness = family.witness if family.witness is not None else min(targets)
        if witness not in targets:
            raise DomainError(f"witness qubit {witness} not in S={format_qubits(targets)}")
        bit = 1 << (n - witness)
        return _zeroed(_haar(rng, carrier), (indices & bit) == 0, family)

    raise ArgumentError(f"{family.kind} is not a random family")


def generate(family: StateFamily, n: int, tau_zero: float = TAU_ZERO) -> PureState:
    """A state of `family` on qubits 1..n; pure function of (family, n)."""
    if not 1 <= n <= MAX_QUBITS:
        raise ArgumentError(f"n must be in 1..{MAX_QUBITS}, got {n}")
    if family.kind == FamilyKind.PLUS_ALL:
        return plus_state(range(1, n + 1))
    if family.kind == FamilyKind.BASIS:
        bits = family.bits if family.bits is not None else "0" * n
        return basis_state(range(1, n + 1), bits)

    rng = philox(family.seed)
    for attempt in range(_MAX_RESAMPLES):
        psi = _draw(rng, family, n)
        if not _in_boundary_band(psi, tau_zero):
            return psi
        log.warning(f"{family.kind} seed={family.seed}: amplitude near tau_zero, resampling ({attempt + 1})")
    raise DegenerateFamilyError(
        f"{family.kind} seed={family.seed} stayed in the tolerance band after {_MAX_RESAMPLES} draws"
    )


class FuzzConfig(BaseModel):
    """Ranges swept by fuzz_trichotomy."""

    model_config = ConfigDict(frozen=True)

    n_values: list[int] = Field(default_factory=lambda: [2, 3, 4])
    min_s_size: int = Field(default=2, ge=2)
    thetas: list[float] = Field(default_factory=lambda: [math.pi, math.pi / 2, 1.0])
    families: list[FamilyKind] = Field(default_factory=lambda: list(DEFAULT_FAMILIES))
    trials: int = Field(default=1000, ge=0)
    seed: int = 7
    product_full_support: bool = False
    max_workers: int = Field(default=0, ge=0)
    tau_sep: float = Field(default=TAU_SEP, gt=0)
    tau_zero: float = Field(default=TAU_ZERO, gt=0)

    @field_validator("n_values")
    @classmethod
    def _check_n(cls, values: list[int]) -> list[int]:
        if not values:
            raise ValueError("n_values must not be empty")
        bad = [n for n in values if not 2 <= n <= MAX_QUBITS]
        if bad:
            raise ValueError(f"n must be in 2..{MAX_QUBITS}, got {bad}")
        return values

    @field_validator("thetas", "families")
    @classmethod
    def _non_empty(cls, values: list[Any]) -> list[Any]:
        if not values:
            raise ValueError("must not be empty")
        return values


@dataclass(frozen=True)
class TrialRecord:
    index: int
    seed: int
    n: int
    targets: tuple[int, ...]
    theta: float
    family: dict[str, Any]
    branches: tuple[int, ...]
    holds: bool
    full_support: bool
    error: str | None = None
    dump: dict[str, Any] | None = None

    @property
    def histogram_key(self) -> str:
        if self.error is not None:
            return "error"
        return "+".join(str(b) for b in self.branches) or "none"

    def as_dict(self) -> dict[str, Any]:
        out = {
            "index": self.index,
            "seed": self.seed,
            "n": self.n,
            "S": list(self.targets),
            "theta": self.theta,
            "family": self.family,
            "branches": list(self.branches),
            "holds": self.holds,
            "full_support": self.full_support,
        }
        if self.error is not None:
            out["error"] = self.error
        if self.dump is not None:
            out["dump"] = self.dump
        return out


@dataclass
class FuzzSummary:
    trials: int = 0
    branch_histogram: dict[str, int] = field(default_factory=dict)
    family_counts: dict[str, int] = field(default_factory=dict)
    failures: list[dict[str, Any]] = field(default_factory=list)
    sharp_trials: int = 0
    sharp_hits: int = 0
    wall_time: float = 0.0
    peak_rss_mb: float = 0.0
    records: list[TrialRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict[str, Any]:
        """Summary without per-trial records. Only wall_time varies between runs."""
        return {
            "trials": self.trials,
            "branch_histogram": dict(sorted(self.branch_histogram.items())),
            "family_counts": dict(sorted(self.family_counts.items())),
            "failures": self.failures,
            "sharp_trials": self.sharp_trials,
            "sharp_hits": self.sharp_hits,
            "wall_time": self.wall_time,
        }


def _subsets(n: int, min_size: int) -> list[QubitSet]:
    universe = range(1, n + 1)
    return [
        frozenset(combo)
        for size in range(min_size, n + 1)
        for combo in itertools.combinations(universe, size)
    ]


@dataclass(frozen=True)
class _TrialPlan:
    index: int
    seed: int
    n: int
    targets: QubitSet
    theta: float
    family: StateFamily


def plan_trial(config: FuzzConfig, index: int) -> _TrialPlan:
    """Draw (n, S, theta, family) for one trial from its derived seed."""
    seed = trial_seed(config.seed, index)
    rng = philox(seed)
    candidates = [n for n in config.n_values if n >= config.min_s_size]
    if not candidates:
        raise ArgumentError(f"no n in {config.n_values} admits |S| >= {config.min_s_size}")
    n = candidates[int(rng.integers(len(candidates)))]
    subsets = _subsets(n, config.min_s_size)
    targets = subsets[int(rng.integers(len(subsets)))]
    theta = config.thetas[int(rng.integers(len(config.thetas)))]
    kinds = [FamilyKind.PRODUCT] if config.product_full_support else config.families
    kind = FamilyKind(kinds[int(rng.integers(len(kinds)))])

    family = StateFamily(kind=kind, seed=seed)
    if kind == FamilyKind.PRODUCT:
        splits = bipartitions_splitting(targets, n)
        family = StateFamily(kind=kind, seed=seed, split=splits[int(rng.integers(len(splits)))])
    elif kind in (FamilyKind.FORCED_FIXED_POINT, FamilyKind.FORCED_REDUCE):
        members = sorted(targets)
        witness = members[int(rng.integers(len(members)))] if kind == FamilyKind.FORCED_REDUCE else None
        family = StateFamily(kind=kind, seed=seed, targets=targets, witness=witness)
    elif kind == FamilyKind.BASIS:
        bits = "".join(str(int(b)) for b in rng.integers(0, 2, size=n))
        family = StateFamily(kind=kind, seed=seed, bits=bits)
    return _TrialPlan(index=index, seed=seed, n=n, targets=targets, theta=theta, family=family)


def run_trial(config: FuzzConfig, index: int) -> TrialRecord:
    plan = plan_trial(config, index)
    base = {
        "index": index,
        "seed": plan.seed,
        "n": plan.n,
        "targets": tuple(sorted(plan.targets)),
        "theta": plan.theta,
        "family": plan.family.describe(),
    }
    try:
        psi = generate(plan.family, plan.n, config.tau_zero)
        report = verify_trichotomy(
            psi, plan.targets, plan.theta, tau_sep=config.tau_sep, tau_zero=config.tau_zero
        )
    except WitnessError as e:
        log.error(f"trial {index} raised {type(e).__name__}: {e}")
        return TrialRecord(**base, branches=(), holds=False, full_support=False, error=str(e))

    full_support = bool(np.all(np.abs(psi.amplitudes) > config.tau_zero))
    dump = report.counterexample_dump
    if report.audit is not None and not report.audit.ok:
        dump = {**(dump or {}), "audit": str(report.audit)}
    return TrialRecord(
        **base,
        branches=report.branches,
        holds=report.holds and (report.audit is None or report.audit.ok),
        full_support=full_support,
        dump=dump,
    )


def fuzz_trichotomy(config: FuzzConfig) -> FuzzSummary:
    """Run config.trials trials and aggregate them in trial-index order."""
    log.info(
        f"fuzz: {config.trials} trials, n={config.n_values}, thetas={config.thetas}, "
        f"seed={config.seed}"
    )
    start = time.monotonic()
    rss_samples = [current_rss_mb()]

    def sampled(index: int) -> TrialRecord:
        record = run_trial(config, index)
        rss_samples.append(current_rss_mb())
        return record

    records = run_trials(sampled, list(range(config.trials)), config.max_workers)

    summary = FuzzSummary(trials=len(records), records=records)
    histogram: Counter[str] = Counter()
    families: Counter[str] = Counter()
    for record in records:
        histogram[record.histogram_key] += 1
        families[record.family["kind"]] += 1
        if not record.holds:
            summary.failures.append(record.as_dict())
        if record.family["kind"] == FamilyKind.PRODUCT.value and record.full_support:
            summary.sharp_trials += 1
            if record.branches == (2,):
                summary.sharp_hits += 1
    summary.branch_histogram = dict(histogram)
    summary.family_counts = dict(families)
    summary.wall_time = time.monotonic() - start
    summary.peak_rss_mb = max(rss_samples)
    if summary.failures:
        log.error(f"fuzz: {len(summary.failures)} of {summary.trials} trials failed")
    else:
        log.info(f"fuzz: {summary.trials} trials, no failures ({summary.wall_time:.2f}s)")
    return summary


@dataclass
class LemmaBatchSummary:
    arity: LemmaArity
    eta: complex
    count: int = 0
    branch_histogram: dict[str, int] = field(default_factory=dict)
    max_residual: float = 0.0
    max_remark_residual: float = 0.0

    @property
    def violated(self) -> int:
        return self.branch_histogram.get(ConclusionBranch.VIOLATED.value, 0)

    def as_dict(self) -> dict[str, Any]:
        return {
            "arity": self.arity.value,
            "eta": [self.eta.real, self.eta.imag],
            "count": self.count,
            "branch_histogram": dict(sorted(self.branch_histogram.items())),
            "violated": self.violated,
            "max_residual": self.max_residual,
            "max_remark_residual": self.max_remark_residual,
        }


def lemma_batch(
    arity: LemmaArity | str,
    eta: complex,
    count: int,
    seed: int,
    tol: float = LEMMA_TOL,
    max_workers: int = 0,
) -> LemmaBatchSummary:
    """Sample `count` systems and check each against its lemma."""
    arity = LemmaArity(arity)

    def one(index: int) -> tuple[str, float, float]:
        system = sample_lemma_system(arity, eta, trial_seed(seed, index))
        report = check_lemma(system, tol)
        remarks = remark_residuals(system)
        return report.conclusion_branch.value, report.max_residual, max(remarks.values(), default=0.0)

    results = run_trials(one, list(range(count)), max_workers)
    summary = LemmaBatchSummary(arity=arity, eta=complex(eta), count=len(results))
    summary.branch_histogram = dict(Counter(branch for branch, _, _ in results))
    summary.max_residual = max((r for _, r, _ in results), default=0.0)
    summary.max_remark_residual = max((r for _, _, r in results), default=0.0)
    log.info(f"lemma {arity}: {summary.count} systems, violated={summary.violated}")
    return summary
