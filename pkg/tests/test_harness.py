"""Tests for harness.py -- seeded families and fuzz drivers."""

import cmath
import math
from unittest.mock import patch

import numpy as np
import pytest
from pydantic import ValidationError

from cphase_witness.errors import ArgumentError, DegenerateFamilyError, DomainError
from cphase_witness.gate import apply, make_gate
from cphase_witness.harness import (
    FuzzConfig,
    StateFamily,
    complex_gaussian,
    fuzz_trichotomy,
    generate,
    lemma_batch,
    philox,
    plan_trial,
    run_trial,
    trial_seed,
)
from cphase_witness.models import FamilyKind
from cphase_witness.separability import Bipartition, find_separation
from cphase_witness.state import distance


class TestSeeds:
    def test_trial_seed_is_stable(self):
        assert trial_seed(7, 3) == trial_seed(7, 3)
        assert trial_seed(7, 3) != trial_seed(7, 4)
        assert trial_seed(7, 3) != trial_seed(8, 3)

    def test_complex_gaussian_moments(self):
        z = complex_gaussian(philox(1), 200_000)
        assert abs(z.mean()) < 0.01
        assert np.mean(np.abs(z) ** 2) == pytest.approx(2.0, rel=0.02)


class TestGenerate:
    def test_plus_all(self):
        psi = generate(StateFamily(FamilyKind.PLUS_ALL), 2)
        assert np.allclose(psi.amplitudes, 0.5)

    def test_basis(self):
        psi = generate(StateFamily(FamilyKind.BASIS, bits="11"), 2)
        assert psi.amplitudes[3] == 1

    def test_basis_defaults_to_zeros(self):
        assert generate(StateFamily(FamilyKind.BASIS), 3).amplitudes[0] == 1

    def test_same_seed_same_state(self):
        family = StateFamily(FamilyKind.HAAR, seed=42)
        assert np.array_equal(generate(family, 3).amplitudes, generate(family, 3).amplitudes)

    def test_different_seed_different_state(self):
        one = generate(StateFamily(FamilyKind.HAAR, seed=1), 3)
        two = generate(StateFamily(FamilyKind.HAAR, seed=2), 3)
        assert not np.allclose(one.amplitudes, two.amplitudes)

    @pytest.mark.parametrize("seed", range(10))
    def test_forced_fixed_point(self, seed):
        family = StateFamily(FamilyKind.FORCED_FIXED_POINT, seed=seed, targets=frozenset({1, 2}))
        psi = generate(family, 3)
        assert psi.amplitudes[0b110] == 0 and psi.amplitudes[0b111] == 0
        assert psi.norm == pytest.approx(1.0)

    def test_forced_reduce(self):
        family = StateFamily(FamilyKind.FORCED_REDUCE, seed=3, targets=frozenset({1, 3}), witness=3)
        psi = generate(family, 3)
        assert all(psi.amplitudes[i] == 0 for i in (0b000, 0b010, 0b100, 0b110))

    def test_forced_reduce_witness_outside_s(self):
        family = StateFamily(FamilyKind.FORCED_REDUCE, seed=3, targets=frozenset({1, 2}), witness=3)
        with pytest.raises(DomainError, match="witness"):
            generate(family, 3)

    def test_product_is_separable_across_split(self):
        split = Bipartition(frozenset({1, 3}), frozenset({2}))
        psi = generate(StateFamily(FamilyKind.PRODUCT, seed=9, split=split), 3)
        cert = find_separation(psi, {2, 3})
        assert cert is not None

    def test_product_bad_split(self):
        split = Bipartition(frozenset({1}), frozenset({2}))
        with pytest.raises(DomainError):
            generate(StateFamily(FamilyKind.PRODUCT, seed=9, split=split), 3)

    def test_forced_on_empty_s(self):
        family = StateFamily(FamilyKind.FORCED_FIXED_POINT, seed=0, targets=frozenset())
        with pytest.raises(DegenerateFamilyError):
            generate(family, 2)

    def test_n_out_of_range(self):
        with pytest.raises(ArgumentError):
            generate(StateFamily(FamilyKind.HAAR), 0)

    def test_boundary_band_exhausts_resamples(self):
        # a normalized qubit always has an amplitude >= 1/sqrt(2), inside [0.05, 5]
        family = StateFamily(FamilyKind.HAAR, seed=0)
        with pytest.raises(DegenerateFamilyError, match="tolerance band"):
            generate(family, 1, tau_zero=0.5)

    def test_describe(self):
        family = StateFamily(FamilyKind.FORCED_REDUCE, seed=5, targets=frozenset({2, 1}), witness=2)
        assert family.describe() == {"kind": "forced_reduce", "seed": 5, "S": [1, 2], "i": 2}


class TestFuzzConfig:
    def test_defaults(self):
        config = FuzzConfig()
        assert config.n_values == [2, 3, 4]
        assert config.seed == 7
        assert set(config.families) == set(FamilyKind)

    def test_rejects_small_n(self):
        with pytest.raises(ValidationError):
            FuzzConfig(n_values=[1, 2])

    def test_rejects_empty_lists(self):
        with pytest.raises(ValidationError):
            FuzzConfig(thetas=[])
        with pytest.raises(ValidationError):
            FuzzConfig(families=[])

    def test_rejects_small_s(self):
        with pytest.raises(ValidationError):
            FuzzConfig(min_s_size=1)

    def test_frozen(self):
        with pytest.raises(ValidationError):
            FuzzConfig().trials = 5

    def test_no_n_admits_s(self):
        config = FuzzConfig(n_values=[2], min_s_size=3, trials=1)
        with pytest.raises(ArgumentError):
            plan_trial(config, 0)


class TestFuzzTrichotomy:
    def test_zero_trials(self):
        summary = fuzz_trichotomy(FuzzConfig(trials=0))
        assert summary.trials == 0
        assert summary.ok
        assert summary.branch_histogram == {}

    def test_small_sweep_has_no_failures(self):
        summary = fuzz_trichotomy(FuzzConfig(trials=200, seed=7, max_workers=1))
        assert summary.trials == 200
        assert summary.ok, summary.failures
        assert sum(summary.branch_histogram.values()) == 200
        assert sum(summary.family_counts.values()) == 200

    def test_cz_plus_families(self):
        config = FuzzConfig(
            n_values=[2], thetas=[math.pi], trials=150,
            families=[FamilyKind.HAAR, FamilyKind.PRODUCT, FamilyKind.PLUS_ALL],
        )
        assert fuzz_trichotomy(config).ok

    def test_deterministic_across_worker_counts(self):
        serial = fuzz_trichotomy(FuzzConfig(trials=60, seed=11, max_workers=1))
        threaded = fuzz_trichotomy(FuzzConfig(trials=60, seed=11, max_workers=4))
        assert [r.as_dict() for r in serial.records] == [r.as_dict() for r in threaded.records]

    def test_full_support_products_are_sharp(self):
        summary = fuzz_trichotomy(FuzzConfig(trials=80, seed=3, product_full_support=True))
        assert summary.ok
        assert summary.sharp_trials > 0
        assert summary.sharp_hits == summary.sharp_trials

    def test_plus_all_fires_output_branch(self):
        config = FuzzConfig(n_values=[2], thetas=[math.pi], families=[FamilyKind.PLUS_ALL], trials=1)
        record = run_trial(config, 0)
        assert record.branches == (2,)
        assert record.histogram_key == "2"
        assert record.full_support

    def test_summary_dict_keys(self):
        summary = fuzz_trichotomy(FuzzConfig(trials=5))
        assert set(summary.as_dict()) == {
            "trials", "branch_histogram", "family_counts", "failures",
            "sharp_trials", "sharp_hits", "wall_time",
        }

    def test_peak_rss_is_sampled_per_trial(self):
        config = FuzzConfig(n_values=[2], families=[FamilyKind.PLUS_ALL], trials=2, max_workers=1)
        with patch("cphase_witness.harness.current_rss_mb", side_effect=[10.0, 50.0, 20.0]) as rss:
            summary = fuzz_trichotomy(config)
        assert rss.call_count == 3
        assert summary.peak_rss_mb == 50.0
        assert "peak_rss_mb" not in summary.as_dict()


class TestAcceptanceScale:
    def test_ten_thousand_trials_all_hold(self):
        summary = fuzz_trichotomy(FuzzConfig(n_values=[2, 3, 4], trials=10_000, seed=7))
        assert summary.trials == 10_000
        assert summary.ok, summary.failures[:3]
        assert set(summary.family_counts) == {k.value for k in FamilyKind}
        assert summary.sharp_hits == summary.sharp_trials

    @staticmethod
    def forced_draws(kind, count=1000, seed=31):
        for index in range(count):
            rng = philox(trial_seed(seed, index))
            n = int(rng.integers(2, 5))
            size = int(rng.integers(2, n + 1))
            targets = frozenset(int(q) for q in rng.choice(np.arange(1, n + 1), size=size, replace=False))
            witness = min(targets) if kind == FamilyKind.FORCED_REDUCE else None
            theta = (math.pi, math.pi / 2, 1.0)[int(rng.integers(3))]
            family = StateFamily(kind=kind, seed=trial_seed(seed, index), targets=targets, witness=witness)
            yield generate(family, n), targets, witness, theta

    def test_forced_fixed_point_states_are_fixed(self):
        for psi, targets, _, theta in self.forced_draws(FamilyKind.FORCED_FIXED_POINT):
            assert distance(apply(make_gate(targets, theta), psi), psi) <= 1e-10

    def test_forced_reduce_states_see_the_smaller_gate(self):
        for psi, targets, witness, theta in self.forced_draws(FamilyKind.FORCED_REDUCE):
            full = apply(make_gate(targets, theta), psi)
            smaller = apply(make_gate(targets - {witness}, theta), psi)
            assert distance(full, smaller) <= 1e-10

    @pytest.mark.parametrize("arity", ["4sets", "3sets", "2sets"])
    @pytest.mark.parametrize("eta", [-1, 1j, cmath.exp(1j * math.pi / 7)])
    def test_lemma_suite(self, arity, eta):
        summary = lemma_batch(arity, eta, count=1000, seed=5)
        assert summary.count == 1000
        assert summary.violated == 0
        assert summary.max_residual <= 1e-12
        assert summary.max_remark_residual <= 1e-9
        assert set(summary.branch_histogram) <= {"c_branch_zero", "d_branch_zero"}


class TestLemmaBatch:
    @pytest.mark.parametrize("arity", ["4sets", "3sets", "2sets"])
    def test_no_violations(self, arity):
        summary = lemma_batch(arity, 1j, count=200, seed=1)
        assert summary.count == 200
        assert summary.violated == 0
        assert summary.max_residual < 1e-12
        assert set(summary.branch_histogram) <= {"c_branch_zero", "d_branch_zero"}

    def test_deterministic(self):
        one = lemma_batch("4sets", -1, count=50, seed=9).as_dict()
        two = lemma_batch("4sets", -1, count=50, seed=9, max_workers=3).as_dict()
        assert one == two

    def test_empty_batch(self):
        summary = lemma_batch("2sets", -1, count=0, seed=0)
        assert summary.count == 0
        assert summary.as_dict()["violated"] == 0
