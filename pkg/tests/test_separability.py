"""Tests for separability.py -- bipartitions, rank-one detection, certificates."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cphase_witness.errors import ArgumentError, DomainError, NotSeparableError
from cphase_witness.gate import apply, make_gate
from cphase_witness.separability import (
    Bipartition,
    bipartitions,
    bipartitions_splitting,
    factorize,
    find_separation,
    is_everywhere_entangled,
    min_second_singular_value,
    rank_one_minors,
    rank_one_svd,
    reshape,
    schmidt_values,
    verify_certificate,
)
from cphase_witness.state import basis_state, make_state, plus_state, tensor

H = 1 / math.sqrt(2)


def ghz(n):
    vec = np.zeros(1 << n, dtype=complex)
    vec[0] = vec[-1] = H
    return make_state(range(1, n + 1), vec)


def random_state(carrier, seed):
    rng = np.random.default_rng(seed)
    dim = 1 << len(carrier)
    return make_state(carrier, rng.normal(size=dim) + 1j * rng.normal(size=dim), renormalize=True)


def split(a, b):
    return Bipartition(frozenset(a), frozenset(b))


class TestBipartitions:
    def test_count_for_n3(self):
        # 2^(n-1) - 1 unordered bipartitions
        assert len(bipartitions(3)) == 3
        assert len(bipartitions(4)) == 7

    def test_order(self):
        assert [str(p) for p in bipartitions(3)] == ["({1}|{2,3})", "({1,2}|{3})", "({1,3}|{2})"]

    def test_splitting_s(self):
        found = bipartitions_splitting({1, 2}, 3)
        assert [str(p) for p in found] == ["({1}|{2,3})", "({1,3}|{2})"]
        assert all(p.splits(frozenset({1, 2})) for p in found)

    def test_small_s_gives_nothing(self):
        assert bipartitions_splitting({1}, 3) == []
        assert bipartitions(1) == []

    def test_s_outside_range(self):
        with pytest.raises(DomainError):
            bipartitions_splitting({1, 5}, 3)


class TestRankOne:
    def test_product_detected_both_ways(self):
        m = reshape(plus_state([1, 2]), split({1}, {2}))
        assert rank_one_svd(m).is_rank_one
        assert rank_one_minors(m).is_rank_one

    def test_bell_rejected_both_ways(self):
        m = reshape(ghz(2), split({1}, {2}))
        svd = rank_one_svd(m)
        minors = rank_one_minors(m)
        assert not svd.is_rank_one and not minors.is_rank_one
        assert svd.sigma2 == pytest.approx(H)
        assert minors.max_minor == pytest.approx(0.5)

    def test_cz_plusplus_singular_values(self):
        psi = apply(make_gate([1, 2], math.pi), plus_state([1, 2]))
        verdict = rank_one_svd(reshape(psi, split({1}, {2})))
        assert verdict.singular_values == pytest.approx((H, H))

    @given(st.integers(0, 2**32 - 1), st.integers(min_value=2, max_value=4))
    @settings(max_examples=100)
    def test_svd_and_minors_agree(self, seed, n):
        psi = random_state(list(range(1, n + 1)), seed)
        for p in bipartitions(n):
            m = reshape(psi, p)
            assert rank_one_svd(m).is_rank_one == rank_one_minors(m).is_rank_one

    def test_reshape_rejects_bad_split(self):
        with pytest.raises(DomainError):
            reshape(plus_state([1, 2, 3]), split({1}, {2}))

    def test_reshape_orders_rows_by_a(self):
        # |0>_1 |1>_2 |0>_3 split ({2} | {1,3}) -> row 1, column 0
        m = reshape(basis_state([1, 2, 3], "010"), split({2}, {1, 3}))
        assert m.shape == (2, 4)
        assert m[1, 0] == 1


class TestFactorize:
    def test_reconstructs_exactly(self):
        a = random_state([1, 3], 1)
        b = random_state([2], 2)
        psi = tensor(a, b)
        fa, fb = factorize(psi, split({1, 3}, {2}))
        assert fa.carrier == (1, 3) and fb.carrier == (2,)
        assert np.allclose(tensor(fa, fb).amplitudes, psi.amplitudes, atol=1e-12)

    def test_factor_a_phase_convention(self):
        psi = tensor(make_state([1], [0, 1j]), make_state([2], [H, H]))
        fa, fb = factorize(psi, split({1}, {2}))
        assert fa.amplitudes[1] == pytest.approx(1.0)
        assert np.allclose(fb.amplitudes, [1j * H, 1j * H])

    def test_plus_zero_example(self):
        psi = tensor(plus_state([1]), basis_state([2], "0"))
        fa, fb = factorize(psi, split({1}, {2}))
        assert np.allclose(fa.amplitudes, [H, H])
        assert np.allclose(fb.amplitudes, [1, 0])

    def test_entangled_raises(self):
        with pytest.raises(NotSeparableError) as exc_info:
            factorize(ghz(2), split({1}, {2}))
        assert exc_info.value.singular_values[1] == pytest.approx(H)


class TestFindSeparation:
    def test_plusplus(self):
        cert = find_separation(plus_state([1, 2]), {1, 2})
        assert cert is not None
        assert str(cert.split) == "({1}|{2})"
        assert cert.residual < 1e-12
        assert verify_certificate(plus_state([1, 2]), {1, 2}, cert)

    def test_ghz_is_entangled(self):
        assert find_separation(ghz(3), {1, 2}) is None

    def test_skips_splits_not_meeting_s(self):
        # |+>_1 ⊗ Bell_{2,3}: separable only across ({1}|{2,3})
        psi = tensor(plus_state([1]), make_state([2, 3], [H, 0, 0, H]))
        assert find_separation(psi, {2, 3}) is None
        cert = find_separation(psi, {1, 2})
        assert str(cert.split) == "({1}|{2,3})"

    def test_small_s(self):
        with pytest.raises(ArgumentError, match=">= 2"):
            find_separation(plus_state([1, 2]), {1})

    def test_s_outside_carrier(self):
        with pytest.raises(DomainError):
            find_separation(plus_state([1, 2]), {1, 3})

    def test_verify_rejects_foreign_certificate(self):
        cert = find_separation(plus_state([1, 2]), {1, 2})
        assert not verify_certificate(basis_state([1, 2], "00"), {1, 2}, cert)

    def test_verify_rejects_split_missing_s(self):
        psi = plus_state([1, 2, 3])
        cert = find_separation(psi, {1, 2})
        assert str(cert.split) == "({1}|{2,3})"
        assert not verify_certificate(psi, {2, 3}, cert)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100)
    def test_products_always_certified(self, seed):
        psi = tensor(random_state([1, 2], seed), random_state([3], seed + 1))
        cert = find_separation(psi, {1, 2, 3})
        assert cert is not None
        assert verify_certificate(psi, {1, 2, 3}, cert)


class TestEntanglementMeasures:
    def test_min_sigma2(self):
        assert min_second_singular_value(ghz(3), {1, 2}) == pytest.approx(H)
        assert min_second_singular_value(plus_state([1, 2]), {1, 2}) == pytest.approx(0, abs=1e-12)
        assert min_second_singular_value(plus_state([1, 2]), {1}) == 0.0

    def test_everywhere_entangled(self):
        assert is_everywhere_entangled(ghz(3))
        assert not is_everywhere_entangled(plus_state([1, 2, 3]))
        assert not is_everywhere_entangled(plus_state([1]))

    def test_schmidt_values(self):
        values = schmidt_values(ghz(3), split({2}, {1, 3}))
        assert values == pytest.approx((H, H))
        assert schmidt_values(plus_state([1, 2]), split({1}, {2}))[1] == pytest.approx(0, abs=1e-12)


class TestDetectorAgreement:
    """SVD and 2x2-minor verdicts on matrices well away from the tolerance."""

    TOL = 1e-8

    @staticmethod
    def gaussian(rng, *shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    def shapes(self, rng):
        return int(rng.choice([2, 4, 8])), int(rng.choice([2, 4, 8]))

    def test_constructed_rank_one(self):
        rng = np.random.default_rng(404)
        for _ in range(1000):
            rows, cols = self.shapes(rng)
            m = np.outer(self.gaussian(rng, rows), self.gaussian(rng, cols))
            m /= np.linalg.norm(m)
            svd = rank_one_svd(m, self.TOL)
            assert svd.sigma2 <= self.TOL / 10
            assert svd.is_rank_one
            assert rank_one_minors(m, self.TOL).is_rank_one

    def test_generic_matrices(self):
        rng = np.random.default_rng(405)
        for _ in range(1000):
            rows, cols = self.shapes(rng)
            m = self.gaussian(rng, rows, cols)
            m /= np.linalg.norm(m)
            svd = rank_one_svd(m, self.TOL)
            assert svd.sigma2 >= 10 * self.TOL
            assert not svd.is_rank_one
            assert not rank_one_minors(m, self.TOL).is_rank_one


class TestSeparationInvariants:
    @given(
        seed=st.integers(0, 2**32 - 1),
        n=st.integers(min_value=2, max_value=4),
        alpha=st.floats(min_value=0, max_value=2 * math.pi),
        product=st.booleans(),
    )
    @settings(max_examples=200)
    def test_global_phase_does_not_change_the_verdict(self, seed, n, alpha, product):
        carrier = list(range(1, n + 1))
        if product:
            psi = tensor(random_state([1], seed), random_state(carrier[1:], seed + 1))
        else:
            psi = random_state(carrier, seed)
        phased = make_state(carrier, np.exp(1j * alpha) * psi.amplitudes)
        plain = find_separation(psi, carrier)
        rotated = find_separation(phased, carrier)
        assert (plain is None) == (rotated is None)
        if plain is not None:
            assert rotated.split == plain.split
            assert verify_certificate(phased, carrier, rotated)

    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(min_value=2, max_value=5))
    @settings(max_examples=100)
    def test_certificate_carries_over_to_smaller_target_sets(self, seed, n):
        rng = np.random.default_rng(seed)
        carrier = list(range(1, n + 1))
        size = int(rng.integers(1, n))
        side_a = sorted(int(q) for q in rng.choice(carrier, size=size, replace=False))
        side_b = [q for q in carrier if q not in side_a]
        psi = tensor(random_state(side_a, seed), random_state(side_b, seed + 1))
        cert = find_separation(psi, carrier)
        assert cert is not None
        for k in range(2, n + 1):
            for smaller in itertools.combinations(carrier, k):
                if cert.split.splits(frozenset(smaller)):
                    assert verify_certificate(psi, smaller, cert)
                    assert find_separation(psi, smaller) is not None
