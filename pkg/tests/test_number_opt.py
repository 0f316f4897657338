"""Tridiagonal ground solver and the fixed-mean optimizer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasevar.errors import ResourceLimitError
from phasevar.number_opt import (
    StateVector,
    build_tridiagonal,
    ground_pair,
    initial_cutoff,
    optimize_at_mu,
    optimize_at_nbar,
    optimize_truncated,
    variance_of_state,
)
from phasevar.schemes import CANONICAL, HETERODYNE, MARK_I, MARK_II

SQRT_PI_OVER_2 = math.sqrt(math.pi) / 2.0  # 1 - h_het(0)


def dense_ground(diag, offdiag):
    """Oracle: full-spectrum dense solve."""
    matrix = np.diag(diag) + np.diag(offdiag, 1) + np.diag(offdiag, -1)
    w, v = np.linalg.eigh(matrix)
    vec = v[:, 0]
    if vec.sum() < 0:
        vec = -vec
    return w[0], vec


class TestBuildTridiagonal:
    def test_canonical_two_level(self):
        diag, off = build_tridiagonal(CANONICAL, 0.0, 1)
        assert np.allclose(diag, [2.0, 2.0])
        assert np.allclose(off, [-1.0])

    def test_heterodyne_coupling(self):
        _, off = build_tridiagonal(HETERODYNE, 0.0, 1)
        assert off[0] == pytest.approx(-SQRT_PI_OVER_2, rel=1e-14)

    def test_multiplier_on_diagonal(self):
        diag, _ = build_tridiagonal(CANONICAL, 1.0, 2)
        assert np.allclose(diag, [2.0, 3.0, 4.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            build_tridiagonal(CANONICAL, -0.1, 4)
        with pytest.raises(ValueError):
            build_tridiagonal(CANONICAL, 0.0, 0)


class TestGroundPair:
    def test_two_level_canonical(self):
        value, vec = ground_pair([2.0, 2.0], [-1.0])
        assert value == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(vec, [1 / math.sqrt(2)] * 2, atol=1e-10)

    def test_two_level_heterodyne(self):
        value, _ = ground_pair([2.0, 2.0], [-SQRT_PI_OVER_2])
        assert value == pytest.approx(2.0 - SQRT_PI_OVER_2, rel=1e-13)

    def test_diagonal_matrix(self):
        value, vec = ground_pair([3.0, 1.0, 2.0], [0.0, 0.0])
        assert value == pytest.approx(1.0, abs=1e-13)
        assert np.allclose(np.abs(vec), [0.0, 1.0, 0.0], atol=1e-10)

    def test_single_entry(self):
        value, vec = ground_pair([5.0], [])
        assert value == 5.0
        assert vec.tolist() == [1.0]

    def test_dense_oracle_seeded(self):
        rng = np.random.default_rng(314159)
        for _ in range(40):
            dim = int(rng.integers(2, 51))
            diag = rng.normal(size=dim) * 3.0
            off = rng.normal(size=dim - 1)
            value, vec = ground_pair(diag, off)
            ref_value, ref_vec = dense_ground(diag, off)
            assert abs(value - ref_value) <= 1e-10
            assert abs(abs(vec @ ref_vec) - 1.0) <= 1e-8

    @given(dim=st.integers(min_value=2, max_value=24), seed=st.integers(0, 2**31))
    @settings(max_examples=40, deadline=None)
    def test_dense_oracle_property(self, dim, seed):
        rng = np.random.default_rng(seed)
        diag = rng.normal(size=dim)
        off = rng.normal(size=dim - 1)
        value, _ = ground_pair(diag, off)
        ref_value, _ = dense_ground(diag, off)
        assert abs(value - ref_value) <= 1e-10

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            ground_pair([1.0, 2.0], [0.5, 0.5])


class TestOptimizeAtMu:
    def test_large_mu_two_level_regime(self):
        res = optimize_at_mu(CANONICAL, 2.0)
        b = res.state.amplitudes
        assert res.nbar < 1.0
        assert b[0] ** 2 + b[1] ** 2 > 0.98
        assert res.variance >= 1.0 - 1e-9

    def test_variance_identity(self):
        res = optimize_at_mu(HETERODYNE, 1e-4)
        direct = variance_of_state(res.state, HETERODYNE)
        assert abs(direct - res.variance) <= 1e-10

    def test_nbar_matches_first_order_shift(self):
        # at mu = 2cp x0^-(p+1) with x0 = 1e4 the mean sits near
        # x0 + (p+2)/(4 sqrt(cp(p+1))) x0^(p/2)
        res = optimize_at_mu(HETERODYNE, 2.5e-9)
        predicted = 1e4 + 3.0 / (4.0 * math.sqrt(0.25)) * 100.0
        assert res.nbar == pytest.approx(predicted, abs=1.0)

    def test_state_invariants(self):
        res = optimize_at_mu(MARK_II, 1e-4)
        b = res.state.amplitudes
        assert abs(float(b @ b) - 1.0) <= 1e-12
        assert np.all(b >= -1e-12)
        assert res.state.tail_mass <= 1e-12
        assert 0.0 < res.variance <= 2.0

    def test_determinism(self):
        a = optimize_at_mu(HETERODYNE, 3e-6)
        b = optimize_at_mu(HETERODYNE, 3e-6)
        assert a.nu == b.nu and a.nbar == b.nbar

    def test_resource_limit(self):
        with pytest.raises(ResourceLimitError, match="continuum"):
            optimize_at_mu(HETERODYNE, 1e-7, max_cutoff=512)

    def test_validation(self):
        with pytest.raises(ValueError):
            optimize_at_mu(HETERODYNE, 0.0)


class TestOptimizeAtNbar:
    def test_heterodyne_small_target(self):
        res = optimize_at_nbar(HETERODYNE, 1e3)
        law = 0.25 / 1e3 + 0.5 * 1e3**-1.5
        assert abs(res.nbar - 1e3) <= 1e-6 * 1e3
        assert res.variance == pytest.approx(law, rel=0.01)

    def test_determinism(self):
        a = optimize_at_nbar(HETERODYNE, 123.0)
        b = optimize_at_nbar(HETERODYNE, 123.0)
        assert a.mu == b.mu

    def test_rejects_small_target(self):
        with pytest.raises(ValueError):
            optimize_at_nbar(HETERODYNE, 0.4)

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            optimize_at_nbar(HETERODYNE, 100.0, rel_tol=0.5)

    @pytest.mark.parametrize("scheme", [CANONICAL, HETERODYNE, MARK_I, MARK_II])
    def test_monotone_sweep(self, scheme):
        targets = [3.0, 10.0, 30.0, 100.0]
        results = [optimize_at_nbar(scheme, t) for t in targets]
        mus = [r.mu for r in results]
        variances = [r.variance for r in results]
        assert all(a > b for a, b in zip(mus, mus[1:]))  # nbar up, mu down
        assert all(a > b for a, b in zip(variances, variances[1:]))


class TestOptimizeTruncated:
    def test_canonical_two_level(self):
        value, _ = optimize_truncated(CANONICAL, 1)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_canonical_closed_form(self):
        # pure discrete Laplacian: V(N) = 2 - 2 cos(pi/(N+2))
        for n_max in (2, 5, 20):
            value, _ = optimize_truncated(CANONICAL, n_max)
            assert value == pytest.approx(
                2.0 - 2.0 * math.cos(math.pi / (n_max + 2)), rel=1e-12
            )

    def test_heterodyne_two_level(self):
        value, _ = optimize_truncated(HETERODYNE, 1)
        assert value == pytest.approx(2.0 - SQRT_PI_OVER_2, rel=1e-13)
        assert value == pytest.approx(1.1137730745472421, abs=1e-13)

    def test_decreasing_in_cap(self):
        values = [optimize_truncated(HETERODYNE, n)[0] for n in (10, 100, 1000)]
        assert values[0] > values[1] > values[2]


class TestVarianceOfState:
    def test_vacuum(self):
        state = StateVector(np.array([1.0, 0.0]), 1, 0.0)
        assert variance_of_state(state, CANONICAL) == 2.0
        assert variance_of_state(state, MARK_II) == 2.0

    def test_equal_superposition(self):
        state = StateVector(np.array([1.0, 1.0]) / math.sqrt(2), 1, 0.0)
        assert variance_of_state(state, CANONICAL) == pytest.approx(1.0, abs=1e-14)
        assert variance_of_state(state, HETERODYNE) == pytest.approx(
            2.0 - SQRT_PI_OVER_2, rel=1e-14
        )

    def test_unnormalized_rejected(self):
        state = StateVector(np.array([1.0, 0.5]), 1, 0.0)
        with pytest.raises(ValueError, match="normalized"):
            variance_of_state(state, CANONICAL)

    @given(seed=st.integers(0, 2**31), size=st.integers(2, 40))
    @settings(max_examples=40, deadline=None)
    def test_canonical_is_lower_bound(self, seed, size):
        # holds on nonnegative-amplitude states, where every neighbour
        # overlap is nonnegative and the noise term can only add
        rng = np.random.default_rng(seed)
        amps = np.abs(rng.normal(size=size))
        amps /= np.linalg.norm(amps)
        state = StateVector(amps, size - 1, 0.0)
        v0 = variance_of_state(state, CANONICAL)
        for scheme in (HETERODYNE, MARK_I, MARK_II):
            assert v0 <= variance_of_state(state, scheme) + 1e-12


class TestLocalOptimality:
    def test_mixing_never_improves(self):
        mu = 1e-3
        res = optimize_at_mu(HETERODYNE, mu)
        diag, off = build_tridiagonal(HETERODYNE, mu, res.state.n_cut)
        b = res.state.amplitudes
        rng = np.random.default_rng(2)
        for _ in range(20):
            k = int(rng.integers(0, b.size))
            trial = b.copy()
            trial[k] += 0.02
            trial /= np.linalg.norm(trial)
            quad = float(trial @ (diag * trial)) + 2.0 * float(
                off @ (trial[:-1] * trial[1:])
            )
            assert quad >= res.nu - 1e-12


class TestInitialCutoff:
    def test_grows_as_mu_shrinks(self):
        assert initial_cutoff(HETERODYNE, 1e-8) > initial_cutoff(HETERODYNE, 1e-4)

    def test_canonical_airy_scale(self):
        # width ~ mu^(-1/3)
        ratio = initial_cutoff(CANONICAL, 1e-6) / initial_cutoff(CANONICAL, 1e-3)
        assert ratio == pytest.approx(10.0, rel=0.2)
