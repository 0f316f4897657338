"""Squeezed-state amplitudes, variance, optimization, and the overlap sum."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasevar.errors import PrecisionError
from phasevar.schemes import CANONICAL, HETERODYNE, MARK_II
from phasevar.squeezed import (
    SqueezedPoint,
    amplitudes,
    appendix_sum_check,
    optimize_squeezed,
    params_from_n0,
    squeezed_variance,
    _n0_floor,
    _spec_minimum_cutoff,
)


def coherent_oracle(alpha: float, n: int) -> float:
    """Closed-form coherent amplitude e^{-a^2/2} a^n / sqrt(n!)."""
    return math.exp(-0.5 * alpha**2) * alpha**n / math.sqrt(math.factorial(n))


class TestAmplitudes:
    def test_coherent_limit(self):
        b = amplitudes(1.0, 0.0)
        assert b[0] == pytest.approx(math.exp(-0.5), rel=1e-12)
        assert b[1] == pytest.approx(b[0], rel=1e-12)
        for n in range(15):
            assert b[n] == pytest.approx(coherent_oracle(1.0, n), rel=1e-10)

    def test_squeezed_vacuum_parity(self):
        b = amplitudes(0.0, -0.5)
        assert np.all(b[1::2] == 0.0)
        assert b[0] > 0.0

    def test_mean_photon_number_moment(self):
        b = amplitudes(2.0, -0.5)
        n = np.arange(b.size)
        nbar = float(b @ (n * b))
        assert nbar == pytest.approx(4.0 + math.sinh(0.5) ** 2, rel=1e-10)

    @given(
        alpha=st.floats(min_value=1.0, max_value=100.0),
        r=st.floats(min_value=0.0, max_value=5.0),
    )
    @settings(max_examples=12, deadline=None)
    def test_moment_identities(self, alpha, r):
        b = amplitudes(alpha, -r)
        n = np.arange(b.size)
        nbar = float(b @ (n * b))
        var = float(b @ ((n - nbar) ** 2 * b))
        nbar_ref = alpha**2 + math.sinh(r) ** 2
        var_ref = alpha**2 * math.exp(2 * r) + 0.5 * math.sinh(2 * r) ** 2
        assert abs(nbar - nbar_ref) / nbar_ref <= 1e-6
        assert abs(var - var_ref) / var_ref <= 1e-6

    def test_normalization(self):
        for alpha, zeta in ((1.0, 0.0), (10.0, -1.0), (50.0, -3.0)):
            b = amplitudes(alpha, zeta)
            assert abs(float(b @ b) - 1.0) <= 1e-12

    def test_determinism(self):
        a = amplitudes(3.0, -1.0)
        b = amplitudes(3.0, -1.0)
        assert np.array_equal(a, b)

    def test_undersized_cutoff_rejected(self):
        with pytest.raises(ValueError, match="12-sigma"):
            amplitudes(10.0, -1.0, n_cut=50)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            amplitudes(-1.0, 0.0)
        with pytest.raises(ValueError):
            amplitudes(1.0, 0.3)

    def test_precision_gate_fires_on_bare_minimum_cutoff(self):
        # the 12-sigma floor strands the slow geometric tail of heavy
        # squeezing; the defect gate must catch that honestly
        alpha, zeta = 1.0, -5.0
        with pytest.raises(PrecisionError, match="defect"):
            amplitudes(alpha, zeta, n_cut=_spec_minimum_cutoff(alpha, zeta) + 1)


class TestSqueezedVariance:
    def test_odd_parity_kills_coherence(self):
        assert squeezed_variance(0.0, -1.0, CANONICAL) == pytest.approx(2.0, abs=1e-12)

    def test_coherent_heterodyne(self):
        alpha = 30.0
        v = squeezed_variance(alpha, 0.0, HETERODYNE)
        assert v == pytest.approx(1.0 / (2.0 * alpha**2), rel=5e-3)

    def test_coherent_adaptive(self):
        alpha = 30.0
        v = squeezed_variance(alpha, 0.0, MARK_II)
        two_term = 1.0 / (4.0 * alpha**2) + 1.0 / (8.0 * alpha**3)
        one_term = 1.0 / (4.0 * alpha**2)
        assert v == pytest.approx(two_term, rel=5e-3)
        assert abs(v - two_term) < abs(v - one_term)


class TestParamsFromN0:
    def test_round_trip(self):
        alpha, zeta = params_from_n0(100.0, 25.0)
        assert alpha**2 + math.sinh(-zeta) ** 2 == pytest.approx(100.0, rel=1e-12)
        assert 100.0 * math.exp(2 * zeta) == pytest.approx(25.0, rel=1e-12)

    def test_floor_is_sharp(self):
        nbar = 100.0
        floor = _n0_floor(nbar)
        alpha, _ = params_from_n0(nbar, floor * 1.0001)
        assert alpha >= 0.0
        with pytest.raises(ValueError):
            params_from_n0(nbar, floor * 0.9)

    def test_bounds(self):
        with pytest.raises(ValueError):
            params_from_n0(100.0, 0.0)
        with pytest.raises(ValueError):
            params_from_n0(100.0, 101.0)


class TestOptimizeSqueezed:
    def test_heterodyne_n0_near_sqrt_nbar(self):
        point = optimize_squeezed(HETERODYNE, 1e4)
        assert point.n0 == pytest.approx(100.0, rel=0.2)

    def test_point_invariants(self):
        point = optimize_squeezed(HETERODYNE, 1e3)
        assert point.nbar == pytest.approx(
            point.alpha**2 + math.sinh(point.r) ** 2, abs=1e-10
        )
        assert 0.0 < point.n0 <= point.nbar
        b = amplitudes(point.alpha, point.zeta)
        n = np.arange(b.size)
        var_amp = float(b @ ((n - point.nbar) ** 2 * b))
        assert var_amp == pytest.approx(point.photon_number_variance(), rel=1e-8)

    def test_restricted_family_bound(self):
        from phasevar.number_opt import optimize_at_nbar

        point = optimize_squeezed(MARK_II, 1e3)
        general = optimize_at_nbar(MARK_II, 1e3, rel_tol=1e-7)
        assert point.variance >= general.variance - 1e-5 * general.variance

    def test_unimodal_on_bracket(self):
        # coarse scan: exactly one interior local minimum
        nbar = 300.0
        xs = np.linspace(
            math.log(_n0_floor(nbar) * 1.001), math.log(nbar), 40
        )
        values = []
        for x in xs:
            try:
                alpha, zeta = params_from_n0(nbar, math.exp(x))
                values.append(squeezed_variance(alpha, zeta, HETERODYNE))
            except ValueError:
                values.append(math.inf)
        interior_minima = sum(
            1
            for i in range(1, len(values) - 1)
            if values[i] < values[i - 1] and values[i] < values[i + 1]
        )
        assert interior_minima == 1

    def test_determinism(self):
        assert optimize_squeezed(HETERODYNE, 500.0) == optimize_squeezed(
            HETERODYNE, 500.0
        )

    def test_rejects_small_nbar(self):
        with pytest.raises(ValueError):
            optimize_squeezed(HETERODYNE, 0.5)


class TestAppendixSumCheck:
    def test_reference_point(self):
        alpha, zeta = params_from_n0(1e4, 100.0)
        numeric, analytic = appendix_sum_check(alpha, zeta, 1.0)
        assert abs(numeric - analytic) / analytic < 0.01

    def test_improves_with_nbar(self):
        a4, z4 = params_from_n0(1e4, 100.0)
        n4, an4 = appendix_sum_check(a4, z4, 1.0)
        a6, z6 = params_from_n0(1e6, 1000.0)
        n6, an6 = appendix_sum_check(a6, z6, 1.0)
        assert abs(n6 - an6) / an6 < abs(n4 - an4) / an4

    def test_coherent_case(self):
        numeric, analytic = appendix_sum_check(10.0, 0.0, 1.0)
        assert abs(numeric - analytic) / analytic < 0.01

    def test_validation(self):
        with pytest.raises(ValueError):
            appendix_sum_check(10.0, 0.0, -1.0)


class TestSqueezedPoint:
    def test_from_alpha_zeta(self):
        point = SqueezedPoint.from_alpha_zeta(3.0, -0.7, 0.01)
        assert point.r == 0.7
        assert point.mu_s == pytest.approx(math.cosh(0.7))
        assert point.nu_s == pytest.approx(-math.sinh(0.7))
        assert point.beta == pytest.approx(3.0 * math.exp(-0.7), rel=1e-12)
        assert point.n0 == pytest.approx(point.nbar * math.exp(-1.4), rel=1e-12)
