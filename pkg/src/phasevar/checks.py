"""Built-in verification suite behind `phasevar check`.

Each check is independent and cheap enough for interactive use; together
they cover the invariants the library's results rest on: noise functions
stay in [0, 1], the tridiagonal ground solver matches a dense reference,
step-size extrapolation is internally consistent, squeezed-state moments
match their closed forms, and the weighted-overlap asymptote holds.
"""

from __future__ import annotations

import math

import numpy as np

from . import asymptotics, number_opt, squeezed
from .continuum import discretize, solve_continuum
from .number_opt import build_tridiagonal, ground_pair, optimize_at_mu, variance_of_state
from .schemes import CANONICAL, HETERODYNE, MARK_I, MARK_II, h, h_het_exact, h_het_series

Check = tuple[str, bool, str]


def _check_h_range() -> Check:
    grid = np.unique(np.logspace(0, 6, 40).astype(int))
    grid = np.concatenate(([0, 1, 2, 3], grid))
    worst_lo, worst_hi = 0.0, 1.0
    for scheme in (CANONICAL, HETERODYNE, MARK_I, MARK_II):
        values = h(scheme, grid)
        worst_lo = min(worst_lo, float(np.min(values)))
        worst_hi = max(worst_hi, float(np.max(values)))
    ok = worst_lo >= 0.0 and worst_hi <= 1.0
    return "h-range", ok, f"h in [{worst_lo:g}, {worst_hi:g}] over all schemes"


def _check_h_het_monotone() -> Check:
    m = np.arange(0, 10_001)
    values = np.where(m < 12, h_het_exact(m), h_het_series(m))
    ok = bool(np.all(np.diff(values) < 0))
    return "heterodyne-monotone", ok, "h(m) strictly decreasing on [0, 1e4]"


def _check_h_het_series_vs_exact() -> Check:
    # the closed form is still good to ~1e-14 absolute in this band
    m = np.arange(12, 61)
    diff = np.max(np.abs(h_het_series(m) - h_het_exact(m)))
    ok = diff <= 1e-12
    return "heterodyne-series", ok, f"series vs closed form: {diff:.2e} <= 1e-12"


def _check_ground_vs_dense() -> Check:
    rng = np.random.default_rng(20240817)
    worst_val, worst_vec = 0.0, 0.0
    for _ in range(20):
        dim = int(rng.integers(2, 51))
        d = rng.normal(size=dim) * 2.0
        e = rng.normal(size=dim - 1)
        value, vec = ground_pair(d, e)
        dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        w, v = np.linalg.eigh(dense)
        ref = v[:, 0] * (1.0 if v[:, 0].sum() >= 0 else -1.0)
        worst_val = max(worst_val, abs(value - w[0]))
        worst_vec = max(worst_vec, float(np.abs(np.abs(vec @ ref) - 1.0)))
    ok = worst_val <= 1e-10 and worst_vec <= 1e-8
    return (
        "ground-pair-oracle", ok,
        f"eigenvalue {worst_val:.2e} <= 1e-10, overlap defect {worst_vec:.2e} <= 1e-8",
    )


def _check_variance_identity() -> Check:
    res = optimize_at_mu(HETERODYNE, 1e-4)
    direct = variance_of_state(res.state, HETERODYNE)
    diff = abs(direct - res.variance)
    return "variance-identity", diff <= 1e-10, f"|direct - (nu - mu nbar)| = {diff:.2e}"


def _check_airy() -> Check:
    raws = []
    for factor in (1, 2, 4):
        intervals = 4096 * factor
        diag, off = discretize(CANONICAL, 1.0, 0.0, 60.0, intervals)
        value, _ = ground_pair(diag, off)
        raws.append(value)
    first = (4 * raws[1] - raws[0]) / 3
    second = (4 * raws[2] - raws[1]) / 3
    extrap = (16 * second - first) / 15
    rel = abs(extrap - number_opt.AIRY_FIRST_ZERO_MAG) / number_opt.AIRY_FIRST_ZERO_MAG
    return "airy-extrapolation", rel < 1e-6, f"linear-potential level rel err {rel:.2e}"


def _check_richardson_consistency() -> Check:
    mu = 2.5e-9  # heterodyne multiplier near nbar ~ 1e4
    res = solve_continuum(HETERODYNE, mu)
    nus = [triple[0] for triple in res.raw]
    pair_a = (4 * nus[1] - nus[0]) / 3
    pair_b = (4 * nus[2] - nus[1]) / 3
    budget = 10 * abs(nus[2] - nus[1]) / 3
    ok = abs(pair_a - pair_b) <= budget
    return (
        "richardson-consistency", ok,
        f"|pairwise extrapolations differ by| {abs(pair_a - pair_b):.2e} <= {budget:.2e}",
    )


def _check_moments() -> Check:
    worst = 0.0
    for alpha, r in ((1.0, 0.0), (5.0, 1.0), (40.0, 2.5), (100.0, 5.0)):
        b = squeezed.amplitudes(alpha, -r)
        n = np.arange(b.size)
        nbar = float(b @ (n * b))
        var = float(b @ ((n - nbar) ** 2 * b))
        nbar_ref = alpha**2 + math.sinh(r) ** 2
        var_ref = alpha**2 * math.exp(2 * r) + 0.5 * math.sinh(2 * r) ** 2
        worst = max(
            worst,
            abs(nbar - nbar_ref) / nbar_ref,
            abs(var - var_ref) / var_ref,
        )
    return "squeezed-moments", worst <= 1e-6, f"worst moment rel err {worst:.2e}"


def _check_appendix_sums() -> Check:
    def deviation(nbar: float, n0: float) -> float:
        zeta = 0.5 * math.log(n0 / nbar)
        alpha = math.sqrt(nbar - math.sinh(-zeta) ** 2)
        numeric, analytic = squeezed.appendix_sum_check(alpha, zeta, 1.0)
        return abs(numeric - analytic) / analytic

    dev4 = deviation(1e4, 100.0)
    dev6 = deviation(1e6, 1000.0)
    ok = dev4 < 0.01 and dev6 < dev4
    return (
        "weighted-overlap-asymptote", ok,
        f"rel dev {dev4:.2e} at nbar=1e4, {dev6:.2e} at 1e6",
    )


def _check_z_identity() -> Check:
    worst = 0.0
    for scheme in (HETERODYNE, MARK_I, MARK_II):
        for nbar in (10.0, 1e3, 1e6):
            v = asymptotics.vmin_general(scheme, nbar)
            z = asymptotics.z_param(v, nbar, scheme)
            worst = max(worst, abs(z - asymptotics.z_asymptote(scheme)))
    return "z-algebraic-identity", worst <= 1e-12, f"worst |z - asymptote| = {worst:.2e}"


def _check_scheme_ordering() -> Check:
    rng = np.random.default_rng(7)
    amps = np.abs(rng.normal(size=64))
    amps /= np.linalg.norm(amps)
    state = number_opt.StateVector(amplitudes=amps, n_cut=63, tail_mass=0.0)
    v0 = variance_of_state(state, CANONICAL)
    ok = all(
        v0 <= variance_of_state(state, s) + 1e-14
        for s in (HETERODYNE, MARK_I, MARK_II)
    )
    return "canonical-lower-bound", ok, "canonical variance minimal on a random state"


def _check_local_optimality() -> Check:
    mu = 1e-3
    res = optimize_at_mu(HETERODYNE, mu)
    diag, off = build_tridiagonal(HETERODYNE, mu, res.state.n_cut)
    b = res.state.amplitudes

    def rayleigh(vec: np.ndarray) -> float:
        quad = float(vec @ (diag * vec)) + 2.0 * float(off @ (vec[:-1] * vec[1:]))
        return quad / float(vec @ vec)

    rng = np.random.default_rng(11)
    ok = True
    for _ in range(25):
        k = int(rng.integers(0, b.size))
        trial = b.copy()
        trial[k] += 0.01
        ok = ok and rayleigh(trial) >= res.nu - 1e-12
    return "ground-state-optimality", ok, "single-direction mixing never lowers the objective"


def run_checks() -> list[Check]:
    checks = (
        _check_h_range,
        _check_h_het_monotone,
        _check_h_het_series_vs_exact,
        _check_ground_vs_dense,
        _check_variance_identity,
        _check_airy,
        _check_richardson_consistency,
        _check_moments,
        _check_appendix_sums,
        _check_z_identity,
        _check_scheme_ordering,
        _check_local_optimality,
    )
    results = []
    for check in checks:
        try:
            results.append(check())
        except Exception as exc:  # a crashed check is a failed check
            results.append((check.__name__.strip("_"), False, f"raised {exc!r}"))
    return results
