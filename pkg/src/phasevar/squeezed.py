"""Squeezed states: number-basis amplitudes, measured variance, optimization.

A displaced squeezed state with real displacement alpha >= 0 and real
squeezing parameter zeta <= 0 (phase squeezing) has real number-basis
amplitudes obeying the three-term recursion

    b_{n+1} = (beta b_n - nu_s sqrt(n) b_{n-1}) / (mu_s sqrt(n+1)),

with mu_s = cosh r, nu_s = -sinh r, beta = alpha (mu_s + nu_s), r = -zeta.
The recursion runs in a scaled representation, rescaling the rolling pair
whenever its magnitude leaves [1e-100, 1e100], so it survives mean photon
numbers up to about a million, where roundoff finally takes over.

The squeezing trade-off is controlled by n0 = nbar * exp(2 zeta): smaller
n0 narrows the intrinsic phase spread but amplifies the measurement's
excess-noise penalty.  optimize_squeezed minimizes over n0 at fixed nbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import schemes
from .errors import PrecisionError
from .schemes import SchemeModel, leading_params

__all__ = [
    "SqueezedPoint",
    "amplitudes",
    "default_cutoff",
    "squeezed_variance",
    "optimize_squeezed",
    "appendix_sum_check",
    "params_from_n0",
]

_RESCALE_HI = 1e100
_RESCALE_LO = 1e-100
NORM_DEFECT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SqueezedPoint:
    """An optimized squeezed state and its measured phase variance."""

    alpha: float
    zeta: float
    r: float
    mu_s: float
    nu_s: float
    beta: float
    nbar: float
    n0: float
    variance: float

    @classmethod
    def from_alpha_zeta(
        cls, alpha: float, zeta: float, variance: float
    ) -> "SqueezedPoint":
        r = -zeta
        mu_s = math.cosh(r)
        nu_s = -math.sinh(r)
        nbar = alpha**2 + math.sinh(r) ** 2
        return cls(
            alpha=alpha,
            zeta=zeta,
            r=r,
            mu_s=mu_s,
            nu_s=nu_s,
            beta=alpha * (mu_s + nu_s),
            nbar=nbar,
            n0=nbar * math.exp(2.0 * zeta),
            variance=variance,
        )

    def photon_number_variance(self) -> float:
        """<(n - nbar)^2> in closed form."""
        return (
            self.alpha**2 * (self.mu_s - self.nu_s) ** 2
            + 2.0 * self.mu_s**2 * self.nu_s**2
        )


def _validate_params(alpha: float, zeta: float) -> None:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative (real-amplitude phase 0)")
    if zeta > 0:
        raise ValueError("zeta must be nonpositive (phase squeezing)")


def _spec_minimum_cutoff(alpha: float, zeta: float) -> int:
    """The bare 12-sigma coverage floor callers must respect."""
    r = -zeta
    nbar = alpha**2 + math.sinh(r) ** 2
    var_n = alpha**2 * math.exp(2.0 * r) + 0.5 * math.sinh(2.0 * r) ** 2
    return int(math.ceil(nbar + 12.0 * math.sqrt(var_n)))


def default_cutoff(alpha: float, zeta: float) -> int:
    """Basis size covering both the Gaussian bulk and the squeezing tail.

    The number distribution is Gaussian near its bulk but crosses over to
    a geometric tail with per-state rate |ln tanh r|, which dominates for
    vacuum-heavy squeezing; 12 sigma alone can strand 1e-5 of the mass
    there.  The geometric margin pushes the truncated tail below 1e-13.
    """
    _validate_params(alpha, zeta)
    r = -zeta
    gaussian = _spec_minimum_cutoff(alpha, zeta)
    geometric = 0
    if r > 0.0:
        rate = -math.log(math.tanh(r))
        geometric = int(math.ceil(30.0 / rate))
    return gaussian + geometric + 64


def amplitudes(alpha: float, zeta: float, n_cut: int | None = None) -> np.ndarray:
    """Number-basis amplitudes b_0..b_{n_cut}, normalized to unit norm.

    n_cut defaults to the 12-sigma coverage estimate and may not be chosen
    smaller.  The recursion runs on scaled mantissas with per-segment log
    offsets; the final vector is checked against the analytically known
    ground amplitude and raises PrecisionError when roundoff has corrupted
    the normalization beyond 1e-8.
    """
    _validate_params(alpha, zeta)
    if n_cut is None:
        n_cut = default_cutoff(alpha, zeta)
    elif n_cut < _spec_minimum_cutoff(alpha, zeta):
        raise ValueError(
            f"n_cut={n_cut} is below the 12-sigma coverage requirement "
            f"({_spec_minimum_cutoff(alpha, zeta)})"
        )

    r = -zeta
    mu_s = math.cosh(r)
    nu_s = -math.sinh(r)
    beta = alpha * (mu_s + nu_s)
    # exact log of b_0 = mu_s**-1/2 * exp(-beta^2/2 + (nu_s/2mu_s) beta^2)
    log_b0 = -0.5 * math.log(mu_s) - 0.5 * beta**2 + (nu_s / (2.0 * mu_s)) * beta**2

    sqrt_n = np.sqrt(np.arange(n_cut + 2)).tolist()
    mantissa = np.empty(n_cut + 1)
    seg_log = np.zeros(n_cut + 1)
    mantissa[0] = 1.0
    b_prev, b_cur, cur_log = 0.0, 1.0, 0.0
    inv_mu = 1.0 / mu_s
    for n in range(n_cut):
        b_next = (beta * b_cur - nu_s * sqrt_n[n] * b_prev) * inv_mu / sqrt_n[n + 1]
        b_prev, b_cur = b_cur, b_next
        mag = b_cur if b_cur >= 0.0 else -b_cur
        if mag > _RESCALE_HI or 0.0 < mag < _RESCALE_LO:
            # coherent-dominated growth can cross e^700 within a few
            # thousand steps, so the guard runs every step
            b_cur /= mag
            b_prev /= mag
            cur_log += math.log(mag)
        mantissa[n + 1] = b_cur
        seg_log[n + 1] = cur_log

    top = seg_log.max()
    scaled = mantissa * np.exp(seg_log - top)
    norm_sq_scaled = float(scaled @ scaled)
    if norm_sq_scaled <= 0.0 or not math.isfinite(norm_sq_scaled):
        raise PrecisionError("amplitude recursion lost all significance")

    # reconstruct the true norm using the analytic anchor for b_0
    log_norm_sq = math.log(norm_sq_scaled) + 2.0 * (top + log_b0)
    defect = abs(math.expm1(log_norm_sq))
    if defect > NORM_DEFECT_TOLERANCE:
        raise PrecisionError(
            f"normalization defect {defect:.3e} exceeds "
            f"{NORM_DEFECT_TOLERANCE:g}; roundoff dominates at this photon "
            f"number"
        )
    return scaled / math.sqrt(norm_sq_scaled)


def squeezed_variance(
    alpha: float, zeta: float, scheme: SchemeModel, n_cut: int | None = None
) -> float:
    """Measured phase variance of the squeezed state under a scheme.

    V = 2 - 2 sum b_n b_{n+1} + 2 sum h(n) b_n b_{n+1}.
    """
    b = amplitudes(alpha, zeta, n_cut)
    overlap = b[:-1] * b[1:]
    n = np.arange(b.size - 1)
    h_vals = schemes.h(scheme, n)
    return 2.0 - 2.0 * float(overlap.sum()) + 2.0 * float(h_vals @ overlap)


def params_from_n0(nbar: float, n0: float) -> tuple[float, float]:
    """Resolve (alpha, zeta) from the pair (nbar, n0), both held exactly.

    zeta = ln(n0/nbar)/2 and alpha^2 = nbar - sinh^2(-zeta); raises
    ValueError when the implied displacement would be imaginary (n0 too
    small for this nbar).
    """
    if not 0.0 < n0 <= nbar:
        raise ValueError("n0 must lie in (0, nbar]")
    zeta = 0.5 * math.log(n0 / nbar)
    alpha_sq = nbar - math.sinh(-zeta) ** 2
    if alpha_sq < 0.0:
        raise ValueError(
            f"n0={n0:g} is infeasible at nbar={nbar:g}: squeezing alone "
            f"exceeds the photon budget"
        )
    return math.sqrt(alpha_sq), zeta


def _n0_floor(nbar: float) -> float:
    """Smallest feasible n0 (pure squeezed vacuum carries all the photons)."""
    return nbar / (math.sqrt(nbar) + math.sqrt(nbar + 1.0)) ** 2


def _n0_seed(scheme: SchemeModel, nbar: float) -> float:
    c, p = leading_params(scheme)
    if c == 0.0:
        # intrinsic-variance optimum scales logarithmically
        return max(1.0, math.log(nbar))
    return 2.0 * math.sqrt(c * p * (p + 1.0)) * nbar ** (1.0 - p / 2.0)


def optimize_squeezed(
    scheme: SchemeModel, nbar: float, n0_rel_tol: float = 1e-6
) -> SqueezedPoint:
    """Minimize the measured variance over the squeezing at fixed nbar.

    One-dimensional golden-section search on ln n0, bracketed by walking a
    geometric ladder from the analytic seed.  The variance is flat to
    second order at the optimum, so the default n0 tolerance of 1e-6 is
    already below what double precision can resolve in V.
    """
    if nbar < 1:
        raise ValueError("nbar must be at least 1")

    lo = math.log(_n0_floor(nbar) * (1.0 + 1e-9))
    hi = math.log(nbar)
    cache: dict[float, float] = {}

    def objective(ln_n0: float) -> float:
        if ln_n0 in cache:
            return cache[ln_n0]
        n0 = math.exp(ln_n0)
        try:
            alpha, zeta = params_from_n0(nbar, n0)
            value = squeezed_variance(alpha, zeta, scheme)
        except ValueError:
            value = math.inf  # infeasible probe; bracket shrinks around it
        cache[ln_n0] = value
        return value

    a, b, c = _bracket_minimum(
        objective, math.log(min(max(_n0_seed(scheme, nbar), math.exp(lo)), nbar)),
        lo, hi,
    )
    ln_opt = _golden_section(objective, a, b, c, math.log1p(n0_rel_tol))
    alpha, zeta = params_from_n0(nbar, math.exp(ln_opt))
    return SqueezedPoint.from_alpha_zeta(
        alpha, zeta, squeezed_variance(alpha, zeta, scheme)
    )


def _bracket_minimum(fn, seed, lo, hi, step=math.log(2.0)):
    """Walk outward from the seed until the middle of three points is lowest."""
    seed = min(max(seed, lo), hi)
    a = max(lo, seed - step)
    c = min(hi, seed + step)
    b = seed if lo < seed < hi else 0.5 * (a + c)
    fa, fb, fc = fn(a), fn(b), fn(c)
    for _ in range(200):
        if fb <= fa and fb <= fc:
            return a, b, c
        if fa < fb:  # walk left
            if a <= lo:
                return a, min(a + 1e-12, b), b  # minimum pinned at the floor
            a, b, c = max(lo, a - step), a, b
            fa, fb, fc = fn(a), fa, fb
        else:  # walk right
            if c >= hi:
                return b, max(c - 1e-12, b), c  # minimum pinned at n0 = nbar
            a, b, c = b, c, min(hi, c + step)
            fa, fb, fc = fb, fc, fn(c)
    raise RuntimeError("failed to bracket the squeezing optimum")


def _golden_section(fn, a, b, c, xtol):
    """Standard golden-section refinement of a bracketed minimum."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = a, c
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    while hi - lo > xtol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = fn(x2)
    candidates = [(fn(0.5 * (lo + hi)), 0.5 * (lo + hi)), (f1, x1), (f2, x2), (fn(b), b)]
    return min(candidates)[1]


def appendix_sum_check(
    alpha: float, zeta: float, p: float
) -> tuple[float, float]:
    """Brute-force vs asymptotic value of the weighted neighbour-overlap sum.

    Returns (numeric, analytic) for sum_n (n+1)**-p b_n b_{n+1}, whose
    large-n0 asymptote is nbar**-p [1 + p(p+1)/(2 n0)].  The brute-force
    side is the oracle; the analytic side is what the variance formulas
    rely on.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    _validate_params(alpha, zeta)
    b = amplitudes(alpha, zeta)
    n = np.arange(b.size - 1, dtype=float)
    numeric = float(((n + 1.0) ** -p * b[:-1] * b[1:]).sum())
    r = -zeta
    nbar = alpha**2 + math.sinh(r) ** 2
    n0 = nbar * math.exp(2.0 * zeta)
    analytic = nbar**-p * (1.0 + p * (p + 1.0) / (2.0 * n0))
    return numeric, analytic
