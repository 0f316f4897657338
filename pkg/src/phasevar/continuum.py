"""Large-nbar solver on a real-valued grid with step-size extrapolation.

For very large mean photon numbers the number-basis recurrence is well
approximated by the differential equation

    -y''(x) + [2 h(x) + mu x] y(x) = nu y(x),

whose ground state is localized around the potential minimum at
x0 = (mu/2cp)**(-1/(p+1)) with Gaussian width f2**(-1/4).  This module
discretizes that operator with central differences on a window around x0,
solves at three step sizes (s, s/2, s/4), and projects to zero step size
with an even-power error model a s**2 + b s**4 fitted exactly through the
three solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import schemes
from ._musearch import find_mu_for_nbar
from .errors import BoundaryContaminationError
from .number_opt import ground_pair
from .schemes import SchemeModel, leading_params

__all__ = [
    "ContinuumResult",
    "discretize",
    "solve_continuum",
    "solve_continuum_at_nbar",
    "DEFAULT_WIDTH_SIGMAS",
    "DEFAULT_BASE_INTERVALS",
    "BOUNDARY_MASS_TOLERANCE",
]

DEFAULT_WIDTH_SIGMAS = 12.0
DEFAULT_BASE_INTERVALS = 4096
BOUNDARY_MASS_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ContinuumResult:
    """Raw three-step solves and their zero-step projection.

    raw holds one (nu, nbar, variance) triple per step size, coarsest
    first; extrapolated is the projected triple.
    """

    mu: float
    x0: float
    halfwidth: float
    step_sizes: tuple[float, float, float]
    raw: tuple[tuple[float, float, float], ...]
    extrapolated: tuple[float, float, float]

    @property
    def nu(self) -> float:
        return self.extrapolated[0]

    @property
    def nbar(self) -> float:
        return self.extrapolated[1]

    @property
    def variance(self) -> float:
        return self.extrapolated[2]


def discretize(
    scheme: SchemeModel,
    mu: float,
    x_lo: float,
    x_hi: float,
    intervals: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference matrix of -d2/dx2 + 2 h(x) + mu x with Dirichlet ends.

    Returns (diag, offdiag) over the interior points x_i = x_lo + i*s,
    i = 1..intervals-1, with diag = 2/s**2 + 2 h(x_i) + mu x_i and
    offdiag = -1/s**2.
    """
    if not 0 <= x_lo < x_hi:
        raise ValueError("require 0 <= x_lo < x_hi")
    if intervals < 16:
        raise ValueError("intervals must be at least 16")
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    step = (x_hi - x_lo) / intervals
    x = x_lo + step * np.arange(1, intervals)
    diag = 2.0 / step**2 + 2.0 * schemes.h_continuous(scheme, x) + mu * x
    offdiag = np.full(intervals - 2, -1.0 / step**2)
    return diag, offdiag


def _richardson3(v_s: float, v_s2: float, v_s4: float) -> float:
    """Project (v(s), v(s/2), v(s/4)) to v(0) assuming error = a s^2 + b s^4."""
    first = (4.0 * v_s2 - v_s) / 3.0
    second = (4.0 * v_s4 - v_s2) / 3.0
    return (16.0 * second - first) / 15.0


def solve_continuum(
    scheme: SchemeModel,
    mu: float,
    width_sigmas: float = DEFAULT_WIDTH_SIGMAS,
    base_intervals: int = DEFAULT_BASE_INTERVALS,
) -> ContinuumResult:
    """Ground level, mean, and variance projected to zero step size.

    The grid is centered at the stationary point x0 with halfwidth
    width_sigmas * f2**(-1/4), clipped below at 0.  nbar is the normalized
    trapezoid integral of x y(x)^2 on each grid, extrapolated alongside nu;
    the variance is nu_extrap - mu * nbar_extrap.  Raises
    BoundaryContaminationError if more than 1e-10 of the mass sits on a
    grid edge.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    if width_sigmas < 8:
        raise ValueError("width_sigmas must be at least 8")
    if base_intervals < 256:
        raise ValueError("base_intervals must be at least 256")
    c, p = leading_params(scheme)
    if c == 0.0:
        raise ValueError(
            "the continuum solver needs a power-law scheme to place its "
            "grid; the canonical problem has no stationary point"
        )
    if p >= 2.0:
        raise ValueError("localized continuum solution requires p < 2")

    x0 = (mu / (2.0 * c * p)) ** (-1.0 / (p + 1.0))
    f2 = c * p * (p + 1.0) * x0 ** (-p - 2.0)
    halfwidth = width_sigmas * f2**-0.25
    x_lo = max(0.0, x0 - halfwidth)
    x_hi = x0 + halfwidth

    steps: list[float] = []
    raw: list[tuple[float, float, float]] = []
    for factor in (1, 2, 4):
        intervals = base_intervals * factor
        step = (x_hi - x_lo) / intervals
        diag, offdiag = discretize(scheme, mu, x_lo, x_hi, intervals)
        nu, y = ground_pair(diag, offdiag)
        edge_mass = float(y[0] ** 2 + y[-1] ** 2)
        if edge_mass > BOUNDARY_MASS_TOLERANCE:
            raise BoundaryContaminationError(
                f"{edge_mass:.3e} of the eigenfunction mass sits on the grid "
                f"boundary (x in [{x_lo:.6g}, {x_hi:.6g}]); widen the window "
                f"or use the exact solver"
            )
        x = x_lo + step * np.arange(1, intervals)
        nbar = float((x * y**2).sum() / (y**2).sum())
        steps.append(step)
        raw.append((nu, nbar, nu - mu * nbar))

    nu_x = _richardson3(raw[0][0], raw[1][0], raw[2][0])
    nbar_x = _richardson3(raw[0][1], raw[1][1], raw[2][1])
    return ContinuumResult(
        mu=mu,
        x0=x0,
        halfwidth=halfwidth,
        step_sizes=(steps[0], steps[1], steps[2]),
        raw=tuple(raw),
        extrapolated=(nu_x, nbar_x, nu_x - mu * nbar_x),
    )


def solve_continuum_at_nbar(
    scheme: SchemeModel,
    nbar_target: float,
    rel_tol: float = 1e-6,
    width_sigmas: float = DEFAULT_WIDTH_SIGMAS,
    base_intervals: int = DEFAULT_BASE_INTERVALS,
) -> ContinuumResult:
    """Continuum solve whose extrapolated nbar matches the target.

    Same log-scale multiplier bisection as the exact optimizer, with
    solve_continuum as the inner evaluator.
    """
    if nbar_target < 0.5:
        raise ValueError("nbar_target below 0.5 is rejected")
    c, p = leading_params(scheme)
    if c == 0.0:
        raise ValueError("the continuum solver needs a power-law scheme")

    def evaluate(mu: float) -> ContinuumResult:
        return solve_continuum(
            scheme, mu, width_sigmas=width_sigmas, base_intervals=base_intervals
        )

    seed = 2.0 * c * p * nbar_target ** (-(p + 1.0))
    best, _ = find_mu_for_nbar(evaluate, seed, nbar_target, rel_tol)
    return best
