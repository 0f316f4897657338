"""Closed-form asymptotic laws and published reference curves.

Everything here is a formula: the two-term large-nbar minimum variance, the
z parameter that isolates its sub-leading term, the truncated-basis law, the
perturbative constants of the harmonic-plus-cubic continuum picture, and a
small catalog of literature curves used for cross-comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .number_opt import AIRY_FIRST_ZERO_MAG
from .schemes import MARK1_TAIL_C2, MARK1_TAIL_C3, MARK_I, SchemeModel, leading_params

__all__ = [
    "vmin_general",
    "z_param",
    "z_asymptote",
    "z_markI_corrected",
    "vmin_truncated_asym",
    "reference_curves",
    "perturbation_constants",
    "AsymptoticCurve",
    "PerturbationConstants",
    "CURVES",
    "COLLETT_DELTA",
    "CUBIC_ME_0_TO_1",
    "CUBIC_ME_0_TO_3",
    "DARIANO_PARIS_COEFF",
    "DARIANO_PARIS_POWER",
    "DARIANO_PARIS_QUOTED_ERR",
]

# Offset in the squeezed-state intrinsic minimum (ln nbar + Delta)/(4 nbar^2),
# kept in closed form: 3/2 + 2 ln 2 - (1/4) ln(2 pi).
COLLETT_DELTA = 1.5 + 2.0 * math.log(2.0) - 0.25 * math.log(2.0 * math.pi)

# Ground-state matrix elements of the scaled cubic perturbation: the only
# nonvanishing <k|xi^3|0> are k = 1 and k = 3.
CUBIC_ME_0_TO_1 = 3.0 / (2.0 * math.sqrt(2.0))
CUBIC_ME_0_TO_3 = math.sqrt(3.0) / 2.0

# Central values of the published heterodyne power-law fit, with the quoted
# uncertainty carried as metadata only.
DARIANO_PARIS_COEFF = 1.00
DARIANO_PARIS_POWER = 1.30
DARIANO_PARIS_QUOTED_ERR = 0.02


def _require_power_law(scheme: SchemeModel) -> tuple[float, float]:
    c, p = leading_params(scheme)
    if c == 0.0:
        raise ValueError(
            "the canonical scheme has no power-law noise; this formula "
            "applies to lossy schemes only"
        )
    return c, p


def vmin_general(scheme: SchemeModel, nbar: float) -> float:
    """Two-term large-nbar minimum variance for a fixed mean photon number.

    V_min(nbar) ~ 2 c nbar**-p + sqrt(c p (p+1)) nbar**(-p/2 - 1), valid
    for p < 2.
    """
    if nbar < 1:
        raise ValueError("nbar must be at least 1")
    c, p = _require_power_law(scheme)
    return 2.0 * c * nbar**-p + math.sqrt(c * p * (p + 1.0)) * nbar ** (
        -p / 2.0 - 1.0
    )


def z_param(variance: float, nbar: float, scheme: SchemeModel) -> float:
    """Scaled excess over the leading variance term.

    z = (V - 2 c nbar**-p) * nbar**(p/2 + 1); for the optimal states it
    approaches sqrt(c p (p+1)) from the two-term law.
    """
    if variance <= 0:
        raise ValueError("variance must be positive")
    c, p = _require_power_law(scheme)
    return (variance - 2.0 * c * nbar**-p) * nbar ** (p / 2.0 + 1.0)


def z_asymptote(scheme: SchemeModel) -> float:
    """Large-nbar limit of the z parameter, sqrt(c p (p+1))."""
    c, p = _require_power_law(scheme)
    return math.sqrt(c * p * (p + 1.0))


def z_markI_corrected(nbar: float) -> float:
    """Predicted z for the mark I scheme including its slow tail corrections.

    The mark I excess noise carries a 1/m correction whose contribution to
    the variance decays more slowly than the universal sub-leading term, so
    z never settles at sqrt(c p (p+1)).  Propagating the two fitted tail
    coefficients through V ~ 2 h(nbar) + ... gives

        z(nbar) = sqrt(c p (p+1)) + 2 c2 nbar**(1/4) + 2 c3 nbar**(-1/4)

    with c2 = -0.101562, c3 = -0.0508.  Both terms are kept because exact
    solves at nbar ~ 100 still resolve the c3 piece at the percent level.
    """
    if nbar < 1:
        raise ValueError("nbar must be at least 1")
    return (
        z_asymptote(MARK_I)
        + 2.0 * MARK1_TAIL_C2 * nbar**0.25
        + 2.0 * MARK1_TAIL_C3 * nbar**-0.25
    )


def vmin_truncated_asym(scheme: SchemeModel, n_max: float) -> float:
    """Minimum variance with the photon number capped at n_max.

    V(n_max) ~ 2 c N**-p + |a1| (2 c p)**(2/3) N**(-2(1+p)/3), where a1 is
    the first zero of the Airy function: the optimal state presses against
    the cap and sees an effectively linear potential there.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    c, p = _require_power_law(scheme)
    return 2.0 * c * n_max**-p + AIRY_FIRST_ZERO_MAG * (2.0 * c * p) ** (
        2.0 / 3.0
    ) * n_max ** (-2.0 * (1.0 + p) / 3.0)


@dataclass(frozen=True)
class AsymptoticCurve:
    """A named reference formula with a one-line provenance note."""

    name: str
    evaluate: Callable[..., float]
    provenance: str


def _summy_pegg(nbar: float) -> float:
    return 1.88 / (nbar + 0.86) ** 2


def _collett(nbar: float) -> float:
    return (math.log(nbar) + COLLETT_DELTA) / (4.0 * nbar**2)


def _dariano_paris(nbar: float) -> float:
    return DARIANO_PARIS_COEFF * nbar ** (-DARIANO_PARIS_POWER)


def _lower_bound(nbar: float) -> float:
    return math.log(nbar) / (4.0 * nbar**2)


def _coherent_heterodyne(nbar: float) -> float:
    return 1.0 / (2.0 * nbar)


def _coherent_adaptive(nbar: float) -> float:
    return 1.0 / (4.0 * nbar) + 1.0 / (8.0 * nbar**1.5)


def _inefficiency(nbar: float, eta: float) -> float:
    if not 0.0 < eta <= 1.0:
        raise ValueError("detector efficiency eta must lie in (0, 1]")
    return (1.0 - eta) / (4.0 * eta * nbar)


def _time_delay(nbar: float, delay: float) -> float:
    if delay < 0:
        raise ValueError("feedback delay must be nonnegative")
    return delay / nbar


CURVES: dict[str, AsymptoticCurve] = {
    "summy_pegg": AsymptoticCurve(
        "summy_pegg", _summy_pegg,
        "fixed-mean intrinsic optimum fit, Summy & Pegg (1990)",
    ),
    "collett": AsymptoticCurve(
        "collett", _collett,
        "squeezed-state intrinsic optimum, Collett (1993)",
    ),
    "dariano_paris": AsymptoticCurve(
        "dariano_paris", _dariano_paris,
        "claimed heterodyne power law, D'Ariano & Paris (1994)",
    ),
    "lower_bound": AsymptoticCurve(
        "lower_bound", _lower_bound,
        "lower bound on measurement-added phase variance",
    ),
    "coherent_heterodyne": AsymptoticCurve(
        "coherent_heterodyne", _coherent_heterodyne,
        "heterodyne variance of a coherent state",
    ),
    "coherent_adaptive": AsymptoticCurve(
        "coherent_adaptive", _coherent_adaptive,
        "adaptive-measurement variance of a coherent state",
    ),
    "inefficiency": AsymptoticCurve(
        "inefficiency", _inefficiency,
        "excess variance from detectors of efficiency eta",
    ),
    "time_delay": AsymptoticCurve(
        "time_delay", _time_delay,
        "excess variance from a scaled feedback delay",
    ),
}


def reference_curves(
    name: str, argument: float, *, eta: float | None = None,
    delay: float | None = None,
) -> float:
    """Evaluate a named literature curve at the given mean photon number.

    `inefficiency` requires eta and `time_delay` requires delay; the other
    curves take only the photon-number argument (>= 1).
    """
    if name not in CURVES:
        raise ValueError(
            f"unknown reference curve {name!r}; choose from {sorted(CURVES)}"
        )
    if argument < 1:
        raise ValueError("argument must be at least 1")
    if name == "inefficiency":
        if eta is None:
            raise ValueError("the inefficiency curve requires eta")
        return _inefficiency(argument, eta)
    if name == "time_delay":
        if delay is None:
            raise ValueError("the time_delay curve requires delay")
        return _time_delay(argument, delay)
    return CURVES[name].evaluate(argument)


@dataclass(frozen=True)
class PerturbationConstants:
    """Constants of the harmonic-plus-cubic expansion around x0.

    The potential 2 h(x) + mu x is stationary at x0; f2 and f3 are half the
    second and a sixth of the third derivative there, b the scaled cubic
    strength, and e0 the ground level sqrt(f2) before and after the
    second-order cubic shift.  `valid` flags sqrt(f2) * x0**2 > 10, below
    which the localized-state picture breaks down.
    """

    x0: float
    f2: float
    f3: float
    b: float
    e0_unperturbed: float
    e0_corrected: float
    valid: bool


def perturbation_constants(scheme: SchemeModel, mu: float) -> PerturbationConstants:
    """Stationary point, Taylor coefficients, and perturbed ground level."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    c, p = _require_power_law(scheme)
    if p >= 2.0:
        raise ValueError("the localized expansion requires p < 2")
    x0 = (mu / (2.0 * c * p)) ** (-1.0 / (p + 1.0))
    f2 = c * p * (p + 1.0) * x0 ** (-p - 2.0)
    f3 = -c * p * (p + 1.0) * (p + 2.0) / 3.0 * x0 ** (-p - 3.0)
    b = -(p + 2.0) / 3.0 * (c * p * (p + 1.0)) ** 0.25 * x0 ** (-p / 4.0 - 1.5)
    e0 = math.sqrt(f2)
    # second-order shift: -(b^2 / 2 sqrt(f2)) * sum_k |<k|xi^3|0>|^2 / k
    #                   = -(11/16) b^2 / sqrt(f2)
    e0_corr = e0 - b**2 * (11.0 / 16.0) / math.sqrt(f2)
    return PerturbationConstants(
        x0=x0,
        f2=f2,
        f3=f3,
        b=b,
        e0_unperturbed=e0,
        e0_corrected=e0_corr,
        valid=math.sqrt(f2) * x0**2 > 10.0,
    )
