"""Shared multiplier search: invert the monotone map mu -> nbar by bisection.

The mean photon number of the constrained optimum falls as the multiplier
grows but cannot be predicted from it in closed form, so both the exact and
the continuum solvers locate the multiplier for a target nbar the same way:
bracket on a geometric mu ladder, then bisect on log mu.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import SolverError

MAX_BRACKET_DOUBLINGS = 60


def find_mu_for_nbar(
    evaluate: Callable[[float], object],
    mu_seed: float,
    nbar_target: float,
    rel_tol: float,
    max_iterations: int = 200,
):
    """Return (result, evaluations) with |result.nbar - target| within tolerance.

    `evaluate` maps a multiplier to a result object exposing `.nbar`.
    Raises SolverError if no bracket emerges within 60 doublings or if the
    sampled nbar values are not monotone in mu.
    """
    if nbar_target <= 0:
        raise ValueError("nbar_target must be positive")
    if not 0.0 < rel_tol <= 0.1:
        raise ValueError("rel_tol must lie in (0, 0.1]")

    evals = 0

    def probe(mu: float):
        nonlocal evals
        evals += 1
        return evaluate(mu)

    mu_lo = mu_hi = mu_seed
    res_lo = res_hi = probe(mu_seed)

    # mu_lo: multiplier small enough that nbar >= target
    steps = 0
    while res_lo.nbar < nbar_target:
        mu_next = mu_lo / 2.0
        res_next = probe(mu_next)
        if res_next.nbar < res_lo.nbar:
            raise SolverError(
                "nbar(mu) is not monotone: "
                f"nbar({mu_next:.6e})={res_next.nbar:.6e} < "
                f"nbar({mu_lo:.6e})={res_lo.nbar:.6e}"
            )
        mu_lo, res_lo = mu_next, res_next
        steps += 1
        if steps > MAX_BRACKET_DOUBLINGS:
            raise SolverError(
                f"no lower bracket for nbar={nbar_target:g} within "
                f"{MAX_BRACKET_DOUBLINGS} doublings (last mu={mu_lo:.3e})"
            )

    steps = 0
    while res_hi.nbar > nbar_target:
        mu_next = mu_hi * 2.0
        res_next = probe(mu_next)
        if res_next.nbar > res_hi.nbar:
            raise SolverError(
                "nbar(mu) is not monotone: "
                f"nbar({mu_next:.6e})={res_next.nbar:.6e} > "
                f"nbar({mu_hi:.6e})={res_hi.nbar:.6e}"
            )
        mu_hi, res_hi = mu_next, res_next
        steps += 1
        if steps > MAX_BRACKET_DOUBLINGS:
            raise SolverError(
                f"no upper bracket for nbar={nbar_target:g} within "
                f"{MAX_BRACKET_DOUBLINGS} doublings (last mu={mu_hi:.3e})"
            )

    best = min((res_lo, res_hi), key=lambda r: abs(r.nbar - nbar_target))
    while abs(best.nbar - nbar_target) > rel_tol * nbar_target:
        if evals >= max_iterations:
            raise SolverError(
                f"multiplier bisection did not converge within "
                f"{max_iterations} evaluations (best nbar={best.nbar:.6e})"
            )
        if mu_hi / mu_lo <= 1.0 + 1e-15:
            raise SolverError(
                f"multiplier interval collapsed at mu={mu_lo:.6e} with "
                f"nbar={best.nbar:.6e} still outside tolerance"
            )
        mu_mid = math.sqrt(mu_lo * mu_hi)
        res_mid = probe(mu_mid)
        if res_mid.nbar > nbar_target:
            mu_lo, res_lo = mu_mid, res_mid
        else:
            mu_hi, res_hi = mu_mid, res_mid
        if abs(res_mid.nbar - nbar_target) < abs(best.nbar - nbar_target):
            best = res_mid
    return best, evals
