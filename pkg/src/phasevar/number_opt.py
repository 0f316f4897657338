"""Fixed-mean-photon-number optimization as a tridiagonal eigenproblem.

Minimizing the measured phase variance V = 2 - 2<cos phi> at fixed mean
photon number leads, through Lagrange multipliers (mu for the photon number,
nu for normalization), to the eigenvalue problem

    2 b_n - [1 - h(n)] (b_{n+1} + b_{n-1}) = (nu - mu n) b_n

for real amplitudes b_n over the number basis.  The ground state of the
symmetric tridiagonal matrix with diagonal 2 + mu*n and off-diagonal
-(1 - h(n)) is the optimal state, and its variance is V = nu - mu*nbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import schemes
from ._musearch import find_mu_for_nbar
from .errors import ResourceLimitError, SolverError
from .schemes import SchemeModel, leading_params

__all__ = [
    "StateVector",
    "OptimizationResult",
    "build_tridiagonal",
    "ground_pair",
    "optimize_at_mu",
    "optimize_at_nbar",
    "optimize_truncated",
    "variance_of_state",
    "AIRY_FIRST_ZERO_MAG",
    "DEFAULT_TAIL_TOLERANCE",
    "DEFAULT_MAX_CUTOFF",
]

# |first zero of Ai|; sets the ground level of a linear potential with a wall
AIRY_FIRST_ZERO_MAG = 2.3381074104597674

DEFAULT_TAIL_TOLERANCE = 1e-12
DEFAULT_MAX_CUTOFF = 2**24
WIDTH_MARGIN_SIGMAS = 12.0


@dataclass(frozen=True)
class StateVector:
    """Real number-basis amplitudes b_0..b_{n_cut} with tail diagnostics.

    tail_mass is the squared amplitude summed over the top guard band (the
    highest 1% of indices); a converged optimization keeps it below the
    solver's tail tolerance.
    """

    amplitudes: np.ndarray
    n_cut: int
    tail_mass: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.n_cut + 1,):
            raise ValueError(
                f"expected {self.n_cut + 1} amplitudes, got {amps.shape}"
            )

    @property
    def norm_defect(self) -> float:
        return abs(float(self.amplitudes @ self.amplitudes) - 1.0)

    def mean_photon_number(self) -> float:
        b = self.amplitudes
        return float(b @ (np.arange(self.n_cut + 1) * b))


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal state and variance at one multiplier value.

    variance = nu - mu * nbar holds as an identity; iterations counts
    eigensolves (exact path) or multiplier probes (nbar-targeting path).
    """

    mu: float
    nu: float
    nbar: float
    variance: float
    state: StateVector
    iterations: int
    cutoff_doublings: int


def build_tridiagonal(
    scheme: SchemeModel, mu: float, n_cut: int
) -> tuple[np.ndarray, np.ndarray]:
    """Matrix of the constrained variance operator on a truncated basis.

    Returns (diag, offdiag) with diag[n] = 2 + mu*n for n = 0..n_cut and
    offdiag[n] = -(1 - h(n)) coupling n and n+1.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if n_cut < 1:
        raise ValueError("n_cut must be at least 1")
    n = np.arange(n_cut + 1)
    diag = 2.0 + mu * n
    offdiag = -(1.0 - schemes.h(scheme, n[:-1]))
    return diag, offdiag


def ground_pair(diag, offdiag) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and eigenvector of a symmetric tridiagonal matrix.

    The eigenvalue comes from bisection on Sturm sign-change counts and the
    eigenvector from inverse iteration at the converged shift (LAPACK
    stebz/stein); the vector is normalized and sign-fixed so its entry sum
    is nonnegative.  Raises SolverError if inverse iteration fails or the
    residual is out of tolerance.
    """
    d = np.ascontiguousarray(diag, dtype=float)
    e = np.ascontiguousarray(offdiag, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise ValueError("diag must be a nonempty 1-d sequence")
    if e.shape != (d.size - 1,):
        raise ValueError("offdiag must have length len(diag) - 1")
    if d.size == 1:
        return float(d[0]), np.ones(1)

    try:
        w, v = eigh_tridiagonal(
            d, e, select="i", select_range=(0, 0), lapack_driver="stebz"
        )
    except np.linalg.LinAlgError as exc:  # stein non-convergence
        raise SolverError(f"inverse iteration failed: {exc}") from exc

    value = float(w[0])
    vec = v[:, 0]
    if vec.sum() < 0.0:
        vec = -vec
    vec = vec / np.linalg.norm(vec)

    scale = max(np.abs(d).max(), np.abs(e).max(), 1.0)
    residual = _tridiag_residual(d, e, value, vec)
    if residual > 1e-8 * scale:
        raise SolverError(
            f"ground eigenpair residual {residual:.3e} exceeds tolerance "
            f"({1e-8 * scale:.3e}) at dimension {d.size}"
        )
    return value, vec


def _tridiag_residual(d, e, value, vec) -> float:
    out = (d - value) * vec
    out[:-1] += e * vec[1:]
    out[1:] += e * vec[:-1]
    return float(np.linalg.norm(out, ord=np.inf))


def initial_cutoff(scheme: SchemeModel, mu: float) -> int:
    """Basis size estimate: stationary point plus a 12-sigma width margin.

    Power-law schemes localize the optimum near x0 = (mu/2cp)**(-1/(p+1))
    with Gaussian width f2**(-1/4), f2 = c p (p+1) x0**(-p-2).  The
    canonical scheme sees a bare linear potential, whose ground state is an
    Airy function of extent mu**(-1/3).
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    c, p = leading_params(scheme)
    if c == 0.0:
        width = mu ** (-1.0 / 3.0)
        guess = (AIRY_FIRST_ZERO_MAG + WIDTH_MARGIN_SIGMAS) * width
    else:
        x0 = (mu / (2.0 * c * p)) ** (-1.0 / (p + 1.0))
        f2 = c * p * (p + 1.0) * x0 ** (-p - 2.0)
        guess = x0 + WIDTH_MARGIN_SIGMAS * f2**-0.25
    return int(math.ceil(guess)) + 16


def _require_optimizable(scheme: SchemeModel) -> None:
    c, p = leading_params(scheme)
    if c > 0.0 and p >= 2.0:
        raise ValueError(
            f"fixed-mean optimization requires a power-law exponent below 2, "
            f"got p={p}"
        )


def optimize_at_mu(
    scheme: SchemeModel,
    mu: float,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
    max_cutoff: int = DEFAULT_MAX_CUTOFF,
) -> OptimizationResult:
    """Ground state of the constrained problem at a fixed multiplier.

    Starts from the width-based cutoff estimate and doubles the basis until
    the guard-band tail mass drops below tail_tolerance.  Raises
    ResourceLimitError once the cutoff would exceed max_cutoff; the
    continuum solver is the right tool in that regime.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    _require_optimizable(scheme)

    n_cut = min(initial_cutoff(scheme, mu), max_cutoff)
    solves = 0
    doublings = 0
    while True:
        diag, offdiag = build_tridiagonal(scheme, mu, n_cut)
        nu, b = ground_pair(diag, offdiag)
        solves += 1
        guard = max(1, (n_cut + 1) // 100)
        tail = float(b[-guard:] @ b[-guard:])
        if tail <= tail_tolerance:
            break
        if 2 * n_cut > max_cutoff:
            raise ResourceLimitError(
                f"basis cutoff would exceed {max_cutoff} while the tail mass "
                f"is still {tail:.3e}; use the continuum solver for this "
                f"regime"
            )
        n_cut *= 2
        doublings += 1

    state = StateVector(amplitudes=b, n_cut=n_cut, tail_mass=tail)
    nbar = state.mean_photon_number()
    return OptimizationResult(
        mu=mu,
        nu=nu,
        nbar=nbar,
        variance=nu - mu * nbar,
        state=state,
        iterations=solves,
        cutoff_doublings=doublings,
    )


def mu_seed(scheme: SchemeModel, nbar: float) -> float:
    """First multiplier guess for a target mean photon number."""
    c, p = leading_params(scheme)
    if c == 0.0:
        # Airy ground state of a linear potential has <x> = (2/3)|a1| mu**(-1/3)
        return (2.0 * AIRY_FIRST_ZERO_MAG / (3.0 * (nbar + 1.0))) ** 3
    return 2.0 * c * p * nbar ** (-(p + 1.0))


def optimize_at_nbar(
    scheme: SchemeModel,
    nbar_target: float,
    rel_tol: float = 1e-6,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
    max_cutoff: int = DEFAULT_MAX_CUTOFF,
) -> OptimizationResult:
    """Optimal state whose mean photon number matches the target.

    Brackets and bisects the multiplier on a log scale, seeded by the
    asymptotic inversion of nbar(mu).  Deterministic for fixed inputs.
    """
    if nbar_target < 0.5:
        raise ValueError(
            "nbar_target below 0.5 is rejected: the asymptotic seeding is "
            "meaningless there"
        )
    _require_optimizable(scheme)

    def evaluate(mu: float) -> OptimizationResult:
        return optimize_at_mu(
            scheme, mu, tail_tolerance=tail_tolerance, max_cutoff=max_cutoff
        )

    best, evals = find_mu_for_nbar(
        evaluate, mu_seed(scheme, nbar_target), nbar_target, rel_tol
    )
    return OptimizationResult(
        mu=best.mu,
        nu=best.nu,
        nbar=best.nbar,
        variance=best.variance,
        state=best.state,
        iterations=evals,
        cutoff_doublings=best.cutoff_doublings,
    )


def optimize_truncated(
    scheme: SchemeModel, n_max: int
) -> tuple[float, StateVector]:
    """Minimum variance with the photon number capped at n_max.

    Solves the (n_max + 1)-dimensional problem at mu = 0 and returns the
    smallest eigenvalue with its state.  The state presses against the cap,
    so its tail_mass is genuine structure, not a convergence flag.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    diag, offdiag = build_tridiagonal(scheme, 0.0, n_max)
    nu, b = ground_pair(diag, offdiag)
    guard = max(1, (n_max + 1) // 100)
    state = StateVector(
        amplitudes=b, n_cut=n_max, tail_mass=float(b[-guard:] @ b[-guard:])
    )
    return nu, state


def variance_of_state(state: StateVector, scheme: SchemeModel) -> float:
    """Measured phase variance V = 2 - 2 sum_n (1 - h(n)) b_n b_{n+1}."""
    if state.norm_defect > 1e-9:
        raise ValueError(
            f"state is not normalized (defect {state.norm_defect:.3e})"
        )
    b = state.amplitudes
    n = np.arange(state.n_cut)
    overlap = b[:-1] * b[1:]
    return 2.0 - 2.0 * float((1.0 - schemes.h(scheme, n)) @ overlap)
