"""Measurement schemes and their excess-noise functions.

A single-mode phase measurement is characterized here by the fraction of
nearest-neighbour number-state coherence it destroys, h(m) in [0, 1].  An
ideal (canonical) measurement has h = 0; every physical scheme loses some
coherence, and for large m the loss follows a power law h(m) ~ c * m**-p.
The built-in schemes are heterodyne detection, the two single-shot adaptive
schemes (mark I and mark II), plain power laws, and externally tabulated
values loaded from a text file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from .errors import MissingTailError, TableFormatError

__all__ = [
    "SchemeModel",
    "CANONICAL",
    "HETERODYNE",
    "MARK_I",
    "MARK_II",
    "power_law",
    "by_name",
    "leading_params",
    "h",
    "h_continuous",
    "h_het_exact",
    "h_het_series",
    "load_h_table",
    "HET_SERIES_COEFFS",
]

# Asymptotic expansion of the heterodyne excess noise in powers of 1/(m+1),
# derived symbolically from the Stirling series for ln Gamma.  Exact
# rationals; the first two terms are 1/8 and -1/128.
HET_SERIES_COEFFS: tuple[float, ...] = (
    1.0 / 8.0,
    -1.0 / 128.0,
    -5.0 / 1024.0,
    21.0 / 32768.0,
    399.0 / 262144.0,
    -869.0 / 4194304.0,
    -39325.0 / 33554432.0,
    334477.0 / 2147483648.0,
    28717403.0 / 17179869184.0,
    -59697183.0 / 274877906944.0,
    -8400372435.0 / 2199023255552.0,
    34429291905.0 / 70368744177664.0,
)

# Fitted tail of the mark I adaptive scheme: the two sub-leading
# coefficients beyond 1/(8 sqrt(m)) are numerical fit constants.
MARK1_TAIL_C2 = -0.101562
MARK1_TAIL_C3 = -0.0508


@dataclass(frozen=True)
class SchemeModel:
    """A phase-measurement scheme's excess-noise description.

    kind      one of "canonical", "heterodyne", "mark1", "mark2",
              "power_law", "tabulated"
    c, p      leading power-law parameters, h(m) ~ c * m**-p (c == 0 for
              the canonical scheme, which has h == 0 identically)
    table     tabulated h values indexed by m (tabulated kind only)
    m_switch  threshold between small-m and asymptotic evaluation
    """

    kind: str
    c: float = 0.0
    p: float = 0.0
    table: tuple[float, ...] | None = None
    m_switch: int = 1

    def __post_init__(self) -> None:
        if self.kind not in (
            "canonical", "heterodyne", "mark1", "mark2", "power_law", "tabulated",
        ):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "canonical":
            return
        if self.kind == "tabulated" and not self.table:
            raise ValueError("a tabulated scheme needs a nonempty table")
        has_tail = self.c != 0.0 or self.p != 0.0
        if self.kind == "tabulated" and not has_tail:
            return  # tail is optional for tabulated schemes
        if not (self.c > 0.0 and self.p > 0.0):
            raise ValueError(
                f"power-law parameters must be positive, got c={self.c}, p={self.p}"
            )

    @property
    def has_tail(self) -> bool:
        return self.kind == "canonical" or (self.c > 0.0 and self.p > 0.0)

    @property
    def name(self) -> str:
        return self.kind


CANONICAL = SchemeModel(kind="canonical", m_switch=0)
HETERODYNE = SchemeModel(kind="heterodyne", c=1.0 / 8.0, p=1.0, m_switch=12)
MARK_I = SchemeModel(kind="mark1", c=1.0 / 8.0, p=0.5, m_switch=10)
MARK_II = SchemeModel(kind="mark2", c=1.0 / 16.0, p=1.5, m_switch=1)

_BUILTIN = {
    "canonical": CANONICAL,
    "heterodyne": HETERODYNE,
    "mark1": MARK_I,
    "mark2": MARK_II,
}


def power_law(c: float, p: float) -> SchemeModel:
    """A generic scheme with h(m) = c * m**-p (h(0) = 1 by convention)."""
    return SchemeModel(kind="power_law", c=float(c), p=float(p), m_switch=1)


def by_name(name: str) -> SchemeModel:
    """Look up one of the built-in schemes by its CLI name."""
    try:
        return _BUILTIN[name.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown scheme {name!r}; choose from {sorted(_BUILTIN)}"
        ) from None


def leading_params(scheme: SchemeModel) -> tuple[float, float]:
    """Return the (c, p) pair of the large-m power law h(m) ~ c * m**-p.

    The canonical scheme returns (0.0, 0.0) by convention; p is meaningless
    when c == 0.  A tabulated scheme with no declared tail raises
    MissingTailError.
    """
    if scheme.kind == "canonical":
        return 0.0, 0.0
    if scheme.kind == "tabulated" and not scheme.has_tail:
        raise MissingTailError(
            "tabulated scheme has no declared asymptotic tail (c, p)"
        )
    return scheme.c, scheme.p


def h_het_exact(m):
    """Heterodyne excess noise from the closed Gamma-function form.

    h(m) = 1 - Gamma(m + 3/2) / sqrt(Gamma(m + 1) Gamma(m + 2)), evaluated
    through log-Gamma so it never overflows.  Accepts scalars or arrays.
    Cancellation in the log-Gamma difference makes this form lose accuracy
    for large m; prefer h_het_series there.
    """
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr < 0):
        raise ValueError("m must be nonnegative")
    out = 1.0 - np.exp(
        gammaln(m_arr + 1.5) - 0.5 * (gammaln(m_arr + 1.0) + gammaln(m_arr + 2.0))
    )
    return out if np.ndim(m) else float(out)


def h_het_series(m, order: int = 12):
    """Asymptotic expansion of the heterodyne excess noise.

    Evaluates sum_k a_k / (m+1)**k up to the requested order (at most 12).
    Intended for m >= 12, where it is more accurate in double precision
    than the closed form.
    """
    if not 1 <= order <= len(HET_SERIES_COEFFS):
        raise ValueError(
            f"order must be between 1 and {len(HET_SERIES_COEFFS)}, got {order}"
        )
    x = 1.0 / (np.asarray(m, dtype=float) + 1.0)
    acc = np.zeros_like(x)
    for a in reversed(HET_SERIES_COEFFS[:order]):
        acc = (acc + a) * x
    return acc if np.ndim(m) else float(acc)


def _h_array(scheme: SchemeModel, m: np.ndarray) -> np.ndarray:
    """Unclamped h evaluation on a nonnegative integer array."""
    out = np.zeros(m.shape, dtype=float)
    if scheme.kind == "canonical":
        return out

    if scheme.kind == "heterodyne":
        small = m < scheme.m_switch
        if np.any(small):
            out[small] = h_het_exact(m[small])
        if np.any(~small):
            out[~small] = h_het_series(m[~small])
        return out

    zero = m == 0
    safe = np.where(zero, 1.0, m).astype(float)

    if scheme.kind == "mark1":
        lead = 0.125 / np.sqrt(safe)
        full = lead + MARK1_TAIL_C2 / safe + MARK1_TAIL_C3 * safe**-1.5
        out = np.where(m >= scheme.m_switch, full, lead)
    elif scheme.kind == "mark2":
        out = 0.0625 * safe**-1.5
    elif scheme.kind == "power_law":
        out = scheme.c * safe ** (-scheme.p)
    elif scheme.kind == "tabulated":
        table = np.asarray(scheme.table, dtype=float)
        inside = m < len(table)
        out = np.empty(m.shape, dtype=float)
        out[inside] = table[m[inside].astype(int)]
        if np.any(~inside):
            if not scheme.has_tail:
                raise MissingTailError(
                    f"h requested at m={int(m[~inside].min())} beyond the "
                    f"table (length {len(table)}) and no tail is declared"
                )
            out[~inside] = scheme.c * safe[~inside] ** (-scheme.p)
        return out  # table rows are validated on load; m=0 comes from the table

    return np.where(zero, 1.0, out)


def h(scheme: SchemeModel, m):
    """Excess noise h(m) for integer m >= 0, clamped to [0, 1].

    Scalar in, scalar out; arrays are evaluated elementwise.  m = 0 maps to
    1 for the divergent power-law forms (total loss of the lowest coherence
    term), and every result is clamped so downstream matrix elements stay
    meaningful probabilities.
    """
    m_arr = np.atleast_1d(np.asarray(m))
    if np.any(m_arr < 0):
        raise ValueError("m must be nonnegative")
    m_int = m_arr.astype(np.int64)
    out = np.clip(_h_array(scheme, m_int), 0.0, 1.0)
    return out if np.ndim(m) else float(out[0])


def h_continuous(scheme: SchemeModel, x):
    """Excess noise evaluated at real-valued argument, clamped to [0, 1].

    Uses each scheme's asymptotic form directly; meant for the continuum
    solver, whose grids live far above any small-m switchover.  x = 0 maps
    to 1 for divergent forms.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0):
        raise ValueError("x must be nonnegative")
    if scheme.kind == "canonical":
        out = np.zeros_like(x_arr)
    elif scheme.kind == "heterodyne":
        out = h_het_series(x_arr)
    else:
        zero = x_arr == 0
        safe = np.where(zero, 1.0, x_arr)
        if scheme.kind == "mark1":
            lead = 0.125 / np.sqrt(safe)
            full = lead + MARK1_TAIL_C2 / safe + MARK1_TAIL_C3 * safe**-1.5
            out = np.where(x_arr >= scheme.m_switch, full, lead)
        else:
            c, p = leading_params(scheme)
            out = c * safe ** (-p)
        out = np.where(zero, 1.0, out)
    out = np.clip(out, 0.0, 1.0)
    return out if np.ndim(x) else float(out[0])


def load_h_table(path, tail: tuple[float, float] | None = None) -> SchemeModel:
    """Load a tabulated scheme from a text file of "m,h" rows.

    Rows must carry consecutive integers m = 0, 1, 2, ... with h in [0, 1];
    '#' starts a comment and blank lines are ignored.  The optional tail
    (c, p) covers m beyond the table.  Malformed input raises
    TableFormatError naming the offending line.
    """
    path = Path(path)
    values: list[float] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [part.strip() for part in line.split(",")]
            if len(parts) != 2:
                raise TableFormatError(
                    f"{path.name}:{lineno}: expected 'm,h', got {raw.strip()!r}"
                )
            try:
                m_val = int(parts[0])
                h_val = float(parts[1])
            except ValueError:
                raise TableFormatError(
                    f"{path.name}:{lineno}: could not parse {raw.strip()!r}"
                ) from None
            if m_val != len(values):
                raise TableFormatError(
                    f"{path.name}:{lineno}: m must increase consecutively "
                    f"from 0, expected {len(values)}, got {m_val}"
                )
            if not 0.0 <= h_val <= 1.0:
                raise TableFormatError(
                    f"{path.name}:{lineno}: h={h_val} outside [0, 1]"
                )
            values.append(h_val)
    if not values:
        raise TableFormatError(f"{path.name}: table is empty")
    c, p = tail if tail is not None else (0.0, 0.0)
    return SchemeModel(
        kind="tabulated",
        c=float(c),
        p=float(p),
        table=tuple(values),
        m_switch=len(values),
    )
