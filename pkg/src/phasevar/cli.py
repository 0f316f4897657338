"""Command-line front end: scheme/method sweeps, CSV and SVG emission.

Subcommands map to the library's main products: `sweep` runs fixed-mean
optimizations across schemes and methods, `truncated` caps the photon
number instead, `squeezed` optimizes the squeezed family, `check` runs the
built-in verification suite, and `compare` emits side-by-side deltas
between two methods.  Output is deterministic: records are ordered by
(scheme, method, grid point) regardless of worker count, floats are
printed at 17 significant digits, and CSV files use LF line endings.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import asymptotics, continuum, number_opt, squeezed
from .errors import ConfigError, MissingTailError, PhaseVarError
from .schemes import SchemeModel, by_name, load_h_table

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "run_sweep",
    "emit_csv",
    "emit_plot",
    "main",
]

CSV_HEADER = "scheme,method,nbar,variance,z,mu,n0,cutoff,tail_mass,notes"
CONTINUUM_NBAR_FLOOR = 1e3
OUT_DIR_ENV = "PHASEVAR_OUT_DIR"

_SWEEP_METHODS = ("exact", "continuum", "squeezed", "asymptotic")
_TRUNCATED_METHODS = ("truncated", "truncated-asymptotic")


@dataclass(frozen=True)
class SweepRecord:
    """One CSV row: a scheme/method evaluation at one grid point."""

    scheme: str
    method: str
    nbar: float
    variance: float | None = None
    z: float | None = None
    mu: float | None = None
    n0: float | None = None
    cutoff: int | None = None
    tail_mass: float | None = None
    notes: str = ""


@dataclass(frozen=True)
class SweepConfig:
    """Everything a sweep needs; flags > config file > these defaults."""

    schemes: tuple[str, ...] = ("heterodyne",)
    methods: tuple[str, ...] = ("exact", "asymptotic")
    nbar_min: float = 10.0
    nbar_max: float = 1e4
    points_per_decade: int = 5
    rel_tol: float = 1e-6
    threads: int = 1
    h_table: str | None = None
    h_table_tail: tuple[float, float] | None = None

    def grid(self) -> tuple[float, ...]:
        if not (0 < self.nbar_min <= self.nbar_max):
            raise ConfigError("require 0 < nbar-min <= nbar-max")
        if self.points_per_decade < 1:
            raise ConfigError("points-per-decade must be at least 1")
        lo = math.log10(self.nbar_min)
        hi = math.log10(self.nbar_max)
        count = int(round((hi - lo) * self.points_per_decade)) + 1
        if count == 1:
            return (self.nbar_min,)
        step = (hi - lo) / (count - 1)
        return tuple(10.0 ** (lo + k * step) for k in range(count))


def _resolve_scheme(name: str, config: SweepConfig) -> SchemeModel:
    if name == "tabulated":
        if config.h_table is None:
            raise ConfigError("scheme 'tabulated' requires --h-table")
        return load_h_table(config.h_table, tail=config.h_table_tail)
    return by_name(name)


def _maybe_z(scheme: SchemeModel, variance: float, nbar: float) -> float | None:
    try:
        return asymptotics.z_param(variance, nbar, scheme)
    except (ValueError, MissingTailError):
        return None


def _evaluate_point(
    scheme_name: str, scheme: SchemeModel, method: str, nbar: float,
    config: SweepConfig,
) -> SweepRecord:
    base = SweepRecord(scheme=scheme_name, method=method, nbar=nbar)
    skip = _skip_reason(scheme, method, nbar)
    if skip is not None:
        return replace(base, notes=f"skipped:{skip}")
    try:
        if method == "exact":
            res = number_opt.optimize_at_nbar(scheme, nbar, rel_tol=config.rel_tol)
            return replace(
                base,
                nbar=res.nbar,
                variance=res.variance,
                z=_maybe_z(scheme, res.variance, res.nbar),
                mu=res.mu,
                cutoff=res.state.n_cut,
                tail_mass=res.state.tail_mass,
            )
        if method == "continuum":
            cres = continuum.solve_continuum_at_nbar(
                scheme, nbar, rel_tol=config.rel_tol
            )
            steps = "|".join(_fmt(s) for s in cres.step_sizes)
            return replace(
                base,
                nbar=cres.nbar,
                variance=cres.variance,
                z=_maybe_z(scheme, cres.variance, cres.nbar),
                mu=cres.mu,
                notes=f"steps={steps}",
            )
        if method == "squeezed":
            sq = squeezed.optimize_squeezed(scheme, nbar)
            return replace(
                base,
                variance=sq.variance,
                z=_maybe_z(scheme, sq.variance, sq.nbar),
                n0=sq.n0,
            )
        if method == "asymptotic":
            value = asymptotics.vmin_general(scheme, nbar)
            return replace(
                base, variance=value, z=_maybe_z(scheme, value, nbar)
            )
        if method == "truncated":
            n_max = max(1, int(round(nbar)))
            value, state = number_opt.optimize_truncated(scheme, n_max)
            return replace(
                base,
                nbar=float(n_max),
                variance=value,
                cutoff=n_max,
                tail_mass=state.tail_mass,
            )
        if method == "truncated-asymptotic":
            n_max = max(1, int(round(nbar)))
            return replace(
                base,
                nbar=float(n_max),
                variance=asymptotics.vmin_truncated_asym(scheme, n_max),
            )
        if method.startswith("reference:"):
            curve = method.split(":", 1)[1]
            value = asymptotics.reference_curves(curve, nbar)
            return replace(
                base, variance=value, z=_maybe_z(scheme, value, nbar)
            )
    except PhaseVarError as exc:
        return replace(base, notes=f"error:{type(exc).__name__}:{_brief(exc)}")
    except ValueError as exc:
        return replace(base, notes=f"error:ValueError:{_brief(exc)}")
    raise ConfigError(f"unknown method {method!r}")


def _skip_reason(scheme: SchemeModel, method: str, nbar: float) -> str | None:
    if method == "continuum" and nbar < CONTINUUM_NBAR_FLOOR:
        return "continuum-below-nbar-1e3"
    if method == "exact":
        if nbar < 0.5:
            return "exact-below-nbar-0.5"
        try:
            estimate = number_opt.initial_cutoff(
                scheme, number_opt.mu_seed(scheme, nbar)
            )
        except MissingTailError:
            return None  # surfaces as a per-point error instead
        if estimate > number_opt.DEFAULT_MAX_CUTOFF:
            return "exact-cutoff-above-max"
    if method == "squeezed" and nbar < 1.0:
        return "squeezed-below-nbar-1"
    return None


def _brief(exc: Exception) -> str:
    text = str(exc).replace(",", ";").replace("\n", " ")
    return text if len(text) <= 120 else text[:117] + "..."


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Evaluate the configured grid, deterministically ordered.

    Points outside a method's validity range are emitted with a
    machine-readable skip code; solver failures are recorded per point and
    the sweep continues.
    """
    schemes_resolved = [
        (name, _resolve_scheme(name, config)) for name in sorted(set(config.schemes))
    ]
    grid = config.grid()
    tasks = [
        (name, model, method, nbar)
        for name, model in schemes_resolved
        for method in sorted(set(config.methods))
        for nbar in grid
    ]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = [
                pool.submit(_evaluate_point, name, model, method, nbar, config)
                for name, model, method, nbar in tasks
            ]
            return [f.result() for f in futures]
    return [
        _evaluate_point(name, model, method, nbar, config)
        for name, model, method, nbar in tasks
    ]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def resolve_out_path(path) -> Path:
    """Apply the output-directory override to relative paths."""
    path = Path(path)
    override = os.environ.get(OUT_DIR_ENV)
    if override and not path.is_absolute():
        return Path(override) / path
    return path


def emit_csv(records: list[SweepRecord], path) -> Path:
    """Write records as CSV: fixed header, 17-digit floats, LF endings."""
    target = resolve_out_path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(
            ",".join(
                (
                    rec.scheme,
                    rec.method,
                    _fmt(rec.nbar),
                    _fmt(rec.variance),
                    _fmt(rec.z),
                    _fmt(rec.mu),
                    _fmt(rec.n0),
                    _fmt(rec.cutoff),
                    _fmt(rec.tail_mass),
                    rec.notes,
                )
            )
        )
    with target.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return target


def emit_plot(records: list[SweepRecord], path, kind: str = "loglog_variance") -> Path:
    """Render records to a standalone SVG figure.

    kind "loglog_variance" plots variance against the grid on log-log
    axes; "z_vs_nbar" plots z on a linear axis with each power-law
    scheme's horizontal asymptote drawn from the formula catalog.  Data
    series carry SVG ids "series-<scheme>-<method>", asymptotes
    "asymptote-<scheme>".
    """
    if kind not in ("loglog_variance", "z_vs_nbar"):
        raise ConfigError(f"unknown plot kind {kind!r}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "phasevar"

    series: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for rec in records:
        y = rec.variance if kind == "loglog_variance" else rec.z
        if y is None:
            continue
        series.setdefault((rec.scheme, rec.method), []).append((rec.nbar, y))
    if not series:
        raise ConfigError("no plottable records for this kind")

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    markers = ("o", "x", "s", "^", "v", "d")
    for idx, key in enumerate(sorted(series)):
        pts = sorted(series[key])
        xs = [q[0] for q in pts]
        ys = [q[1] for q in pts]
        (line,) = ax.plot(
            xs, ys, marker=markers[idx % len(markers)], markersize=4,
            label=f"{key[0]}/{key[1]}",
        )
        line.set_gid(f"series-{key[0]}-{key[1]}")

    ax.set_xscale("log")
    ax.set_xlabel("mean photon number")
    if kind == "loglog_variance":
        ax.set_yscale("log")
        ax.set_ylabel("phase variance (rad$^2$)")
    else:
        ax.set_ylabel("z")
        for scheme_name in sorted({key[0] for key in series}):
            try:
                level = asymptotics.z_asymptote(by_name(scheme_name))
            except ValueError:
                continue
            hline = ax.axhline(level, linestyle="--", linewidth=1.0, color="gray")
            hline.set_gid(f"asymptote-{scheme_name}")
    ax.legend(fontsize=8)
    fig.tight_layout()

    target = resolve_out_path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(target, format="svg", metadata={"Date": None})
    plt.close(fig)
    return target


# ----------------------------- argument plumbing -----------------------------

_FLAG_KEYS = (
    "scheme", "method", "nbar_min", "nbar_max", "points_per_decade", "tol",
    "out", "plot", "plot_kind", "h_table", "h_table_tail", "threads",
)


def _read_config_file(path: str) -> dict[str, str]:
    source = Path(path)
    if not source.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(source.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source.name}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _FLAG_KEYS:
            raise ConfigError(f"{source.name}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _merged(args: argparse.Namespace, key: str, cast, default):
    flag_value = getattr(args, key, None)
    if flag_value is not None:
        return flag_value
    if args.config:
        file_values = _read_config_file(args.config)
        if key in file_values:
            try:
                return cast(file_values[key])
            except ValueError as exc:
                raise ConfigError(f"config key {key}: {exc}") from exc
    return default


def _split_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _parse_tail(text: str) -> tuple[float, float]:
    parts = _split_list(text)
    if len(parts) != 2:
        raise ValueError("expected 'c,p'")
    return float(parts[0]), float(parts[1])


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scheme", help="comma-separated scheme names")
    parser.add_argument("--method", help="comma-separated method names")
    parser.add_argument("--nbar-min", dest="nbar_min", type=float)
    parser.add_argument("--nbar-max", dest="nbar_max", type=float)
    parser.add_argument(
        "--points-per-decade", dest="points_per_decade", type=int
    )
    parser.add_argument("--tol", type=float, help="relative nbar tolerance")
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--plot", help="SVG output path")
    parser.add_argument(
        "--plot-kind", dest="plot_kind",
        choices=("loglog_variance", "z_vs_nbar"),
    )
    parser.add_argument("--h-table", dest="h_table", help="tabulated h file")
    parser.add_argument(
        "--h-table-tail", dest="h_table_tail",
        help="tail 'c,p' for the tabulated scheme",
    )
    parser.add_argument("--threads", type=int)
    parser.add_argument("--config", help="key=value config file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasevar",
        description=(
            "Minimum phase variances of single-mode states under "
            "heterodyne, adaptive, and canonical measurements"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sweep", "fixed-mean optimization sweep across schemes/methods"),
        ("truncated", "photon-number-capped optimization sweep"),
        ("squeezed", "optimized squeezed-state sweep"),
        ("compare", "side-by-side deltas between two methods"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
    check = sub.add_parser("check", help="run the verification suite")
    check.add_argument("--config", help="ignored; accepted for uniformity")
    return parser


_DEFAULT_METHODS = {
    "sweep": ("exact", "asymptotic"),
    "truncated": ("truncated", "truncated-asymptotic"),
    "squeezed": ("squeezed", "asymptotic"),
    "compare": ("exact", "asymptotic"),
}

_ALLOWED_METHODS = {
    "sweep": _SWEEP_METHODS + _TRUNCATED_METHODS,
    "truncated": _TRUNCATED_METHODS,
    "squeezed": ("squeezed", "asymptotic"),
    "compare": _SWEEP_METHODS + _TRUNCATED_METHODS,
}


def _config_from_args(args: argparse.Namespace) -> SweepConfig:
    methods_raw = _merged(
        args, "method", _split_list, _DEFAULT_METHODS[args.command]
    )
    if isinstance(methods_raw, str):
        methods_raw = _split_list(methods_raw)
    allowed = _ALLOWED_METHODS[args.command]
    for method in methods_raw:
        if method not in allowed and not method.startswith("reference:"):
            raise ConfigError(
                f"method {method!r} is not valid for '{args.command}' "
                f"(choose from {allowed} or reference:<name>)"
            )
    schemes_raw = _merged(args, "scheme", _split_list, ("heterodyne",))
    if isinstance(schemes_raw, str):
        schemes_raw = _split_list(schemes_raw)
    tail = _merged(args, "h_table_tail", _parse_tail, None)
    if isinstance(tail, str):
        tail = _parse_tail(tail)
    config = SweepConfig(
        schemes=schemes_raw,
        methods=tuple(methods_raw),
        nbar_min=_merged(args, "nbar_min", float, 10.0),
        nbar_max=_merged(args, "nbar_max", float, 1e4),
        points_per_decade=_merged(args, "points_per_decade", int, 5),
        rel_tol=_merged(args, "tol", float, 1e-6),
        threads=_merged(args, "threads", int, 1),
        h_table=_merged(args, "h_table", str, None),
        h_table_tail=tail,
    )
    if config.threads < 1:
        raise ConfigError("threads must be at least 1")
    if not 0.0 < config.rel_tol <= 0.1:
        raise ConfigError("tol must lie in (0, 0.1]")
    config.grid()  # validates the range eagerly
    return config


def _exit_status(records: list[SweepRecord]) -> int:
    return 1 if any(rec.notes.startswith("error:") for rec in records) else 0


def _run_grid_command(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    records = run_sweep(config)
    out = _merged(args, "out", str, None)
    plot = _merged(args, "plot", str, None)
    if out:
        target = emit_csv(records, out)
        print(f"wrote {len(records)} records to {target}")
    if plot:
        kind = _merged(args, "plot_kind", str, "loglog_variance")
        target = emit_plot(records, plot, kind)
        print(f"wrote plot to {target}")
    if not out and not plot:
        for line in _records_as_lines(records):
            print(line)
    failures = [r for r in records if r.notes.startswith("error:")]
    for rec in failures:
        print(
            f"point failed: {rec.scheme}/{rec.method}@{rec.nbar:g}: {rec.notes}",
            file=sys.stderr,
        )
    return _exit_status(records)


def _records_as_lines(records: list[SweepRecord]) -> list[str]:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(
            ",".join(
                (
                    rec.scheme, rec.method, _fmt(rec.nbar), _fmt(rec.variance),
                    _fmt(rec.z), _fmt(rec.mu), _fmt(rec.n0), _fmt(rec.cutoff),
                    _fmt(rec.tail_mass), rec.notes,
                )
            )
        )
    return lines


def _run_compare(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    if len(config.methods) != 2:
        raise ConfigError("compare needs exactly two methods")
    method_a, method_b = config.methods
    records = run_sweep(config)
    # methods can report slightly different achieved nbar; align on the grid
    grid_records: dict[tuple[str, int], dict[str, SweepRecord]] = {}
    grid = config.grid()
    ordered = sorted(set(config.schemes))
    for rec in records:
        idx = min(range(len(grid)), key=lambda i: abs(grid[i] - rec.nbar))
        grid_records.setdefault((rec.scheme, idx), {})[rec.method] = rec

    lines = [f"scheme,nbar,variance_{method_a},variance_{method_b},rel_delta,notes"]
    worst = 0.0
    failed = False
    for scheme_name in ordered:
        for idx, nbar in enumerate(grid):
            pair = grid_records.get((scheme_name, idx), {})
            rec_a = pair.get(method_a)
            rec_b = pair.get(method_b)
            va = rec_a.variance if rec_a else None
            vb = rec_b.variance if rec_b else None
            notes = ";".join(
                n for n in ((rec_a.notes if rec_a else ""), (rec_b.notes if rec_b else "")) if n
            )
            if va is not None and vb is not None:
                delta = (vb - va) / va
                worst = max(worst, abs(delta))
                lines.append(
                    f"{scheme_name},{_fmt(nbar)},{_fmt(va)},{_fmt(vb)},"
                    f"{_fmt(delta)},{notes}"
                )
            else:
                failed = failed or "error:" in notes
                lines.append(
                    f"{scheme_name},{_fmt(nbar)},{_fmt(va)},{_fmt(vb)},,{notes}"
                )
    out = _merged(args, "out", str, None)
    if out:
        target = resolve_out_path(out)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote comparison to {target}")
    else:
        for line in lines:
            print(line)
    print(f"max |rel delta| between {method_a} and {method_b}: {worst:.3e}")
    return 1 if (failed or _exit_status(records)) else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "check":
            from .checks import run_checks

            results = run_checks()
            for name, ok, detail in results:
                print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
            bad = sum(1 for _, ok, _ in results if not ok)
            print(f"{len(results) - bad}/{len(results)} checks passed")
            return 1 if bad else 0
        if args.command == "compare":
            return _run_compare(args)
        return _run_grid_command(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
