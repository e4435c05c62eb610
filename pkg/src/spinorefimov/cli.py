"""Command-line front end.

Subcommands: ``table``, ``potentials``, ``meanfield`` and ``a3b``.  Settings
come from an optional TOML file and are overridden by flags.  Exit codes are
0 for a clean run, 1 for usage errors and 2 when numerical diagnostics or
domain errors were recorded (output files are still written).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .a3b_model import (
    F3B_F1,
    F3B_F2,
    PLACEHOLDER_WARNING,
    S0,
    S0_PRIME,
    ResonanceParams,
    a3b_values,
    exponent_crosscheck,
    resonance_scan,
)
from .errors import DomainError, InvalidArgumentError, SpinorEfimovError
from .hyperangular import TABLE_COLUMNS, channel_overlap, table_one
from .interaction import ScatteringLengths
from .meanfield import (
    alpha_2b,
    alpha_2b_coefficients,
    alpha_3b,
    alpha_3b_coefficients,
    couplings,
    dominance_report,
    format_fraction,
    symmetric_triples,
)
from .outputs import write_csv, write_json, write_manifest
from .potentials import trace_channels
from .reference import compare_cell
from .spin_algebra import SUPPORTED_SPINS

PRESETS = {
    "fig2": {"f": 1, "lengths": [1e2, 1e5], "rmin": 1.0, "rmax": 1e7},
    "fig3": {"f": 2, "lengths": [-8.97, -6.91, -4.73], "rmin": 1.0, "rmax": 1e3},
    "rb87": {"f": 1, "lengths": [1.23, 1.21]},
    "rb85": {"f": 2, "lengths": [-8.97, -6.91, -4.73]},
}
LENGTH_FLAGS = ("a0", "a2", "a4", "a6")


class UsageError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc


def _pick(flag, config: dict, *keys, default=None):
    if flag is not None:
        return flag
    node = config
    for k in keys:
        if not isinstance(node, dict) or k not in node:
            return default
        node = node[k]
    return node


def _spin(args, config: dict, preset: dict) -> int:
    f = _pick(args.f, config, "f", default=preset.get("f"))
    if f is None:
        raise UsageError("--f is required")
    if f not in SUPPORTED_SPINS:
        raise UsageError(f"unsupported spin f={f}; choose one of {SUPPORTED_SPINS}")
    return int(f)


def _lengths(args, config: dict, preset: dict, f: int) -> ScatteringLengths:
    base = list(preset.get("lengths", [])) if preset.get("f") == f else []
    cfg = config.get("lengths", {})
    values = []
    for i, name in enumerate(LENGTH_FLAGS[: f + 1]):
        v = _pick(getattr(args, name, None), cfg, name, default=base[i] if i < len(base) else None)
        if v is None:
            raise UsageError(f"missing scattering length --{name}")
        values.append(float(v))
    for name in LENGTH_FLAGS[f + 1 :]:
        if getattr(args, name, None) is not None:
            raise UsageError(f"--{name} is not a channel of f={f}")
    return ScatteringLengths(tuple(values))


def _jobs(args, config: dict) -> int:
    jobs = _pick(args.jobs, config, "jobs", default=os.cpu_count() or 1)
    if int(jobs) < 1:
        raise UsageError("--jobs must be at least 1")
    return int(jobs)


def _out_dir(args, config: dict) -> Path:
    out = Path(_pick(args.out, config, "output", "dir", default="."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _format(args, config: dict) -> str:
    fmt = _pick(args.format, config, "output", "format", default="csv")
    if fmt not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return fmt


def _parse_signs(text: str | None, f: int) -> dict[int, int] | None:
    if text is None:
        return None
    if len(text) != f + 1 or set(text) - {"+", "-"}:
        raise UsageError(f"--sign-pattern needs {f + 1} characters from '+-' (a0, a2, ...)")
    return {2 * i: (1 if c == "+" else -1) for i, c in enumerate(text)}


def _parse_assignments(items, what: str) -> dict[int, complex | float]:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"{what} entries look like F3b=value, got {item!r}")
        try:
            v = complex(value.replace(" ", ""))
        except ValueError as exc:
            raise UsageError(f"cannot parse {what} value {value!r}") from exc
        out[int(key)] = v.real if v.imag == 0 else v
    return out


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected LO,HI")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _root_text(roots) -> str:
    return "; ".join(r.label(10) for r in roots.roots)


def cmd_table(args, config: dict) -> int:
    f = _spin(args, config, {})
    signs = _parse_signs(_pick(args.sign_pattern, config, "table", "sign_pattern"), f)
    s_max = float(_pick(args.s_max, config, "grid", "s_max", default=5.0))
    out = _out_dir(args, config)
    cells = table_one(f, signs, s_max, jobs=_jobs(args, config))
    diagnostics, records = [], []
    for cell in cells:
        label = cell.region.label
        if cell.roots is None:
            diagnostics.append(f"{label} F3b={cell.F3b}: {cell.diagnostic}")
            records.append([f, label, cell.F3b, "", "", "", "", cell.diagnostic])
            continue
        diagnostics += [f"{label} F3b={cell.F3b}: {d}" for d in cell.roots.diagnostics]
        cmp = compare_cell(f, label, cell.F3b, cell.roots)
        records.append([f, label, cell.F3b, _root_text(cell.roots), cell.roots.summary(10), cmp.printed, cmp.status, cmp.detail])
    header = ["f", "region", "F3b", "roots", "tabulated", "published", "comparison", "detail"]
    grid_header = ["region"] + [f"F3b={F}" for F in TABLE_COLUMNS[f]]
    ncol = len(TABLE_COLUMNS[f])
    grid = [[r[1]] + [rec[4] for rec in records[i * ncol : (i + 1) * ncol]] for i, r in enumerate(records[::ncol])]
    files = []
    if _format(args, config) == "json":
        files.append(write_json(out / f"table_f{f}.json", {"columns": grid_header, "rows": grid,
                                                            "cells": [dict(zip(header, r)) for r in records]}))
    else:
        files.append(write_csv(out / f"table_f{f}.csv", grid_header, grid))
        files.append(write_csv(out / f"table_f{f}_cells.csv", header, records))
    write_manifest(out, "table", {"f": f, "sign_pattern": signs, "s_max": s_max}, files, diagnostics)
    for d in diagnostics:
        print(f"diagnostic: {d}", file=sys.stderr)
    return 2 if diagnostics else 0


def _trace_job(task):
    f, a, F3b, rmin, rmax, ppd, s_max, mass, short = task
    return trace_channels(f, a, F3b, rmin, rmax, ppd, s_max=s_max, mass=mass, allow_short_range=short)


def cmd_potentials(args, config: dict) -> int:
    preset = PRESETS.get(args.preset, {}) if args.preset else {}
    f = _spin(args, config, preset)
    a = _lengths(args, config, preset, f)
    rmin = float(_pick(args.rmin, config, "grid", "rmin", default=preset.get("rmin", 1.0)))
    rmax = float(_pick(args.rmax, config, "grid", "rmax", default=preset.get("rmax", 1e7)))
    ppd = int(_pick(args.ppd, config, "grid", "points_per_decade", default=64))
    s_max = float(_pick(args.s_max, config, "grid", "s_max", default=5.0))
    mass = float(_pick(args.mass, config, "mass", default=1.0))
    short = bool(args.short_range or config.get("grid", {}).get("short_range", False))
    if rmin < 1.0 and not short:
        raise UsageError("--rmin below 1 needs --short-range")
    if not rmax > rmin > 0:
        raise UsageError("need 0 < rmin < rmax")
    out = _out_dir(args, config)
    blocks = [F for F in range(3 * f + 1) if any(a[F2] != 0.0 for F2 in channel_overlap(f, F)[0])]
    tasks = [(f, a, F, rmin, rmax, ppd, s_max, mass, short) for F in blocks]
    jobs = min(_jobs(args, config), len(tasks))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trace_job, tasks))
    else:
        results = [_trace_job(t) for t in tasks]
    files, diagnostics, summary = [], [], []
    for F, curves in zip(blocks, results):
        rows = []
        for c in curves:
            label = c.channel_class.label()
            rows += [[R, U, s, ax, c.channel_id, label] for R, U, s, ax in zip(c.R_grid, c.U, c.s_magnitude, c.s_axis)]
            diagnostics += [f"F3b={F} channel {c.channel_id}: {d}" for d in c.diagnostics]
            summary.append({"F3b": F, "channel_id": c.channel_id, "class": label, "threshold": c.channel_class.threshold,
                            "R_start": float(c.R_grid[0]), "R_end": float(c.R_grid[-1])})
        if _format(args, config) == "json":
            files.append(write_json(out / f"curves_F3b{F}.json", {"columns": ["R", "U", "s_magnitude", "s_axis", "channel_id", "channel_class"], "rows": rows}))
        else:
            files.append(write_csv(out / f"curves_F3b{F}.csv", ["R", "U", "s_magnitude", "s_axis", "channel_id", "channel_class"], rows))
    settings = {"f": f, "lengths": a.as_dict(), "grid": {"rmin": rmin, "rmax": rmax, "points_per_decade": ppd, "s_max": s_max},
                "mass": mass, "preset": args.preset, "channels": summary}
    write_manifest(out, "potentials", settings, files, diagnostics)
    for d in diagnostics:
        print(f"diagnostic: {d}", file=sys.stderr)
    return 2 if diagnostics else 0


def _combination_json(combo: dict, symbol: str) -> dict:
    return {f"{symbol}{F}": format_fraction(w) for F, w in combo.items()}


def _resonance_params(args, config: dict) -> ResonanceParams:
    cfg = config.get("resonance", {})
    a_minus = {int(k): float(v) for k, v in cfg.get("a_minus", {}).items()}
    a_minus.update({k: float(complex(v).real) for k, v in _parse_assignments(getattr(args, "a_minus", None), "--a-minus").items()})
    values = {}
    for name, default in (("alpha", 0.0), ("beta", 1.0), ("gamma", 0.0), ("eta", 0.0)):
        v = _pick(getattr(args, name, None), cfg, name, default=default)
        values[name] = {int(k): float(x) for k, x in v.items()} if isinstance(v, dict) else float(v)
    for name, default in (("s0", S0), ("s0_prime", S0_PRIME)):
        values[name] = float(cfg.get(name, default))
    values["exponents"] = {k: float(v) for k, v in cfg.get("exponents", {}).items()}
    explicit = "alpha" in cfg or getattr(args, "alpha", None) is not None
    try:
        return ResonanceParams(values["alpha"], values["beta"], values["gamma"], a_minus,
                               s0=values["s0"], s0_prime=values["s0_prime"], eta=values["eta"],
                               exponents=values["exponents"], placeholder=not explicit)
    except SpinorEfimovError as exc:
        raise UsageError(str(exc)) from exc


def cmd_meanfield(args, config: dict) -> int:
    preset = PRESETS.get(args.preset, {}) if args.preset else {}
    f = _spin(args, config, preset)
    a = _lengths(args, config, preset, f)
    mass = float(_pick(args.mass, config, "mass", default=1.0))
    density = _pick(args.density, config, "meanfield", "density")
    out = _out_dir(args, config)
    diagnostics, notes = [], []
    a3 = _parse_assignments(args.a3b, "--a3b") or {int(k): v for k, v in config.get("meanfield", {}).get("a3b", {}).items()}
    if args.a3b_from_model:
        if f == 3:
            raise UsageError("no closed-form three-body lengths for f=3")
        params = _resonance_params(args, config)
        try:
            a3 = a3b_values(f, a.values, params)
        except DomainError as exc:
            diagnostics.append(f"three-body model: {exc}")
            a3 = {}
        if any(params.uses_placeholders(F) for F in a3):
            notes.append(PLACEHOLDER_WARNING)
    al2 = alpha_2b(f, a)
    al3 = []
    if a3:
        if set(a3) != set(symmetric_triples(f)):
            raise UsageError(f"--a3b needs exactly F3b in {list(symmetric_triples(f))}")
        al3 = alpha_3b(f, a3)
    g2, g3 = couplings(al2, al3, mass)
    report = {
        "f": f,
        "mass": mass,
        "lengths": {f"a{F}": v for F, v in a.as_dict().items()},
        "alpha2b": [
            {"n": n, "combination": _combination_json(c, "a"), "value": float(v)}
            for n, (c, v) in enumerate(zip(alpha_2b_coefficients(f), al2))
        ],
        "g2b": g2,
        "three_body_channels": list(symmetric_triples(f)),
        "alpha3b_combinations": [{"n": n, "combination": _combination_json(c, "a3b_")} for n, c in enumerate(alpha_3b_coefficients(f))],
    }
    if f == 3:
        report["alpha3b_provenance"] = "derived with the same Vandermonde solve; no published closed form to compare"
        report["published_two_body_labels"] = {"(2)": 1, "(4)": 2, "(6)": 3}
    if a3:
        report["a3b"] = {str(k): v for k, v in a3.items()}
        report["alpha3b"] = [v if isinstance(v, complex) else float(v) for v in al3]
        report["g3b"] = g3
    if density is not None:
        density = float(density)
        if not density > 0:
            raise UsageError("--density must be positive")
        report["dominance"] = dominance_report(density, g2, g3).to_dict()
    report["notes"] = notes
    path = write_json(out / f"meanfield_f{f}.json", report)
    write_manifest(out, "meanfield", {"f": f, "lengths": a.as_dict(), "mass": mass, "density": density}, [path], diagnostics)
    for d in diagnostics:
        print(f"diagnostic: {d}", file=sys.stderr)
    return 2 if diagnostics else 0


def _default_range(names, sweep: str, fixed: dict) -> tuple[float, float]:
    """Span between the neighbouring fixed lengths so the ordering |a0| > |a2| > |a4| holds."""
    i = names.index(sweep)
    larger = abs(fixed[names[i - 1]]) if i > 0 else None
    smaller = abs(fixed[names[i + 1]]) if i + 1 < len(names) else None
    lo = 2.0 * smaller if smaller is not None else larger / 1e3
    hi = larger / 2.0 if larger is not None else 1e4 * smaller
    if not hi > lo:
        raise UsageError("fixed lengths leave no room for the sweep; pass --range")
    return -lo, -hi


def cmd_a3b(args, config: dict) -> int:
    preset = PRESETS.get(args.preset, {}) if args.preset else {}
    f = _spin(args, config, preset)
    if f == 3:
        raise UsageError("closed-form three-body lengths exist only for f=1 and f=2")
    scan_cfg = config.get("scan", {})
    sweep = _pick(args.sweep, scan_cfg, "sweep")
    names = LENGTH_FLAGS[: f + 1]
    if sweep not in names:
        raise UsageError(f"--sweep must be one of {names}")
    defaults = {"a0": -1e4, "a2": -1e2, "a4": -1.0}
    cfg = config.get("lengths", {})
    fixed = {}
    for name in names:
        if name == sweep:
            continue
        v = _pick(getattr(args, name, None), cfg, name, default=preset["lengths"][names.index(name)] if preset.get("f") == f else defaults[name])
        fixed[name] = float(v)
    lo, hi = _pick(args.range, scan_cfg, "range", default=None) or _default_range(names, sweep, fixed)
    points = int(_pick(args.points, scan_cfg, "points", default=200))
    params = _resonance_params(args, config)
    out = _out_dir(args, config)
    try:
        rows = resonance_scan(f, sweep, float(lo), float(hi), fixed, params, points)
    except SpinorEfimovError as exc:
        raise UsageError(str(exc)) from exc
    table = [[r.value, r.F3b, r.a3b.real if r.a3b else "", r.a3b.imag if r.a3b else "", r.status] for r in rows]
    header = [sweep, "F3b", "re_a3b", "im_a3b", "status"]
    name = f"a3b_f{f}_{sweep}"
    if _format(args, config) == "json":
        path = write_json(out / f"{name}.json", {"columns": header, "rows": table})
    else:
        path = write_csv(out / f"{name}.csv", header, table)
    fs = F3B_F1 if f == 1 else F3B_F2
    notes = [PLACEHOLDER_WARNING] if any(params.uses_placeholders(F) for F in fs) else []
    diagnostics = [f"{r.F3b} at {sweep}={r.value:.10g}: {r.status}" for r in rows if r.status.startswith("domain-error")]
    settings = {"f": f, "sweep": sweep, "range": [float(lo), float(hi)], "points": points, "fixed": fixed,
                "eta": params.eta, "a_minus": {str(F): params.resonance(F) for F in fs}, "notes": notes,
                "exponent_crosscheck": exponent_crosscheck()}
    write_manifest(out, "a3b", settings, [path], diagnostics)
    for n in notes:
        print(f"warning: {n}", file=sys.stderr)
    return 2 if diagnostics else 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file with default settings")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--format", choices=["csv", "json"], help="data file format (default csv)")
    p.add_argument("--jobs", type=int, help="worker processes (default: available CPUs)")
    p.add_argument("--f", type=int, help="atomic spin (1, 2 or 3)")


def _add_lengths(p: argparse.ArgumentParser) -> None:
    for name in LENGTH_FLAGS:
        p.add_argument(f"--{name}", type=float, help=f"scattering length {name} in r_vdW")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinorefimov", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="asymptotic root table for one spin")
    _add_common(p)
    p.add_argument("--sign-pattern", help="signs of a0, a2, ... e.g. '--+' (default all negative)")
    p.add_argument("--s-max", type=float, help="root search window (default 5)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("potentials", help="trace U(R) for every F3b block")
    _add_common(p)
    _add_lengths(p)
    p.add_argument("--preset", choices=["fig2", "fig3"])
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--ppd", type=int, help="grid points per decade (default 64)")
    p.add_argument("--s-max", type=float)
    p.add_argument("--mass", type=float, help="atomic mass in units of the reference mass (default 1)")
    p.add_argument("--short-range", action="store_true", help="allow R below 1 r_vdW")
    p.set_defaults(func=cmd_potentials)

    p = sub.add_parser("meanfield", help="two- and three-body expansion coefficients")
    _add_common(p)
    _add_lengths(p)
    p.add_argument("--preset", choices=["rb87", "rb85"])
    p.add_argument("--density", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--a3b", action="append", metavar="F3B=VALUE", help="three-body length (repeatable, complex allowed)")
    p.add_argument("--a3b-from-model", action="store_true", help="evaluate three-body lengths from the resonance formulas")
    _add_resonance(p)
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("a3b", help="scan three-body lengths across one two-body length")
    _add_common(p)
    _add_lengths(p)
    p.add_argument("--preset", choices=["rb87", "rb85"])
    p.add_argument("--sweep", choices=["a0", "a2", "a4"])
    p.add_argument("--range", type=_parse_range, metavar="LO,HI", help="signed sweep bounds, e.g. --range=-1,-1e3")
    p.add_argument("--points", type=int)
    _add_resonance(p)
    p.set_defaults(func=cmd_a3b)
    return parser


def _add_resonance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--a-minus", action="append", metavar="F3B=VALUE", help="resonance position (repeatable)")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except (UsageError, InvalidArgumentError) as exc:
        # invalid settings that only the numerical layer can detect are usage errors too
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
