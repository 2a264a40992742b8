"""Command-line front end: ``sweep``, ``ed-check`` and ``point``.

Exit codes: 0 success, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .spectral import SpectralError
from .sweep import (
    ConfigError,
    SweepConfig,
    compute_rows,
    ed_check,
    format_value,
    header,
    parse_axis,
    run_sweep,
    to_csv,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

# config-file keys -> argparse destinations
_KEYS = {
    "model": "model",
    "preset": "preset",
    "grid": "grid",
    "oracles": "oracles",
    "ed-size": "ed_size",
    "delta": "delta",
    "quad-points": "quad_points",
    "out": "out",
    "workers": "workers",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, ``grid`` may repeat."""
    values: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key == "grid":
            values.setdefault("grid", []).append(value)
        else:
            values[_KEYS[key]] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags take precedence")
    common.add_argument("--model", choices=["two_level", "lmg", "xxz", "bec"])
    common.add_argument("--preset", choices=["fig1", "fig2", "fig3", "fig4"])
    common.add_argument(
        "--grid", action="append", metavar="NAME=MIN:MAX:COUNT",
        help="grid axis; repeat per parameter (NAME=VALUE for a single value)",
    )
    common.add_argument("--oracles", help="comma list from closed,pert,fd,loop")
    common.add_argument("--ed-size", help="ED system size (ed-check: comma list)")
    common.add_argument("--delta", help="finite-difference step in the driving parameter")
    common.add_argument("--quad-points", help="Gauss-Legendre points per axis (xxz)")
    common.add_argument("--workers", help="process pool size for grid evaluation")
    common.add_argument("--out", help="CSV output path")

    parser = _Parser(prog="fidelity-lie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("sweep", parents=[common], help="evaluate a parameter grid and write CSV")
    sub.add_parser("point", parents=[common], help="evaluate a single parameter point")
    sub.add_parser("ed-check", parents=[common], help="finite-N LMG convergence table")
    return parser


def _merged(args: argparse.Namespace) -> dict:
    merged = read_config_file(args.config) if args.config else {}
    for key in _KEYS.values():
        value = getattr(args, key, None)
        if value is None:
            continue
        if key == "grid":
            # CLI axes override file axes of the same name
            merged["grid"] = list(merged.get("grid", [])) + list(value)
        else:
            merged[key] = value
    return merged


def _to_int(name, value):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None


def _to_float(name, value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    m = _merged(args)
    grid = dict(parse_axis(text) for text in m.get("grid", []))
    overrides = {
        "grid": grid,
        "output_path": m.get("out"),
        "oracles": tuple(o.strip() for o in m["oracles"].split(",") if o.strip()) if "oracles" in m else None,
        "ed_size": _to_int("ed-size", m["ed_size"]) if "ed_size" in m else None,
        "delta": _to_float("delta", m["delta"]) if "delta" in m else None,
        "quad_points": _to_int("quad-points", m["quad_points"]) if "quad_points" in m else None,
        "workers": _to_int("workers", m["workers"]) if "workers" in m else None,
    }
    if m.get("preset"):
        preset = m["preset"]
        if m.get("model") and m["model"] != "lmg":
            raise ConfigError(f"preset {preset} is an lmg sweep, not {m['model']}")
        return SweepConfig.from_preset(preset, **overrides)
    kwargs = {k: v for k, v in overrides.items() if v is not None}
    if m.get("model"):
        kwargs["model"] = m["model"]
    return SweepConfig(**kwargs)


def _print_summary(summary: dict, out=None) -> None:
    out = out or sys.stdout
    print("# summary", file=out)
    for key, value in summary.items():
        if isinstance(value, float):
            value = f"{value:.6e}"
        print(f"{key:>22s}: {value}", file=out)


def _cmd_sweep(args) -> int:
    config = config_from_args(args)
    rows, summary = run_sweep(config)
    if not config.output_path:
        sys.stdout.write(to_csv(config, rows))
    else:
        summary["output"] = config.output_path
    _print_summary(summary)
    return EXIT_OK


def _cmd_point(args) -> int:
    config = config_from_args(args)
    if any(len(v) != 1 for v in config.grid.values()):
        raise ConfigError("point needs single-valued axes, e.g. --grid h=2")
    if config.output_path:
        rows, _ = run_sweep(config)
    else:
        rows = compute_rows(config)
    row = rows[0]
    for col in header(config):
        if col in row:
            print(f"{col:>12s} = {format_value(row[col])}")
    return EXIT_OK


def _cmd_ed_check(args) -> int:
    m = _merged(args)
    if m.get("model", "lmg") != "lmg":
        raise ConfigError("ed-check runs on the lmg model only")
    sizes = [_to_int("ed-size", s) for s in str(m.get("ed_size", "128,256,512,1024")).split(",")]
    grid = dict(parse_axis(text) for text in m.get("grid", []))
    h = grid.get("h", (2.0,))
    gamma = grid.get("gamma", (0.5,))
    if len(h) != 1 or len(gamma) != 1:
        raise ConfigError("ed-check needs single values, e.g. --grid h=2 --grid gamma=0.5")
    rows, closed, converged = ed_check(sizes, h[0], gamma[0])
    print(f"# lmg ed-check  h={h[0]:g}  gamma={gamma[0]:g}  chi_closed={closed:.17g}")
    print(f"{'N':>6s} {'chi_pert':>24s} {'abs_error':>12s} {'rel_error':>12s}")
    for r in rows:
        rel = r.abs_error / closed if closed > 0 else float("nan")
        print(f"{r.N:6d} {r.chi_pert:24.17g} {r.abs_error:12.4e} {rel:12.4e}")
    if m.get("out"):
        with open(m["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write("N,chi_pert,abs_error\n")
            for r in rows:
                fh.write(f"{r.N},{format_value(r.chi_pert)},{format_value(r.abs_error)}\n")
    if not converged:
        print("error column is not non-increasing in N", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


COMMANDS = {"sweep": _cmd_sweep, "point": _cmd_point, "ed-check": _cmd_ed_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SpectralError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
