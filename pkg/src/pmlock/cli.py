"""Command-line front end: emits CSV/JSON tables for external plotting.

Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure
(oracle not settled, non-finite value, failed verification).
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import DomainError
from .lineshapes import SeriesTruncation, canonical_model, first_harmonic, make_params
from .lockin import DemodulationSettings, center_slope, error_signal, slope_at_center
from .optimize import maximize_slope, stationarity_report, sweep_omega
from .oracle import OdeSettings
from .verify import (DEFAULT_GAMMA_G_RATIO, DEFAULT_THRESHOLD, PERTURBATIVE_SCALE,
                     run_suite)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
_NOT_ECHOED = {"config", "out", "command", "func"}


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- parsing helpers -----------------------------------------------------

def parse_grid(text):
    """``start:stop:points[:log|lin]`` -> array (log spacing by default)."""
    parts = str(text).split(":")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError(f"grid must be start:stop:points[:log|lin], got {text!r}")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    kind = parts[3] if len(parts) == 4 else "log"
    if n < 1 or kind not in ("log", "lin"):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    if kind == "log":
        if start <= 0 or stop <= 0:
            raise argparse.ArgumentTypeError("log grid bounds must be > 0")
        return np.geomspace(start, stop, n)
    return np.linspace(start, stop, n)


def _grid_arg(text):
    parse_grid(text)  # validate now, keep the text for the config echo
    return str(text)


def _range_arg(text):
    try:
        lo, hi = (float(v) for v in str(text).split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be lo:hi, got {text!r}")
    if not (0 <= lo < hi):
        raise argparse.ArgumentTypeError(f"range must satisfy 0 <= lo < hi, got {text!r}")
    return str(text)


def load_config(path):
    """Read ``key=value`` lines, a JSON object, or the config echoed into a previous output."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        if "metadata" in data:
            data = data["metadata"]["config"]
        return {k.replace("-", "_"): v for k, v in data.items()}
    cfg = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("# config:"):
            return {k.replace("-", "_"): v for k, v in json.loads(line[len("# config:"):]).items()}
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


# --- output --------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def render(command, config, columns, rows, fmt):
    meta = {"program": "pmlock", "version": __version__, "command": command, "config": config}
    if fmt == "json":
        doc = {"metadata": meta, "columns": list(columns),
               "rows": [[_jsonable(v) for v in r] for r in rows]}
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    lines = [f"# pmlock {__version__}", f"# command: {command}",
             "# config: " + json.dumps(config, sort_keys=True), ",".join(columns)]
    lines += [",".join(_fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _check_finite(rows):
    for r in rows:
        for v in r:
            if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                raise NumericalFailure("non-finite value in output")


def _echo(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def _truncation(args):
    if args.kmax is None:
        return SeriesTruncation()
    return SeriesTruncation(int(args.kmax), "fixed")


def _scale(args):
    model = canonical_model(args.model)
    return 1.0 if model == "cpt" else float(args.scale)


# --- subcommands ---------------------------------------------------------

def cmd_slope(args):
    model = canonical_model(args.model)
    t = _truncation(args)
    scale = _scale(args)
    if args.delta_grid:
        d = DemodulationSettings(float(args.alpha) if args.alpha is not None else 0.0)
        rows = []
        for delta in parse_grid(args.delta_grid):
            r = first_harmonic(make_params(model, float(delta), args.omega_m, args.m, scale), t)
            rows.append((float(delta), r.in_phase, r.quadrature, error_signal(r, d)))
        return ["delta", "in_phase", "quadrature", "error_signal"], rows
    p = make_params(model, 0.0, args.omega_m, args.m, scale)
    best = center_slope(p, t)
    alpha = best.alpha_opt if args.alpha is None else float(args.alpha)
    slope = abs(slope_at_center(p, DemodulationSettings(alpha), t))
    at_delta = error_signal(first_harmonic(make_params(model, args.delta, args.omega_m, args.m, scale), t),
                            DemodulationSettings(alpha))
    row = (model, args.omega_m, args.m, scale, alpha, slope, best.components[0], best.components[1],
           best.alpha_opt, best.slope, args.delta, at_delta)
    cols = ["model", "omega_m_bar", "m", "scale", "alpha", "slope", "slope_in_phase",
            "slope_quadrature", "alpha_opt", "slope_max", "delta", "error_signal"]
    return cols, [row]


def _m_range(args):
    if args.m_range is None:
        return None
    return tuple(float(v) for v in args.m_range.split(":"))


def cmd_optimize(args):
    model = canonical_model(args.model)
    p = maximize_slope(model, args.omega_m, _truncation(args), _m_range(args), _scale(args))
    cols = ["omega_m_bar", "m_opt", "alpha_opt", "alpha_over_pi", "slope_max"]
    return cols, [(p.omega_m_bar, p.m_opt, p.alpha_opt, p.alpha_opt / math.pi, p.slope_max)]


def _table_rows(tab):
    return [(r.omega_m_bar, r.slope_max / tab.normalization, r.slope_max, r.m_opt, r.alpha_opt / math.pi)
            for r in tab.rows]


def cmd_sweep(args):
    model = canonical_model(args.model)
    tab = sweep_omega(model, parse_grid(args.omega_grid), _truncation(args), _m_range(args), _scale(args))
    return ["omega_m_bar", "slope_norm", "slope_max", "m_opt", "alpha_over_pi"], _table_rows(tab)


def cmd_stationarity(args):
    model = canonical_model(args.model)
    rows = stationarity_report(model, parse_grid(args.omega_grid), _truncation(args), _scale(args),
                               form=args.form)
    return (["omega_m_bar", "m_opt", "deviation", "slope"],
            [(r.omega_m_bar, r.m_opt, r.deviation, r.slope) for r in rows])


FIGURE2_FILES = ("figure2a", "figure2b")


def figure2_tables(omegas, t=SeriesTruncation()):
    """(slope curves for CPT and two-level, CPT index/phase curves)."""
    cpt = sweep_omega("cpt", omegas, t)
    tl = sweep_omega("two-level", omegas, t)
    cols = ["omega_m_bar", "slope_norm", "m_opt", "alpha_over_pi"]
    a_rows = [("cpt",) + (r.omega_m_bar, r.slope_max / cpt.normalization, r.m_opt, r.alpha_opt / math.pi)
              for r in cpt.rows]
    a_rows += [("two-level",) + (r.omega_m_bar, r.slope_max / tl.normalization, r.m_opt, r.alpha_opt / math.pi)
               for r in tl.rows]
    b_rows = [(r.omega_m_bar, r.slope_max / cpt.normalization, r.m_opt, r.alpha_opt / math.pi)
              for r in cpt.rows]
    return (["model"] + cols, a_rows), (cols, b_rows)


def cmd_figure2(args):
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    tables = figure2_tables(parse_grid(args.omega_grid), _truncation(args))
    ext = "json" if args.format == "json" else "csv"
    config = _echo(args)
    for name, (cols, rows) in zip(FIGURE2_FILES, tables):
        _check_finite(rows)
        _write(render("figure2", config, cols, rows, args.format), os.path.join(out_dir, f"{name}.{ext}"))
    return None


def cmd_verify(args):
    settings = OdeSettings(rel_tol=args.rel_tol)
    models = [canonical_model(args.model)] if args.model else None
    rows = run_suite(scale=args.scale, threshold=args.threshold, settings=settings,
                     gamma_g_ratio=args.gamma_g_ratio, models=models)
    cols = ["model", "detuning", "omega_m_bar", "m", "scale", "spectral_in_phase", "spectral_quadrature",
            "oracle_in_phase", "oracle_quadrature", "rel_error", "status", "reason"]
    table = [(r.model, r.detuning, r.omega_m_bar, r.m, r.scale, r.spectral_in_phase, r.spectral_quadrature,
              r.oracle_in_phase, r.oracle_quadrature, r.rel_error, "pass" if r.passed else "fail",
              r.reason or "-") for r in rows]
    return cols, table, all(r.passed for r in rows)


# --- parser --------------------------------------------------------------

def _common(p, model_default="cpt", model_required=False):
    p.add_argument("--config", help="key=value file, JSON, or a previous output file")
    p.add_argument("--model", default=model_default, type=canonical_model_arg,
                   help="cpt | two-level | dr")
    p.add_argument("--kmax", type=int, default=None,
                   help="fixed sideband truncation |k| <= KMAX (default adaptive)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def canonical_model_arg(text):
    try:
        return canonical_model(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser():
    parser = _Parser(prog="pmlock", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pmlock {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("slope", help="error-signal slope at line center (or a detuning sweep)")
    _common(p)
    p.add_argument("--omega-m", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=None, help="detection phase; default optimal")
    p.add_argument("--delta", type=float, default=0.0, help="detuning for the error_signal column")
    p.add_argument("--delta-grid", type=_grid_arg, default=None,
                   help="emit the error signal over start:stop:points:lin instead")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_slope)

    p = sub.add_parser("optimize", help="best m and alpha at one modulation frequency")
    _common(p)
    p.add_argument("--omega-m", type=float, default=1.0)
    p.add_argument("--m-range", type=_range_arg, default=None)
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="optimum vs modulation frequency")
    _common(p)
    p.add_argument("--omega-grid", type=_grid_arg, default="0.05:10:200:log")
    p.add_argument("--m-range", type=_range_arg, default=None)
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure2", help="slope, index and phase curves (two files in --out DIR)")
    _common(p)
    p.add_argument("--omega-grid", type=_grid_arg, default="0.01:100:161:log")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("stationarity", help="optimal deviation m*w in the slow-modulation regime")
    _common(p)
    p.add_argument("--omega-grid", type=_grid_arg, default="0.01:0.1:5:log")
    p.add_argument("--form", choices=("series", "low_freq"), default="series")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_stationarity)

    p = sub.add_parser("verify", help="series vs time-domain oracle suite")
    _common(p, model_default=None)
    p.add_argument("--scale", type=float, default=PERTURBATIVE_SCALE,
                   help="S and s_rf used for the two-level and DR points")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--gamma-g-ratio", type=float, default=DEFAULT_GAMMA_G_RATIO)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_verify)
    return parser, sub


def parse_args(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = load_config(args.config)
        sp = sub.choices[args.command]
        known = {a.dest for a in sp._actions}
        unknown = sorted(set(cfg) - known - _NOT_ECHOED)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        sp.set_defaults(**{k: v for k, v in cfg.items() if k in known and k not in _NOT_ECHOED})
        args = parser.parse_args(argv)
    return args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except SystemExit as e:  # argparse: --help, --version, usage errors
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except UsageError as e:
        print(f"pmlock: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as e:
        print(f"pmlock: error: cannot read config: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = args.func(args)
        if result is None:
            return EXIT_OK
        ok = True
        if len(result) == 3:
            cols, rows, ok = result
        else:
            cols, rows = result
        if args.command != "verify":
            _check_finite(rows)
        _write(render(args.command, _echo(args), cols, rows, args.format), args.out)
        if not ok:
            print("pmlock: verification failed", file=sys.stderr)
            return EXIT_NUMERIC
        return EXIT_OK
    except (DomainError, argparse.ArgumentTypeError) as e:
        print(f"pmlock: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, FloatingPointError, RuntimeError) as e:
        print(f"pmlock: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
