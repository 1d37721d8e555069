"""Command-line entry point: ``asbarron <command> [--config FILE] [--key value ...]``.

Every command reads its parameters from built-in defaults, then an optional
JSON config file, then command-line flags (later sources win). Unknown
config keys are rejected. CSV output uses ``\\n`` line endings and the
shortest round-trip representation of floats.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
import csv
from dataclasses import dataclass
import json
import math
import os
import sys

import numpy as np

from ._errors import AsBarronError, InputError
from .activations import highpass_relu
from .bounds import bound_sweep, norm_curve
from .construction import SHIPPED_MEASURES, construct, shipped_measure
from .experiments.fitting import TrainConfig
from .experiments.hermite import HermiteTarget
from .experiments.network import estimate_ab_norm
from .experiments.scatter import SCATTER_FIELDS, default_windows, scatter_targets, theorem_scatter
from .infrared import random_unit_wave
from .measures import load_measure

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2


@dataclass(frozen=True)
class Param:
    key: str
    kind: str  # int, float, str, floats, ints, optfloats, bool
    default: object
    help: str


def _parse_scalar(kind, text):
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "bool":
        if text.lower() in ("1", "true", "yes"):
            return True
        if text.lower() in ("0", "false", "no"):
            return False
        raise ValueError(text)
    return text


def _from_flag(param, text):
    """Parse a command-line string; lists are comma separated, ``none`` means null."""
    try:
        if param.kind in ("floats", "ints", "optfloats"):
            items = [t.strip() for t in text.split(",") if t.strip()]
            if param.kind == "optfloats":
                return [None if t.lower() in ("none", "null") else float(t) for t in items]
            return [_parse_scalar(param.kind[:-1], t) for t in items]
        return _parse_scalar(param.kind, text)
    except ValueError:
        raise InputError(f"--{param.key.replace('_', '-')}: cannot parse {text!r} as {param.kind}") from None


def _number(value, integral):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False
    return float(value).is_integer() if integral else math.isfinite(value)


def _from_json(param, value):
    """Validate a config-file value against the parameter kind."""
    ok = {
        "int": lambda v: _number(v, True),
        "float": lambda v: _number(v, False),
        "bool": lambda v: isinstance(v, bool),
        "str": lambda v: isinstance(v, str),
        "ints": lambda v: isinstance(v, list) and all(_number(x, True) for x in v),
        "floats": lambda v: isinstance(v, list) and all(_number(x, False) for x in v),
        "optfloats": lambda v: isinstance(v, list) and all(x is None or _number(x, False) for x in v),
    }[param.kind](value)
    if not ok:
        raise InputError(f"config key {param.key!r}: expected {param.kind}, got {value!r}")
    if param.kind == "int":
        return int(value)
    if param.kind == "ints":
        return [int(x) for x in value]
    return value


TRAIN_PARAMS = (
    Param("epsilon", "float", 0.01, "allowed squared residual in the norm estimator"),
    Param("lam", "float", 1e-3, "weight of the Barron-norm penalty"),
    Param("steps", "int", 3000, "SGD steps per training run"),
    Param("batch", "int", 256, "Monte Carlo batch size per SGD step"),
    Param("lr", "float", 0.02, "peak learning rate (cosine decay)"),
    Param("seed", "int", 0, "random seed"),
    Param("restarts", "int", 2, "independent runs; the best is kept"),
    Param("width", "int", 16, "hidden width of the anti-symmetric network"),
    Param("fit_steps", "int", 400, "optimiser iterations per Slater-fit rung"),
)
_TRAIN_KEYS = {p.key for p in TRAIN_PARAMS}

COMMANDS = {
    "fig1": (
        "high-pass ReLU curves: CSV y,gamma,highpass_relu",
        (
            Param("y_min", "float", -10.0, "left end of the y grid"),
            Param("y_max", "float", 10.0, "right end of the y grid"),
            Param("points", "int", 2001, "grid points per curve"),
            Param("gammas", "floats", [0.25, 0.5, 1.0, 2.0], "cutoffs, comma separated"),
            Param("output", "str", "-", "output CSV path, - for stdout"),
        ),
    ),
    "fig2": (
        "squared norm of a_{theta w} along a ray: CSV theta,norm_sq",
        (
            Param("n", "int", 20, "particles"),
            Param("d", "int", 3, "spatial dimension"),
            Param("seed", "int", 0, "seed for the random direction w"),
            Param("theta_min", "float", 0.0, "first theta"),
            Param("theta_max", "float", 12.0, "last theta"),
            Param("points", "int", 121, "number of theta values"),
            Param("output", "str", "-", "output CSV path, - for stdout"),
        ),
    ),
    "construct": (
        "Maurey construction from a measure file and its distance to the target",
        (
            Param("measure", "str", "three_atom_n3d1", f"measure JSON path or a shipped name {SHIPPED_MEASURES}"),
            Param("m", "int", 64, "number of Slater determinants"),
            Param("seed", "int", 0, "sampling seed"),
            Param("samples", "int", 65536, "Monte Carlo samples for the error"),
            Param("slater_output", "str", "", "optional JSON path for the Slater sum"),
            Param("output", "str", "-", "report CSV path, - for stdout"),
        ),
    ),
    "bounds": (
        "determinant-bound sweep: CSV n,d,p,w_inf,log_det,log_bound,margin,error",
        (
            Param("ns", "ints", [20, 30, 40], "particle counts"),
            Param("ds", "ints", [1, 2], "dimensions"),
            Param("w_infs", "optfloats", [0.05, 0.1, 0.2, None], "|w|_inf values; none means gamma/2"),
            Param("output", "str", "-", "output CSV path, - for stdout"),
        ),
    ),
    "scatter": (
        "norm estimate vs Slater-fit error over windowed targets",
        (
            Param("n", "int", 4, "particles"),
            Param("d", "int", 1, "spatial dimension"),
            Param("m", "int", 64, "Slater determinants in the fit"),
            Param("centers", "floats", [-0.5, 0.0, 0.5], "window centres"),
            Param("halfwidths", "floats", [1.5, 2.25, 3.0], "window half-widths"),
            *TRAIN_PARAMS,
            Param("output", "str", "-", "output CSV path, - for stdout"),
        ),
    ),
    "norm": (
        "estimate the epsilon-smooth anti-symmetric Barron norm of one target",
        (
            Param("target", "str", "hermite", "hermite (oscillator ground state) or zero"),
            Param("n", "int", 3, "particles"),
            Param("d", "int", 1, "spatial dimension"),
            Param("window_center", "floats", [], "optional window centre (one value or d values)"),
            Param("window_halfwidth", "float", 0.0, "window half-width; 0 means no window"),
            *TRAIN_PARAMS,
            Param("log", "str", "", "optional CSV path for step,loss,penalty1,penalty2"),
            Param("output", "str", "-", "output CSV path, - for stdout"),
        ),
    ),
    "selftest": (
        "run the acceptance checks and print a pass/fail table",
        (Param("criteria", "ints", list(range(1, 11)), "criterion numbers to run"),),
    ),
}


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


@contextmanager
def _open_output(path):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def write_csv(path, header, rows):
    with _open_output(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _train_config(cfg):
    return TrainConfig(**{k: cfg[k] for k in _TRAIN_KEYS})


def _positive(cfg, *keys):
    for key in keys:
        if not cfg[key] > 0:
            raise InputError(f"{key} must be positive, got {cfg[key]!r}")


def cmd_fig1(cfg, pool_map):
    _positive(cfg, "points")
    if not cfg["gammas"] or any(not g > 0 for g in cfg["gammas"]):
        raise InputError("gammas must be a non-empty list of positive numbers")
    y = np.linspace(cfg["y_min"], cfg["y_max"], cfg["points"])
    rows = []
    for g in cfg["gammas"]:
        vals = highpass_relu(y, g)
        rows.extend(zip(y, [float(g)] * len(y), vals))
    write_csv(cfg["output"], ("y", "gamma", "highpass_relu"), rows)


def cmd_fig2(cfg, pool_map):
    _positive(cfg, "n", "d", "points")
    w = random_unit_wave(cfg["n"], cfg["d"], cfg["seed"])
    curve = norm_curve(w, np.linspace(cfg["theta_min"], cfg["theta_max"], cfg["points"]))
    write_csv(cfg["output"], ("theta", "norm_sq"), zip(curve.theta, curve.norm_sq))


def _slater_sum_to_dict(S):
    return {
        "n": S.n,
        "d": S.d,
        "terms": [
            {"re": float(c.real), "im": float(c.imag), "w": [float(v) for v in w.reshape(-1)]}
            for c, w in zip(S.coefficients, S.waves)
        ],
    }


def cmd_construct(cfg, pool_map):
    _positive(cfg, "m", "samples")
    src = cfg["measure"]
    rho = shipped_measure(src) if src in SHIPPED_MEASURES else load_measure(src, allow_empty=False)
    approx, rep = construct(rho, cfg["m"], seed=cfg["seed"], n_samples=cfg["samples"])
    if cfg["slater_output"]:
        with open(cfg["slater_output"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(_slater_sum_to_dict(approx), indent=2) + "\n")
    header = (
        "m", "gamma", "error", "std_error", "phi", "total_variation",
        "sampling_bound", "truncation_bound", "rhs", "slack",
    )
    row = (rep.m, rep.gamma, rep.error, rep.std_error, rep.phi, rep.total_variation,
           rep.sampling_bound, rep.truncation_bound, rep.rhs, rep.slack)
    write_csv(cfg["output"], header, [row])


def cmd_bounds(cfg, pool_map):
    if not (cfg["ns"] and cfg["ds"] and cfg["w_infs"]):
        raise InputError("ns, ds and w_infs must be non-empty")
    if any(n < 1 for n in cfg["ns"]) or any(d < 1 for d in cfg["ds"]):
        raise InputError("ns and ds must be positive")
    rows = bound_sweep(cfg["ns"], cfg["ds"], cfg["w_infs"], mapper=pool_map)
    header = ("n", "d", "p", "w_inf", "log_det", "log_bound", "margin", "error")
    write_csv(cfg["output"], header, [(r.n, r.d, r.p, r.w_inf, r.log_det, r.log_bound, r.margin, r.error) for r in rows])


def cmd_scatter(cfg, pool_map):
    _positive(cfg, "n", "d", "m")
    if not (cfg["centers"] and cfg["halfwidths"]):
        raise InputError("centers and halfwidths must be non-empty")
    train = _train_config(cfg)
    targets = scatter_targets(cfg["n"], cfg["d"], default_windows(cfg["centers"], cfg["halfwidths"]))
    rows = theorem_scatter(targets, cfg["m"], train, mapper=pool_map)
    write_csv(cfg["output"], SCATTER_FIELDS, [r.as_tuple() for r in rows])


def cmd_norm(cfg, pool_map):
    _positive(cfg, "n", "d")
    train = _train_config(cfg)
    n, d = cfg["n"], cfg["d"]
    if cfg["target"] == "zero":
        target = lambda xs: np.zeros(len(xs))  # noqa: E731
    elif cfg["target"] == "hermite":
        window = None
        if cfg["window_halfwidth"] != 0:
            center = cfg["window_center"] or [0.0]
            window = (center, cfg["window_halfwidth"])
        target = HermiteTarget.ground_state(n, d, window=window)
    else:
        raise InputError(f"target must be 'hermite' or 'zero', got {cfg['target']!r}")
    est = estimate_ab_norm(target, train.width, train, n=n, d=d)
    if cfg["log"]:
        write_csv(cfg["log"], ("step", "loss", "penalty1", "penalty2"), est.log)
    header = ("ab_norm_estimate", "residual", "residual_se", "converged", "converged_at")
    write_csv(cfg["output"], header, [(est.estimate, est.residual, est.residual_se, est.converged, est.converged_at)])


def cmd_selftest(cfg, pool_map):
    from .acceptance import CRITERIA, run_acceptance

    bad = [k for k in cfg["criteria"] if not 1 <= k <= len(CRITERIA)]
    if bad:
        raise InputError(f"unknown criteria {bad}; valid numbers are 1..{len(CRITERIA)}")
    results = run_acceptance(cfg["criteria"])
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_NUMERICAL


HANDLERS = {
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "construct": cmd_construct,
    "bounds": cmd_bounds,
    "scatter": cmd_scatter,
    "norm": cmd_norm,
    "selftest": cmd_selftest,
}


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors: exit code 1 rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="asbarron", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (summary, params) in COMMANDS.items():
        p = sub.add_parser(name, help=summary, description=summary)
        p.add_argument("--config", help="JSON file with any of the keys below; flags override it")
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: logical cores)")
        for param in params:
            default = param.default if param.default not in ("", []) else "empty"
            p.add_argument(
                "--" + param.key.replace("_", "-"),
                dest=param.key,
                default=None,
                metavar=param.kind.upper(),
                help=f"{param.help} (config key {param.key!r}, default {default})",
            )
    return parser


def resolve_config(command, args):
    """Merge defaults, the config file and flags into one validated dict."""
    params = {p.key: p for p in COMMANDS[command][1]}
    cfg = {k: p.default for k, p in params.items()}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise InputError("config file must hold a JSON object")
        unknown = sorted(set(doc) - set(params))
        if unknown:
            raise InputError(f"unknown config keys for {command}: {', '.join(unknown)}")
        for key, value in doc.items():
            cfg[key] = _from_json(params[key], value)
    for key, param in params.items():
        text = getattr(args, key)
        if text is not None:
            cfg[key] = _from_flag(param, text)
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    try:
        if threads < 1:
            raise InputError("--threads must be at least 1")
        cfg = resolve_config(args.command, args)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            code = HANDLERS[args.command](cfg, pool.map)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AsBarronError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
