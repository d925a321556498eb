"""Command line front end: ``dmf <solve-scaling|solve-twist|elastica|check>``."""

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import checks, io
from .catalog import get_action, scaling, twist
from .curves import InvariantSeries
from .errors import ConfigError, InvalidInputError, ParameterError
from .smooth import compare_run, converge
from .solvers import BRANCHES, elastica_run

EXIT_OK, EXIT_CONFIG, EXIT_FAILURE = 0, 2, 3

SCALING_HEADER = ["n", "kappa", "eta", "V1", "V2", "V3", "c1", "c2", "c3", "x", "u", "el_res1", "el_res2"]
TWIST_HEADER = ["n", "mu", "kappa", "nu", "u", "v", "c1", "c2", "c3", "el_res1", "el_res2", "div_check"]
RUN_HEADER = ["n", "l", "h_theta", "kappabar", "x", "u", "V1", "V2", "V3", "c1", "c2", "c3", "drift"]
SAMPLE_HEADER = ["s", "x_s", "u_s"]
CONVERGE_HEADER = ["scale", "steps", "relative_error", "drift_max", "first_integral_max_dev"]

REQUIRED = object()


def parse_range(text):
    """``"a..b"`` with integers ``a <= b``; a lone integer means ``a..a``."""
    if isinstance(text, (list, tuple)) and len(text) == 2:
        lo, hi = text
    elif isinstance(text, int) and not isinstance(text, bool):
        lo = hi = text
    else:
        m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", str(text))
        if not m:
            raise ConfigError(f"invalid range {text!r}; expected a..b")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) is not None else lo
    try:
        lo, hi = int(lo), int(hi)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid range {text!r}") from None
    if hi < lo:
        raise ConfigError(f"empty range {lo}..{hi}")
    return lo, hi


def parse_scales(text):
    if isinstance(text, (list, tuple)):
        vals = list(text)
    else:
        vals = [v for v in str(text).split(",") if v.strip()]
    try:
        out = tuple(float(v) for v in vals)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid scales {text!r}") from None
    if not out or any(not (v > 0 and math.isfinite(v)) for v in out):
        raise ConfigError("scales must be positive numbers")
    return out


def _float(v):
    if isinstance(v, bool):
        raise ValueError("boolean where a number is expected")
    out = float(v)
    if not math.isfinite(out):
        raise ValueError("non-finite number")
    return out


def _int(v):
    if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
        raise ValueError("not an integer")
    return int(v)


def _str(v):
    if not isinstance(v, str):
        raise ValueError("not a string")
    return v


# name -> (converter, default, help)
SCALING_OPTS = {
    "k1": (_float, REQUIRED, "nonzero family constant"),
    "k2": (_float, 0.0, None), "k3": (_float, 0.0, None), "k4": (_float, 1.0, None),
    "k5": (_float, 0.0, None), "k6": (_float, 0.0, None),
    "n": (parse_range, REQUIRED, "index range a..b"),
    "tol": (_float, 1e-10, "residual tolerance for the exit code"),
    "out": (_str, None, "CSV path (default: standard output)"),
}
TWIST_OPTS = {
    "k1": (_float, REQUIRED, "family constant, not +1 or -1"),
    "k2": (_float, REQUIRED, "nonzero family constant"),
    "k3": (_float, 0.0, None),
    "c1": (_float, 0.0, None), "c2": (_float, 2.0, None), "c3": (_float, 0.0, None),
    "n": (parse_range, REQUIRED, "index range a..b"),
    "tol": (_float, 1e-10, "residual tolerance for the exit code"),
    "div_a1": (_float, 0.5, "group element for div_check: m = exp(a1)"),
    "div_a2": (_float, 0.25, None), "div_a3": (_float, -0.75, None),
    "out": (_str, None, "CSV path (default: standard output)"),
}
ELASTICA_COMMON = {
    "l_prev": (_float, 0.05, "seed length l_-1"), "h_prev": (_float, 0.02, "seed turning angle h_-1"),
    "l0": (_float, 0.05, "seed length l_0"), "h0": (_float, 0.02, "seed turning angle h_0"),
    "x0": (_float, 0.0, "anchor point x_0"), "u0": (_float, 0.0, "anchor point u_0"),
    "theta0": (_float, 0.0, "direction of the step from point 0"),
    "tol": (_float, 1e-12, "Newton tolerance"), "max_iter": (_int, 50, None),
    "branch": (_str, "shortest", "root selection: " + "|".join(BRANCHES)),
    "out": (_str, None, "CSV path (default: standard output)"),
    "summary": (_str, None, "JSON summary path (default: next to --out)"),
}
ELASTICA_OPTS = {
    "run": dict(ELASTICA_COMMON, steps=(_int, 1000, None)),
    "compare": dict(ELASTICA_COMMON, steps=(_int, 1000, None),
                    smooth_tol=(_float, 1e-10, "RKF45 tolerance"),
                    samples=(_str, None, "smooth samples CSV (default: next to --out)")),
    "converge": dict(ELASTICA_COMMON, steps=(_int, 200, "steps at scale 1; divided by the scale"),
                     smooth_tol=(_float, 1e-10, "RKF45 tolerance"),
                     scales=(parse_scales, (1.0, 0.5, 0.25), "comma separated seed scales")),
}
CHECK_OPTS = {"seed": (_int, None, "random seed (default: $DMF_SEED or 42)")}


def _add_options(parser, table):
    for name, (_, default, help_text) in table.items():
        flag = "--" + name.replace("_", "-")
        extra = "" if default is REQUIRED or default is None else f" (default {default})"
        parser.add_argument(flag, dest=name, default=None, help=(help_text or "") + extra)
    parser.add_argument("--config", default=None, help="JSON file with option values; flags win")


def build_parser():
    parser = argparse.ArgumentParser(prog="dmf", description="Difference moving frames toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_options(sub.add_parser("solve-scaling", help="closed-form extremals of the scaling example"),
                 SCALING_OPTS)
    _add_options(sub.add_parser("solve-twist", help="closed-form extremals of the twist example"), TWIST_OPTS)
    el = sub.add_parser("elastica", help="discrete elastica integrator")
    el_sub = el.add_subparsers(dest="mode", required=True)
    for mode, table in ELASTICA_OPTS.items():
        _add_options(el_sub.add_parser(mode), table)
    chk = sub.add_parser("check", help="randomized property suites")
    chk.add_argument("suite", choices=checks.SUITES + ("all",))
    _add_options(chk, CHECK_OPTS)
    return parser


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def resolve(table, args, config, action=None):
    """Merge defaults, config file and flags (in increasing priority)."""
    config = dict(config)
    if "action" in config:
        if config.pop("action") != action:
            raise ConfigError(f"config action does not match this command ({action})")
    unknown = sorted(set(config) - set(table))
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    out = {}
    for name, (convert, default, _) in table.items():
        raw = getattr(args, name, None)
        if raw is None:
            raw = config.get(name, default)
        if raw is REQUIRED:
            raise ConfigError(f"missing required option --{name.replace('_', '-')}")
        if raw is None:
            out[name] = None
            continue
        try:
            out[name] = convert(raw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {name}: {raw!r} ({exc})") from None
    return out


def _series(action, rows, start):
    act = get_action(action)
    return InvariantSeries(act.name, act.invariant_names, rows, start)


def cmd_solve_scaling(opts):
    params = scaling.ScalingParams(*(opts[k] for k in ("k1", "k2", "k3", "k4", "k5", "k6")))
    lo, hi = opts["n"]
    act = get_action("scaling")
    pad = 4
    recs = {n: scaling.closed_form(params, n) for n in range(lo - pad, hi + pad + 1)}
    inv = _series("scaling", [recs[n].invariants for n in sorted(recs)], lo - pad)
    curve = scaling.closed_form_curve(params, lo, hi + 1)
    rows, worst = [], 0.0
    for n in range(lo, hi + 1):
        rec = recs[n]
        c = rec.V @ act.ad_of_frame(curve, n)
        res = act.el_residual(inv, n)
        worst = max(worst, float(np.max(np.abs(res))))
        rows.append([n, *rec.invariants, *rec.V, *c, *rec.point, *res])
    io.write_csv(opts["out"], SCALING_HEADER, rows)
    return _residual_exit(worst, opts["tol"])


def cmd_solve_twist(opts):
    params = twist.TwistParams(*(opts[k] for k in ("k1", "k2", "k3", "c1", "c2", "c3")))
    lo, hi = opts["n"]
    act = get_action("twist")
    pad = 4
    recs = {n: twist.closed_form(params, n) for n in range(lo - pad, hi + pad + 1)}
    inv = _series("twist", [recs[n].invariants for n in sorted(recs)], lo - pad)
    gaps = twist.gap_curve(params, lo, hi + 3)
    g = (math.exp(opts["div_a1"]), opts["div_a2"], opts["div_a3"])
    rows, worst = [], 0.0
    for n in range(lo, hi + 1):
        rec = recs[n]
        kappa, mu, nu = rec.invariants
        c = twist.explicit_constants(lambda m: recs[m].invariants[1], lambda m: recs[m].gap,
                                     lambda m: recs[m].point[1], n)
        res = act.el_residual(inv, n)
        div = twist.divergence_gap(gaps, g, n)
        worst = max(worst, float(np.max(np.abs(res))), div)
        rows.append([n, mu, kappa, nu, rec.point[0], rec.point[1], *c, *res, div])
    io.write_csv(opts["out"], TWIST_HEADER, rows)
    return _residual_exit(worst, opts["tol"])


def _residual_exit(worst, tol):
    if worst < tol:
        return EXIT_OK
    print(f"dmf: residual {worst:.3e} exceeds tolerance {tol:.1e}", file=sys.stderr)
    return EXIT_FAILURE


def _sibling(out, explicit, suffix):
    if explicit is not None:
        return explicit
    if out is None or out == "-":
        return None
    p = Path(out)
    return str(p.with_name(p.stem + suffix))


def run_rows(run):
    inv, kb = run.invariants, run.kappabar()
    rows = []
    for rec in run.records:
        n = rec.n
        l, h = inv.row(n)
        x, u = run.curve.point(n)
        rows.append([n, l, h, kb[n - inv.start], x, u, *rec.V, *rec.c, rec.drift])
    return rows


def _run_summary(run, opts, seed):
    failure = run.failure
    return {
        "seed": list(seed),
        "steps_requested": opts["steps"],
        "steps_completed": len(run.records) - 1,
        "drift_max": run.drift_max,
        "first_integral_max_dev": run.first_integral_deviation(),
        "failure_index": None if failure is None else failure.n,
        "failure_message": None if failure is None else str(failure),
    }


def _seed(opts):
    return (opts["l_prev"], opts["h_prev"], opts["l0"], opts["h0"])


def _anchor(opts):
    return (opts["x0"], opts["u0"], opts["theta0"])


def _branch(opts):
    if opts["branch"] not in BRANCHES:
        raise ConfigError(f"unknown branch {opts['branch']!r}; choose from {', '.join(BRANCHES)}")
    return opts["branch"]


def _report_failure(run):
    print(f"dmf: elastica step failed at n={run.failure.n}: {run.failure}", file=sys.stderr)


def cmd_elastica(mode, opts):
    if mode == "converge":
        return _cmd_converge(opts)
    branch = _branch(opts)
    if opts["steps"] < 1:
        raise ConfigError("steps must be at least 1")
    run = elastica_run(_seed(opts), _anchor(opts), opts["steps"], opts["tol"], opts["max_iter"], branch)
    io.write_csv(opts["out"], RUN_HEADER, run_rows(run))
    summary = _run_summary(run, opts, _seed(opts))
    summary_path = _sibling(opts["out"], opts["summary"], ".json")
    if mode == "compare" and run.completed:
        cmp = compare_run(run, tol=opts["smooth_tol"])
        traj = cmp.trajectory
        summary.update({
            "relative_error": cmp.report.relative_error,
            "smooth_constants": list(cmp.constants),
            "smooth_first_integral_max_dev": traj.first_integral_deviation(),
            "smooth_arc_length": float(traj.s_max - traj.s[0]),
        })
        samples = np.column_stack([cmp.report.s, cmp.report.smooth])
        samples_path = _sibling(opts["out"], opts["samples"], "_smooth.csv")
        if samples_path is not None:
            io.write_csv(samples_path, SAMPLE_HEADER, samples.tolist())
    elif mode == "compare":
        summary["relative_error"] = None
    if summary_path is not None:
        io.write_json(summary_path, summary)
    if not run.completed:
        _report_failure(run)
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_converge(opts):
    branch = _branch(opts)
    if opts["steps"] < 1:
        raise ConfigError("steps must be at least 1")
    results = converge(_seed(opts), opts["steps"], opts["scales"], _anchor(opts), opts["tol"],
                       opts["smooth_tol"], branch)
    rows, entries, failed = [], [], None
    for scale, run, cmp in results:
        rows.append([scale, len(run.records) - 1, cmp.report.relative_error, run.drift_max,
                     run.first_integral_deviation()])
        entries.append({"scale": scale, "relative_error": cmp.report.relative_error,
                        "failure_index": None if run.completed else run.failure.n})
        if failed is None and not run.completed:
            failed = run
    errors = [e["relative_error"] for e in entries]
    io.write_csv(opts["out"], CONVERGE_HEADER, rows)
    summary = {
        "seed": list(_seed(opts)),
        "runs": entries,
        "strictly_decreasing": all(b < a for a, b in zip(errors, errors[1:])),
        "failure_index": None if failed is None else failed.failure.n,
    }
    summary_path = _sibling(opts["out"], opts["summary"], ".json")
    if summary_path is not None:
        io.write_json(summary_path, summary)
    if failed is not None:
        _report_failure(failed)
        return EXIT_FAILURE
    return EXIT_OK


def default_seed():
    env = os.environ.get("DMF_SEED")
    if env is None or env.strip() == "":
        return checks.DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"DMF_SEED must be an integer, got {env!r}") from None


def cmd_check(suite, opts):
    seed = opts["seed"] if opts["seed"] is not None else default_seed()
    results = checks.run_suite(suite, seed)
    print(f"seed {seed}")
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_FAILURE


def dispatch(args):
    config = load_config(args.config)
    if args.command == "solve-scaling":
        return cmd_solve_scaling(resolve(SCALING_OPTS, args, config, "scaling"))
    if args.command == "solve-twist":
        return cmd_solve_twist(resolve(TWIST_OPTS, args, config, "twist"))
    if args.command == "elastica":
        return cmd_elastica(args.mode, resolve(ELASTICA_OPTS[args.mode], args, config, "elastica"))
    return cmd_check(args.suite, resolve(CHECK_OPTS, args, config))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return dispatch(args)
    except (ConfigError, ParameterError, InvalidInputError, OSError) as exc:
        print(f"dmf: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # every other failure is a solver failure
        print(f"dmf: solver failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE

if __name__ == "__main__":
    sys.exit(main())
