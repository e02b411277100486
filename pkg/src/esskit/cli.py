"""``esskit`` command-line interface.

Exit status is 0 on success, 2 on usage errors (argparse) and 1 on domain
errors, which print one ``error: <ErrorClass>: message`` line to stderr.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import harness
from .errors import EssError, InvalidParameter
from .metrics import EssMethod, evaluate
from .model_select import (
    Direction,
    effective_components,
    env_index,
    read_curve_csv,
    round_half_away,
)
from .properties import DEFAULT_M_VALUES, classify
from .simplex import read_weights_csv


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.10g}"


def _header(seed, config: str) -> str:
    return f"# seed={seed}, version={__version__}, config={config}"


def _method(spec: str) -> EssMethod:
    try:
        return EssMethod.parse(spec)
    except EssError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _write_rows(out, header: Optional[str], columns, rows) -> None:
    if header:
        out.write(header + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)


def _cmd_compute(args) -> None:
    w = read_weights_csv(args.weights)
    rows = []
    for m in args.method:
        v = evaluate(m, w)
        rows.append([str(m), _fmt(v.value), _fmt(v.rate)])
    _write_rows(sys.stdout, None, ["method", "ess", "rate"], rows)


def _cmd_property_check(args) -> None:
    _, report = classify(args.method, args.n, args.trials, args.seed, args.m)
    print(_header(args.seed, f"method={args.method};n={args.n};trials={args.trials}"))
    print(report.to_table())
    if args.csv:
        rows = report.csv_rows()
        with open(args.csv, "w", newline="") as fh:
            fh.write(_header(args.seed, f"method={args.method};n={args.n}") + "\n")
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)


def _sweep_config(args, vary: harness.Vary) -> harness.SweepConfig:
    kv = harness.read_config_mapping(args.config) if args.config else {}
    if args.grid_step is not None:
        kv.pop("grid", None)
    flags = {
        "grid_step": args.grid_step,
        "n_samples": args.n_samples,
        "replications": args.replications,
        "seed": args.seed,
        "beta_start": args.beta_start,
        "beta_stop": args.beta_stop,
        "beta_step": args.beta_step,
    }
    kv.update({k: str(v) for k, v in flags.items() if v is not None})
    if args.no_inf:
        kv["include_inf"] = "false"
    if args.mse:
        kv["centered"] = "false"
    return harness.config_from_mapping(kv, vary)


def _cmd_sweep(args) -> None:
    vary = harness.Vary(args.vary)
    config = _sweep_config(args, vary)
    result = harness.sweep(config, vary, threads=args.threads)
    harness.write_sweep_csv(result, args.out, config.describe())
    if args.summary:
        fit = harness.fit_linear_combo(result)
        beta_star = harness.optimal_beta(result)
        harness.write_summary_csv(
            args.summary, beta_star, fit, config.seed, f"vary={vary.value};{config.describe()}"
        )
    print(_header(config.seed, f"vary={vary.value};{config.describe()}"))
    _write_rows(
        sys.stdout,
        None,
        ["param", "ess_teo_rate", "ess_teo_se"],
        [
            [_fmt(p), _fmt(t), _fmt(s)]
            for p, t, s in zip(result.params, result.ess_teo_rate, result.ess_teo_se)
        ],
    )


def _cmd_optimal_beta(args) -> None:
    result = harness.read_sweep_csv(args.sweep)
    print(_fmt(harness.optimal_beta(result)))


def _cmd_fit_combo(args) -> None:
    fit = harness.fit_linear_combo(harness.read_sweep_csv(args.sweep))
    _write_rows(
        sys.stdout,
        None,
        ["a1", "a2", "residual_l2"],
        [[_fmt(fit.a1), _fmt(fit.a2), _fmt(fit.residual_l2)]],
    )


def _cmd_collision(args) -> None:
    w = read_weights_csv(args.weights)
    trials = harness.simulate_collision_trials(w, args.r, args.seed)
    mean = float(trials.mean())
    se = float(trials.std(ddof=1)) / math.sqrt(trials.size) if trials.size > 1 else math.nan
    closed = 1.0 / float(np.dot(w.entries, w.entries))
    z = (mean - closed) / se if se > 0 else math.nan
    print(_header(args.seed, f"r={args.r};n={w.n}"))
    _write_rows(
        sys.stdout,
        None,
        ["mean_trials", "se", "closed_form", "z"],
        [[_fmt(mean), _fmt(se), _fmt(closed), _fmt(z)]],
    )


def _cmd_model_select(args) -> None:
    curve = read_curve_csv(args.curve, Direction(args.direction))
    rows = []
    if curve.direction is Direction.NON_INCREASING:
        for m in args.method:
            ec = effective_components(curve, m)
            rows.append([str(m), _fmt(ec.raw), str(ec.rounded)])
    elif args.method:
        raise InvalidParameter("ESS methods need a non-increasing curve; use env only")
    env = env_index(curve)
    rows.append(["env-index", _fmt(env), str(round_half_away(env))])
    print(f"# shift={_fmt(curve.shift)}, n={curve.n}")
    _write_rows(sys.stdout, None, ["method", "raw", "rounded"], rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esskit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"esskit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="ESS of a weight vector under several methods")
    p.add_argument("--weights", required=True)
    p.add_argument("--method", type=_method, action="append", required=True)
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("property-check", help="empirical C1-C5 checks and class")
    p.add_argument("--method", type=_method, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=2000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--m", type=_positive_int, nargs="+", default=list(DEFAULT_M_VALUES))
    p.add_argument("--csv", help="also write the report as CSV")
    p.set_defaults(func=_cmd_property_check)

    for name, vary in (("sweep-mean", "mean"), ("sweep-sigma", "sigma")):
        p = sub.add_parser(name, help=f"Gaussian IS sweep over the proposal {vary}")
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--out", required=True, help="sweep CSV")
        p.add_argument("--summary", help="write beta*, a1, a2 here")
        p.add_argument("--seed", type=_seed)
        p.add_argument("--n-samples", type=_positive_int)
        p.add_argument("--replications", type=_positive_int)
        p.add_argument("--grid-step", type=float)
        p.add_argument("--beta-start", type=float)
        p.add_argument("--beta-stop", type=float)
        p.add_argument("--beta-step", type=float)
        p.add_argument("--no-inf", action="store_true", help="drop beta=inf")
        p.add_argument("--mse", action="store_true", help="MSE instead of variance")
        p.add_argument("--threads", type=int, help="0 = ESSKIT_THREADS or all cores")
        p.set_defaults(func=_cmd_sweep, vary=vary)

    p = sub.add_parser("optimal-beta", help="beta* from a sweep CSV")
    p.add_argument("--sweep", required=True)
    p.set_defaults(func=_cmd_optimal_beta)

    p = sub.add_parser("fit-combo", help="a1, a2 from a sweep CSV")
    p.add_argument("--sweep", required=True)
    p.set_defaults(func=_cmd_fit_combo)

    p = sub.add_parser("collision-oracle", help="mean trials until a repeated draw")
    p.add_argument("--weights", required=True)
    p.add_argument("--r", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=_cmd_collision)

    p = sub.add_parser("model-select", help="effective components from an error curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--method", type=_method, action="append", default=[])
    p.add_argument(
        "--direction",
        choices=[d.value for d in Direction],
        default=Direction.NON_INCREASING.value,
    )
    p.set_defaults(func=_cmd_model_select)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except EssError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
