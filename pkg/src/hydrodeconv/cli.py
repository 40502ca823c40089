"""Command-line interface: scenario simulation, estimation, sweeps, and
benchmark reproduction.

Subcommands
-----------
simulate   write a synthetic scenario (x.csv, y.csv, k_true.csv, scenario.json)
estimate   constrained deconvolution at a fixed lambda or with a strategy
xcorr      cross-correlation baseline estimate
sweep      per-lambda metric table plus strategy selections
bench      Monte-Carlo benchmark across noise levels and series lengths

Every output directory receives a manifest.json describing the run.  A
JSON config file (--config) may supply any option; explicit flags win.
The environment variable HYDRODECONV_OUT sets the default output root.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

from ._validation import NumericalError
from .baseline import xcorr_estimate
from .bench import ALL_METHODS, BenchSpec, run_bench
from .io import (
    fmt17,
    read_json,
    read_series_csv,
    read_kernel_csv,
    write_json,
    write_kernel_csv,
    write_manifest,
    write_series_csv,
)
from .select import (
    STRATEGIES,
    corr_coeff,
    check_grid,
    default_lambda_grid,
    lambda_grid,
    mean_residence_time,
    select_lambda,
    snr_db,
    sweep,
)
from .solver import SolverConfig, run_am
from .synth import KernelSpec, MultifractalParams, make_scenario

OUT_ROOT_ENV = "HYDRODECONV_OUT"

_STRATEGY_ALIASES = {"corr": "corrCoeff"}


def _canon_strategy(name):
    return _STRATEGY_ALIASES.get(name, name)


def _parse_grid(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--grid expects 'min,max,count'")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    return lambda_grid(lo, hi, count)


def _parse_floats(text):
    return tuple(float(p) for p in text.split(",") if p)


def _parse_ints(text):
    return tuple(int(p) for p in text.split(",") if p)


def _parse_snr(text):
    return float("inf") if str(text).lower() in ("inf", "+inf", "infinity") else float(text)


def _default_out(command, out):
    if out:
        return out
    root = os.environ.get(OUT_ROOT_ENV, ".")
    return os.path.join(root, f"hydrodeconv-{command}")


def _jsonable(value):
    # JSON summaries encode non-finite floats as strings
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _write_summary(path, summary):
    write_json(path, {k: _jsonable(v) for k, v in summary.items()})


def _merge_config(args, parser):
    """Fill unset options from the JSON config file, if one was given."""
    if not getattr(args, "config", None):
        return args
    config = read_json(args.config)
    for key, value in config.items():
        if not hasattr(args, key):
            raise ValueError(f"{args.config}: unknown config key {key!r}")
        if getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _resolve(args, **defaults):
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _safe_tau(kernel):
    try:
        return mean_residence_time(kernel)
    except ValueError:
        return None


def _safe_corr(a, b):
    try:
        return corr_coeff(a, b)
    except ValueError:
        return None


def cmd_simulate(args):
    args = _resolve(
        args,
        length=1024,
        support=500,
        c=100.0,
        snr_db="inf",
        seed=0,
        mf_h=-0.1,
        mf_c1=0.4,
        mf_alpha=0.7,
    )
    out = _default_out("simulate", args.out)
    os.makedirs(out, exist_ok=True)
    params = MultifractalParams(H=args.mf_h, C1=args.mf_c1, alpha_levy=args.mf_alpha)
    amplitude = args.amplitude if args.amplitude is not None else float(args.support)
    kspec = KernelSpec(support_length=args.support, amplitude=amplitude)
    snr = _parse_snr(args.snr_db)
    scenario = make_scenario(args.length, kspec, args.c, snr, args.seed, params=params)

    write_series_csv(os.path.join(out, "x.csv"), scenario.x)
    write_series_csv(os.path.join(out, "y.csv"), scenario.y_noisy)
    write_kernel_csv(os.path.join(out, "k_true.csv"), scenario.k_true)
    _write_summary(
        os.path.join(out, "scenario.json"),
        {
            "c_true": scenario.c_true,
            "noise_variance": scenario.noise_variance,
            "input_snr_db": scenario.input_snr_db,
            "seed": scenario.seed,
            "length": int(args.length),
            "params": {"H": params.H, "C1": params.C1, "alpha_levy": params.alpha_levy},
            "kernel": {
                "support_length": kspec.support_length,
                "beta_a": kspec.beta_a,
                "beta_b": kspec.beta_b,
                "amplitude": kspec.amplitude,
            },
        },
    )
    write_manifest(
        out,
        "simulate",
        seed=args.seed,
        overrides={
            "length": args.length,
            "support": args.support,
            "c": args.c,
            "snr_db": str(args.snr_db),
            "amplitude": amplitude,
            "mf_h": params.H,
            "mf_c1": params.C1,
            "mf_alpha": params.alpha_levy,
        },
    )
    print(f"[simulate] wrote scenario to {out}")
    return 0


def _load_xy(args):
    x = read_series_csv(args.input_x)
    y = read_series_csv(args.input_y)
    if x.size != y.size:
        raise ValueError(
            f"input series lengths differ: {args.input_x} has {x.size}, "
            f"{args.input_y} has {y.size}"
        )
    return x, y


def cmd_estimate(args):
    out = _default_out("estimate", args.out)
    os.makedirs(out, exist_ok=True)
    x, y = _load_xy(args)
    k_true = read_kernel_csv(args.k_true) if args.k_true else None
    K = args.kernel_length
    grid = args.grid if args.grid is not None else default_lambda_grid()

    if args.lam is None and args.strategy is None:
        raise ValueError("provide either --lambda or --strategy")
    if args.lam is not None and args.strategy is not None:
        raise ValueError("--lambda and --strategy are mutually exclusive")

    start = time.perf_counter()
    if args.lam is not None:
        result = run_am(x, y, K, SolverConfig(lam=args.lam))
        chosen = args.lam
    else:
        strategy = _canon_strategy(args.strategy)
        if strategy == "oracle" and k_true is None:
            raise ValueError("strategy 'oracle' requires --k-true")
        if strategy == "discrepancy" and args.noise_variance is None:
            raise ValueError("strategy 'discrepancy' requires --noise-variance")
        report = sweep(
            x, y, K, grid,
            ground_truth=k_true,
            noise_variance=args.noise_variance,
        )
        selection = select_lambda(report, strategy, noise_variance=args.noise_variance)
        result = selection.chosen_result
        chosen = selection.chosen_lambda
    runtime = time.perf_counter() - start

    write_kernel_csv(os.path.join(out, "k_est.csv"), result.k_est)
    write_series_csv(os.path.join(out, "y_rec.csv"), result.y_rec)
    summary = {
        "c_est": result.c_est,
        "chosen_lambda": chosen,
        "y_rec_snr_db": snr_db(y, result.y_rec),
        "corr_coeff": _safe_corr(y, result.y_rec),
        "tau": _safe_tau(result.k_est),
        "converged": result.converged,
        "iterations": result.outer_iterations,
        "runtime_seconds": runtime,
    }
    if k_true is not None:
        summary["k_snr_db"] = snr_db(k_true, result.k_est)
    _write_summary(os.path.join(out, "summary.json"), summary)
    write_manifest(
        out,
        "estimate",
        inputs={"x": args.input_x, "y": args.input_y, "k_true": args.k_true},
        overrides={
            "kernel_length": K,
            "lambda": args.lam,
            "strategy": args.strategy,
            "noise_variance": args.noise_variance,
        },
    )
    print(f"[estimate] lambda={chosen:g} c_est={result.c_est:g} -> {out}")
    return 0


def cmd_xcorr(args):
    out = _default_out("xcorr", args.out)
    os.makedirs(out, exist_ok=True)
    x, y = _load_xy(args)
    k_true = read_kernel_csv(args.k_true) if args.k_true else None

    start = time.perf_counter()
    result = xcorr_estimate(
        x, y, args.kernel_length,
        demean=not args.no_demean,
        normalization=args.normalization,
    )
    runtime = time.perf_counter() - start

    write_kernel_csv(os.path.join(out, "k_est.csv"), result.k_est)
    write_series_csv(os.path.join(out, "y_rec.csv"), result.y_rec)
    summary = {
        "c_est": result.c_est,
        "chosen_lambda": None,
        "y_rec_snr_db": snr_db(y, result.y_rec),
        "corr_coeff": _safe_corr(y, result.y_rec),
        "tau": _safe_tau(result.k_est),
        "converged": True,
        "iterations": 0,
        "runtime_seconds": runtime,
    }
    if k_true is not None:
        summary["k_snr_db"] = snr_db(k_true, result.k_est)
    _write_summary(os.path.join(out, "summary.json"), summary)
    write_manifest(
        out,
        "xcorr",
        inputs={"x": args.input_x, "y": args.input_y, "k_true": args.k_true},
        overrides={
            "kernel_length": args.kernel_length,
            "demean": not args.no_demean,
            "normalization": args.normalization,
        },
    )
    print(f"[xcorr] c_est={result.c_est:g} -> {out}")
    return 0


def cmd_sweep(args):
    out = _default_out("sweep", args.out)
    os.makedirs(out, exist_ok=True)
    x, y = _load_xy(args)
    k_true = read_kernel_csv(args.k_true) if args.k_true else None
    grid = args.grid if args.grid is not None else default_lambda_grid()

    report = sweep(
        x, y, args.kernel_length, grid,
        ground_truth=k_true,
        noise_variance=args.noise_variance,
    )
    with open(os.path.join(out, "sweep.csv"), "w", encoding="utf-8") as fh:
        fh.write(
            "lambda,y_rec_snr_db,corr_coeff,residual_variance,k_snr_db,"
            "converged,iterations,failed\n"
        )
        for e in report.entries:
            k_snr = fmt17(e.k_snr_db) if e.k_snr_db is not None else "nan"
            conv = int(e.result.converged) if e.result else 0
            iters = e.result.outer_iterations if e.result else 0
            fh.write(
                f"{fmt17(e.lam)},{fmt17(e.y_rec_snr_db)},{fmt17(e.y_corr_coeff)},"
                f"{fmt17(e.residual_variance)},{k_snr},{conv},{iters},{int(e.failed)}\n"
            )

    selections = {}
    for strategy in STRATEGIES:
        if strategy == "oracle" and k_true is None:
            continue
        if strategy == "discrepancy" and args.noise_variance is None:
            continue
        sel = select_lambda(report, strategy, noise_variance=args.noise_variance)
        selections[strategy] = {
            "chosen_lambda": sel.chosen_lambda,
            "criterion_value": _jsonable(sel.criterion_value),
        }
    write_json(os.path.join(out, "selections.json"), selections)
    write_manifest(
        out,
        "sweep",
        inputs={"x": args.input_x, "y": args.input_y, "k_true": args.k_true},
        overrides={
            "kernel_length": args.kernel_length,
            "noise_variance": args.noise_variance,
        },
    )
    print(f"[sweep] {len(report.entries)} lambdas -> {out}")
    return 0


def cmd_bench(args):
    args = _resolve(
        args,
        levels=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0),
        trials=30,
        lengths=(1000, 5000),
        support=500,
        seed=0,
        c=100.0,
        methods=",".join(ALL_METHODS),
    )
    out = _default_out("bench", args.out)
    methods = tuple(
        _canon_strategy(m.strip()) for m in str(args.methods).split(",") if m.strip()
    )
    if args.grid is not None and not hasattr(args.grid, "dtype"):
        args.grid = check_grid(args.grid)  # grid supplied via config file
    spec = BenchSpec(
        input_snr_levels_db=tuple(args.levels),
        trials_per_level=args.trials,
        series_lengths=tuple(args.lengths),
        kernel_support=args.support,
        grid=args.grid,
        methods=methods,
        c_true=args.c,
        kernel_amplitude=args.amplitude,
    )
    info = run_bench(spec, out, base_seed=args.seed)
    write_manifest(
        out,
        "bench",
        seed=args.seed,
        overrides={
            "levels": list(args.levels),
            "trials": args.trials,
            "lengths": list(args.lengths),
            "support": args.support,
            "c": args.c,
            "amplitude": args.amplitude,
            "methods": list(methods),
        },
    )
    frac = info["failure_fraction"]
    print(
        f"[bench] {info['rows_total']} rows, {info['rows_failed']} failed "
        f"({100 * frac:.1f}%) -> {out}"
    )
    return 0 if frac <= 0.10 else 1


def _add_io_args(p, need_inputs=True):
    if need_inputs:
        p.add_argument("--input-x", required=True, help="rainfall CSV (t,value)")
        p.add_argument("--input-y", required=True, help="output-level CSV (t,value)")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--config", default=None, help="JSON config file mirroring the flags")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hydrodeconv",
        description="Water residence time estimation by constrained deconvolution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic scenario")
    p.add_argument("--length", type=int, default=None, help="series length T (default 1024)")
    p.add_argument("--support", type=int, default=None, help="kernel causal support (default 500)")
    p.add_argument("--c", type=float, default=None, help="true base level (default 100)")
    p.add_argument("--snr-db", default=None, help="input SNR in dB, or 'inf' (default inf)")
    p.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    p.add_argument("--amplitude", type=float, default=None,
                   help="kernel mass (default: support, i.e. raw Beta-density scale)")
    p.add_argument("--mf-h", type=float, default=None, help="multifractal H (default -0.1)")
    p.add_argument("--mf-c1", type=float, default=None, help="multifractal C1 (default 0.4)")
    p.add_argument("--mf-alpha", type=float, default=None, help="multifractal alpha (default 0.7)")
    _add_io_args(p, need_inputs=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="constrained deconvolution")
    p.add_argument("--kernel-length", type=int, required=True, help="even kernel length K")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="fixed smoothness weight (else use --strategy)")
    p.add_argument("--strategy", choices=("oracle", "discrepancy", "fidelity", "corr"),
                   default=None, help="automatic lambda selection strategy")
    p.add_argument("--grid", type=_parse_grid, default=None,
                   help="lambda grid as 'min,max,count' (default 1e-5,1e12,20)")
    p.add_argument("--k-true", default=None, help="ground-truth kernel CSV (oracle / k SNR)")
    p.add_argument("--noise-variance", type=float, default=None,
                   help="noise variance for the discrepancy strategy")
    _add_io_args(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("xcorr", help="cross-correlation baseline")
    p.add_argument("--kernel-length", type=int, required=True)
    p.add_argument("--k-true", default=None)
    p.add_argument("--no-demean", action="store_true", help="skip mean removal")
    p.add_argument("--normalization", choices=("biased", "unbiased"), default="biased")
    _add_io_args(p)
    p.set_defaults(func=cmd_xcorr)

    p = sub.add_parser("sweep", help="lambda sweep with per-lambda metrics")
    p.add_argument("--kernel-length", type=int, required=True)
    p.add_argument("--grid", type=_parse_grid, default=None)
    p.add_argument("--k-true", default=None)
    p.add_argument("--noise-variance", type=float, default=None)
    _add_io_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="Monte-Carlo benchmark")
    p.add_argument("--levels", type=_parse_floats, default=None,
                   help="comma-separated input SNR levels in dB")
    p.add_argument("--trials", type=int, default=None, help="trials per level (default 30)")
    p.add_argument("--lengths", type=_parse_ints, default=None,
                   help="comma-separated series lengths (default 1000,5000)")
    p.add_argument("--support", type=int, default=None, help="kernel support (default 500)")
    p.add_argument("--grid", type=_parse_grid, default=None)
    p.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    p.add_argument("--c", type=float, default=None, help="true base level (default 100)")
    p.add_argument("--amplitude", type=float, default=None,
                   help="kernel mass (default: support)")
    p.add_argument("--methods", default=None,
                   help="comma-separated subset of oracle,discrepancy,fidelity,corr,xcorr")
    _add_io_args(p, need_inputs=False)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args, parser)
        return args.func(args)
    except (ValueError, NumericalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
