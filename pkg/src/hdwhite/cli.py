"""Command-line entry point: ``hdwhite {test,simulate,study,verify}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from hdwhite.covariance import factor_cov, identity_cov
from hdwhite.exceptions import HDWhiteError
from hdwhite.io import format_series_csv, read_series_csv, report_payload, write_report
from hdwhite.montecarlo import (
    STREAM_COVARIANCE,
    STREAM_DATA,
    ExperimentSpec,
    derive_rep_rng,
    run_study,
)
from hdwhite.simulate import coeff_matrix, gen_null, gen_var1, gen_vma1
from hdwhite.ustat import TestConfig, run_test
from hdwhite.verify import run_verification


def _orders(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"orders must be comma-separated integers, got {text!r}")


def _default_seed() -> int:
    return int(os.environ.get("HDWHITE_SEED", "0"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdwhite", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run the white-noise test on a series CSV")
    t.add_argument("--input", required=True, help="CSV, rows = time points, columns = series")
    t.add_argument("--header", action="store_true", help="skip a single header row")
    t.add_argument("--q", type=int, default=1)
    t.add_argument("--orders", type=_orders, default=(2, 4, 6))
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--demean", action="store_true")
    t.add_argument("--scale", action="store_true")
    t.add_argument("--output", help="write the JSON report here")
    t.add_argument("--threads", type=int)

    s = sub.add_parser("simulate", help="write a simulated series CSV")
    s.add_argument("--model", choices=["null", "var1", "vma1"], required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--T", type=int, required=True)
    s.add_argument("--cov", choices=["identity", "factor"], default="identity")
    s.add_argument("--innov", choices=["gaussian", "gamma"], default="gaussian")
    s.add_argument("--coeff", choices=["dense", "sparse", "identity"])
    s.add_argument("--coeff-value", type=float, help="override the coefficient magnitude")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--header", action="store_true")
    s.add_argument("--output", help="output CSV (default: stdout)")

    st = sub.add_parser("study", help="run a size or power study from a JSON spec")
    st.add_argument("--config", required=True)
    st.add_argument("--output-dir", required=True)
    st.add_argument("--threads", type=int)
    st.add_argument("--quiet", action="store_true")

    sub.add_parser("verify", help="check the dynamic program against enumeration")
    return parser


def _cmd_test(args) -> int:
    start = time.perf_counter()
    cfg = TestConfig(q=args.q, orders=args.orders, alpha=args.alpha,
                     demean=args.demean, scale=args.scale)
    x = read_series_csv(args.input, has_header=args.header)
    report = run_test(x, cfg, threads=args.threads)
    for a, r in report.orders.items():
        if r.ok:
            verdict = "reject" if r.reject else "do not reject"
            print(f"U_q({a}): z = {r.z:.4f}, p = {r.p_value:.4g} -> {verdict} at alpha = {cfg.alpha}")
        else:
            print(f"U_q({a}): failed: {r.error}")
    if report.adaptive_z is not None:
        verdict = "reject" if report.adaptive_reject else "do not reject"
        print(f"adaptive: z = {report.adaptive_z:.4f}, p = {report.adaptive_p:.4g} -> {verdict}")
    if args.output:
        payload = report_payload(report, f"{args.input} (p={report.p}, T={report.T})",
                                 time.perf_counter() - start)
        write_report(payload, args.output)
    return 0


def _cmd_simulate(args, parser) -> int:
    if args.model == "null" and args.coeff is not None:
        parser.error("--coeff is not allowed with --model null")
    if args.model != "null" and args.coeff is None:
        parser.error(f"--model {args.model} requires --coeff")
    if args.coeff_value is not None and args.coeff is None:
        parser.error("--coeff-value requires --coeff")
    seed = _default_seed() if args.seed is None else args.seed
    if args.cov == "identity":
        cov = identity_cov(args.p)
    else:
        cov = factor_cov(args.p, derive_rep_rng(seed, 0, 0, STREAM_COVARIANCE))
    rng = derive_rep_rng(seed, 0, 0, STREAM_DATA)
    innov = "shifted_gamma" if args.innov == "gamma" else "gaussian"
    if args.model == "null":
        x = gen_null(cov, innov, args.T, rng)
    else:
        coeff = coeff_matrix(args.coeff, args.p, args.coeff_value)
        gen = gen_var1 if args.model == "var1" else gen_vma1
        x = gen(cov, coeff, innov, args.T, rng)
    text = format_series_csv(x, header=args.header)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_study(args) -> int:
    spec = ExperimentSpec.from_json(args.config)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    progress = None
    if not args.quiet:
        def progress(cell):
            print(f"cell {cell.cell_id}: p={cell.p} T={cell.T} {cell.status} ({cell.runtime:.1f}s)",
                  file=sys.stderr)
    table = run_study(spec, threads=args.threads, progress=progress)
    (out / "results.csv").write_text(table.to_csv())
    (out / "results.json").write_text(json.dumps(table.to_json_dict(), indent=2) + "\n")
    print(table.format())
    return 0


def _cmd_verify() -> int:
    failures = run_verification()
    bad = 0
    for name, items in failures.items():
        print(f"{name}: {'ok' if not items else f'{len(items)} mismatches'}")
        for item in items[:10]:
            print(f"  {item}")
        bad += len(items)
    return 1 if bad else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "test":
            return _cmd_test(args)
        if args.command == "simulate":
            return _cmd_simulate(args, parser)
        if args.command == "study":
            return _cmd_study(args)
        return _cmd_verify()
    except (HDWhiteError, OSError, ValueError) as exc:
        print(f"hdwhite: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
