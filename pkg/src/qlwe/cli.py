"""Command-line front end: single attacks, parameter sweeps, classical
baselines, and the invariant verification suite.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 resource cap.
Identical flags and seed reproduce identical output apart from wall-time
fields. Probabilities are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import experiments, verify
from .attacks import ra_iid_success_bound
from .experiments import ExperimentSpec
from .qsim import ResourceCapError

SWEEP_COLUMNS = ("q", "n", "b", "scheme", "trials", "rate", "wilson_lo",
                 "wilson_hi", "analytic", "quantum_queries",
                 "classical_queries", "seed")


def _sig12(x: float | None):
    return None if x is None else float(f"{x:.12g}")


def _sig12_str(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def _parse_q_values(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec_from_args(args, attack: str, q: int, trials: int) -> ExperimentSpec:
    return ExperimentSpec(
        attack=attack, q=q, n=args.n, trials=trials, seed=args.seed,
        b=args.b, bits=args.bits, nbar=args.nbar, mbar=args.mbar, eta=args.eta,
        workers=args.workers,
    )


def _sweep_row(result: experiments.ExperimentResult) -> dict:
    spec = result.spec
    b = experiments.effective_block_size(spec)
    return {
        "q": spec.q,
        "n": spec.n,
        "b": "" if b is None else b,
        "scheme": spec.attack,
        "trials": spec.trials,
        "rate": _sig12_str(result.rate),
        "wilson_lo": _sig12_str(result.wilson_lo),
        "wilson_hi": _sig12_str(result.wilson_hi),
        "analytic": _sig12_str(result.analytic),
        "quantum_queries": result.quantum_queries_per_trial,
        "classical_queries": result.classical_queries_max,
        "seed": spec.seed,
    }


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_attack(args) -> int:
    spec = _spec_from_args(args, args.scheme, args.q, trials=1)
    start = time.perf_counter()
    counts, detail = experiments.run_trial_detailed(spec, 0)
    elapsed = time.perf_counter() - start
    report = {
        "attack": spec.attack,
        "q": spec.q,
        "n": spec.n,
        "seed": spec.seed,
        "success": counts.successes == counts.attempts and counts.attempts > 0,
        "quantum_queries": counts.quantum_queries,
        "classical_queries": counts.classical_queries,
        "analytic_success": _sig12(experiments.analytic_probability(spec)),
        "wall_time_s": elapsed,
    }
    report.update(detail)
    if spec.attack == "ra-iid":
        report["bound"] = _sig12(ra_iid_success_bound(spec.q, max(experiments._eta(spec), 1)))
    if args.format == "csv":
        result = experiments.success_rate_experiment(spec)
        text = _rows_to_csv([_sweep_row(result)])
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    _write_output(text, args.out)
    return 0


def cmd_sweep(args) -> int:
    q_values = _parse_q_values(args.q)
    if not q_values:
        print("error: empty sweep grid", file=sys.stderr)
        return 2
    rows = []
    for q in q_values:
        result = experiments.success_rate_experiment(
            _spec_from_args(args, args.scheme, q, args.trials))
        rows.append(_sweep_row(result))
    if args.format == "json":
        text = json.dumps(rows, sort_keys=True, indent=2) + "\n"
    else:
        text = _rows_to_csv(rows)
    _write_output(text, args.out)
    return 0


def cmd_baseline(args) -> int:
    attack = {"dec": "classical-dec", "ra": "classical-ra"}[args.scheme]
    spec = _spec_from_args(args, attack, args.q, args.trials)
    result = experiments.success_rate_experiment(spec)
    if args.format == "csv":
        text = _rows_to_csv([_sweep_row(result)])
    else:
        import math
        bound = (spec.n if attack == "classical-ra"
                 else spec.n * (math.ceil(math.log2(spec.q)) + 2))
        report = {
            "baseline": args.scheme,
            "q": spec.q,
            "n": spec.n,
            "trials": spec.trials,
            "seed": spec.seed,
            "rate": _sig12(result.rate),
            "max_queries": result.classical_queries_max,
            "query_bound": bound,
            "wall_time_s": result.wall_time_s,
        }
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    _write_output(text, args.out)
    return 0


def cmd_verify(args) -> int:
    return verify.run_all()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlwe",
        description="Single-quantum-query key-recovery attacks on "
                    "noisy-inner-product encryption, simulated exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, schemes, trials_default=None):
        p.add_argument("--scheme", required=True, choices=schemes)
        p.add_argument("--q", required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--b", type=int, default=None,
                       help="block size for the synthetic rounded oracle")
        p.add_argument("--bits", type=int, default=2, help="encoding bits (matrix scheme)")
        p.add_argument("--nbar", type=int, default=2)
        p.add_argument("--mbar", type=int, default=2)
        p.add_argument("--eta", type=int, default=None, help="noise magnitude")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default=None)
        if trials_default is not None:
            p.add_argument("--trials", type=int, default=trials_default)

    quantum = ("lrf", "ske", "pke", "frodo", "ringlwe", "ra-shared", "ra-iid")

    p_attack = sub.add_parser("attack", help="run one attack end-to-end")
    common(p_attack, quantum)
    p_attack.set_defaults(fn=cmd_attack, format_default="json")

    p_sweep = sub.add_parser("sweep", help="success-rate sweep over q (CSV)")
    common(p_sweep, quantum + ("classical-dec", "classical-ra"), trials_default=100)
    p_sweep.set_defaults(fn=cmd_sweep, format_default="csv")

    p_base = sub.add_parser("baseline", help="classical key-recovery baselines")
    common(p_base, ("dec", "ra"), trials_default=100)
    p_base.set_defaults(fn=cmd_baseline, format_default="json")

    p_verify = sub.add_parser("verify", help="run the invariant suites")
    p_verify.set_defaults(fn=cmd_verify, format_default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None:
        args.format = getattr(args, "format_default", None)
    if hasattr(args, "q") and isinstance(args.q, str):
        if args.command == "attack" or args.command == "baseline":
            try:
                args.q = int(args.q)
            except ValueError:
                parser.error(f"--q must be an integer, got {args.q!r}")
    try:
        return args.fn(args)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
