"""Command-line surface.

Subcommands: boundary, region, sweep, simulate, analyze qbd, verify.
Exit codes: 0 success, 1 usage error, 2 verification failure, 3 degenerate
or unstable parameter rejection.  All output is deterministic given the same
flags and seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import qbd, reports, simulate, verify
from .errors import DegenerateParameterError, UnstableParameterError
from .model import AccessProbabilities, ArrivalRates, DominanceMode, ProtocolKind
from .stability import priority_boundary, ra_boundary, td_boundary, union_region_contains
from .sweep import sweep as run_sweep

_SCHEMES = {"priority": priority_boundary, "ra": ra_boundary, "td": td_boundary}
_KINDS = {
    "priority": ProtocolKind.FEEDBACK_PRIORITY,
    "conventional": ProtocolKind.CONVENTIONAL_RA,
}
_MODES = {
    "none": DominanceMode.NONE,
    "ds1": DominanceMode.DS1,
    "ds2": DominanceMode.DS2,
    "ds3": DominanceMode.DS3,
}


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} not in [0, 1]")
    return value


def _rate(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"{text} not in (0, 1)")
    return value


def _step(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 0.1:
        raise argparse.ArgumentTypeError(f"step {text} not in (0, 0.1]")
    if abs(round(1.0 / value) * value - 1.0) > 1e-9:
        raise argparse.ArgumentTypeError(f"step {text} must divide 1 evenly")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return value


def _add_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="output path (default stdout)")


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aloha-priority",
        description="stability analysis of two queues under slotted random "
        "access with collision-feedback priority",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    b = commands.add_parser("boundary", help="envelope curve of one scheme")
    b.add_argument("--scheme", choices=sorted(_SCHEMES), required=True)
    b.add_argument("--step", type=_step, default=0.005)
    _add_output_flags(b)
    b.set_defaults(func=cmd_boundary)

    r = commands.add_parser("region", help="stability verdicts on a rate grid at fixed p")
    r.add_argument("--p1", type=_probability, required=True)
    r.add_argument("--p2", type=_probability, required=True)
    r.add_argument("--lambda-step", type=_step, default=0.01)
    _add_output_flags(r)
    r.set_defaults(func=cmd_region)

    s = commands.add_parser("sweep", help="numeric envelope over the p-grid")
    s.add_argument("--p-step", type=_step, default=0.01)
    s.add_argument("--lambda-step", type=_step, default=0.005)
    _add_output_flags(s)
    s.set_defaults(func=cmd_sweep)

    sim = commands.add_parser("simulate", help="Monte Carlo slot simulation")
    sim.add_argument("--kind", choices=sorted(_KINDS), default="priority")
    sim.add_argument("--mode", choices=("none", "ds1", "ds2", "ds3"), default="none")
    sim.add_argument("--p1", type=_probability, required=True)
    sim.add_argument("--p2", type=_probability, required=True)
    sim.add_argument("--l1", type=_rate, required=True)
    sim.add_argument("--l2", type=_rate, required=True)
    sim.add_argument("--slots", type=_positive_int, default=1_000_000)
    sim.add_argument("--seed", type=int, default=simulate.DEFAULT_SEED)
    sim.add_argument("--warmup", type=int, default=None)
    _add_output_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    an = commands.add_parser("analyze", help="closed-form analysis reports")
    an_sub = an.add_subparsers(dest="analysis", required=True)
    aq = an_sub.add_parser("qbd", help="queue-2 chain under saturated queue 1")
    aq.add_argument("--p1", type=_probability, required=True)
    aq.add_argument("--p2", type=_probability, required=True)
    aq.add_argument("--l2", type=_rate, required=True)
    _add_output_flags(aq)
    aq.set_defaults(func=cmd_analyze_qbd)

    v = commands.add_parser("verify", help="run a cross-validation suite")
    v.add_argument(
        "--suite",
        choices=("ds1", "qbd", "ds3", "containment", "all"),
        default="all",
    )
    _add_output_flags(v)
    v.set_defaults(func=cmd_verify)

    return parser


def cmd_boundary(args: argparse.Namespace) -> int:
    fn = _SCHEMES[args.scheme]
    n = round(1.0 / args.step)
    rows = [[i / n, fn(i / n)] for i in range(n + 1)]
    _write(reports.emit_table(["lambda1", "lambda2"], rows, args.format), args.out)
    return 0


def cmd_region(args: argparse.Namespace) -> int:
    p = AccessProbabilities(args.p1, args.p2)
    n = round(1.0 / args.lambda_step)
    rows = []
    for i in range(1, n):
        for j in range(1, n):
            verdict = union_region_contains(p, ArrivalRates(i / n, j / n))
            rows.append(
                [i / n, j / n, verdict.stable, verdict.binding or ""]
            )
    _write(
        reports.emit_table(["lambda1", "lambda2", "stable", "binding"], rows, args.format),
        args.out,
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    dataset = run_sweep(p_step=args.p_step, lambda_step=args.lambda_step)
    columns = [
        "lambda1",
        "priority_numeric",
        "priority_closed",
        "ra",
        "td",
        "argmax_p1",
        "argmax_p2",
    ]
    rows = [
        [
            dataset.lambda1[i],
            dataset.priority_numeric[i],
            dataset.priority_closed[i],
            dataset.ra[i],
            dataset.td[i],
            dataset.argmax_p1[i],
            dataset.argmax_p2[i],
        ]
        for i in range(dataset.lambda1.shape[0])
    ]
    _write(reports.emit_table(columns, rows, args.format), args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = simulate.SimulationConfig(
        kind=_KINDS[args.kind],
        mode=_MODES[args.mode],
        p=AccessProbabilities(args.p1, args.p2),
        l=ArrivalRates(args.l1, args.l2),
        horizon=args.slots,
        seed=args.seed,
        warmup=args.warmup,
    )
    metrics = simulate.run(config)
    report = {
        "kind": args.kind,
        "mode": args.mode,
        "p1": args.p1,
        "p2": args.p2,
        "l1": args.l1,
        "l2": args.l2,
        "slots": args.slots,
        "warmup": config.warmup,
        "seed": args.seed,
        "delivered_q1": metrics.delivered[0],
        "delivered_q2": metrics.delivered[1],
        "busy_slots_q1": metrics.busy_slots[0],
        "busy_slots_q2": metrics.busy_slots[1],
        "mu_q1": metrics.empirical_mu[0],
        "mu_q2": metrics.empirical_mu[1],
        "mu_stderr_q1": metrics.mu_stderr[0],
        "mu_stderr_q2": metrics.mu_stderr[1],
        "backoff_occupancy": metrics.backoff_occupancy,
        "occupancy_stderr": metrics.occupancy_stderr,
        "mean_len_q1": metrics.mean_len[0],
        "mean_len_q2": metrics.mean_len[1],
        "final_len_q1": metrics.final_len[0],
        "final_len_q2": metrics.final_len[1],
        "drift_q1": metrics.drift[0],
        "drift_q2": metrics.drift[1],
        "verdict_q1": metrics.verdict[0],
        "verdict_q2": metrics.verdict[1],
    }
    _write(reports.emit_report(report, args.format), args.out)
    return 0


def cmd_analyze_qbd(args: argparse.Namespace) -> int:
    p = AccessProbabilities(args.p1, args.p2)
    blocks = qbd.qbd_blocks(p, args.l2)
    r = qbd.rate_matrix_closed_form(p, args.l2)
    solved = qbd.solve_rate_matrix(blocks)
    residual = blocks.a2 + (blocks.a1 - np.eye(2)) @ r + blocks.a0 @ (r @ r)
    pi0 = qbd.ds2_pi0(p, args.l2)
    report = {"p1": args.p1, "p2": args.p2, "l2": args.l2}
    for name, matrix in (
        ("b", blocks.b),
        ("a0", blocks.a0),
        ("a1", blocks.a1),
        ("a2", blocks.a2),
        ("r_closed", r),
        ("r_solver", solved),
    ):
        for i in range(2):
            for j in range(2):
                report[f"{name}_{i}{j}"] = float(matrix[i, j])
    report.update(
        {
            "r_balance_residual": float(np.max(np.abs(residual))),
            "solver_max_delta": float(np.max(np.abs(solved - r))),
            "sp_closed_form": qbd.spectral_radius_closed_form(p, args.l2),
            "sp_eigen": qbd.spectral_radius(r),
            "pi0": pi0,
            "mu1_closed_form": qbd.ds2_service_rate_q1(p, args.l2),
            "mu1_series": qbd.ds2_service_rate_q1_series(p, args.l2),
        }
    )
    _write(reports.emit_report(report, args.format), args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = verify.run_suite(args.suite)
    rows = [[c.name, c.value, c.threshold, c.passed] for c in results]
    _write(
        reports.emit_table(["check", "value", "threshold", "passed"], rows, args.format),
        args.out,
    )
    return 0 if all(c.passed for c in results) else 2


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (DegenerateParameterError, UnstableParameterError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
