"""Command-line harness: generate, solve, optstar, gap, verify.

Exit codes are stable: 0 success or valid witness, 2 search stuck with a
valid infeasibility witness, 3 invalid witness, 1 operational error
(bad files, guard exceedances, internal sentinels).

Reports go to stdout and, with --out, to a file.  The gap campaign writes
a directory: per-instance CSV, text summary, worst instance, and a
histogram figure.  The optional --trace file records one line per search
event (call/add/swap/insert/stuck) with the signature vector after each
edge admission.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import certificate, configlp, oracle, reports, search
from .configlp import Counters
from .generator import GeneratorSpec, generate_instance
from .model import (
    GuardExceeded,
    Instance,
    ModelError,
    allocation_value,
    bundle_value,
    fingerprint,
    format_instance,
    format_rational,
    parse_instance,
    parse_rational,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_STUCK = 2
EXIT_INVALID_WITNESS = 3


def _load_instance(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ModelError(f"cannot read instance file {path!r}: {e}") from None
    return parse_instance(text)


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text)


class _TraceWriter:
    def __init__(self, path: str) -> None:
        self.fh = open(path, "w")

    def __call__(self, kind: str, data: dict) -> None:
        parts = [kind]
        for key, value in data.items():
            if isinstance(value, search.Hyperedge):
                rs = " ".join(sorted(value.resources))
                parts.append(f"{key}=({value.player}: {rs})")
            elif isinstance(value, tuple):
                parts.append(f"{key}={value}")
            else:
                parts.append(f"{key}={value}")
        self.fh.write(" ".join(parts) + "\n")

    def close(self) -> None:
        self.fh.close()


def cmd_generate(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(
        players=args.players,
        resources=args.resources,
        density=args.density,
        grid_denominator=args.grid_denominator,
        seed=args.seed,
    )
    text = format_instance(generate_instance(spec))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    counters = Counters()
    fp = fingerprint(instance)
    lines = [
        "command = solve",
        f"instance = {args.instance}",
        f"fingerprint = {fp}",
    ]
    started = time.perf_counter()

    if args.threshold == "auto":
        opt = configlp.opt_star(
            instance, mode=args.mode, guard=args.guard_configs, counters=counters
        )
        threshold = opt / certificate.ALPHA
        lines.append(f"opt_star = {format_rational(opt)}")
        lines.append(f"alpha = {format_rational(certificate.ALPHA)}")
        lines.append(f"threshold = {format_rational(threshold)}")
        if opt == 0:
            # nothing positive is attainable; the empty allocation is optimal
            lines.append("outcome = empty-allocation")
            for p in instance.players:
                lines.append(f"bundle[{p}] =  ; value = 0")
            lines.append("min_value = 0")
            lines += _finish(counters, started)
            _emit(lines, args.out)
            return EXIT_OK
    else:
        threshold = parse_rational(args.threshold)
        if threshold <= 0:
            raise ModelError(f"threshold must be positive, got {args.threshold}")
        lines.append(f"threshold = {format_rational(threshold)}")

    tracer = _TraceWriter(args.trace) if args.trace else None
    try:
        result = search.solve(instance, threshold, trace=tracer)
    except search.Stuck as stuck:
        stuck_lines, witness_valid = _stuck_report(
            instance, stuck.state, fp, args
        )
        lines += stuck_lines
        lines += _finish(counters, started, stuck.state)
        _emit(lines, args.out)
        return EXIT_STUCK if witness_valid else EXIT_INVALID_WITNESS
    finally:
        if tracer:
            tracer.close()

    lines.append("outcome = allocation")
    for p in instance.players:
        bundle = result.allocation.bundles[p]
        rs = " ".join(instance.sort_resources(bundle))
        v = bundle_value(instance, bundle)
        lines.append(f"bundle[{p}] = {rs} ; value = {format_rational(v)}")
    lines.append(
        f"min_value = {format_rational(allocation_value(instance, result.allocation))}"
    )
    lines.append("calls:")
    for idx, call in enumerate(result.calls):
        lines.append(
            f"  call[{call.i0}] matched_at_start={idx} "
            f"main_iterations={call.main_iterations} "
            f"inner_iterations={call.inner_iterations} bound=2^{idx}"
        )
    lines += _finish(counters, started, extra_calls=result)
    _emit(lines, args.out)
    return EXIT_OK


def _stuck_report(
    instance: Instance,
    state: search.SearchState,
    fp: str,
    args: argparse.Namespace,
) -> tuple[list[str], bool]:
    lines = ["outcome = stuck-witness", f"stuck_player = {state.i0}"]
    witness = certificate.build_certificate(instance, state)
    lines += reports.render_witness(witness)
    audit = certificate.audit_stuck_state(instance, state, witness)
    lines.append("audit:")
    lines.append(f"  fat_blocking = {audit.fat_blocking}")
    lines.append(f"  thin_blocking = {audit.thin_blocking}")
    lines.append(f"  fat_price_total = {format_rational(audit.fat_price_total)}")
    for rec in audit.thin_records:
        rs = " ".join(sorted(rec.edge.resources))
        lines.append(
            f"  thin_edge player={rec.edge.player} resources={{{rs}}} "
            f"blockers={rec.blocking_count} priced={format_rational(rec.priced_total)} "
            f"case={rec.case}"
        )
    check = configlp.verify_unbounded_dual(instance, witness, guard=args.guard_configs)
    lines += reports.render_witness_check(check)
    if args.witness_out:
        reports.write_witness_file(args.witness_out, witness, fp)
        lines.append(f"witness_file = {args.witness_out}")
    return lines, check.ok


def _finish(
    counters: Counters,
    started: float,
    state: search.SearchState | None = None,
    extra_calls: search.SolveResult | None = None,
) -> list[str]:
    main_iter = inner_iter = 0
    if state is not None:
        main_iter, inner_iter = state.main_iterations, state.inner_iterations
    if extra_calls is not None:
        main_iter = extra_calls.main_iterations
        inner_iter = extra_calls.inner_iterations
    lines = ["counters:"]
    for line in reports.render_counters(
        counters,
        {"main_iterations": main_iter, "inner_iterations": inner_iter},
    ):
        lines.append(f"  {line}")
    lines.append(f"wall_time_s = {time.perf_counter() - started:.3f}")
    return lines


def cmd_optstar(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    lines = [
        "command = optstar",
        f"instance = {args.instance}",
        f"fingerprint = {fingerprint(instance)}",
    ]
    started = time.perf_counter()
    values: dict[str, Fraction] = {}
    modes = ["enum", "colgen"] if args.mode == "both" else [args.mode]
    for mode in modes:
        counters = Counters()
        values[mode] = configlp.opt_star(
            instance, mode=mode, guard=args.guard_configs, counters=counters
        )
        lines.append(f"opt_star[{mode}] = {format_rational(values[mode])}")
        lines.append(
            f"counters[{mode}] = pivots {counters.lp_pivots}, "
            f"configs {counters.configs_enumerated}"
        )
    lines.append(f"wall_time_s = {time.perf_counter() - started:.3f}")
    if len(set(values.values())) > 1:
        lines.append("INTERNAL ERROR: solving modes disagree")
        _emit(lines, args.out)
        return EXIT_ERROR
    _emit(lines, args.out)
    return EXIT_OK


def cmd_gap(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(
        players=args.players,
        resources=args.resources,
        density=args.density,
        grid_denominator=args.grid_denominator,
        seed=args.seed,
    )
    summary = reports.run_gap_campaign(spec, args.count)
    lines = ["command = gap"] + reports.render_campaign_summary(summary)
    if args.out:
        paths = reports.write_campaign_outputs(summary, args.out)
        for name, path in sorted(paths.items()):
            lines.append(f"wrote_{name} = {path}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if summary.bound_ok else EXIT_ERROR


def cmd_verify(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    fp, witness = reports.read_witness_file(args.witness)
    actual = fingerprint(instance)
    if fp != actual:
        sys.stdout.write(
            f"fingerprint mismatch: witness carries {fp}, instance is {actual}\n"
        )
        return EXIT_ERROR
    check = configlp.verify_unbounded_dual(
        instance, witness, guard=args.guard_configs
    )
    lines = [
        "command = verify",
        f"instance = {args.instance}",
        f"witness = {args.witness}",
        f"fingerprint = {actual}",
        f"tau = {format_rational(witness.tau)}",
    ]
    lines += reports.render_witness_check(check)
    _emit(lines, args.out)
    return EXIT_OK if check.ok else EXIT_INVALID_WITNESS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="santafair",
        description=(
            "Exact solvers for restricted max-min fair allocation: relaxation "
            "optimum, local-search matching, and infeasibility witnesses."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_generator_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--players", type=int, required=True)
        p.add_argument("--resources", type=int, required=True)
        p.add_argument("--density", type=float, default=1.0)
        p.add_argument(
            "--grid-denominator",
            type=int,
            default=1,
            metavar="D",
            help="values are uniform over {1/D, ..., D/D}",
        )
        p.add_argument("--seed", type=int, default=0)

    def add_guard(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--guard-configs",
            type=int,
            default=configlp.DEFAULT_CONFIG_GUARD,
            metavar="N",
            help="cap on configuration-enumeration work per query",
        )

    p = sub.add_parser("generate", help="write a seeded random instance")
    add_generator_args(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run the local search on an instance")
    p.add_argument("instance")
    p.add_argument(
        "--threshold",
        default="auto",
        help='per-player target as a rational "p/q", or "auto" for opt_star/alpha',
    )
    p.add_argument(
        "--mode",
        choices=["enum", "colgen"],
        default="enum",
        help="relaxation solving mode used for auto thresholds",
    )
    p.add_argument("--trace", help="write a search event log to this file")
    p.add_argument("--out", help="write the report to this file as well")
    p.add_argument("--witness-out", help="write the witness file here when stuck")
    add_guard(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("optstar", help="exact optimum of the relaxation")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["enum", "colgen", "both"], default="both")
    p.add_argument("--out")
    add_guard(p)
    p.set_defaults(func=cmd_optstar)

    p = sub.add_parser("gap", help="measure fractional/integral gaps in bulk")
    add_generator_args(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", help="directory for CSV, summary, figure, worst instance")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("verify", help="check a witness file against an instance")
    p.add_argument("instance")
    p.add_argument("witness")
    p.add_argument("--out")
    add_guard(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse errors use code 2; remap to 1
        if e.code not in (0, None):
            return EXIT_ERROR
        return EXIT_OK
    try:
        return args.func(args)
    except (ModelError, GuardExceeded, ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ERROR
    except oracle.InternalInconsistency as e:
        sys.stderr.write(f"internal error: {e}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
