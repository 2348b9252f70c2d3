"""Command-line front end.

Exit codes: 0 ok, 1 input error, 2 solver timeout without a result,
3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .circuit import (
    CircuitFormatError,
    UnsupportedGateError,
    emit_compliant,
    format_pairs,
    generate_qft,
    load_circuit,
)
from .ilp import (
    assignment_to_schedule,
    build_model,
    check_assignment,
    export_lp,
    parse_solution,
)
from .permutation import format_schedule, parse_schedule, verify_schedule
from .solver import Mode, SolverConfig, SolverTimeout, solve

EXIT_OK, EXIT_INPUT, EXIT_TIMEOUT, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("nnroute")


class InputError(Exception):
    pass


def _add_circuit_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("circuit", nargs="?", help=".real file or pair listing")
    p.add_argument("--qft", type=int, metavar="N", help="use the N-qubit QFT instead of a file")


def _circuit(args):
    if args.qft is not None:
        if args.circuit is not None and getattr(args, "schedule", None) is None:
            # `verify --qft 3 sched.txt`: the positional is the schedule
            args.schedule, args.circuit = args.circuit, None
        try:
            return generate_qft(args.qft)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if args.circuit is None:
        raise InputError("give a circuit file or --qft N")
    path = Path(args.circuit)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    try:
        return load_circuit(path)
    except (CircuitFormatError, UnsupportedGateError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_decompose(args) -> int:
    circuit = _circuit(args)
    sys.stdout.write(format_pairs(circuit))
    return EXIT_OK


def cmd_qft(args) -> int:
    args.circuit = None
    sys.stdout.write(format_pairs(_circuit(args)))
    return EXIT_OK


def cmd_solve(args) -> int:
    circuit = _circuit(args)
    config = SolverConfig(
        mode=Mode(args.mode),
        beam_width=args.beam_width,
        time_limit=args.time_limit,
        thread_count=args.threads,
        kernel=args.kernel,
        half_states=args.half_states,
    )
    try:
        result = solve(circuit, config)
    except SolverTimeout as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"name": circuit.name, "n": circuit.n, "m": circuit.m, **result.to_json()}
    (out / "result.json").write_text(json.dumps(payload, indent=2) + "\n")
    (out / "schedule.txt").write_text(format_schedule(result.schedule))
    (out / "compliant.txt").write_text(emit_compliant(circuit, result.schedule, result.swaps))
    print(f"{circuit.name or 'circuit'}: n={circuit.n} m={circuit.m} swaps={result.objective} "
          f"({'optimal' if result.proven_optimal else 'not proven optimal'}, "
          f"{result.elapsed:.2f}s) -> {out}")
    return EXIT_OK


def cmd_export_lp(args) -> int:
    circuit = _circuit(args)
    try:
        model = build_model(circuit, relax_x=args.relax_x, relax_k=args.relax_k)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    text = export_lp(model)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"{model.num_variables} variables, {model.num_constraints} constraints", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    circuit = _circuit(args)
    if args.solution:
        model = build_model(circuit, relax_x=args.relax_x, relax_k=args.relax_k)
        try:
            values = parse_solution(Path(args.solution).read_text(), model)
            check = check_assignment(model, values)
        except (OSError, KeyError, ValueError) as exc:
            raise InputError(f"{args.solution}: {exc}") from exc
        print(f"model objective: {check.objective:g}")
        if not check.feasible:
            print(f"solution violates {len(check.violated)} constraint(s):")
            for name in check.violated:
                print(f"  {name}")
            return EXIT_VERIFY
        try:
            schedule = assignment_to_schedule(circuit, values)
        except ValueError as exc:
            print(f"solution does not encode a schedule: {exc}")
            return EXIT_VERIFY
    else:
        if not args.schedule:
            raise InputError("give a schedule file or --solution")
        try:
            schedule = parse_schedule(Path(args.schedule).read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"{args.schedule}: {exc}") from exc
    try:
        report = verify_schedule(circuit, schedule, budget=args.budget)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(report.summary())
    return EXIT_OK if report.feasible else EXIT_VERIFY


def cmd_bench(args) -> int:
    try:
        report = bench.run_bench(
            suite=args.suite, mode=args.mode, fixtures=args.fixtures, max_n=args.max_n,
            time_limit=args.time_limit, beam_width=args.beam_width, threads=args.threads,
            names=args.only,
        )
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    md = report.to_markdown()
    sys.stdout.write(md)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.json").write_text(report.to_json() + "\n")
        (out / "bench.md").write_text(md)
    return EXIT_VERIFY if report.failures else EXIT_OK


def cmd_ingest(args) -> int:
    """Decompose every fixture in a directory and compare gate counts to the table."""
    directory = bench.resolve_fixtures(args.fixtures)
    if directory is None:
        raise InputError(f"give a directory or set ${bench.FIXTURES_ENV}")
    try:
        index = bench.fixture_index(directory)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    known = {name.lower(): row for name, row in bench.row_by_name().items()}
    print("| fixture | n | m | m (table) | status |")
    print("|---|---|---|---|---|")
    for stem, path in index.items():
        row = known.get(stem)
        try:
            circuit = load_circuit(path)
        except (CircuitFormatError, UnsupportedGateError) as exc:
            print(f"| {path.stem} | - | - | {row.m_expected if row else '-'} | error: {exc} |")
            continue
        if row is None:
            status, expected = "not in table", "-"
        else:
            expected = row.m_expected
            status = "ok" if circuit.m == expected else "decomposition-mismatch"
        print(f"| {path.stem} | {circuit.n} | {circuit.m} | {expected} | {status} |")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nnroute", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="print the 2-qubit gate sequence of a circuit")
    _add_circuit_args(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("qft", help="print the QFT interaction sequence")
    p.add_argument("qft", type=int, metavar="N")
    p.set_defaults(func=cmd_qft)

    p = sub.add_parser("solve", help="find a minimum-SWAP schedule")
    _add_circuit_args(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="exact")
    p.add_argument("--beam-width", type=int, default=64)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--kernel", choices=["bfs", "matrix"], default="bfs")
    p.add_argument("--half-states", action="store_true",
                   help="fix the first order modulo array reversal")
    p.add_argument("--out", default="nnroute-out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("export-lp", help="write the ILP model in LP format")
    _add_circuit_args(p)
    p.add_argument("--relax-x", action="store_true")
    p.add_argument("--relax-k", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("verify", help="check a schedule or an ILP solution")
    _add_circuit_args(p)
    p.add_argument("schedule", nargs="?")
    p.add_argument("--solution", help="'name value' solution file of the exported model")
    p.add_argument("--relax-x", action="store_true")
    p.add_argument("--relax-k", action="store_true")
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="compare against the published optimal SWAP counts")
    p.add_argument("--suite", choices=["qft", "fixtures", "all"], default="qft")
    p.add_argument("--fixtures", help=f"directory of .real files (default ${bench.FIXTURES_ENV})")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="exact")
    p.add_argument("--max-n", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--beam-width", type=int, default=64)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--only", nargs="+", metavar="NAME")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ingest", help="decompose a directory of RevLib fixtures")
    p.add_argument("fixtures", nargs="?")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
