"""Command-line front end: solve, verify, sweep, oracle.

Exit codes: 0 success, 2 validation error, 3 cap or guard refusal,
4 verification failure.  All randomness flows from explicit seeds.
"""

from __future__ import annotations

import argparse
import random
import sys

from .extraction import (
    OracleGuardError,
    SolutionRecord,
    brute_force_optimal_length,
    extract_code,
    parse_solution,
    serialize_solution,
    simulate_roundtrip,
    verify_algebraic,
)
from .gf2 import Gf2Error
from .instance import InstanceError, ProblemInstance, parse_instance
from .solver import (
    ExhaustiveCapError,
    SolverConfig,
    SolverConfigError,
    solve,
)
from .sweep import run_sweep, write_csv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_REFUSED = 3
EXIT_VERIFY_FAILED = 4

ALL_INPUTS_BIT_LIMIT = 20


def _read_instance(path: str) -> ProblemInstance:
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_solve(args) -> int:
    instance = _read_instance(args.instance)
    cfg = SolverConfig(
        method=args.method,
        iterations=args.iterations,
        t_param=args.t_param,
        seed=args.seed,
        exhaustive_bit_cap=args.exhaustive_cap,
    )
    outcome = solve(instance, cfg)
    sol = extract_code(instance, outcome.best)
    record = SolutionRecord(
        sol, cfg.seed, cfg.method, outcome.optimal_certified
    )
    print(
        f"beta={outcome.beta} optimal_certified="
        f"{'true' if outcome.optimal_certified else 'false'} "
        f"method={cfg.method} iterations_run={outcome.iterations_run}"
    )
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(serialize_solution(record))
        print(f"solution written to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _read_instance(args.instance)
    with open(args.solution, "rb") as fh:
        record = parse_solution(fh.read(), instance)
    sol = record.solution

    violation = verify_algebraic(instance, sol)
    if violation is not None:
        print(
            f"FAIL: decodability identity violated at "
            f"user {violation.user}, row {violation.row}"
        )
        return EXIT_VERIFY_FAILED

    width = instance.total_bits
    if args.mode == "all":
        if width > ALL_INPUTS_BIT_LIMIT:
            print(
                f"refusing all-inputs sweep: 2^{width} packet vectors "
                f"(limit 2^{ALL_INPUTS_BIT_LIMIT}); use --mode random"
            )
            return EXIT_REFUSED
        vectors = (
            [(v >> j) & 1 for j in range(width)] for v in range(1 << width)
        )
        n_inputs = 1 << width
    else:
        if args.trials < 1:
            raise SolverConfigError(f"--trials must be >= 1, got {args.trials}")
        rng = random.Random(args.seed)
        vectors = (
            [rng.randrange(2) for _ in range(width)] for _ in range(args.trials)
        )
        n_inputs = args.trials

    for x in vectors:
        recovered = simulate_roundtrip(instance, sol, x)
        for k, got in enumerate(recovered):
            user = instance.users[k]
            want = [
                x[t * instance.packet_bits + b]
                for t in user.requests
                for b in range(instance.packet_bits)
            ]
            if got != want:
                print(f"FAIL: user {k} misdecodes x={x}: got {got}, want {want}")
                return EXIT_VERIFY_FAILED

    note = " (empty code: side information suffices)" if sol.beta == 0 else ""
    print(f"PASS: beta={sol.beta}, {n_inputs} packet vectors decoded exactly{note}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    instance = _read_instance(args.instance)
    report = run_sweep(
        instance,
        t_list=args.t_list,
        u_list=args.iterations_list,
        trials=args.trials,
        base_seed=args.seed,
        exhaustive_bit_cap=args.exhaustive_cap,
    )
    with open(args.csv, "w", encoding="utf-8") as fh:
        write_csv(report, fh)
    print(f"sweep written to {args.csv} ({len(report.cells)} rows)")
    if args.plot:
        from .plotting import render_sweep_figure

        render_sweep_figure(report, args.plot)
        print(f"figure written to {args.plot}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = _read_instance(args.instance)
    max_len = args.max_length
    if max_len is None:
        max_len = instance.total_bits
    length = brute_force_optimal_length(instance, max_len)
    if length is None:
        print(f"no valid linear code of length <= {max_len}")
    else:
        print(f"optimal_length={length}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minrank-ic",
        description=(
            "Design and check binary linear index codes for receivers "
            "that cache XOR combinations of packets."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="minimize the code length for an instance")
    p_solve.add_argument("instance", help="instance JSON file")
    p_solve.add_argument(
        "--method", choices=["exhaustive", "greedy"], default="greedy"
    )
    p_solve.add_argument(
        "--iterations", type=int, default=100, metavar="U",
        help="greedy stall window (stop after U probes without improvement)",
    )
    p_solve.add_argument(
        "--t-param", type=float, default=0.5, metavar="T",
        help="probability that a cached combination goes unused in a probe",
    )
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--exhaustive-cap", type=int, default=24, metavar="BITS")
    p_solve.add_argument("--out", metavar="PATH", help="write the solution JSON here")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser(
        "verify", help="check a solution algebraically and by simulation"
    )
    p_verify.add_argument("instance")
    p_verify.add_argument("solution", help="solution JSON file")
    p_verify.add_argument(
        "--mode", choices=["all", "random"], default="all",
        help="simulate every packet vector, or a seeded random sample",
    )
    p_verify.add_argument(
        "--trials", type=int, default=10000,
        help="sample size for --mode random",
    )
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser(
        "sweep", help="average greedy performance over a (T, U) grid"
    )
    p_sweep.add_argument("instance")
    p_sweep.add_argument(
        "--t-list", type=_float_list, required=True, metavar="T1,T2,...",
    )
    p_sweep.add_argument(
        "--iterations-list", type=_int_list, required=True, metavar="U1,U2,...",
    )
    p_sweep.add_argument("--trials", type=int, default=1000)
    p_sweep.add_argument(
        "--seed", type=int, default=0,
        help="base seed; trial i uses seed base+i",
    )
    p_sweep.add_argument("--exhaustive-cap", type=int, default=24, metavar="BITS")
    p_sweep.add_argument("--csv", required=True, metavar="PATH")
    p_sweep.add_argument(
        "--plot", metavar="PATH",
        help="also render the sweep as a figure (png/pdf by extension)",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_oracle = sub.add_parser(
        "oracle", help="brute-force the optimal length by enumerating codes"
    )
    p_oracle.add_argument("instance")
    p_oracle.add_argument(
        "--max-length", type=int, default=None,
        help="largest code length to try (default: total packet bits)",
    )
    p_oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ExhaustiveCapError, OracleGuardError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (InstanceError, SolverConfigError, Gf2Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
