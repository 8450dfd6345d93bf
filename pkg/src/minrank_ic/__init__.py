"""Binary linear index code design for receivers with coded side-information.

A library and CLI that finds short broadcast codes when receivers cache
XOR combinations of packets, by minimizing the rank of a stacked GF(2)
objective over the free decoder coefficients, then extracts the code and
per-user decoders and verifies them end to end.
"""

from .gf2 import (
    DimensionError,
    Gf2Error,
    Gf2Matrix,
    RaggedRowsError,
    UnsolvableError,
    solve_rows,
    vstack,
)
from .instance import (
    InstanceError,
    ProblemInstance,
    UserSpec,
    XorTerm,
    build_request_matrix,
    parse_instance,
    serialize_instance,
    side_info_uncoded,
    side_info_xor,
)
from .solver import (
    ExhaustiveCapError,
    ObjectiveAssignment,
    SolveOutcome,
    SolverConfig,
    SolverConfigError,
    assemble_objective,
    free_bit_count,
    scalar_objective,
    solve,
    solve_exhaustive,
    solve_greedy,
)
from .extraction import (
    IndexCodeSolution,
    InvariantViolationError,
    OracleGuardError,
    SolutionRecord,
    Violation,
    brute_force_optimal_length,
    extract_code,
    parse_solution,
    serialize_solution,
    simulate_roundtrip,
    verify_algebraic,
)
from .sweep import SweepCell, SweepReport, greedy_trace, run_sweep, write_csv

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "ExhaustiveCapError",
    "Gf2Error",
    "Gf2Matrix",
    "IndexCodeSolution",
    "InstanceError",
    "InvariantViolationError",
    "ObjectiveAssignment",
    "OracleGuardError",
    "ProblemInstance",
    "RaggedRowsError",
    "SolutionRecord",
    "SolveOutcome",
    "SolverConfig",
    "SolverConfigError",
    "SweepCell",
    "SweepReport",
    "UnsolvableError",
    "UserSpec",
    "Violation",
    "XorTerm",
    "assemble_objective",
    "brute_force_optimal_length",
    "build_request_matrix",
    "extract_code",
    "free_bit_count",
    "greedy_trace",
    "parse_instance",
    "parse_solution",
    "run_sweep",
    "scalar_objective",
    "serialize_instance",
    "serialize_solution",
    "side_info_uncoded",
    "side_info_xor",
    "simulate_roundtrip",
    "solve",
    "solve_exhaustive",
    "solve_greedy",
    "solve_rows",
    "verify_algebraic",
    "vstack",
    "write_csv",
]
