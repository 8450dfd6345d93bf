"""Seeded greedy-search sweeps: average achieved rank per (T, U) cell.

Each trial extends a single greedy trace across the whole U list instead
of restarting per U, so for a fixed T and seed set the mean achieved
rank is monotone non-increasing in U by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Sequence

from .solver import (
    ExhaustiveCapError,
    SolverConfig,
    SolverConfigError,
    _assembled_rows,
    _user_blocks,
    free_bit_count,
    sample_free_bits,
    solve_exhaustive,
)
from .gf2 import rank_of_packed_rows
from .instance import ProblemInstance

CSV_HEADER = "# t_param,U,trials,mean_beta,min_beta,max_beta,optimal_rate"


@dataclass(frozen=True)
class SweepCell:
    """Aggregate of ``trials`` seeded greedy runs at one (T, U) point."""

    t_param: float
    iterations: int
    trials: int
    mean_beta: Fraction
    min_beta: int
    max_beta: int
    optimal_rate: Fraction | None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.min_beta <= self.mean_beta <= self.max_beta:
            raise ValueError("mean outside [min, max]")


@dataclass(frozen=True)
class SweepReport:
    cells: tuple[SweepCell, ...]
    optimum: int | None


def greedy_trace(
    instance: ProblemInstance,
    t_param: float,
    seed: int,
    stall_windows: Sequence[int],
) -> dict[int, int]:
    """Best rank the greedy search holds when each stall window is reached.

    Runs one probe sequence and reads off, for every window U in
    ``stall_windows``, the best rank at the first moment U consecutive
    probes have failed to improve.  This matches running the search once
    per U with a shared seed, at the cost of a single trace.
    """
    windows = sorted(set(stall_windows))
    if not windows or windows[0] < 1:
        raise SolverConfigError("stall windows must be >= 1")
    if not 0.0 <= t_param <= 1.0:
        raise SolverConfigError(f"t_param must be in [0, 1], got {t_param}")
    blocks = _user_blocks(instance)
    n_bits = free_bit_count(instance)
    rng = random.Random(seed)
    best = rank_of_packed_rows(_assembled_rows(blocks, 0))
    out: dict[int, int] = {}
    stalls = 0
    next_idx = 0
    while next_idx < len(windows):
        bits = sample_free_bits(rng, n_bits, t_param)
        r = rank_of_packed_rows(_assembled_rows(blocks, bits))
        if r < best:
            best = r
            stalls = 0
        else:
            stalls += 1
            while next_idx < len(windows) and stalls == windows[next_idx]:
                out[windows[next_idx]] = best
                next_idx += 1
    return out


def run_sweep(
    instance: ProblemInstance,
    t_list: Sequence[float],
    u_list: Sequence[int],
    trials: int,
    base_seed: int,
    exhaustive_bit_cap: int = 24,
) -> SweepReport:
    """Aggregate greedy results over seeds base_seed .. base_seed+trials-1.

    The exhaustive optimum is computed once when the free-bit count fits
    under the cap; otherwise every cell's optimal_rate is None.  Rows
    come out in (T, U) order following the input lists.
    """
    if trials < 1:
        raise SolverConfigError(f"trials must be >= 1, got {trials}")
    optimum: int | None = None
    try:
        optimum = solve_exhaustive(
            instance, SolverConfig(method="exhaustive", exhaustive_bit_cap=exhaustive_bit_cap)
        ).beta
    except ExhaustiveCapError:
        pass

    cells = []
    for t in t_list:
        betas_by_u: dict[int, list[int]] = {u: [] for u in u_list}
        for trial in range(trials):
            trace = greedy_trace(instance, t, base_seed + trial, list(u_list))
            for u in betas_by_u:
                betas_by_u[u].append(trace[u])
        for u in u_list:
            betas = betas_by_u[u]
            rate = None
            if optimum is not None:
                rate = Fraction(sum(1 for b in betas if b == optimum), trials)
            cells.append(
                SweepCell(
                    t_param=t,
                    iterations=u,
                    trials=trials,
                    mean_beta=Fraction(sum(betas), trials),
                    min_beta=min(betas),
                    max_beta=max(betas),
                    optimal_rate=rate,
                )
            )
    return SweepReport(tuple(cells), optimum)


def write_csv(report: SweepReport, stream: IO[str]) -> None:
    """Delimited output, one row per (T, U) cell; '#' header is gnuplot-safe."""
    stream.write(CSV_HEADER + "\n")
    for c in report.cells:
        rate = "" if c.optimal_rate is None else f"{float(c.optimal_rate):.6f}"
        stream.write(
            f"{c.t_param},{c.iterations},{c.trials},"
            f"{float(c.mean_beta):.6f},{c.min_beta},{c.max_beta},{rate}\n"
        )
