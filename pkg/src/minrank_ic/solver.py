"""Rank minimization of the stacked decodability objective.

For an assignment of the per-user cache-combining matrices (the free
bits), the objective stacks one block per user: the request selector
plus that user's combining matrix times its cache encoding.  The rank of
the stack is the length of the index code the assignment yields, so the
best code comes from minimizing that rank, by exhausting every
assignment or by randomized greedy search.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .gf2 import Gf2Matrix, rank_of_packed_rows, vstack
from .instance import ProblemInstance, build_request_matrix


class SolverConfigError(ValueError):
    pass


class ExhaustiveCapError(Exception):
    """Refusal to enumerate a search space beyond the configured bit cap."""

    def __init__(self, free_bits: int, cap: int):
        self.free_bits = free_bits
        self.cap = cap
        super().__init__(
            f"{free_bits} free bits exceed the exhaustive cap of {cap}"
        )


@dataclass(frozen=True)
class SolverConfig:
    """Search settings.

    ``t_param`` follows the greedy sampling rule "rand > T": each free
    bit is set with probability 1 - T, so T is the chance a given cached
    combination goes unused in a probe.  ``iterations`` is the stall
    window U: the greedy search stops after U consecutive probes without
    a rank improvement.
    """

    method: str = "greedy"
    iterations: int = 100
    t_param: float = 0.5
    seed: int = 0
    exhaustive_bit_cap: int = 24

    def __post_init__(self):
        if self.method not in ("exhaustive", "greedy"):
            raise SolverConfigError(f"unknown method {self.method!r}")
        if not 0.0 <= self.t_param <= 1.0:
            raise SolverConfigError(f"t_param must be in [0, 1], got {self.t_param}")
        if self.method == "greedy" and self.iterations < 1:
            raise SolverConfigError(
                f"iterations must be >= 1, got {self.iterations}"
            )
        if self.exhaustive_bit_cap < 0:
            raise SolverConfigError("exhaustive_bit_cap must be >= 0")


@dataclass(frozen=True)
class ObjectiveAssignment:
    """One choice of all free matrices, with the assembled stack and its rank.

    ``a_mats[k]`` multiplies user k's cache encoding and has shape
    (requested bits of user k) x (cache bits of user k).
    """

    a_mats: tuple[Gf2Matrix, ...]
    assembled: Gf2Matrix
    achieved_rank: int


@dataclass(frozen=True)
class SolveOutcome:
    beta: int
    best: ObjectiveAssignment
    iterations_run: int
    optimal_certified: bool


@dataclass(frozen=True)
class _UserBlock:
    """Per-user data precomputed for the solver hot loop."""

    request_rows: tuple[int, ...]  # packed rows of the request selector
    side_rows: tuple[int, ...]     # packed rows of the cache encoding
    n_rows: int                    # requested bits
    n_side: int                    # cache bits


def _user_blocks(instance: ProblemInstance) -> list[_UserBlock]:
    blocks = []
    for k in range(instance.num_users):
        req = build_request_matrix(instance, k)
        side = instance.users[k].side_info
        blocks.append(
            _UserBlock(req.row_bits, side.row_bits, req.nrows, side.nrows)
        )
    return blocks


def free_bit_count(instance: ProblemInstance) -> int:
    """Total number of indeterminate bits across all combining matrices."""
    f = instance.packet_bits
    return sum(
        len(u.requests) * f * u.side_info.nrows for u in instance.users
    )


def _assembled_rows(blocks: list[_UserBlock], bits: int) -> list[int]:
    """Objective rows for one packed assignment of the free bits.

    Bit order is user-major, then row-major, then column-major within
    each combining matrix.
    """
    rows = []
    pos = 0
    for blk in blocks:
        m = blk.n_side
        for i in range(blk.n_rows):
            acc = blk.request_rows[i]
            sel = (bits >> pos) & ((1 << m) - 1)
            while sel:
                j = (sel & -sel).bit_length() - 1
                acc ^= blk.side_rows[j]
                sel &= sel - 1
            rows.append(acc)
            pos += m
    return rows


def _bits_to_a_mats(
    instance: ProblemInstance, blocks: list[_UserBlock], bits: int
) -> tuple[Gf2Matrix, ...]:
    mats = []
    pos = 0
    for blk in blocks:
        m = blk.n_side
        rows = []
        for _ in range(blk.n_rows):
            rows.append((bits >> pos) & ((1 << m) - 1))
            pos += m
        mats.append(Gf2Matrix(m, tuple(rows)))
    return tuple(mats)


def assemble_objective(
    instance: ProblemInstance, a_mats: list[Gf2Matrix] | tuple[Gf2Matrix, ...]
) -> ObjectiveAssignment:
    """Stack the per-user blocks for an explicit assignment and rank it."""
    if len(a_mats) != instance.num_users:
        raise SolverConfigError(
            f"expected {instance.num_users} matrices, got {len(a_mats)}"
        )
    f = instance.packet_bits
    parts = []
    for k, a in enumerate(a_mats):
        user = instance.users[k]
        want = (len(user.requests) * f, user.side_info.nrows)
        if a.shape != want:
            raise SolverConfigError(
                f"user {k}: combining matrix has shape {a.shape}, expected {want}"
            )
        parts.append(build_request_matrix(instance, k) + a @ user.side_info)
    assembled = vstack(parts, ncols=instance.total_bits)
    return ObjectiveAssignment(tuple(a_mats), assembled, assembled.rank())


def _outcome(
    instance: ProblemInstance,
    blocks: list[_UserBlock],
    bits: int,
    iterations: int,
    certified: bool,
) -> SolveOutcome:
    assignment = assemble_objective(instance, _bits_to_a_mats(instance, blocks, bits))
    return SolveOutcome(assignment.achieved_rank, assignment, iterations, certified)


def solve_exhaustive(
    instance: ProblemInstance, cfg: SolverConfig | None = None
) -> SolveOutcome:
    """Certified minimum: try all 2^B assignments of the B free bits.

    Ties break toward the smallest assignment in the fixed bit
    enumeration order.  Refuses to run when B exceeds the configured cap.
    """
    cfg = cfg or SolverConfig(method="exhaustive")
    n_bits = free_bit_count(instance)
    if n_bits > cfg.exhaustive_bit_cap:
        raise ExhaustiveCapError(n_bits, cfg.exhaustive_bit_cap)
    blocks = _user_blocks(instance)
    best_bits = 0
    best_rank = rank_of_packed_rows(_assembled_rows(blocks, 0))
    for bits in range(1, 1 << n_bits):
        r = rank_of_packed_rows(_assembled_rows(blocks, bits))
        if r < best_rank:
            best_rank, best_bits = r, bits
    return _outcome(instance, blocks, best_bits, 1 << n_bits, certified=True)


def sample_free_bits(rng: random.Random, n_bits: int, t_param: float) -> int:
    """Draw one packed assignment; each bit is 1 when rand > T."""
    bits = 0
    for i in range(n_bits):
        if rng.random() > t_param:
            bits |= 1 << i
    return bits


def solve_greedy(
    instance: ProblemInstance, cfg: SolverConfig
) -> SolveOutcome:
    """Randomized search: resample every free bit each probe, keep the best.

    Starts from the all-zero assignment (rank of the bare request stack)
    and stops after ``cfg.iterations`` consecutive probes without a
    strict rank improvement.  Deterministic for a fixed (instance, seed);
    the result is an upper bound on the true minimum, never certified.
    """
    if cfg.iterations < 1:
        raise SolverConfigError(f"iterations must be >= 1, got {cfg.iterations}")
    blocks = _user_blocks(instance)
    n_bits = free_bit_count(instance)
    rng = random.Random(cfg.seed)
    best_bits = 0
    best_rank = rank_of_packed_rows(_assembled_rows(blocks, 0))
    stalls = 0
    probes = 0
    while stalls < cfg.iterations:
        probes += 1
        bits = sample_free_bits(rng, n_bits, cfg.t_param)
        r = rank_of_packed_rows(_assembled_rows(blocks, bits))
        if r < best_rank:
            best_rank, best_bits = r, bits
            stalls = 0
        else:
            stalls += 1
    return _outcome(instance, blocks, best_bits, probes, certified=False)


def solve(instance: ProblemInstance, cfg: SolverConfig) -> SolveOutcome:
    if cfg.method == "exhaustive":
        return solve_exhaustive(instance, cfg)
    return solve_greedy(instance, cfg)


def scalar_objective(sbar: Gf2Matrix, abar_diag: list[int] | tuple[int, ...]) -> Gf2Matrix:
    """Objective for the scalar special case: one packet per user, one
    cached bit each, unit requests.

    ``sbar`` holds the cached combinations as columns; row k of the
    result is the k-th unit row plus, when ``abar_diag[k]`` is set, the
    k-th column transposed.  Equals the stacked objective of the
    equivalent one-bit instance.
    """
    k = sbar.ncols
    if sbar.nrows != k:
        raise SolverConfigError(f"expected a square matrix, got {sbar.shape}")
    if len(abar_diag) != k:
        raise SolverConfigError(
            f"diagonal has {len(abar_diag)} entries, expected {k}"
        )
    cols = sbar.transpose().row_bits
    rows = []
    for i, a in enumerate(abar_diag):
        if a not in (0, 1):
            raise SolverConfigError(f"diagonal entry {a!r} is not a bit")
        rows.append((1 << i) ^ (cols[i] if a else 0))
    return Gf2Matrix(k, tuple(rows))
