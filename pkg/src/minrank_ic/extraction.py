"""Turn a minimizing assignment into a transmit code and per-user decoders.

The transmitted code is a maximal independent row subset of the
assembled objective.  Each user's decoder splits into two parts: one
applied to the received code bits and one applied to the cached bits;
together they must reproduce exactly the requested packet bits.  This
module also houses the independent brute-force oracle that searches all
linear codes by increasing length, used to validate the rank-minimization
route on tiny instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .gf2 import Gf2Matrix, UnsolvableError, solve_rows
from .instance import (
    InstanceError,
    ProblemInstance,
    build_request_matrix,
    dump_canonical,
)
from .solver import ObjectiveAssignment


class InvariantViolationError(Exception):
    """An internally-produced solution failed a by-construction guarantee."""


class OracleGuardError(Exception):
    """Refusal: the brute-force enumeration at some length is too large."""

    def __init__(self, length: int, total_bits: int, cap: int = 20):
        self.length = length
        self.total_bits = total_bits
        self.cap = cap
        super().__init__(
            f"length {length} needs {length * total_bits} enumeration bits, "
            f"above the guard of {cap}"
        )


@dataclass(frozen=True)
class Violation:
    """First user/row where the decodability identity fails."""

    user: int
    row: int


@dataclass(frozen=True)
class IndexCodeSolution:
    """A concrete code plus decoders.

    ``c_ic`` is the beta x (N*F) encoding matrix whose rows are the
    transmitted combinations; ``chosen_rows`` records where they came
    from in the assembled objective.  Per user, ``b_mats[k]`` applies to
    the received bits and ``a_mats[k]`` to the cached bits.
    """

    c_ic: Gf2Matrix
    chosen_rows: tuple[int, ...]
    b_mats: tuple[Gf2Matrix, ...]
    a_mats: tuple[Gf2Matrix, ...]

    @property
    def beta(self) -> int:
        return self.c_ic.nrows


def extract_code(
    instance: ProblemInstance, assignment: ObjectiveAssignment
) -> IndexCodeSolution:
    """Select independent objective rows as the code and solve for decoders.

    Every objective row lies in the span of the selected rows, so the
    per-user solve always succeeds on well-formed input.
    """
    assembled = assignment.assembled
    chosen = assembled.independent_rows()
    c_ic = assembled.take_rows(chosen)
    b_mats = []
    offset = 0
    for k in range(instance.num_users):
        n_rows = len(instance.users[k].requests) * instance.packet_bits
        block = assembled.take_rows(range(offset, offset + n_rows))
        offset += n_rows
        try:
            b_mats.append(solve_rows(c_ic, block))
        except UnsolvableError as exc:
            raise InvariantViolationError(
                f"user {k}: objective row {exc.row_index} left the selected span"
            ) from exc
    return IndexCodeSolution(c_ic, tuple(chosen), tuple(b_mats), assignment.a_mats)


def verify_algebraic(
    instance: ProblemInstance, sol: IndexCodeSolution
) -> Violation | None:
    """Check the decodability identity for every user; None means valid.

    For each user the reconstruction (code decoder applied to the code,
    plus cache decoder applied to the cache encoding) must equal the
    request selector row for row.
    """
    for k in range(instance.num_users):
        user = instance.users[k]
        lhs = sol.b_mats[k] @ sol.c_ic + sol.a_mats[k] @ user.side_info
        rhs = build_request_matrix(instance, k)
        for i in range(rhs.nrows):
            if lhs.row_bits[i] != rhs.row_bits[i]:
                return Violation(user=k, row=i)
    return None


def simulate_roundtrip(
    instance: ProblemInstance, sol: IndexCodeSolution, x: list[int] | tuple[int, ...]
) -> list[list[int]]:
    """Broadcast the code for one packet vector and decode at every user.

    Returns each user's recovered bit vector; for a valid solution this
    equals that user's requested bits of ``x``.
    """
    width = instance.total_bits
    if len(x) != width:
        raise InstanceError(f"packet vector has {len(x)} bits, expected {width}")
    x_bits = 0
    for j, v in enumerate(x):
        if v not in (0, 1):
            raise InstanceError(f"bit {j}: {v!r} is not a bit")
        x_bits |= v << j
    received = sol.c_ic.mul_vec(x_bits)
    out = []
    for k in range(instance.num_users):
        cached = instance.users[k].side_info.mul_vec(x_bits)
        rec = sol.b_mats[k].mul_vec(received) ^ sol.a_mats[k].mul_vec(cached)
        n_rows = len(instance.users[k].requests) * instance.packet_bits
        out.append([(rec >> i) & 1 for i in range(n_rows)])
    return out


# -- brute-force optimal length (independent oracle) ---------------------


def _pivot_table(row_bits) -> dict[int, int]:
    pivots: dict[int, int] = {}
    for bits in row_bits:
        while bits:
            low = bits & -bits
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = bits
                break
            bits ^= piv
    return pivots


def _in_span(pivots: dict[int, int], bits: int) -> bool:
    while bits:
        low = bits & -bits
        piv = pivots.get(low)
        if piv is None:
            return False
        bits ^= piv
    return bits == 0


def brute_force_optimal_length(
    instance: ProblemInstance, max_len: int, guard_bits: int = 20
) -> int | None:
    """Smallest code length found by enumerating all linear codes directly.

    Independent of the rank-minimization route: for each candidate length
    in increasing order, every full-row-rank encoding matrix of that many
    rows is tried, and a length is feasible when each user's requested
    rows lie in the span of the code rows together with that user's cache
    rows.  Returns None when no feasible length <= ``max_len`` exists.
    Raises OracleGuardError before enumerating a level whose search space
    exceeds ``guard_bits`` bits.
    """
    width = instance.total_bits
    user_data = []
    for k in range(instance.num_users):
        req = build_request_matrix(instance, k)
        side = instance.users[k].side_info
        user_data.append((req.row_bits, side.row_bits))

    def feasible(code_rows: list[int]) -> bool:
        for req_rows, side_rows in user_data:
            pivots = _pivot_table(side_rows)
            for bits in code_rows:
                while bits:
                    low = bits & -bits
                    piv = pivots.get(low)
                    if piv is None:
                        pivots[low] = bits
                        break
                    bits ^= piv
            if not all(_in_span(pivots, r) for r in req_rows):
                return False
        return True

    def search(code_rows: list[int], pivots: dict[int, int], depth: int) -> bool:
        if depth == 0:
            return feasible(code_rows)
        for candidate in range(1, 1 << width):
            # Keep only rows independent of the ones already chosen.
            reduced = candidate
            while reduced:
                low = reduced & -reduced
                piv = pivots.get(low)
                if piv is None:
                    break
                reduced ^= piv
            if reduced == 0:
                continue
            low = reduced & -reduced
            pivots[low] = reduced
            code_rows.append(candidate)
            if search(code_rows, pivots, depth - 1):
                return True
            code_rows.pop()
            del pivots[low]
        return False

    for length in range(0, max_len + 1):
        if length * width > guard_bits:
            raise OracleGuardError(length, width, guard_bits)
        if search([], {}, length):
            return length
    return None


# -- solution file format -------------------------------------------------
#
# { "beta": b, "c_ic": [[bits]...], "chosen_rows": [...],
#   "a_mats": [[[bits]...]...], "b_mats": [[[bits]...]...],
#   "seed": s, "method": "...", "optimal_certified": bool }


@dataclass(frozen=True)
class SolutionRecord:
    """A solution plus the run metadata that produced it."""

    solution: IndexCodeSolution
    seed: int
    method: str
    optimal_certified: bool


def serialize_solution(record: SolutionRecord) -> bytes:
    sol = record.solution
    doc = {
        "beta": sol.beta,
        "c_ic": sol.c_ic.to_rows(),
        "chosen_rows": list(sol.chosen_rows),
        "a_mats": [m.to_rows() for m in sol.a_mats],
        "b_mats": [m.to_rows() for m in sol.b_mats],
        "seed": record.seed,
        "method": record.method,
        "optimal_certified": record.optimal_certified,
    }
    return dump_canonical(doc)


def parse_solution(text: bytes | str, instance: ProblemInstance) -> SolutionRecord:
    """Load a solution file, pinning matrix widths against the instance."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceError("expected a JSON object")
    try:
        beta = doc["beta"]
        width = instance.total_bits
        c_ic = Gf2Matrix.from_rows(doc["c_ic"], cols=width)
        if c_ic.nrows != beta:
            raise InstanceError(
                f"beta is {beta} but c_ic has {c_ic.nrows} rows"
            )
        f = instance.packet_bits
        a_mats = []
        b_mats = []
        for k in range(instance.num_users):
            user = instance.users[k]
            a_mats.append(
                Gf2Matrix.from_rows(doc["a_mats"][k], cols=user.side_info.nrows)
            )
            b_mats.append(Gf2Matrix.from_rows(doc["b_mats"][k], cols=beta))
            want = len(user.requests) * f
            if a_mats[-1].nrows != want or b_mats[-1].nrows != want:
                raise InstanceError(f"user {k}: decoder has wrong row count")
        sol = IndexCodeSolution(
            c_ic, tuple(doc["chosen_rows"]), tuple(b_mats), tuple(a_mats)
        )
        return SolutionRecord(
            sol, doc["seed"], doc["method"], doc["optimal_certified"]
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise InstanceError(f"malformed solution file: {exc!r}") from None
