"""Dense GF(2) matrix arithmetic on bit-packed rows.

Every matrix handled by this package (packet vectors, cache encodings,
request selectors, index codes, decoders) is a dense binary matrix.  Rows
are packed LSB-first into Python integers, so row addition is a single
XOR and Gaussian elimination reduces to integer bit tricks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class Gf2Error(Exception):
    """Base class for GF(2) matrix errors."""


class DimensionError(Gf2Error):
    """Operand shapes are incompatible."""


class RaggedRowsError(Gf2Error):
    """Input rows do not all have the same length."""

    def __init__(self, row_index: int, got: int, expected: int):
        self.row_index = row_index
        super().__init__(
            f"row {row_index} has length {got}, expected {expected}"
        )


class UnsolvableError(Gf2Error):
    """A linear system has no solution; carries the first bad row index."""

    def __init__(self, row_index: int):
        self.row_index = row_index
        super().__init__(f"target row {row_index} is outside the row space")


def rank_of_packed_rows(row_bits: Iterable[int]) -> int:
    """Rank of a set of bit-packed rows, via incremental XOR elimination."""
    pivots: dict[int, int] = {}
    rank = 0
    for bits in row_bits:
        while bits:
            low = bits & -bits
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = bits
                rank += 1
                break
            bits ^= piv
    return rank


@dataclass(frozen=True)
class Gf2Matrix:
    """Immutable binary matrix; ``row_bits[i]`` holds row i, bit j = column j.

    The empty matrix (no rows) is valid and has rank 0.  Padding bits at or
    beyond ``ncols`` are never set.
    """

    ncols: int
    row_bits: tuple[int, ...]

    def __post_init__(self):
        if self.ncols < 0:
            raise DimensionError(f"negative column count {self.ncols}")
        limit = 1 << self.ncols
        for i, bits in enumerate(self.row_bits):
            if bits < 0 or bits >= limit:
                raise DimensionError(
                    f"row {i} has bits outside the declared width {self.ncols}"
                )

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rows(
        cls, bit_rows: Sequence[Sequence[int]], cols: int | None = None
    ) -> Gf2Matrix:
        """Build a matrix from explicit 0/1 rows.

        ``cols`` pins the width, which is required for an empty row list
        and otherwise must agree with the rows.  Raises RaggedRowsError
        naming the first offending row.
        """
        rows = [list(r) for r in bit_rows]
        if cols is None:
            if not rows:
                raise DimensionError("empty input needs an explicit width")
            cols = len(rows[0])
        packed = []
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise RaggedRowsError(i, len(r), cols)
            bits = 0
            for j, v in enumerate(r):
                if v not in (0, 1):
                    raise DimensionError(f"row {i}, column {j}: {v!r} is not a bit")
                bits |= v << j
            packed.append(bits)
        return cls(cols, tuple(packed))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Gf2Matrix:
        return cls(ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> Gf2Matrix:
        return cls(n, tuple(1 << i for i in range(n)))

    # -- shape and access ---------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.row_bits)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_bits), self.ncols)

    def get(self, i: int, j: int) -> int:
        if not 0 <= j < self.ncols:
            raise IndexError(f"column {j} out of range")
        return (self.row_bits[i] >> j) & 1

    def row(self, i: int) -> list[int]:
        bits = self.row_bits[i]
        return [(bits >> j) & 1 for j in range(self.ncols)]

    def to_rows(self) -> list[list[int]]:
        return [self.row(i) for i in range(self.nrows)]

    def take_rows(self, indices: Iterable[int]) -> Gf2Matrix:
        return Gf2Matrix(self.ncols, tuple(self.row_bits[i] for i in indices))

    def transpose(self) -> Gf2Matrix:
        cols = []
        for j in range(self.ncols):
            bits = 0
            for i, row in enumerate(self.row_bits):
                bits |= ((row >> j) & 1) << i
            cols.append(bits)
        return Gf2Matrix(self.nrows, tuple(cols))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Gf2Matrix(
            self.ncols,
            tuple(a ^ b for a, b in zip(self.row_bits, other.row_bits)),
        )

    def __matmul__(self, other: Gf2Matrix) -> Gf2Matrix:
        """Matrix product over GF(2): AND per entry, XOR accumulate.

        Row i of the result is the XOR of the rows of ``other`` selected
        by the set bits of row i of ``self``.  An empty inner dimension
        yields the zero matrix of the outer shape.
        """
        if self.ncols != other.nrows:
            raise DimensionError(
                f"inner dimensions differ: {self.shape} @ {other.shape}"
            )
        out = []
        for bits in self.row_bits:
            acc = 0
            while bits:
                k = (bits & -bits).bit_length() - 1
                acc ^= other.row_bits[k]
                bits &= bits - 1
            out.append(acc)
        return Gf2Matrix(other.ncols, tuple(out))

    def mul_vec(self, x_bits: int) -> int:
        """Product with a packed column vector; output bit i = parity(row_i AND x)."""
        out = 0
        for i, row in enumerate(self.row_bits):
            out |= ((row & x_bits).bit_count() & 1) << i
        return out

    def is_zero(self) -> bool:
        return not any(self.row_bits)

    # -- rank and solving ----------------------------------------------

    def rank(self) -> int:
        """Number of pivots in row echelon form; the matrix is not mutated."""
        return rank_of_packed_rows(self.row_bits)

    def independent_rows(self) -> list[int]:
        """Indices of the earliest-first maximal linearly independent row subset.

        Greedy top to bottom: a row is kept iff it is independent of the
        rows kept before it, so the result is the lexicographically first
        maximal independent subset and its size equals the rank.
        """
        pivots: dict[int, int] = {}
        kept = []
        for i, bits in enumerate(self.row_bits):
            while bits:
                low = bits & -bits
                piv = pivots.get(low)
                if piv is None:
                    pivots[low] = bits
                    kept.append(i)
                    break
                bits ^= piv
        return kept


def vstack(mats: Sequence[Gf2Matrix], ncols: int | None = None) -> Gf2Matrix:
    """Stack matrices vertically; ``ncols`` pins the width when ``mats`` is empty."""
    if not mats:
        if ncols is None:
            raise DimensionError("empty stack needs an explicit width")
        return Gf2Matrix(ncols, ())
    width = mats[0].ncols
    rows: list[int] = []
    for m in mats:
        if m.ncols != width:
            raise DimensionError(f"cannot stack widths {width} and {m.ncols}")
        rows.extend(m.row_bits)
    return Gf2Matrix(width, tuple(rows))


def solve_rows(basis: Gf2Matrix, targets: Gf2Matrix) -> Gf2Matrix:
    """Find X with X @ basis == targets, or raise UnsolvableError.

    The returned coefficients are canonical: each target row is expressed
    over the greedy pivot subset of ``basis`` rows, with zeros on the
    dependent rows.  Raises UnsolvableError naming the first target row
    outside the row space of ``basis``.
    """
    if basis.ncols != targets.ncols:
        raise DimensionError(
            f"basis width {basis.ncols} != target width {targets.ncols}"
        )
    # Reduced basis rows, each paired with its expression over the
    # original rows (a bitset of row indices).
    pivots: dict[int, tuple[int, int]] = {}
    for i, bits in enumerate(basis.row_bits):
        combo = 1 << i
        while bits:
            low = bits & -bits
            entry = pivots.get(low)
            if entry is None:
                pivots[low] = (bits, combo)
                break
            bits ^= entry[0]
            combo ^= entry[1]
    x_rows = []
    for ti, bits in enumerate(targets.row_bits):
        combo = 0
        while bits:
            low = bits & -bits
            entry = pivots.get(low)
            if entry is None:
                raise UnsolvableError(ti)
            bits ^= entry[0]
            combo ^= entry[1]
        x_rows.append(combo)
    return Gf2Matrix(basis.nrows, tuple(x_rows))
