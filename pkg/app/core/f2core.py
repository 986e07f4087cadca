"""
Dense F2 matrices and persymmetric (Hankel) stacks

Rows are packed into Python integers, bit j of a row holding column j.
A persymmetric block built from coefficients c_0, c_1, ... has entry
(i, j) = c_{i+j}; with the coefficients packed little-endian into an integer
C, row i is simply (C >> i) masked to the block width. Coefficient alpha_{i+1}
of the triple is stored at bit i.
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union
import logging

from app.core.exceptions import ShapeError

logger = logging.getLogger(__name__)

Bits = Union[Sequence[int], Tuple[int, ...]]


def bits_to_int(bits: Bits) -> int:
    """Pack a 0/1 sequence little-endian into an integer."""
    value = 0
    for index, bit in enumerate(bits):
        if bit not in (0, 1):
            raise ShapeError(f"entry {bit!r} at position {index} is not a bit")
        value |= bit << index
    return value


def int_to_bits(value: int, length: int) -> Tuple[int, ...]:
    return tuple((value >> index) & 1 for index in range(length))


def mask(width: int) -> int:
    return (1 << width) - 1


@dataclass(frozen=True)
class BitMatrix:
    """Immutable matrix over F2 with bit-packed rows."""

    rows: int
    cols: int
    data: Tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"negative dimensions {self.rows}x{self.cols}")
        if len(self.data) != self.rows:
            raise ShapeError(f"expected {self.rows} rows, got {len(self.data)}")
        limit = mask(self.cols)
        for row in self.data:
            if row < 0 or row & ~limit:
                raise ShapeError(f"row {row:#x} has bits beyond column {self.cols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Bits], cols: Optional[int] = None) -> "BitMatrix":
        """Build from nested 0/1 lists."""
        rows = [tuple(row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise ShapeError(f"ragged row of length {len(row)}, expected {cols}")
        return cls(len(rows), cols, tuple(bits_to_int(row) for row in rows))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls(size, size, tuple(1 << index for index in range(size)))

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def to_lists(self) -> List[List[int]]:
        return [list(int_to_bits(row, self.cols)) for row in self.data]

    def xor(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError(
                f"cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}"
            )
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.data, other.data)))

    def vstack(self, *others: "BitMatrix") -> "BitMatrix":
        data = list(self.data)
        for other in others:
            if other.cols != self.cols:
                raise ShapeError(f"column mismatch {other.cols} != {self.cols}")
            data.extend(other.data)
        return BitMatrix(len(data), self.cols, tuple(data))

    def __str__(self) -> str:
        return "\n".join("".join(str(bit) for bit in row) for row in self.to_lists())


@dataclass(frozen=True)
class TripleShape:
    """Blocks of s, s+m and s+m+l persymmetric rows, all of width k."""

    s: int
    m: int
    l: int
    k: int

    def __post_init__(self):
        if self.s < 1 or self.k < 1 or self.m < 0 or self.l < 0:
            raise ShapeError(f"invalid triple shape s={self.s} m={self.m} l={self.l} k={self.k}")

    @classmethod
    def from_blocks(cls, blocks: Sequence[int], k: int) -> "TripleShape":
        """Shape of three blocks given in any order (rank is row-order invariant)."""
        if len(blocks) != 3:
            raise ShapeError(f"a triple stack needs three blocks, got {len(blocks)}")
        r1, r2, r3 = sorted(blocks)
        return cls(r1, r2 - r1, r3 - r2, k)

    @property
    def blocks(self) -> Tuple[int, int, int]:
        return (self.s, self.s + self.m, self.s + self.m + self.l)

    @property
    def total_rows(self) -> int:
        return 3 * self.s + 2 * self.m + self.l

    @property
    def max_rank(self) -> int:
        return min(self.k, self.total_rows)

    @property
    def coset_lengths(self) -> Tuple[int, int, int]:
        """Coefficient counts of alpha, beta and gamma."""
        return tuple(self.k + rows - 1 for rows in self.blocks)

    @property
    def coefficient_bits(self) -> int:
        return 3 * self.k + 3 * self.s + 2 * self.m + self.l - 3

    def as_dict(self) -> dict:
        return {"s": self.s, "m": self.m, "l": self.l, "k": self.k}


@dataclass(frozen=True)
class DoubleShape:
    """Two stacked persymmetric blocks of rows1 and rows2 rows."""

    rows1: int
    rows2: int
    k: int

    def __post_init__(self):
        if self.rows1 < 1 or self.rows2 < 1 or self.k < 1:
            raise ShapeError(f"invalid double shape {self.rows1},{self.rows2} x {self.k}")

    @property
    def total_rows(self) -> int:
        return self.rows1 + self.rows2

    @property
    def max_rank(self) -> int:
        return min(self.k, self.total_rows)

    @property
    def coefficient_bits(self) -> int:
        return 2 * self.k + self.rows1 + self.rows2 - 2

    def as_dict(self) -> dict:
        return {"rows1": self.rows1, "rows2": self.rows2, "k": self.k}


@dataclass(frozen=True)
class MixedShape:
    """n unstructured rows atop persymmetric blocks of 1+m and 1+m+l rows."""

    n: int
    m: int
    l: int
    k: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or self.l < 0 or self.k < 1:
            raise ShapeError(f"invalid mixed shape n={self.n} m={self.m} l={self.l} k={self.k}")

    @property
    def total_rows(self) -> int:
        return self.n + 2 * self.m + self.l + 2

    @property
    def max_rank(self) -> int:
        return min(self.k, self.total_rows)

    @property
    def coefficient_bits(self) -> int:
        return self.n * self.k + (self.k + self.m) + (self.k + self.m + self.l)

    @property
    def double(self) -> DoubleShape:
        return DoubleShape(1 + self.m, 1 + self.m + self.l, self.k)

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "l": self.l, "k": self.k}


@dataclass(frozen=True)
class CoefficientTriple:
    """Truncated coefficient sequences (alpha, beta, gamma) of one stacked matrix."""

    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    gamma: Tuple[int, ...]

    @classmethod
    def from_ints(cls, alpha: int, beta: int, gamma: int, shape: TripleShape) -> "CoefficientTriple":
        la, lb, lg = shape.coset_lengths
        return cls(int_to_bits(alpha, la), int_to_bits(beta, lb), int_to_bits(gamma, lg))

    @classmethod
    def zero(cls, shape: TripleShape) -> "CoefficientTriple":
        return cls.from_ints(0, 0, 0, shape)

    def matches(self, shape: TripleShape) -> bool:
        return (len(self.alpha), len(self.beta), len(self.gamma)) == shape.coset_lengths


def persymmetric_rows(coeffs: int, rows: int, cols: int) -> Tuple[int, ...]:
    """Packed rows of the persymmetric block generated by packed coefficients."""
    width = mask(cols)
    return tuple((coeffs >> i) & width for i in range(rows))


def persymmetric_matrix(coeffs: Bits, rows: int, cols: int) -> BitMatrix:
    """rows x cols matrix with entry (i, j) = coeffs[i + j]."""
    if rows < 1 or cols < 1:
        raise ShapeError(f"degenerate persymmetric block {rows}x{cols}")
    if len(coeffs) != rows + cols - 1:
        raise ShapeError(
            f"a {rows}x{cols} persymmetric block needs {rows + cols - 1} coefficients, got {len(coeffs)}"
        )
    return BitMatrix(rows, cols, persymmetric_rows(bits_to_int(coeffs), rows, cols))


def stack_double(a: Bits, b: Bits, rows1: int, rows2: int, k: int) -> BitMatrix:
    return persymmetric_matrix(a, rows1, k).vstack(persymmetric_matrix(b, rows2, k))


def stack_triple(c: CoefficientTriple, shape: TripleShape) -> BitMatrix:
    """The (3s+2m+l) x k stack D^[s, s+m, s+m+l] x k of c."""
    if not c.matches(shape):
        raise ShapeError(
            f"coefficient lengths {(len(c.alpha), len(c.beta), len(c.gamma))} "
            f"do not match {shape.coset_lengths}"
        )
    r1, r2, r3 = shape.blocks
    return persymmetric_matrix(c.alpha, r1, shape.k).vstack(
        persymmetric_matrix(c.beta, r2, shape.k),
        persymmetric_matrix(c.gamma, r3, shape.k),
    )


def stack_mixed(general_rows: BitMatrix, t: Bits, eta: Bits, ms: MixedShape) -> BitMatrix:
    """n literal rows followed by persymmetric blocks of 1+m and 1+m+l rows."""
    if general_rows.rows != ms.n or (ms.n and general_rows.cols != ms.k):
        raise ShapeError(
            f"general rows are {general_rows.rows}x{general_rows.cols}, expected {ms.n}x{ms.k}"
        )
    blocks = persymmetric_matrix(t, 1 + ms.m, ms.k).vstack(
        persymmetric_matrix(eta, 1 + ms.m + ms.l, ms.k)
    )
    if ms.n == 0:
        return blocks
    return general_rows.vstack(blocks)


def rank_of_rows(rows: Iterable[int]) -> int:
    """Rank over F2 of packed rows, pivoting on the lowest set bit."""
    pivots = {}
    for row in rows:
        while row:
            low = row & -row
            pivot = pivots.get(low)
            if pivot is None:
                pivots[low] = row
                break
            row ^= pivot
    return len(pivots)


def rank(mat: BitMatrix) -> int:
    return rank_of_rows(mat.data)


def transpose(mat: BitMatrix) -> BitMatrix:
    data = []
    for j in range(mat.cols):
        column = 0
        for i, row in enumerate(mat.data):
            column |= ((row >> j) & 1) << i
        data.append(column)
    return BitMatrix(mat.cols, mat.rows, tuple(data))


def truncate_columns(mat: BitMatrix, k2: int) -> BitMatrix:
    """First k2 columns of mat."""
    if k2 < 1 or k2 > mat.cols:
        raise ShapeError(f"cannot keep {k2} of {mat.cols} columns")
    width = mask(k2)
    return BitMatrix(mat.rows, k2, tuple(row & width for row in mat.data))
