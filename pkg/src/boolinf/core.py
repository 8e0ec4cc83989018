"""Bit-packed truth tables for Boolean functions on {0,1}^n.

A function on ``n`` variables is stored as a Python ``int`` of ``2**n`` bits:
bit ``i`` of the table is ``f(x)`` where coordinate ``j`` of ``x`` is bit ``j``
of ``i`` (coordinate 0 is the least significant bit).  Coordinates are
0-based throughout the library API; the text formats (DIMACS, family files,
CLI coalition lists) use 1-based indices.

Python integers give word-parallel AND/OR/XOR/shift in C, so every operation
below folds whole half-tables at once instead of looping over points.
"""

from __future__ import annotations

import functools
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

N_MAX = 26

BFN1_MAGIC = b"BFN1"


class DimensionError(ValueError):
    """Raised when an exact truth-table operation is asked for too many variables."""


class InvariantViolation(RuntimeError):
    """An inequality or identity that must hold exactly was observed to fail."""


def check_dimension(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise DimensionError(f"variable count must be a non-negative integer, got {n!r}")
    if n > N_MAX:
        raise DimensionError(
            f"n={n} exceeds N_MAX={N_MAX} for exact truth tables; "
            "use boolinf.montecarlo for sampled estimates"
        )


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class DyadicMeasure:
    """An exact dyadic rational ``count / 2**exponent``.

    Probabilities satisfy ``0 <= count <= 2**exponent``; sums of probabilities
    (total influence) may exceed one.
    """

    count: int
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be non-negative")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.count, 1 << self.exponent)

    def __float__(self) -> float:
        return float(self.fraction)

    def _align(self, other):
        if isinstance(other, DyadicMeasure):
            e = max(self.exponent, other.exponent)
            return (self.count << (e - self.exponent), other.count << (e - other.exponent), e)
        return None

    def __add__(self, other):
        aligned = self._align(other)
        if aligned is None:
            return NotImplemented
        a, b, e = aligned
        return DyadicMeasure(a + b, e)

    def __sub__(self, other):
        aligned = self._align(other)
        if aligned is None:
            return NotImplemented
        a, b, e = aligned
        return DyadicMeasure(a - b, e)

    def __eq__(self, other):
        if isinstance(other, DyadicMeasure):
            a, b, _ = self._align(other)
            return a == b
        if isinstance(other, (int, Fraction)):
            return self.fraction == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, DyadicMeasure):
            a, b, _ = self._align(other)
            return a < b
        if isinstance(other, (int, Fraction)):
            return self.fraction < other
        return NotImplemented

    def __hash__(self):
        return hash(self.fraction)

    def __repr__(self):
        return f"DyadicMeasure({self.count}/2^{self.exponent})"

    def to_dict(self) -> dict:
        frac = self.fraction
        return {
            "count": self.count,
            "exponent": self.exponent,
            "exact": f"{frac.numerator}/{frac.denominator}",
            "float": float(self),
        }


@dataclass(frozen=True)
class Coalition:
    """A subset S of the n coordinates, stored as a bit mask."""

    n: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#x} has bits outside [0, {self.n})")

    @classmethod
    def of(cls, n: int, indices: Iterable[int]) -> "Coalition":
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"coordinate {i} outside [0, {n})")
            mask |= 1 << i
        return cls(n, mask)

    @classmethod
    def empty(cls, n: int) -> "Coalition":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "Coalition":
        return cls(n, (1 << n) - 1)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def indices(self) -> tuple:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def complement(self) -> "Coalition":
        return Coalition(self.n, ((1 << self.n) - 1) ^ self.mask)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.indices())


CoalitionLike = Union[Coalition, Iterable[int]]


def as_coalition(S: CoalitionLike, n: int) -> Coalition:
    if isinstance(S, Coalition):
        if S.n != n:
            raise ValueError(f"coalition lives in dimension {S.n}, function in {n}")
        return S
    return Coalition.of(n, S)


# Low-half masks: bit p set iff coordinate i of point p is 0.
@functools.lru_cache(maxsize=64)
def coordinate_mask(n: int, i: int) -> int:
    width = 1 << i
    block = (1 << width) - 1  # `width` ones followed (above) by `width` zeros
    period = 2 * width
    total = 1 << n
    mask = block
    span = period
    while span < total:
        mask |= mask << span
        span *= 2
    return mask & ((1 << total) - 1)


def literal_mask(n: int, i: int, value: int) -> int:
    """Indicator of the points with x_i == value."""
    m0 = coordinate_mask(n, i)
    return m0 if value == 0 else m0 << (1 << i)


def full_table(n: int) -> int:
    return (1 << (1 << n)) - 1


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    table: int

    def __post_init__(self):
        check_dimension(self.n)
        if self.table < 0 or self.table >> (1 << self.n):
            raise ValueError("truth table has bits beyond 2**n")

    def __call__(self, x: int) -> int:
        return evaluate(self, x)

    def __repr__(self) -> str:
        if self.n <= 6:
            return f"BooleanFunction(n={self.n}, table={self.table:#x})"
        return f"BooleanFunction(n={self.n}, weight={self.weight})"

    def __invert__(self) -> "BooleanFunction":
        return BooleanFunction(self.n, full_table(self.n) ^ self.table)

    def __and__(self, other: "BooleanFunction") -> "BooleanFunction":
        _same_n(self, other)
        return BooleanFunction(self.n, self.table & other.table)

    def __or__(self, other: "BooleanFunction") -> "BooleanFunction":
        _same_n(self, other)
        return BooleanFunction(self.n, self.table | other.table)

    def __xor__(self, other: "BooleanFunction") -> "BooleanFunction":
        _same_n(self, other)
        return BooleanFunction(self.n, self.table ^ other.table)

    @property
    def weight(self) -> int:
        return self.table.bit_count()

    def is_constant(self) -> bool:
        return self.table == 0 or self.table == full_table(self.n)

    def to_array(self) -> np.ndarray:
        """Values at points 0..2**n-1 as a uint8 array."""
        size = 1 << self.n
        nbytes = (size + 7) // 8
        raw = np.frombuffer(self.table.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[:size]

    @classmethod
    def from_array(cls, n: int, values) -> "BooleanFunction":
        arr = np.asarray(values, dtype=bool)
        if arr.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} values, got shape {arr.shape}")
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(n, int.from_bytes(packed, "little"))

    @classmethod
    def from_callable(cls, n: int, fn) -> "BooleanFunction":
        table = 0
        for x in range(1 << n):
            if fn(x):
                table |= 1 << x
        return cls(n, table)


def _same_n(f: BooleanFunction, g: BooleanFunction) -> None:
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")


# -- standard functions -------------------------------------------------------

def constant(n: int, value: int) -> BooleanFunction:
    return BooleanFunction(n, full_table(n) if value else 0)


def dictator(n: int, i: int) -> BooleanFunction:
    return BooleanFunction(n, literal_mask(n, i, 1))


def and_all(n: int) -> BooleanFunction:
    return BooleanFunction(n, 1 << ((1 << n) - 1))


def parity(n: int) -> BooleanFunction:
    points = np.arange(1 << n, dtype=np.uint64)
    return BooleanFunction.from_array(n, _popcount_array(points) & 1)


def majority(n: int) -> BooleanFunction:
    points = np.arange(1 << n, dtype=np.uint64)
    return BooleanFunction.from_array(n, 2 * _popcount_array(points) > n)


def random_function(n: int, rng: np.random.Generator, density: float = 0.5) -> BooleanFunction:
    return BooleanFunction.from_array(n, rng.random(1 << n) < density)


def _popcount_array(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    while a.any():
        out += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)
    return out


# -- evaluation and measure ---------------------------------------------------

def evaluate(f: BooleanFunction, x: int) -> int:
    if not 0 <= x < (1 << f.n):
        raise IndexError(f"point {x} outside [0, 2**{f.n})")
    return (f.table >> x) & 1


def measure(f: BooleanFunction) -> DyadicMeasure:
    return DyadicMeasure(f.weight, f.n)


def is_monotone(f: BooleanFunction) -> bool:
    for i in range(f.n):
        m0 = coordinate_mask(f.n, i)
        lo = f.table & m0
        hi = (f.table >> (1 << i)) & m0
        if lo & ~hi:
            return False
    return True


# -- half-table folds -----------------------------------------------------------

def fold_or(table: int, n: int, i: int) -> int:
    """OR of the two halves along coordinate i, copied back to both halves."""
    w = 1 << i
    m0 = coordinate_mask(n, i)
    g = (table & m0) | ((table >> w) & m0)
    return g | (g << w)


def fold_and(table: int, n: int, i: int) -> int:
    w = 1 << i
    m0 = coordinate_mask(n, i)
    g = table & (table >> w) & m0
    return g | (g << w)


def half_or(table: int, n: int, i: int) -> int:
    """Like fold_or but the result is kept only on the x_i = 0 half."""
    m0 = coordinate_mask(n, i)
    return (table & m0) | ((table >> (1 << i)) & m0)


def half_and(table: int, n: int, i: int) -> int:
    return table & (table >> (1 << i)) & coordinate_mask(n, i)


def flip(table: int, n: int, i: int) -> int:
    """Table of x -> f(x xor e_i)."""
    w = 1 << i
    m0 = coordinate_mask(n, i)
    return ((table & m0) << w) | ((table >> w) & m0)


def or_project(f: BooleanFunction, S: CoalitionLike) -> BooleanFunction:
    """g(x) = 1 iff some setting of the S-coordinates of x gives f = 1."""
    S = as_coalition(S, f.n)
    t = f.table
    for i in S.indices():
        t = fold_or(t, f.n, i)
    return BooleanFunction(f.n, t)


def and_project(f: BooleanFunction, S: CoalitionLike) -> BooleanFunction:
    """g(x) = 1 iff every setting of the S-coordinates of x gives f = 1."""
    S = as_coalition(S, f.n)
    t = f.table
    for i in S.indices():
        t = fold_and(t, f.n, i)
    return BooleanFunction(f.n, t)


def restrict(f: BooleanFunction, S: CoalitionLike, v: int) -> BooleanFunction:
    """Fix the S-coordinates to the bits of ``v``.

    ``v`` is a point whose bits outside S must be zero.  The result keeps all
    n coordinates and is constant along every S-direction.
    """
    S = as_coalition(S, f.n)
    if v & ~S.mask:
        raise ValueError("assignment sets coordinates outside the coalition")
    t = f.table
    for i in S.indices():
        w = 1 << i
        m0 = coordinate_mask(f.n, i)
        half = (t >> w) & m0 if v >> i & 1 else t & m0
        t = half | (half << w)
    return BooleanFunction(f.n, t)


def shift(f: BooleanFunction, i: int) -> BooleanFunction:
    """Up-compression along coordinate i.

    For every edge (x, x + e_i) with f = 1 below and f = 0 above, the two
    values are swapped.
    """
    if not 0 <= i < f.n:
        raise ValueError(f"coordinate {i} outside [0, {f.n})")
    w = 1 << i
    m0 = coordinate_mask(f.n, i)
    lo = f.table & m0
    hi = (f.table >> w) & m0
    return BooleanFunction(f.n, (lo & hi) | ((lo | hi) << w))


def monotonize(f: BooleanFunction) -> BooleanFunction:
    """Shift along coordinates 0..n-1 repeatedly until a full pass is stable."""
    g = f
    while True:
        before = g.table
        for i in range(f.n):
            g = shift(g, i)
        if g.table == before:
            return g


# -- BFN1 file format ------------------------------------------------------------

def to_bfn1(f: BooleanFunction) -> bytes:
    nbytes = ((1 << f.n) + 7) // 8
    return BFN1_MAGIC + struct.pack("<I", f.n) + f.table.to_bytes(nbytes, "little")


def from_bfn1(data: bytes) -> BooleanFunction:
    if data[:4] != BFN1_MAGIC:
        raise ValueError("not a BFN1 stream (bad magic)")
    (n,) = struct.unpack("<I", data[4:8])
    check_dimension(n)
    nbytes = ((1 << n) + 7) // 8
    body = data[8:]
    if len(body) != nbytes:
        raise ValueError(f"BFN1 body has {len(body)} bytes, expected {nbytes}")
    table = int.from_bytes(body, "little")
    if table >> (1 << n):
        raise ValueError("BFN1 padding bits must be zero")
    return BooleanFunction(n, table)


def save_bfn1(f: BooleanFunction, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_bfn1(f))


def load_bfn1(path) -> BooleanFunction:
    with open(path, "rb") as fh:
        return from_bfn1(fh.read())
