"""Set-family view: traces, shattering and arrow-relation searches.

A family F of subsets of [n] is the support of a Boolean function
(F = f^{-1}(1)), a subset being identified with its indicator point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .core import (
    BooleanFunction,
    Coalition,
    CoalitionLike,
    DyadicMeasure,
    as_coalition,
    half_or,
)
from .generators import derive_seed


@dataclass(frozen=True)
class SetFamily:
    n: int
    members: tuple

    def __post_init__(self):
        members = tuple(sorted(set(int(m) for m in self.members)))
        if members and (members[0] < 0 or members[-1] >> self.n):
            raise ValueError(f"member outside 2^[{self.n}]")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def from_function(cls, f: BooleanFunction) -> "SetFamily":
        return cls(f.n, tuple(int(i) for i in np.flatnonzero(f.to_array())))

    def to_function(self) -> BooleanFunction:
        t = 0
        for member in self.members:
            t |= 1 << member
        return BooleanFunction(self.n, t)

    @classmethod
    def from_sets(cls, n: int, sets) -> "SetFamily":
        return cls(n, tuple(Coalition.of(n, s).mask for s in sets))

    def as_sets(self) -> list:
        return [tuple(i for i in range(self.n) if m >> i & 1) for m in self.members]


def trace(F: SetFamily, Y: CoalitionLike) -> SetFamily:
    """{A & Y : A in F}, still indexed on the ambient ground set."""
    Y = as_coalition(Y, F.n)
    return SetFamily(F.n, tuple({m & Y.mask for m in F.members}))


def is_shattered(F: SetFamily, Y: CoalitionLike) -> bool:
    Y = as_coalition(Y, F.n)
    return len(trace(F, Y)) == 1 << Y.size


def _trace_size_fast(table: int, n: int, Y_mask: int) -> int:
    t = table
    for i in range(n):
        if not Y_mask >> i & 1:
            t = half_or(t, n, i)
    return t.bit_count()


def find_shattered(F: SetFamily, r: int) -> Optional[Coalition]:
    """Lexicographically smallest shattered r-set, or None."""
    if not 0 <= r <= F.n:
        raise ValueError(f"r={r} outside [0, {F.n}]")
    found = find_shattered_table(F.to_function().table, F.n, r)
    return None if found is None else Coalition.of(F.n, found)


def find_shattered_table(table: int, n: int, r: int) -> Optional[tuple]:
    """Index tuple of the first shattered r-set of the family with this indicator table.

    Depth-first over coordinates in increasing order, trying "keep in Y"
    before "drop".  Dropping coordinate i ORs the two halves together, so the
    table's popcount is the number of distinct patterns on the coordinates
    still in play.  That count only shrinks along a branch, and Y is
    shattered iff it ends at 2**r, which gives the pruning rule.
    """
    target = 1 << r

    def search(t, start, need):
        if t.bit_count() < target:
            return None
        if need == 0:
            for i in range(start, n):
                t = half_or(t, n, i)
            return () if t.bit_count() == target else None
        if n - start < need:
            return None
        found = search(t, start + 1, need - 1)
        if found is not None:
            return (start,) + found
        return search(half_or(t, n, start), start + 1, need)

    return search(table, 0, r)


def trace_size(table: int, n: int, Y: Coalition) -> int:
    """|F|_Y| computed by folding the indicator table over the complement of Y."""
    return _trace_size_fast(table, n, Y.mask)


def max_trace_size(F: SetFamily, r: int):
    """(Y, |F|_Y|) maximizing the trace size over r-sets; earliest Y wins ties."""
    n = F.n
    if not 0 <= r <= n:
        raise ValueError(f"r={r} outside [0, {n}]")
    table = F.to_function().table
    best = None
    for combo in combinations(range(n), r):
        Y = Coalition.of(n, combo)
        size = _trace_size_fast(table, n, Y.mask)
        if best is None or size > best[1]:
            best = (Y, size)
    return best


def jplus_via_trace(f: BooleanFunction, S: CoalitionLike) -> DyadicMeasure:
    """J+_S(f) = |F|_T| / 2^|T| with F = f^{-1}(1) and T the complement of S."""
    S = as_coalition(S, f.n)
    T = S.complement()
    return DyadicMeasure(len(trace(SetFamily.from_function(f), T)), T.size)


def sauer_shelah_threshold(n: int, r: int) -> int:
    """C(n, <r): the largest family size that can avoid shattering an r-set."""
    return sum(math.comb(n, j) for j in range(r))


# -- arrow relation ------------------------------------------------------------------

def _excess(table: int, n: int, r: int, M: int) -> int:
    return sum(max(0, _trace_size_fast(table, n, Coalition.of(n, c).mask) - (M - 1))
               for c in combinations(range(n), r))


def verify_arrow_counterexample(F: SetFamily, M: int, r: int) -> bool:
    """True iff every r-trace of F has fewer than M members (set-based check)."""
    return all(len(trace(F, Coalition.of(F.n, c))) < M for c in combinations(range(F.n), r))


def arrow_falsify(N: int, n: int, M: int, r: int, strategy: str = "local",
                  budget: int = 1000, seed: int = 0, moves_per_restart: int = 50,
                  verify_budget: int = 10**7) -> Optional[SetFamily]:
    """Look for a family of size N on [n] whose every r-trace is smaller than M.

    A returned family is a counterexample to (N, n) -> (M, r), re-verified by
    exhaustive set-based trace enumeration.  None means nothing was found
    within ``budget`` family evaluations, not that none exists.
    """
    if not 0 <= N <= 1 << n:
        raise ValueError(f"N={N} outside [0, 2^{n}]")
    if not 0 <= r <= n:
        raise ValueError(f"r={r} outside [0, {n}]")
    if strategy not in ("local", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if math.comb(n, r) * max(N, 1) > verify_budget:
        raise ValueError("instance exceeds the exact verification budget")

    evaluations = 0
    restart = 0
    universe = 1 << n
    while evaluations < budget:
        rng = np.random.default_rng(derive_seed(seed, restart))
        restart += 1
        members = [int(x) for x in rng.choice(universe, size=N, replace=False)]
        table = sum(1 << x for x in members)
        score = _excess(table, n, r, M)
        evaluations += 1
        moves = moves_per_restart if strategy == "local" else 0
        while score > 0 and moves > 0 and evaluations < budget and 0 < N < universe:
            moves -= 1
            out_pos = int(rng.integers(N))
            candidate = int(rng.integers(universe))
            if table >> candidate & 1:
                continue
            new_table = (table & ~(1 << members[out_pos])) | (1 << candidate)
            new_score = _excess(new_table, n, r, M)
            evaluations += 1
            if new_score <= score:
                members[out_pos] = candidate
                table, score = new_table, new_score
        if score == 0:
            F = SetFamily(n, tuple(members))
            if verify_arrow_counterexample(F, M, r):
                return F
    return None


# -- family file format --------------------------------------------------------------

def dumps_family(F: SetFamily) -> str:
    lines = [f"n={F.n}"]
    for s in F.as_sets():
        lines.append(",".join(str(i + 1) for i in s))
    return "\n".join(lines) + "\n"


def loads_family(text: str) -> SetFamily:
    """Parse the text format; an empty line after the header is the empty set."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith("n="):
        raise ValueError("family file must start with 'n=<n>'")
    n = int(lines[0][2:])
    sets = []
    for line in lines[1:]:
        line = line.strip()
        sets.append([int(tok) - 1 for tok in line.split(",")] if line else [])
    return SetFamily.from_sets(n, sets)
