"""Seeded sampling for dimensions where a 2**n truth table is out of reach.

Sample points are bit-sliced: each variable is a Python int whose bit j is
that variable's value at sample j, so one clause is checked against a whole
batch with k big-integer ORs.  Batch b of an estimator draws from
``derive_seed(seed, b)``; counts are summed, so the merge is order-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Coalition, CoalitionLike, as_coalition
from .generators import (
    CnfFormula,
    derive_seed,
    floyd_subsets,
    missing_clauses,
    random_kcnf,
)
from .analytic import miss_probability

BATCH = 1 << 16


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width: float
    samples: int
    seed: int

    @classmethod
    def bernoulli(cls, hits: int, samples: int, seed: int) -> "Estimate":
        if samples < 1:
            raise ValueError("need at least one sample")
        mean = hits / samples
        return cls(mean, 3 * math.sqrt(mean * (1 - mean) / samples), samples, seed)

    def covers(self, value: float) -> bool:
        return abs(self.mean - value) <= self.half_width

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _batches(samples: int):
    b = 0
    done = 0
    while done < samples:
        size = min(BATCH, samples - done)
        yield b, size
        done += size
        b += 1


def _random_bitslices(rng: np.random.Generator, n: int, size: int) -> list:
    """n random ints of ``size`` bits each."""
    nbytes = (size + 7) // 8
    raw = rng.integers(0, 256, size=(n, nbytes), dtype=np.uint8)
    if size % 8:
        raw[:, -1] &= (1 << (size % 8)) - 1
    return [int.from_bytes(row.tobytes(), "little") for row in raw]


def _count_satisfying(F: CnfFormula, columns: Sequence[int], size: int) -> int:
    everyone = (1 << size) - 1
    alive = everyone
    for row_v, row_b in zip(F.vars.tolist(), F.spec.tolist()):
        sat = 0
        for v, b in zip(row_v, row_b):
            sat |= columns[v] if b else everyone ^ columns[v]
        alive &= sat
        if not alive:
            break
    return alive.bit_count()


def estimate_mu(F: CnfFormula, samples: int, seed: int) -> Estimate:
    """Fraction of uniform points satisfying every clause."""
    hits = 0
    for b, size in _batches(samples):
        rng = np.random.default_rng(derive_seed(seed, b))
        hits += _count_satisfying(F, _random_bitslices(rng, F.n, size), size)
    return Estimate.bernoulli(hits, samples, seed)


# -- existence of a completion ---------------------------------------------------------

def _solve(clauses: list, assign: dict) -> bool:
    """Backtracking with unit propagation; branches on the smallest free variable."""
    assign = dict(assign)
    while True:
        reduced = []
        unit = None
        for clause in clauses:
            rest = []
            satisfied = False
            for v, b in clause:
                a = assign.get(v)
                if a is None:
                    rest.append((v, b))
                elif a == b:
                    satisfied = True
                    break
            if satisfied:
                continue
            if not rest:
                return False
            if unit is None and len(rest) == 1:
                unit = rest[0]
            reduced.append(rest)
        clauses = reduced
        if unit is None:
            break
        assign[unit[0]] = unit[1]
    if not clauses:
        return True
    v = min(v for clause in clauses for v, _ in clause)
    return _solve(clauses, {**assign, v: 0}) or _solve(clauses, {**assign, v: 1})


class _CompletionChecker:
    """Per-(F, S) precomputation for repeated existence queries."""

    def __init__(self, F: CnfFormula, S: Coalition):
        self.S = S
        self.clauses = []
        for row_v, row_b in zip(F.vars.tolist(), F.spec.tolist()):
            t_mask = 0
            pattern = 0
            residual = []
            for v, b in zip(row_v, row_b):
                if S.mask >> v & 1:
                    residual.append((v, b))
                else:
                    t_mask |= 1 << v
                    pattern |= b << v
            self.clauses.append((t_mask, pattern, tuple(residual)))

    def __call__(self, u: int) -> bool:
        u &= ~self.S.mask
        pending = []
        for t_mask, pattern, residual in self.clauses:
            if t_mask & ~(u ^ pattern):
                continue  # some outside literal already agrees
            if not residual:
                return False
            pending.append(residual)
        return _solve(pending, {})


def exists_completion(F: CnfFormula, S: CoalitionLike, u: int) -> bool:
    """Is there a setting of the S-variables that, with u outside S, satisfies F?

    Bits of ``u`` inside S are ignored.
    """
    return _CompletionChecker(F, as_coalition(S, F.n))(u)


def estimate_jplus(F: CnfFormula, S: CoalitionLike, samples: int, seed: int) -> Estimate:
    S = as_coalition(S, F.n)
    check = _CompletionChecker(F, S)
    hits = 0
    for b, size in _batches(samples):
        rng = np.random.default_rng(derive_seed(seed, b))
        for col in _random_bitslices(rng, size, F.n):
            hits += check(col)
    return Estimate.bernoulli(hits, samples, seed)


# -- clause-miss counts ------------------------------------------------------------------

def sample_mS(n: int, k: int, m: int, s: int, trials: int, seed: int) -> dict:
    """Empirical distribution of m_S for S = {0..s-1} over fresh formulas."""
    S = Coalition.of(n, range(s))
    counts = np.array([
        int(missing_clauses(random_kcnf(n, k, m, derive_seed(seed, t)), S).sum())
        for t in range(trials)
    ])
    p = float(miss_probability(n, s, k))
    mean = float(counts.mean())
    var = float(counts.var(ddof=1)) if trials > 1 else 0.0
    return {
        "n": n, "k": k, "m": m, "s": s, "trials": trials, "seed": seed,
        "p": p,
        "mean": mean,
        "variance": var,
        "predicted_mean": m * p,
        "predicted_variance": m * p * (1 - p),
        "sd_of_mean": math.sqrt(m * p * (1 - p) / trials),
        "max_abs_deviation": float(np.abs(counts - m * p).max()),
        "min": int(counts.min()),
        "max": int(counts.max()),
    }


# -- the T operator ----------------------------------------------------------------------

def t_operator_samples(x: int, n: int, k: int, samples: int, seed: int) -> np.ndarray:
    """Images of x under independent T: keep x on a uniform k-set, resample the rest.

    Points are returned as uint64, so n <= 64.
    """
    if not 0 <= k <= n <= 64:
        raise ValueError("need 0 <= k <= n <= 64")
    out = np.empty(samples, dtype=np.uint64)
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    done = 0
    for b, size in _batches(samples):
        rng = np.random.default_rng(derive_seed(seed, b))
        draws = rng.integers(0, np.broadcast_to(np.arange(n - k + 1, n + 1), (size, k)))
        kept = floyd_subsets(draws, n, k) if k else np.zeros((size, 0), dtype=np.int64)
        keep_mask = np.zeros(size, dtype=np.uint64)
        for j in range(k):
            keep_mask |= weights[kept[:, j]]
        bits = rng.integers(0, 2, size=(size, n), dtype=np.uint64)
        fresh = (bits * weights).sum(axis=1, dtype=np.uint64)
        out[done:done + size] = (np.uint64(x) & keep_mask) | (fresh & ~keep_mask)
        done += size
    return out


def t_operator(x: int, n: int, k: int, seed: int) -> int:
    return int(t_operator_samples(x, n, k, 1, seed)[0])


def t_operator_hit_rate(n: int, k: int, c: int, samples: int, seed: int) -> Estimate:
    """Pr(T(0) lands in {y : y = 0 on the first c coordinates})."""
    ys = t_operator_samples(0, n, k, samples, seed)
    fixed = np.uint64((1 << c) - 1)
    return Estimate.bernoulli(int(np.count_nonzero((ys & fixed) == 0)), samples, seed)


# -- restriction to missing clauses ----------------------------------------------------------

def sub_formula(F: CnfFormula, S: CoalitionLike) -> CnfFormula:
    """Clauses that miss S, re-indexed over the complement of S."""
    S = as_coalition(S, F.n)
    keep = missing_clauses(F, S)
    in_S = np.zeros(F.n, dtype=np.int64)
    in_S[list(S.indices())] = 1
    shift_down = np.cumsum(in_S) - in_S  # S-members below each index
    new_vars = F.vars[keep] - shift_down[F.vars[keep]]
    return CnfFormula(F.n - S.size, F.k, new_vars, F.spec[keep], F.seed)
