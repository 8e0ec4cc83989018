"""Function families: random k-clause conjunctions, tribes, Hamming balls.

Random formulas are drawn from one numpy PCG64 stream per seed.  For clause
``i`` the stream supplies ``k`` subset draws followed by ``k`` specification
bits, then clause ``i+1`` starts; all ``m * 2k`` draws are taken in a single
row-major call, which consumes the stream in exactly that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BooleanFunction,
    Coalition,
    CoalitionLike,
    as_coalition,
    check_dimension,
    full_table,
    literal_mask,
)


def derive_seed(seed: int, index: int) -> int:
    """Child seed for task ``index``: SeedSequence(seed, spawn_key=(index,)) -> uint64."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Clause:
    """OR of k literals; literal j is satisfied when x[vars[j]] == spec[j]."""

    vars: tuple
    spec: tuple

    def __post_init__(self):
        if len(self.vars) != len(self.spec):
            raise ValueError("vars and spec must have equal length")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("clause variables must be distinct")

    @property
    def k(self) -> int:
        return len(self.vars)

    @property
    def mask(self) -> int:
        m = 0
        for v in self.vars:
            m |= 1 << v
        return m

    def canonical(self) -> "Clause":
        pairs = sorted(zip(self.vars, self.spec))
        return Clause(tuple(v for v, _ in pairs), tuple(b for _, b in pairs))


def clause_matches(c: Clause, x: int) -> bool:
    return any((x >> v & 1) == b for v, b in zip(c.vars, c.spec))


def misses(c: Clause, S: CoalitionLike, n: Optional[int] = None) -> bool:
    mask = S.mask if isinstance(S, Coalition) else Coalition.of(n, S).mask
    return c.mask & mask == 0


@dataclass(frozen=True, eq=False)
class CnfFormula:
    """Conjunction of m clauses of width k over n variables.

    ``vars`` and ``spec`` are (m, k) integer arrays, one canonical (sorted)
    clause per row.  A formula with zero clauses is the constant 1.
    """

    n: int
    k: int
    vars: np.ndarray
    spec: np.ndarray
    seed: int = 0

    def __post_init__(self):
        vars_ = np.asarray(self.vars, dtype=np.int64).reshape(-1, self.k)
        spec = np.asarray(self.spec, dtype=np.uint8).reshape(-1, self.k)
        if vars_.shape != spec.shape:
            raise ValueError("vars and spec shapes differ")
        if vars_.size and (vars_.min() < 0 or vars_.max() >= self.n):
            raise ValueError("clause variable outside [0, n)")
        if self.k > 1 and vars_.size and np.any(np.diff(vars_, axis=1) <= 0):
            raise ValueError("clause variables must be strictly increasing")
        if spec.size and spec.max() > 1:
            raise ValueError("specification bits must be 0/1")
        vars_.setflags(write=False)
        spec.setflags(write=False)
        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "spec", spec)

    @classmethod
    def from_clauses(cls, n: int, clauses, seed: int = 0) -> "CnfFormula":
        clauses = [c.canonical() for c in clauses]
        if not clauses:
            raise ValueError("need at least one clause to fix k")
        k = clauses[0].k
        if any(c.k != k for c in clauses):
            raise ValueError("all clauses must have the same width")
        return cls(n, k, [c.vars for c in clauses], [c.spec for c in clauses], seed)

    @property
    def m(self) -> int:
        return self.vars.shape[0]

    @property
    def clauses(self) -> list:
        return [Clause(tuple(int(v) for v in row_v), tuple(int(b) for b in row_b))
                for row_v, row_b in zip(self.vars, self.spec)]

    def __eq__(self, other):
        if not isinstance(other, CnfFormula):
            return NotImplemented
        return (self.n == other.n and self.k == other.k and self.seed == other.seed
                and np.array_equal(self.vars, other.vars)
                and np.array_equal(self.spec, other.spec))

    def to_bytes(self) -> bytes:
        return to_dimacs(self).encode()


def m_S(F: CnfFormula, S: CoalitionLike) -> int:
    """Number of clauses whose variables all lie outside S."""
    return int(missing_clauses(F, S).sum())


def missing_clauses(F: CnfFormula, S: CoalitionLike) -> np.ndarray:
    """Boolean row mask of the clauses that miss S."""
    S = as_coalition(S, F.n)
    in_S = np.zeros(F.n, dtype=bool)
    in_S[list(S.indices())] = True
    return ~in_S[F.vars].any(axis=1)


def floyd_subsets(draws: np.ndarray, n: int, k: int) -> np.ndarray:
    """Uniform k-subsets of range(n) from Floyd's algorithm, one per row.

    ``draws[:, j]`` must be uniform on ``[0, n - k + j]``.  Returns the subsets
    sorted ascending.
    """
    count = draws.shape[0]
    out = np.empty((count, k), dtype=np.int64)
    for j in range(k):
        top = n - k + j
        t = draws[:, j].astype(np.int64)
        taken = (out[:, :j] == t[:, None]).any(axis=1) if j else np.zeros(count, dtype=bool)
        out[:, j] = np.where(taken, top, t)
    out.sort(axis=1)
    return out


def random_kcnf(n: int, k: int, m: int, seed: int) -> CnfFormula:
    """m independent uniform k-clauses: uniform k-subset plus uniform spec bits."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if m < 1:
        raise ValueError("m must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    highs = np.concatenate([np.arange(n - k + 1, n + 1), np.full(k, 2)])
    draws = rng.integers(0, np.broadcast_to(highs, (m, 2 * k)))
    vars_ = floyd_subsets(draws[:, :k], n, k)
    spec = draws[:, k:].astype(np.uint8)
    return CnfFormula(n, k, vars_, spec, seed)


def cnf_to_function(F: CnfFormula) -> BooleanFunction:
    """Truth table of the conjunction.

    Each clause clears the 2**(n-k) points of its falsifying subcube through a
    strided view of the table shaped (2,)*n; coordinate j is axis n-1-j.
    """
    check_dimension(F.n)
    n = F.n
    values = np.ones(1 << n, dtype=bool)
    cube = values.reshape((2,) * n) if n else values
    for row_v, row_b in zip(F.vars.tolist(), F.spec.tolist()):
        index = [slice(None)] * n
        for v, b in zip(row_v, row_b):
            index[n - 1 - v] = 1 - b
        cube[tuple(index)] = False
    return BooleanFunction.from_array(n, values)


def tribes(m: int, k: int) -> BooleanFunction:
    """OR over m blocks of the AND of k consecutive variables."""
    n = m * k
    check_dimension(n)
    t = 0
    for b in range(m):
        block = full_table(n)
        for v in range(b * k, (b + 1) * k):
            block &= literal_mask(n, v, 1)
        t |= block
    return BooleanFunction(n, t)


def dual_tribes(m: int, k: int) -> BooleanFunction:
    """AND over m blocks of the OR of k consecutive variables."""
    n = m * k
    check_dimension(n)
    t = full_table(n)
    for b in range(m):
        block = 0
        for v in range(b * k, (b + 1) * k):
            block |= literal_mask(n, v, 1)
        t &= block
    return BooleanFunction(n, t)


def hamming_ball(n: int, r: int) -> BooleanFunction:
    """Indicator of {x : |x| < r}."""
    check_dimension(n)
    if not 0 <= r <= n + 1:
        raise ValueError(f"radius parameter r={r} outside [0, n+1]")
    weights = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        weights[(np.arange(1 << n) >> i) & 1 == 1] += 1
    return BooleanFunction.from_array(n, weights < r)


# -- parameter recipes ---------------------------------------------------------------

def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class Theorem1Params:
    n: int
    alpha: float
    delta: float
    C: float
    k: int
    m: int
    rounding: str = "k: nearest (half up); m: ceiling"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class Theorem2Params:
    nu: int
    delta: float
    xi: float
    eps: float
    k: int
    m: int
    n: int
    s: int
    exponent: float
    predicted_log_mu: float
    rounding: str = "k, n, s: nearest (half up); m: ceiling"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def theorem1_params(n: int, alpha: float, delta: float) -> Theorem1Params:
    """k = C log2 n with C = 1/delta, m = 2**k ln(1/alpha)."""
    if not 0 < alpha < 1 or not 0 < delta < 1:
        raise ValueError("alpha and delta must lie in (0, 1)")
    C = 1 / delta
    k = max(1, _round_half_up(C * math.log2(n)))
    m = math.ceil(2**k * math.log(1 / alpha))
    if m < 1:
        raise ValueError(f"alpha={alpha} gives m={m} < 1")
    return Theorem1Params(n, alpha, delta, C, k, m)


def theorem2_params(nu: int, delta: float) -> Theorem2Params:
    """xi = delta/3, eps = xi**2/2, k = (1+delta) log2 nu, m = eps 2**k nu.

    The reduced dimension is n = (1/2 + delta) nu; coalitions have size
    s = (1/2 - delta) nu.  The influence exponent is reported as delta.
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    xi = delta / 3
    eps = xi * xi / 2
    k = _round_half_up((1 + delta) * math.log2(nu))
    if k < 1:
        raise ValueError(f"nu={nu} too small: k={k}")
    m = math.ceil(eps * 2**k * nu)
    n = _round_half_up((0.5 + delta) * nu)
    s = _round_half_up((0.5 - delta) * nu)
    if s < 1:
        raise ValueError(f"delta={delta} leaves no coalition at nu={nu}")
    return Theorem2Params(nu, delta, xi, eps, k, m, n, s, delta, -eps * nu)


def tribes_k_for_target(n: int, t: float) -> int:
    """k = log n - log log n - log ln(1/t) (base 2), rounded, at least 1."""
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    if n < 4:
        raise ValueError("n must be at least 4")
    k = math.log2(n) - math.log2(math.log2(n)) - math.log2(math.log(1 / t))
    return max(1, _round_half_up(k))


def tribes_k_small_measure(n: int) -> int:
    """k = 2 log n - log log n, giving mu(tribes) about 1/(2n)."""
    return max(1, _round_half_up(2 * math.log2(n) - math.log2(math.log2(n))))


def dual_tribes_k_small_measure(n: int) -> int:
    """k = log n - 2 log log n - 1, giving mu(dual tribes) about 1/n."""
    return max(1, _round_half_up(math.log2(n) - 2 * math.log2(math.log2(n)) - 1))


# -- DIMACS --------------------------------------------------------------------------

def to_dimacs(F: CnfFormula) -> str:
    lines = [f"c seed {F.seed} k {F.k}", f"p cnf {F.n} {F.m}"]
    for row_v, row_b in zip(F.vars, F.spec):
        lits = [str(int(v) + 1) if b else str(-(int(v) + 1)) for v, b in zip(row_v, row_b)]
        lines.append(" ".join(lits + ["0"]))
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> CnfFormula:
    seed, k, n, m = 0, None, None, None
    clauses = []
    pending = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if "seed" in parts:
                seed = int(parts[parts.index("seed") + 1])
            if "k" in parts:
                k = int(parts[parts.index("k") + 1])
            continue
        if line.startswith("p"):
            _, fmt, n_s, m_s = line.split()
            if fmt != "cnf":
                raise ValueError(f"unsupported DIMACS format {fmt!r}")
            n, m = int(n_s), int(m_s)
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(Clause(tuple(abs(l) - 1 for l in pending),
                                      tuple(1 if l > 0 else 0 for l in pending)))
                pending = []
            else:
                pending.append(lit)
    if n is None:
        raise ValueError("missing 'p cnf' header")
    if pending:
        raise ValueError("unterminated clause")
    if len(clauses) != m:
        raise ValueError(f"header declares {m} clauses, found {len(clauses)}")
    if clauses:
        return CnfFormula.from_clauses(n, clauses, seed)
    return CnfFormula(n, k or 1, np.zeros((0, k or 1)), np.zeros((0, k or 1)), seed)
