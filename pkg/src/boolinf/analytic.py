"""Closed-form reference quantities for the random clause model.

Combinatorial quantities are exact ``Fraction``s.  Powers with large
exponents go through mpmath at 50 significant digits so that, for example,
the second-moment ratio never drops below one by rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

_DPS = 50


def miss_probability(n: int, s: int, k: int) -> Fraction:
    """Pr(a uniform k-subset of [n] avoids a fixed s-set) = C(n-s,k)/C(n,k)."""
    if not 0 <= s <= n or not 0 <= k <= n:
        raise ValueError("need 0 <= s, k <= n")
    return Fraction(math.comb(n - s, k), math.comb(n, k))


def expected_mu(k: int, m: int, exact: bool = False):
    """(1 - 2^-k)^m, the chance a fixed point satisfies all m random clauses."""
    if k < 1 or m < 1:
        raise ValueError("need k >= 1 and m >= 1")
    q = Fraction((1 << k) - 1, 1 << k)
    if exact:
        return q**m
    return math.exp(m * math.log1p(-(2.0**-k)))


def pair_sat_probability(n: int, k: int, d: int) -> Fraction:
    """Pr(a random k-clause is satisfied by two points at Hamming distance d).

    The clause fails both points only if its variables sit inside the n-d
    agreement coordinates and its specification is the complement of the
    common values there, so q_d = 1 - 2^(1-k) + 2^-k C(n-d,k)/C(n,k).
    """
    if not 0 <= d <= n or not 1 <= k <= n:
        raise ValueError("need 0 <= d <= n and 1 <= k <= n")
    return 1 - Fraction(2, 1 << k) + Fraction(math.comb(n - d, k), (1 << k) * math.comb(n, k))


@dataclass(frozen=True)
class PairSatProfile:
    n: int
    k: int
    m: int
    q: tuple  # q[d] for d = 0..n

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "m": self.m,
                "q": [f"{x.numerator}/{x.denominator}" for x in self.q]}


def pair_sat_profile(n: int, k: int, m: int) -> PairSatProfile:
    return PairSatProfile(n, k, m, tuple(pair_sat_probability(n, k, d) for d in range(n + 1)))


def second_moment_ratio_exact(n: int, k: int, m: int) -> Fraction:
    """E[X^2] / E[X]^2 for X = 2^n mu(f), as an exact rational."""
    q = [pair_sat_probability(n, k, d) for d in range(n + 1)]
    num = sum(math.comb(n, d) * q[d] ** m for d in range(n + 1))
    return num / ((1 << n) * q[0] ** (2 * m))


def second_moment_ratio(n: int, k: int, m: int) -> float:
    """E[X^2] / E[X]^2 = sum_d C(n,d) q_d^m / (2^n q_0^(2m)), in log space."""
    if m < 0:
        raise ValueError("m must be non-negative")
    with mpmath.workdps(_DPS):
        q0 = _mpf(pair_sat_probability(n, k, 0))
        log_terms = []
        for d in range(n + 1):
            qd = _mpf(pair_sat_probability(n, k, d))
            if qd > 0:
                log_terms.append(mpmath.log(math.comb(n, d)) + m * mpmath.log(qd))
            elif m == 0:
                log_terms.append(mpmath.log(math.comb(n, d)))
        top = max(log_terms)
        log_num = top + mpmath.log(mpmath.fsum(mpmath.exp(t - top) for t in log_terms))
        log_ratio = log_num - n * mpmath.log(2) - 2 * m * mpmath.log(q0)
        return float(mpmath.exp(log_ratio))


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def hypergeometric_pmf(n: int, c: int, k: int, t: int) -> Fraction:
    """Pr(|K & L| = t) for K uniform in C([n],k) and |L| = c."""
    return Fraction(math.comb(c, t) * math.comb(n - c, k - t), math.comb(n, k))


def t_operator_subcube(n: int, k: int, c: int) -> Fraction:
    """Pr(T(x) in X) for X a codimension-c subcube containing x.

    T keeps x on a uniform k-set K and resamples the rest; the walk stays in
    X iff every coordinate of the fixed set L outside K is resampled to its
    old value, so the probability is sum_t Pr(|K & L| = t) 2^-(c-t).
    """
    if not 0 <= c <= n or not 0 <= k <= n:
        raise ValueError("need 0 <= c, k <= n")
    return sum((hypergeometric_pmf(n, c, k, t) * Fraction(1, 1 << (c - t))
                for t in range(max(0, k - (n - c)), min(k, c) + 1)), Fraction(0))


def t_operator_ratio(n: int, k: int, c: int) -> Fraction:
    """t_operator_subcube / mu(X) = E[2^|K & L|]."""
    return t_operator_subcube(n, k, c) * (1 << c)


def binomial_tail(n: int, r: int) -> Fraction:
    """Pr(Bin(n, 1/2) <= r)."""
    if not 0 <= r <= n:
        raise ValueError(f"r={r} outside [0, {n}]")
    return Fraction(sum(math.comb(n, j) for j in range(r + 1)), 1 << n)


def ball_hit_ratio(n: int, k: int, r: int) -> Fraction:
    """Pr(Bin(n-k,1/2) <= r) / Pr(Bin(n,1/2) <= r): hit rate of T(0) on the ball Q_r over mu(Q_r)."""
    return binomial_tail(n - k, min(r, n - k)) / binomial_tail(n, r)


def chernoff_bound(m: int, p: float, zeta: float) -> float:
    """exp(-zeta^2 m p / 3).  Annotation only: the constant 1/3 is the usual textbook one."""
    if not 0 < zeta < 1:
        raise ValueError("zeta must lie in (0, 1)")
    return math.exp(-zeta * zeta * m * p / 3)


def isoperimetric_bound(t: float) -> float:
    """2 t log2(1/t)."""
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    return 2 * t * math.log2(1 / t)


def isoperimetric_holds(value, t, n_divisor: int = 1) -> bool:
    """Exactly decide value >= 2 t log2(1/t) / n_divisor for rational value and t in (0,1).

    With q = n_divisor * value / (2t) the question is log2(1/t) <= q.  When
    1/t is a power of two both sides are rational and compared directly.
    Otherwise log2(1/t) is irrational, so the two sides differ and interval
    evaluation at rising precision always terminates.
    """
    value = Fraction(value)
    t = Fraction(t)
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    q = value * n_divisor / (2 * t)
    inv = 1 / t
    if inv.denominator == 1 and inv.numerator & (inv.numerator - 1) == 0:
        return inv.numerator.bit_length() - 1 <= q
    lhs, rhs = float(q), math.log2(float(inv))
    if abs(lhs - rhs) > 1e-9 * max(1.0, rhs):
        return lhs > rhs
    iv = mpmath.iv
    saved = iv.prec
    try:
        iv.prec = 64
        while True:
            log2_inv = (iv.log(iv.mpf(inv.numerator)) - iv.log(iv.mpf(inv.denominator))) / iv.log(2)
            qi = iv.mpf(q.numerator) / iv.mpf(q.denominator)
            if log2_inv.b < qi.a:
                return True
            if log2_inv.a > qi.b:
                return False
            iv.prec *= 2
    finally:
        iv.prec = saved


def concentration_hypotheses(n: int, k: int, m: int, delta: float, factor: float = 10.0) -> dict:
    """Finite reading of "k = o(sqrt n)" and "(1/2+delta)^k m = omega(n)".

    Each little-o / omega is read as a gap of at least ``factor``.
    """
    return {
        "reading": f"o(.) and omega(.) read as a factor-{factor} gap",
        "k_small": k * factor <= math.sqrt(n),
        "expected_misses_large": (0.5 + delta) ** k * m >= factor * n,
    }


def second_moment_hypotheses(n: int, k: int, m: int, xi: float, factor: float = 10.0) -> dict:
    """Finite reading of exp(-xi^2 n) = o((1-2^-k)^m) and ((1+2 xi)/4)^k = o(1/m)."""
    log_mu = m * math.log1p(-(2.0**-k))
    return {
        "reading": f"o(.) read as a factor-{factor} gap",
        "xi": xi,
        "xi1": -xi * xi * n + math.log(factor) <= log_mu,
        "xi2": ((1 + 2 * xi) / 4) ** k * m * factor <= 1,
    }
