"""Coalition influences, variable influences and coalition search."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .core import (
    BooleanFunction,
    Coalition,
    CoalitionLike,
    DyadicMeasure,
    InvariantViolation,
    and_project,
    as_coalition,
    flip,
    fold_and,
    fold_or,
    half_and,
    half_or,
    measure,
    or_project,
)

OBJECTIVES = ("j_plus", "j_minus", "i_total")
DEFAULT_BUDGET = 10**8


class BudgetExceeded(ValueError):
    pass


def influence_plus(f: BooleanFunction, S: CoalitionLike) -> DyadicMeasure:
    """I+_S(f): chance that the outside setting leaves f=1 reachable, minus mu(f)."""
    g = or_project(f, S)
    return DyadicMeasure(g.weight - f.weight, f.n)


def influence_minus(f: BooleanFunction, S: CoalitionLike) -> DyadicMeasure:
    g = and_project(f, S)
    return DyadicMeasure(f.weight - g.weight, f.n)


@dataclass(frozen=True)
class InfluenceReport:
    i_plus: DyadicMeasure
    i_minus: DyadicMeasure
    i_total: DyadicMeasure
    j_plus: DyadicMeasure
    j_minus: DyadicMeasure
    mu: DyadicMeasure

    def to_dict(self) -> dict:
        return {name: getattr(self, name).to_dict()
                for name in ("i_plus", "i_minus", "i_total", "j_plus", "j_minus", "mu")}


def report(f: BooleanFunction, S: CoalitionLike) -> InfluenceReport:
    S = as_coalition(S, f.n)
    n = f.n
    up = or_project(f, S).weight
    down = and_project(f, S).weight
    w = f.weight
    return InfluenceReport(
        i_plus=DyadicMeasure(up - w, n),
        i_minus=DyadicMeasure(w - down, n),
        i_total=DyadicMeasure(up - down, n),
        j_plus=DyadicMeasure(up, n),
        j_minus=DyadicMeasure((1 << n) - down, n),
        mu=DyadicMeasure(w, n),
    )


def pivotal_influence(f: BooleanFunction, i: int) -> DyadicMeasure:
    """Pr[f(x) != f(x xor e_i)]."""
    return DyadicMeasure((f.table ^ flip(f.table, f.n, i)).bit_count(), f.n)


def variable_influence(f: BooleanFunction, i: int) -> DyadicMeasure:
    if not 0 <= i < f.n:
        raise ValueError(f"coordinate {i} outside [0, {f.n})")
    via_coalition = DyadicMeasure(
        fold_or(f.table, f.n, i).bit_count() - fold_and(f.table, f.n, i).bit_count(), f.n
    )
    via_pivots = pivotal_influence(f, i)
    if via_coalition != via_pivots:
        raise InvariantViolation(
            f"I_{i}: coalition form {via_coalition} disagrees with pivotality {via_pivots}"
        )
    return via_coalition


def influences(f: BooleanFunction) -> list:
    return [variable_influence(f, i) for i in range(f.n)]


def total_influence(f: BooleanFunction) -> DyadicMeasure:
    pivots = sum((f.table ^ flip(f.table, f.n, i)).bit_count() for i in range(f.n))
    return DyadicMeasure(pivots, f.n)


def kkl_reference(t: float, n: int, c: float) -> float:
    """c t (1-t) log2(n) / n; the constant c is the caller's choice."""
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    return c * t * (1 - t) * math.log2(n) / n


# -- coalition search -------------------------------------------------------------

@dataclass(frozen=True)
class CoalitionSearchResult:
    best_set: Coalition
    value: DyadicMeasure
    objective: str
    mode: str
    sets_examined: int

    def to_dict(self) -> dict:
        return {
            "best_set": [i + 1 for i in self.best_set.indices()],
            "value": self.value.to_dict(),
            "objective": self.objective,
            "mode": self.mode,
            "sets_examined": self.sets_examined,
        }


def _objective_value(objective: str, n: int, depth: int, up: int, down: int) -> DyadicMeasure:
    # up/down are weights of the half-folded tables on the 2**(n-depth) outside points
    e = n - depth
    if objective == "j_plus":
        return DyadicMeasure(up, e)
    if objective == "j_minus":
        return DyadicMeasure((1 << e) - down, e)
    return DyadicMeasure(up - down, e)


def iter_coalitions(f: BooleanFunction, s: int, objective: str = "j_plus",
                    first: Optional[int] = None) -> Iterator:
    """Yield (indices, value) for every s-subset in lexicographic order.

    Folds are shared along the depth-first enumeration tree, so each subset
    costs about one half-table fold.  ``first`` pins the smallest index.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    n = f.n
    need_up = objective != "j_minus"
    need_down = objective != "j_plus"

    def walk(start, chosen, up, down):
        depth = len(chosen)
        if depth == s:
            yield chosen, _objective_value(
                objective, n, depth,
                up.bit_count() if need_up else 0,
                down.bit_count() if need_down else 0,
            )
            return
        stop = n - (s - depth) + 1
        if depth == 0 and first is not None:
            candidates = range(first, min(first + 1, stop))
        else:
            candidates = range(start, stop)
        for i in candidates:
            yield from walk(
                i + 1,
                chosen + (i,),
                half_or(up, n, i) if need_up else 0,
                half_and(down, n, i) if need_down else 0,
            )

    yield from walk(0, (), f.table, f.table)


def _best_in_chunk(f: BooleanFunction, s: int, objective: str, first: Optional[int]):
    best = None
    examined = 0
    for combo, value in iter_coalitions(f, s, objective, first):
        examined += 1
        if best is None or value > best[1]:
            best = (combo, value)
    return best, examined


def _chunk_task(args):
    n, table, s, objective, first = args
    best, examined = _best_in_chunk(BooleanFunction(n, table), s, objective, first)
    if best is None:
        return None, examined
    combo, value = best
    return (combo, value.count, value.exponent), examined


def max_coalition(f: BooleanFunction, s: int, objective: str = "j_plus",
                  budget: int = DEFAULT_BUDGET, workers: int = 1) -> CoalitionSearchResult:
    """Exact maximum of the objective over all s-subsets.

    Ties go to the lexicographically smallest index tuple, so the answer does
    not depend on ``workers``.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if not 0 <= s <= f.n:
        raise ValueError(f"coalition size {s} outside [0, {f.n}]")
    total = math.comb(f.n, s)
    if total > budget:
        raise BudgetExceeded(
            f"C({f.n},{s}) = {total} coalitions exceeds the enumeration budget {budget}; "
            "use sampled mode"
        )
    if workers <= 1 or s == 0:
        best, examined = _best_in_chunk(f, s, objective, None)
        combo, value = best
    else:
        tasks = [(f.n, f.table, s, objective, i) for i in range(f.n - s + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_task, tasks))
        examined = sum(r[1] for r in results)
        best = None
        # chunks arrive in first-index order, which is lexicographic order
        for found, _ in results:
            if found is None:
                continue
            combo_i, count, exponent = found
            value_i = DyadicMeasure(count, exponent)
            if best is None or value_i > best[1]:
                best = (combo_i, value_i)
        combo, value = best
    return CoalitionSearchResult(Coalition.of(f.n, combo), value, objective, "exhaustive", examined)


def _report_value(f: BooleanFunction, S: Coalition, objective: str) -> DyadicMeasure:
    r = report(f, S)
    return {"j_plus": r.j_plus, "j_minus": r.j_minus, "i_total": r.i_total}[objective]


def sampled_coalition(f: BooleanFunction, s: int, objective: str = "j_plus",
                      samples: int = 1000, seed: int = 0) -> CoalitionSearchResult:
    """Best of ``samples`` uniform s-subsets; the value is only a lower bound."""
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(samples):
        combo = tuple(sorted(int(i) for i in rng.choice(f.n, size=s, replace=False)))
        S = Coalition.of(f.n, combo)
        value = _report_value(f, S, objective)
        if best is None or value > best[1] or (value == best[1] and combo < best[0]):
            best = (combo, value)
    return CoalitionSearchResult(Coalition.of(f.n, best[0]), best[1], objective, "sampled", samples)


def greedy_coalition(f: BooleanFunction, s: int, direction: str = "toward-1"):
    """Grow S one variable at a time, always taking the most influential one.

    Returns the coalition and the trajectory of J+ (toward-1) or J- (toward-0)
    after each step.
    """
    if direction not in ("toward-1", "toward-0"):
        raise ValueError(f"unknown direction {direction!r}")
    if not 0 <= s <= f.n:
        raise ValueError(f"coalition size {s} outside [0, {f.n}]")
    g = f
    chosen = []
    trajectory = []
    for _ in range(s):
        best_i, best_val = None, None
        for i in range(f.n):
            if i in chosen:
                continue
            val = variable_influence(g, i)
            if best_val is None or val > best_val:
                best_i, best_val = i, val
        chosen.append(best_i)
        if direction == "toward-1":
            g = or_project(g, [best_i])
            trajectory.append(measure(g))
        else:
            g = and_project(g, [best_i])
            trajectory.append(DyadicMeasure((1 << f.n) - g.weight, f.n))
    return Coalition.of(f.n, chosen), trajectory
