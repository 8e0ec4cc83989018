"""Desk-scale experiments.

Each ``run_*`` returns ``(summary, rows)``; ``summary["violations"]`` counts
failures of inequalities that must hold exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .. import analytic
from ..core import N_MAX, BooleanFunction, Coalition, DimensionError, DyadicMeasure, measure
from ..generators import (
    cnf_to_function,
    derive_seed,
    dual_tribes,
    hamming_ball,
    m_S,
    random_kcnf,
    theorem1_params,
    theorem2_params,
    tribes,
    tribes_k_for_target,
    tribes_k_small_measure,
    _round_half_up,
)
from ..influence import (
    DEFAULT_BUDGET,
    greedy_coalition,
    iter_coalitions,
    max_coalition,
    report,
    sampled_coalition,
    variable_influence,
)
from ..montecarlo import estimate_mu, sub_formula
from ..trace import (
    find_shattered_table,
    jplus_via_trace,
    is_shattered,
    sauer_shelah_threshold,
    trace_size,
    SetFamily,
)
from .config import ExperimentConfig
from .report import make_report


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _one_based(indices) -> list:
    return [i + 1 for i in indices]


def _clause_masks(F) -> tuple:
    """Distinct clause variable masks and their multiplicities."""
    masks = (np.uint64(1) << F.vars.astype(np.uint64)).sum(axis=1, dtype=np.uint64)
    return np.unique(masks, return_counts=True)


def _missed_count(mask_counts, smask: int) -> int:
    masks, counts = mask_counts
    return int(counts[(masks & np.uint64(smask)) == 0].sum())


def _random_combo(rng, n, s) -> tuple:
    return tuple(sorted(int(i) for i in rng.choice(n, size=s, replace=False)))


# -- thm1: coalitions missed by a clause -----------------------------------------------

def _contrast_tribes_k(n: int, s: int, alpha: float):
    target = tribes_k_for_target(n, alpha) if n >= 4 else 1
    divisors = [d for d in range(1, s + 1) if n % d == 0 and d < n]
    if not divisors:
        return None
    return min(divisors, key=lambda d: (abs(d - target), -d))


def run_thm1(n: int, delta: float, alpha: float = 0.5, trials: int = 20, seed: int = 0,
             k: int = None, m: int = None, budget: int = DEFAULT_BUDGET,
             coalition_samples: int = 1000, tribes_k: int = None) -> tuple:
    """Random k-clause conjunctions: no s-set missed by a clause gets J+ above 1 - 2^-k."""
    if n > N_MAX:
        raise DimensionError(f"n={n} exceeds N_MAX={N_MAX}; the thm1 experiment needs exact tables")
    if not 0 <= delta < 0.5 + 1e-12:
        raise ValueError("delta must lie in [0, 1/2]")
    s = _round_half_up((0.5 - delta) * n)
    if k is None or m is None:
        params = theorem1_params(n, alpha, delta)
        k, m, regime = params.k, params.m, "recipe"
        if k > n:
            raise ValueError(f"recipe gives k={k} > n={n}; supply k and m for desk-scale runs")
    else:
        regime = "user"
    bound = DyadicMeasure((1 << k) - 1, k)
    exhaustive = math.comb(n, s) <= budget
    rows = []
    violations = 0
    for t in range(trials):
        trial_seed = derive_seed(seed, t)
        F = random_kcnf(n, k, m, trial_seed)
        f = cnf_to_function(F)
        masks = _clause_masks(F)
        if exhaustive:
            values = iter_coalitions(f, s, "j_plus")
        else:
            rng = np.random.default_rng(derive_seed(trial_seed, 1))
            values = ((c, report(f, c).j_plus)
                      for c in (_random_combo(rng, n, s) for _ in range(coalition_samples)))
        best = None
        min_ms = None
        bad = 0
        examined = 0
        for combo, jp in values:
            examined += 1
            smask = sum(1 << i for i in combo)
            ms = _missed_count(masks, smask)
            min_ms = ms if min_ms is None else min(min_ms, ms)
            if ms >= 1 and jp > bound:
                bad += 1
            if best is None or jp > best[1]:
                best = (combo, jp)
        violations += bad
        rows.append({
            "trial": t,
            "seed": trial_seed,
            "mu": measure(f).to_dict(),
            "expected_mu": analytic.expected_mu(k, m),
            "max_jplus": best[1].to_dict(),
            "max_jplus_kind": "exact" if exhaustive else "lower bound (sampled)",
            "argmax": _one_based(best[0]),
            "min_mS": min_ms,
            "every_set_missed_by_a_clause": min_ms >= 1,
            "sets_examined": examined,
            "bound_violations": bad,
        })
    contrast = None
    kt = tribes_k if tribes_k is not None else _contrast_tribes_k(n, s, alpha)
    if kt is not None and s >= 1 and n % kt == 0:
        g = tribes(n // kt, kt)
        if math.comb(n, s) <= budget:
            res = max_coalition(g, s, "j_plus", budget=budget)
            value, argmax, kind = res.value, res.best_set.indices(), "exact"
        else:
            # the first s variables contain a whole tribe whenever s >= kt
            argmax = tuple(range(s))
            value, kind = report(g, argmax).j_plus, "witness (first s variables)"
        contrast = {
            "function": f"tribes(m={n // kt}, k={kt})",
            "mu": measure(g).to_dict(),
            "s": s,
            "max_jplus": value.to_dict(),
            "max_jplus_kind": kind,
            "argmax": _one_based(argmax),
            "reaches_one": value == 1,
        }
    summary = {
        "regime": regime,
        "n": n, "s": s, "k": k, "m": m,
        "bound": _frac(bound.fraction),
        "coalitions": "exhaustive" if exhaustive else "sampled",
        "trials": trials,
        "trials_with_every_set_missed": sum(r["every_set_missed_by_a_clause"] for r in rows),
        "max_jplus_over_trials": max(r["max_jplus"]["float"] for r in rows) if rows else None,
        "tribes_contrast": contrast,
        "violations": violations,
    }
    return summary, rows


# -- thm2-proxy: sampled large-nu view -------------------------------------------------

def run_thm2_proxy(nu: int, delta: float, trials: int = 3, seed: int = 0,
                   coalition_samples: int = 20, samples: int = 10_000) -> tuple:
    """Sampled look at mu(F), m_S and the missing-clause sub-formulas at moderate nu."""
    params = theorem2_params(nu, delta)
    p = analytic.miss_probability(nu, params.s, params.k)
    pf = float(p)
    reduced_n = nu - params.s
    reference = math.exp(-(reduced_n ** delta))
    rows = []
    all_ms = []
    for t in range(trials):
        trial_seed = derive_seed(seed, t)
        F = random_kcnf(nu, params.k, params.m, trial_seed)
        est = estimate_mu(F, samples, derive_seed(trial_seed, 0))
        log_mu = math.log(est.mean) if est.mean > 0 else None
        rng = np.random.default_rng(derive_seed(trial_seed, 1))
        per_set = []
        for j in range(coalition_samples):
            S = Coalition.of(nu, _random_combo(rng, nu, params.s))
            ms = m_S(F, S)
            all_ms.append(ms)
            sub = sub_formula(F, S)
            sub_est = estimate_mu(sub, samples, derive_seed(trial_seed, 2 + j))
            per_set.append({
                "mS": ms,
                "z": (ms - params.m * pf) / math.sqrt(params.m * pf * (1 - pf)),
                "sub_mu_hat": sub_est.mean,
                "sub_mu_half_width": sub_est.half_width,
            })
        rows.append({
            "trial": t,
            "seed": trial_seed,
            "mu_hat": est.to_dict(),
            "log_mu_hat": log_mu,
            "predicted_log_mu": params.predicted_log_mu,
            "log_mu_relative_error": (abs(log_mu - params.predicted_log_mu) / abs(params.predicted_log_mu)
                                      if log_mu is not None else None),
            "expected_mu": analytic.expected_mu(params.k, params.m),
            "coalitions": per_set,
            "max_sub_mu_hat": max((c["sub_mu_hat"] for c in per_set), default=None),
        })
    count = len(all_ms)
    mean_ms = float(np.mean(all_ms)) if count else None
    summary = {
        "params": params.to_dict(),
        "miss_probability": _frac(p),
        "predicted_mS": params.m * pf,
        "mean_mS": mean_ms,
        "mean_mS_z": ((mean_ms - params.m * pf) / math.sqrt(params.m * pf * (1 - pf) / count)
                      if count else None),
        "reduced_n": reduced_n,
        "influence_reference_exp_minus_n_pow_delta": reference,
        "hypotheses": {
            "concentration": analytic.concentration_hypotheses(nu, params.k, params.m, delta),
            "second_moment_on_sub_formula": analytic.second_moment_hypotheses(
                reduced_n, params.k, max(1, round(params.m * pf)), params.xi),
        },
        "note": "mu(f_S) upper-bounds J+_S(F); values are Monte Carlo, reported as data",
        "violations": 0,
    }
    return summary, rows


# -- tribes and balls ------------------------------------------------------------------

def tribes_mu_closed_form(m: int, k: int) -> Fraction:
    return 1 - Fraction((1 << k) - 1, 1 << k) ** m


def tribes_influence_closed_form(m: int, k: int) -> Fraction:
    return Fraction(1, 1 << (k - 1)) * Fraction((1 << k) - 1, 1 << k) ** (m - 1)


def run_tribes_baseline(seed: int = 0, max_mk: int = 16, n_max_log: int = 20) -> tuple:
    rows = []
    violations = 0
    for k in range(1, max_mk + 1):
        for m in range(1, max_mk // k + 1):
            f = tribes(m, k)
            g = dual_tribes(m, k)
            mu = measure(f).fraction
            infl = [variable_influence(f, i).fraction for i in range(m * k)]
            flipped = _negate_inputs(f)
            mu_ok = mu == tribes_mu_closed_form(m, k)
            infl_ok = all(x == tribes_influence_closed_form(m, k) for x in infl)
            dual_ok = g.table == (~flipped).table
            violations += (not mu_ok) + (not infl_ok) + (not dual_ok)
            rows.append({
                "kind": "exact", "m": m, "k": k, "n": m * k,
                "mu": _frac(mu), "mu_matches": mu_ok,
                "influence": _frac(infl[0]), "influences_match": infl_ok,
                "dual_mu": _frac(measure(g).fraction), "de_morgan": dual_ok,
            })
    for j in range(4, n_max_log + 1):
        n = 1 << j
        k = tribes_k_small_measure(n)
        blocks = n // k
        mu = float(tribes_mu_closed_form(blocks, k)) if k < 60 else blocks * 2.0**-k
        rows.append({
            "kind": "small-measure recipe", "n": n, "k": k, "m": blocks,
            "mu": mu, "mu_times_2n": mu * 2 * n,
            "within_factor_2": 0.5 <= mu * 2 * n <= 2,
        })
    summary = {"exact_rows": sum(r["kind"] == "exact" for r in rows), "violations": violations}
    return summary, rows


def _negate_inputs(f):
    """x -> f(not x): reverse the table."""
    return BooleanFunction.from_array(f.n, f.to_array()[::-1])


# -- Sauer-Shelah battery --------------------------------------------------------------

def _random_family_table(rng, n: int, size: int) -> int:
    chosen = np.zeros(1 << n, dtype=bool)
    chosen[rng.choice(1 << n, size=size, replace=False)] = True
    return int.from_bytes(np.packbits(chosen, bitorder="little").tobytes(), "little")


def run_sauer_shelah(n_max: int = 12, trials: int = 10_000, seed: int = 0,
                     set_check_every: int = 1000, identity_n_max: int = 8,
                     identity_trials: int = 3) -> tuple:
    """Families just above C(n,<r) always shatter an r-set; the Hamming ball never does."""
    rows = []
    violations = 0
    for n in range(1, n_max + 1):
        for r in range(0, n + 1):
            threshold = sauer_shelah_threshold(n, r)
            rng = np.random.default_rng(derive_seed(seed, n * 64 + r))
            found = 0
            set_checked = 0
            size = threshold + 1
            attempted = trials if size <= 1 << n else 0
            for t in range(attempted):
                table = _random_family_table(rng, n, size)
                Y = find_shattered_table(table, n, r)
                if Y is None:
                    continue
                Yc = Coalition.of(n, Y)
                ok = trace_size(table, n, Yc) == 1 << r
                if t % set_check_every == 0:
                    fam = SetFamily.from_function(_as_function(n, table))
                    ok = ok and is_shattered(fam, Yc)
                    set_checked += 1
                found += ok
            ball = hamming_ball(n, r).table
            ball_found = find_shattered_table(ball, n, r) is not None
            violations += (attempted - found) + ball_found
            rows.append({
                "n": n, "r": r, "threshold": threshold,
                "random_trials": attempted, "random_shattered": found,
                "set_trace_checks": set_checked,
                "ball_size": threshold, "ball_shatters": ball_found,
            })
    identity_mismatches = 0
    for n in range(1, min(n_max, identity_n_max) + 1):
        rng = np.random.default_rng(derive_seed(seed, 10_000 + n))
        for _ in range(identity_trials):
            f = _as_function(n, _random_family_table(rng, n, int(rng.integers(0, (1 << n) + 1))))
            for mask in range(1 << n):
                S = Coalition(n, mask)
                identity_mismatches += jplus_via_trace(f, S) != report(f, S).j_plus
    violations += identity_mismatches
    summary = {
        "families_tested": sum(r["random_trials"] for r in rows),
        "families_shattered": sum(r["random_shattered"] for r in rows),
        "balls_shattering": sum(r["ball_shatters"] for r in rows),
        "trace_identity_mismatches": identity_mismatches,
        "violations": violations,
    }
    return summary, rows


def _as_function(n, table):
    return BooleanFunction(n, table)


# -- coalition search ------------------------------------------------------------------

def run_coalition_search(n: int, k: int, m: int, s: int, seed: int = 0,
                         objective: str = "j_plus", budget: int = DEFAULT_BUDGET,
                         workers: int = 1, coalition_samples: int = 1000) -> tuple:
    F = random_kcnf(n, k, m, seed)
    f = cnf_to_function(F)
    exact = max_coalition(f, s, objective, budget=budget, workers=workers)
    recheck = getattr(report(f, exact.best_set), objective)
    direction = "toward-0" if objective == "j_minus" else "toward-1"
    greedy_set, trajectory = greedy_coalition(f, s, direction)
    greedy_value = getattr(report(f, greedy_set), objective)
    sampled = sampled_coalition(f, s, objective, coalition_samples, derive_seed(seed, 1))
    violations = (recheck != exact.value) + (greedy_value > exact.value) + (sampled.value > exact.value)
    rows = [
        {"mode": "exhaustive", **exact.to_dict()},
        {"mode": "greedy", "best_set": _one_based(greedy_set.indices()),
         "value": greedy_value.to_dict(),
         "trajectory": [float(x) for x in trajectory]},
        {"mode": "sampled", **sampled.to_dict()},
    ]
    summary = {"mu": measure(f).to_dict(), "objective": objective,
               "exhaustive_recheck_ok": recheck == exact.value, "violations": int(violations)}
    return summary, rows


# -- exploratory search for the open problem -------------------------------------------

def pareto_frontier(points: list) -> list:
    """Keep points not dominated by one with mu at least as high and I+ at most as high."""
    kept = []
    for i, p in enumerate(points):
        dominated = False
        for j, q in enumerate(points):
            if i == j:
                continue
            no_worse = q["mu"] >= p["mu"] and q["max_iplus"] <= p["max_iplus"]
            better = q["mu"] > p["mu"] or q["max_iplus"] < p["max_iplus"]
            if no_worse and (better or j < i):
                dominated = True
                break
        if not dominated:
            kept.append(p)
    return kept


def run_question1_search(n: int, s: int, t_target: float, strategy: str = "grid",
                         budget: int = 50, seed: int = 0, coalition_samples: int = 200,
                         exhaustive_limit: int = 20_000) -> tuple:
    """Random k-CNF over a (k, m) grid; record (mu, max I+ over s-sets). Data only."""
    if strategy not in ("grid", "random"):
        raise ValueError("strategy must be grid or random")
    grid = [(k, 1 << j) for k in range(2, min(n, 8) + 1) for j in range(0, 11)]
    rng = np.random.default_rng(derive_seed(seed, 0))
    exhaustive = math.comb(n, s) <= exhaustive_limit
    points = []
    for b in range(budget):
        k, m = grid[b % len(grid)] if strategy == "grid" else grid[int(rng.integers(len(grid)))]
        F = random_kcnf(n, k, m, derive_seed(seed, b + 1))
        f = cnf_to_function(F)
        mu = measure(f)
        if exhaustive:
            best = max_coalition(f, s, "j_plus")
            iplus = best.value - mu
        else:
            best = sampled_coalition(f, s, "j_plus", coalition_samples, derive_seed(seed, 10**6 + b))
            iplus = best.value - mu
        points.append({"index": b, "k": k, "m": m, "mu": float(mu), "max_iplus": float(iplus),
                       "max_iplus_kind": "exact" if exhaustive else "lower bound (sampled)"})
    frontier = pareto_frontier(points)
    eligible = [p for p in frontier if p["mu"] >= t_target]
    summary = {
        "evaluated": len(points),
        "frontier_size": len(frontier),
        "best_iplus_at_or_above_target": min((p["max_iplus"] for p in eligible), default=None),
        "violations": 0,
    }
    return summary, frontier


# -- dispatch --------------------------------------------------------------------------

def run_experiment(config: ExperimentConfig) -> dict:
    config.validate()
    p = dict(config.params)
    e = config.experiment
    if e == "thm1":
        keys = ("n", "delta", "alpha", "trials", "seed", "k", "m", "budget",
                "coalition_samples", "tribes_k")
        summary, rows = run_thm1(**{key: p[key] for key in keys if key in p})
    elif e == "thm2-proxy":
        keys = ("nu", "delta", "trials", "seed", "coalition_samples", "samples")
        summary, rows = run_thm2_proxy(**{key: p[key] for key in keys if key in p})
    elif e == "tribes-baseline":
        keys = ("seed", "max_mk")
        summary, rows = run_tribes_baseline(**{key: p[key] for key in keys if key in p})
    elif e == "sauer-shelah":
        keys = ("n_max", "trials", "seed")
        summary, rows = run_sauer_shelah(**{key: p[key] for key in keys if key in p})
    elif e == "coalition-search":
        keys = ("n", "k", "m", "s", "seed", "objective", "budget", "workers", "coalition_samples")
        summary, rows = run_coalition_search(**{key: p[key] for key in keys if key in p})
    else:
        keys = ("n", "s", "t_target", "strategy", "budget", "seed", "coalition_samples")
        summary, rows = run_question1_search(**{key: p[key] for key in keys if key in p})
    return make_report(config.to_dict(), rows, summary, p.get("seed"))
