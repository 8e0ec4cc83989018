"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (also repeated in the terminal
summary) and then asserts.
"""

import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from boolinf.analytic import (
    isoperimetric_holds,
    miss_probability,
    pair_sat_probability,
    second_moment_ratio,
    second_moment_ratio_exact,
    t_operator_ratio,
    t_operator_subcube,
)
from boolinf.core import (
    BooleanFunction,
    Coalition,
    dictator,
    measure,
    monotonize,
    random_function,
    to_bfn1,
)
from boolinf.generators import (
    cnf_to_function,
    derive_seed,
    dual_tribes,
    hamming_ball,
    random_kcnf,
    tribes,
)
from boolinf.harness.config import ExperimentConfig
from boolinf.harness.experiments import (
    run_experiment,
    run_sauer_shelah,
    run_thm1,
    run_tribes_baseline,
    tribes_influence_closed_form,
    tribes_mu_closed_form,
)
from boolinf.harness.report import dumps, without_timestamp
from boolinf.influence import (
    influence_minus,
    influence_plus,
    influences,
    max_coalition,
    report,
    sampled_coalition,
    total_influence,
)
from boolinf.montecarlo import (
    estimate_jplus,
    estimate_mu,
    sample_mS,
    t_operator_hit_rate,
    t_operator_samples,
)
from boolinf.trace import arrow_falsify, jplus_via_trace

from conftest import ACCEPTANCE_LINES
from oracles import all_clauses, clause_satisfied


def verdict(number, name, passed, detail):
    line = f"ACCEPTANCE {number:>2} {name}: {'PASS' if passed else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


# -- 1 ------------------------------------------------------------------------------

def _split_index(n, mask):
    """idx[u, v] = point whose outside coordinates read u and inside ones v."""
    inside = [j for j in range(n) if mask >> j & 1]
    outside = [j for j in range(n) if not mask >> j & 1]
    idx = np.zeros((1 << len(outside), 1 << len(inside)), dtype=np.int64)
    for u in range(1 << len(outside)):
        base = sum(((u >> a) & 1) << j for a, j in enumerate(outside))
        for v in range(1 << len(inside)):
            idx[u, v] = base | sum(((v >> a) & 1) << j for a, j in enumerate(inside))
    return idx, len(outside)


def _definition_counts(values, n, mask):
    """Per function: (#u with some v giving 1, #u with some v giving 0), over 2^|T|."""
    idx, t = _split_index(n, mask)
    block = values[:, idx]  # (functions, u, v)
    return block.any(axis=2).sum(axis=1), (~block).any(axis=2).sum(axis=1), t


def _check_against_definition(funcs, n):
    values = np.array([f.to_array() for f in funcs], dtype=bool)
    mu_counts = values.sum(axis=1)
    mismatches = 0
    for mask in range(1 << n):
        ones, zeros, t = _definition_counts(values, n, mask)
        S = Coalition(n, mask)
        for f, c1, c0, w in zip(funcs, ones.tolist(), zeros.tolist(), mu_counts.tolist()):
            mu = Fraction(w, 1 << n)
            j_plus = Fraction(c1, 1 << t)
            j_minus = Fraction(c0, 1 << t)
            r = report(f, S)
            ok = (r.j_plus.fraction == j_plus and r.j_minus.fraction == j_minus
                  and r.mu.fraction == mu
                  and r.i_plus.fraction == j_plus - mu
                  and r.i_minus.fraction == j_minus - (1 - mu)
                  and r.i_total.fraction == j_plus + j_minus - 1
                  and influence_plus(f, S) == r.i_plus
                  and influence_minus(f, S) == r.i_minus)
            mismatches += not ok
    return mismatches


def test_acceptance_01_definition_oracle():
    start = time.perf_counter()
    checked = 0
    mismatches = 0
    for n in (1, 2, 3):
        funcs = [BooleanFunction(n, t) for t in range(1 << (1 << n))]
        mismatches += _check_against_definition(funcs, n)
        checked += len(funcs)
    rng = np.random.default_rng(derive_seed(1, 0))
    tables = rng.integers(0, 1 << 16, size=100_000)
    funcs = [BooleanFunction(4, int(t)) for t in tables]
    mismatches += _check_against_definition(funcs, 4)
    checked += len(funcs)
    elapsed = time.perf_counter() - start
    verdict(1, "definition-oracle equivalence", mismatches == 0 and elapsed < 300,
            f"{checked} functions x all coalitions, {mismatches} mismatches, {elapsed:.1f}s")


# -- 2 ------------------------------------------------------------------------------

def test_acceptance_02_isoperimetry():
    rng = np.random.default_rng(derive_seed(2, 0))
    total_viol = max_viol = nonconstant = 0
    for trial in range(100_000):
        n = int(rng.integers(1, 11))
        density = float(rng.choice([rng.random(), rng.random() * 0.05, 1 - rng.random() * 0.05]))
        f = random_function(n, rng, density)
        t = measure(f).fraction
        if t in (0, 1):
            continue
        nonconstant += 1
        total = total_influence(f).fraction
        best = max(x.fraction for x in influences(f))
        total_viol += not isoperimetric_holds(total, t)
        max_viol += not isoperimetric_holds(best, t, n_divisor=n)
    d = dictator(6, 0)
    tight = (total_influence(d).fraction == 1 and measure(d).fraction == Fraction(1, 2)
             and isoperimetric_holds(Fraction(1), Fraction(1, 2))
             and not isoperimetric_holds(Fraction(1) - Fraction(1, 2**40), Fraction(1, 2)))
    verdict(2, "isoperimetry", total_viol == 0 and max_viol == 0 and tight,
            f"{nonconstant} non-constant functions, total-influence violations {total_viol}, "
            f"max-influence violations {max_viol}, dictator tight={tight}")


# -- 3 ------------------------------------------------------------------------------

def test_acceptance_03_trace_identity():
    rng = np.random.default_rng(derive_seed(3, 0))
    pairs = mismatches = 0
    for n in range(1, 9):
        for _ in range(60):
            f = random_function(n, rng, float(rng.random()))
            for mask in range(1 << n):
                S = Coalition(n, mask)
                pairs += 1
                mismatches += jplus_via_trace(f, S) != report(f, S).j_plus
    verdict(3, "trace identity", mismatches == 0,
            f"{pairs} (function, coalition) pairs at n<=8, {mismatches} mismatches")


# -- 4 ------------------------------------------------------------------------------

def test_acceptance_04_sauer_shelah():
    summary, rows = run_sauer_shelah(n_max=12, trials=10_000, seed=4)
    random_ok = all(r["random_shattered"] == r["random_trials"] == 10_000 for r in rows)
    balls_ok = not any(r["ball_shatters"] for r in rows)
    passed = random_ok and balls_ok and summary["violations"] == 0
    verdict(4, "Sauer-Shelah battery", passed,
            f"{len(rows)} (n,r) pairs, {summary['families_tested']} families above threshold, "
            f"{summary['families_shattered']} shattered, balls shattering "
            f"{summary['balls_shattering']}, identity mismatches "
            f"{summary['trace_identity_mismatches']}")


# -- 5 ------------------------------------------------------------------------------

def test_acceptance_05_tribes_closed_forms():
    summary, rows = run_tribes_baseline(seed=5, max_mk=16, n_max_log=20)
    exact = [r for r in rows if r["kind"] == "exact"]
    # independent recheck straight from the truth tables
    recheck_bad = 0
    for m in range(1, 17):
        for k in range(1, 16 // m + 1):
            f = tribes(m, k)
            recheck_bad += measure(f).fraction != tribes_mu_closed_form(m, k)
            recheck_bad += any(x.fraction != tribes_influence_closed_form(m, k)
                               for x in influences(f))
            recheck_bad += measure(dual_tribes(m, k)).fraction != 1 - tribes_mu_closed_form(m, k)
    recipe = [r for r in rows if r["kind"] != "exact"]
    recipe_ok = all(r["within_factor_2"] for r in recipe) and recipe[-1]["n"] == 1 << 20
    passed = summary["violations"] == 0 and recheck_bad == 0 and recipe_ok
    worst = max(recipe, key=lambda r: abs(math.log(r["mu_times_2n"])))
    verdict(5, "tribes closed forms", passed,
            f"{len(exact)} (m,k) pairs with mk<=16 exact, recheck mismatches {recheck_bad}, "
            f"small-measure recipe n=16..2^20 worst mu*2n={worst['mu_times_2n']:.3f} at n={worst['n']}")


# -- 6 ------------------------------------------------------------------------------

def test_acceptance_06_theorem1_mechanism():
    summary, rows = run_thm1(16, 0.0, k=4, m=32, trials=20, seed=6)
    contrast = summary["tribes_contrast"]
    passed = (summary["s"] == 8 and summary["coalitions"] == "exhaustive"
              and len(rows) == 20 and summary["violations"] == 0
              and all(r["bound_violations"] == 0 for r in rows)
              and contrast is not None and contrast["reaches_one"])
    verdict(6, "theorem-1 mechanism", passed,
            f"20 formulas (n=16,k=4,m=32), all C(16,8) coalitions, violations "
            f"{summary['violations']}, max J+ {summary['max_jplus_over_trials']:.4f} vs bound "
            f"{summary['bound']}, {contrast['function']} reaches 1: {contrast['reaches_one']}")


# -- 7 ------------------------------------------------------------------------------

def test_acceptance_07_mS_concentration():
    out = sample_mS(100, 7, 10**4, 30, 10**4, seed=7)
    p = float(miss_probability(100, 30, 7))
    z = (out["mean"] - 10**4 * p) / out["sd_of_mean"]
    var_ratio = out["variance"] / out["predicted_variance"]
    passed = abs(z) <= 3 and abs(var_ratio - 1) <= 0.10
    verdict(7, "m_S concentration", passed,
            f"mean {out['mean']:.3f} vs {10**4 * p:.3f} (z={z:+.2f}), variance ratio "
            f"{var_ratio:.4f}")


# -- 8 ------------------------------------------------------------------------------

def _simulated_ratio(n, k, m, formulas, seed):
    xs = np.array([cnf_to_function(random_kcnf(n, k, m, derive_seed(seed, i))).weight
                   for i in range(formulas)], dtype=float)
    a, b = np.mean(xs**2), np.mean(xs)
    ratio = a / b**2
    # delta method for g(A, B) = A / B^2
    cov = np.cov(np.vstack([xs**2, xs]))
    grad = np.array([1 / b**2, -2 * a / b**3])
    sigma = math.sqrt(grad @ cov @ grad / formulas)
    return ratio, sigma


def test_acceptance_08_second_moment_anchors():
    n, k, m, seeds = 24, 6, 100, 200
    mus = np.array([float(measure(cnf_to_function(random_kcnf(n, k, m, derive_seed(8, i)))))
                    for i in range(seeds)])
    expected = (1 - 2.0**-k) ** m
    sd_model = expected * math.sqrt((second_moment_ratio(n, k, m) - 1) / seeds)
    sd_sample = mus.std(ddof=1) / math.sqrt(seeds)
    z_model = (mus.mean() - expected) / sd_model
    z_sample = (mus.mean() - expected) / sd_sample
    mean_ok = abs(z_model) <= 3 and abs(z_sample) <= 3

    enum_bad = 0
    rng = np.random.default_rng(derive_seed(8, 10**6))
    for nn in range(1, 9):
        for kk in range(1, nn + 1):
            clauses = list(all_clauses(nn, kk))
            for d in range(nn + 1):
                x = [int(b) for b in rng.integers(0, 2, nn)]
                flip = set(int(j) for j in rng.choice(nn, d, replace=False))
                y = [1 - b if j in flip else b for j, b in enumerate(x)]
                good = sum(clause_satisfied(v, s, x) and clause_satisfied(v, s, y)
                           for v, s in clauses)
                enum_bad += Fraction(good, len(clauses)) != pair_sat_probability(nn, kk, d)

    below_one = 0
    grid = 0
    for nn in (4, 8, 12, 16, 24, 48, 100, 400):
        for kk in range(1, min(nn, 12) + 1):
            for mm in (0, 1, 2, 5, 10, 50, 200, 1000, 10**5):
                grid += 1
                below_one += second_moment_ratio(nn, kk, mm) < 1
    for nn in range(1, 11):
        for kk in range(1, nn + 1):
            for mm in (0, 1, 3, 8, 20):
                grid += 1
                below_one += second_moment_ratio_exact(nn, kk, mm) < 1

    analytic = second_moment_ratio(12, 3, 8)
    simulated, sigma = _simulated_ratio(12, 3, 8, 10**4, seed=88)
    sim_ok = abs(simulated - analytic) <= 3 * sigma

    passed = mean_ok and enum_bad == 0 and below_one == 0 and sim_ok
    verdict(8, "second-moment anchors", passed,
            f"mean mu {mus.mean():.5f} vs {expected:.5f} (z={z_model:+.2f} model sd, "
            f"{z_sample:+.2f} sample sd); pair-sat enumeration mismatches {enum_bad}; "
            f"ratio<1 in {below_one}/{grid}; ratio(12,3,8) {analytic:.4f} vs simulated "
            f"{simulated:.4f} +- {sigma:.4f}")


# -- 9 ------------------------------------------------------------------------------

def test_acceptance_09_t_operator():
    exact = t_operator_subcube(9, 3, 3)
    est = t_operator_hit_rate(9, 3, 3, 10**6, seed=9)
    mc_ok = exact == Fraction(95, 336) and est.covers(float(exact))
    ratio = float(t_operator_ratio(10**4, 100, 100))
    e_ok = abs(ratio - math.e) <= 0.05 * math.e
    doubling = [float(t_operator_ratio(4**j, 2**j, 2**j)) for j in range(1, 7)]
    mono_ok = all(a < b for a, b in zip(doubling, doubling[1:])) and doubling[-1] < math.e
    passed = mc_ok and e_ok and mono_ok
    verdict(9, "T-operator anchors", passed,
            f"MC {est.mean:.5f} +- {est.half_width:.5f} vs 95/336={float(exact):.5f}; "
            f"ratio(1e4,100,100)={ratio:.4f} ({(ratio / math.e - 1) * 100:+.2f}% from e); "
            f"doubling sequence {', '.join(f'{r:.4f}' for r in doubling)}")


# -- 10 -----------------------------------------------------------------------------

def test_acceptance_10_monotonization():
    rng = np.random.default_rng(derive_seed(10, 0))
    mu_bad = infl_bad = checked = 0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        f = random_function(n, rng, float(rng.random()))
        g = monotonize(f)
        mu_bad += measure(g) != measure(f)
        masks = {0, (1 << n) - 1} | {int(x) for x in rng.integers(0, 1 << n, size=16)}
        for mask in sorted(masks):
            S = Coalition(n, mask)
            a, b = report(f, S), report(g, S)
            checked += 1
            infl_bad += (b.i_plus > a.i_plus) + (b.i_minus > a.i_minus) + (b.i_total > a.i_total)
    verdict(10, "monotonization", mu_bad == 0 and infl_bad == 0,
            f"1000 functions n<=8, {checked} sampled coalitions, measure changes {mu_bad}, "
            f"influence increases {infl_bad}")


# -- 11 -----------------------------------------------------------------------------

EXPERIMENT_CONFIGS = [
    ("thm1", {"n": 12, "delta": 0.25, "k": 3, "m": 16, "trials": 2, "seed": 11}),
    ("thm2-proxy", {"nu": 128, "delta": 0.3, "trials": 1, "coalition_samples": 3,
                    "samples": 3000, "seed": 11}),
    ("tribes-baseline", {"seed": 11, "max_mk": 10}),
    ("sauer-shelah", {"n_max": 6, "trials": 30, "seed": 11}),
    ("coalition-search", {"n": 10, "k": 3, "m": 15, "s": 3, "seed": 11}),
    ("question1", {"n": 8, "s": 3, "t_target": 0.2, "budget": 8, "seed": 11}),
]


def _artifacts():
    """Everything seeded, serialized to bytes."""
    out = {}
    out["random_kcnf"] = random_kcnf(40, 5, 300, 11).to_bytes()
    out["cnf_to_function"] = to_bfn1(cnf_to_function(random_kcnf(16, 3, 40, 11)))
    out["tribes"] = to_bfn1(tribes(3, 4)) + to_bfn1(dual_tribes(3, 4))
    out["hamming_ball"] = to_bfn1(hamming_ball(10, 4))
    out["random_function"] = to_bfn1(random_function(10, np.random.default_rng(11)))
    out["derive_seed"] = repr([derive_seed(11, i) for i in range(10)]).encode()
    F = random_kcnf(30, 3, 60, 11)
    out["estimate_mu"] = repr(estimate_mu(F, 100_000, 11)).encode()
    out["estimate_jplus"] = repr(estimate_jplus(F, Coalition.of(30, range(8)), 3000, 11)).encode()
    out["sample_mS"] = json.dumps(sample_mS(50, 4, 500, 10, 50, 11), sort_keys=True).encode()
    out["t_operator"] = t_operator_samples(0b1011, 20, 5, 1000, 11).tobytes()
    f = cnf_to_function(random_kcnf(12, 3, 20, 11))
    out["sampled_coalition"] = json.dumps(
        sampled_coalition(f, 4, "j_plus", 200, 11).to_dict(), sort_keys=True).encode()
    fam = arrow_falsify(6, 5, 4, 2, budget=3000, seed=11)
    out["arrow_falsify"] = repr(None if fam is None else fam.members).encode()
    for name, params in EXPERIMENT_CONFIGS:
        out[name] = dumps(without_timestamp(run_experiment(ExperimentConfig(name, dict(params))))).encode()
    return out


def _cli_report(tmp_path, tag, hashseed):
    path = tmp_path / f"{tag}.json"
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    subprocess.run([sys.executable, "-m", "boolinf", "experiment", "--experiment", "thm1",
                    "--n", "10", "--delta", "0.2", "--k", "3", "--m", "12", "--trials", "2",
                    "--seed", "5", "--out", str(path)], check=True, env=env)
    return dumps(without_timestamp(json.loads(path.read_text())))


def test_acceptance_11_determinism(tmp_path):
    first, second = _artifacts(), _artifacts()
    differing = sorted(name for name in first if first[name] != second[name])
    cli_same = _cli_report(tmp_path, "a", 1) == _cli_report(tmp_path, "b", 2)

    thread_bad = 0
    cases = 0
    for seed in range(4):
        f = cnf_to_function(random_kcnf(14, 3, 25, seed))
        for objective in ("j_plus", "j_minus", "i_total"):
            for s in (3, 6):
                cases += 1
                one = max_coalition(f, s, objective, workers=1)
                many = max_coalition(f, s, objective, workers=4)
                thread_bad += one != many
    ties = max_coalition(tribes(3, 3), 3, "j_plus", workers=4)
    tie_ok = ties.best_set.indices() == (0, 1, 2) and ties.value.fraction == 1
    passed = not differing and cli_same and thread_bad == 0 and tie_ok
    verdict(11, "determinism", passed,
            f"{len(first)} seeded artifacts re-run, differing {differing or 'none'}; CLI report "
            f"identical across processes: {cli_same}; max_coalition 1 vs 4 workers mismatches "
            f"{thread_bad}/{cases}")
