"""Exact T-operator ratio at c = n/k along k = 2^j, n = 4^j, next to a Monte Carlo hit rate."""

import math

from boolinf.analytic import t_operator_ratio, t_operator_subcube
from boolinf.montecarlo import t_operator_hit_rate


def main():
    exact = t_operator_subcube(9, 3, 3)
    est = t_operator_hit_rate(9, 3, 3, 10**6, seed=0)
    print(f"hit rate (9,3,3): exact {exact} = {float(exact):.5f}, "
          f"sampled {est.mean:.5f} +- {est.half_width:.5f}")
    for j in range(1, 8):
        k = 1 << j
        n = k * k
        r = float(t_operator_ratio(n, k, n // k))
        print(f"n={n:>6} k={k:>4} ratio={r:.5f} gap to e={math.e - r:.5f}")
    print(f"n=10000 k=100 ratio={float(t_operator_ratio(10**4, 100, 100)):.5f}")


if __name__ == "__main__":
    main()
