"""Closed-form tribes measures for the small-measure and target-measure recipes, n = 2^4 .. 2^20."""

import math

from boolinf.generators import tribes_k_for_target
from boolinf.harness.experiments import tribes_mu_closed_form


def main():
    print(f"{'n':>8} {'k':>3} {'m':>7} {'mu*2n':>8}   " + "  ".join(f"k(t={t})" for t in (0.1, 0.2, 0.5)))
    for j in range(4, 21):
        n = 1 << j
        k = max(1, round(2 * math.log2(n) - math.log2(math.log2(n))))
        m = n // k
        mu = tribes_mu_closed_form(m, k)
        targets = []
        for t in (0.1, 0.2, 0.5):
            kt = tribes_k_for_target(n, t)
            dual = 1 - tribes_mu_closed_form(n // kt, kt)
            targets.append(f"{kt:>3}:{float(dual):.3f}")
        print(f"{n:>8} {k:>3} {m:>7} {float(mu) * 2 * n:8.3f}   " + "  ".join(targets))


if __name__ == "__main__":
    main()
