"""Does (C(n,<r)+1, n) -> (C(m,<r)+1, m) hold at r = n/2, m = n-1?  Scan tribes supports.

Dropping members can only shrink traces, so a tribes support with at least
N = C(n,<r)+1 members whose every (n-1)-trace stays at or below C(n-1,<r)
yields a counterexample from any N of its members.  Tribes on fewer than n
variables are padded with dummy coordinates.  Small hits are re-verified by
exhaustive trace enumeration; a random local search runs alongside.
"""

import argparse

from boolinf.core import BooleanFunction, half_or
from boolinf.generators import tribes
from boolinf.trace import SetFamily, arrow_falsify, sauer_shelah_threshold, verify_arrow_counterexample


def padded(f, n):
    """f on the first f.n coordinates, constant in the remaining ones."""
    table = f.table
    for j in range(f.n, n):
        table |= table << (1 << j)
    return BooleanFunction(n, table)


def scan(n):
    r = n // 2
    N = sauer_shelah_threshold(n, r) + 1
    M = sauer_shelah_threshold(n - 1, r) + 1
    hits = []
    for k in range(1, n + 1):
        for blocks in range(1, n // k + 1):
            f = padded(tribes(blocks, k), n)
            if f.weight < N:
                continue
            widest = max(half_or(f.table, n, i).bit_count() for i in range(n))
            if widest < M:
                hits.append((blocks, k, f, widest))
    return N, M, hits


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-max", type=int, default=20)
    parser.add_argument("--search-n-max", type=int, default=8)
    parser.add_argument("--budget", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    for n in range(4, args.n_max + 1, 2):
        N, M, hits = scan(n)
        line = f"n={n:>2} N={N:>7} M={M:>7} tribes counterexamples: "
        if hits:
            blocks, k, f, widest = hits[0]
            verified = ""
            if n <= 12:
                family = SetFamily(n, SetFamily.from_function(f).members[:N])
                verified = f", verified={verify_arrow_counterexample(family, M, n - 1)}"
            print(line + f"{len(hits)} (first: {blocks} blocks of {k}, widest trace {widest}{verified})")
        else:
            print(line + "none")
        if n <= args.search_n_max:
            found = arrow_falsify(N, n, M, n - 1, budget=args.budget, seed=args.seed)
            print(f"       local search: {'found' if found else 'nothing within budget'}")


if __name__ == "__main__":
    main()
