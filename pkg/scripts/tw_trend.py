"""Treewidth of the minimal dual with crossed faces removed, grouped by mu.

Prints one line per mu value over seeded crossing instances.
"""

import argparse
import random
import statistics
from collections import defaultdict

from nearplanar.crossing import witness_report
from nearplanar.generate import GenConfig, generate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t-max", type=int, default=5)
    args = ap.parse_args()
    by_mu = defaultdict(list)
    for i in range(args.count):
        s = args.seed + i
        r = random.Random(s)
        cfg = GenConfig(n=r.randint(6, 10), density=r.choice([0.4, 0.5, 0.6]), t=r.randint(2, args.t_max),
                        crossings=r.randint(1, 3), max_weight=5, inf_rate=0.1, max_edges=14)
        rep = witness_report(generate(s, cfg))
        if rep.tw is not None:
            by_mu[rep.mu].append(rep.tw)
    means = []
    for mu in sorted(by_mu):
        tws = by_mu[mu]
        means.append(statistics.mean(tws))
        print(f"mu={mu} instances={len(tws)} tw_min={min(tws)} tw_mean={means[-1]:.2f} tw_max={max(tws)}")
    print("mean_nondecreasing=" + ("yes" if all(a <= b for a, b in zip(means, means[1:])) else "no"))


if __name__ == "__main__":
    main()
