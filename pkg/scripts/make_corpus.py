"""Write a seeded corpus of unweighted near-planar and weighted crossing instances.

    python scripts/make_corpus.py out_dir --count 50
    nearplanar bench out_dir
"""

import argparse
import random
from pathlib import Path

from nearplanar.core import serialize_instance
from nearplanar.generate import GenConfig, generate


def configs(seed: int):
    r = random.Random(seed)
    yield "k", GenConfig(n=r.randint(4, 12), density=r.choice([0.3, 0.5, 0.7, 0.9]),
                         t=r.randint(2, 4), pi=r.randint(0, 2), max_edges=14)
    yield "c", GenConfig(n=r.randint(6, 10), density=r.choice([0.4, 0.5, 0.6]), t=r.randint(2, 4),
                         crossings=r.randint(1, 3), max_weight=5, inf_rate=0.1, max_edges=14)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--count", type=int, default=25, help="instances per family")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        for tag, cfg in configs(args.seed + i):
            path = out / f"{tag}{i:04d}.mc"
            path.write_text(serialize_instance(generate(args.seed + i, cfg)))
    print(f"wrote {2 * args.count} instances to {out}")


if __name__ == "__main__":
    main()
