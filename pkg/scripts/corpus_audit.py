"""Audit seeded random corpora and summarize which checks fail and why.

    python3 scripts/corpus_audit.py --seed 42 --count 500 --players 2 --actions 2 4
"""

import argparse
import json
from collections import Counter

from eclab.analysis import mixed_ne_in_support
from eclab.audit import check_theorems
from eclab.game import random_corpus


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--players", type=int, default=2)
    p.add_argument("--actions", type=int, nargs=2, default=(2, 4))
    p.add_argument("--values", type=int, nargs=2, default=(0, 4))
    p.add_argument("--out", help="write per-game failures as JSON")
    args = p.parse_args()

    corpus = random_corpus(args.seed, args.count, args.players, tuple(args.actions), tuple(args.values))
    status = Counter()
    failed = Counter()
    with_ec = 0
    no_mixed = []
    records = []
    for k, g in enumerate(corpus):
        rep = check_theorems(g)
        status[rep.status] += 1
        with_ec += bool(rep.ecs)
        for c in rep.checks:
            if not c.passed:
                failed[c.name] += 1
        if g.n_players == 2:
            for ec in rep.ecs:
                if mixed_ne_in_support(g, ec) is None:
                    no_mixed.append((k, [list(c) for c in ec.per_player]))
        if rep.status == "fail":
            records.append({"index": k, "shape": list(g.shape), **rep.to_json()})

    print(f"{len(corpus)} games, {with_ec} with an EC: {dict(status)}")
    for name, n in sorted(failed.items()):
        print(f"  {name}: {n} game(s) fail")
    if args.players == 2:
        print(f"  ECs with no mixed NE supported inside: {len(no_mixed)} {no_mixed}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"failures": records, "no_mixed_ne": no_mixed}, fh, indent=2)


if __name__ == "__main__":
    main()
