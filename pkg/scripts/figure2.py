"""Write DOT files for the best-response graphs of the n=6 and n=7 visibility grids.

EC profiles are filled; nodes of non-singleton sink SCCs get a second color
when they differ from the EC (as for n=7).

    python3 scripts/figure2.py --out figures/
    dot -Tpdf figures/visibility_n7.dot -o n7.pdf
"""

import argparse
from pathlib import Path

from eclab.analysis import enumerate_ecs
from eclab.graphs import build_graph, export_dot, scc_decompose, sink_sccs
from eclab.reproduce import visibility_game


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", default="figures")
    p.add_argument("--grids", type=int, nargs="+", default=[6, 7])
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in args.grids:
        game = visibility_game(n)
        graph = build_graph(game, "best")
        sinks = sink_sccs(scc_decompose(graph), non_singleton_only=True)
        ecs = enumerate_ecs(game)
        # sink nodes first so they keep their color inside an EC
        highlights = [(s, "orange") for s in sinks] + [(ec.profiles(), "pink") for ec in ecs]
        path = out / f"visibility_n{n}.dot"
        path.write_text(export_dot(graph, highlights, name=f"visibility_n{n}"))
        print(f"n={n}: {len(ecs)} EC(s), sink sizes {[len(s) for s in sinks]} -> {path}")
        for ec in ecs:
            print(f"  EC {ec.describe(game)}")


if __name__ == "__main__":
    main()
