"""Compare ECs of discretized games with the continuous predictions across grid sizes.

    python3 scripts/discretization_sweep.py
"""

import argparse
import time
from fractions import Fraction

from eclab.analysis import enumerate_ecs
from eclab.families import (
    OPT_OUT,
    BertrandParams,
    VisibilityParams,
    bertrand_grid,
    discretize,
    ec_action_values,
    fg_preset,
    hausdorff_to_interval,
    uniform_grid,
)


def show(label, game, interval) -> None:
    t = time.perf_counter()
    ecs = enumerate_ecs(game)
    dt = time.perf_counter() - t
    if not ecs:
        print(f"{label:>24}: no EC ({dt:.2f}s)")
        return
    for ec in ecs:
        vals = [[v for v in comp if v is not OPT_OUT] for comp in ec_action_values(game, ec)]
        dist = max(hausdorff_to_interval(v, *interval) for v in vals if v)
        span = ", ".join(f"[{min(v)}, {max(v)}]" for v in vals if v)
        print(f"{label:>24}: EC spans {span}; Hausdorff to [{interval[0]}, {interval[1]}] = {dist} ({dt:.2f}s)")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--visibility", type=int, nargs="+", default=list(range(2, 13)))
    p.add_argument("--fg", type=int, nargs="+", default=[8, 16, 20, 24, 32, 40])
    p.add_argument("--bertrand-steps", nargs="+", default=["1", "1/2", "1/4"])
    args = p.parse_args()

    for n in args.visibility:
        show(f"visibility n={n}", discretize(VisibilityParams(), uniform_grid(n)), (0, Fraction(1, 2)))
    params = BertrandParams(10, 2, 7)
    for step in args.bertrand_steps:
        show(f"bertrand step={step}", discretize(params, bertrand_grid(params, Fraction(step))), (3, 6))
    fg = fg_preset("quadratic")
    for n in args.fg:
        show(f"quadratic f/g n={n}", discretize(fg, uniform_grid(n, fg.a_max)), (Fraction(1, 2), 1))


if __name__ == "__main__":
    main()
