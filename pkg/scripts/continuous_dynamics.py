"""Run epsilon-better-response dynamics on the continuous families and report tail boxes.

    python3 scripts/continuous_dynamics.py --steps 10000 --eps 0.01
"""

import argparse

from eclab.dynamics import DynamicsPolicy, limit_set, run
from eclab.families import OPT_OUT, BertrandParams, VisibilityParams, fg_preset, predicted_ec


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    args = p.parse_args()

    cases = [
        ("visibility", VisibilityParams(), (0.9, 0.9)),
        ("bertrand(10,2,7)", BertrandParams(10, 2, 7), (9.0, OPT_OUT)),
        ("f/g quadratic", fg_preset("quadratic"), (2.0, 0.0)),
        ("f/g figure1", fg_preset("figure1"), (4.5, 0.0)),
    ]
    for name, family, start in cases:
        pred = predicted_ec(family).per_player[0]
        lo, hi = pred.intervals[0]
        print(f"{name}: predicted [{float(lo):.4f}, {float(hi):.4f}]" + (" plus opt-out" if pred.opt_out else ""))
        for seed in args.seeds:
            policy = DynamicsPolicy(kind="eps-better", epsilon=args.eps, seed=seed, tie_break="uniform-random")
            traj = run(family, start, args.steps, policy)
            tail = limit_set(traj, len(traj.states) // 10)
            box = " x ".join(f"[{a:.4f}, {b:.4f}]" for a, b in tail.box.bounds)
            extra = " plus opt-out" if tail.box.opt_out else ""
            print(f"  seed {seed}: tail box {box}{extra}; {len(tail.states)} distinct states, halted={traj.halted}")


if __name__ == "__main__":
    main()
