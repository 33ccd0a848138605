"""Named reproduction targets: build a game, analyse it, compare with the known answer."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .analysis import enumerate_ecs
from .audit import TheoremReport, check_theorems
from .families import (
    OPT_OUT,
    BertrandParams,
    VisibilityParams,
    bertrand_grid,
    discretize,
    ec_action_values,
    fg_preset,
    hausdorff_to_interval,
    solve_b,
    uniform_grid,
)
from .game import FiniteGame, GameError, ProductSet, bimatrix, enumerate_pure_ne
from .graphs import GraphKind, build_graph, export_dot, is_rectangular, scc_decompose, sink_sccs

TARGETS = ("table1", "visibility-n6", "visibility-n7", "bertrand", "fg-example")
EC_COLORS = ("pink", "lightblue", "palegreen", "khaki")

# grid resolution for the quadratic f/g instance; coarser grids still have pure NEs
FG_GRID = 32


def table1_game() -> FiniteGame:
    return bimatrix(
        ["U", "M", "D"],
        ["L", "C", "R"],
        [
            [(2, 0), (0, 2), (0, 0)],
            [(0, 2), (2, 0), (0, 0)],
            [(0, 0), (0, 0), (1, 1)],
        ],
    )


def sink_superset_game() -> FiniteGame:
    """4x4 game whose EC {A,B}^2 sits strictly inside a better-response sink SCC."""
    return bimatrix(
        ["A", "B", "C", "D"],
        ["A", "B", "C", "D"],
        [
            [(2, 0), (0, 2), (0, 1), (0, 0)],
            [(0, 2), (2, 0), (1, 0), (0, 0)],
            [(0, 0), (0, 0), (0, 0), (0, 0)],
            [(0, 0), (0, 0), (0, 0), (1, 1)],
        ],
    )


def visibility_game(n: int, players: int = 2) -> FiniteGame:
    return discretize(VisibilityParams(players), uniform_grid(n))


def bertrand_game(alpha=10, c=2, oc=7, step=Fraction(1, 2)) -> FiniteGame:
    params = BertrandParams(alpha, c, oc)
    return discretize(params, bertrand_grid(params, step))


def fg_game(n: int = FG_GRID) -> FiniteGame:
    params = fg_preset("quadratic")
    return discretize(params, uniform_grid(n, params.a_max))


@dataclass
class Check:
    name: str
    expected: str
    computed: str
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "expected": self.expected, "computed": self.computed, "passed": self.passed}


@dataclass
class Reproduction:
    target: str
    game: FiniteGame
    ecs: list[ProductSet]
    checks: list[Check] = field(default_factory=list)
    audit: TheoremReport | None = None
    dot: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def report(self) -> str:
        lines = [f"[{self.target}]"]
        for c in self.checks:
            lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}: expected {c.expected}; computed {c.computed}")
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "passed": self.passed,
            "ecs": [e.to_json() for e in self.ecs],
            "checks": [c.to_json() for c in self.checks],
            "audit": self.audit.to_json() if self.audit else None,
        }


def _describe_all(game: FiniteGame, sets) -> str:
    return "[" + "; ".join(s.describe(game) for s in sets) + "]" if sets else "[]"


def _node_set(game: FiniteGame, nodes) -> str:
    return "{" + ", ".join("(" + ",".join(game.labels(p)) + ")" for p in sorted(nodes)) + "}"


def _grid_set(game: FiniteGame, lo: int, hi: int) -> ProductSet:
    return ProductSet(tuple(range(lo, hi + 1) for _ in range(game.n_players)))


def _table1() -> Reproduction:
    game = table1_game()
    ecs = enumerate_ecs(game)
    rep = Reproduction("table1", game, ecs)
    want = ProductSet.of([0, 1], [0, 1])
    rep.checks.append(Check("equilibrium cycles", want.describe(game), _describe_all(game, ecs), ecs == [want]))
    ne = enumerate_pure_ne(game)
    rep.checks.append(Check("pure Nash equilibria", "[(D,R)]", "[" + ", ".join("(" + ",".join(game.labels(p)) + ")" for p in ne) + "]", ne == [(2, 2)]))
    sinks = sink_sccs(scc_decompose(build_graph(game, GraphKind.BEST)))
    sizes = sorted(len(s) for s in sinks)
    rep.checks.append(Check("best-response sink SCC sizes", "[1, 4]", str(sizes), sizes == [1, 4]))
    return rep


def _visibility_n7() -> Reproduction:
    game = visibility_game(7)
    ecs = enumerate_ecs(game)
    rep = Reproduction("visibility-n7", game, ecs)
    want = _grid_set(game, 0, 4)
    rep.checks.append(Check("unique EC", want.describe(game), _describe_all(game, ecs), ecs == [want]))
    sinks = sink_sccs(scc_decompose(build_graph(game, GraphKind.BEST)), non_singleton_only=True)
    ok = len(sinks) == 1 and set(sinks[0]) < set(want) and is_rectangular(sinks[0]) is None
    computed = f"{len(sinks)} sink(s)" + (f", {len(sinks[0])} nodes, rectangular={is_rectangular(sinks[0]) is not None}" if sinks else "")
    rep.checks.append(Check("non-singleton sink SCC", "one strict non-rectangular subset of the EC", computed, ok))
    return rep


def _visibility_n6() -> Reproduction:
    game = visibility_game(6)
    ecs = enumerate_ecs(game)
    rep = Reproduction("visibility-n6", game, ecs)
    disjoint = all(not a.intersects(b) for k, a in enumerate(ecs) for b in ecs[k + 1:])
    rep.checks.append(Check("EC count", "2 disjoint", f"{len(ecs)}, disjoint={disjoint}", len(ecs) == 2 and disjoint))
    sinks = sink_sccs(scc_decompose(build_graph(game, GraphKind.BEST)), non_singleton_only=True)
    rects = sorted(r for r in (is_rectangular(s) for s in sinks) if r is not None)
    rep.checks.append(Check("ECs equal rectangular sink SCCs", _describe_all(game, ecs), _describe_all(game, rects), rects == ecs))
    return rep


def _bertrand() -> Reproduction:
    game = bertrand_game()
    ecs = enumerate_ecs(game)
    rep = Reproduction("bertrand", game, ecs)
    rep.checks.append(Check("EC exists", ">= 1", str(len(ecs)), bool(ecs)))
    step = Fraction(1, 2)
    for ec in ecs:
        vals = ec_action_values(game, ec)
        prices = [v for comp in vals for v in comp if v is not OPT_OUT]
        in_band = all(3 - step <= p <= 6 + step for p in prices)
        has_opt = all(OPT_OUT in comp for comp in vals)
        rep.checks.append(Check(f"EC {ec.describe(game)}", "prices within 1/2 of [3, 6], opt-out in every component",
                                f"prices [{min(prices)}, {max(prices)}], opt-out={has_opt}" if prices else "no prices",
                                bool(prices) and in_band and has_opt))
    return rep


def _fg_example() -> Reproduction:
    params = fg_preset("quadratic")
    game = fg_game()
    ecs = enumerate_ecs(game)
    rep = Reproduction("fg-example", game, ecs)
    h = params.a_max / FG_GRID
    rep.checks.append(Check("EC exists", ">= 1", str(len(ecs)), bool(ecs)))
    for ec in ecs:
        dist = max(hausdorff_to_interval(vals, Fraction(1, 2), 1) for vals in ec_action_values(game, ec))
        rep.checks.append(Check(f"EC {ec.describe(game)}", f"Hausdorff distance to [1/2, 1] <= {h}", str(dist), dist <= h))
    rp = solve_b(params)
    ok = abs(rp.b - 0.5) <= 1e-9 and abs(rp.c - 1) <= 1e-9
    rep.checks.append(Check("reset point", "b = 1/2, c = 1", f"b = {rp.b:.12g}, c = {rp.c:.12g}", ok))
    return rep


_BUILDERS = {
    "table1": _table1,
    "visibility-n6": _visibility_n6,
    "visibility-n7": _visibility_n7,
    "bertrand": _bertrand,
    "fg-example": _fg_example,
}


def reproduce(target: str, budget: int | None = None) -> Reproduction:
    if target not in _BUILDERS:
        raise GameError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    rep = _BUILDERS[target]()
    rep.audit = check_theorems(rep.game, budget=budget)
    graph = build_graph(rep.game, GraphKind.BEST)
    highlights = [(ec.profiles(), EC_COLORS[k % len(EC_COLORS)]) for k, ec in enumerate(rep.ecs)]
    rep.dot = export_dot(graph, highlights, name=target.replace("-", "_"))
    return rep
