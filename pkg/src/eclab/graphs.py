"""Best- and better-response graphs over pure profiles, SCCs and DOT export."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .game import FiniteGame, GameError, Profile, ProductSet


class GraphKind(str, Enum):
    BEST = "best"
    BETTER = "better"


@dataclass(frozen=True)
class ResponseGraph:
    kind: GraphKind
    game: FiniteGame
    nodes: tuple[Profile, ...]
    successors: dict[Profile, tuple[Profile, ...]]

    def edges(self) -> list[tuple[Profile, Profile]]:
        return [(u, v) for u in self.nodes for v in self.successors[u]]

    def out_degree(self, node: Profile) -> int:
        return len(self.successors[node])


@dataclass(frozen=True)
class SCCDecomposition:
    graph: ResponseGraph
    components: tuple[frozenset[Profile], ...]
    component_of: dict[Profile, int]
    is_sink: tuple[bool, ...]


def best_response_sets(game: FiniteGame) -> dict[tuple[int, Profile], tuple[int, ...]]:
    """Map ``(player, opponent profile)`` to the argmax set of that player's utility row.

    Opponent profiles are keyed as full profiles with a 0 placeholder in the
    player's own slot, matching ``ProductSet.opponents``.
    """
    out = {}
    full = ProductSet.full(game)
    for i in range(game.n_players):
        for opp in full.opponents(i):
            out[(i, opp)] = best_responses(game, opp, i)
    return out


def best_responses(game: FiniteGame, profile: Profile, player: int) -> tuple[int, ...]:
    row = game.row(profile, player)
    top = max(row)
    return tuple(a for a, u in enumerate(row) if u == top)


def _moves(game: FiniteGame, node: Profile, player: int, kind: GraphKind) -> list[int]:
    row = game.row(node, player)
    cur = row[node[player]]
    if kind is GraphKind.BEST:
        top = max(row)
        if top <= cur:
            return []
        return [a for a, u in enumerate(row) if u == top]
    return [a for a, u in enumerate(row) if u > cur]


def build_graph(game: FiniteGame, kind: GraphKind | str = GraphKind.BEST) -> ResponseGraph:
    kind = GraphKind(kind)
    nodes = tuple(game.profiles())
    succ: dict[Profile, tuple[Profile, ...]] = {}
    for node in nodes:
        out = []
        for i in range(game.n_players):
            for a in _moves(game, node, i, kind):
                out.append(node[:i] + (a,) + node[i + 1:])
        succ[node] = tuple(sorted(out))
    return ResponseGraph(kind, game, nodes, succ)


def _tarjan(nodes: Sequence[Profile], succ: dict[Profile, tuple[Profile, ...]]) -> list[list[Profile]]:
    # iterative to stay clear of the recursion limit on large discretizations
    index: dict[Profile, int] = {}
    low: dict[Profile, int] = {}
    on_stack: set[Profile] = set()
    stack: list[Profile] = []
    comps: list[list[Profile]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def scc_decompose(graph: ResponseGraph) -> SCCDecomposition:
    """Tarjan decomposition with component ids ordered by each component's smallest node."""
    raw = _tarjan(graph.nodes, graph.successors)
    comps = sorted((frozenset(c) for c in raw), key=min)
    comp_of = {v: k for k, c in enumerate(comps) for v in c}
    sink = tuple(
        all(comp_of[w] == k for v in c for w in graph.successors[v]) for k, c in enumerate(comps)
    )
    return SCCDecomposition(graph, tuple(comps), comp_of, sink)


def sink_sccs(decomp: SCCDecomposition, non_singleton_only: bool = False) -> list[frozenset[Profile]]:
    return [
        c
        for c, sink in zip(decomp.components, decomp.is_sink)
        if sink and (len(c) > 1 or not non_singleton_only)
    ]


def is_rectangular(nodes: Iterable[Profile]) -> ProductSet | None:
    """The product set equal to ``nodes``, if the node set is a Cartesian product."""
    nodes = set(nodes)
    if not nodes:
        raise GameError("is_rectangular needs a non-empty node set")
    n = len(next(iter(nodes)))
    proj = ProductSet(tuple({p[i] for p in nodes} for i in range(n)))
    if len(proj) != len(nodes):
        return None
    return proj


def _node_name(game: FiniteGame, node: Profile) -> str:
    return "(" + ",".join(game.labels(node)) + ")"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    graph: ResponseGraph,
    highlights: Sequence[tuple[Iterable[Profile], str]] = (),
    name: str = "response_graph",
) -> str:
    """Render the graph as a DOT digraph; highlighted node sets get a fill color."""
    game = graph.game
    fill: dict[Profile, str] = {}
    node_set = set(graph.nodes)
    for nodes, color in highlights:
        for v in nodes:
            v = tuple(v)
            if v not in node_set:
                raise GameError(f"highlighted node {v} is not in the graph")
            fill.setdefault(v, color)
    lines = [f"digraph {name} {{", f'  label="{graph.kind.value}-response graph";', "  node [shape=circle];"]
    for v in graph.nodes:
        attrs = ""
        if v in fill:
            attrs = f" [style=filled, fillcolor={_quote(fill[v])}]"
        lines.append(f"  {_quote(_node_name(game, v))}{attrs};")
    for u, v in graph.edges():
        lines.append(f"  {_quote(_node_name(game, u))} -> {_quote(_node_name(game, v))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def improvement(game: FiniteGame, edge: tuple[Profile, Profile]) -> tuple[int, Fraction]:
    """The moving player and its utility gain along an edge."""
    u, v = edge
    diff = [i for i in range(game.n_players) if u[i] != v[i]]
    if len(diff) != 1:
        raise GameError(f"edge {edge} does not change exactly one action")
    i = diff[0]
    return i, game.utility(v, i) - game.utility(u, i)
