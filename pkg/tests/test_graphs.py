import pytest
from hypothesis import given, settings

from eclab.game import GameError, ProductSet, bimatrix, enumerate_pure_ne
from eclab.graphs import (
    GraphKind,
    best_response_sets,
    build_graph,
    export_dot,
    improvement,
    is_rectangular,
    scc_decompose,
    sink_sccs,
)
from eclab.reproduce import sink_superset_game

from conftest import small_games


def reachability(graph):
    reach = {v: {v} for v in graph.nodes}
    changed = True
    while changed:
        changed = False
        for v in graph.nodes:
            new = set().union(*(reach[w] for w in graph.successors[v])) | reach[v]
            if new != reach[v]:
                reach[v] = new
                changed = True
    return reach


def oracle_sccs(graph):
    reach = reachability(graph)
    comps = {frozenset(w for w in graph.nodes if v in reach[w] and w in reach[v]) for v in graph.nodes}
    return sorted(comps, key=min)


def test_table1_best_graph(table1):
    g = build_graph(table1, "best")
    assert g.successors[(0, 0)] == ((0, 1),)
    assert g.successors[(0, 1)] == ((1, 1),)
    assert g.successors[(2, 2)] == ()
    sinks = sink_sccs(scc_decompose(g))
    assert sinks == [frozenset({(0, 0), (0, 1), (1, 0), (1, 1)}), frozenset({(2, 2)})]


def test_ties_give_parallel_edges_and_no_self_loops():
    game = bimatrix(["a", "b", "c"], ["x"], [[(0, 0)], [(1, 0)], [(1, 0)]])
    g = build_graph(game, GraphKind.BEST)
    assert g.successors[(0, 0)] == ((1, 0), (2, 0))
    assert g.successors[(1, 0)] == ()
    assert all(u != v for u, v in g.edges())


def test_better_graph_contains_best_graph(table1):
    best, better = build_graph(table1, "best"), build_graph(table1, "better")
    assert set(best.edges()) <= set(better.edges())


@settings(max_examples=150)
@given(small_games())
def test_scc_matches_closure_oracle(game):
    for kind in GraphKind:
        g = build_graph(game, kind)
        d = scc_decompose(g)
        assert list(d.components) == oracle_sccs(g)
        reach = reachability(g)
        for comp, sink in zip(d.components, d.is_sink):
            v = min(comp)
            assert sink == (reach[v] == set(comp))


@given(small_games())
def test_singleton_sinks_are_pure_ne(game):
    sinks = sink_sccs(scc_decompose(build_graph(game, "best")))
    singles = sorted(next(iter(s)) for s in sinks if len(s) == 1)
    assert singles == enumerate_pure_ne(game)


@given(small_games())
def test_every_node_reaches_a_sink(game):
    g = build_graph(game, "best")
    reach = reachability(g)
    sinks = sink_sccs(scc_decompose(g))
    for v in g.nodes:
        assert any(reach[v] & s for s in sinks)


@given(small_games())
def test_best_response_sets_are_argmax(game):
    for (i, opp), acts in best_response_sets(game).items():
        row = game.row(opp, i)
        assert acts == tuple(a for a, u in enumerate(row) if u == max(row))


def test_is_rectangular():
    assert is_rectangular({(0, 0), (0, 1), (1, 0), (1, 1)}) == ProductSet.of([0, 1], [0, 1])
    assert is_rectangular({(0, 0), (1, 1)}) is None
    with pytest.raises(GameError):
        is_rectangular(set())


def test_better_response_sink_is_superset_of_ec():
    game = sink_superset_game()
    sinks = sink_sccs(scc_decompose(build_graph(game, "better")), non_singleton_only=True)
    assert [is_rectangular(s) for s in sinks] == [ProductSet.of([0, 1], [0, 1, 2])]


def test_export_dot(table1):
    g = build_graph(table1, "best")
    dot = export_dot(g, [([(0, 0), (0, 1)], "pink")], name="t1")
    assert dot == export_dot(g, [([(0, 0), (0, 1)], "pink")], name="t1")
    assert dot.startswith("digraph t1 {")
    assert '"(U,L)" [style=filled, fillcolor="pink"];' in dot
    assert '"(U,L)" -> "(U,C)";' in dot
    assert dot.count("->") == len(g.edges())
    with pytest.raises(GameError):
        export_dot(g, [([(9, 9)], "red")])


def test_improvement(table1):
    assert improvement(table1, ((0, 0), (0, 1))) == (1, 2)
    with pytest.raises(GameError):
        improvement(table1, ((0, 0), (1, 1)))
