import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eclab.analysis import enumerate_ecs
from eclab.dynamics import (
    Box,
    DynamicsPolicy,
    PolicyKind,
    check_absorption,
    limit_set,
    run,
    step,
)
from eclab.families import OPT_OUT, BertrandParams, VisibilityParams, fg_preset, utility_eval
from eclab.game import GameError, ProductSet, bimatrix, enumerate_pure_ne
from eclab.graphs import build_graph, scc_decompose, sink_sccs
from eclab.reproduce import visibility_game

from conftest import small_games

BR_RR = DynamicsPolicy(player_selection="round-robin")
PENNIES = bimatrix(["H", "T"], ["H", "T"], [[(1, 0), (0, 1)], [(0, 1), (1, 0)]])
CYCLE = ProductSet.of([0, 1], [0, 1])


def test_policy_validation():
    with pytest.raises(GameError):
        DynamicsPolicy(kind="eps-better")
    with pytest.raises(GameError):
        DynamicsPolicy(kind="eps-better", epsilon=0)
    with pytest.raises(ValueError):
        DynamicsPolicy(player_selection="sideways")


def test_table1_steps(table1):
    assert step(table1, (0, 0), 1, BR_RR) == 1
    for i in range(2):
        assert step(table1, (2, 2), i, BR_RR) == 2


def test_table1_round_robin_orders(table1):
    halt = run(table1, (0, 2), 20, DynamicsPolicy(player_selection="round-robin", first_player=0))
    assert halt.halted and halt.states[-1] == (2, 2)
    cyc = run(table1, (0, 2), 20, DynamicsPolicy(player_selection="round-robin", first_player=1))
    assert not cyc.halted and len(cyc) == 21
    rep = check_absorption(cyc, CYCLE)
    assert rep.entered_at is not None and not rep.ever_left_after_entry and not rep.is_stationary_inside
    rep = check_absorption(halt, CYCLE)
    assert rep.entered_at is None or rep.ever_left_after_entry
    assert limit_set(halt, len(halt) - 1).states == {(2, 2)}


def test_matching_pennies_cycles():
    traj = run(PENNIES, (0, 0), 40, BR_RR)
    assert not traj.halted and len(traj) == 41
    assert limit_set(traj, 10).states == frozenset(CYCLE)
    rep = check_absorption(traj, ProductSet.full(PENNIES))
    assert rep.entered_at == 0 and not rep.ever_left_after_entry and not rep.is_stationary_inside


def test_limit_set_burn_in_guard():
    traj = run(PENNIES, (0, 0), 3, BR_RR)
    with pytest.raises(GameError):
        limit_set(traj, 4)
    with pytest.raises(GameError):
        check_absorption(traj, CYCLE, burn_in=10)


def test_visibility_n7_run_stays_in_sink():
    game = visibility_game(7)
    traj = run(game, (7, 7), 200, DynamicsPolicy(seed=1))
    (sink,) = sink_sccs(scc_decompose(build_graph(game, "best")), non_singleton_only=True)
    tail = limit_set(traj, 100).states
    assert tail <= sink and len(tail) >= 2


@settings(max_examples=60, deadline=None)
@given(small_games(), st.integers(0, 2**16), st.sampled_from(["uniform-random", "round-robin"]))
def test_finite_runs_follow_best_response_edges(game, seed, selection):
    policy = DynamicsPolicy(player_selection=selection, tie_break="uniform-random", seed=seed)
    graph = build_graph(game, "best")
    decomp = scc_decompose(graph)
    start = tuple(random.Random(seed).randrange(m) for m in game.shape)
    traj = run(game, start, 5 * game.n_profiles, policy)
    for u, v in zip(traj.states, traj.states[1:]):
        diff = [i for i in range(game.n_players) if u[i] != v[i]]
        assert len(diff) <= 1
        assert u == v or v in graph.successors[u]
    entered = False
    for s in traj.states:
        sink = decomp.is_sink[decomp.component_of[s]]
        assert sink or not entered
        entered = entered or sink
    assert traj.halted == (traj.states[-1] in enumerate_pure_ne(game) and len(traj) <= 5 * game.n_profiles)
    assert traj == run(game, start, 5 * game.n_profiles, policy)


def test_continuous_visibility_step():
    policy = DynamicsPolicy(kind="eps-better", epsilon=0.01)
    assert step(VisibilityParams(), (0.3, 0.6), 0, policy) == 0.0


def test_continuous_visibility_oscillates():
    policy = DynamicsPolicy(kind="eps-better", epsilon=0.01, seed=5, tie_break="uniform-random")
    traj = run(VisibilityParams(), (0.9, 0.2), 10_000, policy)
    assert not traj.halted
    box = limit_set(traj, 1000).box
    for lo, hi in box.bounds:
        assert 0 <= lo and hi <= 0.5 + 0.01 + 1e-4
    assert len(limit_set(traj, 1000).states) >= 2


@pytest.mark.parametrize("family", [VisibilityParams(), BertrandParams(10, 2, 7), fg_preset("figure1")])
def test_eps_better_steps_strictly_improve(family):
    policy = DynamicsPolicy(kind="eps-better", epsilon=0.05, seed=2, tie_break="uniform-random", grid_points=2000)
    start = (0.0, 0.0) if not isinstance(family, BertrandParams) else (8.0, OPT_OUT)
    traj = run(family, start, 300, policy)
    for k, mover in enumerate(traj.movers):
        before, after = traj.states[k], traj.states[k + 1]
        if before != after:
            assert utility_eval(family, after)[mover] > utility_eval(family, before)[mover]


def test_bertrand_dynamics_stay_near_band():
    policy = DynamicsPolicy(kind="eps-better", epsilon=0.01, seed=4, tie_break="uniform-random")
    traj = run(BertrandParams(10, 2, 7), (9.0, 9.0), 4000, policy)
    box = limit_set(traj, 1000).box
    for lo, hi in box.bounds:
        assert 3 - 0.05 <= lo and hi <= 6 + 0.2
    assert Box(((2.9, 6.5), (2.9, 6.5)), opt_out=True).__contains__((3.0, OPT_OUT))


def test_runs_are_reproducible():
    policy = DynamicsPolicy(kind="eps-better", epsilon=Fraction(1, 100), seed=9, tie_break="uniform-random", grid_points=500)
    a = run(VisibilityParams(), (0.5, 0.5), 200, policy)
    b = run(VisibilityParams(), (0.5, 0.5), 200, policy)
    assert a.states == b.states and a.movers == b.movers


def test_run_rejects_bad_input(table1):
    with pytest.raises(GameError):
        run(table1, (0, 0), -1, BR_RR)
    with pytest.raises(GameError):
        run(table1, (0, 5), 3, BR_RR)
    with pytest.raises(GameError):
        run(VisibilityParams(), (0.1,), 3, BR_RR)


def test_finite_eps_better(table1):
    policy = DynamicsPolicy(kind=PolicyKind.EPS_BETTER, epsilon=Fraction(1, 2))
    # from (D,L) player 0 can move to U (payoff 2); M is not an improvement
    assert step(table1, (2, 0), 0, policy) == 0
