import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

from eclab.analysis import (
    BudgetExceeded,
    Condition,
    MixedProfile,
    br_image,
    brute_force_ecs,
    curb_closure,
    enumerate_ecs,
    expected_payoffs,
    is_curb,
    is_dominant_ec,
    is_mixed_ne,
    is_non_trivial,
    minimal_curb_sets,
    mixed_ne_in_support,
    satisfies_conditions,
    solve_exact,
    verify_ec,
)
from eclab.game import GameError, ProductSet, bimatrix, enumerate_pure_ne, random_game
from eclab.reproduce import sink_superset_game, visibility_game

from conftest import small_games

EC1 = ProductSet.of([0, 1], [0, 1])

# EC {A,B} x {L,R} whose only mixed equilibrium of the restricted game is
# beaten by the outside action T
OUTSIDE_BEATS_MIX = bimatrix(
    ["A", "B", "T"],
    ["L", "R"],
    [[(3, 0), (0, 1)], [(0, 1), (3, 0)], [(2, 1), (2, 0)]],
)


def test_table1_curb_structure(table1):
    assert curb_closure(table1, ProductSet.singleton((0, 0))) == EC1
    assert is_curb(table1, EC1)
    assert not is_curb(table1, ProductSet.of([0], [0, 1]))
    assert minimal_curb_sets(table1) == [EC1, ProductSet.singleton((2, 2))]
    assert is_non_trivial(table1, EC1)
    assert not is_non_trivial(table1, ProductSet.singleton((2, 2)))
    with pytest.raises(GameError):
        is_non_trivial(table1, ProductSet.of([0], [0]))


def test_table1_ecs(table1):
    assert enumerate_ecs(table1, debug=True) == [EC1]
    assert brute_force_ecs(table1) == [EC1]
    assert verify_ec(table1, EC1)


def test_verify_ec_stability_witness(table1):
    v = verify_ec(table1, ProductSet.of([0, 1], [0]))
    assert not v and v.failed_condition is Condition.STABILITY
    assert v.witness.player == 1


def test_verify_ec_unrest_witness(table1):
    v = verify_ec(table1, ProductSet.singleton((2, 2)))
    assert v.failed_condition is Condition.UNREST
    assert v.witness.profile == (2, 2)


def test_verify_ec_minimality_witness():
    # two copies of matching pennies; the union is stable and restless but not minimal
    cells = [[(0, 0)] * 4 for _ in range(4)]
    for r in range(2):
        for c in range(2):
            cells[r][c] = (2, 0) if r == c else (0, 2)
            cells[r + 2][c + 2] = (2, 0) if r == c else (0, 2)
    game = bimatrix(list("abcd"), list("wxyz"), cells)
    ecs = enumerate_ecs(game)
    assert ecs == [ProductSet.of([0, 1], [0, 1]), ProductSet.of([2, 3], [2, 3])]
    full = ProductSet.full(game)
    assert satisfies_conditions(game, full)
    v = verify_ec(game, full)
    assert v.failed_condition is Condition.MINIMALITY
    assert v.witness.subset is not None and v.witness.subset != full


def test_minimality_budget(table1):
    with pytest.raises(BudgetExceeded, match="minimality check infeasible"):
        verify_ec(table1, EC1, budget=2)
    with pytest.raises(BudgetExceeded):
        brute_force_ecs(random_game(0, [20, 20]))


def test_budget_from_environment(table1, monkeypatch):
    monkeypatch.setenv("EC_LAB_BUDGET", "3")
    with pytest.raises(BudgetExceeded):
        brute_force_ecs(table1)


def test_ec_strictly_inside_better_sink():
    assert enumerate_ecs(sink_superset_game()) == [ProductSet.of([0, 1], [0, 1])]


@settings(max_examples=200, deadline=None)
@given(small_games())
def test_curb_enumeration_matches_brute_force(game):
    ecs = enumerate_ecs(game)
    assert ecs == brute_force_ecs(game)
    pure = enumerate_pure_ne(game)
    for ec in ecs:
        assert verify_ec(game, ec)
        assert len(ec) >= 2
        assert not any(p in ec for p in pure)
    for k, a in enumerate(ecs):
        assert all(not a.intersects(b) for b in ecs[k + 1:])


@given(small_games())
def test_closure_is_curb_and_monotone(game):
    for p in game.profiles():
        c = curb_closure(game, ProductSet.singleton(p))
        assert p in c and is_curb(game, c)
        assert br_image(game, c).issubset(c)


def test_two_ecs_are_not_both_dominant():
    game = visibility_game(6)
    ecs = enumerate_ecs(game)
    assert len(ecs) == 2
    # two ECs can never both be dominant
    assert not all(is_dominant_ec(game, ec) for ec in ecs)


def test_is_dominant_ec_rejects_non_ec(table1):
    with pytest.raises(GameError):
        is_dominant_ec(table1, ProductSet.of([0], [0]))


def test_dominant_ec_in_pure_cycle():
    # matching pennies plus an action that is always strictly worse
    game = bimatrix(["H", "T", "X"], ["H", "T"], [[(1, 0), (0, 1)], [(0, 1), (1, 0)], [(-1, 0), (-1, 0)]])
    ec = ProductSet.of([0, 1], [0, 1])
    assert enumerate_ecs(game) == [ec]
    assert is_dominant_ec(game, ec)
    assert enumerate_pure_ne(game) == []


def test_solve_exact():
    assert solve_exact([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]], [Fraction(3), Fraction(5)]) == [
        Fraction(4, 5),
        Fraction(7, 5),
    ]
    assert solve_exact([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], [Fraction(1), Fraction(2)]) is None


def test_table1_mixed_ne(table1):
    m = mixed_ne_in_support(table1, EC1)
    half = Fraction(1, 2)
    assert m.probs == ((half, half, Fraction(0)), (half, half, Fraction(0)))
    assert is_mixed_ne(table1, m)
    assert expected_payoffs(table1, m, 0) == [1, 1, 0]


def test_mixed_ne_none_is_conclusive():
    ec = ProductSet.of([0, 1], [0, 1])
    assert enumerate_ecs(OUTSIDE_BEATS_MIX) == [ec]
    assert mixed_ne_in_support(OUTSIDE_BEATS_MIX, ec) is None
    # the restricted game's unique equilibrium loses to T
    half = Fraction(1, 2)
    restricted = MixedProfile(((half, half, Fraction(0)), (half, half)))
    assert expected_payoffs(OUTSIDE_BEATS_MIX, restricted, 0) == [Fraction(3, 2), Fraction(3, 2), 2]
    assert not is_mixed_ne(OUTSIDE_BEATS_MIX, restricted)
    full = mixed_ne_in_support(OUTSIDE_BEATS_MIX, ProductSet.full(OUTSIDE_BEATS_MIX))
    assert full is not None and is_mixed_ne(OUTSIDE_BEATS_MIX, full)
    assert 2 in full.support(0)


@settings(max_examples=100, deadline=None)
@given(small_games(max_players=2, max_actions=4))
def test_mixed_ne_over_full_game_exists(game):
    m = mixed_ne_in_support(game, ProductSet.full(game))
    assert m is not None and is_mixed_ne(game, m)


def test_mixed_ne_needs_two_players():
    with pytest.raises(GameError):
        g = random_game(0, [2, 2, 2])
        mixed_ne_in_support(g, ProductSet.full(g))


def test_mixed_profile_validation():
    with pytest.raises(GameError):
        MixedProfile(((Fraction(1, 2), Fraction(1, 3)),))


def _lp_equilibrium_exists(game, region) -> bool:
    # independent oracle: one LP feasibility problem per support pair inside the region
    np = pytest.importorskip("numpy")
    linprog = pytest.importorskip("scipy.optimize").linprog
    m1, m2 = game.shape
    A = np.array([[float(game.utility((r, c), 0)) for c in range(m2)] for r in range(m1)])
    B = np.array([[float(game.utility((r, c), 1)) for c in range(m2)] for r in range(m1)])
    n = m1 + m2 + 2
    rows, cols = region.per_player
    for k1 in range(1, len(rows) + 1):
        for s1 in itertools.combinations(rows, k1):
            for k2 in range(1, len(cols) + 1):
                for s2 in itertools.combinations(cols, k2):
                    eq, beq, ub = [], [], []
                    for r in range(m1):
                        v = np.zeros(n)
                        v[m1:m1 + m2], v[-2] = A[r], -1
                        (eq if r in s1 else ub).append(v)
                        beq += [0] if r in s1 else []
                    for c in range(m2):
                        v = np.zeros(n)
                        v[:m1], v[-1] = B[:, c], -1
                        (eq if c in s2 else ub).append(v)
                        beq += [0] if c in s2 else []
                    for lo, hi in ((0, m1), (m1, m1 + m2)):
                        v = np.zeros(n)
                        v[lo:hi] = 1
                        eq.append(v)
                        beq.append(1)
                    bounds = [(0, None) if r in s1 else (0, 0) for r in range(m1)]
                    bounds += [(0, None) if c in s2 else (0, 0) for c in range(m2)] + [(None, None)] * 2
                    res = linprog(
                        np.zeros(n),
                        A_ub=np.array(ub) if ub else None,
                        b_ub=np.zeros(len(ub)) if ub else None,
                        A_eq=np.array(eq),
                        b_eq=np.array(beq, dtype=float),
                        bounds=bounds,
                        method="highs",
                    )
                    if res.status == 0:
                        return True
    return False


@settings(max_examples=80, deadline=None)
@given(small_games(max_players=2, max_actions=4))
def test_mixed_ne_search_agrees_with_lp_oracle(game):
    for ec in enumerate_ecs(game):
        assert (mixed_ne_in_support(game, ec) is not None) == _lp_equilibrium_exists(game, ec)


def test_lp_oracle_agrees_on_outside_deviation_example():
    assert not _lp_equilibrium_exists(OUTSIDE_BEATS_MIX, ProductSet.of([0, 1], [0, 1]))
    assert _lp_equilibrium_exists(OUTSIDE_BEATS_MIX, ProductSet.full(OUTSIDE_BEATS_MIX))
