import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from eclab.game import (
    FiniteGame,
    GameError,
    ProductSet,
    bimatrix,
    corpus_digest,
    dump_game,
    enumerate_pure_ne,
    format_fraction,
    improving_actions,
    is_pure_ne,
    is_very_weakly_dominant_ne,
    load_game,
    random_corpus,
    random_game,
    to_fraction,
    with_dominant_actions,
)

from conftest import small_games

CORPUS2_DIGEST = "924a391c45c8b09e7f3c70d864fd9c61e46f29ae650788a1f33212e96bca98a7"
CORPUS3_DIGEST = "5947d806ace7386d315a2e019438f85b665173f49a526de99a1f1e8744a46533"


def test_to_fraction_forms():
    assert to_fraction("3/4") == Fraction(3, 4)
    assert to_fraction(2) == 2
    assert to_fraction("0.1") == Fraction(1, 10)
    assert to_fraction(0.1) == Fraction(1, 10)
    with pytest.raises(GameError):
        to_fraction("1/0")
    with pytest.raises(GameError):
        to_fraction("abc")


def test_format_fraction():
    assert format_fraction(Fraction(4, 2)) == 2
    assert format_fraction(Fraction(1, 3)) == "1/3"


def test_table1_utilities(table1):
    assert table1.shape == (3, 3)
    assert table1.utility((0, 0), 0) == 2
    assert table1.utility((0, 1), 1) == 2
    assert table1.utility((2, 2), 1) == 1
    assert table1.profile_from_labels(["D", "R"]) == (2, 2)


def test_pure_ne_of_table1(table1):
    assert enumerate_pure_ne(table1) == [(2, 2)]
    assert not is_pure_ne(table1, (0, 0))
    assert improving_actions(table1, (0, 0), 1) == [1]


def test_load_game_document(table1):
    doc = {
        "players": 2,
        "actions": [["U", "M", "D"], ["L", "C", "R"]],
        "payoffs": [
            [[2, 0], [0, 2], [0, 0]],
            [[0, 2], [2, 0], [0, 0]],
            [[0, 0], [0, 0], ["1/1", "1"]],
        ],
    }
    assert load_game(doc) == table1
    assert load_game(json.dumps(doc)) == table1


@pytest.mark.parametrize(
    "doc, msg",
    [
        ({"players": 2, "actions": [["a"], ["b"]]}, "malformed"),
        ({"players": 2, "actions": [["a", "b"], ["c"]], "payoffs": [[[1, 2]]]}, "ragged"),
        ({"players": 2, "actions": [["a"], ["b"]], "payoffs": [[[1]]]}, None),
        ({"players": 3, "actions": [["a"], ["b"]], "payoffs": [[[1, 2]]]}, None),
    ],
)
def test_load_game_rejects(doc, msg):
    with pytest.raises(GameError, match=msg):
        load_game(doc)


def test_load_game_rejects_bad_json():
    with pytest.raises(GameError):
        load_game("{not json")


@given(small_games())
def test_dump_load_roundtrip(game):
    again = load_game(dump_game(game))
    assert again == game
    assert again.digest() == game.digest()


def test_product_set_basics():
    s = ProductSet.of([1, 0], [2])
    assert s.per_player == ((0, 1), (2,))
    assert len(s) == 2
    assert (1, 2) in s and (1, 1) not in s
    assert list(s) == [(0, 2), (1, 2)]
    assert s.issubset(ProductSet.of([0, 1], [1, 2]))
    assert s.intersects(ProductSet.of([1], [2, 3]))
    assert not s.intersects(ProductSet.of([0, 1], [0]))
    assert ProductSet.from_json(s.to_json()) == s
    with pytest.raises(GameError):
        ProductSet.of([], [1])


def test_product_set_validate(table1):
    with pytest.raises(GameError):
        ProductSet.of([0, 5], [0]).validate_for(table1)
    with pytest.raises(GameError):
        ProductSet.of([0]).validate_for(table1)
    assert ProductSet.of([0, 1], [0, 1]).describe(table1) == "{U,M} x {L,C}"


def test_random_game_is_reproducible():
    a = random_game(7, [3, 2])
    assert a == random_game(7, [3, 2])
    assert a != random_game(8, [3, 2])
    assert all(0 <= u <= 9 for u in a.payoffs)


def test_random_game_rejects_bad_shapes():
    for shape in ([], [3], [2, 0]):
        with pytest.raises(GameError):
            random_game(0, shape)


def test_corpus_checksum_is_frozen():
    # guards the acceptance corpora against silent generator changes
    c2 = random_corpus(42, 500, players=2, actions=(2, 4))
    c3 = random_corpus(42, 100, players=3, actions=(2, 3))
    assert corpus_digest(c2) == CORPUS2_DIGEST
    assert corpus_digest(c3) == CORPUS3_DIGEST


def test_very_weakly_dominant_ne():
    pd = bimatrix(["C", "D"], ["C", "D"], [[(3, 3), (0, 5)], [(5, 0), (1, 1)]])
    assert is_very_weakly_dominant_ne(pd, (1, 1))
    assert not is_very_weakly_dominant_ne(pd, (0, 0))


@given(small_games(), st.data())
def test_injected_dominant_actions(game, data):
    acts = tuple(data.draw(st.integers(0, m - 1)) for m in game.shape)
    dom = with_dominant_actions(game, acts)
    assert enumerate_pure_ne(dom) == [acts]
    for i in range(dom.n_players):
        for opp in ProductSet.full(dom).opponents(i):
            row = dom.row(opp, i)
            assert all(row[acts[i]] > u for a, u in enumerate(row) if a != acts[i])


def test_finite_game_rejects_wrong_payoff_count():
    with pytest.raises(GameError):
        FiniteGame((("a",), ("b",)), (Fraction(1),))
