import pytest
from hypothesis import strategies as st

from eclab.game import FiniteGame, random_corpus, random_game
from eclab.reproduce import table1_game

# the acceptance corpora: seed 42, payoffs drawn from 0..4
CORPUS_SEED = 42


@pytest.fixture(scope="session")
def table1() -> FiniteGame:
    return table1_game()


@pytest.fixture(scope="session")
def corpus2():
    return random_corpus(CORPUS_SEED, 500, players=2, actions=(2, 4))


@pytest.fixture(scope="session")
def corpus3():
    return random_corpus(CORPUS_SEED, 100, players=3, actions=(2, 3))


@st.composite
def small_games(draw, max_players=3, max_actions=3, values=(0, 3)):
    n = draw(st.integers(2, max_players))
    cap = max_actions if n == 2 else min(max_actions, 3)
    shape = draw(st.lists(st.integers(1, cap), min_size=n, max_size=n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_game(seed, shape, values)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
