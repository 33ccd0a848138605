"""Finite normal-form games with exact rational payoffs.

Payoffs are stored densely in profile-major order with players innermost:
the utility of player ``i`` at profile ``(a_0, ..., a_{N-1})`` lives at flat
index ``ravel(a) * N + i``, where ``ravel`` is the row-major (C order)
position of the profile in the action grid.  This is also the order in which
``random_game`` draws payoffs, so a corpus is reproducible from its seeds.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

Profile = tuple[int, ...]


class GameError(ValueError):
    """Raised for malformed game documents and invalid game queries."""


def to_fraction(value: Any) -> Fraction:
    """Parse an int, decimal, ``"p/q"`` string or Fraction into an exact rational."""
    if isinstance(value, bool):
        raise GameError(f"booleans are not payoffs: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # decimal literal as written, not its binary expansion
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                n, d = int(num), int(den)
            except ValueError:
                raise GameError(f"bad rational {value!r}") from None
            if d == 0:
                raise GameError(f"zero denominator in {value!r}")
            return Fraction(n, d)
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise GameError(f"bad number {value!r}") from None
    raise GameError(f"unsupported payoff value {value!r}")


def format_fraction(value: Fraction) -> str | int:
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class ProductSet:
    """A Cartesian product of per-player action-index sets.

    Stored canonically as sorted tuples so equality and ordering are
    deterministic.
    """

    per_player: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        canon = tuple(tuple(sorted(set(c))) for c in self.per_player)
        if not canon or any(len(c) == 0 for c in canon):
            raise GameError("every component of a product set must be non-empty")
        if any(a < 0 for c in canon for a in c):
            raise GameError("negative action index")
        object.__setattr__(self, "per_player", canon)

    @classmethod
    def of(cls, *components: Iterable[int]) -> ProductSet:
        return cls(tuple(tuple(c) for c in components))

    @classmethod
    def full(cls, game: FiniteGame) -> ProductSet:
        return cls(tuple(tuple(range(k)) for k in game.shape))

    @classmethod
    def singleton(cls, profile: Profile) -> ProductSet:
        return cls(tuple((a,) for a in profile))

    @property
    def n_players(self) -> int:
        return len(self.per_player)

    def __len__(self) -> int:
        n = 1
        for c in self.per_player:
            n *= len(c)
        return n

    def __contains__(self, profile: object) -> bool:
        if not isinstance(profile, tuple) or len(profile) != len(self.per_player):
            return False
        return all(a in c for a, c in zip(profile, self.per_player))

    def __iter__(self) -> Iterator[Profile]:
        return itertools.product(*self.per_player)

    def profiles(self) -> list[Profile]:
        return list(self)

    def opponents(self, player: int) -> Iterator[Profile]:
        """Opponent profiles in the product, as full profiles with a 0 placeholder at ``player``."""
        comps = list(self.per_player)
        comps[player] = (0,)
        return itertools.product(*comps)

    def issubset(self, other: ProductSet) -> bool:
        return all(set(a) <= set(b) for a, b in zip(self.per_player, other.per_player))

    def intersects(self, other: ProductSet) -> bool:
        return all(set(a) & set(b) for a, b in zip(self.per_player, other.per_player))

    def union(self, other: ProductSet) -> ProductSet:
        return ProductSet(tuple(set(a) | set(b) for a, b in zip(self.per_player, other.per_player)))

    def validate_for(self, game: FiniteGame) -> None:
        if self.n_players != game.n_players:
            raise GameError(f"product set has {self.n_players} components, game has {game.n_players} players")
        for i, (comp, k) in enumerate(zip(self.per_player, game.shape)):
            if comp[-1] >= k:
                raise GameError(f"action index {comp[-1]} out of range for player {i}")

    def to_json(self) -> dict:
        return {"per_player": [list(c) for c in self.per_player]}

    @classmethod
    def from_json(cls, doc: dict) -> ProductSet:
        try:
            return cls(tuple(tuple(int(a) for a in c) for c in doc["per_player"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise GameError(f"malformed product set document: {exc}") from None

    def describe(self, game: FiniteGame) -> str:
        return " x ".join(
            "{" + ",".join(game.action_labels[i][a] for a in comp) + "}"
            for i, comp in enumerate(self.per_player)
        )


@dataclass(frozen=True)
class FiniteGame:
    action_labels: tuple[tuple[str, ...], ...]
    payoffs: tuple[Fraction, ...]
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        labels = tuple(tuple(str(a) for a in acts) for acts in self.action_labels)
        object.__setattr__(self, "action_labels", labels)
        if len(labels) < 2:
            raise GameError("a game needs at least 2 players")
        for i, acts in enumerate(labels):
            if not acts:
                raise GameError(f"player {i} has no actions")
            if len(set(acts)) != len(acts):
                raise GameError(f"duplicate action labels for player {i}")
        size = 1
        for acts in labels:
            size *= len(acts)
        if len(self.payoffs) != size * len(labels):
            raise GameError(f"expected {size * len(labels)} payoff entries, got {len(self.payoffs)}")
        object.__setattr__(self, "payoffs", tuple(to_fraction(u) for u in self.payoffs))
        strides = []
        s = len(labels)
        for acts in reversed(labels):
            strides.append(s)
            s *= len(acts)
        object.__setattr__(self, "_strides", tuple(reversed(strides)))

    @property
    def n_players(self) -> int:
        return len(self.action_labels)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.action_labels)

    @property
    def n_profiles(self) -> int:
        return len(self.payoffs) // self.n_players

    def profiles(self) -> Iterator[Profile]:
        return itertools.product(*(range(k) for k in self.shape))

    def check_profile(self, profile: Sequence[int]) -> Profile:
        profile = tuple(profile)
        if len(profile) != self.n_players:
            raise GameError(f"profile {profile} has wrong length")
        for i, (a, k) in enumerate(zip(profile, self.shape)):
            if not 0 <= a < k:
                raise GameError(f"action {a} out of range for player {i}")
        return profile

    def utility(self, profile: Sequence[int], player: int) -> Fraction:
        if not 0 <= player < self.n_players:
            raise GameError(f"player index {player} out of range")
        profile = self.check_profile(profile)
        return self._u(profile, player)

    def _u(self, profile: Profile, player: int) -> Fraction:
        return self.payoffs[sum(a * s for a, s in zip(profile, self._strides)) + player]

    def row(self, profile: Profile, player: int) -> list[Fraction]:
        """Utilities of ``player`` for each of its actions, opponents fixed as in ``profile``."""
        base = sum(a * s for a, s in zip(profile, self._strides)) - profile[player] * self._strides[player]
        step = self._strides[player]
        return [self.payoffs[base + k * step + player] for k in range(self.shape[player])]

    def labels(self, profile: Profile) -> tuple[str, ...]:
        return tuple(self.action_labels[i][a] for i, a in enumerate(profile))

    def profile_from_labels(self, labels: Sequence[str]) -> Profile:
        if len(labels) != self.n_players:
            raise GameError("wrong number of labels")
        try:
            return tuple(self.action_labels[i].index(str(l)) for i, l in enumerate(labels))
        except ValueError:
            raise GameError(f"unknown action label in {list(labels)}") from None

    def to_json(self) -> dict:
        def nest(prefix: Profile, depth: int):
            if depth == self.n_players:
                return [format_fraction(self._u(prefix, i)) for i in range(self.n_players)]
            return [nest(prefix + (a,), depth + 1) for a in range(self.shape[depth])]

        return {
            "players": self.n_players,
            "actions": [list(a) for a in self.action_labels],
            "payoffs": nest((), 0),
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()


def game_from_function(action_labels: Sequence[Sequence[str]], payoff, metadata: dict | None = None) -> FiniteGame:
    """Build a game from ``payoff(profile) -> sequence of utilities``."""
    shape = [len(a) for a in action_labels]
    flat: list[Fraction] = []
    for profile in itertools.product(*(range(k) for k in shape)):
        us = payoff(profile)
        if len(us) != len(shape):
            raise GameError(f"payoff function returned {len(us)} values at {profile}")
        flat.extend(to_fraction(u) for u in us)
    return FiniteGame(tuple(tuple(a) for a in action_labels), tuple(flat), dict(metadata or {}))


def bimatrix(row_labels: Sequence[str], col_labels: Sequence[str], cells: Sequence[Sequence[tuple]]) -> FiniteGame:
    """Two-player game from a table of ``(u1, u2)`` cells."""
    return game_from_function([row_labels, col_labels], lambda p: cells[p[0]][p[1]])


def load_game(document: str | dict) -> FiniteGame:
    """Parse the JSON game format: ``{"players", "actions", "payoffs"}``."""
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GameError(f"malformed document: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise GameError("malformed document: top level must be an object")
    try:
        n = doc["players"]
        actions = doc["actions"]
        payoffs = doc["payoffs"]
    except KeyError as exc:
        raise GameError(f"malformed document: missing key {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise GameError("malformed document: 'players' must be an integer >= 2")
    if not isinstance(actions, list) or len(actions) != n or not all(isinstance(a, list) for a in actions):
        raise GameError("malformed document: 'actions' must list one label array per player")
    shape = [len(a) for a in actions]
    flat: list[Fraction] = []

    def walk(node, depth: int) -> None:
        if depth == n:
            if not isinstance(node, list) or len(node) != n:
                raise GameError("ragged tensor: each leaf must hold one payoff per player")
            if any(isinstance(x, list) for x in node):
                raise GameError("ragged tensor: nesting deeper than the number of players")
            flat.extend(to_fraction(x) for x in node)
            return
        if not isinstance(node, list) or len(node) != shape[depth]:
            raise GameError(f"ragged tensor: expected {shape[depth]} entries at depth {depth}")
        for child in node:
            walk(child, depth + 1)

    walk(payoffs, 0)
    return FiniteGame(tuple(tuple(str(l) for l in a) for a in actions), tuple(flat))


def dump_game(game: FiniteGame) -> str:
    return json.dumps(game.to_json(), indent=1)


def utility(game: FiniteGame, profile: Sequence[int], player: int) -> Fraction:
    return game.utility(profile, player)


def improving_actions(game: FiniteGame, profile: Profile, player: int) -> list[int]:
    row = game.row(profile, player)
    cur = row[profile[player]]
    return [a for a, u in enumerate(row) if u > cur]


def is_pure_ne(game: FiniteGame, profile: Profile) -> bool:
    for i in range(game.n_players):
        row = game.row(profile, i)
        if max(row) > row[profile[i]]:
            return False
    return True


def enumerate_pure_ne(game: FiniteGame) -> list[Profile]:
    """All pure Nash equilibria, in lexicographic profile order."""
    return [p for p in game.profiles() if is_pure_ne(game, p)]


def is_very_weakly_dominant_ne(game: FiniteGame, profile: Sequence[int]) -> bool:
    """True iff each player's action is weakly best against every opponent profile."""
    profile = game.check_profile(profile)
    for i in range(game.n_players):
        for opp in ProductSet.full(game).opponents(i):
            ctx = opp[:i] + (profile[i],) + opp[i + 1:]
            row = game.row(ctx, i)
            if max(row) > row[profile[i]]:
                return False
    return True


def random_game(seed: int, shape: Sequence[int], value_range: tuple[int, int] = (0, 9)) -> FiniteGame:
    """Integer-payoff game drawn with Python's ``random.Random(seed)`` (MT19937).

    Payoffs are drawn with ``randint(lo, hi)`` one per (profile, player) in the
    dense storage order, so the tensor is a pure function of the arguments.
    """
    shape = list(shape)
    if not shape:
        raise GameError("empty shape")
    if len(shape) < 2 or any(k < 1 for k in shape):
        raise GameError(f"invalid shape {shape}")
    lo, hi = value_range
    if lo > hi:
        raise GameError(f"value range {value_range} is not ordered")
    rng = random.Random(seed)
    n = len(shape)
    size = 1
    for k in shape:
        size *= k
    flat = tuple(Fraction(rng.randint(lo, hi)) for _ in range(size * n))
    labels = tuple(tuple(f"a{i}_{k}" for k in range(m)) for i, m in enumerate(shape))
    return FiniteGame(labels, flat, {"seed": seed, "value_range": [lo, hi]})


def random_corpus(
    seed: int,
    count: int,
    players: int = 2,
    actions: tuple[int, int] = (2, 4),
    value_range: tuple[int, int] = (0, 4),
) -> list[FiniteGame]:
    """Seeded corpus: a master ``random.Random(seed)`` draws each game's shape and sub-seed."""
    rng = random.Random(seed)
    games = []
    for _ in range(count):
        shape = [rng.randint(actions[0], actions[1]) for _ in range(players)]
        games.append(random_game(rng.getrandbits(32), shape, value_range))
    return games


def corpus_digest(games: Iterable[FiniteGame]) -> str:
    h = hashlib.sha256()
    for g in games:
        h.update(g.digest().encode())
    return h.hexdigest()


def with_dominant_actions(game: FiniteGame, actions: Sequence[int]) -> FiniteGame:
    """Copy of ``game`` where ``actions[i]`` strictly dominates every other action of player i."""
    actions = game.check_profile(actions)
    flat = list(game.payoffs)
    for i, d in enumerate(actions):
        for opp in ProductSet.full(game).opponents(i):
            ctx = opp[:i] + (d,) + opp[i + 1:]
            row = game.row(ctx, i)
            best_other = max((u for a, u in enumerate(row) if a != d), default=row[d])
            idx = sum(a * s for a, s in zip(ctx, game._strides)) + i
            flat[idx] = best_other + 1
    return FiniteGame(game.action_labels, tuple(flat), dict(game.metadata, dominant=list(actions)))
