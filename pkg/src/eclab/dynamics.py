"""Best-response and epsilon-better-response dynamics.

Finite games move between action indices.  Continuous families search a
uniform evaluation grid over the action space (plus the current action, and
the opt-out action for Bertrand); the grid maximum stands in for the
supremum, which may not be attained in these discontinuous games.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .families import (
    OPT_OUT,
    BertrandParams,
    Family,
    MonotoneConcaveParams,
    VisibilityParams,
)
from .game import FiniteGame, GameError, ProductSet


class PolicyKind(str, Enum):
    BEST = "best"
    EPS_BETTER = "eps-better"


class Selection(str, Enum):
    ROUND_ROBIN = "round-robin"
    UNIFORM = "uniform-random"


class TieBreak(str, Enum):
    LEX_MIN = "lexicographic-min"
    UNIFORM = "uniform-random"


@dataclass(frozen=True)
class DynamicsPolicy:
    kind: PolicyKind = PolicyKind.BEST
    epsilon: float | Fraction | None = None
    player_selection: Selection = Selection.UNIFORM
    tie_break: TieBreak = TieBreak.LEX_MIN
    seed: int = 0
    first_player: int = 0
    grid_points: int = 10_000

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        object.__setattr__(self, "player_selection", Selection(self.player_selection))
        object.__setattr__(self, "tie_break", TieBreak(self.tie_break))
        if self.kind is PolicyKind.EPS_BETTER and (self.epsilon is None or self.epsilon <= 0):
            raise GameError("epsilon-better dynamics need epsilon > 0")
        if self.grid_points < 2:
            raise GameError("grid_points must be at least 2")


@dataclass
class Trajectory:
    states: list[tuple]
    movers: list[int]
    mover_utilities: list
    policy: DynamicsPolicy
    halted: bool = False

    def __len__(self) -> int:
        return len(self.states)


# -- environments ------------------------------------------------------------


class _FiniteEnv:
    continuous = False

    def __init__(self, game: FiniteGame):
        self.game = game
        self.n_players = game.n_players

    def current(self, state: tuple, player: int):
        return self.game.utility(tuple(state), player)

    def candidates(self, state: tuple, player: int, policy: DynamicsPolicy) -> list[int]:
        row = self.game.row(tuple(state), player)
        cur_u = row[state[player]]
        top = max(row)
        if policy.kind is PolicyKind.BEST:
            if top <= cur_u:
                return []
            return [a for a, u in enumerate(row) if u == top]
        eps = policy.epsilon
        eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
        return [a for a, u in enumerate(row) if u > cur_u and u >= top - eps]


def _fg_values(fn, xs: np.ndarray) -> np.ndarray:
    try:
        out = fn(xs)
        if isinstance(out, np.ndarray) and out.shape == xs.shape:
            return out.astype(float)
    except TypeError:
        pass
    return np.array([float(fn(float(x))) for x in xs])


class _FamilyEnv:
    continuous = True

    def __init__(self, family: Family, grid_points: int):
        self.family = family
        self.n_players = family.n_players
        if isinstance(family, VisibilityParams):
            hi = 1.0
        elif isinstance(family, BertrandParams):
            hi = float(family.alpha)
        elif isinstance(family, MonotoneConcaveParams):
            hi = float(family.a_max)
        else:
            raise GameError(f"unknown family {family!r}")
        self.grid = np.linspace(0.0, hi, grid_points)

    def _values(self, state: Sequence, player: int, xs: np.ndarray) -> np.ndarray:
        fam = self.family
        others = [s for j, s in enumerate(state) if j != player]
        if isinstance(fam, VisibilityParams):
            later = np.sort(np.array([float(o) for o in others]))
            idx = np.searchsorted(later, xs, side="left")
            nxt = np.where(idx < len(later), later[np.minimum(idx, len(later) - 1)], np.inf)
            return np.where(np.isfinite(nxt), nxt - xs, 1.0 - xs)
        if isinstance(fam, BertrandParams):
            alpha, c, oc = float(fam.alpha), float(fam.c), float(fam.oc)
            profit = (xs - c) * np.where(xs <= alpha, alpha - xs, 0.0)
            o = others[0]
            if o is OPT_OUT:
                return profit - oc
            o = float(o)
            return np.where(xs < o, profit - oc, np.where(xs == o, profit / 2 - oc, -oc))
        o = float(others[0])
        f = _fg_values(fam.f, xs)
        g = _fg_values(fam.g, xs)
        return np.where(xs < o, f, np.where(xs > o, g, (f + g) / 2))

    def current(self, state: Sequence, player: int) -> float:
        a = state[player]
        if a is OPT_OUT:
            return 0.0
        return float(self._values(state, player, np.array([float(a)]))[0])

    def candidates(self, state: Sequence, player: int, policy: DynamicsPolicy) -> list:
        cur = state[player]
        xs = self.grid
        if cur is not OPT_OUT and not np.any(xs == float(cur)):
            xs = np.sort(np.append(xs, float(cur)))
        vals = self._values(state, player, xs)
        cur_u = self.current(state, player)
        bertrand = isinstance(self.family, BertrandParams)
        top = max(float(vals.max()), cur_u, 0.0 if bertrand else -np.inf)
        if policy.kind is PolicyKind.BEST:
            if top <= cur_u:
                return []
            mask = vals == top
            opt_ok = bertrand and top == 0.0
        else:
            floor = top - float(policy.epsilon)
            mask = (vals > cur_u) & (vals >= floor)
            opt_ok = bertrand and 0.0 > cur_u and 0.0 >= floor
        out: list = [OPT_OUT] if opt_ok else []
        # the opt-out sorts first, as if it were a negative price
        return out + [float(x) for x in xs[mask]]


def _env(target, policy: DynamicsPolicy):
    if isinstance(target, FiniteGame):
        return _FiniteEnv(target)
    return _FamilyEnv(target, policy.grid_points)


def _candidates(env, state: Sequence, player: int, policy: DynamicsPolicy) -> list:
    return env.candidates(state, player, policy)


def _choose(cands: list, policy: DynamicsPolicy, rng: random.Random):
    if policy.tie_break is TieBreak.LEX_MIN:
        return cands[0]
    return cands[rng.randrange(len(cands))]


def step(target: FiniteGame | Family, state: Sequence, player: int, policy: DynamicsPolicy, rng: random.Random | None = None):
    """New action for ``player``; the current action when no admissible move exists."""
    env = _env(target, policy)
    rng = rng or random.Random(policy.seed)
    cands = _candidates(env, state, player, policy)
    return _choose(cands, policy, rng) if cands else state[player]


def _normalize_start(target, initial: Sequence) -> tuple:
    state = tuple(initial)
    if isinstance(target, FiniteGame):
        return target.check_profile(state)
    if len(state) != target.n_players:
        raise GameError("start profile has the wrong number of players")
    return tuple(a if a is OPT_OUT else float(a) for a in state)


def run(target: FiniteGame | Family, initial: Sequence, steps: int, policy: DynamicsPolicy) -> Trajectory:
    """Iterate single-player moves; halts early only when no player can move."""
    if steps < 0:
        raise GameError("steps must be non-negative")
    env = _env(target, policy)
    rng = random.Random(policy.seed)
    state = _normalize_start(target, initial)
    traj = Trajectory([state], [], [], policy)
    n = env.n_players
    for t in range(steps):
        if policy.player_selection is Selection.ROUND_ROBIN:
            mover = (policy.first_player + t) % n
        else:
            mover = rng.randrange(n)
        cands = _candidates(env, state, mover, policy)
        if not cands:
            if not any(_candidates(env, state, j, policy) for j in range(n) if j != mover):
                traj.halted = True
                break
        else:
            new = _choose(cands, policy, rng)
            state = state[:mover] + (new,) + state[mover + 1:]
        traj.states.append(state)
        traj.movers.append(mover)
        traj.mover_utilities.append(env.current(state, mover))
    return traj


# -- limit sets and absorption -----------------------------------------------


@dataclass(frozen=True)
class Box:
    """Per-player closed intervals, optionally admitting the opt-out action."""

    bounds: tuple[tuple[float, float], ...]
    opt_out: bool = False

    def __contains__(self, state) -> bool:
        for a, (lo, hi) in zip(state, self.bounds):
            if a is OPT_OUT:
                if not self.opt_out:
                    return False
            elif not lo <= float(a) <= hi:
                return False
        return True


@dataclass(frozen=True)
class LimitSet:
    states: frozenset
    box: Box | None = None


def limit_set(traj: Trajectory, burn_in: int) -> LimitSet:
    if not 0 <= burn_in < len(traj.states):
        raise GameError(f"burn_in {burn_in} too large for a trajectory of length {len(traj.states)}")
    tail = traj.states[burn_in:]
    states = frozenset(tail)
    if not any(isinstance(a, float) or a is OPT_OUT for s in tail for a in s):
        return LimitSet(states)
    bounds = []
    seen_opt_out = False
    for i in range(len(tail[0])):
        vals = [float(s[i]) for s in tail if s[i] is not OPT_OUT]
        seen_opt_out |= any(s[i] is OPT_OUT for s in tail)
        bounds.append((min(vals), max(vals)) if vals else (float("nan"), float("nan")))
    return LimitSet(states, Box(tuple(bounds), seen_opt_out))


@dataclass(frozen=True)
class AbsorptionReport:
    entered_at: int | None
    ever_left_after_entry: bool
    is_stationary_inside: bool

    def to_json(self) -> dict:
        return {
            "entered_at": self.entered_at,
            "ever_left_after_entry": self.ever_left_after_entry,
            "is_stationary_inside": self.is_stationary_inside,
        }


def check_absorption(traj: Trajectory, target: ProductSet | Box, burn_in: int = 0) -> AbsorptionReport:
    if not 0 <= burn_in < len(traj.states):
        raise GameError(f"burn_in {burn_in} too large for a trajectory of length {len(traj.states)}")
    states = traj.states
    entered = next((t for t in range(burn_in, len(states)) if states[t] in target), None)
    if entered is None:
        return AbsorptionReport(None, False, False)
    after = states[entered:]
    left = any(s not in target for s in after)
    stationary = len(set(after)) == 1
    return AbsorptionReport(entered, left, stationary)


Target = Union[FiniteGame, Family]
