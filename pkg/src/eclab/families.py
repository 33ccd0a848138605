"""Continuous game families with known equilibrium cycles, and their discretizations.

Three families are covered:

* visibility games on [0, 1] (two or more players),
* Bertrand duopoly with a fixed operating cost and an opt-out action,
* the two-player "lower price earns f, higher price earns g" game on [0, a_M]
  with f strictly increasing and g strictly concave.

Utilities are evaluated exactly when actions and parameters are rational and
the payoff pieces are polynomial; anything else comes back as a float.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence, Union

import numpy as np

from .game import FiniteGame, GameError, ProductSet, to_fraction

Number = Union[Fraction, float, int]

FLOAT_TOLERANCE = 1e-9


class _OptOut:
    """The Bertrand non-participation action. Deliberately not a number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "n_o"

    def __reduce__(self):
        return (_OptOut, ())


OPT_OUT = _OptOut()
OPT_OUT_LABEL = "n_o"


@dataclass(frozen=True)
class VisibilityParams:
    n_players: int = 2

    def __post_init__(self) -> None:
        if self.n_players < 2:
            raise GameError("the visibility game needs at least 2 players")


@dataclass(frozen=True)
class BertrandParams:
    alpha: Fraction
    c: Fraction
    oc: Fraction

    def __post_init__(self) -> None:
        for name in ("alpha", "c", "oc"):
            val = to_fraction(getattr(self, name))
            if val <= 0:
                raise GameError(f"Bertrand parameter {name} must be positive")
            object.__setattr__(self, name, val)

    @property
    def n_players(self) -> int:
        return 2

    @property
    def has_positive_regime(self) -> bool:
        # alpha > c + 2 sqrt(oc)  <=>  (alpha - c)^2 / 4 > oc with alpha > c
        return self.alpha > self.c and (self.alpha - self.c) ** 2 / 4 > self.oc

    @property
    def monopoly_price(self) -> Fraction:
        return (self.alpha + self.c) / 2

    @property
    def break_even_price(self) -> Number:
        disc = (self.alpha - self.c) ** 2 / 4 - self.oc
        if disc < 0:
            raise GameError("no positive-utility regime: alpha <= c + 2*sqrt(Oc)")
        root = exact_sqrt(disc)
        if root is None:
            return float(self.monopoly_price) - math.sqrt(disc)
        return self.monopoly_price - root

    def demand(self, p: Number) -> Number:
        return self.alpha - p if 0 <= p <= self.alpha else 0


@dataclass(frozen=True)
class MonotoneConcaveParams:
    f: Callable[[Number], Number]
    g: Callable[[Number], Number]
    a_max: Number
    name: str = "custom"
    validate: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        if self.a_max <= 0:
            raise GameError("a_max must be positive")
        if not self.validate:
            return
        # black-box functions: only a dense-grid check is possible
        if abs(float(self.f(0)) - float(self.g(0))) > FLOAT_TOLERANCE:
            raise GameError("f(0) must equal g(0)")
        pts = [float(self.a_max) * k / 1000 for k in range(1, 1001)]
        fs = [float(self.f(a)) for a in pts]
        gs = [float(self.g(a)) for a in pts]
        if any(fa <= ga for fa, ga in zip(fs, gs)):
            raise GameError("f must exceed g on (0, a_max]")
        if any(b <= a for a, b in zip([float(self.f(0))] + fs, fs)):
            raise GameError("f must be strictly increasing")

    @property
    def n_players(self) -> int:
        return 2


Family = Union[VisibilityParams, BertrandParams, MonotoneConcaveParams]


def _exp(x):
    # numpy-aware so dynamics can evaluate whole grids at once
    return np.exp(x) if isinstance(x, np.ndarray) else math.exp(x)


def fg_preset(name: str) -> MonotoneConcaveParams:
    """Named instances: ``quadratic`` (f=a, g=a-a^2/2 on [0,2]) and ``figure1``."""
    if name == "quadratic":
        return MonotoneConcaveParams(lambda a: a, lambda a: a - a * a / 2, Fraction(2), name="quadratic")
    if name == "figure1":
        return MonotoneConcaveParams(
            lambda a: 1.5 * a * _exp(-0.175 * a),
            lambda a: 1.53 - 0.17 * (a - 3) ** 2,
            Fraction(9, 2),
            name="figure1",
        )
    raise GameError(f"unknown preset {name!r}")


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a non-negative rational when it is itself rational."""
    x = Fraction(x)
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


# -- utilities ---------------------------------------------------------------


def _check_unit(a, lo=0, hi=1) -> None:
    if a is OPT_OUT or not lo <= a <= hi:
        raise GameError(f"action {a!r} outside [{lo}, {hi}]")


def _visibility(actions: Sequence[Number]) -> tuple[Number, ...]:
    out = []
    for i, a in enumerate(actions):
        later = [b for j, b in enumerate(actions) if j != i and b >= a]
        out.append(min(later) - a if later else 1 - a)
    return tuple(out)


def _bertrand(p: BertrandParams, actions: Sequence) -> tuple[Number, ...]:
    out = []
    for i, mine in enumerate(actions):
        other = actions[1 - i]
        if mine is OPT_OUT:
            out.append(Fraction(0))
            continue
        profit = (mine - p.c) * p.demand(mine)
        if other is OPT_OUT or mine < other:
            out.append(profit - p.oc)
        elif mine == other:
            out.append(profit / 2 - p.oc)
        else:
            out.append(-p.oc)
    return tuple(out)


def _fg(p: MonotoneConcaveParams, actions: Sequence[Number]) -> tuple[Number, ...]:
    out = []
    for i, mine in enumerate(actions):
        other = actions[1 - i]
        if mine < other:
            out.append(p.f(mine))
        elif mine > other:
            out.append(p.g(mine))
        else:
            out.append((p.f(mine) + p.g(mine)) / 2)
    return tuple(out)


def utility_eval(family: Family, actions: Sequence) -> tuple[Number, ...]:
    """Payoff of every player at a profile of real actions (Bertrand also accepts ``OPT_OUT``)."""
    actions = tuple(actions)
    if len(actions) != family.n_players:
        raise GameError(f"expected {family.n_players} actions, got {len(actions)}")
    if isinstance(family, VisibilityParams):
        for a in actions:
            _check_unit(a)
        return _visibility(actions)
    if isinstance(family, BertrandParams):
        for a in actions:
            if a is not OPT_OUT and a < 0:
                raise GameError(f"price {a!r} is negative")
        return _bertrand(family, actions)
    if isinstance(family, MonotoneConcaveParams):
        for a in actions:
            _check_unit(a, 0, family.a_max)
        return _fg(family, actions)
    raise GameError(f"unknown family {family!r}")


# -- predicted equilibrium cycles --------------------------------------------


@dataclass(frozen=True)
class PredictedComponent:
    intervals: tuple[tuple[Number, Number], ...]
    opt_out: bool = False

    def __post_init__(self) -> None:
        for lo, hi in self.intervals:
            if lo > hi:
                raise GameError(f"empty interval [{lo}, {hi}]")

    def to_json(self) -> dict:
        return {"intervals": [[_num_json(lo), _num_json(hi)] for lo, hi in self.intervals], "opt_out": self.opt_out}


@dataclass(frozen=True)
class PredictedEC:
    per_player: tuple[PredictedComponent, ...]
    notes: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "per_player": [c.to_json() for c in self.per_player],
            "notes": {k: _num_json(v) for k, v in self.notes.items()},
        }


def _num_json(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v


def predicted_ec(family: Family, tol: float = 1e-9) -> PredictedEC:
    if isinstance(family, VisibilityParams):
        n = family.n_players
        comp = PredictedComponent(((Fraction(0), Fraction(n - 1, n)),))
        return PredictedEC((comp,) * n)
    if isinstance(family, BertrandParams):
        if not family.has_positive_regime:
            raise GameError("no positive-utility regime: alpha <= c + 2*sqrt(Oc)")
        pb, pm = family.break_even_price, family.monopoly_price
        comp = PredictedComponent(((pb, pm),), opt_out=True)
        return PredictedEC((comp,) * 2, {"break_even_price": pb, "monopoly_price": pm})
    if isinstance(family, MonotoneConcaveParams):
        sol = solve_b(family, tol)
        comp = PredictedComponent(((sol.b, sol.c),))
        notes = {"b": sol.b, "c": sol.c, "g_peak": sol.g_peak, "b_literal": literal_b(family)}
        return PredictedEC((comp, comp), notes)
    raise GameError(f"unknown family {family!r}")


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ResetPoint:
    b: float
    c: float
    g_peak: float
    residual: float
    iterations: int


def _iteration_cap(a_max: float, tol: float) -> int:
    return math.ceil(10 * math.log2(a_max / max(tol, math.ulp(0.0))))


def argmax_concave(g: Callable[[float], float], lo: float, hi: float, tol: float, cap: int) -> tuple[float, int]:
    """Maximizer of a strictly concave function on [lo, hi].

    Golden-section search on values only resolves the peak to about
    sqrt(machine epsilon), where neighbouring values round to the same float.
    So it stops at a coarse bracket, and bisection on the sign of a central
    difference finishes the job.  The central difference is exact for
    quadratics and has O(h^2) bias otherwise.
    """
    invphi = (math.sqrt(5) - 1) / 2
    coarse = max(tol, 1e-6 * (hi - lo))
    a, b = lo, hi
    x1, x2 = b - invphi * (b - a), a + invphi * (b - a)
    g1, g2 = g(x1), g(x2)
    it = 0
    while b - a > coarse:
        if it >= cap:
            raise ConvergenceError(f"non-convergence: argmax search exceeded {cap} iterations")
        it += 1
        if g1 < g2:
            a, x1, g1 = x1, x2, g2
            x2 = a + invphi * (b - a)
            g2 = g(x2)
        else:
            b, x2, g2 = x2, x1, g1
            x1 = b - invphi * (b - a)
            g1 = g(x1)
    h = 1e-5 * (hi - lo)
    while b - a > tol:
        if it >= cap:
            raise ConvergenceError(f"non-convergence: argmax search exceeded {cap} iterations")
        it += 1
        m = (a + b) / 2
        slope = g(min(m + h, hi)) - g(max(m - h, lo))
        if slope > 0:
            a = m
        elif slope < 0:
            b = m
        else:
            return m, it
    return (a + b) / 2, it


def solve_b(params: MonotoneConcaveParams, tol: float = 1e-9) -> ResetPoint:
    """Reset point ``b`` with f(b) = max g, and the peak location ``c`` of g.

    Both are found to ``tol``: ``c`` by ``argmax_concave`` on g, ``b`` by
    bisection on f(b) - g(c) over [0, a_max].
    """
    f = lambda a: float(params.f(a))
    g = lambda a: float(params.g(a))
    a_max = float(params.a_max)
    cap = _iteration_cap(a_max, tol)
    c, it_c = argmax_concave(g, 0.0, a_max, tol, cap)
    peak = g(c)
    lo, hi = 0.0, a_max
    if not f(lo) < peak <= f(hi):
        raise ConvergenceError(f"bracketing failure: need f(0) < g(c) <= f(a_max), got {f(lo)}, {peak}, {f(hi)}")
    it = 0
    while True:
        mid = (lo + hi) / 2
        r = f(mid) - peak
        if abs(r) <= tol:
            return ResetPoint(mid, c, peak, abs(r), it + it_c)
        if it >= cap:
            raise ConvergenceError(f"non-convergence: bisection exceeded {cap} iterations")
        it += 1
        if r < 0:
            lo = mid
        else:
            hi = mid


def literal_b(params: MonotoneConcaveParams) -> float:
    """Fixed point of b = f^{-1}(g(b)) read literally: f(b) = g(b), i.e. b = 0 under f > g on (0, a_max]."""
    pts = [float(params.a_max) * k / 10000 for k in range(10001)]
    return min(pts, key=lambda a: abs(float(params.f(a)) - float(params.g(a))))


# -- discretization ----------------------------------------------------------


def action_label(value) -> str:
    if value is OPT_OUT:
        return OPT_OUT_LABEL
    if isinstance(value, Rational):
        v = Fraction(value)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(value))


def uniform_grid(n: int, hi: Number = 1) -> list[Fraction]:
    """``{0, hi/n, 2 hi/n, ..., hi}``."""
    if n < 1:
        raise GameError("grid needs n >= 1")
    hi = to_fraction(hi)
    return [hi * k / n for k in range(n + 1)]


def bertrand_grid(params: BertrandParams, step: Number = Fraction(1, 2), above_alpha: bool = False) -> list:
    step = to_fraction(step)
    pts = [step * k for k in range(int(params.alpha / step) + 1)]
    if above_alpha:
        pts.append(params.alpha + step)
    return pts + [OPT_OUT]


def discretize(family: Family, grid: Sequence | Sequence[Sequence], exact: bool | None = None) -> FiniteGame:
    """Restrict a family to a finite grid of actions.

    ``grid`` is either one list shared by all players or one list per player.
    Exact mode (the default whenever every utility is rational) keeps rational
    payoffs; otherwise float payoffs are snapped to multiples of 1e-9 and the
    game's metadata records ``exact: False``.
    """
    n = family.n_players
    if grid and isinstance(grid[0], (list, tuple)):
        grids = [list(g) for g in grid]
    else:
        grids = [list(grid)] * n
    if len(grids) != n:
        raise GameError(f"expected {n} grids")
    for g in grids:
        if not g:
            raise GameError("empty grid")
        for a in g:
            # range check through the family itself
            probe = [a] + [x for x in (g[0],) * (n - 1)]
            utility_eval(family, probe)
    if isinstance(family, BertrandParams) and not all(OPT_OUT in g for g in grids):
        raise GameError("a Bertrand grid must include the opt-out action")
    labels = [[action_label(a) for a in g] for g in grids]
    values = []
    inexact = False
    for prof in itertools.product(*grids):
        us = utility_eval(family, prof)
        for u in us:
            if isinstance(u, Rational):
                values.append(Fraction(u))
            else:
                inexact = True
                if exact:
                    raise GameError(f"irrational utility {u!r} at {prof} in exact mode")
                values.append(Fraction(round(float(u) / FLOAT_TOLERANCE)) * Fraction(1, 10**9))
    meta = {
        "family": type(family).__name__,
        "action_values": [tuple(g) for g in grids],
        "exact": not inexact,
    }
    if inexact:
        meta["tolerance"] = FLOAT_TOLERANCE
    return FiniteGame(tuple(tuple(l) for l in labels), tuple(values), meta)


def ec_action_values(game: FiniteGame, ec: ProductSet) -> list[list]:
    vals = game.metadata["action_values"]
    return [[vals[i][a] for a in comp] for i, comp in enumerate(ec.per_player)]


def hausdorff_to_interval(points: Sequence[Number], lo: Number, hi: Number) -> Number:
    """Hausdorff distance between a finite point set and the interval [lo, hi]."""
    pts = sorted(points)
    if not pts:
        raise GameError("empty point set")
    # farthest listed point from the interval
    worst = max(max(lo - p, p - hi, 0) for p in pts)
    # farthest interval point from the set: an endpoint, or inside a gap
    for x in (lo, hi):
        worst = max(worst, min(abs(x - p) for p in pts))
    for a, b in zip(pts, pts[1:]):
        x = min(max((a + b) / 2, lo), hi)
        if a < x < b:
            worst = max(worst, min(x - a, b - x))
    return worst
