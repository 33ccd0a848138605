"""Equilibrium cycles of finite games.

Two independent routes to the ECs of a finite game live here:

* ``enumerate_ecs`` goes through curb sets: the ECs are exactly the minimal
  curb sets that contain no pure Nash equilibrium.
* ``brute_force_ecs`` scans every Cartesian product against the stability and
  unrest conditions directly and keeps the inclusion-minimal ones.

The second route never touches best-response sets, so the two can be used to
cross-check each other.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

from .game import FiniteGame, GameError, Profile, ProductSet, is_pure_ne
from .graphs import best_responses

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """A brute-force scan would exceed the configured candidate budget."""


def default_budget() -> int:
    raw = os.environ.get("EC_LAB_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class Condition(str, Enum):
    STABILITY = "stability"
    UNREST = "unrest"
    MINIMALITY = "minimality"


@dataclass(frozen=True)
class Witness:
    player: int | None
    profile: Profile | None
    detail: str
    subset: ProductSet | None = None

    def to_json(self) -> dict:
        out: dict = {"player": self.player, "profile": list(self.profile) if self.profile else None, "detail": self.detail}
        if self.subset is not None:
            out["subset"] = self.subset.to_json()
        return out


@dataclass(frozen=True)
class ECVerdict:
    holds: bool
    failed_condition: Condition | None = None
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "failed_condition": self.failed_condition.value if self.failed_condition else None,
            "witness": self.witness.to_json() if self.witness else None,
        }


@dataclass(frozen=True)
class MixedProfile:
    probs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        for vec in self.probs:
            if any(p < 0 for p in vec) or sum(vec) != 1:
                raise GameError(f"not a probability vector: {vec}")

    def support(self, player: int) -> tuple[int, ...]:
        return tuple(a for a, p in enumerate(self.probs[player]) if p > 0)

    def to_json(self) -> list[list[str]]:
        return [[str(p) for p in vec] for vec in self.probs]


def _split(game: FiniteGame, ctx: Profile, player: int, inside: Sequence[int]) -> tuple[list[Fraction], Fraction, Fraction | None]:
    """Row of ``player`` at ``ctx``, max over ``inside`` and max over the complement (None if empty)."""
    row = game.row(ctx, player)
    ins = set(inside)
    m_in = max(row[a] for a in inside)
    outs = [u for a, u in enumerate(row) if a not in ins]
    return row, m_in, (max(outs) if outs else None)


# -- curb sets ---------------------------------------------------------------


def _br_table(game: FiniteGame) -> list[dict[Profile, tuple[int, ...]]]:
    """Per player, best responses keyed by opponent context (own slot set to 0)."""
    table = getattr(game, "_br_table", None)
    if table is None:
        full = ProductSet.full(game)
        table = [{opp: best_responses(game, opp, i) for opp in full.opponents(i)} for i in range(game.n_players)]
        object.__setattr__(game, "_br_table", table)
    return table


def br_image(game: FiniteGame, s: ProductSet) -> ProductSet:
    """Componentwise union of best responses to opponent profiles drawn from ``s``."""
    table = _br_table(game)
    comps = []
    for i in range(game.n_players):
        acts: set[int] = set()
        for opp in s.opponents(i):
            acts.update(table[i][opp])
        comps.append(acts)
    return ProductSet(tuple(comps))


def is_curb(game: FiniteGame, candidate: ProductSet) -> bool:
    candidate.validate_for(game)
    return br_image(game, candidate).issubset(candidate)


def curb_closure(game: FiniteGame, seed: ProductSet) -> ProductSet:
    """Smallest curb set containing ``seed``."""
    seed.validate_for(game)
    current = seed
    while True:
        nxt = current.union(br_image(game, current))
        if nxt == current:
            return current
        current = nxt


def minimal_curb_sets(game: FiniteGame) -> list[ProductSet]:
    # every minimal curb set is the closure of any of its profiles
    closures = sorted({curb_closure(game, ProductSet.singleton(p)) for p in game.profiles()})
    minimal = [c for c in closures if not any(d != c and d.issubset(c) for d in closures)]
    return sorted(minimal)


def is_non_trivial(game: FiniteGame, curb: ProductSet) -> bool:
    if not is_curb(game, curb):
        raise GameError(f"{curb.describe(game)} is not a curb set")
    return not any(is_pure_ne(game, p) for p in curb)


# -- the EC conditions -------------------------------------------------------


def _stability(game: FiniteGame, cand: ProductSet) -> Witness | None:
    for i in range(game.n_players):
        inside = cand.per_player[i]
        if len(inside) == game.shape[i]:
            continue
        for opp in cand.opponents(i):
            ctx = opp[:i] + (inside[0],) + opp[i + 1:]
            _, m_in, m_out = _split(game, ctx, i, inside)
            if m_in <= m_out:
                return Witness(i, ctx, f"no inside action of player {i} strictly beats the best outside payoff {m_out}")
    return None


def _unrest(game: FiniteGame, cand: ProductSet) -> Witness | None:
    for prof in cand:
        restless = False
        for i in range(game.n_players):
            row, m_in, m_out = _split(game, prof, i, cand.per_player[i])
            if m_in > row[prof[i]] and (m_out is None or m_in > m_out):
                restless = True
                break
        if not restless:
            return Witness(None, prof, "no player has a strictly improving inside deviation that beats all outside actions")
    return None


def satisfies_conditions(game: FiniteGame, cand: ProductSet) -> ECVerdict:
    """Check stability and unrest only."""
    w = _stability(game, cand)
    if w is not None:
        return ECVerdict(False, Condition.STABILITY, w)
    w = _unrest(game, cand)
    if w is not None:
        return ECVerdict(False, Condition.UNREST, w)
    return ECVerdict(True)


def _nonempty_subsets(items: Sequence[int]) -> list[tuple[int, ...]]:
    return [c for r in range(1, len(items) + 1) for c in itertools.combinations(items, r)]


def _count_products(sizes: Sequence[int]) -> int:
    n = 1
    for k in sizes:
        n *= 2**k - 1
    return n


def _sub_products(cand: ProductSet) -> Iterator[ProductSet]:
    for combo in itertools.product(*(_nonempty_subsets(c) for c in cand.per_player)):
        yield ProductSet(combo)


def verify_ec(
    game: FiniteGame,
    candidate: ProductSet,
    check_minimality: bool = True,
    budget: int | None = None,
) -> ECVerdict:
    candidate.validate_for(game)
    verdict = satisfies_conditions(game, candidate)
    if not verdict or not check_minimality:
        return verdict
    budget = default_budget() if budget is None else budget
    n_sub = _count_products([len(c) for c in candidate.per_player]) - 1
    if n_sub > budget:
        raise BudgetExceeded(f"minimality check infeasible: {n_sub} sub-products exceed budget {budget}")
    for sub in _sub_products(candidate):
        if sub != candidate and satisfies_conditions(game, sub):
            return ECVerdict(
                False,
                Condition.MINIMALITY,
                Witness(None, None, "a proper sub-product is stable and restless", subset=sub),
            )
    return ECVerdict(True)


def enumerate_ecs(game: FiniteGame, debug: bool = False) -> list[ProductSet]:
    """All ECs of a finite game, as the non-trivial minimal curb sets."""
    ecs = [c for c in minimal_curb_sets(game) if not any(is_pure_ne(game, p) for p in c)]
    if debug:
        for ec in ecs:
            assert verify_ec(game, ec), ec
    return ecs


def brute_force_ecs(game: FiniteGame, budget: int | None = None) -> list[ProductSet]:
    """Definition-level oracle: scan all products, keep stable+restless ones, then the minimal ones."""
    budget = default_budget() if budget is None else budget
    n = _count_products(game.shape)
    if n > budget:
        raise BudgetExceeded(f"{n} candidate products exceed budget {budget}")
    good = [c for c in _sub_products(ProductSet.full(game)) if satisfies_conditions(game, c)]
    minimal = [c for c in good if not any(d != c and d.issubset(c) for d in good)]
    return sorted(minimal)


def is_dominant_ec(game: FiniteGame, ec: ProductSet, budget: int | None = None) -> bool:
    verdict = verify_ec(game, ec, check_minimality=True, budget=budget)
    if not verdict:
        raise GameError(f"{ec.describe(game)} is not an EC ({verdict.failed_condition.value})")
    full = ProductSet.full(game)
    for i in range(game.n_players):
        inside = ec.per_player[i]
        outside = [a for a in range(game.shape[i]) if a not in inside]
        for opp in full.opponents(i):
            row = game.row(opp, i)
            m_out = max((row[t] for t in outside), default=None)
            for a in outside:
                if not any(row[b] > row[a] and row[b] >= m_out for b in inside):
                    return False
    return True


# -- mixed equilibria inside a region ----------------------------------------


def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan elimination over the rationals; None when the square system is singular."""
    n = len(matrix)
    m = [list(r) + [b] for r, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def _vertices(own: Sequence[int], n_own: int, payoff_cols: list[list[Fraction]], budget: int) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """Vertices of {(z, w): z a distribution on ``own``, every opponent payoff column . z <= w}.

    ``payoff_cols[j][r]`` is the opponent's payoff for its action j against our
    action r.  Returned mixes are padded to length ``n_own``.
    """
    k = len(own)
    # inequalities: z_r >= 0 for r in own, then one per opponent action
    ineqs: list[tuple[list[Fraction], Fraction]] = []
    for idx in range(k):
        ineqs.append(([Fraction(int(t == idx)) for t in range(k)] + [Fraction(0)], Fraction(0)))
    for col in payoff_cols:
        ineqs.append(([col[r] for r in own] + [Fraction(-1)], Fraction(0)))
    eq = ([Fraction(1)] * k + [Fraction(0)], Fraction(1))
    n_comb = 1
    for t in range(k):
        n_comb = n_comb * (len(ineqs) - t) // (t + 1)
    if n_comb > budget:
        raise BudgetExceeded(f"vertex enumeration needs {n_comb} bases, budget {budget}")
    found = {}
    for tight in itertools.combinations(range(len(ineqs)), k):
        rows = [eq[0]] + [ineqs[t][0] for t in tight]
        rhs = [eq[1]] + [ineqs[t][1] for t in tight]
        sol = solve_exact(rows, rhs)
        if sol is None:
            continue
        z, w = sol[:k], sol[k]
        if any(v < 0 for v in z):
            continue
        if any(sum(c * v for c, v in zip(row[:k], z)) - w > 0 for row, _ in ineqs[k:]):
            continue
        full = [Fraction(0)] * n_own
        for r, v in zip(own, z):
            full[r] = v
        found[tuple(full)] = w
    return sorted(found.items())


def mixed_ne_in_support(game: FiniteGame, region: ProductSet, budget: int | None = None) -> MixedProfile | None:
    """A mixed Nash equilibrium of the whole game whose support lies inside ``region``.

    Enumerates vertices of both players' best-response polyhedra with
    out-of-region actions pinned to zero, pairs them, and keeps complementary
    pairs.  If any equilibrium supported in the region exists, one of these
    vertex pairs is an equilibrium, so a None result is conclusive.  Among the
    hits, the one with the smallest total support (ties broken
    lexicographically by support) is returned.
    """
    if game.n_players != 2:
        raise GameError("mixed equilibria are only computed for 2-player games")
    region.validate_for(game)
    budget = default_budget() if budget is None else budget
    m1, m2 = game.shape
    u1 = [[game.utility((r, c), 0) for c in range(m2)] for r in range(m1)]
    u2 = [[game.utility((r, c), 1) for c in range(m2)] for r in range(m1)]
    # x: player 1's mix, constrained by player 2's payoff for every column
    xs = _vertices(region.per_player[0], m1, [[u2[r][c] for r in range(m1)] for c in range(m2)], budget)
    ys = _vertices(region.per_player[1], m2, [[u1[r][c] for c in range(m2)] for r in range(m1)], budget)
    hits = []
    for x, u in xs:
        col_pay = [sum(x[r] * u2[r][c] for r in range(m1)) for c in range(m2)]
        for y, v in ys:
            row_pay = [sum(y[c] * u1[r][c] for c in range(m2)) for r in range(m1)]
            if all(row_pay[r] == v for r in range(m1) if x[r] > 0) and all(col_pay[c] == u for c in range(m2) if y[c] > 0):
                sx = tuple(r for r in range(m1) if x[r] > 0)
                sy = tuple(c for c in range(m2) if y[c] > 0)
                hits.append(((len(sx) + len(sy), sx, sy), x, y))
    if not hits:
        return None
    _, x, y = min(hits, key=lambda h: h[0])
    return MixedProfile((x, y))


def expected_payoffs(game: FiniteGame, mixed: MixedProfile, player: int) -> list[Fraction]:
    """Expected payoff of each pure action of ``player`` against the others' mixes."""
    out = []
    for a in range(game.shape[player]):
        total = Fraction(0)
        for prof in game.profiles():
            if prof[player] != a:
                continue
            w = Fraction(1)
            for j, b in enumerate(prof):
                if j != player:
                    w *= mixed.probs[j][b]
                    if w == 0:
                        break
            if w:
                total += w * game.utility(prof, player)
        out.append(total)
    return out


def is_mixed_ne(game: FiniteGame, mixed: MixedProfile) -> bool:
    for i in range(game.n_players):
        pay = expected_payoffs(game, mixed, i)
        best = max(pay)
        if any(pay[a] != best for a in mixed.support(i)):
            return False
    return True
