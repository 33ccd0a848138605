"""Audit a finite game against the structural facts about equilibrium cycles.

Each check returns concrete witnesses when it fails, so a failing corpus game
can be replayed by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .analysis import (
    BudgetExceeded,
    brute_force_ecs,
    enumerate_ecs,
    is_dominant_ec,
    is_non_trivial,
    minimal_curb_sets,
    verify_ec,
)
from .game import FiniteGame, ProductSet, enumerate_pure_ne, is_very_weakly_dominant_ne
from .graphs import GraphKind, build_graph, is_rectangular, scc_decompose, sink_sccs


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    witnesses: list[dict] = field(default_factory=list)
    skipped: str | None = None

    def fail(self, **witness) -> None:
        self.passed = False
        self.witnesses.append(witness)

    def skip(self, reason: str) -> None:
        # a partial skip keeps any failures already found
        self.skipped = self.skipped or reason

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "skipped": self.skipped, "witnesses": self.witnesses}


@dataclass
class TheoremReport:
    checks: list[CheckResult]
    ecs: list[ProductSet]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def skipped(self) -> list[str]:
        return [f"{c.name}: {c.skipped}" for c in self.checks if c.skipped]

    @property
    def status(self) -> str:
        if not self.passed:
            return "fail"
        return "skipped" if self.skipped else "pass"

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "passed": self.passed,
            "skipped": self.skipped,
            "ecs": [e.to_json() for e in self.ecs],
            "checks": [c.to_json() for c in self.checks],
        }


def _ps(s: ProductSet) -> list[list[int]]:
    return [list(c) for c in s.per_player]


def check_theorems(
    game: FiniteGame,
    budget: int | None = None,
    candidate_ecs: Sequence[ProductSet] | None = None,
) -> TheoremReport:
    """Run every audit on ``game``.

    ``candidate_ecs`` replaces the computed ECs in the per-EC checks; it exists
    to exercise the reporter with deliberately wrong input.  Steps that would
    exceed ``budget`` are marked skipped on their check instead of failing.
    """
    computed = enumerate_ecs(game)
    ecs = list(candidate_ecs) if candidate_ecs is not None else computed
    pure = enumerate_pure_ne(game)

    no_ne = CheckResult("no_pure_ne_in_ec")
    for ec in ecs:
        for p in pure:
            if p in ec:
                no_ne.fail(ec=_ps(ec), pure_ne=list(p))
        if len(ec) < 2:
            no_ne.fail(ec=_ps(ec), detail="singleton EC")

    curb_eq = CheckResult("curb_equivalence")
    curbs = [c for c in minimal_curb_sets(game) if is_non_trivial(game, c)]
    try:
        oracle = brute_force_ecs(game, budget=budget)
    except BudgetExceeded as exc:
        curb_eq.skip(str(exc))
        oracle = sorted(curbs)
        if sorted(ecs) != oracle:
            curb_eq.fail(ecs=[_ps(e) for e in ecs], non_trivial_minimal_curbs=[_ps(e) for e in oracle])
    else:
        if sorted(ecs) != oracle:
            curb_eq.fail(ecs=[_ps(e) for e in ecs], brute_force=[_ps(e) for e in oracle])
        if sorted(curbs) != oracle:
            curb_eq.fail(non_trivial_minimal_curbs=[_ps(e) for e in curbs], brute_force=[_ps(e) for e in oracle])

    sink_check = CheckResult("best_response_sinks")
    best_sinks = sink_sccs(scc_decompose(build_graph(game, GraphKind.BEST)), non_singleton_only=True)
    for s in best_sinks:
        rect = is_rectangular(s)
        if rect is not None:
            try:
                verdict = verify_ec(game, rect, budget=budget)
            except BudgetExceeded as exc:
                sink_check.skip(str(exc))
                continue
            if not verdict:
                sink_check.fail(sink=_ps(rect), failed_condition=verdict.failed_condition.value, witness=verdict.witness.to_json())
    for ec in ecs:
        if not any(all(p in ec for p in s) for s in best_sinks):
            sink_check.fail(ec=_ps(ec), detail="contains no non-singleton sink SCC of the best-response graph")

    disjoint = CheckResult("ecs_disjoint")
    for k, a in enumerate(ecs):
        for b in ecs[k + 1:]:
            if a.intersects(b):
                disjoint.fail(first=_ps(a), second=_ps(b))

    dominance = CheckResult("dominance")
    vwd = [p for p in game.profiles() if is_very_weakly_dominant_ne(game, p)]
    if vwd and ecs:
        dominance.fail(very_weakly_dominant_ne=list(vwd[0]), ecs=[_ps(e) for e in ecs])
    for ec in ecs:
        try:
            if not verify_ec(game, ec, budget=budget):
                continue
            dominant = is_dominant_ec(game, ec, budget=budget)
        except BudgetExceeded as exc:
            dominance.skip(str(exc))
            continue
        if dominant:
            if len(ecs) != 1:
                dominance.fail(dominant_ec=_ps(ec), detail="dominant EC is not unique")
            if pure:
                dominance.fail(dominant_ec=_ps(ec), pure_ne=list(pure[0]))

    better = CheckResult("better_response_sinks")
    for s in sink_sccs(scc_decompose(build_graph(game, GraphKind.BETTER)), non_singleton_only=True):
        rect = is_rectangular(s)
        if rect is not None and not any(ec.issubset(rect) for ec in oracle):
            better.fail(sink=_ps(rect), detail="contains no EC")

    return TheoremReport([no_ne, curb_eq, sink_check, disjoint, dominance, better], ecs)
