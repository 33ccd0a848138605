"""Command-line entry point ``ec-lab``.

Exit codes: 0 when every check passes, 1 on a check failure, 2 on usage or
input errors.  Every file written gets a ``<file>.manifest.json`` sidecar.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .analysis import (
    BudgetExceeded,
    brute_force_ecs,
    default_budget,
    enumerate_ecs,
    is_dominant_ec,
    mixed_ne_in_support,
    verify_ec,
)
from .audit import check_theorems
from .dynamics import DynamicsPolicy, limit_set, run
from .families import (
    OPT_OUT,
    OPT_OUT_LABEL,
    BertrandParams,
    VisibilityParams,
    bertrand_grid,
    discretize,
    fg_preset,
    predicted_ec,
    uniform_grid,
)
from .game import FiniteGame, GameError, ProductSet, dump_game, enumerate_pure_ne, format_fraction, load_game, random_corpus
from .graphs import GraphKind, build_graph, export_dot, scc_decompose, sink_sccs
from .reproduce import EC_COLORS, FG_GRID, TARGETS, reproduce

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- artifacts ---------------------------------------------------------------


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    version: str = __version__
    seeds: dict[str, int] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "version": self.version,
            "seeds": self.seeds,
            "outputs": self.outputs,
        }


class Session:
    """Collects inputs and outputs of one command and writes manifests beside outputs."""

    def __init__(self, argv: Sequence[str], args: argparse.Namespace):
        self.args = args
        self.manifest = RunManifest(list(argv))
        self.pending: list[tuple[Path, str]] = []

    def read_input(self, path: str) -> str:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
        self.manifest.inputs[str(p)] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return text

    def load_game(self, path: str) -> FiniteGame:
        return load_game(self.read_input(path))

    def seed(self, name: str, value: int) -> int:
        self.manifest.seeds[name] = value
        return value

    def output(self, path: str | Path, text: str) -> None:
        self.pending.append((Path(path), text))

    def flush(self) -> None:
        if not self.pending:
            return
        self.manifest.outputs = [str(p) for p, _ in self.pending]
        doc = json.dumps(self.manifest.to_json(), indent=2, sort_keys=True) + "\n"
        for path, text in self.pending:
            atomic_write(path, text)
            atomic_write(path.with_name(path.name + ".manifest.json"), doc)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(args, doc, text: str | None = None) -> None:
    if args.json or text is None:
        sys.stdout.write(_dump(doc))
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _budget(args) -> int:
    return args.budget if args.budget is not None else default_budget()


def _labels(game: FiniteGame, profile) -> list[str]:
    return list(game.labels(tuple(profile)))


def _ec_doc(game: FiniteGame, ec: ProductSet) -> dict:
    return {**ec.to_json(), "labels": [[game.action_labels[i][a] for a in comp] for i, comp in enumerate(ec.per_player)]}


# -- commands ----------------------------------------------------------------


def cmd_analyze(s: Session) -> int:
    game = s.load_game(s.args.game)
    ne = enumerate_pure_ne(game)
    doc = {"pure_ne": [{"indices": list(p), "labels": _labels(game, p)} for p in ne]}
    sys.stdout.write(_dump(doc))
    if s.args.out:
        s.output(s.args.out, _dump(doc))
    return EXIT_OK


def cmd_ec(s: Session) -> int:
    a = s.args
    game = s.load_game(a.game)
    budget = _budget(a)
    status = EXIT_OK
    doc: dict = {}
    if a.verify:
        try:
            cand = ProductSet.from_json(json.loads(s.read_input(a.verify)))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise UsageError(f"malformed product set in {a.verify}: {exc}") from exc
        cand.validate_for(game)
        verdict = verify_ec(game, cand, budget=budget)
        doc["verify"] = {"candidate": _ec_doc(game, cand), **verdict.to_json()}
        if not verdict:
            status = EXIT_FAIL
    ecs = brute_force_ecs(game, budget=budget) if a.brute_force else enumerate_ecs(game)
    doc["method"] = "brute-force" if a.brute_force else "curb"
    doc["ecs"] = [_ec_doc(game, ec) for ec in ecs]
    if a.dominant:
        doc["dominant"] = [is_dominant_ec(game, ec, budget=budget) for ec in ecs]
    if a.mixed:
        if game.n_players != 2:
            raise UsageError("--mixed needs a 2-player game")
        mixed = [mixed_ne_in_support(game, ec, budget=budget) for ec in ecs]
        doc["mixed_ne"] = [m.to_json() if m else None for m in mixed]
    lines = [f"{len(ecs)} equilibrium cycle(s) [{doc['method']}]"]
    for k, ec in enumerate(ecs):
        line = f"  {ec.describe(game)}"
        if a.dominant:
            line += "  dominant" if doc["dominant"][k] else ""
        if a.mixed:
            line += f"  mixed NE: {doc['mixed_ne'][k]}"
        lines.append(line)
    if "verify" in doc:
        v = doc["verify"]
        lines.append(f"verify {cand.describe(game)}: {'EC' if v['holds'] else 'not an EC (' + v['failed_condition'] + ')'}")
        if not v["holds"] and v.get("witness"):
            lines.append(f"  witness: {v['witness']}")
    _emit(a, doc, "\n".join(lines))
    if a.out:
        s.output(a.out, _dump(doc))
    return status


def cmd_graph(s: Session) -> int:
    a = s.args
    game = s.load_game(a.game)
    graph = build_graph(game, a.kind)
    decomp = scc_decompose(graph)
    sinks = sink_sccs(decomp)
    highlights = []
    ecs: list[ProductSet] = []
    if a.highlight_ecs:
        ecs = enumerate_ecs(game)
        highlights = [(ec.profiles(), EC_COLORS[k % len(EC_COLORS)]) for k, ec in enumerate(ecs)]
    dot = export_dot(graph, highlights)
    doc = {
        "kind": graph.kind.value,
        "nodes": len(graph.nodes),
        "edges": len(graph.edges()),
        "components": len(decomp.components),
        "sinks": [[_labels(game, p) for p in sorted(c)] for c in sinks],
        "ecs": [_ec_doc(game, ec) for ec in ecs],
    }
    text = f"{doc['kind']}-response graph: {doc['nodes']} nodes, {doc['edges']} edges, {len(sinks)} sink SCC(s)"
    for c in sinks:
        text += "\n  sink: " + " ".join("(" + ",".join(game.labels(p)) + ")" for p in sorted(c))
    _emit(a, doc, text)
    if a.dot:
        s.output(a.dot, dot)
    return EXIT_OK


def _family_from_args(a) -> tuple[object, list]:
    if a.family == "visibility":
        fam = VisibilityParams(a.n)
        return fam, uniform_grid(a.grid)
    if a.family == "bertrand":
        fam = BertrandParams(a.alpha, a.c, a.oc)
        return fam, bertrand_grid(fam, a.step, above_alpha=a.above_alpha)
    fam = fg_preset(a.preset)
    return fam, uniform_grid(a.grid, fam.a_max)


def cmd_family(s: Session) -> int:
    a = s.args
    fam, grid = _family_from_args(a)
    doc: dict = {"family": a.family}
    text = []
    if a.predict:
        doc["predicted"] = predicted_ec(fam).to_json()
        text.append(json.dumps(doc["predicted"], sort_keys=True))
    game = None
    if a.emit or not a.predict:
        game = discretize(fam, grid)
        doc["game"] = {"shape": list(game.shape), "digest": game.digest(), "exact": game.metadata["exact"]}
        text.append(f"discretized {a.family}: shape {'x'.join(map(str, game.shape))}, digest {game.digest()[:16]}")
    if a.predict and not a.json:
        sys.stdout.write(_dump(doc["predicted"]))
        if game is not None:
            sys.stdout.write(text[-1] + "\n")
    else:
        _emit(a, doc, "\n".join(text))
    if a.emit:
        s.output(a.emit, dump_game(game))
    return EXIT_OK


def _parse_family_spec(spec: str):
    name, _, rest = spec.partition(":")
    kv = {}
    for part in filter(None, rest.split(",")):
        k, eq, v = part.partition("=")
        if not eq:
            raise UsageError(f"bad family parameter {part!r}; expected key=value")
        kv[k.strip()] = v.strip()
    try:
        if name == "visibility":
            return VisibilityParams(int(kv.get("n", 2)))
        if name == "bertrand":
            return BertrandParams(kv.get("alpha", "10"), kv.get("c", "2"), kv.get("oc", "7"))
        if name == "fg":
            return fg_preset(kv.get("preset", "quadratic"))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown simulation target {spec!r}: give a game JSON path or visibility:/bertrand:/fg: spec")


def _parse_start(target, text: str | None):
    if isinstance(target, FiniteGame):
        if text is None:
            return (0,) * target.n_players
        parts = [p.strip() for p in text.split(",")]
        if all(p.isdigit() for p in parts) and not all(
            p in target.action_labels[i] for i, p in enumerate(parts) if i < target.n_players
        ):
            return tuple(int(p) for p in parts)
        return target.profile_from_labels(parts)
    if text is None:
        return (0.0,) * target.n_players
    out = []
    for p in text.split(","):
        p = p.strip()
        out.append(OPT_OUT if p == OPT_OUT_LABEL else float(Fraction(p)))
    return tuple(out)


def _cell(value, game: FiniteGame | None, player: int | None = None) -> str:
    if value is None:
        return ""
    if value is OPT_OUT:
        return OPT_OUT_LABEL
    if game is not None and player is not None:
        return game.action_labels[player][value]
    if isinstance(value, Fraction):
        return str(format_fraction(value))
    return repr(float(value))


def cmd_simulate(s: Session) -> int:
    a = s.args
    if a.target.endswith(".json") or Path(a.target).is_file():
        target = s.load_game(a.target)
    else:
        target = _parse_family_spec(a.target)
    seed = s.seed("simulate", a.seed if a.seed is not None else 0)
    eps = None
    if a.policy == "eps-better":
        if a.eps is None:
            raise UsageError("--policy eps-better needs --eps")
        eps = Fraction(a.eps) if isinstance(target, FiniteGame) else float(Fraction(a.eps))
    policy = DynamicsPolicy(
        kind=a.policy,
        epsilon=eps,
        player_selection=a.selection,
        tie_break=a.tie_break,
        seed=seed,
        first_player=a.first_player,
        grid_points=a.grid_points,
    )
    start = _parse_start(target, a.start)
    traj = run(target, start, a.steps, policy)
    game = target if isinstance(target, FiniteGame) else None
    n = len(start)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "mover"] + [f"action_{i}" for i in range(n)] + ["mover_utility"])
    for t, state in enumerate(traj.states):
        mover = traj.movers[t - 1] if t else None
        util = traj.mover_utilities[t - 1] if t else None
        w.writerow([t, "" if mover is None else mover] + [_cell(x, game, i) for i, x in enumerate(state)] + [_cell(util, None)])
    tail = limit_set(traj, len(traj.states) // 2)
    final = [_cell(x, game, i) for i, x in enumerate(traj.states[-1])]
    doc = {
        "steps_taken": len(traj.states) - 1,
        "halted": traj.halted,
        "final": final,
        "tail_distinct_states": len(tail.states),
    }
    if tail.box is not None:
        doc["tail_box"] = {"bounds": [list(b) for b in tail.box.bounds], "opt_out": tail.box.opt_out}
    text = f"{doc['steps_taken']} steps, halted={traj.halted}, final ({', '.join(final)}), {len(tail.states)} distinct tail states"
    if tail.box is not None:
        text += "\n  tail box: " + " x ".join(f"[{lo:.4g}, {hi:.4g}]" for lo, hi in tail.box.bounds)
        if tail.box.opt_out:
            text += " (plus opt-out)"
    _emit(a, doc, text)
    if a.csv:
        s.output(a.csv, buf.getvalue())
    return EXIT_OK


def cmd_reproduce(s: Session) -> int:
    a = s.args
    rep = reproduce(a.target, budget=_budget(a))
    doc = rep.to_json()
    audit = rep.audit
    text = rep.report() + f"\n  theorem audit: {audit.status.upper()}"
    for c in audit.checks:
        if not c.passed:
            text += f"\n    FAIL {c.name}: {json.dumps(c.witnesses[0])}"
        elif c.skipped:
            text += f"\n    skipped {c.name}: {c.skipped}"
    _emit(a, doc, text)
    out = Path(a.out)
    s.output(out / f"{a.target}.json", _dump(doc))
    s.output(out / f"{a.target}.game.json", dump_game(rep.game))
    s.output(out / f"{a.target}.dot", rep.dot)
    return EXIT_OK if rep.passed and audit.passed else EXIT_FAIL


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("-")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}; expected N or LO-HI") from exc


def cmd_check_theorems(s: Session) -> int:
    a = s.args
    games: list[tuple[str, FiniteGame]] = [(p, s.load_game(p)) for p in a.games]
    if a.random:
        seed = s.seed("corpus", a.seed if a.seed is not None else 0)
        values = _range(a.values)
        if a.shape:
            try:
                sizes = [int(k) for k in a.shape.lower().split("x")]
            except ValueError as exc:
                raise UsageError(f"bad shape {a.shape!r}; expected e.g. 3x3") from exc
            if len(sizes) < 2 or len(set(sizes)) != 1:
                raise UsageError("--shape takes equal per-player counts like 3x3; use --players/--actions for ranges")
            corpus = random_corpus(seed, a.count, len(sizes), (sizes[0], sizes[0]), values)
        else:
            corpus = random_corpus(seed, a.count, a.players, _range(a.actions), values)
        games += [(f"random[{k}]", g) for k, g in enumerate(corpus)]
    if not games:
        raise UsageError("nothing to check: pass game files or --random")
    budget = _budget(a)
    results = []
    counts = {"pass": 0, "fail": 0, "skipped": 0}
    for name, g in games:
        rep = check_theorems(g, budget=budget)
        counts[rep.status] += 1
        results.append({"game": name, "shape": list(g.shape), "digest": g.digest(), **rep.to_json()})
    doc = {"counts": counts, "budget": budget, "results": results}
    text = f"checked {len(games)} game(s): {counts['pass']} pass, {counts['fail']} fail, {counts['skipped']} skipped"
    for r in results:
        if r["status"] == "fail":
            bad = [c["name"] for c in r["checks"] if not c["passed"]]
            text += f"\n  FAIL {r['game']} shape {'x'.join(map(str, r['shape']))}: {', '.join(bad)}"
    _emit(a, doc, text)
    if a.out:
        s.output(a.out, _dump(doc))
    return EXIT_FAIL if counts["fail"] else EXIT_OK


# -- parser ------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(None), help="seed for random corpora and dynamics")
    p.add_argument("--budget", type=int, default=d(None), help="candidate budget for brute-force steps (default: $EC_LAB_BUDGET or 1e6)")
    p.add_argument("--json", action="store_true", default=d(False), help="print machine-readable JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ec-lab", description="Equilibrium cycles in finite and discretized games.")
    parser.add_argument("--version", action="version", version=f"ec-lab {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="pure Nash equilibria of a game")
    p.add_argument("game")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("ec", parents=[common], help="equilibrium cycles of a game")
    p.add_argument("game")
    p.add_argument("--brute-force", action="store_true", help="enumerate by checking every product set")
    p.add_argument("--verify", metavar="SET_JSON", help="check one candidate product set")
    p.add_argument("--dominant", action="store_true", help="test each EC for dominance")
    p.add_argument("--mixed", action="store_true", help="mixed NE supported inside each EC (2 players)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ec)

    p = sub.add_parser("graph", parents=[common], help="best- or better-response graph")
    p.add_argument("game")
    p.add_argument("--kind", choices=[k.value for k in GraphKind], default="best")
    p.add_argument("--dot", help="write the graph in DOT format")
    p.add_argument("--highlight-ecs", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("family", parents=[common], help="discretize a continuous game family")
    fam = p.add_subparsers(dest="family", required=True)
    for name in ("visibility", "bertrand", "fg"):
        q = fam.add_parser(name, parents=[common])
        q.add_argument("--emit", help="write the discretized game as JSON")
        q.add_argument("--predict", action="store_true", help="print the predicted continuous EC")
        q.set_defaults(func=cmd_family)
        if name == "visibility":
            q.add_argument("--n", type=int, default=2, help="number of players")
            q.add_argument("--grid", type=int, default=7, help="grid {0, 1/g, ..., 1}")
        elif name == "bertrand":
            q.add_argument("--alpha", default="10")
            q.add_argument("--c", default="2")
            q.add_argument("--oc", default="7")
            q.add_argument("--step", default="1/2")
            q.add_argument("--above-alpha", action="store_true", help="add one price above alpha")
        else:
            q.add_argument("--preset", choices=["quadratic", "figure1"], default="quadratic")
            q.add_argument("--grid", type=int, default=FG_GRID)

    p = sub.add_parser("simulate", parents=[common], help="run response dynamics")
    p.add_argument("target", help="game JSON path, or visibility:n=2 | bertrand:alpha=10,c=2,oc=7 | fg:preset=figure1")
    p.add_argument("--start", help="comma-separated start profile (labels or indices; numbers or n_o for families)")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--policy", choices=["best", "eps-better"], default="best")
    p.add_argument("--eps")
    p.add_argument("--selection", choices=["round-robin", "uniform-random"], default="uniform-random")
    p.add_argument("--tie-break", choices=["lexicographic-min", "uniform-random"], default="lexicographic-min")
    p.add_argument("--first-player", type=int, default=0)
    p.add_argument("--grid-points", type=int, default=10_000)
    p.add_argument("--csv", help="write the trajectory as CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", parents=[common], help="rebuild a known example and compare")
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--out", default="reproduce_out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("check-theorems", parents=[common], help="audit structural facts on games")
    p.add_argument("games", nargs="*")
    p.add_argument("--random", action="store_true", help="generate a seeded random corpus")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--shape", help="fixed shape such as 3x3")
    p.add_argument("--players", type=int, default=2)
    p.add_argument("--actions", default="2-4", help="per-player action count range")
    p.add_argument("--values", default="0-4", help="integer payoff range")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_theorems)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    session = Session(["ec-lab", *argv], args)
    try:
        code = args.func(session)
        session.flush()
        return code
    except (UsageError, GameError, BudgetExceeded, ValueError) as exc:
        print(f"ec-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
