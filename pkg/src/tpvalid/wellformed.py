"""Well-formedness of test purposes: observable determinism (WF1) and
SUT-resolved choice points (WF2)."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .msc import Action, format_trace
from .pomset import Pomset, downward_closures, prefix, sub
from .semantics import NONE, PurposeSemantics, Trace, VerdictIssue, check_verdict_assignment


def smallest_linearization(x: Pomset) -> Trace:
    """Lexicographically least linearization (by action text)."""
    rem = frozenset(x.events)
    out = []
    while rem:
        e = min(x.minimal(rem), key=lambda ev: str(x.label(ev)))
        out.append(x.label(e))
        rem -= {e}
    return tuple(out)


def obs_pomset_set(s: PurposeSemantics) -> list[Pomset]:
    """``X_M ↾ Obs``: every downward-closed part of every restricted maximum,
    deduplicated up to isomorphism."""
    seen: dict[Pomset, None] = {}
    for b in s.branches:
        for d in sorted(downward_closures(b.observable), key=len):
            seen.setdefault(sub(b.observable, d))
    return sorted(seen, key=lambda p: (len(p), tuple(map(str, smallest_linearization(p)))))


def maximal_members(members: list[Pomset]) -> list[Pomset]:
    return [x for x in members if not any(len(y) > len(x) and prefix(x, y) for y in members)]


@dataclass(frozen=True, eq=False)
class WF1Violation:
    trace: Trace
    first: Pomset
    second: Pomset
    branches: tuple[tuple[int, ...], tuple[int, ...]]
    verdicts: tuple[str, str]


@dataclass(frozen=True, eq=False)
class ChoicePoint:
    base: Pomset
    actions: tuple[Action, Action]
    witness: tuple[tuple[int, ...], tuple[int, ...]]  # maxima reachable via each action
    trace: Trace = ()  # a linearization of ``base``

    @property
    def resolved_by_sut(self) -> bool:
        return all(a.is_receive for a in self.actions)


def check_wf1(s: PurposeSemantics) -> list[WF1Violation]:
    """Distinct members of ``X_M ↾ Obs`` sharing a linearization.

    A member is a pomset together with its verdict, so identical restricted
    behaviour reached by branches with different verdicts counts as two
    members.
    """
    cache: dict[tuple[int, frozenset], Pomset] = {}
    reported: set = set()
    out: list[WF1Violation] = []
    for trace, node in s.trie.nodes.items():
        classes: dict[tuple[Pomset, str], list[int]] = {}
        for i, done in node.states.items():
            key = (i, done)
            if key not in cache:
                cache[key] = sub(s.branches[i].observable, done)
            obs = s.branches[i].observable
            verdict = s.branches[i].verdict if len(done) == len(obs) else NONE
            classes.setdefault((cache[key], verdict), []).append(i)
        if len(classes) < 2:
            continue
        for ((x, vx), bx), ((y, vy), by) in combinations(((k, tuple(v)) for k, v in classes.items()), 2):
            if bx > by:
                (x, vx, bx), (y, vy, by) = (y, vy, by), (x, vx, bx)
            pair = (x, vx, y, vy, bx, by)
            if pair in reported:
                continue
            reported.add(pair)
            out.append(WF1Violation(trace, x, y, (bx, by), (vx, vy)))
    return out


def _max_classes(s: PurposeSemantics) -> list[tuple[Pomset, tuple[int, ...]]]:
    groups: dict[tuple[Pomset, str], list[int]] = {}
    for b in s.branches:
        groups.setdefault((b.observable, b.verdict), []).append(b.index)
    items = [(p, tuple(ix)) for (p, _), ix in groups.items()]
    return [(p, ix) for p, ix in items if not any(len(q) > len(p) and prefix(p, q) for q, _ in items)]


def choice_points(s: PurposeSemantics) -> list[ChoicePoint]:
    """Members of ``X_M ↾ Obs`` whose one-action extensions lead to different
    sets of ⊑-maximal members."""
    maxima = _max_classes(s)
    ext: dict[Pomset, dict[Action, set[Pomset]]] = {}
    for b in s.branches:
        obs = b.observable
        everything = frozenset(obs.events)
        for d in downward_closures(obs):
            per_action = ext.setdefault(sub(obs, d), {})
            for e in obs.minimal(everything - d):
                per_action.setdefault(obs.label(e), set()).add(sub(obs, d | {e}))
    reach_cache: dict[Pomset, tuple[int, ...]] = {}

    def reach(z: Pomset) -> tuple[int, ...]:
        if z not in reach_cache:
            reach_cache[z] = tuple(sorted(i for m, ix in maxima if prefix(z, m) for i in ix))
        return reach_cache[z]

    out = []
    for base in sorted(ext, key=lambda p: (len(p), tuple(map(str, smallest_linearization(p))))):
        reached = {
            a: tuple(sorted({i for z in zs for i in reach(z)}))
            for a, zs in sorted(ext[base].items(), key=lambda kv: str(kv[0]))
        }
        for a, b in combinations(reached, 2):
            if reached[a] != reached[b]:
                out.append(ChoicePoint(base, (a, b), (reached[a], reached[b]), smallest_linearization(base)))
    return out


def check_wf2(s: PurposeSemantics, points: list[ChoicePoint] | None = None) -> list[ChoicePoint]:
    """Choice points that are not resolved purely by observable receives."""
    if points is None:
        points = choice_points(s)
    return [cp for cp in points if not cp.resolved_by_sut]


@dataclass(frozen=True, eq=False)
class WellFormednessReport:
    wf1_violations: list[WF1Violation] = field(default_factory=list)
    wf2_violations: list[ChoicePoint] = field(default_factory=list)
    verdict_conflicts: list[VerdictIssue] = field(default_factory=list)

    @property
    def well_formed(self) -> bool:
        return not (self.wf1_violations or self.wf2_violations or self.verdict_conflicts)

    def records(self) -> str:
        lines = [f"WELLFORMED\t{'true' if self.well_formed else 'false'}"]
        for v in self.wf1_violations:
            lines.append(
                f"WF1\ttrace={format_trace(v.trace)}\tbranches={_ix(v.branches[0])};{_ix(v.branches[1])}"
                f"\tverdicts={v.verdicts[0]};{v.verdicts[1]}"
            )
        for cp in self.wf2_violations:
            lines.append(
                f"WF2\ttrace={format_trace(cp.trace)}\tactions={cp.actions[0]};{cp.actions[1]}"
                f"\tbranches={_ix(cp.witness[0])};{_ix(cp.witness[1])}"
            )
        for c in self.verdict_conflicts:
            lines.append(f"VERDICT\tkind={c.kind}\ttrace={format_trace(c.trace)}\tbranches={_ix(c.branches)}")
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        if self.well_formed:
            return "well-formed test purpose\n"
        lines = ["malformed test purpose"]
        for v in self.wf1_violations:
            lines.append(
                f"  WF1: trace {format_trace(v.trace)} linearizes both branch(es) {_ix(v.branches[0])} "
                f"[{v.verdicts[0]}] and {_ix(v.branches[1])} [{v.verdicts[1]}]"
            )
        for cp in self.wf2_violations:
            lines.append(
                f"  WF2: after {format_trace(cp.trace)}, choosing {cp.actions[0]} (-> {_ix(cp.witness[0]) or 'none'}) "
                f"or {cp.actions[1]} (-> {_ix(cp.witness[1]) or 'none'}) is not decided by the SUT"
            )
        for c in self.verdict_conflicts:
            lines.append(f"  verdict {c.kind}: at {format_trace(c.trace)} (branches {_ix(c.branches) or '-'})")
        return "\n".join(lines) + "\n"


def _ix(ix: tuple[int, ...]) -> str:
    return ",".join(map(str, ix))


def check(s: PurposeSemantics) -> WellFormednessReport:
    issues = list(s.trie.conflicts) + check_verdict_assignment(s)
    return WellFormednessReport(check_wf1(s), check_wf2(s), issues)
