"""Pomset semantics of a test purpose and its observable test language.

The pre-closed semantics ``X_M`` is kept implicit: only the maximal pomset
of each full alt-path is materialised, and members of ``X_M`` are the
sub-pomsets generated by downward-closed event sets of those maxima.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import AmbiguityError, ConsistencyError, NotInLanguage, ResourceLimitError, VerdictConflictError
from .msc import Action, CommDependence, MscDocument, communication_dependence, desugar, paths
from .pomset import (
    DEFAULT_MAX_LIN,
    Pomset,
    d_consistent,
    iso_equal,
    linearizations,
    restrict,
    string,
    sub,
    unseq,
)

NONE = "none"
FINAL_VERDICTS = frozenset({"pass", "fail", "inconc"})

Trace = tuple[Action, ...]


@dataclass(frozen=True)
class Limits:
    """Resource caps: ``max_lin`` bounds enumerations, ``max_len`` trace length."""

    max_lin: int = DEFAULT_MAX_LIN
    max_len: int = 64

    def __post_init__(self) -> None:
        if self.max_lin <= 0 or self.max_len <= 0:
            raise ValueError("resource caps must be positive")


@dataclass(frozen=True, eq=False)
class Branch:
    index: int
    choices: tuple[int, ...]
    pomset: Pomset
    observable: Pomset
    verdict: str


@dataclass(frozen=True, eq=False)
class PurposeSemantics:
    document: MscDocument
    alphabet: frozenset[Action]
    ports: frozenset[str]
    dependence: CommDependence
    branches: tuple[Branch, ...]
    limits: Limits = field(default_factory=Limits)

    def is_observable(self, a: Action) -> bool:
        return a.owner in self.ports

    @cached_property
    def obs_alphabet(self) -> frozenset[Action]:
        return frozenset(a for a in self.alphabet if self.is_observable(a))

    @cached_property
    def obs_send(self) -> frozenset[Action]:
        return frozenset(a for a in self.obs_alphabet if a.is_send)

    @cached_property
    def obs_rec(self) -> frozenset[Action]:
        return frozenset(a for a in self.obs_alphabet if a.is_receive)

    @property
    def maximals(self) -> list[tuple[Pomset, str]]:
        return [(b.pomset, b.verdict) for b in self.branches]

    @cached_property
    def trie(self) -> "LanguageTrie":
        """Observable language; verdict conflicts are recorded, not raised."""
        return _build_trie(self)


def build_semantics(doc: MscDocument, limits: Limits | None = None) -> PurposeSemantics:
    """One maximal pomset per full alt-path, built as the unsequentialised
    document-order string of its events."""
    limits = limits or Limits()
    doc = desugar(doc)
    dep = communication_dependence(doc)
    ports = doc.ports
    branches = []
    alphabet: set[Action] = set()
    for i, path in enumerate(paths(doc)):
        acts = [ev.action for ev in path.events]
        alphabet.update(acts)
        x = unseq(string(acts), dep)
        if not d_consistent(x, dep) or not iso_equal(unseq(x, dep), x):
            raise ConsistencyError(f"branch {i}: maximal pomset is not a D_Com fixpoint")
        obs = restrict(x, lambda a: a.owner in ports)
        if len(obs) > limits.max_len:
            raise ResourceLimitError(f"branch {i}: {len(obs)} observable events exceed max length {limits.max_len}")
        branches.append(Branch(i, path.choices, x, obs, path.verdict))
    return PurposeSemantics(doc, frozenset(alphabet), ports, dep, tuple(branches), limits)


def obs_traces(x: Pomset, s: PurposeSemantics) -> set[Trace]:
    """``obs(x) = lin(x ↾ Obs)``."""
    return linearizations(restrict(x, s.is_observable), s.limits.max_lin)


# --------------------------------------------------------------------- trie


@dataclass(frozen=True, eq=False)
class TrieNode:
    trace: Trace
    verdict: str
    children: Mapping[Action, Trace]
    # branch index -> events of that branch's observable pomset consumed so far
    states: Mapping[int, frozenset] = field(default_factory=dict)

    @property
    def branches(self) -> frozenset[int]:
        return frozenset(self.states)


@dataclass(frozen=True)
class VerdictIssue:
    kind: str  # "conflict" | "unreachable" | "interior"
    trace: Trace
    branches: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class LanguageTrie:
    """Prefix-closed trie of observable traces with a verdict per node."""

    nodes: Mapping[Trace, TrieNode]
    conflicts: tuple[VerdictIssue, ...] = ()

    @classmethod
    def from_verdicts(cls, verdicts: Union[Mapping[Trace, str], Iterable[Trace]]) -> "LanguageTrie":
        """Hand-built trie; missing prefixes are added with verdict none."""
        if not isinstance(verdicts, Mapping):
            verdicts = {tuple(t): NONE for t in verdicts}
        full: dict[Trace, str] = {(): NONE}
        for t, v in verdicts.items():
            t = tuple(t)
            for k in range(len(t)):
                full.setdefault(t[:k], NONE)
            full[t] = v
        kids: dict[Trace, dict[Action, Trace]] = {t: {} for t in full}
        for t in sorted(full, key=_trace_key):
            if t:
                kids[t[:-1]][t[-1]] = t
        return cls({t: TrieNode(t, full[t], kids[t]) for t in sorted(full, key=_trace_key)})

    def __contains__(self, trace: Iterable[Action]) -> bool:
        return tuple(trace) in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, trace: Iterable[Action]) -> TrieNode:
        trace = tuple(trace)
        try:
            return self.nodes[trace]
        except KeyError:
            raise NotInLanguage(f"trace not in language: {' '.join(map(str, trace)) or '-'}") from None

    def complete(self) -> list[tuple[Trace, str]]:
        """Traces carrying a final verdict, in canonical order."""
        return sorted(((t, n.verdict) for t, n in self.nodes.items() if n.verdict != NONE), key=lambda tv: _trace_key(tv[0]))


def _trace_key(t: Trace) -> tuple:
    return (len(t), tuple(map(str, t)))


def _build_trie(s: PurposeSemantics) -> LanguageTrie:
    obs = [b.observable for b in s.branches]
    full = [frozenset(p.events) for p in obs]
    nodes: dict[Trace, TrieNode] = {}
    conflicts: list[VerdictIssue] = []
    frontier: list[tuple[Trace, dict[int, frozenset]]] = [((), {b.index: frozenset() for b in s.branches})]
    while frontier:
        trace, states = frontier.pop()
        if len(nodes) >= s.limits.max_lin:
            raise ResourceLimitError(f"observable language exceeds {s.limits.max_lin} traces")
        succ: dict[Action, dict[int, frozenset]] = {}
        for i, done in states.items():
            for e in obs[i].minimal(full[i] - done):
                a = obs[i].label(e)
                nxt = succ.setdefault(a, {})
                if i in nxt:
                    raise ConsistencyError(f"branch {i}: concurrent events share label {a}")
                nxt[i] = done | {e}
        final = {i: s.branches[i].verdict for i, done in states.items() if done == full[i]}
        verdicts = sorted(set(final.values()))
        if len(verdicts) > 1:
            conflicts.append(VerdictIssue("conflict", trace, tuple(sorted(final))))
        children = {a: trace + (a,) for a in sorted(succ, key=str)}
        nodes[trace] = TrieNode(trace, verdicts[0] if verdicts else NONE, children, dict(sorted(states.items())))
        frontier.extend((trace + (a,), succ[a]) for a in reversed(list(children)))
    ordered = {t: nodes[t] for t in sorted(nodes, key=_trace_key)}
    return LanguageTrie(ordered, tuple(sorted(conflicts, key=lambda c: _trace_key(c.trace))))


def language(s: PurposeSemantics) -> LanguageTrie:
    """``L_M = obs(X_M)`` with ``ver_M``; raises on verdict conflicts."""
    trie = s.trie
    if trie.conflicts:
        c = trie.conflicts[0]
        raise VerdictConflictError(
            f"branches {list(c.branches)} share complete trace {' '.join(map(str, c.trace)) or '-'} with different verdicts"
        )
    return trie


def verdict_of(trace: Iterable[Action], s: PurposeSemantics) -> str:
    return language(s).node(trace).verdict


def en(s: PurposeSemantics, trace: Iterable[Action]) -> frozenset[Action]:
    """Observable actions that extend ``trace`` inside ``L_M``."""
    return frozenset(s.trie.node(trace).children)


def delin(trace: Iterable[Action], s: PurposeSemantics) -> Pomset:
    """The unique member of ``X_M ↾ Obs`` having ``trace`` as a linearization."""
    node = s.trie.node(trace)
    found: list[Pomset] = []
    for i, done in node.states.items():
        cand = sub(s.branches[i].observable, done)
        if not any(iso_equal(cand, f) for f in found):
            found.append(cand)
    if len(found) > 1:
        raise AmbiguityError(f"{len(found)} non-isomorphic pomsets linearize to this trace")
    return found[0]


def check_verdict_assignment(target: Union[PurposeSemantics, LanguageTrie]) -> list[VerdictIssue]:
    """Verdict-assignment conditions on a trie.

    Every node must reach a node with a final verdict, and nodes carrying a
    final verdict must be leaves.
    """
    trie = target.trie if isinstance(target, PurposeSemantics) else target
    issues: list[VerdictIssue] = []
    reaches: dict[Trace, bool] = {}
    for t in sorted(trie.nodes, key=len, reverse=True):
        n = trie.nodes[t]
        reaches[t] = n.verdict != NONE or any(reaches[c] for c in n.children.values())
    for t, n in trie.nodes.items():
        if not reaches[t]:
            issues.append(VerdictIssue("unreachable", t, tuple(sorted(n.states))))
        if n.verdict != NONE and n.children:
            issues.append(VerdictIssue("interior", t, tuple(sorted(n.states))))
    return issues
