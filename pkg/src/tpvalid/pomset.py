"""Labeled partial orders and pomsets over an arbitrary finite alphabet.

A :class:`Pomset` wraps one concrete :class:`Lposet` representative; equality
between pomsets is label-preserving order isomorphism.  The strict order is
stored as its transitive closure, so every order query is a set lookup.

All values are immutable and every function here is pure.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Collection, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import CycleError, ResourceLimitError

__all__ = [
    "DEFAULT_MAX_LIN",
    "Dependence",
    "EMPTY",
    "Lposet",
    "Pomset",
    "d_consistent",
    "downward_closures",
    "is_linearization",
    "iso_equal",
    "less_sequential",
    "letter",
    "linearizations",
    "make_lposet",
    "pomset",
    "prefix",
    "restrict",
    "string",
    "sub",
    "unseq",
    "wsc",
]

Symbol = Hashable
Event = Hashable

DEFAULT_MAX_LIN = 100_000


def _closure(events: Iterable[Event], edges: Iterable[tuple[Event, Event]]) -> frozenset[tuple[Event, Event]]:
    succ: dict[Event, set[Event]] = {e: set() for e in events}
    for a, b in edges:
        succ[a].add(b)
    result = set()
    for e in succ:
        seen: set[Event] = set()
        stack = list(succ[e])
        while stack:
            f = stack.pop()
            if f in seen:
                continue
            seen.add(f)
            stack.extend(succ[f])
        if e in seen:
            raise CycleError(f"order edges form a cycle through event {e!r}")
        result.update((e, f) for f in seen)
    return frozenset(result)


@dataclass(frozen=True, eq=False)
class Lposet:
    """A concrete labeled partial order ``<E, <, λ>``.

    ``order`` is the strict order as its full transitive closure.  Use
    :func:`make_lposet` to build one from arbitrary edges.
    """

    events: tuple[Event, ...]
    labels: Mapping[Event, Symbol]
    order: frozenset[tuple[Event, Event]]

    @cached_property
    def preds(self) -> dict[Event, frozenset[Event]]:
        below: dict[Event, set[Event]] = {e: set() for e in self.events}
        for a, b in self.order:
            below[b].add(a)
        return {e: frozenset(s) for e, s in below.items()}

    @cached_property
    def succs(self) -> dict[Event, frozenset[Event]]:
        above: dict[Event, set[Event]] = {e: set() for e in self.events}
        for a, b in self.order:
            above[a].add(b)
        return {e: frozenset(s) for e, s in above.items()}

    @cached_property
    def heights(self) -> dict[Event, int]:
        """Length of the longest chain strictly below each event."""
        height: dict[Event, int] = {}
        for e in sorted(self.events, key=lambda ev: len(self.preds[ev])):
            # a predecessor always has strictly fewer predecessors itself
            height[e] = 1 + max((height[p] for p in self.preds[e]), default=-1)
        return height


def make_lposet(labels: Mapping[Event, Symbol], edges: Iterable[tuple[Event, Event]] = ()) -> Lposet:
    """Build an lposet whose order is the transitive closure of ``edges``.

    Raises :class:`CycleError` if the closure would be reflexive.
    """
    events = tuple(labels)
    edges = list(edges)
    for a, b in edges:
        if a not in labels or b not in labels:
            raise ValueError(f"edge ({a!r}, {b!r}) mentions an unknown event")
    return Lposet(events, dict(labels), _closure(events, edges))


@dataclass(frozen=True, eq=False)
class Pomset:
    """Isomorphism class of lposets, stored via the representative ``rep``."""

    rep: Lposet

    @property
    def events(self) -> tuple[Event, ...]:
        return self.rep.events

    def label(self, e: Event) -> Symbol:
        return self.rep.labels[e]

    def less(self, a: Event, b: Event) -> bool:
        return (a, b) in self.rep.order

    def concurrent(self, a: Event, b: Event) -> bool:
        return a != b and not self.less(a, b) and not self.less(b, a)

    def __len__(self) -> int:
        return len(self.rep.events)

    def minimal(self, remaining: Collection[Event]) -> list[Event]:
        """Events of ``remaining`` with no predecessor inside ``remaining``."""
        preds = self.rep.preds
        return [e for e in self.rep.events if e in remaining and not (preds[e] & remaining)]

    def label_counts(self) -> Counter:
        return Counter(self.rep.labels.values())

    def covering(self) -> list[tuple[Event, Event]]:
        """Hasse diagram edges (transitive reduction)."""
        succs = self.rep.succs
        return sorted(
            ((a, b) for a, b in self.rep.order if not any(b in succs[c] for c in succs[a])),
            key=str,
        )

    @cached_property
    def _signature(self) -> Counter:
        r = self.rep
        return Counter(_event_sig(r, e) for e in r.events)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pomset):
            return NotImplemented
        return iso_equal(self, other)

    def __hash__(self) -> int:
        return hash(frozenset(self._signature.items()))

    def __repr__(self) -> str:
        names = {e: i for i, e in enumerate(self.events)}
        labels = ", ".join(f"{names[e]}:{self.label(e)}" for e in self.events)
        edges = ", ".join(f"{names[a]}<{names[b]}" for a, b in self.covering())
        return f"Pomset([{labels}]; [{edges}])"


def _event_sig(r: Lposet, e: Event) -> tuple:
    return (r.labels[e], len(r.preds[e]), len(r.succs[e]), r.heights[e])


def pomset(labels: Mapping[Event, Symbol] | Sequence[Symbol], edges: Iterable[tuple[Event, Event]] = ()) -> Pomset:
    """Convenience constructor; a sequence of labels gets events ``0..n-1``."""
    if not isinstance(labels, Mapping):
        labels = dict(enumerate(labels))
    return Pomset(make_lposet(labels, edges))


def letter(a: Symbol) -> Pomset:
    return pomset([a])


def string(symbols: Iterable[Symbol]) -> Pomset:
    """The totally ordered pomset ``a0 < a1 < ... < an-1``."""
    symbols = list(symbols)
    return pomset(symbols, [(i, i + 1) for i in range(len(symbols) - 1)])


EMPTY = pomset([])


class Dependence:
    """Reflexive, symmetric relation over symbols, queried as ``D(a, b)``.

    ``related`` need be neither reflexive nor symmetric; both closures are
    applied on every query.
    """

    def __init__(self, related: Callable[[Symbol, Symbol], bool]):
        self._related = related

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Symbol, Symbol]]) -> "Dependence":
        table = frozenset(pairs)
        return cls(lambda a, b: (a, b) in table)

    def __call__(self, a: Symbol, b: Symbol) -> bool:
        return a == b or self._related(a, b) or self._related(b, a)


# ---------------------------------------------------------------- morphisms


def _topological(r: Lposet) -> list[Event]:
    return sorted(r.events, key=lambda e: (r.heights[e], str(r.labels[e])))


def iso_equal(x: Pomset, y: Pomset) -> bool:
    """Label- and order-preserving bijection between the representatives?"""
    rx, ry = x.rep, y.rep
    if len(rx.events) != len(ry.events) or len(rx.order) != len(ry.order):
        return False
    if x._signature != y._signature:
        return False
    by_sig: dict[tuple, list[Event]] = {}
    for e in ry.events:
        by_sig.setdefault(_event_sig(ry, e), []).append(e)
    xs = _topological(rx)
    mapping: dict[Event, Event] = {}
    used: set[Event] = set()

    def extend(i: int) -> bool:
        if i == len(xs):
            return True
        xe = xs[i]
        for ye in by_sig[_event_sig(rx, xe)]:
            if ye in used:
                continue
            if all(
                ((xp, xe) in rx.order) == ((yp, ye) in ry.order) and ((xe, xp) in rx.order) == ((ye, yp) in ry.order)
                for xp, yp in mapping.items()
            ):
                mapping[xe] = ye
                used.add(ye)
                if extend(i + 1):
                    return True
                del mapping[xe]
                used.discard(ye)
        return False

    return extend(0)


def less_sequential(x: Pomset, y: Pomset) -> bool:
    """``x ≼ y``: a label-preserving bijection mapping ``<_x`` into ``<_y``."""
    rx, ry = x.rep, y.rep
    if len(rx.events) != len(ry.events) or len(rx.order) > len(ry.order):
        return False
    if x.label_counts() != y.label_counts():
        return False
    by_label: dict[Symbol, list[Event]] = {}
    for e in ry.events:
        by_label.setdefault(ry.labels[e], []).append(e)
    xs = _topological(rx)
    mapping: dict[Event, Event] = {}
    used: set[Event] = set()

    def extend(i: int) -> bool:
        if i == len(xs):
            return True
        xe = xs[i]
        for ye in by_label[rx.labels[xe]]:
            if ye in used or len(ry.preds[ye]) < len(rx.preds[xe]) or len(ry.succs[ye]) < len(rx.succs[xe]):
                continue
            if all(
                ((xp, xe) not in rx.order or (yp, ye) in ry.order) and ((xe, xp) not in rx.order or (ye, yp) in ry.order)
                for xp, yp in mapping.items()
            ):
                mapping[xe] = ye
                used.add(ye)
                if extend(i + 1):
                    return True
                del mapping[xe]
                used.discard(ye)
        return False

    return extend(0)


def _closures_with_counts(y: Pomset, needed: Counter) -> Iterator[frozenset[Event]]:
    """Downward-closed sets of ``y`` whose label multiset is exactly ``needed``."""
    target = sum(needed.values())
    seen: set[frozenset[Event]] = set()
    stack: list[tuple[frozenset[Event], Counter]] = [(frozenset(), needed)]
    all_events = frozenset(y.events)
    while stack:
        done, left = stack.pop()
        if done in seen:
            continue
        seen.add(done)
        if len(done) == target:
            yield done
            continue
        for e in y.minimal(all_events - done):
            lab = y.label(e)
            if left[lab] > 0:
                nxt = left.copy()
                nxt[lab] -= 1
                stack.append((done | {e}, nxt))


def prefix(x: Pomset, y: Pomset) -> bool:
    """``x ⊑ y``.

    True iff some label-preserving injection maps ``x`` onto a downward-closed
    subset of ``y`` such that the order ``y`` induces there is contained in
    ``<_x``.  This is exactly ``E_x ⊆ E_y`` and ``cl(x) ⊆ cl(y)``.
    """
    if len(x) > len(y):
        return False
    needed = x.label_counts()
    if needed - y.label_counts():
        return False
    return any(less_sequential(sub(y, d), x) for d in _closures_with_counts(y, needed))


# ----------------------------------------------------------- linearizations


def linearizations(x: Pomset, max_count: int = DEFAULT_MAX_LIN) -> set[tuple[Symbol, ...]]:
    """All label strings of topological orderings of ``x``.

    Raises :class:`ResourceLimitError` once more than ``max_count`` distinct
    strings (or intermediate suffixes) are produced.
    """
    memo: dict[frozenset[Event], set[tuple[Symbol, ...]]] = {}

    def suffixes(rem: frozenset[Event]) -> set[tuple[Symbol, ...]]:
        if not rem:
            return {()}
        hit = memo.get(rem)
        if hit is not None:
            return hit
        out: set[tuple[Symbol, ...]] = set()
        for e in x.minimal(rem):
            lab = x.label(e)
            for s in suffixes(rem - {e}):
                out.add((lab,) + s)
            if len(out) > max_count:
                raise ResourceLimitError(f"more than {max_count} linearizations")
        memo[rem] = out
        return out

    return suffixes(frozenset(x.events))


def is_linearization(x: Pomset, word: Sequence[Symbol]) -> bool:
    """Membership ``word ∈ lin(x)`` without enumerating ``lin(x)``."""
    word = tuple(word)
    if len(word) != len(x):
        return False
    failed: set[frozenset[Event]] = set()

    def accept(rem: frozenset[Event], i: int) -> bool:
        if i == len(word):
            return True
        if rem in failed:
            return False
        for e in x.minimal(rem):
            if x.label(e) == word[i] and accept(rem - {e}, i + 1):
                return True
        failed.add(rem)
        return False

    return accept(frozenset(x.events), 0)


def downward_closures(x: Pomset) -> set[frozenset[Event]]:
    """``cl(x)``: every event subset closed under predecessors."""
    all_events = frozenset(x.events)
    found: set[frozenset[Event]] = set()
    stack = [frozenset()]
    while stack:
        d = stack.pop()
        if d in found:
            continue
        found.add(d)
        stack.extend(d | {e} for e in x.minimal(all_events - d))
    return found


# ---------------------------------------------------------------- operators


def wsc(x: Pomset, y: Pomset, dep: Dependence) -> Pomset:
    """Weak sequential composition ``x ∘_D y``; events are renamed apart."""
    n = len(x)
    xi = {e: i for i, e in enumerate(x.events)}
    yi = {e: n + i for i, e in enumerate(y.events)}
    labels = {xi[e]: x.label(e) for e in x.events}
    labels.update({yi[e]: y.label(e) for e in y.events})
    edges = [(xi[a], xi[b]) for a, b in x.rep.order]
    edges += [(yi[a], yi[b]) for a, b in y.rep.order]
    edges += [(xi[a], yi[b]) for a in x.events for b in y.events if dep(x.label(a), y.label(b))]
    return Pomset(Lposet(tuple(labels), labels, _closure(labels, edges)))


def unseq(x: Pomset, dep: Dependence) -> Pomset:
    """Drop all order not forced by ``dep``: closure of dependent ``≤`` pairs."""
    r = x.rep
    edges = [(a, b) for a, b in r.order if dep(r.labels[a], r.labels[b])]
    return Pomset(Lposet(r.events, r.labels, _closure(r.events, edges)))


def d_consistent(x: Pomset, dep: Dependence) -> bool:
    ev = x.events
    return not any(
        x.concurrent(a, b) and dep(x.label(a), x.label(b)) for i, a in enumerate(ev) for b in ev[i + 1 :]
    )


def sub(x: Pomset, keep: Collection[Event]) -> Pomset:
    """The pomset generated by ``keep`` in ``x`` (induced sub-order)."""
    r = x.rep
    keep = frozenset(keep)
    events = tuple(e for e in r.events if e in keep)
    order = frozenset((a, b) for a, b in r.order if a in keep and b in keep)
    return Pomset(Lposet(events, {e: r.labels[e] for e in events}, order))


def restrict(x: Pomset, alphabet: Union[Collection[Symbol], Callable[[Symbol], bool]]) -> Pomset:
    """``x ↾ A``: keep only events whose label lies in ``alphabet``."""
    keep_label = alphabet if callable(alphabet) else alphabet.__contains__
    return sub(x, [e for e in x.events if keep_label(x.label(e))])

