"""Deterministic test cases as trace-indexed tables.

File format, one entry per line (``#`` comments allowed)::

    testcase <name>
    <trace> => <response>

``<trace>`` is ``-`` for the empty trace or space-separated actions;
``<response>`` is a send action, ``quiet`` (quiescence), ``pass``, ``fail``
or ``inconc``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Collection, Iterable, Mapping, Union

from .errors import DuplicateEntryError, EntryAfterVerdictError, ResourceLimitError, TestCaseError
from .msc import Action, format_trace, parse_action, parse_trace
from .semantics import FINAL_VERDICTS, NONE, Trace


class Quiet(Enum):
    DELTA = "quiet"

    def __str__(self) -> str:
        return self.value


DELTA = Quiet.DELTA

Response = Union[Action, Quiet, str]  # str: a final verdict


@dataclass(frozen=True, eq=False)
class TestCase:
    __test__ = False

    name: str
    table: Mapping[Trace, Response] = field(default_factory=dict)

    def __post_init__(self) -> None:
        table = {tuple(k): v for k, v in self.table.items()}
        for trace, resp in table.items():
            if isinstance(resp, Action):
                if not resp.is_send:
                    raise TestCaseError(f"response {resp} at {format_trace(trace)} is not a send action")
            elif resp is not DELTA and resp not in FINAL_VERDICTS:
                raise TestCaseError(f"bad response {resp!r} at {format_trace(trace)}")
        for trace in table:
            for k in range(len(trace)):
                if table.get(trace[:k]) in FINAL_VERDICTS:
                    raise EntryAfterVerdictError(
                        f"entry {format_trace(trace)} extends {format_trace(trace[:k])}, which has a final verdict"
                    )
        object.__setattr__(self, "table", table)

    def __call__(self, trace: Iterable[Action]) -> Response | None:
        return self.table.get(tuple(trace))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TestCase):
            return NotImplemented
        return self.name == other.name and self.table == other.table

    def __len__(self) -> int:
        return len(self.table)

    def with_table(self, table: Mapping[Trace, Response]) -> "TestCase":
        return TestCase(self.name, table)


def step(ts: TestCase, trace: Iterable[Action], obs_rec: Collection[Action]) -> frozenset[Action]:
    """Actions ``a`` with ``trace -> trace·a`` in the run relation of ``ts``."""
    resp = ts(trace)
    if isinstance(resp, Action):
        return frozenset({resp})
    if resp is DELTA:
        return frozenset(obs_rec)
    return frozenset()


def ver_ts(ts: TestCase, trace: Iterable[Action]) -> str:
    resp = ts(trace)
    return resp if resp in FINAL_VERDICTS else NONE


@dataclass(frozen=True)
class TestLanguage:
    __test__ = False

    traces: frozenset[Trace]
    verdicts: Mapping[Trace, str]

    def complete(self) -> list[Trace]:
        return sorted((t for t, v in self.verdicts.items() if v != NONE), key=lambda t: (len(t), tuple(map(str, t))))


def test_language(ts: TestCase, obs_rec: Collection[Action]) -> TestLanguage:
    """``L_TS``: every string reachable from the empty trace, with ``ver_TS``."""
    seen: set[Trace] = set()
    stack: list[Trace] = [()]
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        stack.extend(t + (a,) for a in step(ts, t, obs_rec))
    return TestLanguage(frozenset(seen), {t: ver_ts(ts, t) for t in seen})


test_language.__test__ = False  # keep pytest from collecting the name


def equiv_class(trace: Iterable[Action], lang: Collection[Trace], max_len: int = 10) -> set[Trace]:
    """``[σ]_L``: permutations of ``trace`` keeping its receive subsequence,
    intersected with ``lang``."""
    trace = tuple(trace)
    if len(trace) > max_len:
        raise ResourceLimitError(f"trace of length {len(trace)} exceeds equivalence cap {max_len}")
    receives = [a for a in trace if a.is_receive]
    sends = [a for a in trace if not a.is_receive]
    out: set[Trace] = set()
    for slots in itertools.combinations(range(len(trace)), len(sends)):
        slot_set = set(slots)
        for perm in set(itertools.permutations(sends)):
            it_s, it_r = iter(perm), iter(receives)
            cand = tuple(next(it_s) if i in slot_set else next(it_r) for i in range(len(trace)))
            if cand in lang:
                out.add(cand)
    return out


# --------------------------------------------------------------- file format


def serialize_testcase(ts: TestCase) -> str:
    lines = [f"testcase {ts.name}"]
    for trace in sorted(ts.table, key=lambda t: (len(t), tuple(map(str, t)))):
        lines.append(f"{format_trace(trace)} => {ts.table[trace]}")
    return "\n".join(lines) + "\n"


def parse_testcase(text: str) -> TestCase:
    """Parse the table format; the empty file is the empty table."""
    name = None
    table: dict[Trace, Response] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if name is None:
            head = line.split()
            if len(head) != 2 or head[0] != "testcase":
                raise TestCaseError("expected header", lineno, 1, ("testcase <name>",))
            name = head[1]
            continue
        if "=>" not in line:
            raise TestCaseError("missing '=>'", lineno, 1, ("<trace> => <response>",))
        lhs, rhs = (part.strip() for part in line.split("=>", 1))
        try:
            trace = parse_trace(lhs)
        except ValueError as exc:
            raise TestCaseError(str(exc), lineno, 1, ("-", "actions")) from None
        if rhs == "quiet":
            resp: Response = DELTA
        elif rhs in FINAL_VERDICTS:
            resp = rhs
        else:
            try:
                resp = parse_action(rhs)
            except ValueError:
                col = raw.index(rhs, raw.index("=>")) + 1
                raise TestCaseError(f"bad response {rhs!r}", lineno, col, ("send action", "quiet", *sorted(FINAL_VERDICTS))) from None
        if trace in table:
            raise DuplicateEntryError(f"second entry for {format_trace(trace)}", lineno, 1)
        table[trace] = resp
    return TestCase(name or "untitled", table)
