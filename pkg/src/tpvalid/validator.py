"""Deciding validity of a test case against a well-formed test purpose.

:func:`valid` is the recursive decision procedure over the observable
language.  :func:`definition_valid` and :func:`oracle_valid` check the same
property by brute force from two independent angles (the validity
definition, and the existence of a validating complete run for every
complete trace) and exist for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import NotWellFormed, PreconditionError
from .msc import Action, format_trace
from .semantics import FINAL_VERDICTS, PurposeSemantics, Trace, language
from .testcase import DELTA, TestCase, equiv_class, test_language
from .wellformed import check

UNDEFINED = "undefined"
WRONG_VERDICT = "wrong_verdict"
QUIESCENT_NO_RECEIVES = "quiescent_no_receives"
ILLEGAL_SEND = "illegal_send"


@dataclass(frozen=True)
class Failure:
    trace: Trace
    reason: str


@dataclass(frozen=True)
class ValidationReport:
    outcome: str  # "valid" | "invalid"
    failure: Optional[Failure]
    visited: int

    @property
    def ok(self) -> bool:
        return self.outcome == "valid"

    def records(self) -> str:
        lines = [f"RESULT {self.outcome}"]
        if self.failure is not None:
            lines.append(f"FAIL {self.failure.reason} AT {format_trace(self.failure.trace)}")
        lines.append(f"CALLS {self.visited}")
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        if self.failure is None:
            return f"test case is valid ({self.visited} calls)\n"
        return (
            f"test case is invalid: {self.failure.reason.replace('_', ' ')} "
            f"at {format_trace(self.failure.trace)} ({self.visited} calls)\n"
        )


def valid(s: PurposeSemantics, ts: TestCase, rho: Iterable[Action] = ()) -> ValidationReport:
    """Run the validation recursion from ``rho``; stops at the first failure.

    Successors are explored in canonical action order, so the reported
    failure is deterministic.
    """
    lang = language(s)
    rho = tuple(rho)
    if rho not in lang:
        raise PreconditionError(f"start trace {format_trace(rho)} is not in the purpose's language")
    memo: dict[Trace, Optional[Failure]] = {}

    def visit(r: Trace) -> Optional[Failure]:
        if r in memo:
            return memo[r]
        node = lang.node(r)
        resp = ts(r)
        if resp is None:
            result: Optional[Failure] = Failure(r, UNDEFINED)
        elif resp in FINAL_VERDICTS:
            result = None if resp == node.verdict else Failure(r, WRONG_VERDICT)
        elif resp is DELTA:
            receives = [a for a in node.children if a.is_receive]
            if not receives:
                result = Failure(r, QUIESCENT_NO_RECEIVES)
            else:
                result = None
                for a in receives:
                    result = visit(r + (a,))
                    if result is not None:
                        break
        elif resp in node.children:
            result = visit(r + (resp,))
        else:
            result = Failure(r, ILLEGAL_SEND)
        memo[r] = result
        return result

    failure = visit(rho)
    return ValidationReport("invalid" if failure else "valid", failure, len(memo))


def synthesize(s: PurposeSemantics, name: str | None = None) -> TestCase:
    """Construct a valid test case for a well-formed purpose.

    Over traces reachable under its own choices: the verdict where nothing
    is enabled, quiescence where only receives are enabled, otherwise the
    smallest enabled send (by action text).
    """
    report = check(s)
    if not report.well_formed:
        raise NotWellFormed(f"purpose {s.document.name!r} is not well-formed")
    lang = language(s)
    table: dict[Trace, object] = {}
    stack: list[Trace] = [()]
    while stack:
        t = stack.pop()
        node = lang.node(t)
        enabled = sorted(node.children, key=str)
        if not enabled:
            table[t] = node.verdict
        elif all(a.is_receive for a in enabled):
            table[t] = DELTA
            stack.extend(t + (a,) for a in enabled)
        else:
            a = min((a for a in enabled if a.is_send), key=str)
            table[t] = a
            stack.append(t + (a,))
    return TestCase(name or f"synth_{s.document.name}", table)


@dataclass(frozen=True)
class OracleResult:
    valid: bool
    witness: Optional[Trace] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def _rec_subsequence(t: Trace) -> Trace:
    return tuple(a for a in t if a.is_receive)


def _multiset_key(t: Trace) -> tuple[str, ...]:
    return tuple(sorted(map(str, t)))


def oracle_valid(s: PurposeSemantics, ts: TestCase) -> OracleResult:
    """Every complete trace of the purpose needs a validation: a complete run
    of ``ts`` ending in an equivalent trace with the same verdict."""
    lang = language(s)
    runs = test_language(ts, s.obs_rec)
    ends: dict[tuple, list[Trace]] = {}
    for t in runs.complete():
        ends.setdefault((_multiset_key(t), _rec_subsequence(t)), []).append(t)
    for sigma, verdict in lang.complete():
        candidates = ends.get((_multiset_key(sigma), _rec_subsequence(sigma)), [])
        if not any(r in lang and runs.verdicts[r] == verdict for r in candidates):
            return OracleResult(False, sigma, "no validating complete run")
    return OracleResult(True)


def definition_valid(s: PurposeSemantics, ts: TestCase) -> OracleResult:
    """Verdicts agree on ``L_TS ∩ L_M`` and every complete trace of ``L_M``
    has an equivalent in ``L_TS``."""
    lang = language(s)
    runs = test_language(ts, s.obs_rec)
    all_traces = frozenset(lang.nodes)
    for t in sorted(runs.traces & all_traces, key=lambda t: (len(t), tuple(map(str, t)))):
        if runs.verdicts[t] != lang.node(t).verdict:
            return OracleResult(False, t, "verdict mismatch")
    for sigma, _ in lang.complete():
        if not (equiv_class(sigma, all_traces) & runs.traces):
            return OracleResult(False, sigma, "no equivalent trace reached")
    return OracleResult(True)

