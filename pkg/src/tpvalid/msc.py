"""Textual test-purpose DSL: lexer, parser, printer and desugarer.

Grammar (statements separated by whitespace, newlines or ``;``; ``#`` starts
a comment)::

    document := "msc" IDENT decl* stmt*
    decl     := "inst" IDENT ("port" | "sut")
    stmt     := "msg" IDENT "from" EP "to" EP
              | "coregion" IDENT "{" msgstmt* "}"
              | "alt" "{" branch+ "}"          branch := "{" stmt* "}"
              | "order" IDENT "->" IDENT
              | "verdict" ("pass" | "fail" | "inconc")
    EP       := IDENT | "env"
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterator, Union

from .errors import ParseError, SemanticError
from .pomset import Dependence

ENV = "env"
VOID = "0"
VERDICTS = ("pass", "fail", "inconc")

SEND = "!"
RECEIVE = "?"


@dataclass(frozen=True, order=True)
class Action:
    """A communication symbol ``!(src,dst)msg`` or ``?(src,dst)msg``."""

    dir: str
    src: str
    msg: str
    dst: str

    def __post_init__(self) -> None:
        if self.dir not in (SEND, RECEIVE):
            raise ValueError(f"bad direction {self.dir!r}")
        if self.owner == ENV:
            raise ValueError(f"{self} would be owned by the environment")

    @property
    def owner(self) -> str:
        """``ins(a)``: the instance on which the action happens."""
        return self.src if self.dir == SEND else self.dst

    @property
    def is_send(self) -> bool:
        return self.dir == SEND

    @property
    def is_receive(self) -> bool:
        return self.dir == RECEIVE

    def __str__(self) -> str:
        return f"{self.dir}({self.src},{self.dst}){self.msg}"


_ACTION_RE = re.compile(r"([!?])\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)(\S+)")


def parse_action(text: str) -> Action:
    m = _ACTION_RE.fullmatch(text.strip())
    if m is None:
        raise ValueError(f"not an action: {text!r}")
    d, src, dst, msg = m.groups()
    return Action(d, src, msg, dst)


def format_trace(trace: tuple[Action, ...]) -> str:
    """Actions joined by single spaces; the empty trace is ``-``."""
    return " ".join(map(str, trace)) if trace else "-"


def parse_trace(text: str) -> tuple[Action, ...]:
    text = text.strip()
    if text == "-":
        return ()
    return tuple(parse_action(tok) for tok in text.split())


# ---------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Instance:
    name: str
    kind: str  # "port" | "sut"


@dataclass(frozen=True)
class Message:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Coregion:
    instance: str
    messages: tuple[Message, ...]


@dataclass(frozen=True)
class Alt:
    branches: tuple[tuple["Stmt", ...], ...]


@dataclass(frozen=True)
class Order:
    src: str
    dst: str


@dataclass(frozen=True)
class Verdict:
    value: str


Stmt = Union[Message, Coregion, Alt, Order, Verdict]


@dataclass(frozen=True)
class MscDocument:
    name: str
    instances: tuple[Instance, ...]
    body: tuple[Stmt, ...]
    desugared: bool = False

    @property
    def ports(self) -> frozenset[str]:
        return frozenset(i.name for i in self.instances if i.kind == "port")

    @property
    def suts(self) -> frozenset[str]:
        return frozenset(i.name for i in self.instances if i.kind == "sut")


# -------------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(r"\s+|#[^\n]*|(->)|([{};])|([^\s{};#]+)")


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # pragma: no cover - the pattern matches any character
            raise ParseError("unexpected character", line, pos - line_start + 1)
        word = m.group(1) or m.group(2) or m.group(3)
        if word and word != ";":
            toks.append(_Tok(word, line, m.start() - line_start + 1))
        chunk = m.group(0)
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = m.start() + chunk.rindex("\n") + 1
        pos = m.end()
    return toks


_IDENT_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.']*")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i].text if self.i < len(self.toks) else None

    def _fail(self, expected: tuple[str, ...]) -> ParseError:
        if self.i < len(self.toks):
            t = self.toks[self.i]
            return ParseError(f"unexpected {t.text!r}", t.line, t.col, expected)
        last = self.toks[-1] if self.toks else _Tok("", 1, 0)
        return ParseError("unexpected end of input", last.line, last.col + len(last.text), expected)

    def expect(self, *words: str) -> str:
        tok = self.peek()
        if tok is None or tok not in words:
            raise self._fail(words)
        self.i += 1
        return tok

    def ident(self, what: str = "IDENT") -> str:
        tok = self.peek()
        if tok is None or not _IDENT_RE.fullmatch(tok):
            raise self._fail((what,))
        self.i += 1
        return tok

    def document(self) -> MscDocument:
        self.expect("msc")
        name = self.ident()
        instances = []
        while self.peek() == "inst":
            self.i += 1
            inst = self.ident("instance name")
            kind = self.expect("port", "sut")
            instances.append(Instance(inst, kind))
        body = self.stmts(top=True)
        if self.peek() is not None:
            raise self._fail(("msg", "coregion", "alt", "order", "verdict", "end of input"))
        return MscDocument(name, tuple(instances), body)

    def stmts(self, top: bool = False) -> tuple[Stmt, ...]:
        out: list[Stmt] = []
        while True:
            tok = self.peek()
            if tok == "msg":
                out.append(self.message())
            elif tok == "coregion":
                self.i += 1
                inst = self.ident("instance name")
                self.expect("{")
                msgs = []
                while self.peek() == "msg":
                    msgs.append(self.message())
                self.expect("}", "msg")
                out.append(Coregion(inst, tuple(msgs)))
            elif tok == "alt":
                self.i += 1
                self.expect("{")
                branches = []
                while self.peek() == "{":
                    self.i += 1
                    branches.append(self.stmts())
                    self.expect("}")
                if not branches:
                    raise self._fail(("{",))
                self.expect("}", "{")
                out.append(Alt(tuple(branches)))
            elif tok == "order":
                self.i += 1
                a = self.ident("instance name")
                self.expect("->")
                b = self.ident("instance name")
                out.append(Order(a, b))
            elif tok == "verdict":
                self.i += 1
                out.append(Verdict(self.expect(*VERDICTS)))
            else:
                return tuple(out)

    def message(self) -> Message:
        self.expect("msg")
        name = self.ident("message name")
        self.expect("from")
        src = self.ident("instance name")
        self.expect("to")
        dst = self.ident("instance name")
        return Message(name, src, dst)


def parse(text: str) -> MscDocument:
    """Parse DSL source and apply the structural checks.

    Raises :class:`ParseError` for syntax errors and :class:`SemanticError`
    for undeclared instances, misplaced verdicts and similar.
    """
    doc = _Parser(text).document()
    check_structure(doc)
    return doc


# ------------------------------------------------------------ structure


def _walk(body: tuple[Stmt, ...]) -> Iterator[Stmt]:
    for s in body:
        yield s
        if isinstance(s, Alt):
            for b in s.branches:
                yield from _walk(b)


def _terminates(body: tuple[Stmt, ...], where: str) -> bool:
    """True if every path through ``body`` ends in a verdict, False if none does."""
    for k, s in enumerate(body):
        last = k == len(body) - 1
        if isinstance(s, Verdict):
            if not last:
                raise SemanticError(f"{where}: verdict must be the last statement of its branch")
            return True
        if isinstance(s, Alt):
            if any(not b for b in s.branches):
                raise SemanticError(f"{where}: alt branches may not be empty")
            ends = {_terminates(b, f"{where} alt branch {j}") for j, b in enumerate(s.branches)}
            if ends == {True, False}:
                raise SemanticError(f"{where}: some alt branches end in a verdict and some do not")
            if ends == {True}:
                if not last:
                    raise SemanticError(f"{where}: statements follow an alt whose branches all end in a verdict")
                return True
    return False


def check_structure(doc: MscDocument) -> None:
    kinds = {}
    for inst in doc.instances:
        if inst.name == ENV:
            raise SemanticError("'env' is reserved and cannot be declared")
        if inst.name in kinds:
            raise SemanticError(f"instance {inst.name!r} declared twice")
        kinds[inst.name] = inst.kind
    if not doc.ports:
        raise SemanticError("at least one port instance is required")
    if not doc.suts:
        raise SemanticError("at least one SUT instance is required")

    def endpoint(name: str) -> None:
        if name != ENV and name not in kinds:
            raise SemanticError(f"undeclared instance {name!r}")

    def message(m: Message) -> None:
        endpoint(m.src)
        endpoint(m.dst)
        if m.src == m.dst:
            raise SemanticError(f"message {m.name!r} from {m.src!r} to itself")

    for s in _walk(doc.body):
        if isinstance(s, Message):
            message(s)
        elif isinstance(s, Coregion):
            if s.instance not in kinds:
                raise SemanticError(f"undeclared instance {s.instance!r}")
            seen = set()
            for m in s.messages:
                message(m)
                if s.instance not in (m.src, m.dst):
                    raise SemanticError(f"coregion on {s.instance!r} holds message {m.name!r} not touching it")
                act = _coregion_action(s.instance, m)
                if act in seen:
                    raise SemanticError(f"identical action {act} twice in one coregion")
                seen.add(act)
        elif isinstance(s, Order):
            for name in (s.src, s.dst):
                if name not in kinds:
                    raise SemanticError(f"undeclared instance {name!r}")
    if not _terminates(doc.body, "document"):
        raise SemanticError("document: a branch has no terminal verdict")


def _coregion_action(instance: str, m: Message) -> Action:
    return Action(SEND, m.src, m.name, m.dst) if m.src == instance else Action(RECEIVE, m.src, m.name, m.dst)


# ------------------------------------------------------------- desugaring


def desugar(doc: MscDocument) -> MscDocument:
    """Replace each ``order A -> B`` by a void message ``0`` from A to B."""
    if doc.desugared:
        return doc

    def convert(body: tuple[Stmt, ...]) -> tuple[Stmt, ...]:
        out: list[Stmt] = []
        for s in body:
            if isinstance(s, Order):
                if s.src == s.dst:
                    raise SemanticError(f"order {s.src} -> {s.dst} relates an instance to itself")
                out.append(Message(VOID, s.src, s.dst))
            elif isinstance(s, Alt):
                out.append(Alt(tuple(convert(b) for b in s.branches)))
            else:
                out.append(s)
        return tuple(out)

    for s in _walk(doc.body):
        msgs = s.messages if isinstance(s, Coregion) else (s,) if isinstance(s, Message) else ()
        if any(m.name == VOID for m in msgs):
            raise SemanticError(f"message name {VOID!r} is reserved for desugared order")
    return replace(doc, body=convert(doc.body), desugared=True)


# ---------------------------------------------------------------- printing


def pretty(doc: MscDocument) -> str:
    """Canonical source text; ``parse(pretty(d))`` reproduces ``d``'s AST."""
    lines = [f"msc {doc.name}"]
    lines += [f"inst {i.name} {i.kind}" for i in doc.instances]

    def emit(body: tuple[Stmt, ...], ind: str) -> None:
        for s in body:
            if isinstance(s, Message):
                lines.append(f"{ind}msg {s.name} from {s.src} to {s.dst}")
            elif isinstance(s, Coregion):
                lines.append(f"{ind}coregion {s.instance} {{")
                lines.extend(f"{ind}  msg {m.name} from {m.src} to {m.dst}" for m in s.messages)
                lines.append(f"{ind}}}")
            elif isinstance(s, Alt):
                lines.append(f"{ind}alt {{")
                for b in s.branches:
                    lines.append(f"{ind}  {{")
                    emit(b, ind + "    ")
                    lines.append(f"{ind}  }}")
                lines.append(f"{ind}}}")
            elif isinstance(s, Order):
                lines.append(f"{ind}order {s.src} -> {s.dst}")
            else:
                lines.append(f"{ind}verdict {s.value}")

    emit(doc.body, "")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ paths


@dataclass(frozen=True)
class PathEvent:
    action: Action
    coregion: int | None  # id of the enclosing coregion occurrence, if any


@dataclass(frozen=True)
class Path:
    """One full alt-path: events in document order plus its verdict."""

    choices: tuple[int, ...]
    events: tuple[PathEvent, ...]
    verdict: str


def _message_events(m: Message, coregion: int | None, owner: str | None) -> list[PathEvent]:
    out = []
    if m.src != ENV:
        out.append(PathEvent(Action(SEND, m.src, m.name, m.dst), coregion if owner == m.src else None))
    if m.dst != ENV:
        out.append(PathEvent(Action(RECEIVE, m.src, m.name, m.dst), coregion if owner == m.dst else None))
    return out


def paths(doc: MscDocument) -> list[Path]:
    """Enumerate every full alt-path of a desugared document."""
    counter = iter(range(1 << 30))
    coregion_ids: dict[int, int] = {}

    def expand(body: tuple[Stmt, ...]) -> list[tuple[tuple[int, ...], list[PathEvent], str | None]]:
        partial: list[tuple[tuple[int, ...], list[PathEvent], str | None]] = [((), [], None)]
        for s in body:
            if isinstance(s, Message):
                evs = _message_events(s, None, None)
                partial = [(c, e + evs, v) for c, e, v in partial]
            elif isinstance(s, Coregion):
                cid = coregion_ids.setdefault(id(s), next(counter))
                sends: list[PathEvent] = []
                recvs: list[PathEvent] = []
                for m in s.messages:
                    for ev in _message_events(m, cid, s.instance):
                        (sends if ev.action.is_send else recvs).append(ev)
                partial = [(c, e + sends + recvs, v) for c, e, v in partial]
            elif isinstance(s, Alt):
                sub = [(j, alt_path) for j, b in enumerate(s.branches) for alt_path in expand(b)]
                partial = [
                    (c + (j,) + c2, e + e2, v2 if v2 is not None else v)
                    for c, e, v in partial
                    for j, (c2, e2, v2) in sub
                ]
            elif isinstance(s, Verdict):
                partial = [(c, e, s.value) for c, e, _ in partial]
            else:
                raise SemanticError("document must be desugared before path expansion")
        return partial

    out = []
    for choices, events, verdict in expand(doc.body):
        assert verdict is not None, "structure check guarantees a verdict"
        out.append(Path(choices, tuple(events), verdict))
    return out


# -------------------------------------------------------------- dependence


def actions(doc: MscDocument) -> frozenset[Action]:
    doc = desugar(doc)
    return frozenset(ev.action for p in paths(doc) for ev in p.events)


class CommDependence(Dependence):
    """``D_Com``: same-instance actions outside a shared coregion, plus
    matching send/receive pairs.

    Works for any pair of actions, including ones that do not occur in the
    document; those are related by the instance rule alone.
    """

    def __init__(self, independent: frozenset[frozenset[Action]]):
        self.independent = independent
        super().__init__(self._relates)

    def _relates(self, a: Action, b: Action) -> bool:
        if a.owner == b.owner:
            return frozenset((a, b)) not in self.independent
        return a.dir != b.dir and (a.src, a.msg, a.dst) == (b.src, b.msg, b.dst)


def communication_dependence(doc: MscDocument) -> CommDependence:
    """Build ``D_Com`` for the actions of ``doc``.

    Raises :class:`SemanticError` when a pair of actions sits in one coregion
    somewhere but is sequential on the same instance elsewhere.
    """
    doc = desugar(doc)
    independent: set[frozenset[Action]] = set()
    all_paths = paths(doc)
    for p in all_paths:
        by_region: dict[int, list[Action]] = {}
        for ev in p.events:
            if ev.coregion is not None:
                by_region.setdefault(ev.coregion, []).append(ev.action)
        for acts in by_region.values():
            independent.update(frozenset((a, b)) for i, a in enumerate(acts) for b in acts[i + 1 :])
    for p in all_paths:
        evs = p.events
        for i, e1 in enumerate(evs):
            for e2 in evs[i + 1 :]:
                a, b = e1.action, e2.action
                if a == b or a.owner != b.owner:
                    continue
                co_located = e1.coregion is not None and e1.coregion == e2.coregion
                if not co_located and frozenset((a, b)) in independent:
                    raise SemanticError(
                        f"actions {a} and {b} share a coregion but are also sequential on {a.owner}"
                    )
    return CommDependence(frozenset(independent))
