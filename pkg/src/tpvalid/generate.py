"""Random test purposes, random test cases and test-case mutation operators.

Used by the property tests and the acceptance suite.
"""

from __future__ import annotations

import random
from typing import Optional

from .errors import TpError
from .msc import Action, Alt, Coregion, Instance, Message, MscDocument, Order, Verdict, parse, pretty, SEND
from .semantics import FINAL_VERDICTS, Limits, PurposeSemantics, build_semantics, language
from .testcase import DELTA, TestCase
from .wellformed import check

MESSAGES = ("a", "b", "c", "d")


def random_document(rng: random.Random, max_instances: int = 4, max_events: int = 8, max_branches: int = 3) -> MscDocument:
    """A structurally valid purpose: a shared prefix followed by an alt whose
    branches usually start with distinct SUT messages."""
    n_ports = rng.randint(1, max_instances - 1)
    ports = [f"p{i}" for i in range(n_ports)]
    n_suts = 1 if n_ports + 1 == max_instances or rng.random() < 0.8 else 2
    suts = [f"s{i}" for i in range(n_suts)]
    instances = tuple(Instance(p, "port") for p in ports) + tuple(Instance(s, "sut") for s in suts)

    def statement(budget: int, to_port: bool | None = None) -> tuple[object, int]:
        roll = rng.random()
        if budget >= 4 and roll < 0.12 and len(ports) >= 2:
            sut = rng.choice(suts)
            a, b = rng.sample(ports, 2)
            return Coregion(sut, (Message(rng.choice(MESSAGES), a, sut), Message(rng.choice(MESSAGES), b, sut))), 4
        if budget >= 2 and roll < 0.22 and len(ports) >= 2:
            a, b = rng.sample(ports, 2)
            return Order(a, b), 2
        if roll < 0.3:
            port = rng.choice(ports)
            if rng.random() < 0.5:
                return Message(rng.choice(MESSAGES), "env", port), 1
            return Message(rng.choice(MESSAGES), port, "env"), 1
        port, sut = rng.choice(ports), rng.choice(suts)
        outward = rng.random() < 0.5 if to_port is None else to_port
        msg = rng.choice(MESSAGES)
        return (Message(msg, sut, port) if outward else Message(msg, port, sut)), 2

    def block(budget: int, length: int) -> tuple[list, int]:
        out = []
        for _ in range(length):
            if budget < 1:
                break
            stmt, cost = statement(budget)
            if cost > budget:
                continue
            out.append(stmt)
            budget -= cost
        return out, budget

    budget = max_events
    prefix, budget = block(budget, rng.randint(0, 2))
    n_branches = rng.randint(1, max_branches)
    if n_branches == 1 or budget < 2:
        rest, _ = block(budget, rng.randint(1, 3))
        body = prefix + rest + [Verdict(rng.choice(sorted(FINAL_VERDICTS)))]
    else:
        branches = []
        for _ in range(n_branches):
            first, cost = statement(budget, to_port=rng.random() < 0.85)
            if not isinstance(first, Message) or first.src == "env" or first.dst == "env":
                first, cost = Message(rng.choice(MESSAGES), rng.choice(suts), rng.choice(ports)), 2
            rest, _ = block(budget - cost, rng.randint(0, 2))
            branches.append(tuple([first] + rest + [Verdict(rng.choice(sorted(FINAL_VERDICTS)))]))
        body = prefix + [Alt(tuple(branches))]
    return MscDocument("gen", instances, tuple(body))


def random_wellformed(rng: random.Random, limits: Limits | None = None, tries: int = 200, **kw) -> PurposeSemantics:
    """Draw random documents until one parses and is well-formed."""
    for _ in range(tries):
        doc = random_document(rng, **kw)
        try:
            s = build_semantics(parse(pretty(doc)), limits)
            if check(s).well_formed:
                return s
        except TpError:
            continue
    raise RuntimeError("no well-formed purpose found")


# ---------------------------------------------------------------- mutations

_FLIP = {"pass": "fail", "fail": "pass", "inconc": "pass"}


def swap_verdicts(ts: TestCase) -> Optional[TestCase]:
    table = {t: (_FLIP[r] if r in FINAL_VERDICTS else r) for t, r in ts.table.items()}
    if table == ts.table:
        return None
    return ts.with_table(table)


def delete_entry(ts: TestCase, rng: random.Random | None = None) -> Optional[TestCase]:
    keys = sorted(ts.table, key=lambda t: (len(t), tuple(map(str, t))))
    if not keys:
        return None
    victim = rng.choice(keys) if rng else keys[-1]
    return ts.with_table({t: r for t, r in ts.table.items() if t != victim})


def _foreign_send(s: PurposeSemantics, trace, exclude) -> Action:
    port = sorted(s.ports)[0]
    other = sorted(s.document.suts)[0]
    for a in sorted(s.obs_send, key=str):
        if a not in exclude:
            return a
    return Action(SEND, port, "zz", other)


def replace_delta(ts: TestCase, s: PurposeSemantics, rng: random.Random | None = None) -> Optional[TestCase]:
    """Swap one quiescence entry for a send that is not enabled there."""
    keys = sorted((t for t, r in ts.table.items() if r is DELTA), key=lambda t: (len(t), tuple(map(str, t))))
    if not keys:
        return None
    victim = rng.choice(keys) if rng else keys[0]
    lang = language(s)
    enabled = set(lang.node(victim).children) if victim in lang else set()
    table = dict(ts.table)
    table[victim] = _foreign_send(s, victim, enabled)
    return ts.with_table(table)


def redirect_send(ts: TestCase, rng: random.Random | None = None) -> Optional[TestCase]:
    """Rename the message of one send entry."""
    keys = sorted((t for t, r in ts.table.items() if isinstance(r, Action)), key=lambda t: (len(t), tuple(map(str, t))))
    if not keys:
        return None
    victim = rng.choice(keys) if rng else keys[0]
    a = ts.table[victim]
    table = dict(ts.table)
    table[victim] = Action(a.dir, a.src, a.msg + "x", a.dst)
    return ts.with_table(table)


def random_testcase(s: PurposeSemantics, rng: random.Random, name: str = "rand") -> TestCase:
    """A table that follows the purpose loosely, taking random decisions."""
    lang = language(s)
    table: dict = {}
    stack = [()]
    while stack:
        t = stack.pop()
        node = lang.node(t)
        enabled = sorted(node.children, key=str)
        sends = [a for a in enabled if a.is_send]
        roll = rng.random()
        if roll < 0.04:
            continue  # leave undefined
        if not enabled:
            table[t] = node.verdict if roll < 0.85 else rng.choice(sorted(FINAL_VERDICTS))
        elif roll < 0.08:
            table[t] = rng.choice(sorted(FINAL_VERDICTS))
        elif sends and roll < 0.7:
            a = rng.choice(sends)
            table[t] = a
            stack.append(t + (a,))
        elif roll < 0.75:
            table[t] = _foreign_send(s, t, set(enabled))
        else:
            table[t] = DELTA
            stack.extend(t + (a,) for a in enabled if a.is_receive)
    return TestCase(name, table)
