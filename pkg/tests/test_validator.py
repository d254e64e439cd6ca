import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import M3_PASS, T
from tpvalid.errors import NotWellFormed, PreconditionError
from tpvalid.generate import (
    delete_entry,
    random_testcase,
    random_wellformed,
    redirect_send,
    replace_delta,
    swap_verdicts,
)
from tpvalid.msc import parse, parse_action
from tpvalid.semantics import build_semantics, language
from tpvalid.testcase import DELTA, TestCase
from tpvalid.validator import (
    ILLEGAL_SEND,
    QUIESCENT_NO_RECEIVES,
    UNDEFINED,
    WRONG_VERDICT,
    definition_valid,
    oracle_valid,
    synthesize,
    valid,
)

A = parse_action


def agree(s, ts):
    r = valid(s, ts)
    return r.ok == oracle_valid(s, ts).valid == definition_valid(s, ts).valid


# ------------------------------------------------------------------ examples


def test_synthesized_m3_is_valid(m3):
    r = valid(m3, synthesize(m3))
    assert r.ok and r.failure is None and r.visited > 0


def test_swapped_verdicts_m3(m3):
    r = valid(m3, swap_verdicts(synthesize(m3)))
    assert not r.ok and r.failure.reason == WRONG_VERDICT


def test_empty_table_m3(m3):
    r = valid(m3, TestCase("empty"))
    assert r.failure.trace == () and r.failure.reason == UNDEFINED


def test_quiescence_without_receives(m3):
    r = valid(m3, TestCase("t", {(): DELTA}))
    assert r.failure.reason == QUIESCENT_NO_RECEIVES and r.failure.trace == ()


def test_illegal_send(m3):
    r = valid(m3, TestCase("t", {(): A("!(p,q)0")}))
    assert r.failure.reason == ILLEGAL_SEND


def test_start_trace_precondition(m3):
    with pytest.raises(PreconditionError):
        valid(m3, synthesize(m3), T("?(r,p)b"))


def test_valid_from_inner_trace(m3):
    assert valid(m3, synthesize(m3), T("!(p,r)a !(q,r)a")).ok
    off_path = valid(m3, synthesize(m3), T("!(q,r)a"))
    assert off_path.failure.reason == UNDEFINED and off_path.failure.trace == T("!(q,r)a")


def test_report_records(m3):
    assert valid(m3, synthesize(m3)).records() == "RESULT valid\nCALLS 11\n"
    assert valid(m3, TestCase("e")).records() == "RESULT invalid\nFAIL undefined AT -\nCALLS 1\n"


def test_synthesize_m3_entries(m3):
    ts = synthesize(m3)
    assert ts(()) == A("!(p,r)a")
    assert ts(T("!(p,r)a")) == A("!(q,r)a")
    assert ts(T("!(p,r)a !(q,r)a")) is DELTA
    assert ts(M3_PASS) == "pass"


def test_synthesize_rejects_malformed(m5, m6):
    for s in (m5, m6):
        with pytest.raises(NotWellFormed):
            synthesize(s)


def test_oracle_examples(m3):
    assert oracle_valid(m3, synthesize(m3)).valid
    assert definition_valid(m3, synthesize(m3)).valid
    empty = TestCase("e")
    o, d = oracle_valid(m3, empty), definition_valid(m3, empty)
    assert not o.valid and not d.valid
    assert o.witness in dict(language(m3).complete())


def test_truncated_before_final_quiescence(m3):
    ts = synthesize(m3)
    last = max(len(t) for t, r in ts.table.items() if r is DELTA)
    cut = ts.with_table({t: r for t, r in ts.table.items() if len(t) < last})
    assert not oracle_valid(m3, cut).valid
    assert not definition_valid(m3, cut).valid
    assert not valid(m3, cut).ok


def test_mutations_on_m3(m3):
    syn = synthesize(m3)
    expected = {
        WRONG_VERDICT: swap_verdicts(syn),
        UNDEFINED: delete_entry(syn),
        ILLEGAL_SEND: replace_delta(syn, m3),
    }
    for reason, ts in expected.items():
        assert valid(m3, ts).failure.reason == reason
        assert agree(m3, ts)
    assert valid(m3, redirect_send(syn)).failure.reason == ILLEGAL_SEND


def test_monotonicity_on_m3(m3):
    syn = synthesize(m3)
    for t in syn.table:
        smaller = syn.with_table({k: v for k, v in syn.table.items() if k != t})
        assert not valid(m3, smaller).ok


def test_send_preference_agrees_with_oracle():
    # initially a receive at p and a send at q are both enabled
    text = """msc t inst p port inst q port inst r sut
    msg x from r to p
    msg y from q to r
    verdict pass"""
    s = build_semantics(parse(text))
    send_first = synthesize(s)
    assert send_first(()) == A("!(q,r)y")
    wait_first = TestCase("w", {(): DELTA, T("?(r,p)x"): A("!(q,r)y"), T("?(r,p)x !(q,r)y"): "pass"})
    for ts in (send_first, wait_first):
        assert valid(s, ts).ok and agree(s, ts)


# ---------------------------------------------------------------- properties


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_synthesis_is_valid(seed):
    s = random_wellformed(random.Random(seed))
    assert valid(s, synthesize(s)).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_three_deciders_agree(seed):
    rng = random.Random(seed)
    s = random_wellformed(rng)
    syn = synthesize(s)
    for ts in (
        syn,
        swap_verdicts(syn),
        delete_entry(syn, rng),
        replace_delta(syn, s, rng),
        redirect_send(syn, rng),
        random_testcase(s, rng),
        random_testcase(s, rng),
    ):
        if ts is not None:
            assert agree(s, ts)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_monotonicity(seed):
    s = random_wellformed(random.Random(seed))
    syn = synthesize(s)
    for t in syn.table:
        assert not valid(s, syn.with_table({k: v for k, v in syn.table.items() if k != t})).ok


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_mutation_reasons(seed):
    rng = random.Random(seed)
    s = random_wellformed(rng)
    syn = synthesize(s)
    assert valid(s, delete_entry(syn, rng)).failure.reason == UNDEFINED
    assert valid(s, swap_verdicts(syn)).failure.reason == WRONG_VERDICT
    for ts in (replace_delta(syn, s, rng), redirect_send(syn, rng)):
        if ts is not None:
            assert valid(s, ts).failure.reason == ILLEGAL_SEND
