import pathlib

import pytest

from tpvalid.msc import parse, parse_trace
from tpvalid.semantics import build_semantics

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"
CORPUS_NAMES = ("m3", "m4", "m5", "m6")


def corpus_text(name: str) -> str:
    return (CORPUS / f"{name}.tp").read_text()


def corpus_semantics(name: str):
    return build_semantics(parse(corpus_text(name)))


def T(text: str):
    """Trace literal: space separated actions, ``-`` for the empty trace."""
    return parse_trace(text)


M3_PASS = T("!(p,r)a !(q,r)a ?(r,p)b !(p,q)0 ?(p,q)0 ?(r,q)b")
M3_PASS_SWAPPED = T("!(q,r)a !(p,r)a ?(r,p)b !(p,q)0 ?(p,q)0 ?(r,q)b")
M3_FAIL = T("!(p,r)a !(q,r)a ?(r,q)b !(q,p)0 ?(q,p)0 ?(r,p)b")


@pytest.fixture(scope="session")
def m3():
    return corpus_semantics("m3")


@pytest.fixture(scope="session")
def m5():
    return corpus_semantics("m5")


@pytest.fixture(scope="session")
def m6():
    return corpus_semantics("m6")


@pytest.fixture(scope="session")
def single():
    return build_semantics(parse("msc t inst p port inst r sut msg a from p to r verdict pass"))
