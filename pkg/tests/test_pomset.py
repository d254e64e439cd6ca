import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpvalid.errors import CycleError, ResourceLimitError
from tpvalid.pomset import (
    EMPTY,
    Dependence,
    d_consistent,
    downward_closures,
    is_linearization,
    iso_equal,
    less_sequential,
    letter,
    linearizations,
    make_lposet,
    pomset,
    prefix,
    restrict,
    string,
    unseq,
    wsc,
)

# Example pomsets over {a, b, c} and the dependence drawn next to them.
EX_D = Dependence.from_pairs([("a", "a"), ("b", "b"), ("c", "c"), ("b", "c")])
EX_X = pomset({1: "a", 2: "a"}, [(1, 2)])
_Y_LABELS = {"a1": "a", "a2": "a", "b1": "b", "b2": "b", "b3": "b", "c": "c"}
_Y_EDGES = [("a1", "a2"), ("b1", "b2"), ("b1", "c"), ("b2", "b3"), ("b2", "c"), ("c", "b3")]
EX_Y = pomset(_Y_LABELS, _Y_EDGES)
EX_Z = pomset(_Y_LABELS, _Y_EDGES + [("a1", "b2"), ("a2", "b3")])

CHAIN_AB = string("ab")
PAR_AB = pomset(["a", "b"])


def brute_linearizations(x):
    """Oracle: filter all permutations of the events by the order."""
    events = list(x.events)
    out = set()
    for perm in itertools.permutations(events):
        pos = {e: i for i, e in enumerate(perm)}
        if all(pos[a] < pos[b] for a in events for b in events if x.less(a, b)):
            out.add(tuple(x.label(e) for e in perm))
    return out


def brute_prefix(x, y):
    """Oracle for the set-based definition: some label-preserving injection
    maps every downward-closed set of x onto a downward-closed set of y."""
    cly = downward_closures(y)
    clx = downward_closures(x)
    xs = list(x.events)
    for image in itertools.permutations(y.events, len(xs)):
        f = dict(zip(xs, image))
        if any(x.label(e) != y.label(f[e]) for e in xs):
            continue
        if all(frozenset(f[e] for e in d) in cly for d in clx):
            return True
    return False


# ------------------------------------------------------------ constructors


def test_make_lposet_empty_is_epsilon():
    r = make_lposet({}, [])
    assert r.events == () and r.order == frozenset()


def test_make_lposet_chain():
    r = make_lposet({"e1": "a", "e2": "a"}, [("e1", "e2")])
    assert iso_equal(pomset({"e1": "a", "e2": "a"}, [("e1", "e2")]), EX_X)
    assert ("e1", "e2") in r.order


def test_make_lposet_cycle():
    with pytest.raises(CycleError):
        make_lposet({"e1": "a", "e2": "b"}, [("e1", "e2"), ("e2", "e1")])


def test_closure_is_transitive():
    r = make_lposet({1: "a", 2: "b", 3: "c"}, [(1, 2), (2, 3)])
    assert (1, 3) in r.order


# -------------------------------------------------------------- orderings


def test_iso_examples():
    assert iso_equal(EMPTY, EMPTY)
    assert not iso_equal(CHAIN_AB, PAR_AB)
    assert not iso_equal(EX_Y, EX_Z)


def test_iso_ignores_event_names():
    assert iso_equal(pomset({"u": "a", "v": "b"}, [("u", "v")]), CHAIN_AB)
    assert hash(pomset({"u": "a", "v": "b"}, [("u", "v")])) == hash(CHAIN_AB)


def test_prefix_examples():
    assert prefix(EX_X, EX_Y)
    assert prefix(EX_X, EX_Z)
    assert prefix(EMPTY, EX_Y)
    assert not prefix(string("abc"), CHAIN_AB)


def test_prefix_allows_more_order_in_the_prefix():
    assert prefix(CHAIN_AB, PAR_AB)
    assert not prefix(PAR_AB, CHAIN_AB)


def test_prefix_requires_downward_closed_image():
    assert not prefix(letter("b"), CHAIN_AB)


def test_less_sequential_examples():
    assert less_sequential(EX_Y, EX_Z)
    assert less_sequential(EX_X, EX_X)
    assert not less_sequential(CHAIN_AB, PAR_AB)
    assert less_sequential(PAR_AB, CHAIN_AB)


# --------------------------------------------------------- linearizations


def test_linearization_examples():
    assert linearizations(EMPTY) == {()}
    assert linearizations(PAR_AB) == {("a", "b"), ("b", "a")}
    assert linearizations(EX_X) == {("a", "a")}


def test_linearizations_cap():
    with pytest.raises(ResourceLimitError):
        linearizations(pomset(list("abcdefg")), max_count=100)


def test_is_linearization_examples():
    assert is_linearization(EMPTY, ())
    assert is_linearization(PAR_AB, ("b", "a"))
    assert not is_linearization(CHAIN_AB, ("b", "a"))


def test_example_y_linearizations_match_oracle():
    assert linearizations(EX_Y) == brute_linearizations(EX_Y)


# ------------------------------------------------------ composition, unseq


def test_wsc_examples():
    assert iso_equal(wsc(EX_X, EMPTY, EX_D), EX_X)
    assert iso_equal(wsc(letter("b"), letter("c"), EX_D), string("bc"))
    assert iso_equal(wsc(letter("a"), letter("b"), EX_D), PAR_AB)


def test_wsc_renames_apart():
    assert len(wsc(EX_X, EX_X, EX_D)) == 4


def test_unseq_examples():
    assert iso_equal(unseq(EX_Z, EX_D), EX_Y)
    assert iso_equal(unseq(EMPTY, EX_D), EMPTY)
    assert iso_equal(unseq(string("ab"), EX_D), PAR_AB)


def test_d_consistent_examples():
    for p in (EX_X, EX_Y, EX_Z):
        assert d_consistent(p, EX_D)
    assert d_consistent(EMPTY, EX_D)
    assert not d_consistent(pomset(["a", "a"]), EX_D)


def test_restrict_examples():
    assert iso_equal(restrict(EX_Y, {"a", "b", "c"}), EX_Y)
    assert iso_equal(restrict(EX_Y, set()), EMPTY)
    assert iso_equal(restrict(EX_Y, {"a"}), EX_X)
    assert iso_equal(restrict(EX_Y, lambda s: s != "c"), pomset({1: "a", 2: "a", 3: "b", 4: "b", 5: "b"}, [(1, 2), (3, 4), (4, 5)]))


def test_downward_closure_examples():
    assert downward_closures(EMPTY) == {frozenset()}
    chain = pomset({1: "a", 2: "b"}, [(1, 2)])
    assert downward_closures(chain) == {frozenset(), frozenset({1}), frozenset({1, 2})}
    assert len(downward_closures(PAR_AB)) == 4


def test_dependence_is_reflexive_and_symmetric():
    assert EX_D("a", "a") and EX_D("z", "z")
    assert EX_D("c", "b") and EX_D("b", "c")
    assert not EX_D("a", "b")


# -------------------------------------------------------------- properties

SYMBOLS = ("a", "b", "c")


@st.composite
def pomsets(draw, max_size=6):
    n = draw(st.integers(0, max_size))
    labels = [draw(st.sampled_from(SYMBOLS)) for _ in range(n)]
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    return pomset(dict(enumerate(labels)), edges)


@st.composite
def dependences(draw):
    pairs = [p for p in itertools.combinations(SYMBOLS, 2) if draw(st.booleans())]
    return Dependence.from_pairs(pairs)


@settings(max_examples=200, deadline=None)
@given(pomsets(), pomsets(), dependences())
def test_unseq_distributes_over_wsc(x, y, d):
    assert iso_equal(unseq(wsc(x, y, d), d), wsc(unseq(x, d), unseq(y, d), d))


@settings(max_examples=100, deadline=None)
@given(pomsets(), dependences())
def test_unseq_idempotent(x, d):
    once = unseq(x, d)
    assert iso_equal(unseq(once, d), once)


@settings(max_examples=100, deadline=None)
@given(pomsets(5), pomsets(5), pomsets(5))
def test_prefix_is_a_partial_order(x, y, z):
    assert prefix(x, x)
    if prefix(x, y) and prefix(y, x):
        assert iso_equal(x, y)
    if prefix(x, y) and prefix(y, z):
        assert prefix(x, z)


@settings(max_examples=100, deadline=None)
@given(pomsets(5), pomsets(5), pomsets(5))
def test_less_sequential_is_a_partial_order(x, y, z):
    assert less_sequential(x, x)
    if less_sequential(x, y) and less_sequential(y, x):
        assert iso_equal(x, y)
    if less_sequential(x, y) and less_sequential(y, z):
        assert less_sequential(x, z)


@settings(max_examples=150, deadline=None)
@given(pomsets(5), pomsets(5))
def test_prefix_matches_closure_oracle(x, y):
    assert prefix(x, y) == brute_prefix(x, y)


@settings(max_examples=100, deadline=None)
@given(pomsets(), pomsets(), dependences())
def test_wsc_preserves_d_consistency(x, y, d):
    x, y = unseq(x, d), unseq(y, d)
    if d_consistent(x, d) and d_consistent(y, d):
        assert d_consistent(wsc(x, y, d), d)


@settings(max_examples=100, deadline=None)
@given(pomsets())
def test_linearizations_match_oracle(x):
    lins = linearizations(x)
    assert lins and lins == brute_linearizations(x)
    assert all(is_linearization(x, w) for w in lins)


@settings(max_examples=100, deadline=None)
@given(pomsets())
def test_non_linearizations_rejected(x):
    lins = linearizations(x)
    for perm in set(itertools.permutations([x.label(e) for e in x.events])):
        assert is_linearization(x, perm) == (perm in lins)


@given(st.lists(st.sampled_from(SYMBOLS), max_size=6))
def test_strings_linearize_to_themselves(word):
    assert linearizations(string(word)) == {tuple(word)}


@settings(max_examples=100, deadline=None)
@given(pomsets(), pomsets())
def test_iso_equal_agrees_with_hash(x, y):
    if iso_equal(x, y):
        assert hash(x) == hash(y)


@settings(max_examples=100, deadline=None)
@given(pomsets(5), st.data())
def test_constructed_prefixes_are_recognised(y, data):
    closures = sorted(downward_closures(y), key=lambda d: sorted(d))
    d = data.draw(st.sampled_from(closures))
    order = [e for e in y.events if e in d]  # events are numbered topologically
    extra = [(a, b) for i, a in enumerate(order) for b in order[i + 1 :] if data.draw(st.booleans())]
    induced = [(a, b) for a in d for b in d if y.less(a, b)]
    x = pomset({e: y.label(e) for e in d}, induced + extra)
    assert prefix(x, y) and brute_prefix(x, y)
