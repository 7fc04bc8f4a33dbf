"""Property tests: structural laws of matching, the text format, and the
no-new-data invariant of reductions."""

from hypothesis import given, settings, strategies as st

from consfree.analysis import b_safe_terms, compute_b, is_b_safe
from consfree.engine import step_cbv, step_full
from consfree.fmt import encode_input, parse_term
from consfree.terms import (
    App,
    Kind,
    Symbol,
    Var,
    apply,
    format_term,
    is_data,
    match,
    size,
    variables,
)

from conftest import load_system

MEM = load_system("membership")
CHOOSE = load_system("choose")

NIL = App(Symbol("nil", 0, Kind.CONSTRUCTOR))
ZERO = App(Symbol("0", 0, Kind.CONSTRUCTOR))
ONE = App(Symbol("1", 0, Kind.CONSTRUCTOR))
CONS = Symbol("cons", 2, Kind.CONSTRUCTOR)

data_terms = st.recursive(
    st.sampled_from([NIL, ZERO, ONE]),
    lambda kids: st.builds(lambda a, b: App(CONS, (a, b)), kids, kids),
    max_leaves=12,
)

pattern_terms = st.recursive(
    st.one_of(
        st.sampled_from([NIL, ZERO, ONE]),
        st.sampled_from("xyz").map(Var),
    ),
    lambda kids: st.builds(lambda a, b: App(CONS, (a, b)), kids, kids),
    max_leaves=8,
)

bitstrings = st.text(alphabet="01", max_size=10)


@settings(max_examples=80, deadline=None)
@given(data_terms)
def test_format_parse_roundtrip(t):
    assert parse_term(format_term(t), MEM) == t


@settings(max_examples=80, deadline=None)
@given(bitstrings)
def test_encode_input_roundtrip(bits):
    t = encode_input(bits)
    assert t.head.name == "start"
    walked = []
    node = t.args[0]
    while node.head.name == "cons":
        walked.append(node.args[0].head.name)
        node = node.args[1]
    assert node.head.name == "nil"
    assert "".join(walked) == bits
    assert size(t) == 2 * len(bits) + 2


@settings(max_examples=100, deadline=None)
@given(pattern_terms, data_terms, data_terms, data_terms)
def test_match_inverts_apply(pattern, tx, ty, tz):
    subst = {"x": tx, "y": ty, "z": tz}
    subject = apply(subst, pattern)
    assert is_data(subject)
    found = match(pattern, subject)
    assert found is not None
    assert apply(found, pattern) == subject
    for name in variables(pattern):
        assert found[name] == subst[name]


@settings(max_examples=60, deadline=None)
@given(data_terms, data_terms)
def test_match_is_none_or_exact(a, b):
    # on ground terms matching degenerates to equality
    assert (match(a, b) == {}) == (a == b)


CHOOSE_POOL = list(b_safe_terms(CHOOSE, 4))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=len(CHOOSE_POOL) - 1))
def test_cbv_steps_are_full_steps(i):
    t = CHOOSE_POOL[i]
    full_after = {s.after for s in step_full(CHOOSE, t)}
    for s in step_cbv(CHOOSE, t):
        assert s.after in full_after


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=0, max_value=len(CHOOSE_POOL) - 1),
    st.lists(st.integers(min_value=0, max_value=10**6), max_size=8),
)
def test_random_walks_stay_b_safe(i, picks):
    start = CHOOSE_POOL[i]
    b = compute_b(CHOOSE, start)
    term = start
    for pick in picks:
        steps = step_full(CHOOSE, term)
        if not steps:
            break
        term = steps[pick % len(steps)].after
        assert is_b_safe(b, term), format_term(term)


@settings(max_examples=40, deadline=None)
@given(bitstrings)
def test_decide_matches_oracle_on_membership(bits):
    from consfree.engine import accepts
    from consfree.tabulation import decide

    want = accepts(MEM, bits, "cbv")
    assert want in ("yes", "no")
    got, _ = decide(MEM, bits, mode="demand")
    assert got == (want == "yes")
