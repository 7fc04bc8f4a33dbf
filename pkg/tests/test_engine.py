import pytest

from consfree.analysis import b_safe_terms, compute_b, is_b_safe
from consfree.engine import (
    Budget,
    Trace,
    accepts,
    data_results,
    leftmost_trace,
    reachable_data,
    step_cbv,
    step_full,
)
from consfree.fmt import encode_input, parse_term, parse_trs
from consfree.terms import format_term

from conftest import load_system

TINY = parse_trs("(VAR x)(RULES f(x) -> x a -> b)")


def test_step_order_is_deterministic():
    t = parse_term("f(a)", TINY)
    steps = step_full(TINY, t)
    assert [(s.position, s.rule_index) for s in steps] == [((), 0), ((1,), 1)]
    assert [format_term(s.after) for s in steps] == ["a", "f(b)"]
    assert all(s.before is t for s in steps)


def test_step_cbv_requires_data_arguments():
    t = parse_term("f(a)", TINY)
    steps = step_cbv(TINY, t)
    # the root is blocked until the argument is a value
    assert [(s.position, s.rule_index) for s in steps] == [((1,), 1)]
    assert step_cbv(TINY, parse_term("f(b)", TINY))[0].position == ()


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(max_terms=0)
    with pytest.raises(ValueError):
        Budget(max_term_size=-1)


def test_reachable_data_loop_terminates():
    loop = load_system("loop42")
    r = reachable_data(loop, parse_term("a", loop))
    assert r.results == frozenset()
    assert r.complete and r.truncated_by == "none"


def test_reachable_data_full_vs_cbv():
    loop = load_system("loop42")
    fa = parse_term("f(a)", loop)
    full = reachable_data(loop, fa, "full")
    assert {format_term(t) for t in full.results} == {"b"}
    assert full.complete and full.explored == 2
    cbv = reachable_data(loop, fa, "cbv")
    assert cbv.results == frozenset()
    assert cbv.complete and cbv.explored == 1


def test_step_budget_truncation():
    mem = load_system("membership")
    r = reachable_data(mem, encode_input("0000"), "full", Budget(max_terms=2))
    assert not r.complete
    assert r.truncated_by == "step_budget"
    assert r.results == frozenset()


def test_size_budget_truncation():
    choose = load_system("choose")
    r = reachable_data(
        choose, encode_input("01"), "full", Budget(max_terms=100, max_term_size=3)
    )
    assert not r.complete
    assert r.truncated_by == "size_budget"


def test_nondeterministic_results():
    choose = load_system("choose")
    r = reachable_data(choose, parse_term("coin", choose))
    assert {format_term(t) for t in r.results} == {"true", "false"}


def test_data_results_matches_single_searches():
    for name in ("membership", "any0", "dup_first"):
        trs = load_system(name)
        starts = list(b_safe_terms(trs, 4))
        batch = data_results(trs, starts)
        for s in starts[:40]:
            single = reachable_data(trs, s, "full")
            assert single.complete
            assert batch[s] == single.results, f"{name}: {format_term(s)}"


def test_data_results_handles_cycles():
    loop = load_system("loop42")
    starts = [parse_term(s, loop) for s in ("a", "f(a)", "f(b)", "b")]
    out = data_results(loop, starts)
    assert out[starts[0]] == frozenset()
    assert {format_term(t) for t in out[starts[1]]} == {"b"}
    assert {format_term(t) for t in out[starts[2]]} == {"b"}
    # a data start evaluates to itself
    assert out[starts[3]] == frozenset({starts[3]})


def test_accepts():
    mem = load_system("membership")
    assert accepts(mem, "00") == "yes"
    assert accepts(mem, "01") == "no"
    choose = load_system("choose")
    assert accepts(choose, "") == "yes"
    # budget too small to settle the answer
    assert accepts(mem, "0000", budget=Budget(max_terms=2)) == "unknown"


def test_leftmost_trace_and_render():
    mem = load_system("membership")
    start = parse_term("start(cons(0, cons(1, nil)))", mem)
    trace = leftmost_trace(mem, start)
    assert trace.render(mem) == (
        "e 0 mem(cons(0, cons(1, nil)))\n"
        "e 2 mem(cons(1, nil))\n"
        "e 3 false"
    )
    terms = trace.terms(mem)
    assert format_term(terms[-1]) == "false"
    assert len(terms) == 4


def test_trace_replay_rejects_wrong_system():
    mem = load_system("membership")
    loop = load_system("loop42")
    trace = leftmost_trace(mem, parse_term("start(nil)", mem))
    with pytest.raises(ValueError, match="does not replay"):
        trace.terms(loop)


def test_leftmost_trace_max_steps():
    loop = load_system("loop42")
    trace = leftmost_trace(loop, parse_term("a", loop), max_steps=7)
    assert len(trace.steps) == 7
    assert trace.render(loop).count("\n") == 6


def test_empty_trace_on_normal_form():
    mem = load_system("membership")
    trace = leftmost_trace(mem, parse_term("nil", mem))
    assert trace.steps == ()
    assert trace.render(mem) == ""


def test_reductions_stay_b_safe():
    """Spot check of the safety invariant: steps never leave the universe."""
    for name in ("membership", "choose", "dup_first", "mix"):
        trs = load_system(name)
        for start in b_safe_terms(trs, 4):
            b = compute_b(trs, start)
            frontier = [start]
            for _ in range(3):
                nxt = []
                for t in frontier:
                    for step in step_full(trs, t):
                        assert is_b_safe(b, step.after), (
                            f"{name}: {format_term(start)} -> {format_term(step.after)}"
                        )
                        nxt.append(step.after)
                frontier = nxt
