import itertools
import json

from consfree.analysis import NotConsFreeError
from consfree.engine import reachable_data
from consfree.fmt import encode_input, parse_term, parse_trs
from consfree.tabulation import (
    decide,
    generations_bound_check,
    nf,
    run_tabulation,
    stats_bound_check,
)
from consfree.terms import App, format_term

import pytest

from conftest import load_system


def test_loop42_table_by_hand():
    """Small enough to check against a hand computation.

    The universe is {b}; f(b) confirms b in the first sweep, a never confirms
    anything, and the second sweep changes nothing and stops the run.
    """
    loop = load_system("loop42")
    fa = parse_term("f(a)", loop)
    table = run_tabulation(loop, fa, "dense")
    assert [format_term(t) for t in table.b.items] == ["b"]
    assert table.generation == 2
    assert table.dump() == "f(b) => b"
    assert nf(table, fa) == frozenset()
    assert {format_term(t) for t in nf(table, parse_term("f(b)", loop))} == {"b"}


def test_nf_rejects_unsafe_terms():
    from consfree.terms import Kind, Symbol

    loop = load_system("loop42")
    table = run_tabulation(loop, parse_term("f(a)", loop))
    # f applied to a constant from outside loop42's data universe
    foreign = App(Symbol("c", 0, Kind.CONSTRUCTOR))
    with pytest.raises(ValueError, match="not B-safe"):
        nf(table, App(loop.symbol("f"), (foreign,)))


def test_run_tabulation_rejects_unsafe_start():
    mem = load_system("membership")
    bad = parse_term("cons(mem(nil), nil)", mem)
    with pytest.raises(ValueError, match="not safe"):
        run_tabulation(mem, bad)


def test_run_tabulation_requires_cons_free():
    trs = parse_trs("(VAR x)(RULES f(x) -> cons(x, x) g(nil) -> nil)")
    with pytest.raises(NotConsFreeError):
        run_tabulation(trs, parse_term("f(nil)", trs))


def test_membership_decide_dense_frozen():
    mem = load_system("membership")
    yes, stats = decide(mem, "0000", mode="dense")
    assert yes is True
    assert stats.input_size == 10
    assert stats.max_arity == 1
    assert stats.generations == 7
    assert stats.basic_ops == 304
    assert stats.bound_value == 10**6
    assert stats.b_size == 8

    no, stats2 = decide(mem, "0100", mode="dense")
    assert no is False
    assert (stats2.generations, stats2.basic_ops) == (5, 225)

    empty, stats3 = decide(mem, "", mode="dense")
    assert empty is True
    assert (stats3.input_size, stats3.generations, stats3.basic_ops) == (2, 3, 35)


def test_stats_json_fields():
    mem = load_system("membership")
    _, stats = decide(mem, "00")
    payload = json.loads(stats.to_json())
    assert set(payload) == {
        "input_size",
        "max_arity",
        "generations",
        "basic_ops",
        "bound_value",
        "version",
    }
    assert payload["basic_ops"] == stats.basic_ops


def test_bound_checks():
    mem = load_system("membership")
    _, stats = decide(mem, "0000")
    assert stats_bound_check(stats, 1.0)
    assert not stats_bound_check(stats, 1e-6)
    assert generations_bound_check(stats)


def test_dense_generation_count_scales_linearly():
    # one cell of the list is confirmed per sweep, plus the start, the
    # verdicts, and the final unchanged sweep
    mem = load_system("membership")
    for m in (1, 2, 3, 4, 5, 6):
        _, stats = decide(mem, "0" * m, mode="dense")
        assert stats.generations == m + 3, m


def test_demand_agrees_with_dense():
    mem = load_system("membership")
    for bits in ("", "0", "1", "0000", "0100", "0011"):
        dense_yes, _ = decide(mem, bits, mode="dense")
        demand_yes, _ = decide(mem, bits, mode="demand")
        assert dense_yes == demand_yes, bits


def test_demand_confirms_fewer_keys():
    mem = load_system("membership")
    start = encode_input("0000")
    dense = run_tabulation(mem, start, "dense")
    demand = run_tabulation(mem, start, "demand")
    assert set(demand.entries) <= set(dense.entries)
    for key, mask in demand.entries.items():
        assert dense.entries[key] == mask, key
    # the verdict key itself must be present and agree
    assert nf(demand, start) == nf(dense, start)
    assert demand.stats.basic_ops <= dense.stats.basic_ops


def test_yes_set_lookup():
    mem = load_system("membership")
    table = run_tabulation(mem, encode_input("0"))
    arg = parse_term("cons(0, nil)", mem)
    assert {format_term(t) for t in table.yes_set("start", (arg,))} == {"true"}
    assert "start(cons(0, nil)) => true" in table.dump().splitlines()


def test_table_matches_oracle_everywhere():
    """Every table cell equals the call-by-value oracle on that call."""
    mem = load_system("membership")
    table = run_tabulation(mem, encode_input("10"))
    for sym in mem.defined():
        for combo in itertools.product(table.b.items, repeat=sym.arity):
            call = App(sym, combo)
            oracle = reachable_data(mem, call, "cbv")
            assert oracle.complete
            assert nf(table, call) == oracle.results, format_term(call)


def test_nondeterminism_accumulates_both_values():
    choose = load_system("choose")
    table = run_tabulation(choose, encode_input(""))
    coin = parse_term("coin", choose)
    assert {format_term(t) for t in nf(table, coin)} == {"true", "false"}
