"""Semantics-preserving program transformations.

`semi_linearize` removes duplicating use of direct rule variables: an
argument that some rule copies into its right-hand side k times becomes k
argument positions, each right-hand side occurrence reads a distinct copy,
and every call site supplies the copies.  On constrained systems this
preserves the reachable data results while making every rule semi-linear.

`bottom_extend` adds a fresh constant `bot` and a rule f(...) -> bot for
every defined symbol, so call-by-value evaluation always has an escape hatch
for arguments whose value is never actually needed.  On semi-linear systems
the call-by-value data results then match full rewriting's, up to discarding
bot itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import check_constrained, require_cons_free
from .engine import Budget, reachable_data
from .fmt import has_decision_interface
from .terms import (
    App,
    Kind,
    Rule,
    Symbol,
    Term,
    Trs,
    Var,
    format_term,
    is_constructor_term,
    subterms,
    variables,
)


@dataclass(frozen=True)
class CountTable:
    """counts[(f, i)] = how many copies of f's i-th argument (1-based) the
    transformed system carries; at least 1 everywhere."""

    counts: dict[tuple[str, int], int]

    def of(self, symbol: str, i: int) -> int:
        return self.counts.get((symbol, i), 1)

    def new_arity(self, sym: Symbol) -> int:
        if sym.kind is Kind.CONSTRUCTOR:
            return sym.arity
        return sum(self.of(sym.name, i) for i in range(1, sym.arity + 1))


def _occurrences(name: str, t: Term) -> int:
    return sum(1 for s in subterms(t) if isinstance(s, Var) and s.name == name)


def compute_counts(trs: Trs) -> CountTable:
    counts: dict[tuple[str, int], int] = {}
    for sym in trs.defined():
        for i in range(1, sym.arity + 1):
            need = 1
            for _, rule in trs.rules_for(sym):
                arg = rule.lhs.args[i - 1]
                if isinstance(arg, Var):
                    need = max(need, _occurrences(arg.name, rule.rhs))
            counts[(sym.name, i)] = need
    return CountTable(counts)


def signature_map(trs: Trs, counts: CountTable) -> dict[str, Symbol]:
    """Transformed signature: defined arities widen to the copy counts,
    constructors are untouched."""
    return {
        s.name: Symbol(s.name, counts.new_arity(s), s.kind) for s in trs.signature
    }


def phi(trs: Trs, counts: CountTable, t: Term) -> Term:
    """Rewrite a term into the widened signature by repeating arguments.

    Only defined for terms whose constructor-rooted subterms contain no
    defined symbols (below a constructor there is only data to copy).
    """
    sigmap = signature_map(trs, counts)

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return u
        if u.head.kind is Kind.CONSTRUCTOR:
            if not is_constructor_term(u):
                raise ValueError(
                    f"cannot transform {format_term(u)}: defined symbol below "
                    "a constructor"
                )
            return u
        args: list[Term] = []
        for i, a in enumerate(u.args, start=1):
            args.extend([go(a)] * counts.of(u.head.name, i))
        return App(sigmap[u.head.name], tuple(args))

    return go(t)


def _fresh(base: str, used: set[str], j: int) -> str:
    name = f"{base}__{j}"
    while name in used:
        name += "'"
    used.add(name)
    return name


def semi_linearize(trs: Trs) -> Trs:
    """Widen duplicated arguments until every rule is semi-linear.

    Requires a constrained system (check_constrained passes); raises
    NotConstrainedError otherwise.  When the system carries the decision
    interface, wrapper rules start'(c(...)) -> phi(start(c(...))) are added
    for every constructor so bit-string inputs can still be injected without
    the caller having to apply phi.
    """
    check_constrained(trs)
    counts = compute_counts(trs)
    sigmap = signature_map(trs, counts)
    new_rules: list[Rule] = []
    for rule in trs.rules:
        lhs = rule.lhs
        assert isinstance(lhs, App)
        used = set(variables(lhs) | variables(rule.rhs))
        new_args: list[Term] = []
        copies: dict[str, list[str]] = {}
        for i, arg in enumerate(lhs.args, start=1):
            k = counts.of(lhs.head.name, i)
            new_args.append(arg)
            base = arg.name if isinstance(arg, Var) else f"x{i}"
            extras = [_fresh(base, used, j) for j in range(2, k + 1)]
            new_args.extend(Var(x) for x in extras)
            if isinstance(arg, Var):
                copies[arg.name] = [arg.name, *extras]
        taken: dict[str, int] = {}

        def spread(u: Term) -> Term:
            # pre-order: first occurrence keeps its name, later ones take copies
            if isinstance(u, Var):
                names = copies.get(u.name)
                if names is None:
                    return u
                k = taken.get(u.name, 0)
                taken[u.name] = k + 1
                return Var(names[k])
            return App(u.head, tuple(spread(a) for a in u.args))

        new_lhs = App(sigmap[lhs.head.name], tuple(new_args))
        new_rules.append(Rule(new_lhs, phi(trs, counts, spread(rule.rhs))))

    if has_decision_interface(trs):
        names = {s.name for s in sigmap.values()}
        wrapper_name = "start'"
        while wrapper_name in names:
            wrapper_name += "'"
        wrapper = Symbol(wrapper_name, 1, Kind.DEFINED)
        start = trs.symbol("start")
        for c in trs.constructors():
            xs = tuple(Var(f"x{i}") for i in range(1, c.arity + 1))
            pattern = App(c, xs)
            new_rules.append(
                Rule(
                    App(wrapper, (pattern,)),
                    phi(trs, counts, App(start, (pattern,))),
                )
            )
        extra_syms = (wrapper,)
    else:
        extra_syms = ()

    extra = tuple(
        sigmap[s.name]
        for s in trs.signature
        if s.kind is Kind.DEFINED and not trs.rules_for(s)
    )
    return _rebuild(new_rules, extra + extra_syms)


def bottom_extend(trs: Trs) -> Trs:
    """Add a fresh constant bot and a rule f(...) -> bot per defined symbol."""
    require_cons_free(trs)
    if any(s.name == "bot" for s in trs.signature):
        raise ValueError("signature already uses the name bot")
    bot = Symbol("bot", 0, Kind.CONSTRUCTOR)
    new_rules = list(trs.rules)
    for sym in trs.defined():
        xs = tuple(Var(f"x{i}") for i in range(1, sym.arity + 1))
        new_rules.append(Rule(App(sym, xs), App(bot)))
    return _rebuild(new_rules, (bot,))


def _rebuild(rules: list[Rule], extra: tuple[Symbol, ...]) -> Trs:
    seen: dict[str, Symbol] = {}
    for rule in rules:
        for t in subterms(rule.lhs) + subterms(rule.rhs):
            if isinstance(t, App) and t.head.name not in seen:
                seen[t.head.name] = t.head
    for s in extra:
        seen.setdefault(s.name, s)
    signature = tuple(seen[name] for name in sorted(seen))
    return Trs(signature, tuple(rules))


def verify_semi_linearization(
    orig: Trs, transformed: Trs, terms: list[Term], budget: Budget = Budget()
) -> list[str]:
    """Oracle check: same reachable data from s and from phi(s)."""
    counts = compute_counts(orig)
    problems = []
    for s in terms:
        before = reachable_data(orig, s, "full", budget)
        after = reachable_data(transformed, phi(orig, counts, s), "full", budget)
        if not (before.complete and after.complete):
            problems.append(f"{format_term(s)}: oracle budget exhausted")
        elif before.results != after.results:
            problems.append(
                f"{format_term(s)}: {_render(before.results)} != "
                f"{_render(after.results)}"
            )
    return problems


def verify_bottom_extension(
    orig: Trs, extended: Trs, terms: list[Term], budget: Budget = Budget()
) -> list[str]:
    """Oracle check: call-by-value results of the extension, minus bot, match
    the original's full-rewriting results."""
    bot = App(extended.symbol("bot"))
    problems = []
    for s in terms:
        full = reachable_data(orig, s, "full", budget)
        cbv = reachable_data(extended, s, "cbv", budget)
        if not (full.complete and cbv.complete):
            problems.append(f"{format_term(s)}: oracle budget exhausted")
        elif full.results != cbv.results - {bot}:
            problems.append(
                f"{format_term(s)}: {_render(full.results)} != "
                f"{_render(cbv.results - {bot})}"
            )
    return problems


def _render(terms: frozenset[Term] | set[Term]) -> str:
    inner = ", ".join(sorted(format_term(t) for t in terms))
    return "{" + inner + "}"
