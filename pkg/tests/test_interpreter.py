from itertools import product

import pytest

from consfree.encoding import BOTTOM, bit_encode, bitstring, encode_term
from consfree.engine import FuelExhausted, normalize
from consfree.harness import bottom_corpus, golden_corpus
from consfree.interpreter import (
    PreconditionFailure,
    build_Q,
    eqbits_term,
    interpret,
    interpret_run,
    q_value,
    simulation_term,
)
from consfree.syntax import parse_term, print_term
from consfree.terms import type_order

from conftest import HO_SRC, NOT_SRC, trs_of

Q = build_Q()


def q(text):
    return parse_term(text, Q)


def rule_index(head, first_arg=None):
    for r in Q.rules:
        if r.head.name == head and (first_arg is None or print_term(r.lhs.args[0]) == first_arg):
            return r.index
    raise KeyError(head)


def test_program_shape():
    assert len(Q.rules) >= 40
    assert type_order(Q) == 2
    heads = {r.head.name for r in Q.rules}
    for name in ("normalform", "normalise", "findrule", "test", "test2", "eqbits", "eqsubst",
                 "eqcheck", "substitute", "subst", "subst2", "subst3", "substcheckbs",
                 "match", "matchcheck", "matchall", "instantiate", "install", "ifelse"):
        assert name in heads, name
    assert sum(1 for r in Q.rules if r.head.name == "eqbits") == 9
    assert sum(1 for r in Q.rules if r.head.name == "ifelse") == 2


def test_interpret_examples():
    r_not = trs_of(NOT_SRC)
    assert interpret(r_not, parse_term("not(true)", r_not)) == parse_term("false", r_not)
    proj = trs_of("sort d; cons c : d; fun f : [d] => d; rule f(x) -> x;")
    assert interpret(proj, parse_term("f(c)", proj)) == parse_term("c", proj)
    stuck = trs_of("sort d; cons c : d; fun f : [d] => d; fun g : [d] => d; rule f(c) -> g(c);")
    assert interpret(stuck, parse_term("f(c)", stuck)) is BOTTOM


def test_golden_corpus_matches_direct_runs():
    for name, trs, starts in golden_corpus():
        for s in starts:
            direct = normalize(trs, s, 100_000)
            run = interpret_run(trs, s, 10_000_000, assert_bsafe=True)
            assert run.result == direct.term, (name, print_term(s))
            assert run.steps >= direct.steps


def test_bottom_corpus():
    for name, trs, s in bottom_corpus():
        assert interpret(trs, s, assert_bsafe=True) is BOTTOM, name


def test_eqbits_small_exhaustive():
    strings = ["".join(p) for n in range(4) for p in product("01", repeat=n)]
    for u, v in product(strings, repeat=2):
        got = q_value(eqbits_term(bitstring(u), bitstring(v)))
        assert print_term(got) == ("true" if u == v else "false"), (u, v)


def test_failed_match_moves_to_next_rule():
    # the first rule of `not` fails on false, so test2 sees Var(eps) and findrule continues
    r_not = trs_of(NOT_SRC)
    run = interpret_run(r_not, parse_term("not(false)", r_not), trace=True)
    fired = [s.rule for s in run.normalization.trace]
    assert rule_index("test2", "Var(eps)") in fired
    assert rule_index("test2", "bot") in fired
    assert run.result == parse_term("true", r_not)


def test_substitution_lookup():
    gamma = ("\\x:bitstring. ifelse(eqbits(x, 1(eps)), Fun(1(0(eps)), []), bot)")
    assert print_term(q_value(q(f"eqsubst(Var(1(eps)), {gamma}, Fun(1(0(eps)), []))"))) == "true"
    assert print_term(q_value(q(f"eqsubst(Var(1(0(eps))), {gamma}, Fun(1(0(eps)), []))"))) == "false"
    assert print_term(q_value(q(f"eqsubst(Fun(1(0(eps)), []), {gamma}, Var(1(eps)))"))) == "false"
    # subst returns the matching start argument itself, never a new term
    bs = "Fun(1(1(eps)), Fun(1(0(eps)), []) :: []) :: []"
    got = q_value(q(f"subst(Var(1(eps)), {gamma}, {bs})"))
    assert print_term(got) == "Fun(1(0(eps)), [])"
    assert print_term(q_value(q(f"subst(Var(1(0(eps))), {gamma}, {bs})"))) == "bot"


def test_defined_symbol_check():
    rules = "Rule(Fun(1(1(eps)), Var(1(eps)) :: []), Var(1(eps)), empty)"
    assert print_term(q_value(q(f"defined(1(1(eps)), {rules})"))) == "true"
    assert print_term(q_value(q(f"defined(1(eps), {rules})"))) == "false"


def test_preconditions():
    grow = trs_of("sort d; cons c : d; cons s : [d] => d; fun f : [d] => d; rule f(x) -> s(x);")
    with pytest.raises(PreconditionFailure):
        interpret(grow, parse_term("f(c)", grow))
    ho = trs_of(HO_SRC + "rule ap(F, x) -> F x;")
    with pytest.raises(PreconditionFailure):
        interpret(ho, parse_term("ap(\\x:d. x, c)", ho))
    r_not = trs_of(NOT_SRC)
    with pytest.raises(PreconditionFailure):
        interpret(r_not, parse_term("not(not(true))", r_not))
    with pytest.raises(PreconditionFailure):
        interpret(r_not, parse_term("true", r_not))


def test_interpreter_fuel_exhaustion():
    r_not = trs_of(NOT_SRC)
    with pytest.raises(FuelExhausted):
        interpret(r_not, parse_term("not(true)", r_not), fuel=5)


def test_simulation_term_shape():
    r_not = trs_of(NOT_SRC)
    s = simulation_term(r_not, parse_term("not(true)", r_not))
    assert s.symbol.name == "normalform"
    assert s.args[1] == encode_term(parse_term("not(true)", r_not))
    assert print_term(s.args[1]) == f"Fun({print_term(bit_encode(3))}, Fun(1(eps), []) :: [])"
