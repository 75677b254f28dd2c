import pytest
from hypothesis import given, settings, strategies as st

from consfree.interpreter import build_Q, q_source
from consfree.syntax import (
    ParseError,
    SourceFile,
    parse_term,
    parse_trs,
    print_term,
    print_trs,
    tokenize,
)
from consfree.terms import Abs, Base, FunApp, Kind, alpha_eq

from conftest import NOT_SRC, trs_of


def diag(text):
    with pytest.raises(ParseError) as info:
        parse_trs(SourceFile(text, "bad.trs"))
    return info.value.diagnostics


def test_parse_not(r_not):
    assert len(r_not.rules) == 1 + 1
    assert [r.index for r in r_not.rules] == [1, 2]
    assert r_not.symbol("true").kind is Kind.CONSTRUCTOR
    assert r_not.symbol("not").kind is Kind.DEFINED
    assert [s.index for s in r_not.symbols] == [1, 2, 3]


def test_single_rule_file():
    trs = trs_of("sort bool; cons true : bool; cons false : bool;\n"
                 "fun not : [bool] => bool; rule not(true) -> false;")
    assert len(trs.rules) == 1


def test_lhs_argument_must_be_constructor_term():
    (d,) = diag("sort d; cons c : d; fun f : [d] => d; fun g : [d] => d;\n"
                "rule f(g(x)) -> x;")
    assert "lhs argument not a constructor term" in d.message
    assert (d.path, d.line) == ("bad.trs", 2)
    assert str(d).startswith("bad.trs:2:")


def test_unbound_rhs_variable():
    (d,) = diag("sort d; cons c : d; fun f : [d] => d;\nrule f(x) -> y;")
    assert "unbound rhs variable 'y'" in d.message
    assert (d.line, d.col) == (2, 14)


def test_several_diagnostics_collected():
    ds = diag("sort d; cons c : d; fun f : [d] => d;\n"
              "rule f(x) -> y;\n"
              "rule f(c, c) -> c;\n"
              "cons e : nosuch;\n")
    messages = [d.message for d in ds]
    assert len(ds) == 3
    assert "arity mismatch" in messages[1]
    assert "unknown sort" in messages[2]


def test_type_error_reported():
    (d,) = diag("sort a; sort b; cons x : a; cons y : b; fun f : [a] => a;\nrule f(z) -> y;")
    assert "type" in d.message


def test_parse_terms(r_not):
    t = parse_term("not(true)", r_not)
    assert isinstance(t, FunApp) and t.symbol.name == "not"
    assert t.args[0].symbol.name == "true"


def test_parse_lambda():
    q = build_Q()
    t = parse_term("\\x:bitstring. bot", q)
    assert isinstance(t, Abs) and t.binder_type == Base("bitstring")
    assert print_term(t) == "\\x:bitstring. bot"


def test_free_variable_rejected(r_not):
    with pytest.raises(ParseError) as info:
        parse_term("not(x)", r_not)
    assert "unbound variable 'x'" in info.value.diagnostics[0].message


def test_aliases_match_ascii():
    q = build_Q()
    assert parse_term("Var(▷)", q) == parse_term("Var(eps)", q)
    assert parse_term("⊥", q) == parse_term("bot", q)
    assert parse_term("∅", q) == parse_term("empty", q)


def test_list_printing_is_infix_and_right_associative():
    q = build_Q()
    t = parse_term("Var(1(eps)) :: Var(0(eps)) :: []", q)
    assert t.symbol.name == "::" and t.args[1].symbol.name == "::"
    assert print_term(t) == "Var(1(eps)) :: Var(0(eps)) :: []"
    nested = parse_term("Fun(1(eps), Var(1(eps)) :: []) :: []", q)
    assert nested.args[0].symbol.name == "Fun"
    assert print_term(nested) == "Fun(1(eps), Var(1(eps)) :: []) :: []"


def test_comments_and_positions():
    toks = tokenize("-- note\nsort d; -- trailing\n", "f")
    kinds = [t.kind for t in toks]
    assert "ident" in kinds
    first = next(t for t in toks if t.kind == "ident")
    assert (first.line, first.col) == (2, 1)


def test_print_trs_round_trip(r_not):
    again = trs_of(print_trs(r_not))
    assert print_trs(again) == print_trs(r_not)


def test_q_source_round_trip():
    q = build_Q()
    again = trs_of(print_trs(q))
    assert len(again.rules) == len(q.rules)
    for a, b in zip(q.rules, again.rules):
        assert alpha_eq(a.lhs, b.lhs) and alpha_eq(a.rhs, b.rhs)
    assert [s.index for s in again.symbols] == [s.index for s in q.symbols]
    assert q_source().startswith("--")


# random Q-level terms: print then parse gives the same term
def _q_terms():
    q = build_Q()
    sym = q.symbol
    leaf = st.sampled_from(["eps", "[]", "bot", "empty", "true", "false"]).map(
        lambda n: FunApp(sym(n), ())
    )

    def bits():
        return st.recursive(st.just(FunApp(sym("eps"), ())),
                            lambda s: st.tuples(st.sampled_from("01"), s).map(
                                lambda p: FunApp(sym(p[0]), [p[1]])), max_leaves=5)

    term = st.deferred(lambda: st.one_of(
        st.just(FunApp(sym("bot"), ())),
        bits().map(lambda b: FunApp(sym("Var"), [b])),
        st.tuples(bits(), tlist).map(lambda p: FunApp(sym("Fun"), list(p))),
    ))
    tlist = st.deferred(lambda: st.one_of(
        st.just(FunApp(sym("[]"), ())),
        st.tuples(term, tlist).map(lambda p: FunApp(sym("::"), list(p))),
    ))
    return st.one_of(leaf, term, tlist)


@settings(max_examples=300, deadline=None)
@given(_q_terms())
def test_print_parse_round_trip(t):
    q = build_Q()
    assert parse_term(print_term(t), q) == t
