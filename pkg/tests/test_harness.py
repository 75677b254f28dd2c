import pytest

from consfree.analysis import check_all
from consfree.encoding import BOTTOM
from consfree.engine import normalize
from consfree.harness import (
    GenParams,
    Verdict,
    bottom_corpus,
    difftest,
    gen_object_trs,
    gen_start_term,
    golden_corpus,
    run_case,
)
from consfree.syntax import parse_term, print_trs
from consfree.terms import is_data_term, type_order

from conftest import trs_of


def test_params_validated():
    with pytest.raises(ValueError):
        GenParams(max_rules=0)


def test_generated_systems_satisfy_preconditions():
    for k in range(200):
        p = GenParams(seed=3, max_symbols=4, max_rules=3, max_depth=3).for_case(k)
        trs = gen_object_trs(p)
        assert all(r.passed for r in check_all(trs)), print_trs(trs)
        assert type_order(trs) <= 1
        start = gen_start_term(trs, p)
        assert not start.symbol.is_constructor
        assert all(is_data_term(a) for a in start.args)


def test_generated_systems_terminate():
    for k in range(200):
        p = GenParams(seed=11).for_case(k)
        trs = gen_object_trs(p)
        assert not normalize(trs, gen_start_term(trs, p), 100_000).exhausted


def test_tiny_bounds():
    trs = gen_object_trs(GenParams(seed=1, max_symbols=2, max_rules=2, max_depth=1, max_arity=1))
    assert len(trs.constructors) == 2
    assert len(trs.rules) <= 2 * len(trs.defined)
    assert all(r.passed for r in check_all(trs))


def test_generation_is_reproducible():
    p = GenParams(seed=5).for_case(17)
    assert print_trs(gen_object_trs(p)) == print_trs(gen_object_trs(p))
    assert gen_start_term(gen_object_trs(p), p) == gen_start_term(gen_object_trs(p), p)


def test_start_term_shapes():
    trs = trs_of("sort d; cons c0 : d; cons c1 : [d] => d; fun f : [d] => d; fun h : d;")
    seen = set()
    for k in range(100):
        seen.add(repr(gen_start_term(trs, GenParams(seed=k, max_depth=1))))
    assert "<FunApp h>" in seen
    assert "<FunApp f(c1(c0))>" in seen


def test_rule_less_symbol_case_agrees():
    trs = trs_of("sort d; cons c : d; fun f : [d] => d; fun g : [d] => d; rule f(x) -> g(x);")
    case = run_case("x", trs, parse_term("f(c)", trs), 1000, 1_000_000)
    assert case.verdict is Verdict.AGREE
    assert case.oracle.startswith("nondata:") and case.interp == "Bottom"


def test_fuel_limited_case_is_inconclusive():
    loop = trs_of("sort d; cons c : d; fun f : [d] => d; rule f(x) -> f(x);")
    case = run_case("loop", loop, parse_term("f(c)", loop), 100, 1000)
    assert case.verdict is Verdict.BOTH_EXHAUSTED and case.verdict.inconclusive


def test_bottom_corpus_oracle_is_non_data():
    systems = bottom_corpus()
    assert len(systems) == 5
    for name, trs, start in systems:
        assert not is_data_term(normalize(trs, start, 1000).term), name


def test_small_difftest():
    report = difftest(GenParams(seed=9), 30, include_golden=True, assert_bsafe=True)
    assert report.disagreements == 0
    assert len(report.cases) == 30 + sum(len(s) for _, _, s in golden_corpus())
    for case in report.cases:
        if case.verdict is Verdict.AGREE:
            assert case.interp_steps >= case.oracle_steps
    text = report.render()
    assert text.startswith("# difftest seed=9 cases=30")
    assert "Disagree=0" in text.splitlines()[-1]


def test_workers_give_the_same_report():
    p = GenParams(seed=2)
    assert difftest(p, 8, workers=2).render() == difftest(p, 8).render()


def test_interp_result_of_bottom():
    name, trs, start = bottom_corpus()[0]
    case = run_case(name, trs, start, 1000, 1_000_000)
    assert case.interp == repr(BOTTOM)
