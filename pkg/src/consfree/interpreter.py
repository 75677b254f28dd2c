"""A second-order cons-free program that interprets first-order cons-free systems.

``normalform(R, <w>)`` reduces to ``<nf(w)>`` when the normal form of ``w``
is a data term and to ``bot`` otherwise.  Intermediate object terms are never
built: the program works on pairs of an encoded rule subterm and a
substitution ``gamma : bitstring => term``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Optional

from .analysis import check_cons_free, check_orthogonal, compute_B
from .encoding import (
    BOTTOM,
    EncodingError,
    SymbolTable,
    decode_term,
    encode_term,
    encode_trs,
    is_first_order_rule,
)
from .engine import DEFAULT_FUEL, FuelExhausted, Normalization, normalize
from .syntax import SourceFile, parse_trs
from .terms import FunApp, Term, Trs, is_data_term, type_order

_HEADER = """\
-- Interpreter for first-order cons-free constructor systems.
sort bitstring;
sort term;
sort termlist;
sort rules;
sort bool;

cons 0 : [bitstring] => bitstring;
cons 1 : [bitstring] => bitstring;
cons eps : bitstring;
cons [] : termlist;
cons :: : [term * termlist] => termlist;
cons Var : [bitstring] => term;
cons Fun : [bitstring * termlist] => term;
cons bot : term;
cons empty : rules;
cons Rule : [term * term * rules] => rules;
cons true : bool;
cons false : bool;

fun normalform : [rules * term] => term;
fun normalise : [term * (bitstring => term) * rules * termlist] => term;
fun findrule : [term * (bitstring => term) * rules * rules * termlist] => term;
fun test : [(bitstring => term) * term * (bitstring => term) * term * term * rules * rules * termlist] => term;
fun test2 : [term * (bitstring => term) * term * (bitstring => term) * term * term * rules * rules * termlist] => term;
fun eqbits : [bitstring * bitstring] => bool;
fun eqsubst : [term * (bitstring => term) * term] => bool;
fun eqcheck : [bool * termlist * (bitstring => term) * termlist] => bool;
fun substitute : [term * (bitstring => term) * termlist * rules] => term;
fun subst : [term * (bitstring => term) * termlist] => term;
fun subst2 : [bool * term * term * (bitstring => term) * termlist] => term;
fun subst3 : [term * term * (bitstring => term) * termlist] => term;
fun substcheckbs : [term * term * (bitstring => term) * rules] => term;
fun substkind : [bool * term * (bitstring => term) * rules] => term;
fun defined : [bitstring * rules] => bool;
fun defined2 : [bool * bitstring * rules] => bool;
fun substR : [term * (bitstring => term) * rules] => term;
fun substR2 : [term * term * (bitstring => term) * rules] => term;
fun substone : [term * (bitstring => term) * term] => term;
fun substone2 : [bool * term * term * (bitstring => term)] => term;
fun match : [term * (bitstring => term) * term * (bitstring => term) * rules * termlist] => (bitstring => term);
fun matchcheck : [bool * termlist * (bitstring => term) * termlist * (bitstring => term) * rules * termlist] => (bitstring => term);
fun matchall : [termlist * (bitstring => term) * termlist * (bitstring => term) * rules * termlist] => (bitstring => term);
fun instantiate : [term * term * (bitstring => term)] => (bitstring => term);
fun install : [bool * termlist * termlist * (bitstring => term)] => (bitstring => term);
fun ifelse : [bool * term * term] => term;
"""

_DRIVER = """\
-- normalise w under gamma: substitute if w is a variable, else look for a rule
rule normalform(R, Fun(f, args)) -> normalise(Fun(f, args), \\x:bitstring. bot, R, args);
rule normalise(Var(x), gamma, R, bs) -> gamma x;
rule normalise(Fun(f, args), gamma, R, bs) -> findrule(Fun(f, args), gamma, R, R, bs);
rule findrule(w, gamma, empty, R, bs) -> substitute(w, gamma, bs, R);
rule findrule(w, gamma, Rule(l, r, tl), R, bs) -> test(match(w, gamma, l, \\x:bitstring. bot, R, bs), w, gamma, l, r, tl, R, bs);
rule test(delta, w, gamma, l, r, tl, R, bs) -> test2(delta eps, delta, w, gamma, l, r, tl, R, bs);
rule test2(bot, delta, w, gamma, l, r, tl, R, bs) -> normalise(r, delta, R, bs);
rule test2(Var(eps), delta, w, gamma, l, r, tl, R, bs) -> findrule(w, gamma, tl, R, bs);
"""

_EQUALITY = """\
rule eqsubst(Var(x), gamma, t) -> eqsubst(gamma x, \\y:bitstring. bot, t);
rule eqsubst(bot, gamma, t) -> false;
rule eqsubst(Fun(f, as), gamma, Var(y)) -> false;
rule eqsubst(Fun(f, as), gamma, Fun(g, bs)) -> eqcheck(eqbits(f, g), as, gamma, bs);
rule eqcheck(false, as, gamma, bs) -> false;
rule eqcheck(true, [], gamma, []) -> true;
rule eqcheck(true, s :: ss, gamma, t :: ts) -> eqcheck(eqsubst(s, gamma, t), ss, gamma, ts);
"""

# Search the start arguments for a data term equal to w gamma; failing that,
# give bot if w is headed by a defined symbol, else search every rule rhs.
_SUBSTITUTE = """\
rule substitute(w, gamma, bs, R) -> substcheckbs(subst(w, gamma, bs), w, gamma, R);
rule subst(w, gamma, []) -> bot;
rule subst(w, gamma, b :: bs) -> subst2(eqsubst(w, gamma, b), b, w, gamma, bs);
rule subst2(true, b, w, gamma, bs) -> b;
rule subst2(false, Fun(f, as), w, gamma, bs) -> subst3(subst(w, gamma, as), w, gamma, bs);
rule subst2(false, Var(y), w, gamma, bs) -> subst(w, gamma, bs);
rule subst3(bot, w, gamma, bs) -> subst(w, gamma, bs);
rule subst3(Fun(f, as), w, gamma, bs) -> Fun(f, as);
rule substcheckbs(Fun(f, as), w, gamma, R) -> Fun(f, as);
rule substcheckbs(bot, Fun(f, as), gamma, R) -> substkind(defined(f, R), Fun(f, as), gamma, R);
rule substkind(true, w, gamma, R) -> bot;
rule substkind(false, w, gamma, R) -> substR(w, gamma, R);
rule defined(f, empty) -> false;
rule defined(f, Rule(Fun(g, ts), r, tl)) -> defined2(eqbits(f, g), f, tl);
rule defined2(true, f, tl) -> true;
rule defined2(false, f, tl) -> defined(f, tl);
rule substR(w, gamma, empty) -> bot;
rule substR(w, gamma, Rule(l, r, tl)) -> substR2(substone(w, gamma, r), w, gamma, tl);
rule substR2(bot, w, gamma, tl) -> substR(w, gamma, tl);
rule substR2(Fun(f, as), w, gamma, tl) -> Fun(f, as);
rule substone(w, gamma, b) -> substone2(eqsubst(w, gamma, b), b, w, gamma);
rule substone2(true, b, w, gamma) -> b;
rule substone2(false, Fun(f, as), w, gamma) -> subst(w, gamma, as);
rule substone2(false, Var(y), w, gamma) -> bot;
"""

_MATCH = """\
rule match(Fun(f, ss), gamma, Fun(g, ts), delta, R, bs) -> matchcheck(eqbits(f, g), ss, gamma, ts, delta, R, bs);
rule matchcheck(false, ss, gamma, ts, delta, R, bs) -> \\x:bitstring. Var(eps);
rule matchcheck(true, ss, gamma, ts, delta, R, bs) -> matchall(ss, gamma, ts, delta, R, bs);
rule matchall([], gamma, [], delta, R, bs) -> delta;
rule matchall([], gamma, t :: ts, delta, R, bs) -> \\x:bitstring. Var(eps);
rule matchall(s :: ss, gamma, [], delta, R, bs) -> \\x:bitstring. Var(eps);
rule matchall(s :: ss, gamma, t :: ts, delta, R, bs) -> matchall(ss, gamma, ts, instantiate(normalise(s, gamma, R, bs), t, delta), R, bs);
rule instantiate(w, Var(y), delta) -> \\x:bitstring. ifelse(eqbits(x, y), w, delta x);
rule instantiate(bot, Fun(g, ts), delta) -> \\x:bitstring. Var(eps);
rule instantiate(Fun(f, ss), Fun(g, ts), delta) -> install(eqbits(f, g), ss, ts, delta);
rule install(false, ss, ts, delta) -> \\x:bitstring. Var(eps);
rule install(true, [], [], delta) -> delta;
rule install(true, s :: ss, t :: ts, delta) -> install(true, ss, ts, instantiate(s, t, delta));
rule ifelse(true, x, y) -> x;
rule ifelse(false, x, y) -> y;
"""


def _eqbits_rules() -> str:
    lines = ["rule eqbits(eps, eps) -> true;"]
    for b in "01":
        lines.append(f"rule eqbits(eps, {b}(ys)) -> false;")
    for a in "01":
        lines.append(f"rule eqbits({a}(xs), eps) -> false;")
    for a, b in product("01", repeat=2):
        rhs = "eqbits(xs, ys)" if a == b else "false"
        lines.append(f"rule eqbits({a}(xs), {b}(ys)) -> {rhs};")
    return "\n".join(lines) + "\n"


def q_source() -> str:
    return "\n".join([_HEADER, _DRIVER, _eqbits_rules(), _EQUALITY, _SUBSTITUTE, _MATCH])


@lru_cache(maxsize=None)
def build_Q() -> Trs:
    return parse_trs(SourceFile(q_source(), "<interpreter>"))


# ---------------------------------------------------------------------------
# Running the interpreter


class PreconditionFailure(ValueError):
    """The object system or start term is outside what the interpreter handles."""


class MalformedOutput(RuntimeError):
    """The interpreter produced something that is not an encoding."""


@dataclass
class InterpretRun:
    result: object  # Term or BOTTOM
    normalization: Normalization
    start: Term

    @property
    def steps(self) -> int:
        return self.normalization.steps


def check_object_system(trs: Trs) -> None:
    if type_order(trs) > 1:
        raise PreconditionFailure("object system must be first-order")
    for rule in trs.rules:
        if not is_first_order_rule(rule):
            raise PreconditionFailure(f"rule {rule.index} is not first-order")
    for report in (check_cons_free(trs), check_orthogonal(trs)):
        if not report.passed:
            raise PreconditionFailure(report.render())


def check_basic_term(t: Term) -> None:
    if not (isinstance(t, FunApp) and not t.symbol.is_constructor):
        raise PreconditionFailure("start term must be a defined symbol applied to data")
    if not all(is_data_term(a) for a in t.args):
        raise PreconditionFailure("start term arguments must be data terms")


def simulation_term(trs: Trs, start: Term) -> Term:
    q = build_Q()
    return FunApp(q.symbol("normalform"), (encode_trs(trs), encode_term(start)))


def interpret_run(
    trs: Trs,
    start: Term,
    fuel: int = DEFAULT_FUEL,
    assert_bsafe: bool = False,
    trace: bool = False,
    checked: bool = True,
) -> InterpretRun:
    if checked:
        check_object_system(trs)
        check_basic_term(start)
    q = build_Q()
    s = simulation_term(trs, start)
    b = compute_B(s, q) if assert_bsafe else None
    run = normalize(q, s, fuel, b_check=b, trace=trace)
    if run.exhausted:
        raise FuelExhausted(run.steps, run.term)
    if not is_data_term(run.term):
        raise MalformedOutput(f"interpreter stopped at a non-data term after {run.steps} steps")
    try:
        result = decode_term(run.term, SymbolTable.of(trs))
    except EncodingError as e:
        raise MalformedOutput(str(e)) from e
    return InterpretRun(result, run, s)


def interpret(trs: Trs, start: Term, fuel: int = DEFAULT_FUEL, assert_bsafe: bool = False):
    """The data normal form of ``start`` computed through the interpreter, or BOTTOM."""
    return interpret_run(trs, start, fuel, assert_bsafe).result


def eqbits_term(u: Term, v: Term) -> Term:
    return FunApp(build_Q().symbol("eqbits"), (u, v))


def q_value(t: Term, fuel: int = DEFAULT_FUEL, b_check: Optional[frozenset] = None) -> Term:
    """Normal form of a Q term, raising on exhaustion."""
    run = normalize(build_Q(), t, fuel, b_check=b_check)
    if run.exhausted:
        raise FuelExhausted(run.steps, run.term)
    return run.term


__all__ = [
    "BOTTOM",
    "InterpretRun",
    "MalformedOutput",
    "PreconditionFailure",
    "build_Q",
    "interpret",
    "interpret_run",
    "q_source",
]
