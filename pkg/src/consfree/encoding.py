"""Encoding first-order systems and terms as data over a fixed signature.

Numbers are bitstrings ``1(0(1(eps)))`` read most significant bit first,
without leading zeros; index 0 is never used so ``eps`` alone stays free as
the "no variable" marker.  Object symbols are numbered by their signature
index, rule variables by first occurrence in the lhs.
"""
from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    Abs,
    App,
    Base,
    FunApp,
    FunctionSymbol,
    Kind,
    Rule,
    Term,
    Trs,
    TypeDecl,
    Var,
    variables,
)


class EncodingError(ValueError):
    """Malformed encoding, or a construct the encoding does not cover."""


BITSTRING = Base("bitstring")
TERM = Base("term")
TERMLIST = Base("termlist")
RULES = Base("rules")
BOOL = Base("bool")

INTERPRETER_SORTS = ("bitstring", "term", "termlist", "rules", "bool")


def _cons(name, args, result, index):
    return FunctionSymbol(name, TypeDecl(tuple(args), result), Kind.CONSTRUCTOR, index)


ZERO = _cons("0", [BITSTRING], BITSTRING, 1)
ONE = _cons("1", [BITSTRING], BITSTRING, 2)
EPS = _cons("eps", [], BITSTRING, 3)
NIL = _cons("[]", [], TERMLIST, 4)
CONS = _cons("::", [TERM, TERMLIST], TERMLIST, 5)
VAR = _cons("Var", [BITSTRING], TERM, 6)
FUN = _cons("Fun", [BITSTRING, TERMLIST], TERM, 7)
BOT = _cons("bot", [], TERM, 8)
EMPTY = _cons("empty", [], RULES, 9)
RULE = _cons("Rule", [TERM, TERM, RULES], RULES, 10)
TRUE = _cons("true", [], BOOL, 11)
FALSE = _cons("false", [], BOOL, 12)

INTERPRETER_CONSTRUCTORS = (ZERO, ONE, EPS, NIL, CONS, VAR, FUN, BOT, EMPTY, RULE, TRUE, FALSE)

EPS_T = FunApp(EPS, ())
NIL_T = FunApp(NIL, ())
BOT_T = FunApp(BOT, ())
EMPTY_T = FunApp(EMPTY, ())
TRUE_T = FunApp(TRUE, ())
FALSE_T = FunApp(FALSE, ())


class _Bottom:
    """The interpreter's answer for a normal form that is not a data term."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Bottom"


BOTTOM = _Bottom()


# ---------------------------------------------------------------------------
# Bitstrings


def bit_encode(i: int) -> Term:
    if i < 1:
        raise EncodingError(f"only positive integers are encoded, got {i}")
    t = EPS_T
    for ch in reversed(bin(i)[2:]):
        t = FunApp(ONE if ch == "1" else ZERO, (t,))
    return t


def bit_decode(t: Term) -> int:
    bits = []
    while isinstance(t, FunApp) and t.symbol.name in ("0", "1"):
        bits.append(t.symbol.name)
        t = t.args[0]
    if not (isinstance(t, FunApp) and t.symbol.name == "eps"):
        raise EncodingError("bitstring must end in eps")
    if not bits:
        raise EncodingError("empty bitstring encodes no number")
    if bits[0] == "0":
        raise EncodingError("leading zero")
    return int("".join(bits), 2)


def bits_of(t: Term) -> str:
    """The raw 0/1 string of any bitstring term, leading zeros allowed."""
    out = []
    while isinstance(t, FunApp) and t.symbol.name in ("0", "1"):
        out.append(t.symbol.name)
        t = t.args[0]
    if not (isinstance(t, FunApp) and t.symbol.name == "eps"):
        raise EncodingError("bitstring must end in eps")
    return "".join(out)


def bitstring(s: str) -> Term:
    """Any 0/1 string as a bitstring term (no uniqueness requirement)."""
    t = EPS_T
    for ch in reversed(s):
        t = FunApp(ONE if ch == "1" else ZERO, (t,))
    return t


# ---------------------------------------------------------------------------
# Terms and systems


@dataclass(frozen=True)
class SymbolTable:
    """Symbol index <-> symbol, for one object signature."""

    by_index: dict

    @classmethod
    def of(cls, trs: Trs) -> "SymbolTable":
        table = {}
        for s in trs.symbols:
            if s.index < 1 or s.index in table:
                raise EncodingError(f"symbol {s.name} has a duplicate or non-positive index")
            table[s.index] = s
        return cls(table)

    def symbol(self, index: int) -> FunctionSymbol:
        try:
            return self.by_index[index]
        except KeyError:
            raise EncodingError(f"no symbol with index {index}") from None


def rule_variable_numbering(rule: Rule) -> dict:
    numbering: dict = {}
    for v in variables(rule.lhs):
        numbering.setdefault(v.name, len(numbering) + 1)
    return numbering


def term_list(items) -> Term:
    t = NIL_T
    for item in reversed(list(items)):
        t = FunApp(CONS, (item, t))
    return t


def list_items(t: Term) -> list:
    out = []
    while isinstance(t, FunApp) and t.symbol.name == "::":
        out.append(t.args[0])
        t = t.args[1]
    if not (isinstance(t, FunApp) and t.symbol.name == "[]"):
        raise EncodingError("malformed term list")
    return out


def encode_term(s: Term, numbering: dict = None) -> Term:
    """``x_i -> Var(<i>)``, ``f_i(s1..sn) -> Fun(<i>, <s1> :: ... :: [])``."""
    if isinstance(s, Var):
        if numbering is None or s.name not in numbering:
            raise EncodingError(f"variable {s.name} has no number")
        return FunApp(VAR, (bit_encode(numbering[s.name]),))
    if isinstance(s, (Abs, App)):
        raise EncodingError("higher-order terms cannot be encoded")
    return FunApp(
        FUN,
        (bit_encode(s.symbol.index), term_list(encode_term(a, numbering) for a in s.args)),
    )


def decode_term(t: Term, table: SymbolTable):
    """Inverse of :func:`encode_term` on ground encodings; ``bot`` gives BOTTOM."""
    if isinstance(t, FunApp) and t.symbol.name == "bot":
        return BOTTOM
    return _decode(t, table)


def _decode(t: Term, table: SymbolTable) -> Term:
    if not isinstance(t, FunApp):
        raise EncodingError("encodings are ground constructor terms")
    name = t.symbol.name
    if name == "Var":
        if isinstance(t.args[0], FunApp) and t.args[0].symbol.name == "eps":
            raise EncodingError("Var(eps) is not a representation of any term")
        raise EncodingError("variables do not occur in ground encodings")
    if name != "Fun":
        raise EncodingError(f"unexpected {name} in a term encoding")
    sym = table.symbol(bit_decode(t.args[0]))
    args = [_decode(a, table) for a in list_items(t.args[1])]
    if len(args) != sym.arity:
        raise EncodingError(f"{sym.name} applied to {len(args)} arguments")
    return FunApp(sym, args)


def is_first_order_rule(rule: Rule) -> bool:
    from .terms import subterms

    return not any(isinstance(s, (Abs, App)) for s in subterms(rule.rhs))


def encode_rule(rule: Rule) -> tuple:
    if not is_first_order_rule(rule):
        raise EncodingError(f"rule {rule.index} is higher-order")
    numbering = rule_variable_numbering(rule)
    return encode_term(rule.lhs, numbering), encode_term(rule.rhs, numbering)


def declaration_entry(sym: FunctionSymbol) -> tuple:
    """A never-matching entry marking ``sym`` as defined.

    Its lhs lists one argument more than ``sym`` takes, so no term matches it;
    its rhs ``Var(eps)`` is skipped by the rhs search.
    """
    lhs = FunApp(FUN, (bit_encode(sym.index),
                       term_list(FunApp(VAR, (bit_encode(i),)) for i in range(1, sym.arity + 2))))
    return lhs, FunApp(VAR, (EPS_T,))


def encode_trs(trs: Trs) -> Term:
    """The rules in order, then one declaration entry per rule-less defined symbol."""
    entries = [encode_rule(rule) for rule in trs.rules]
    heads = {rule.head.name for rule in trs.rules}
    entries += [declaration_entry(s) for s in trs.defined if s.name not in heads]
    t = EMPTY_T
    for lhs, rhs in reversed(entries):
        t = FunApp(RULE, (lhs, rhs, t))
    return t


def interpreter_signature() -> Trs:
    return Trs(INTERPRETER_SORTS, INTERPRETER_CONSTRUCTORS, ())
