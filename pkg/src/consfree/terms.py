"""Simple types, signatures, terms and substitutions.

Terms are immutable after construction.  Every node caches its hash and its
set of free variable names, which keeps substitution into closed subterms and
set membership cheap during long reductions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence, Union

_EMPTY: frozenset = frozenset()


class TermError(Exception):
    """Raised for ill-formed or ill-typed terms."""


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arrow:
    domain: "SimpleType"
    codomain: "SimpleType"

    def __str__(self) -> str:
        dom = f"({self.domain})" if isinstance(self.domain, Arrow) else str(self.domain)
        return f"{dom} => {self.codomain}"


SimpleType = Union[Base, Arrow]


@dataclass(frozen=True)
class TypeDecl:
    """``[arg_types[0] * ... * arg_types[n-1]] => result``."""

    arg_types: tuple = ()
    result: SimpleType = Base("o")

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    def curried(self) -> SimpleType:
        ty = self.result
        for arg in reversed(self.arg_types):
            ty = Arrow(arg, ty)
        return ty

    def __str__(self) -> str:
        if not self.arg_types:
            return str(self.result)
        res = f"({self.result})" if isinstance(self.result, Arrow) else str(self.result)
        args = " * ".join(f"({a})" if isinstance(a, Arrow) else str(a) for a in self.arg_types)
        return f"[{args}] => {res}"


def sorts_of(ty: SimpleType) -> Iterator[str]:
    if isinstance(ty, Base):
        yield ty.name
    else:
        yield from sorts_of(ty.domain)
        yield from sorts_of(ty.codomain)


class Kind(enum.Enum):
    CONSTRUCTOR = "cons"
    DEFINED = "fun"


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    decl: TypeDecl
    kind: Kind
    index: int

    @property
    def arity(self) -> int:
        return self.decl.arity

    @property
    def is_constructor(self) -> bool:
        return self.kind is Kind.CONSTRUCTOR

    def __str__(self) -> str:
        return self.name


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ("_hash", "fv")

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        from .syntax import print_term

        return f"<{type(self).__name__} {print_term(self)}>"


class Var(Term):
    __hash__ = Term.__hash__
    __slots__ = ("name", "type")

    def __init__(self, name: str, type: SimpleType):
        self.name = name
        self.type = type
        self.fv = frozenset((name,))
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return self is other or (
            type(other) is Var and self.name == other.name and self.type == other.type
        )


class Abs(Term):
    __hash__ = Term.__hash__
    __slots__ = ("binder", "binder_type", "body")

    def __init__(self, binder: str, binder_type: SimpleType, body: Term):
        self.binder = binder
        self.binder_type = binder_type
        self.body = body
        self.fv = body.fv - {binder} if binder in body.fv else body.fv
        self._hash = hash(("abs", binder, body._hash))

    def __eq__(self, other):
        return self is other or (
            type(other) is Abs
            and self._hash == other._hash
            and self.binder == other.binder
            and self.binder_type == other.binder_type
            and self.body == other.body
        )


class App(Term):
    __hash__ = Term.__hash__
    __slots__ = ("fun", "arg")

    def __init__(self, fun: Term, arg: Term):
        self.fun = fun
        self.arg = arg
        self.fv = fun.fv | arg.fv if arg.fv else fun.fv
        self._hash = hash(("app", fun._hash, arg._hash))

    def __eq__(self, other):
        return self is other or (
            type(other) is App
            and self._hash == other._hash
            and self.fun == other.fun
            and self.arg == other.arg
        )


class FunApp(Term):
    __hash__ = Term.__hash__
    __slots__ = ("symbol", "args")

    def __init__(self, symbol: FunctionSymbol, args: Sequence[Term] = ()):
        args = tuple(args)
        self.symbol = symbol
        self.args = args
        fv = _EMPTY
        for a in args:
            if a.fv:
                fv = fv | a.fv
        self.fv = fv
        self._hash = hash((symbol.name, tuple(a._hash for a in args)))

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not FunApp or self._hash != other._hash:
            return False
        if self.symbol.name != other.symbol.name or len(self.args) != len(other.args):
            return False
        return all(a == b for a, b in zip(self.args, other.args))


@dataclass(frozen=True)
class Rule:
    lhs: FunApp
    rhs: Term
    index: int = 0

    @property
    def head(self) -> FunctionSymbol:
        return self.lhs.symbol


@dataclass(frozen=True)
class Trs:
    sorts: tuple
    symbols: tuple
    rules: tuple = field(default=())

    @cached_property
    def by_name(self) -> dict:
        return {s.name: s for s in self.symbols}

    def symbol(self, name: str) -> FunctionSymbol:
        return self.by_name[name]

    @property
    def constructors(self) -> list:
        return [s for s in self.symbols if s.is_constructor]

    @property
    def defined(self) -> list:
        return [s for s in self.symbols if not s.is_constructor]

    @cached_property
    def rules_by_head(self) -> dict:
        table: dict = {}
        for rule in self.rules:
            table.setdefault(rule.head.name, []).append(rule)
        return {k: tuple(v) for k, v in table.items()}

    def with_rules(self, rules: Sequence[Rule]) -> "Trs":
        return Trs(self.sorts, self.symbols, tuple(rules))


# ---------------------------------------------------------------------------
# Queries


def type_order(ty: Union[SimpleType, TypeDecl, Trs]) -> int:
    """Order of a type; declarations use their curried type, systems the max."""
    if isinstance(ty, Trs):
        return max((type_order(s.decl) for s in ty.symbols), default=0)
    if isinstance(ty, TypeDecl):
        return type_order(ty.curried())
    if isinstance(ty, Base):
        return 0
    return max(type_order(ty.domain) + 1, type_order(ty.codomain))


def type_of(t: Term) -> SimpleType:
    if isinstance(t, Var):
        return t.type
    if isinstance(t, FunApp):
        return t.symbol.decl.result
    if isinstance(t, Abs):
        return Arrow(t.binder_type, type_of(t.body))
    fty = type_of(t.fun)
    if not isinstance(fty, Arrow):
        raise TermError(f"applying a term of base type {fty}")
    return fty.codomain


def check_well_typed(t: Term) -> SimpleType:
    """Full type check; raises TermError on the first problem."""
    if isinstance(t, Var):
        return t.type
    if isinstance(t, FunApp):
        decl = t.symbol.decl
        if len(t.args) != decl.arity:
            raise TermError(
                f"{t.symbol.name} expects {decl.arity} arguments, got {len(t.args)}"
            )
        for i, (arg, expected) in enumerate(zip(t.args, decl.arg_types), 1):
            got = check_well_typed(arg)
            if got != expected:
                raise TermError(
                    f"argument {i} of {t.symbol.name} has type {got}, expected {expected}"
                )
        return decl.result
    if isinstance(t, Abs):
        return Arrow(t.binder_type, check_well_typed(t.body))
    fty = check_well_typed(t.fun)
    aty = check_well_typed(t.arg)
    if not isinstance(fty, Arrow):
        raise TermError(f"applying a term of base type {fty}")
    if fty.domain != aty:
        raise TermError(f"argument has type {aty}, function expects {fty.domain}")
    return fty.codomain


def subterms(t: Term) -> list:
    """``t`` and all nested subterms, pre-order, left to right, under binders too."""
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        out.append(s)
        if isinstance(s, FunApp):
            stack.extend(reversed(s.args))
        elif isinstance(s, App):
            stack.append(s.arg)
            stack.append(s.fun)
        elif isinstance(s, Abs):
            stack.append(s.body)
    return out


def is_ground(t: Term) -> bool:
    return not t.fv


def is_data_term(t: Term) -> bool:
    if type(t) is not FunApp or not t.symbol.is_constructor:
        return False
    return all(is_data_term(a) for a in t.args)


def is_constructor_term(t: Term) -> bool:
    """Variables and constructor applications only (the shape of lhs arguments)."""
    if isinstance(t, Var):
        return True
    if isinstance(t, FunApp) and t.symbol.is_constructor:
        return all(is_constructor_term(a) for a in t.args)
    return False


def variables(t: Term) -> list:
    """Free variable occurrences, left to right, with repetitions."""
    out = []
    for s in subterms(t):
        if isinstance(s, Var) and s.name in t.fv:
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# Substitution and alpha-equivalence


def fresh_name(base: str, avoid) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst_unchecked(t: Term, m: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution without type checks."""
    if not t.fv:
        return t
    tt = type(t)
    if tt is Var:
        return m.get(t.name, t)
    if tt is FunApp:
        args = t.args
        new = [subst_unchecked(a, m) if a.fv else a for a in args]
        return FunApp(t.symbol, new)
    if tt is App:
        return App(subst_unchecked(t.fun, m), subst_unchecked(t.arg, m))
    # Abs
    relevant = {k: v for k, v in m.items() if k in t.fv}
    if not relevant:
        return t
    binder = t.binder
    body = t.body
    incoming = _EMPTY
    for v in relevant.values():
        if v.fv:
            incoming = incoming | v.fv
    if binder in incoming:
        new_binder = fresh_name(binder, incoming | body.fv | set(relevant))
        body = subst_unchecked(body, {binder: Var(new_binder, t.binder_type)})
        binder = new_binder
    return Abs(binder, t.binder_type, subst_unchecked(body, relevant))


def apply_subst(t: Term, m: Mapping[str, Term]) -> Term:
    """Capture-avoiding substitution; images must match the variable's type."""
    types = {}
    for v in subterms(t):
        if isinstance(v, Var):
            types.setdefault(v.name, v.type)
    for name, image in m.items():
        if name in types and type_of(image) != types[name]:
            raise TermError(
                f"cannot substitute a term of type {type_of(image)} for {name} : {types[name]}"
            )
    return subst_unchecked(t, m)


def alpha_eq(s: Term, t: Term) -> bool:
    return _alpha(s, t, {}, {}, 0)


def _alpha(s: Term, t: Term, ls: dict, rs: dict, depth: int) -> bool:
    if type(s) is not type(t):
        return False
    if isinstance(s, Var):
        a, b = ls.get(s.name), rs.get(t.name)
        if a is None and b is None:
            return s.name == t.name and s.type == t.type
        return a == b
    if s is t and not s.fv:
        return True
    if isinstance(s, FunApp):
        return (
            s.symbol.name == t.symbol.name
            and len(s.args) == len(t.args)
            and all(_alpha(a, b, ls, rs, depth) for a, b in zip(s.args, t.args))
        )
    if isinstance(s, App):
        return _alpha(s.fun, t.fun, ls, rs, depth) and _alpha(s.arg, t.arg, ls, rs, depth)
    if s.binder_type != t.binder_type:
        return False
    return _alpha(
        s.body, t.body, {**ls, s.binder: depth}, {**rs, t.binder: depth}, depth + 1
    )


def size(t: Term) -> int:
    return len(subterms(t))
