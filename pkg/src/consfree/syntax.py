"""Concrete text format for systems and terms.

A ``.trs`` file is a sequence of declarations, each ended by ``;``::

    -- line comment
    sort bool;
    cons true : bool;
    cons c : [bool * bool] => bool;
    fun  not : [bool] => bool;
    rule not(true) -> false;

Terms: ``f(a, b)`` for symbol applications (nullary symbols may drop the
parentheses), ``s t`` for application, ``\\x:type. s`` for abstraction and
``a :: b :: []`` for the right-associative list constructor.  The glyphs
``▷ ⊥ ∅`` are accepted as aliases of ``eps``, ``bot`` and ``empty``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .terms import (
    Abs,
    App,
    Arrow,
    Base,
    FunApp,
    FunctionSymbol,
    Kind,
    Rule,
    Term,
    Trs,
    TypeDecl,
    Var,
    is_constructor_term,
    sorts_of,
    type_of,
)

ALIASES = {"▷": "eps", "⊥": "bot", "∅": "empty"}


@dataclass(frozen=True)
class SourceFile:
    text: str
    path: str = "<input>"


@dataclass(frozen=True)
class Diagnostic:
    path: str
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.path}:{self.line}:{self.col}: {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# Lexer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<arrow>->)
  | (?P<darrow>=>)
  | (?P<cons>::)
  | (?P<nil>\[\])
  | (?P<punct>[()\[\],;:*.\\])
  | (?P<ident>[A-Za-z0-9_'▷⊥∅]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, path: str = "<input>") -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(
                [Diagnostic(path, line, pos - line_start + 1, f"unexpected character {text[pos]!r}")]
            )
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "punct":
                kind = chunk
            elif kind == "ident":
                chunk = ALIASES.get(chunk, chunk)
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n") if kind == "ws" else 0
        if newlines:
            line += newlines
            line_start = pos + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Untyped syntax trees produced by the parser, elaborated against a signature


@dataclass
class _Name:
    name: str
    tok: Token


@dataclass
class _Call:
    name: str
    args: list
    tok: Token


@dataclass
class _Apply:
    fun: object
    arg: object
    tok: Token


@dataclass
class _Lambda:
    binder: str
    binder_type: object
    body: object
    tok: Token


class _Parser:
    def __init__(self, tokens, path):
        self.toks = tokens
        self.i = 0
        self.path = path

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError([Diagnostic(self.path, tok.line, tok.col, msg)])

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind, what=None) -> Token:
        if self.tok.kind != kind:
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {what or repr(kind)}, found {shown!r}")
        return self.next()

    def at(self, *kinds) -> bool:
        return self.tok.kind in kinds

    # types
    def type_(self):
        left = self.type_atom()
        if self.at("darrow"):
            self.next()
            return Arrow(left, self.type_())
        return left

    def type_atom(self):
        if self.at("("):
            self.next()
            ty = self.type_()
            self.expect(")")
            return ty
        tok = self.expect("ident", "a sort name")
        return _SortRef(tok.text, tok)

    def decl(self):
        if self.at("["):
            self.next()
            args = [self.type_()]
            while self.at("*"):
                self.next()
                args.append(self.type_())
            self.expect("]")
            self.expect("darrow", "'=>'")
            return args, self.type_()
        return [], self.type_()

    # terms
    def term(self):
        if self.at("\\"):
            tok = self.next()
            binder = self.expect("ident", "a binder name").text
            self.expect(":")
            ty = self.type_()
            self.expect(".")
            return _Lambda(binder, ty, self.term(), tok)
        left = self.application()
        if self.at("cons"):
            tok = self.next()
            return _Call("::", [left, self.term()], tok)
        return left

    def application(self):
        head = self.atom()
        while self.at("ident", "(", "nil", "cons") and not (
            self.at("cons") and self.toks[self.i + 1].kind != "("
        ):
            tok = self.tok
            head = _Apply(head, self.atom(), tok)
        return head

    def atom(self):
        tok = self.tok
        if self.at("("):
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if self.at("nil"):
            self.next()
            return _Call("[]", [], tok)
        if self.at("ident", "cons"):
            self.next()
            if self.at("("):
                self.next()
                args = []
                if not self.at(")"):
                    args.append(self.term())
                    while self.at(","):
                        self.next()
                        args.append(self.term())
                self.expect(")")
                return _Call(tok.text, args, tok)
            if tok.kind == "cons":
                raise self.error("'::' used as a prefix symbol needs arguments", tok)
            return _Name(tok.text, tok)
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")


@dataclass
class _SortRef:
    name: str
    tok: Token


class _Elaborator:
    """Resolves names against a signature and type-checks."""

    def __init__(self, path, symbols: dict, sorts):
        self.path = path
        self.symbols = symbols
        self.sorts = sorts

    def error(self, tok, msg):
        return ParseError([Diagnostic(self.path, tok.line, tok.col, msg)])

    def resolve_type(self, ty):
        if isinstance(ty, _SortRef):
            if ty.name not in self.sorts:
                raise self.error(ty.tok, f"unknown sort {ty.name!r}")
            return Base(ty.name)
        return Arrow(self.resolve_type(ty.domain), self.resolve_type(ty.codomain))

    def pattern(self, node, expected, env: dict, top=False):
        """Lhs elaboration: variables get the type of their argument slot."""
        if isinstance(node, _Name) and node.name not in self.symbols:
            if node.name in env:
                prev = env[node.name]
                if prev.type != expected:
                    raise self.error(node.tok, f"variable {node.name} used at two types")
                return prev
            v = Var(node.name, expected)
            env[node.name] = v
            return v
        if isinstance(node, (_Name, _Call)):
            sym = self.symbols[node.name] if node.name in self.symbols else None
            if sym is None:
                raise self.error(node.tok, f"unknown symbol {node.name!r}")
            if not top and not sym.is_constructor:
                raise self.error(node.tok, "lhs argument not a constructor term")
            args = node.args if isinstance(node, _Call) else []
            self._arity(sym, args, node.tok)
            out = FunApp(
                sym, [self.pattern(a, t, env) for a, t in zip(args, sym.decl.arg_types)]
            )
            if expected is not None and sym.decl.result != expected:
                raise self.error(
                    node.tok, f"{sym.name} has type {sym.decl.result}, expected {expected}"
                )
            return out
        raise self.error(node.tok, "lhs argument not a constructor term")

    def _arity(self, sym, args, tok):
        if len(args) != sym.arity:
            raise self.error(
                tok, f"arity mismatch: {sym.name} takes {sym.arity} arguments, got {len(args)}"
            )

    def term(self, node, env: dict, unbound: str, bound: dict):
        """Synthesise a typed term; ``unbound`` is the message for unknown names."""
        if isinstance(node, _Name):
            if node.name in bound:
                return bound[node.name]
            if node.name in self.symbols:
                sym = self.symbols[node.name]
                self._arity(sym, [], node.tok)
                return FunApp(sym, ())
            if node.name in env:
                return env[node.name]
            raise self.error(node.tok, f"{unbound} {node.name!r}")
        if isinstance(node, _Call):
            sym = self.symbols.get(node.name)
            if sym is None:
                raise self.error(node.tok, f"unknown symbol {node.name!r}")
            self._arity(sym, node.args, node.tok)
            args = []
            for i, (a, ty) in enumerate(zip(node.args, sym.decl.arg_types), 1):
                arg = self.term(a, env, unbound, bound)
                got = type_of(arg)
                if got != ty:
                    raise self.error(
                        _tok_of(a),
                        f"type error: argument {i} of {sym.name} has type {got}, expected {ty}",
                    )
                args.append(arg)
            return FunApp(sym, args)
        if isinstance(node, _Apply):
            fun = self.term(node.fun, env, unbound, bound)
            arg = self.term(node.arg, env, unbound, bound)
            fty = type_of(fun)
            if not isinstance(fty, Arrow):
                raise self.error(node.tok, f"type error: applying a term of type {fty}")
            if fty.domain != type_of(arg):
                raise self.error(
                    _tok_of(node.arg),
                    f"type error: argument has type {type_of(arg)}, expected {fty.domain}",
                )
            return App(fun, arg)
        ty = self.resolve_type(node.binder_type)
        v = Var(node.binder, ty)
        body = self.term(node.body, env, unbound, {**bound, node.binder: v})
        return Abs(node.binder, ty, body)


def _tok_of(node) -> Token:
    return node.tok


# ---------------------------------------------------------------------------
# Public API


def parse_trs(src: SourceFile) -> Trs:
    """Parse a whole system.  Raises ParseError carrying every diagnostic found."""
    path = src.path
    tokens = tokenize(src.text, path)
    p = _Parser(tokens, path)
    sorts: list = []
    symbols: dict = {}
    ordered: list = []
    rule_nodes: list = []
    diags: list = []

    def skip_statement():
        while not p.at(";", "eof"):
            p.next()
        if p.at(";"):
            p.next()

    while not p.at("eof"):
        start = p.tok
        try:
            if start.kind != "ident" or start.text not in ("sort", "cons", "fun", "rule"):
                raise p.error("expected 'sort', 'cons', 'fun' or 'rule'")
            p.next()
            if start.text == "sort":
                name = p.expect("ident", "a sort name")
                if name.text in sorts:
                    raise p.error(f"sort {name.text!r} declared twice", name)
                sorts.append(name.text)
            elif start.text in ("cons", "fun"):
                name = p.next()
                if name.kind not in ("ident", "cons", "nil"):
                    raise p.error("expected a symbol name", name)
                if name.text in symbols:
                    raise p.error(f"symbol {name.text!r} declared twice", name)
                p.expect(":")
                args, res = p.decl()
                el = _Elaborator(path, symbols, sorts)
                decl = TypeDecl(
                    tuple(el.resolve_type(a) for a in args), el.resolve_type(res)
                )
                kind = Kind.CONSTRUCTOR if start.text == "cons" else Kind.DEFINED
                sym = FunctionSymbol(name.text, decl, kind, len(ordered) + 1)
                symbols[sym.name] = sym
                ordered.append(sym)
            else:
                lhs = p.term()
                p.expect("arrow", "'->'")
                rhs = p.term()
                rule_nodes.append((start, lhs, rhs))
            p.expect(";")
        except ParseError as e:
            diags.extend(e.diagnostics)
            skip_statement()

    el = _Elaborator(path, symbols, sorts)
    rules = []
    for tok, lhs_node, rhs_node in rule_nodes:
        try:
            rules.append(_elaborate_rule(el, tok, lhs_node, rhs_node, len(rules) + 1))
        except ParseError as e:
            diags.extend(e.diagnostics)
    if diags:
        raise ParseError(sorted(diags, key=lambda d: (d.line, d.col)))
    return Trs(tuple(sorts), tuple(ordered), tuple(rules))


def _elaborate_rule(el: _Elaborator, tok, lhs_node, rhs_node, index) -> Rule:
    if not isinstance(lhs_node, (_Call, _Name)) or lhs_node.name not in el.symbols:
        raise el.error(_tok_of(lhs_node), "lhs must be a defined symbol applied to patterns")
    head = el.symbols[lhs_node.name]
    if head.is_constructor:
        raise el.error(_tok_of(lhs_node), f"constructor {head.name!r} heads a lhs")
    env: dict = {}
    lhs = el.pattern(lhs_node, None, env, top=True)
    for arg in lhs.args:
        if not is_constructor_term(arg):
            raise el.error(_tok_of(lhs_node), "lhs argument not a constructor term")
    rhs = el.term(rhs_node, env, "unbound rhs variable", {})
    if type_of(rhs) != type_of(lhs):
        raise el.error(
            tok, f"ill-typed rule: lhs has type {type_of(lhs)}, rhs has type {type_of(rhs)}"
        )
    return Rule(lhs, rhs, index)


def parse_term(text: str, sig: Trs, variables: Optional[dict] = None, path="<term>") -> Term:
    """Parse a term over ``sig``.

    Free names must appear in ``variables``, mapping each name to its type
    (or to a :class:`Var`).
    """
    tokens = tokenize(text, path)
    p = _Parser(tokens, path)
    node = p.term()
    if not p.at("eof"):
        raise p.error(f"unexpected {p.tok.text!r} after term")
    el = _Elaborator(path, dict(sig.by_name), list(sig.sorts))
    env = {
        name: v if isinstance(v, Var) else Var(name, v) for name, v in (variables or {}).items()
    }
    return el.term(node, env, "unbound variable", {})


def print_type(ty) -> str:
    return str(ty)


def print_term(t: Term) -> str:
    return _print(t, 0)


# precedence levels: 0 = anything, 1 = operand of '::' (no lambda, no '::'),
# 2 = application argument (atoms only)
def _print(t: Term, prec: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, FunApp):
        name = t.symbol.name
        if name == "::" and len(t.args) == 2:
            s = f"{_print(t.args[0], 1)} :: {_print(t.args[1], 0 if prec == 0 else 1)}"
            return s if prec == 0 else f"({s})"
        if not t.args:
            return name
        return f"{name}({', '.join(_print(a, 0) for a in t.args)})"
    if isinstance(t, App):
        s = f"{_print(t.fun, 1)} {_print(t.arg, 2)}"
        return s if prec <= 1 else f"({s})"
    s = f"\\{t.binder}:{_paren_type(t.binder_type)}. {_print(t.body, 0)}"
    return s if prec == 0 else f"({s})"


def _paren_type(ty) -> str:
    return f"({ty})" if isinstance(ty, Arrow) else str(ty)


def print_decl(sym: FunctionSymbol) -> str:
    return f"{sym.kind.value} {sym.name} : {sym.decl};"


def print_trs(trs: Trs) -> str:
    lines = [f"sort {s};" for s in trs.sorts]
    lines += [print_decl(s) for s in trs.symbols]
    lines += [f"rule {print_term(r.lhs)} -> {print_term(r.rhs)};" for r in trs.rules]
    return "\n".join(lines) + "\n"


def load_trs(path) -> Trs:
    with open(path, encoding="utf-8") as fh:
        return parse_trs(SourceFile(fh.read(), str(path)))


def used_sorts(trs: Trs) -> set:
    out = set()
    for s in trs.symbols:
        for ty in (*s.decl.arg_types, s.decl.result):
            out.update(sorts_of(ty))
    return out
