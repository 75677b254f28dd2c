"""Fuel-bounded weak-innermost rewriting.

Two routes compute the same reduction sequence:

* :func:`pick_redex` / :func:`rewrite_step` re-scan the whole term for the
  leftmost-innermost permitted redex on every step.  Simple, quadratic.
* :func:`normalize` walks the term once with an explicit stack, contracting
  redexes in the same order without re-scanning finished subterms.

Positions are tuples of 1-based child indices: argument ``i`` of ``f(...)``,
``1``/``2`` for the function/argument of an application.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .analysis import unsafe_subterms
from .terms import Abs, App, FunApp, Term, Trs, Var, alpha_eq, subst_unchecked

BETA = "beta"
DEFAULT_FUEL = 10_000_000


class Status(enum.Enum):
    NORMAL_FORM = "NormalForm"
    FUEL_EXHAUSTED = "FuelExhausted"


class FuelExhausted(Exception):
    """The step budget ran out; says nothing about divergence."""

    def __init__(self, steps: int, term: Optional[Term] = None):
        super().__init__(f"fuel exhausted after {steps} steps")
        self.steps = steps
        self.term = term


class BSafetyViolation(Exception):
    """A reduct left the bounded data set.  Signals an engine or analysis bug."""

    def __init__(self, step: int, offending: Term, term: Optional[Term] = None):
        from .syntax import print_term

        super().__init__(f"step {step}: {print_term(offending)} is not in B")
        self.step = step
        self.offending = offending
        self.term = term


@dataclass(frozen=True)
class Step:
    number: int
    position: tuple
    rule: Union[int, str]
    term: Optional[Term] = None

    def render(self) -> str:
        from .syntax import print_term

        shown = print_term(self.term) if self.term is not None else "?"
        return f"{self.number}  rule={self.rule}  pos={format_position(self.position)}  term={shown}"


@dataclass
class Normalization:
    term: Term
    steps: int
    status: Status
    trace: Optional[list] = field(default=None)

    @property
    def exhausted(self) -> bool:
        return self.status is Status.FUEL_EXHAUSTED


def format_position(pos: tuple) -> str:
    return ".".join(map(str, pos)) if pos else "e"


# ---------------------------------------------------------------------------
# Matching


def match_pattern(pattern: Term, subject: Term) -> Optional[dict]:
    """Syntactic matching; ``None`` when ``subject`` is no instance of ``pattern``."""
    sigma: dict = {}
    return sigma if _match(pattern, subject, sigma) else None


def _match(p: Term, s: Term, sigma: dict) -> bool:
    if type(p) is Var:
        prev = sigma.get(p.name)
        if prev is None:
            sigma[p.name] = s
            return True
        return alpha_eq(prev, s)
    if type(s) is not FunApp:
        return False
    if p.symbol is not s.symbol and p.symbol.name != s.symbol.name:
        return False
    for pa, sa in zip(p.args, s.args):
        if not _match(pa, sa, sigma):
            return False
    return True


def contract_root(trs: Trs, t: Term):
    """Contract ``t`` at its root if a rule or beta applies: ``(rule, reduct)`` or None.

    Assumes the argument condition of the strategy already holds.
    """
    if type(t) is FunApp:
        for rule in trs.rules_by_head.get(t.symbol.name, ()):
            sigma = match_pattern(rule.lhs, t)
            if sigma is not None:
                return rule.index, subst_unchecked(rule.rhs, sigma)
        return None
    if type(t) is App and type(t.fun) is Abs:
        f = t.fun
        return BETA, subst_unchecked(f.body, {f.binder: t.arg})
    return None


# ---------------------------------------------------------------------------
# Reference route: rescan per step


def pick_redex(t: Term, trs: Trs) -> Optional[tuple]:
    """Leftmost-innermost permitted redex position, or None for weak normal forms."""
    return _find(t, trs, ())


def _find(t: Term, trs: Trs, pos: tuple) -> Optional[tuple]:
    if isinstance(t, FunApp):
        for i, a in enumerate(t.args, 1):
            if isinstance(a, Abs):
                continue
            p = _find(a, trs, pos + (i,))
            if p is not None:
                return p
        return pos if contract_root(trs, t) is not None else None
    if isinstance(t, App):
        p = _find(t.fun, trs, pos + (1,))
        if p is not None:
            return p
        if not isinstance(t.arg, Abs):
            p = _find(t.arg, trs, pos + (2,))
            if p is not None:
                return p
        return pos if isinstance(t.fun, Abs) else None
    return None


def subterm_at(t: Term, pos: tuple) -> Term:
    for i in pos:
        if isinstance(t, FunApp):
            t = t.args[i - 1]
        elif isinstance(t, App):
            t = t.fun if i == 1 else t.arg
        elif isinstance(t, Abs):
            t = t.body
        else:
            raise IndexError(pos)
    return t


def replace_at(t: Term, pos: tuple, new: Term) -> Term:
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    if isinstance(t, FunApp):
        args = list(t.args)
        args[i - 1] = replace_at(args[i - 1], rest, new)
        return FunApp(t.symbol, args)
    if isinstance(t, App):
        if i == 1:
            return App(replace_at(t.fun, rest, new), t.arg)
        return App(t.fun, replace_at(t.arg, rest, new))
    if isinstance(t, Abs):
        return Abs(t.binder, t.binder_type, replace_at(t.body, rest, new))
    raise IndexError(pos)


def rewrite_step_at(trs: Trs, t: Term):
    """One step: ``(position, rule, reduct)`` or None when ``t`` is a weak normal form."""
    pos = pick_redex(t, trs)
    if pos is None:
        return None
    rule, reduct = contract_root(trs, subterm_at(t, pos))
    return pos, rule, replace_at(t, pos, reduct)


def rewrite_step(trs: Trs, t: Term) -> Optional[Term]:
    step = rewrite_step_at(trs, t)
    return None if step is None else step[2]


# ---------------------------------------------------------------------------
# Fast route


class _Frame:
    __slots__ = ("node", "kids", "i", "changed")

    def __init__(self, node, kids):
        self.node = node
        self.kids = kids
        self.i = 0
        self.changed = False


def _rebuild(frame: _Frame) -> Term:
    node = frame.node
    if not frame.changed:
        return node
    if type(node) is FunApp:
        return FunApp(node.symbol, frame.kids)
    return App(frame.kids[0], frame.kids[1])


def _plug(stack: list, value: Term) -> Term:
    """The whole term with ``value`` at the current focus."""
    for frame in reversed(stack):
        kids = list(frame.kids)
        kids[frame.i] = value
        node = frame.node
        value = FunApp(node.symbol, kids) if type(node) is FunApp else App(kids[0], kids[1])
    return value


def normalize(
    trs: Trs,
    t: Term,
    fuel: int = DEFAULT_FUEL,
    b_check=None,
    trace: bool = False,
) -> Normalization:
    """Reduce ``t`` to weak normal form using at most ``fuel`` steps.

    With ``b_check`` (a subterm-closed set of data terms) every reduct is
    checked for B-safety and :class:`BSafetyViolation` is raised on failure.
    With ``trace`` every step records its position, rule and the whole reduct.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    if b_check is not None:
        bad = unsafe_subterms(t, b_check)
        if bad:
            raise BSafetyViolation(0, bad[0], t)
    steps = 0
    log = [] if trace else None
    rules_by_head = trs.rules_by_head
    stack: list = []
    cons_frames = 0  # constructor-headed frames on the stack
    cur = t
    descend = True
    while True:
        if descend:
            tc = type(cur)
            if tc is FunApp and cur.args:
                frame = _Frame(cur, list(cur.args))
                stack.append(frame)
                if cur.symbol.is_constructor:
                    cons_frames += 1
                cur = frame.kids[0]
                continue
            if tc is App:
                stack.append(_Frame(cur, [cur.fun, cur.arg]))
                cur = cur.fun
                continue
            if tc is not FunApp:
                # Var, Abs: weak normal forms
                descend = False
                continue
            node = cur  # nullary symbol
        else:
            if not stack:
                return Normalization(cur, steps, Status.NORMAL_FORM, log)
            frame = stack[-1]
            if frame.kids[frame.i] is not cur:
                frame.kids[frame.i] = cur
                frame.changed = True
            frame.i += 1
            if frame.i < len(frame.kids):
                cur = frame.kids[frame.i]
                descend = True
                continue
            stack.pop()
            node = _rebuild(frame)
            if type(node) is FunApp and node.symbol.is_constructor:
                cons_frames -= 1

        # all children of `node` are weak normal forms; try the root
        if type(node) is FunApp:
            contracted = None
            for rule in rules_by_head.get(node.symbol.name, ()):
                sigma = {}
                if _match(rule.lhs, node, sigma):
                    contracted = rule.index, subst_unchecked(rule.rhs, sigma)
                    break
        elif type(node.fun) is Abs:
            f = node.fun
            contracted = BETA, subst_unchecked(f.body, {f.binder: node.arg})
        else:
            contracted = None

        if contracted is None:
            cur = node
            descend = False
            continue
        if steps >= fuel:
            stack_term = _plug(stack, node) if stack else node
            return Normalization(stack_term, steps, Status.FUEL_EXHAUSTED, log)
        steps += 1
        rule, cur = contracted
        if b_check is not None:
            if cons_frames:
                whole = _plug(stack, cur)
                bad = unsafe_subterms(whole, b_check)
            else:
                bad = unsafe_subterms(cur, b_check)
            if bad:
                raise BSafetyViolation(steps, bad[0], _plug(stack, cur) if stack else cur)
        if log is not None:
            pos = tuple(f.i + 1 for f in stack)
            log.append(Step(steps, pos, rule, _plug(stack, cur) if stack else cur))
        descend = True


def reduce_stepwise(trs: Trs, t: Term, fuel: int = DEFAULT_FUEL) -> Normalization:
    """Same contract as :func:`normalize` (traced), via :func:`rewrite_step_at`."""
    log = []
    steps = 0
    while True:
        step = rewrite_step_at(trs, t)
        if step is None:
            return Normalization(t, steps, Status.NORMAL_FORM, log)
        if steps >= fuel:
            return Normalization(t, steps, Status.FUEL_EXHAUSTED, log)
        steps += 1
        pos, rule, t = step
        log.append(Step(steps, pos, rule, t))
