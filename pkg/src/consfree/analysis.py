"""Static checks over constructor systems and the bounded data set B.

All checks report violations instead of raising.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .syntax import print_term
from .terms import (
    Abs,
    App,
    FunApp,
    Rule,
    Term,
    Trs,
    Var,
    fresh_name,
    is_data_term,
    subst_unchecked,
    subterms,
    variables,
)


@dataclass(frozen=True)
class Violation:
    rule_index: int
    subterm: Optional[Term]
    reason: str

    def render(self) -> str:
        shown = print_term(self.subterm) if self.subterm is not None else "-"
        return f"rule {self.rule_index}: {self.reason}: {shown}"

    def as_dict(self) -> dict:
        return {
            "ruleIndex": self.rule_index,
            "reason": self.reason,
            "subterm": print_term(self.subterm) if self.subterm is not None else None,
        }


@dataclass(frozen=True)
class CheckReport:
    name: str
    violations: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return not self.violations

    def render(self) -> str:
        head = f"{self.name}: {'pass' if self.passed else 'FAIL'}"
        return "\n".join([head] + ["  " + v.render() for v in self.violations])

    def to_jsonl(self) -> str:
        """One JSON document per violation; a lone summary line when clean."""
        if self.passed:
            return json.dumps({"check": self.name, "passed": True})
        return "\n".join(
            json.dumps({"check": self.name, **v.as_dict()}) for v in self.violations
        )


# ---------------------------------------------------------------------------
# Left-linearity and cons-freeness


def check_left_linear(rule: Rule) -> bool:
    counts = Counter(v.name for v in variables(rule.lhs))
    return all(n == 1 for n in counts.values())


def rename_binders_apart(rule: Rule) -> Rule:
    """Rename binders in the rhs so none coincides with a free variable of the rule."""
    taken = set(rule.lhs.fv) | set(rule.rhs.fv)
    return Rule(rule.lhs, _rename(rule.rhs, taken), rule.index)


def _rename(t: Term, taken: set) -> Term:
    if isinstance(t, FunApp):
        return FunApp(t.symbol, [_rename(a, taken) for a in t.args])
    if isinstance(t, App):
        return App(_rename(t.fun, taken), _rename(t.arg, taken))
    if isinstance(t, Abs):
        body = t.body
        binder = t.binder
        if binder in taken:
            binder = fresh_name(binder, taken | _all_names(body))
            body = subst_unchecked(body, {t.binder: Var(binder, t.binder_type)})
        return Abs(binder, t.binder_type, _rename(body, taken))
    return t


def _all_names(t: Term) -> set:
    names = set()
    for s in subterms(t):
        if isinstance(s, Var):
            names.add(s.name)
        elif isinstance(s, Abs):
            names.add(s.binder)
    return names


def cons_free_violations(rule: Rule) -> list:
    rule = rename_binders_apart(rule)
    lhs_subterms = set(subterms(rule.lhs))
    out = []
    for s in subterms(rule.rhs):
        if isinstance(s, FunApp) and s.symbol.is_constructor:
            if s not in lhs_subterms and not is_data_term(s):
                out.append(
                    Violation(rule.index, s, "constructor subterm neither in lhs nor data")
                )
    return out


def check_cons_free(trs: Trs) -> CheckReport:
    violations = []
    for rule in trs.rules:
        if not check_left_linear(rule):
            violations.append(Violation(rule.index, rule.lhs, "lhs is not left-linear"))
        violations.extend(cons_free_violations(rule))
    return CheckReport("cons-free", tuple(violations))


def check_left_linear_trs(trs: Trs) -> CheckReport:
    return CheckReport(
        "left-linear",
        tuple(
            Violation(r.index, r.lhs, "lhs is not left-linear")
            for r in trs.rules
            if not check_left_linear(r)
        ),
    )


# ---------------------------------------------------------------------------
# Orthogonality


def _walk(t: Term, s: dict) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def _occurs(name: str, t: Term, s: dict) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    return isinstance(t, FunApp) and any(_occurs(name, a, s) for a in t.args)


def unify(a: Term, b: Term) -> Optional[dict]:
    """Syntactic first-order unification of two binder-free patterns."""
    s: dict = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, s), _walk(y, s)
        if isinstance(x, Var) and isinstance(y, Var) and x.name == y.name:
            continue
        if isinstance(x, Var):
            if _occurs(x.name, y, s):
                return None
            s[x.name] = y
        elif isinstance(y, Var):
            if _occurs(y.name, x, s):
                return None
            s[y.name] = x
        elif isinstance(x, FunApp) and isinstance(y, FunApp):
            if x.symbol.name != y.symbol.name or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
        else:
            return None
    return s


def _suffix_vars(t: Term, suffix: str) -> Term:
    return subst_unchecked(t, {v.name: Var(v.name + suffix, v.type) for v in variables(t)})


def check_orthogonal(trs: Trs) -> CheckReport:
    violations = list(check_left_linear_trs(trs).violations)
    for rules in trs.rules_by_head.values():
        for i, r1 in enumerate(rules):
            left = _suffix_vars(r1.lhs, "#1")
            for r2 in rules[i + 1:]:
                if unify(left, _suffix_vars(r2.lhs, "#2")) is not None:
                    violations.append(
                        Violation(r2.index, r2.lhs, f"lhs overlaps with rule {r1.index}")
                    )
    return CheckReport("orthogonal", tuple(violations))


# ---------------------------------------------------------------------------
# B-sets and B-safety


def rhs_data(trs: Trs) -> frozenset:
    """Data subterms of all rule rhss (cached per system)."""
    cached = trs.__dict__.get("_rhs_data")
    if cached is None:
        cached = frozenset(s for r in trs.rules for s in subterms(r.rhs) if is_data_term(s))
        trs.__dict__["_rhs_data"] = cached
    return cached


def compute_B(start: Term, trs: Trs) -> frozenset:
    own = {s for s in subterms(start) if is_data_term(s)}
    return rhs_data(trs) | own


def is_subterm_closed(b: Iterable[Term]) -> bool:
    b = set(b)
    return all(s in b for t in b for s in subterms(t))


def unsafe_subterms(t: Term, b) -> list:
    """Constructor-headed subterms of ``t`` outside ``b``, outermost first."""
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if type(s) is FunApp:
            if s.symbol.is_constructor:
                if s in b:
                    # b is subterm-closed, nothing below can fail
                    continue
                out.append(s)
            stack.extend(reversed(s.args))
        elif type(s) is App:
            stack.append(s.arg)
            stack.append(s.fun)
        elif type(s) is Abs:
            stack.append(s.body)
    return out


def check_B_safe(t: Term, b) -> bool:
    return not unsafe_subterms(t, b)


def check_all(trs: Trs) -> list:
    return [check_cons_free(trs), check_left_linear_trs(trs), check_orthogonal(trs)]
