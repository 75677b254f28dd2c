"""Random object systems, the golden corpus, and the differential test loop.

Each case runs the start term twice: directly under the object system (the
oracle) and through the interpreter.  Only normal-form outcomes are
compared; runs that hit their fuel budget are inconclusive.
"""
from __future__ import annotations

import enum
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .analysis import compute_B
from .encoding import BOTTOM
from .engine import FuelExhausted, normalize
from .interpreter import interpret_run
from .syntax import SourceFile, parse_term, parse_trs, print_term, print_trs
from .terms import Base, FunApp, FunctionSymbol, Kind, Rule, Term, Trs, TypeDecl, Var, is_data_term

DEFAULT_FUEL_ORACLE = 100_000
DEFAULT_FUEL_INTERP = 10_000_000

GOLDEN_INPUTS = {
    "boolean": ["not(true)", "not(false)", "and(true, false)", "and(true, true)", "and(false, true)"],
    "bitstring_eq": ["eq(o(i(e)), o(i(e)))", "eq(i(e), o(e))", "eq(e, e)", "eq(i(i(e)), i(e))"],
    "member": ["member(a, cons(b, cons(a, nil)))", "member(b, cons(a, nil))", "member(a, nil)"],
    "parity": ["even(i(o(i(e))))", "even(i(e))", "odd(o(i(i(e))))", "even(e)"],
    "constant": ["const(s(s(z)))", "first(s(z), z)", "const(z)"],
}

BOTTOM_INPUTS = {
    "undefined_call": "f(c)",
    "duplicate": "f(c)",
    "partial": "p(b)",
    "passthrough": "f(c)",
    "stuck_match": "top",
}


def _load(*parts) -> Trs:
    res = resources.files("consfree").joinpath("corpus", *parts)
    return parse_trs(SourceFile(res.read_text(encoding="utf-8"), "/".join(("corpus",) + parts)))


def golden_corpus() -> list:
    """``(name, trs, start terms)`` for the five hand-written systems."""
    out = []
    for name, inputs in GOLDEN_INPUTS.items():
        trs = _load(f"{name}.trs")
        out.append((name, trs, [parse_term(s, trs) for s in inputs]))
    return out


def bottom_corpus() -> list:
    out = []
    for name, start in BOTTOM_INPUTS.items():
        trs = _load("bottom", f"{name}.trs")
        out.append((name, trs, parse_term(start, trs)))
    return out


# ---------------------------------------------------------------------------
# Generation


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    max_symbols: int = 4
    max_rules: int = 3
    max_depth: int = 3
    max_arity: int = 2

    def __post_init__(self):
        for name in ("max_symbols", "max_rules", "max_depth", "max_arity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")

    def for_case(self, k: int) -> "GenParams":
        return GenParams(
            hash_seed(self.seed, k), self.max_symbols, self.max_rules, self.max_depth, self.max_arity
        )


def hash_seed(seed: int, k: int) -> int:
    # str seeds go through sha512 in random.seed, independent of PYTHONHASHSEED
    return random.Random(f"{seed}/{k}").getrandbits(64)


D = Base("d")


def _data_terms(rng: random.Random, constructors, depth: int) -> Term:
    leaves = [c for c in constructors if c.arity == 0]
    if depth <= 0:
        return FunApp(rng.choice(leaves), ())
    c = rng.choice(constructors)
    return FunApp(c, [_data_terms(rng, constructors, depth - 1) for _ in range(c.arity)])


class _RuleBuilder:
    def __init__(self, rng, constructors, defined, params):
        self.rng = rng
        self.constructors = constructors
        self.defined = defined
        self.p = params
        self.counter = 0

    def fresh(self) -> Var:
        self.counter += 1
        return Var(f"x{self.counter}", D)

    def rules_for(self, j: int) -> list:
        rng = self.rng
        f = self.defined[j]
        self.counter = 0
        if rng.random() < 0.1:
            return []
        if f.arity == 0 or rng.random() < 0.25:
            args = [self.fresh() for _ in range(f.arity)]
            return [self._rule(j, FunApp(f, args), None, [])]
        slot = rng.randrange(f.arity)
        count = rng.randint(1, min(self.p.max_rules, len(self.constructors)))
        heads = rng.sample(self.constructors, count)
        rules = []
        for c in heads:
            self.counter = 0
            args = [self.fresh() for _ in range(f.arity)]
            inner = [self.fresh() for _ in range(c.arity)]
            args[slot] = FunApp(c, inner)
            rules.append(self._rule(j, FunApp(f, args), slot, inner))
        return rules

    def _rule(self, j, lhs, slot, smaller) -> Rule:
        pieces = [a for a in lhs.args]
        pieces += [s for a in lhs.args if isinstance(a, FunApp) for s in a.args]
        return Rule(lhs, self._rhs(j, pieces, slot, smaller, self.p.max_depth))

    def _rhs(self, j, pieces, slot, smaller, depth) -> Term:
        rng = self.rng
        choice = rng.random()
        lower = self.defined[:j]
        if depth > 0 and choice < 0.45 and (lower or (slot is not None and smaller)):
            options = [(f, False) for f in lower]
            if slot is not None and smaller:
                options.append((self.defined[j], True))
            f, recursive = rng.choice(options)
            args = []
            for k in range(f.arity):
                if recursive and k == slot:
                    args.append(rng.choice(smaller))
                else:
                    args.append(self._rhs(j, pieces, slot, smaller, depth - 1))
            return FunApp(f, args)
        if choice < 0.85 and pieces:
            return rng.choice(pieces)
        return _data_terms(rng, self.constructors, rng.randint(0, 1))


def gen_object_trs(p: GenParams) -> Trs:
    """A first-order cons-free orthogonal system; a pure function of ``p``.

    Defined symbols are ordered; a rule for the j-th one calls only earlier
    symbols, or itself on a variable strictly inside its case-split argument,
    so every generated system terminates.
    """
    rng = random.Random(p.seed)
    n_cons = rng.randint(2, max(2, p.max_symbols))
    n_def = rng.randint(1, p.max_symbols)
    arities = [0, rng.randint(0, 1)] + [rng.randint(0, p.max_arity) for _ in range(n_cons - 2)]
    decls = [("c", a, Kind.CONSTRUCTOR) for a in arities]
    decls += [("f", rng.randint(0, p.max_arity), Kind.DEFINED) for _ in range(n_def)]
    order = list(range(len(decls)))
    rng.shuffle(order)
    symbols = [None] * len(decls)
    counts = {"c": 0, "f": 0}
    named = []
    for prefix, arity, kind in decls:
        named.append((f"{prefix}{counts[prefix]}", arity, kind))
        counts[prefix] += 1
    for index, i in enumerate(order, 1):
        name, arity, kind = named[i]
        symbols[i] = FunctionSymbol(name, TypeDecl((D,) * arity, D), kind, index)
    constructors = [s for s in symbols if s.is_constructor]
    defined = [s for s in symbols if not s.is_constructor]
    builder = _RuleBuilder(rng, constructors, defined, p)
    rules = []
    for j in range(len(defined)):
        for rule in builder.rules_for(j):
            rules.append(Rule(rule.lhs, rule.rhs, len(rules) + 1))
    declared = sorted(symbols, key=lambda s: s.index)
    return Trs(("d",), tuple(declared), tuple(rules))


def gen_start_term(trs: Trs, p: GenParams) -> Term:
    rng = random.Random(hash_seed(p.seed, -1))
    if not trs.defined:
        raise ValueError("system has no defined symbol")
    f = rng.choice(trs.defined)
    return FunApp(f, [_data_terms(rng, trs.constructors, rng.randint(0, p.max_depth)) for _ in range(f.arity)])


# ---------------------------------------------------------------------------
# Differential testing


class Verdict(enum.Enum):
    AGREE = "Agree"
    DISAGREE = "Disagree"
    BOTH_EXHAUSTED = "BothFuelExhausted"
    ORACLE_ONLY_EXHAUSTED = "OracleOnlyExhausted"
    INTERP_ONLY_EXHAUSTED = "InterpOnlyExhausted"

    @property
    def inconclusive(self) -> bool:
        return self not in (Verdict.AGREE, Verdict.DISAGREE)


@dataclass(frozen=True)
class Case:
    trs_id: str
    start: str
    oracle: str
    interp: str
    verdict: Verdict
    oracle_steps: int
    interp_steps: int
    detail: str = ""

    def render(self) -> str:
        return (
            f"{self.trs_id}\t{self.start}\toracle={self.oracle}\tinterp={self.interp}"
            f"\t{self.verdict.value}\tsteps={self.oracle_steps}/{self.interp_steps}"
        )


@dataclass
class DiffReport:
    cases: list = field(default_factory=list)
    header: str = ""

    def count(self, verdict: Verdict) -> int:
        return sum(1 for c in self.cases if c.verdict is verdict)

    @property
    def disagreements(self) -> int:
        return self.count(Verdict.DISAGREE)

    @property
    def inconclusive(self) -> int:
        return sum(1 for c in self.cases if c.verdict.inconclusive)

    def render(self) -> str:
        lines = [self.header] if self.header else []
        lines += [c.render() for c in self.cases]
        summary = ", ".join(f"{v.value}={self.count(v)}" for v in Verdict)
        lines.append(f"total={len(self.cases)} {summary}")
        for c in self.cases:
            if c.verdict is Verdict.DISAGREE and c.detail:
                lines.append(f"-- {c.trs_id} {c.start}\n{c.detail}")
        return "\n".join(lines) + "\n"


REPORT_NOTE = (
    "# Compares normal forms only: a data normal form d must come back as <d>,\n"
    "# any other normal form as bot.  Non-normal reducts are not sampled."
)


def _describe(t) -> str:
    return "Bottom" if t is BOTTOM else print_term(t)


def run_case(trs_id: str, trs: Trs, start: Term, fuel_oracle: int, fuel_interp: int,
             assert_bsafe: bool = False) -> Case:
    b = compute_B(start, trs) if assert_bsafe else None
    oracle_run = normalize(trs, start, fuel_oracle, b_check=b)
    if oracle_run.exhausted:
        oracle = None
        oracle_text = "FuelExhausted"
    else:
        oracle = oracle_run.term
        oracle_text = print_term(oracle) if is_data_term(oracle) else f"nondata:{print_term(oracle)}"
    try:
        irun = interpret_run(trs, start, fuel_interp, assert_bsafe=assert_bsafe)
        interp, interp_text, interp_steps = irun.result, _describe(irun.result), irun.steps
    except FuelExhausted as e:
        interp, interp_text, interp_steps = None, "FuelExhausted", e.steps

    if oracle is None and interp is None:
        verdict = Verdict.BOTH_EXHAUSTED
    elif oracle is None:
        verdict = Verdict.ORACLE_ONLY_EXHAUSTED
    elif interp is None:
        verdict = Verdict.INTERP_ONLY_EXHAUSTED
    elif is_data_term(oracle):
        verdict = Verdict.AGREE if interp is not BOTTOM and interp == oracle else Verdict.DISAGREE
    else:
        verdict = Verdict.AGREE if interp is BOTTOM else Verdict.DISAGREE

    detail = ""
    if verdict is Verdict.DISAGREE:
        detail = print_trs(trs) + "\n".join(
            s.render() for s in normalize(trs, start, fuel_oracle, trace=True).trace
        )
    return Case(trs_id, print_term(start), oracle_text, interp_text, verdict,
                oracle_run.steps, interp_steps, detail)


def _random_case(args) -> Case:
    p, k, fuel_oracle, fuel_interp, assert_bsafe = args
    cp = p.for_case(k)
    trs = gen_object_trs(cp)
    start = gen_start_term(trs, cp)
    return run_case(f"random#{k}", trs, start, fuel_oracle, fuel_interp, assert_bsafe)


def _golden_cases(args) -> list:
    fuel_oracle, fuel_interp, assert_bsafe = args
    return [
        run_case(f"golden:{name}", trs, start, fuel_oracle, fuel_interp, assert_bsafe)
        for name, trs, starts in golden_corpus()
        for start in starts
    ]


def difftest(
    p: GenParams,
    cases: int,
    fuel_oracle: int = DEFAULT_FUEL_ORACLE,
    fuel_interp: int = DEFAULT_FUEL_INTERP,
    include_golden: bool = False,
    assert_bsafe: bool = False,
    workers: Optional[int] = None,
) -> DiffReport:
    """Oracle vs interpreter on ``cases`` random systems (plus the golden corpus).

    Results come back in case order whatever ``workers`` is.
    """
    header = "\n".join([
        f"# difftest seed={p.seed} cases={cases} fuel-oracle={fuel_oracle} "
        f"fuel-interp={fuel_interp} bounds=({p.max_symbols},{p.max_rules},{p.max_depth},{p.max_arity})",
        REPORT_NOTE,
    ])
    report = DiffReport(header=header)
    if include_golden:
        report.cases.extend(_golden_cases((fuel_oracle, fuel_interp, assert_bsafe)))
    jobs = [(p, k, fuel_oracle, fuel_interp, assert_bsafe) for k in range(cases)]
    if workers and workers > 1:
        # workers rebuild their inputs from (params, k); terms never cross processes
        with ProcessPoolExecutor(max_workers=workers) as pool:
            report.cases.extend(pool.map(_random_case, jobs))
    else:
        report.cases.extend(map(_random_case, jobs))
    return report
