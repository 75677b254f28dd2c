"""Acceptance criteria 1-7, each at its stated tolerance."""
import os
import random
import subprocess
import sys
import time
from itertools import product

from consfree.analysis import compute_B
from consfree.cli import main
from consfree.encoding import BOTTOM, SymbolTable, bit_decode, bit_encode, bitstring, decode_term, encode_term
from consfree.engine import normalize
from consfree.harness import GenParams, bottom_corpus, difftest, golden_corpus
from consfree.interpreter import build_Q, eqbits_term, interpret
from consfree.syntax import print_term
from consfree.terms import FunApp, is_data_term

from conftest import trs_of


def test_criterion_1_q_self_checks(tmp_path, capsys, criterion):
    path = str(tmp_path / "q.trs")
    t0 = time.perf_counter()
    assert main(["export-q", path]) == 0
    code = main(["check", path])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out.splitlines()
    expected = ["cons-free: pass", "left-linear: pass", "orthogonal: pass", "type order: 2"]
    ok = criterion(1, code == 0 and out == expected and elapsed < 1.0,
                   f"{'; '.join(out)}; {elapsed:.2f}s")
    assert ok


def _acceptance_difftest():
    return difftest(GenParams(seed=42), 100, include_golden=True, assert_bsafe=True)


def test_criterion_2_simulation_equivalence(criterion):
    t0 = time.perf_counter()
    report = _acceptance_difftest()
    elapsed = time.perf_counter() - t0
    golden = sum(len(s) for _, _, s in golden_corpus())
    ok = criterion(
        2,
        len(report.cases) == 100 + golden and report.disagreements == 0
        and report.inconclusive <= 10 and elapsed < 300,
        f"{len(report.cases)} cases, Disagree={report.disagreements}, "
        f"inconclusive={report.inconclusive}, {elapsed:.1f}s",
    )
    assert ok, report.render()


def _eqbits_report() -> str:
    q = build_Q()
    strings = ["".join(p) for n in range(7) for p in product("01", repeat=n)]
    assert len(strings) == 127
    lines = []
    for u, v in product(strings, repeat=2):
        t = eqbits_term(bitstring(u), bitstring(v))
        got = normalize(q, t, 1000, b_check=compute_B(t, q))
        lines.append(f"{u or '-'} {v or '-'} {print_term(got.term)} {got.steps}")
    return "\n".join(lines) + "\n"


def test_criterion_3_eqbits(criterion):
    t0 = time.perf_counter()
    report = _eqbits_report()
    elapsed = time.perf_counter() - t0
    rows = [line.split() for line in report.splitlines()]
    agree = sum(1 for u, v, got, _ in rows if got == ("true" if u == v else "false"))
    ok = criterion(3, len(rows) == 16_129 and agree == len(rows) and elapsed < 30,
                   f"{agree}/{len(rows)} agree, {elapsed:.1f}s")
    assert ok


def test_criterion_4_b_safety(criterion):
    # both runs check every step; a BSafetyViolation would propagate
    violations = 0
    try:
        report = _acceptance_difftest()
        _eqbits_report()
    except Exception as e:  # noqa: BLE001 - counted and reported
        violations += 1
        report = None
        detail = f"{type(e).__name__}: {e}"
    else:
        detail = f"{len(report.cases)} difftest cases and 16129 eqbits runs checked"
    ok = criterion(4, violations == 0, f"BSafetyViolation events={violations}; {detail}")
    assert ok


def _random_ground(rng, symbols, depth):
    if depth == 0:
        sym = rng.choice([s for s in symbols if s.arity == 0])
    else:
        sym = rng.choice(symbols)
    return FunApp(sym, [_random_ground(rng, symbols, depth - 1) for _ in range(sym.arity)])


def test_criterion_5_encoding_laws(criterion):
    sig = trs_of("""\
sort d;
cons a : d;
cons b : [d] => d;
cons c : [d * d] => d;
fun f : [d * d * d] => d;
fun g : d;
cons e : [d] => d;
fun h : [d] => d;
""")
    table = SymbolTable.of(sig)
    rng = random.Random("encoding-laws")
    t0 = time.perf_counter()
    seen = set()
    terms = []
    while len(terms) < 10_000:
        t = _random_ground(rng, sig.symbols, rng.randint(1, 6))
        if t not in seen:
            seen.add(t)
            terms.append(t)
    round_trip = sum(1 for t in terms if decode_term(encode_term(t), table) == t)
    distinct_terms = set(terms)
    encodings = {encode_term(t) for t in terms}
    injective = len(encodings) == len(distinct_terms) == 10_000
    bits_ok = all(bit_decode(bit_encode(i)) == i for i in range(1, 2**16 + 1))
    elapsed = time.perf_counter() - t0
    ok = criterion(
        5,
        round_trip == 10_000 and injective and bits_ok and elapsed < 10,
        f"round trip {round_trip}/10000, {len(distinct_terms)} distinct terms -> "
        f"{len(encodings)} encodings, bits 1..2^16 {'ok' if bits_ok else 'FAIL'}, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_6_bottom(criterion):
    results = []
    for name, trs, start in bottom_corpus():
        oracle = normalize(trs, start, 100_000)
        interp = interpret(trs, start, assert_bsafe=True)
        results.append((name, not oracle.exhausted and not is_data_term(oracle.term)
                        and interp is BOTTOM))
    good = [n for n, ok in results if ok]
    ok = criterion(6, len(results) == 5 and len(good) == 5,
                   f"{len(good)}/{len(results)} systems give Bottom: {', '.join(good)}")
    assert ok


def test_criterion_7_determinism(tmp_path, criterion):
    first = (_acceptance_difftest().render(), _eqbits_report())
    second = (_acceptance_difftest().render(), _eqbits_report())
    # a fresh interpreter with different string hashing writes the same report
    out = tmp_path / "report.txt"
    env = {**os.environ, "PYTHONHASHSEED": "12345"}
    subprocess.run(
        [sys.executable, "-m", "consfree.cli", "difftest", "--seed", "42", "--cases", "100",
         "--assert-bsafe", "--report", str(out)],
        check=True, env=env, capture_output=True,
    )
    same = first == second and out.read_text() == first[0]
    ok = criterion(7, same,
                   f"difftest report {len(first[0])} bytes, eqbits report {len(first[1])} bytes, "
                   f"{'identical' if same else 'DIFFERENT'} across repeats and a second process")
    assert ok
