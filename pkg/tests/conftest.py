import pytest

from consfree.syntax import SourceFile, parse_trs

NOT_SRC = """\
sort bool;
cons true : bool;
cons false : bool;
fun not : [bool] => bool;
rule not(true) -> false;
rule not(false) -> true;
"""

# a small signature with a higher-order symbol, used across modules
HO_SRC = """\
sort d;
sort bitstring;
cons c : d;
cons c1 : [d] => d;
cons c2 : d;
cons k : [d * d] => d;
cons eps : bitstring;
cons 0 : [bitstring] => bitstring;
cons 1 : [bitstring] => bitstring;
fun f : [d] => d;
fun g : [d * d] => d;
fun h : d;
fun ap : [(d => d) * d] => d;
"""


def trs_of(text, path="<test>"):
    return parse_trs(SourceFile(text, path))


@pytest.fixture(scope="session")
def r_not():
    return trs_of(NOT_SRC)


@pytest.fixture(scope="session")
def ho_sig():
    return trs_of(HO_SRC)


# acceptance criteria report one line each; shown in the terminal summary
ACCEPTANCE_LINES: list = []


@pytest.fixture
def criterion():
    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
