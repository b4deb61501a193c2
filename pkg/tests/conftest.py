import hypothesis
import hypothesis.strategies as st
import pytest

from langret.exact_linalg import Q

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@st.composite
def rationals(draw, lo=-30, hi=30, max_den=8):
    return Q(draw(st.integers(lo, hi)), draw(st.integers(1, max_den)))


def rat_vectors(n, **kw):
    return st.tuples(*[rationals(**kw) for _ in range(n)])


@pytest.fixture
def acceptance_log():
    def log(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
