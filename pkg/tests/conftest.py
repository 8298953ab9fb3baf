import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tame_opt_lab.poly import Polynomial

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def polynomials(draw, nvars=None, max_terms=6, max_exp=3):
    n = draw(st.integers(1, 4)) if nvars is None else nvars
    k = draw(st.integers(0, max_terms))
    exps = [tuple(draw(st.integers(0, max_exp)) for _ in range(n)) for _ in range(k)]
    coefs = [draw(st.floats(-5, 5, allow_nan=False, allow_infinity=False)) for _ in range(k)]
    return Polynomial.from_terms(n, list(zip(exps, coefs)))


def points(n, lo=-1.5, hi=1.5):
    return st.lists(st.floats(lo, hi, allow_nan=False, allow_infinity=False), min_size=n, max_size=n).map(np.array)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=1234))


_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.path.name == "test_acceptance.py" and (rep.when == "call" or rep.failed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE.append((doc, "PASS" if rep.passed else "FAIL", rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for doc, status, dur in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {doc}  ({dur:.2f} s)")
