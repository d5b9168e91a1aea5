import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# acceptance criteria record (number, description, value, tolerance, ok) here;
# the terminal summary prints one PASS/FAIL line for each of them
ACCEPTANCE = {}
N_CRITERIA = 10


@pytest.fixture
def record():
    def _record(number, what, value, tol, ok=None, at_least=False):
        if ok is None:
            ok = value >= tol if at_least else value <= tol
        ACCEPTANCE[number] = (what, float(value), float(tol), bool(ok), at_least)
        return bool(ok)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in range(1, N_CRITERIA + 1):
        if k not in ACCEPTANCE:
            tr.write_line(f"----  criterion {k:2d}: not run")
            continue
        what, value, tol, ok, at_least = ACCEPTANCE[k]
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {k:2d}: {what}: "
                      f"{value:.3e} (need {'>=' if at_least else '<='} {tol:.1e})")
