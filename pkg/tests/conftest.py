import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# --- acceptance reporting --------------------------------------------------
# Tests marked ``@pytest.mark.criterion(k)`` get one PASS/FAIL line each in
# the terminal summary; details come from the `detail` fixture.

_CRITERIA = {}


@pytest.fixture
def detail(request):
    notes = []
    request.node.criterion_notes = notes
    return notes


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        notes = "; ".join(getattr(item, "criterion_notes", []))
        _CRITERIA[mark.args[0]] = (rep.passed, item.name, notes)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, name, notes = _CRITERIA[k]
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {name}"
        terminalreporter.write_line(line + (f"  [{notes}]" if notes else ""))
