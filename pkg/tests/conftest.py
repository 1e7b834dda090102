import re

import pytest

from unionroa import bench
from unionroa.lyap import initial_candidate
from unionroa.vsiter import IterationConfig, run_round

# criterion number -> list of detail lines, filled by test_acceptance
ACCEPTANCE_NOTES: dict = {}
_OUTCOMES: dict = {}


@pytest.fixture(scope="session")
def acceptance_notes():
    return ACCEPTANCE_NOTES


@pytest.fixture(scope="session")
def quick_cert():
    """A short Van der Pol round: cheap, but a genuine replayed certificate."""
    p = bench.get("vdp")
    rr = run_round(p.system, p.rounds[0].shapes, IterationConfig(max_iters=3), initial_candidate(p.system), 1)
    return rr.certificate, p.system


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)", item.name)
    if m and (rep.when == "call" or rep.failed):
        k = int(m.group(1))
        _OUTCOMES[k] = _OUTCOMES.get(k, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_OUTCOMES):
        status = "PASS" if _OUTCOMES[k] else "FAIL"
        notes = "; ".join(ACCEPTANCE_NOTES.get(k, [])) or "no details recorded"
        tr.write_line(f"criterion {k}: {status}  {notes}")
