import pytest

ACCEPTANCE_IDS = range(1, 12)
_STASH = pytest.StashKey[dict]()


@pytest.fixture
def record_criterion(request):
    """Record one summary line for acceptance criterion ``n``.

    Call as ``record_criterion(n, passed, detail)``; the assertion that
    follows still decides the test outcome.
    """
    lines = request.config.stash.setdefault(_STASH, {})

    def record(n, passed, detail):
        lines[n] = ("PASS" if passed else "FAIL", detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_STASH, None)
    if not lines:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in ACCEPTANCE_IDS:
        status, detail = lines.get(n, ("ERROR", "not run or aborted before recording"))
        tr.write_line(f"criterion {n:2d}: {status:5s} {detail}")
