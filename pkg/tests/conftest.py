import pytest

from opidforge.bike import bike_ocpn, log_l1, log_l2
from opidforge.transform import t1, tr

CRITERIA = {
    1: "worked examples",
    2: "structural counts",
    3: "lowering preserves acceptance (random nets)",
    4: "links preserve acceptance iff relationships hold (random nets)",
    5: "relationship mining vs brute force",
    6: "format round trips and deterministic DOT",
    7: "best-effort discover run documented",
}

_results = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_results] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the summary."""
    store = request.config.stash[_results]

    def record(number, ok, detail=""):
        store[number] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash[_results]
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in CRITERIA.items():
        ok, detail = store.get(number, (False, "not run"))
        line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f" - {detail}" if detail else ""))


@pytest.fixture
def bike():
    return bike_ocpn()


@pytest.fixture
def l1():
    return log_l1()


@pytest.fixture
def l2():
    return log_l2()


WF, HF, FH = ("Wheel", "Frame"), ("Handlebar", "Frame"), ("Frame", "Handlebar")


@pytest.fixture
def bike_t1(bike):
    return t1(bike)


@pytest.fixture
def bike_tr(bike_t1):
    return tr(bike_t1, [WF, HF])
