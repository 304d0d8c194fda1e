import sys

import pytest

from relhyp import audit, config
from relhyp.cosets import Constants


@pytest.fixture(scope="session")
def f2():
    return config.load("f2")


@pytest.fixture(scope="session")
def z2():
    return config.load("z2_z2")


@pytest.fixture(scope="session")
def f2h():
    return config.load("f2_hyperbolic")


@pytest.fixture(scope="session")
def w(f2):
    """Parse words in the F2 fixture."""
    return f2.parse


@pytest.fixture(scope="session")
def f2_ctx(f2):
    # C = 1 and D = 3 are what calibration yields on F2 (checked in test_cosets)
    return audit.Context(f2, radius=4, constants=Constants(1, 3, note="fixed for tests"))


@pytest.fixture(scope="session")
def z2_ctx(z2):
    return audit.Context(z2, radius=4, constants=Constants(1, 3, note="fixed for tests"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    rows = getattr(mod, "RESULTS", None)
    if not rows:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for r in sorted(rows, key=lambda r: r["n"]):
        secs = "n/a" if r["seconds"] is None else f"{r['seconds']:.1f}s"
        verdict = "PASS" if r["ok"] else "FAIL"
        line = f"criterion {r['n']}: {verdict} {r['title']} ({secs}, limit {r['limit']}s)"
        if r["notes"]:
            line += " | " + "; ".join(r["notes"])
        tr.write_line(line)
