import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import H0  # noqa: E402

from qmetro.runner import run  # noqa: E402
from qmetro.scenario import reference_scenario  # noqa: E402

_ACCEPTANCE = []


@pytest.fixture
def h0():
    return H0.copy()


@pytest.fixture(scope="session")
def reference():
    return reference_scenario()


@pytest.fixture(scope="session")
def reference_report(reference):
    return run(reference)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__.endswith("test_acceptance"):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        label = doc + (f" [{item.callspec.id}]" if hasattr(item, "callspec") else "")
        _ACCEPTANCE.append((label, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    # one line per criterion, keyed by the leading "C<n>" of the label
    rollup = {}
    for label, outcome in _ACCEPTANCE:
        key = label.split()[0]
        rollup.setdefault(key, []).append(outcome == "passed")
    for key, oks in rollup.items():
        mark = "PASS" if all(oks) else "FAIL"
        terminalreporter.write_line(f"{mark}  {key} ({sum(oks)}/{len(oks)} sub-items)")
    terminalreporter.write_line("")
    for label, outcome in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  {mark}  {label}")
