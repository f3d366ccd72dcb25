import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from helpers import ex3_base  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def base3():
    return ex3_base()


@pytest.fixture
def toy_path():
    return os.path.join(DATA, "toy.mm")


@pytest.fixture(scope="session")
def toy_db():
    from proofgram.metamath import mm_read
    return mm_read(os.path.join(DATA, "toy.mm"))


@pytest.fixture(scope="session")
def toy_kb(toy_db):
    from proofgram.metamath import extract_kb
    return extract_kb(toy_db)


# ---------------------------------------------------------------------------
# per-criterion pass/fail report for the acceptance suite

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or not (rep.when == "call" or rep.outcome != "passed"):
        return
    status = "xfailed" if hasattr(rep, "wasxfail") else rep.outcome
    detail = ""
    if status == "skipped" and isinstance(rep.longrepr, tuple):
        detail = rep.longrepr[2].removeprefix("Skipped: ")
    _criteria.setdefault(m.args[0], []).append((status, detail))


def _verdict(parts):
    states = [s for s, _ in parts]
    skipped = sorted({d for s, d in parts if s == "skipped"})
    if "failed" in states:
        return "FAIL", f"{states.count('failed')} of {len(parts)} checks failed"
    if "passed" in states:
        note = f"{states.count('skipped')} of {len(parts)} checks skipped: " + "; ".join(skipped)
        return "PASS", note if skipped else ""
    if "xfailed" in states:
        return "XFAIL", ""
    return "SKIP", "; ".join(skipped)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        verdict, detail = _verdict(_criteria[n])
        tr.write_line(f"criterion {n:>2}: {verdict}" + (f" ({detail})" if detail else ""))
