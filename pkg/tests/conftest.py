import os

import pytest

from sqfgap.oracle import PrimeTable


def pytest_collection_modifyitems(config, items):
    if os.environ.get("SQFGAP_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow; set SQFGAP_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def small_primes():
    return PrimeTable.up_to(10**5)


@pytest.fixture(scope="session")
def mid_primes():
    # enough for ranges up to about 1e12 + 1e9
    return PrimeTable.up_to(10**6 + 1000)


# one PASS/FAIL line per acceptance criterion at the end of the run

_acceptance: list[tuple[str, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    note = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    if rep.when == "call":
        _acceptance.append((number, "PASS" if rep.passed else "FAIL", title, note))
    elif rep.when == "setup" and rep.skipped:
        _acceptance.append((number, "SKIP", title, str(rep.longrepr[-1]) if rep.longrepr else ""))
    elif rep.when == "setup" and rep.failed:
        _acceptance.append((number, "FAIL", title, "setup error"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, title, note in sorted(_acceptance, key=lambda r: int(r[0])):
        line = f"AC{int(number):02d} {status} {title}"
        terminalreporter.write_line(line + (f"  [{note}]" if note else ""))
