import time

import pytest

from isgqd.catalog import load_catalog, semigroup_catalog

_ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    t0 = time.perf_counter()
    yield
    item.user_properties.append(("elapsed", time.perf_counter() - t0))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    number, title = marker
    elapsed = dict(report.user_properties).get("elapsed", 0.0)
    _ACCEPTANCE[number] = (title, "PASS" if report.passed else "FAIL", elapsed)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", tuple(m.args)))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, verdict, elapsed = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {title} ({elapsed:.1f} s)")


@pytest.fixture(scope="session")
def catalog():
    return semigroup_catalog()


@pytest.fixture(scope="session")
def small_catalog(catalog):
    return {k: S for k, S in catalog.items() if S.closed and S.size <= 120}


@pytest.fixture(scope="session")
def nonfl_tower():
    return load_catalog("tower_nonfl").tower
