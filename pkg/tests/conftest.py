import random

import pytest

from moebius_crypto import MoebiusCipher, MoebiusPlane

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    number, text = mark.args
    prev = _CRITERIA.get(number, (text, True))[1]
    _CRITERIA[number] = (text, prev and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        text, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture(scope="session")
def plane2():
    return MoebiusPlane.of_order(2)


@pytest.fixture(scope="session")
def plane3():
    return MoebiusPlane.of_order(3)


@pytest.fixture(scope="session")
def plane4():
    return MoebiusPlane.of_order(4)


@pytest.fixture(scope="session")
def cipher4():
    return MoebiusCipher.of_order(4)


@pytest.fixture(scope="session")
def cipher5():
    return MoebiusCipher.of_order(5)


@pytest.fixture
def rng():
    return random.Random(20240611)
