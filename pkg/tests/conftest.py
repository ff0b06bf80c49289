import math

import pytest

from pseudobosons.basis import ladder_family
from pseudobosons.models import EqhoParams, SwansonParams, build_eqho, build_swanson


@pytest.fixture(scope="session")
def eqho2():
    return build_eqho(EqhoParams(2.0), 128)


@pytest.fixture(scope="session")
def swanson6():
    return build_swanson(SwansonParams(math.pi / 6), 128)


@pytest.fixture(scope="session")
def eqho2_ladder16(eqho2):
    return ladder_family(eqho2, 16)


@pytest.fixture(scope="session")
def swanson6_ladder16(swanson6):
    return ladder_family(swanson6, 16)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
