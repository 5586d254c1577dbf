import pytest

from borel_cycles.cyclo import make_field
from borel_cycles.matrices import MatrixGroup

# criterion number -> (ok, detail); filled in by test_acceptance
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def F3():
    return make_field(3)


@pytest.fixture(scope="session")
def zeta3(F3):
    return F3.zeta(1)


@pytest.fixture
def G3(F3):
    return MatrixGroup(F3, 3)


@pytest.fixture(scope="session")
def x_result(zeta3):
    from borel_cycles.cycles import build_X

    return build_X(zeta3, residual="none")


@pytest.fixture(scope="session")
def cycle_znx(zeta3, x_result):
    from borel_cycles.cycles import build_cycle

    return build_cycle(zeta3, "Z-nX", 3, x=x_result)


@pytest.fixture(scope="session")
def cycle_tuples(cycle_znx):
    from borel_cycles.foxbar import psi
    from borel_cycles.regulator import preprocess

    return preprocess(psi(cycle_znx.chain, cycle_znx.group), cycle_znx.group)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
