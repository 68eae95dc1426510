import pytest

from stablemaps.target import make_point_target, make_projective_space

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def p1():
    return make_projective_space(1, 1)


@pytest.fixture(scope="session")
def p2():
    return make_projective_space(2, 1)


@pytest.fixture(scope="session")
def point():
    return make_point_target()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
