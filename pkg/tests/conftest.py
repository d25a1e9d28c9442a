import pytest
from hypothesis import settings

# numba compiles on first call, which blows the default per-example deadline
settings.register_profile("lbm", deadline=None)
settings.load_profile("lbm")

from lbm33.lattice import build_d2v33, build_d2v37

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def d2v33():
    return build_d2v33()


@pytest.fixture(scope="session")
def d2v37():
    return build_d2v37()


@pytest.fixture(scope="session", params=["d2v33", "d2v37"])
def any_lattice(request):
    return build_d2v33() if request.param == "d2v33" else build_d2v37()


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""
    def _add(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return _add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
