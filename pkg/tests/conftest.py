import pytest

from latdisc.geometry import ConvexPolygon, Disc, build_cgamma


@pytest.fixture(scope="session")
def disc():
    return Disc()


@pytest.fixture(scope="session")
def square():
    return ConvexPolygon.square()


@pytest.fixture(scope="session")
def c3():
    return build_cgamma(3)


@pytest.fixture(scope="session")
def c4():
    return build_cgamma(4)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, name, passed, detail)."""
    def record(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {detail}"
        _CRITERIA.append((number, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
