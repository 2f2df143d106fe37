import pytest
from hypothesis import HealthCheck, settings

from dypdl import Model
from dypdl.benchmarks import tsptw

settings.register_profile("suite", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

TWO_CUSTOMERS = tsptw.Instance(c=((0, 5, 6), (5, 0, 4), (6, 4, 0)), a=(0, 0, 0), b=(100, 100, 100))


@pytest.fixture
def two_customer_tsptw():
    return tsptw.build(TWO_CUSTOMERS)


def toy_model(n=6) -> Model:
    """Scope with one of everything, used by the expression tests."""
    m = Model("min", "integer")
    m.add_object_type("obj", n)
    m.add_variable("U", "set", [k for k in (0, 2) if k < n], object="obj")
    m.add_variable("V", "set", [k for k in (1, 2, 3) if k < n], object="obj")
    m.add_variable("i", "element", 0, object="obj")
    m.add_variable("j", "element", min(1, n - 1), object="obj")
    m.add_variable("t", "integer", 4, preference="less")
    m.add_variable("r", "integer", 2, preference="more")
    m.add_table("c", "integer", [[(a * 7 + b * 3) % 10 for b in range(n)] for a in range(n)],
                args=["obj", "obj"])
    m.add_table("w", "integer", [2, 3, 5, 7, 11, 13][:n] + [1] * max(0, n - 6), args=["obj"])
    m.add_table("e", "element", [(k + 1) % n for k in range(n)], args=["obj"], object="obj")
    m.add_table("P", "set", [[k2 for k2 in range(k)] for k in range(n)], args=["obj"], object="obj")
    m.add_table("cap", "integer", 10)
    return m


# One line per acceptance criterion, printed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
