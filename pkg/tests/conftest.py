import os

from hypothesis import HealthCheck, settings, strategies as st

from boolinf.core import BooleanFunction, Coalition

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile("ci", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def functions(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    table = draw(st.integers(0, (1 << (1 << n)) - 1))
    return BooleanFunction(n, table)


@st.composite
def function_and_coalition(draw, min_n=1, max_n=5):
    f = draw(functions(min_n, max_n))
    mask = draw(st.integers(0, (1 << f.n) - 1))
    return f, Coalition(f.n, mask)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
