import random
from fractions import Fraction

from hypothesis import strategies as st

from urysohn.core_metric import random_metric_space


@st.composite
def grid_spaces(draw, max_points=5, orders=(1, 2, 3, 4)):
    """Random metric spaces with distances on a grid [0,1]_m."""
    m = draw(st.sampled_from(orders))
    n = draw(st.integers(1, max_points))
    seed = draw(st.integers(0, 10**6))
    vals = [Fraction(k, m) for k in range(1, m + 1)]
    return m, random_metric_space(n, vals, random.Random(seed))


@st.composite
def rational_spaces(draw, max_points=5, den=24):
    n = draw(st.integers(1, max_points))
    seed = draw(st.integers(0, 10**6))
    vals = [Fraction(k, den) for k in range(1, den + 1)]
    return random_metric_space(n, vals, random.Random(seed))


unit_rationals = st.fractions(min_value=0, max_value=1, max_denominator=60)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
