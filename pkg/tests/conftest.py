"""Shared hypothesis strategies and small builders."""

from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from dcsets.plcalc import PLFunction

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

F = Fraction

small_q = st.fractions(min_value=-4, max_value=4, max_denominator=12)


@st.composite
def pl_functions(draw, lo=0, hi=1, min_pieces=1, max_pieces=7):
    """Random PL function on ``[lo, hi]`` with rational breakpoints and values."""
    lo, hi = F(lo), F(hi)
    m = draw(st.integers(min_pieces, max_pieces))
    inner = draw(st.lists(st.fractions(min_value=lo, max_value=hi, max_denominator=24), min_size=m - 1, max_size=m - 1))
    xs = sorted({lo, hi, *inner})
    ys = draw(st.lists(small_q, min_size=len(xs), max_size=len(xs)))
    return PLFunction(tuple(xs), tuple(ys))


@st.composite
def convex_pl(draw, lo=0, hi=1):
    """Random convex PL function: nondecreasing slopes."""
    lo, hi = F(lo), F(hi)
    m = draw(st.integers(1, 6))
    inner = draw(st.lists(st.fractions(min_value=lo, max_value=hi, max_denominator=24), min_size=m - 1, max_size=m - 1))
    xs = sorted({lo, hi, *inner})
    slopes = sorted(draw(st.lists(small_q, min_size=len(xs) - 1, max_size=len(xs) - 1)))
    y0 = draw(small_q)
    ys = [y0]
    for i, s in enumerate(slopes):
        ys.append(ys[-1] + s * (xs[i + 1] - xs[i]))
    return PLFunction(tuple(xs), tuple(ys))


def nondecreasing(seq) -> bool:
    return all(a <= b for a, b in zip(seq, seq[1:]))


# -- acceptance summary --------------------------------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    marks = dict(report.user_properties).get("criterion")
    if marks is None:
        return
    number, title = marks
    ok = _criteria.setdefault(number, [title, True])
    if report.failed or (report.when == "call" and report.outcome != "passed"):
        ok[1] = False


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}")
