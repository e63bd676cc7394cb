from fractions import Fraction

from hypothesis import strategies as st

# small rationals in [-1, 1], the natural domain of zonal functions
unit_rationals = st.builds(
    lambda p, q: Fraction(p, q) if abs(Fraction(p, q)) <= 1 else Fraction(q, p) if p else Fraction(0),
    st.integers(-40, 40),
    st.integers(1, 40),
)


def frac_matrix(rows):
    return [[Fraction(v) for v in row] for row in rows]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
