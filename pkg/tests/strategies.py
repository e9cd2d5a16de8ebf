"""Shared hypothesis strategies."""
from fractions import Fraction

from hypothesis import strategies as st

from tsglm.poly import Poly, QuadScalar

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=50)
quads = st.builds(QuadScalar, fractions, fractions)


def rational_polys(max_degree=4):
    return st.lists(fractions, max_size=max_degree + 1).map(lambda cs: Poly(cs, "rational"))


def quad_polys(max_degree=3):
    return st.lists(quads, max_size=max_degree + 1).map(lambda cs: Poly(cs, "sqrt41"))


def vanishing_at_zero(max_degree=4):
    return st.lists(fractions, min_size=1, max_size=max_degree).map(
        lambda cs: Poly([Fraction(0)] + cs, "rational"))
