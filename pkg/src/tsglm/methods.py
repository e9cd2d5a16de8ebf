"""Concrete methods: the two-stage order-4 family, the order-5 method and
the one-step continuous RK4 used as the starting procedure."""
from __future__ import annotations

from fractions import Fraction as F

from .poly import Poly, QuadScalar
from .tableau import Tableau, validate

_R = "rational"


def _x(kind=_R) -> Poly:
    return Poly.x(kind)


def make_order4(a_tilde_22: Poly | None = None, b_tilde_2: Poly | None = None) -> Tableau:
    """Two-stage explicit method with c = (0, 1), uniform order 4, stage order 3.

    ``a_tilde_22`` and ``b_tilde_2`` are free; both must vanish at alpha = 0.
    """
    at22 = Poly.zero(_R) if a_tilde_22 is None else a_tilde_22
    bt2 = Poly.zero(_R) if b_tilde_2 is None else b_tilde_2
    for label, p in (("a_tilde_22", at22), ("b_tilde_2", bt2)):
        if p.kind != _R:
            raise TypeError(f"{label} must have rational coefficients")
        if p(F(0)) != 0:
            raise ValueError(f"{label} must vanish at alpha = 0")
    a = _x()
    one = Poly.const(F(1))
    u2 = -(2 * a - 1) * (a + 1) ** 2
    v = (a - 1) ** 2 * (a + 1) ** 2
    at21 = a ** 2 * (a + 1)
    bt1 = -(a ** 2) * (a + 1) * (5 * a - 7) / 12
    a21 = a * (a + 1) ** 2 - at22
    b1 = -a * (2 * a - 3) * (a + 1) ** 2 / 3 - bt2
    b2 = a ** 2 * (a + 1) ** 2 / 12
    free = not (at22.is_zero() and bt2.is_zero())
    return Tableau.build(
        c=[0, 1],
        a=[[None, None], [a21, None]],
        a_tilde=[[None, None], [at21, at22]],
        u=[one, u2],
        b=[b1, b2],
        b_tilde=[bt1, bt2],
        v=v,
        name="order4" if not free else "order4-custom",
        kind=_R,
        meta={"order": 4, "stage_order": 3},
    )


def order5_c2() -> QuadScalar:
    """(11 - sqrt 41) / 10."""
    return QuadScalar(F(11, 10), F(-1, 10))


def make_order5() -> Tableau:
    """Two-stage explicit method, uniform order 5 and stage order 4, over Q(sqrt 41)."""
    K = "sqrt41"
    a = _x(K)
    one = Poly.const(QuadScalar(1))
    c = order5_c2()
    d5 = 5 * c * c - 1

    u2 = (a + 1) ** 2 * (1 - 2 * a + a ** 2 * (3 / (2 * c - 1)))
    v = -((a + 1) ** 2) * ((10 * a - 5) * (c * c) - a ** 2 * (15 * c) + (a + 1) * (6 * a ** 2 - 3 * a + 1)) / d5
    at21 = a ** 2 * (a + 1) - a ** 2 * (a + 1) ** 2 * ((3 * c - 1) / (2 * c * (2 * c - 1)))
    at22 = a ** 2 * (a + 1) ** 2 / (2 * c * (c - 1) * (2 * c - 1))
    bt1 = (a ** 2 * (a + 1)
           * (20 * c ** 4 - (30 * a + 10) * c ** 3 + (12 * a ** 2 + 3 * a - 13) * (c * c)
              + (4 * a ** 2 + 11 * a + 3) * c - 2 * a * (a + 1))
           / (4 * c * d5 * (c + 1)))
    bt2 = (a ** 2 * (a + 1) ** 2 * (5 * (c * c) - (4 * a - 3) * c - 2 * a)
           / (4 * c * d5 * (c - 1)))
    a21 = a * (a + 1) ** 2 * (1 - a * ((3 * c - 2) / (2 * (2 * c - 1) * (c - 1))))
    b1 = (a * (a + 1) ** 2
          * (20 * c ** 4 - (30 * a + 20) * c ** 3 + (12 * a ** 2 + 21 * a - 4) * (c * c)
             + (-4 * a ** 2 + 3 * a + 4) * c - 2 * a * (a + 1))
          / (4 * c * d5 * (c - 1)))
    b2 = -(a ** 2 * (a + 1) ** 2 * (5 * (c * c) - (4 * a + 7) * c + 2 * a + 2)
           / (4 * c * d5 * (c + 1)))
    return Tableau.build(
        c=[QuadScalar(0), c],
        a=[[None, None], [a21, None]],
        a_tilde=[[None, None], [at21, at22]],
        u=[one, u2],
        b=[b1, b2],
        b_tilde=[bt1, bt2],
        v=v,
        name="order5",
        kind=K,
        meta={"order": 5, "stage_order": 4},
    )


def make_starter() -> Tableau:
    """Continuous classical RK4 in one-step form (u = v = 1, no tilde terms).

    Stage polynomials are chosen so the grouped order-3 condition holds,
    which lifts the uniform order to 3; the discrete order is 4.
    """
    a = _x()
    one = Poly.const(F(1))
    b1 = a - 3 * a ** 2 / 2 + 2 * a ** 3 / 3
    b23 = a ** 2 - 2 * a ** 3 / 3
    b4 = -(a ** 2) / 2 + 2 * a ** 3 / 3
    return Tableau.build(
        c=[0, F(1, 2), F(1, 2), 1],
        a=[[None] * 4,
           [a, None, None, None],
           [a - 2 * a ** 2, 2 * a ** 2, None, None],
           [a - a ** 2, None, a ** 2, None]],
        a_tilde=None,
        u=[one] * 4,
        b=[b1, b23, b23, b4],
        b_tilde=None,
        v=one,
        name="starter",
        kind=_R,
        meta={"order": 3, "stage_order": 1},
    )


def make_rk4_linear() -> Tableau:
    """Continuous RK4 with linear stage polynomials (uniform order 2 by the chain)."""
    a = _x()
    one = Poly.const(F(1))
    b1 = a - 3 * a ** 2 / 2 + 2 * a ** 3 / 3
    b23 = a ** 2 - 2 * a ** 3 / 3
    b4 = -(a ** 2) / 2 + 2 * a ** 3 / 3
    return Tableau.build(
        c=[0, F(1, 2), F(1, 2), 1],
        a=[[None] * 4, [a, None, None, None], [None, a, None, None], [None, None, a, None]],
        a_tilde=None, u=[one] * 4, b=[b1, b23, b23, b4], b_tilde=None, v=one,
        name="rk4-linear", kind=_R, meta={"order": 2, "stage_order": 1},
    )


METHODS = {
    "order4": make_order4,
    "order5": make_order5,
    "starter": make_starter,
    "rk4-linear": make_rk4_linear,
}


def get_method(name: str) -> Tableau:
    try:
        return METHODS[name]()
    except KeyError:
        raise KeyError(f"unknown method {name!r}; choose from {sorted(METHODS)}") from None


def check_builtin(t: Tableau) -> Tableau:
    problems = validate(t)
    if problems:
        raise ValueError(f"{t.name}: " + "; ".join(problems))
    return t
