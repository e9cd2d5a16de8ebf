import math
from fractions import Fraction

import numpy as np
import pytest

from tsglm.integrator import Problem, integrate
from tsglm.methods import (check_builtin, get_method, make_order4, make_order5, make_starter,
                           order5_c2)
from tsglm.poly import Poly, QuadScalar, one_scalar
from tsglm.tableau import is_one_step

X = Poly.x()


def test_order4_free_parameters():
    t = make_order4(X ** 2, X ** 2)
    assert t.a_tilde[1][1] == X ** 2 and t.b_tilde[1] == X ** 2
    assert t.name == "order4-custom"
    with pytest.raises(ValueError, match="vanish"):
        make_order4(Poly([1]), None)
    with pytest.raises(TypeError):
        make_order4(Poly([0.0, 1.0], "real"))


def test_order4_endpoint_values():
    t = make_order4()
    one = Fraction(1)
    assert t.b[1](one) == Fraction(1, 3)
    assert t.v(one) == 0
    assert t.u[1](one) == -4


def test_order5_abscissa_and_kind():
    t = make_order5()
    assert t.kind == "sqrt41"
    assert t.c[1] == order5_c2()
    assert abs(float(t.c[1]) - 0.4596876) < 1e-7
    assert t.metadata == {"order": 5, "stage_order": 4}


def test_registry():
    for name in ("order4", "order5", "starter", "rk4-linear"):
        check_builtin(get_method(name))
    with pytest.raises(KeyError):
        get_method("rk45")


def test_starter_is_one_step_classical_rk4():
    t = make_starter()
    assert is_one_step(t)
    one = Fraction(1)
    assert [t.b[j](one) for j in range(4)] == [Fraction(1, 6), Fraction(1, 3), Fraction(1, 3), Fraction(1, 6)]
    # at alpha = c_i the stage weights reduce to the classical ones
    assert t.a[1][0](Fraction(1, 2)) == Fraction(1, 2)
    assert t.a[2][0](Fraction(1, 2)) == 0 and t.a[2][1](Fraction(1, 2)) == Fraction(1, 2)
    assert t.a[3][2](one) == 1 and t.a[3][0](one) == 0


def test_starter_delay_free_order_at_least_four():
    prob = Problem(lambda t, x: x(0.0), lambda th: 1.0, 0.0, 0.0, 1.0)
    errs = []
    for h in (0.1, 0.05, 0.025, 0.0125):
        sol = integrate(make_starter(), prob, h)
        errs.append(abs(sol.endpoint()[0] - math.e))
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(rates[-2:]) >= 3.9


def _output_roots(t):
    # the output map at alpha = 1 applied to y' = 0 is y_{n+1} = (1 - v) y_{n-1} + v y_n
    v1 = float(t.v(one_scalar(t.kind)))
    return np.roots([1.0, -v1, -(1.0 - v1)])


def test_order4_is_weakly_zero_stable():
    roots = sorted(_output_roots(make_order4()).real)
    assert np.allclose(roots, [-1.0, 1.0])


def test_order5_parasitic_root():
    # documents why the order-5 coefficients diverge in floating point
    t = make_order5()
    v1 = t.v(QuadScalar(1))
    c = order5_c2()
    assert v1 == -4 * (5 * c * c - 15 * c + 8) / (5 * c * c - 1)
    roots = sorted(_output_roots(t).real)
    assert abs(roots[0] - (-153.84)) < 0.01 and abs(roots[1] - 1.0) < 1e-12
