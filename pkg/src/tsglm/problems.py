"""Built-in test problems with exact solutions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .integrator import Problem
from .poly import Poly


@dataclass(frozen=True)
class TestProblem:
    problem: Problem
    exact: Callable | None
    label: str
    breaking_points: tuple = ()
    smoothness_note: str = ""

    __test__ = False  # not a pytest class

    def residual(self, n: int = 100, delta: float = 1e-3) -> float:
        """Max of |y'(t) - f(t, y_t)| over ``n`` probe points, y the exact solution.

        The derivative is a five-point central difference; probes closer
        than ``3*delta`` to a breaking point are skipped.
        """
        if self.exact is None:
            raise ValueError(f"{self.label} has no exact solution")
        p = self.problem
        ex = self.exact
        worst = 0.0
        span = p.T - p.t0
        avoid = (p.t0,) + tuple(self.breaking_points)
        for k in range(n):
            t = p.t0 + (k + 0.5) * span / n
            d = delta
            if any(abs(t - b) < 3 * d for b in avoid):
                continue
            y = lambda s: np.asarray(ex(s), dtype=float).reshape(p.dim)
            deriv = (-y(t + 2 * d) + 8 * y(t + d) - 8 * y(t - d) + y(t - 2 * d)) / (12 * d)
            rhs = np.asarray(p.f(t, lambda th, t=t: y(t + th)), dtype=float).reshape(p.dim)
            worst = max(worst, float(np.max(np.abs(deriv - rhs))))
        return worst


def _integrate_from_zero(p: Poly) -> Poly:
    return Poly([Fraction(0)] + [c / (k + 1) for k, c in enumerate(p.coeffs)], "rational")


def linear_constant_delay(T: float = 4.0) -> TestProblem:
    """y'(t) = -y(t - 1), y = 1 on [-1, 0]; exact solution by the method of steps."""
    real = [p.to_real() for p in linear_constant_delay_pieces(max(1, math.ceil(T)) + 1)]

    def exact(t):
        if t <= 0:
            return 1.0
        k = min(math.ceil(t) - 1, len(real) - 1)
        return real[k](t - k)

    prob = Problem(lambda t, x: -x(-1.0), lambda th: 1.0, 1.0, 0.0, float(T))
    bps = tuple(float(k) for k in range(1, math.ceil(T)))
    return TestProblem(prob, exact, "linear_constant_delay", bps,
                       "derivative jump at t0 propagates to t = 1, 2, 3, ...")


def linear_constant_delay_pieces(n: int) -> list:
    """Exact rational pieces of the solution: ``pieces[k]`` is y on [k, k+1]
    in the local variable ``t - k``; y(t - 1) on piece k+1 is piece k."""
    pieces = [Poly([1, -1])]
    for _ in range(n - 1):
        prev = pieces[-1]
        pieces.append(Poly([prev(Fraction(1))]) - _integrate_from_zero(prev))
    return pieces


def manufactured_smooth(tau: float = 0.3, T: float = 2.0) -> TestProblem:
    """y'(t) = y(t - tau) + cos t - sin(t - tau) with phi = sin: y = sin t."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    f = lambda t, x: x(-tau) + math.cos(t) - math.sin(t - tau)
    return TestProblem(Problem(f, math.sin, tau, 0.0, T), math.sin,
                       "manufactured_smooth", (), "C-infinity; no breaking points")


def mildly_stiff(lam: float = -50.0, T: float = 2.0) -> TestProblem:
    """Prothero-Robinson type RFDE with exact solution sin t:

    y'(t) = lam (y(t) - sin t) + cos t + 0.1 (y(t - 1) - sin(t - 1)).
    """
    if lam > -1:
        raise ValueError("lambda must be <= -1")

    def f(t, x):
        return lam * (x(0.0) - math.sin(t)) + math.cos(t) + 0.1 * (x(-1.0) - math.sin(t - 1.0))

    return TestProblem(Problem(f, math.sin, 1.0, 0.0, T), math.sin,
                       "mildly_stiff", (), "smooth; stiffness from lambda")


def ode_reduction(T: float = 10.0) -> TestProblem:
    """y' = -y + cos t, y(0) = 1; only the current state is read."""
    f = lambda t, x: -x(0.0) + math.cos(t)
    exact = lambda t: 0.5 * (math.sin(t) + math.cos(t)) + 0.5 * math.exp(-t)
    return TestProblem(Problem(f, lambda th: 1.0, 0.0, 0.0, T), exact, "ode_reduction")


def rotation(tau: float = 0.5, T: float = 2.0) -> TestProblem:
    """y' = A y(t - tau) + g(t) with A the rotation generator; y = (cos t, sin t)."""
    def f(t, x):
        yd = x(-tau)
        ay = np.array([-yd[1], yd[0]])
        g = np.array([-math.sin(t) + math.sin(t - tau), math.cos(t) - math.cos(t - tau)])
        return ay + g

    exact = lambda t: np.array([math.cos(t), math.sin(t)])
    return TestProblem(Problem(f, exact, tau, 0.0, T, dim=2), exact, "rotation", (),
                       "C-infinity")


PROBLEMS = {
    "linear_constant_delay": linear_constant_delay,
    "manufactured_smooth": manufactured_smooth,
    "mildly_stiff": mildly_stiff,
    "ode_reduction": ode_reduction,
    "rotation": rotation,
}


def get_problem(label: str) -> TestProblem:
    try:
        return PROBLEMS[label]()
    except KeyError:
        raise KeyError(f"unknown problem {label!r}; choose from {sorted(PROBLEMS)}") from None
