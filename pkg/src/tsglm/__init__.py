"""Two-step general linear methods with continuous output for retarded
functional differential equations, plus an exact order-condition checker."""
from .history import DenseSegment, HistoryFn, InitialFunction, StageView
from .integrator import Problem, Solution, StepRecord, integrate, observed_order, step
from .methods import get_method, make_order4, make_order5, make_rk4_linear, make_starter
from .order import OrderReport, build_gammas, order_report, uniform_order, uniform_stage_order
from .poly import Poly, QuadScalar, sqrt41
from .problems import TestProblem, get_problem
from .tableau import Tableau, is_explicit, is_one_step, validate

__all__ = [
    "DenseSegment", "HistoryFn", "InitialFunction", "StageView",
    "Problem", "Solution", "StepRecord", "integrate", "observed_order", "step",
    "get_method", "make_order4", "make_order5", "make_rk4_linear", "make_starter",
    "OrderReport", "build_gammas", "order_report", "uniform_order", "uniform_stage_order",
    "Poly", "QuadScalar", "sqrt41", "TestProblem", "get_problem",
    "Tableau", "is_explicit", "is_one_step", "validate",
]
