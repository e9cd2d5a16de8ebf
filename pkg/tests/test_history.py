import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tsglm.history import (ContinuityError, DenseSegment, HistoryDomainError, HistoryFn,
                           InitialFunction, StageView)


def seg(t0, h, *coeffs):
    return DenseSegment(t0, h, np.array(coeffs, dtype=float).reshape(len(coeffs), -1))


def linear_history(n=4, h=0.5):
    """phi = 1 on [-1, 0], then y = 1 - t in n segments."""
    hst = HistoryFn(InitialFunction(lambda th: 1.0, 1.0), 0.0)
    for k in range(n):
        hst = hst.append(seg(k * h, h, 1 - k * h, -h))
    return hst


def test_eval_initial_and_constant():
    hst = HistoryFn(InitialFunction(lambda th: 3.0, 2.0), 0.0)
    assert hst.eval(0.0)[0] == 3.0
    hst = hst.append(seg(0.0, 1.0, 3.0))
    assert hst.eval(-2.0)[0] == 3.0 and hst.eval(0.7)[0] == 3.0 and hst.eval(1.0)[0] == 3.0


def test_eval_segments_and_boundaries():
    hst = linear_history()
    for t in (0.0, 0.25, 0.5, 1.0, 1.3, 2.0):
        assert hst.eval(t)[0] == pytest.approx(1 - t, abs=1e-15)


def test_left_segment_owns_shared_endpoint():
    hst = HistoryFn(InitialFunction(lambda th: 0.0, 0.0), 0.0)
    hst = hst.append(seg(0.0, 1.0, 0.0, 1.0))
    hst = hst.append(DenseSegment(1.0, 1.0, np.array([[1.0], [5.0], [-5.0]])))
    # a query at t = 1 evaluates the left polynomial at alpha = 1
    assert hst.eval(1.0)[0] == 1.0


def test_domain_errors():
    hst = linear_history()
    with pytest.raises(HistoryDomainError):
        hst.eval(2.1)
    with pytest.raises(HistoryDomainError):
        hst.eval(-1.5)


def test_append_errors():
    hst = linear_history(2)
    with pytest.raises(ValueError, match="starts at"):
        hst.append(seg(1.5, 0.5, 0.0, -0.5))
    with pytest.raises(ContinuityError, match="continuity violation"):
        hst.append(seg(1.0, 0.5, 1e-6, -0.5))
    hst.append(seg(1.0, 0.5, 0.0, -0.5))


def test_snapshots_are_persistent():
    base = linear_history(2)
    a = base.append(seg(1.0, 0.5, 0.0, -0.5))
    b = base.append(seg(1.0, 0.5, 0.0, 2.0))
    assert len(base) == 2 and base.t_last == 1.0
    assert a.eval(1.5)[0] == pytest.approx(-0.5)
    assert b.eval(1.5)[0] == pytest.approx(2.0)
    with pytest.raises(HistoryDomainError):
        base.eval(1.25)


def test_shifted_view_matches_eval():
    hst = linear_history()
    view = hst.shifted(1.5)
    assert view(0.0)[0] == hst.eval(1.5)[0]
    assert view(-1.0)[0] == hst.eval(0.5)[0]
    assert hst.shifted(0.0)(-1.0)[0] == 1.0


class Recorder:
    def __init__(self, base):
        self.base = base
        self.calls = []

    def eval(self, t):
        self.calls.append(t)
        return self.base.eval(t)


def test_stage_view_routing():
    base = Recorder(linear_history(1))       # history on [-1, 0.5]
    overlay = seg(0.5, 0.5, 0.5, 100.0)      # clearly distinguishable values
    view = StageView(base, 0.5, 0.5, 0.5, overlay)
    # stage time 0.75; theta = -0.1 reaches 0.65 > sigma, so the overlay answers
    assert view(-0.1)[0] == pytest.approx(0.5 + 100.0 * 0.3)
    assert base.calls == []
    # the seam itself and anything earlier read the history
    assert view(-0.25)[0] == pytest.approx(0.5)
    assert view(-0.5)[0] == pytest.approx(0.75)
    assert base.calls == [0.5, 0.25]
    # theta = 0 is answered by the overlay at the stage abscissa
    assert view(0.0)[0] == pytest.approx(0.5 + 50.0)
    with pytest.raises(HistoryDomainError):
        view(0.01)


def test_stage_view_short_stage_never_crosses_seam():
    base = Recorder(linear_history(2))
    view = StageView(base, 1.0, 0.5, 0.2, seg(1.0, 0.5, 0.0, 1.0))
    view(-1.0)
    view(-0.5)
    assert len(base.calls) == 2


def test_pruning_keeps_reachable_segments():
    h = 0.1
    hst = HistoryFn(InitialFunction(lambda th: 0.0, 0.35), 0.0)
    full = hst
    for k in range(50):
        s = seg(k * h, h, k * h, h)
        hst = hst.append(s).pruned((k + 1) * h, 2 * h)
        full = full.append(s)
        t_cur = (k + 1) * h
        lo = max(-0.35, t_cur - 0.35)
        for t in np.linspace(lo, t_cur, 9):
            assert hst.eval(t)[0] == full.eval(t)[0]
    assert len(hst) < 10
    with pytest.raises(HistoryDomainError):
        hst.eval(1.0)


@settings(max_examples=50)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=4), st.floats(0.01, 2.0), st.floats(0, 1))
def test_segment_horner_matches_polyval(coeffs, h, alpha):
    s = DenseSegment(0.0, h, np.array(coeffs)[:, None])
    assert s.at(alpha)[0] == pytest.approx(np.polyval(coeffs[::-1], alpha), abs=1e-12)
    assert s.at_many([alpha])[0, 0] == pytest.approx(s.at(alpha)[0], abs=0)


def test_initial_function_validation():
    with pytest.raises(ValueError):
        InitialFunction(lambda th: 0.0, -1.0)
    with pytest.raises(ValueError):
        InitialFunction(lambda th: 0.0, math.inf)
    assert InitialFunction(lambda th: (1.0, 2.0), 0.0, 2)(0.0).shape == (2,)
