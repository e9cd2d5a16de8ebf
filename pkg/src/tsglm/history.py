"""Piecewise-polynomial solution history and the shifted-function views
handed to right-hand sides."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

CONTINUITY_RTOL = 1e-12


class HistoryDomainError(ValueError):
    pass


class ContinuityError(ValueError):
    pass


@dataclass(frozen=True)
class InitialFunction:
    """Initial data on [-r, 0]; continuity is the caller's responsibility."""

    phi: Callable[[float], object]
    r: float
    dim: int = 1

    def __post_init__(self):
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise ValueError("delay horizon r must be finite and nonnegative")

    def __call__(self, theta: float) -> np.ndarray:
        return np.asarray(self.phi(theta), dtype=float).reshape(self.dim)


@dataclass(frozen=True, eq=False)
class DenseSegment:
    """Polynomial ``sum_k coeffs[k] * alpha**k`` on [t_start, t_start + h]."""

    t_start: float
    h: float
    coeffs: np.ndarray      # (degree + 1, dim)

    @property
    def t_end(self) -> float:
        return self.t_start + self.h

    def at(self, alpha: float) -> np.ndarray:
        c = self.coeffs
        acc = c[-1].copy()
        for k in range(len(c) - 2, -1, -1):
            acc = acc * alpha + c[k]
        return acc

    def at_many(self, alphas) -> np.ndarray:
        alphas = np.asarray(alphas, dtype=float)
        c = self.coeffs
        acc = np.broadcast_to(c[-1], (len(alphas), c.shape[1])).copy()
        for k in range(len(c) - 2, -1, -1):
            acc = acc * alphas[:, None] + c[k]
        return acc

    def __call__(self, t: float) -> np.ndarray:
        return self.at((t - self.t_start) / self.h)


class HistoryFn:
    """Solution on [t0 - r, t_last]: the initial function, then dense segments.

    Snapshots are persistent: :meth:`append` returns a new history and never
    changes what an older snapshot can see.
    """

    __slots__ = ("initial", "t0", "_segs", "_starts", "_lo", "_hi", "_floor")

    def __init__(self, initial: InitialFunction, t0: float, *, _segs=None, _starts=None,
                 _lo=0, _hi=0, _floor=None):
        self.initial = initial
        self.t0 = float(t0)
        self._segs = [] if _segs is None else _segs
        self._starts = [] if _starts is None else _starts
        self._lo = _lo
        self._hi = _hi
        self._floor = _floor

    @property
    def r(self) -> float:
        return self.initial.r

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def segments(self) -> list:
        return self._segs[self._lo:self._hi]

    @property
    def t_last(self) -> float:
        return self._segs[self._hi - 1].t_end if self._hi > self._lo else self.t0 if self._floor is None else self._floor

    @property
    def t_min(self) -> float:
        if self._floor is not None:
            return self._floor
        return self.t0 - self.r

    def __len__(self):
        return self._hi - self._lo

    @property
    def last(self) -> DenseSegment | None:
        return self._segs[self._hi - 1] if self._hi > self._lo else None

    def __call__(self, t: float) -> np.ndarray:
        return self.eval(t)

    def eval(self, t: float) -> np.ndarray:
        t_last = self.t_last
        slack = 8 * math.ulp(max(abs(t_last), abs(self.t_min), 1.0))
        if t > t_last + slack or t < self.t_min - slack:
            raise HistoryDomainError(
                f"history query t={t!r} outside domain [{self.t_min!r}, {t_last!r}]")
        if t <= self.t0 and self._floor is None:
            return self.initial(max(t - self.t0, -self.r))
        # left segment owns a shared endpoint
        k = bisect.bisect_left(self._starts, t, self._lo, self._hi) - 1
        k = max(k, self._lo)
        seg = self._segs[k]
        return seg.at((t - seg.t_start) / seg.h)

    def append(self, seg: DenseSegment) -> "HistoryFn":
        prev_end = self.t_last
        if abs(seg.t_start - prev_end) > 1e-9 * seg.h + 8 * math.ulp(prev_end):
            raise ValueError(f"segment starts at {seg.t_start!r}, history ends at {prev_end!r}")
        left = self.last.at(1.0) if self.last is not None else self.initial(0.0)
        right = seg.coeffs[0]
        gap = np.max(np.abs(left - right))
        if gap > CONTINUITY_RTOL * (1.0 + np.max(np.abs(left))):
            raise ContinuityError(f"continuity violation at t={seg.t_start!r}: jump {gap:.3e}")
        if self._hi == len(self._segs):
            segs, starts = self._segs, self._starts
        else:
            segs, starts = self._segs[:self._hi], self._starts[:self._hi]
        segs.append(seg)
        starts.append(seg.t_start)
        return HistoryFn(self.initial, self.t0, _segs=segs, _starts=starts,
                         _lo=self._lo, _hi=self._hi + 1, _floor=self._floor)

    def pruned(self, t_cur: float, slack: float) -> "HistoryFn":
        """Drop segments that end before ``t_cur - r - slack``."""
        cutoff = t_cur - self.r - slack
        lo = self._lo
        while lo < self._hi - 1 and self._segs[lo].t_end < cutoff:
            lo += 1
        if lo == self._lo:
            return self
        floor = self._segs[lo].t_start
        segs, starts, hi = self._segs, self._starts, self._hi
        if lo - 0 > (hi - lo):
            # compact into fresh lists; older snapshots keep the old ones
            segs, starts = segs[lo:hi], starts[lo:hi]
            hi, lo = hi - lo, 0
        return HistoryFn(self.initial, self.t0, _segs=segs, _starts=starts,
                         _lo=lo, _hi=hi, _floor=floor)

    def shifted(self, T: float) -> "ShiftedView":
        return ShiftedView(self, T)


class ShiftedView:
    """``x_T(theta) = x(T + theta)`` over a history."""

    __slots__ = ("base", "T")

    def __init__(self, base, T: float):
        self.base = base
        self.T = T

    def __call__(self, theta: float) -> np.ndarray:
        return self.base.eval(self.T + theta)


class StageView:
    """Shifted view of a stage function at time ``sigma + c*h``.

    Arguments up to ``sigma`` read the history; arguments in
    ``(sigma, sigma + c*h]`` read the stage polynomial.
    """

    __slots__ = ("base", "sigma", "h", "c", "overlay", "T")

    def __init__(self, base, sigma: float, h: float, c: float, overlay: DenseSegment):
        self.base = base
        self.sigma = sigma
        self.h = h
        self.c = c
        self.overlay = overlay
        self.T = sigma + c * h

    def __call__(self, theta: float) -> np.ndarray:
        return self.eval(self.T + theta)

    def eval(self, t: float) -> np.ndarray:
        if t <= self.sigma:
            return self.base.eval(t)
        if t > self.T:
            raise HistoryDomainError(f"stage view query t={t!r} beyond stage time {self.T!r}")
        return self.overlay.at((t - self.sigma) / self.h)
