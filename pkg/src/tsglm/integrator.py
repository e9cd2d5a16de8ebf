"""Fixed-step integration of retarded functional differential equations
with explicit two-step general linear methods."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .history import DenseSegment, HistoryFn, InitialFunction, StageView
from .methods import make_starter
from .poly import Poly, one_scalar
from .tableau import Tableau, is_explicit, is_one_step, validate


class StepError(RuntimeError):
    def __init__(self, msg, *, stage=None, t=None, step=None):
        self.stage = stage
        self.t = t
        self.step = step
        super().__init__(msg)


@dataclass(frozen=True)
class Problem:
    """``x'(t) = f(t, x_t)`` on [t0, T] with ``x_t0 = phi`` on [-r, 0].

    ``f`` is called as ``f(t, xt)`` where ``xt(theta)`` returns the state at
    ``t + theta`` for ``theta`` in [-r, 0].
    """

    f: Callable
    phi: Callable
    r: float
    t0: float
    T: float
    dim: int = 1

    def __post_init__(self):
        if self.T < self.t0:
            raise ValueError("T must not precede t0")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")

    @property
    def initial(self) -> InitialFunction:
        return InitialFunction(self.phi, self.r, self.dim)

    def with_end(self, T: float) -> "Problem":
        return Problem(self.f, self.phi, self.r, self.t0, T, self.dim)


@dataclass(frozen=True, eq=False)
class StepRecord:
    eta_prev: DenseSegment      # previous step's dense output
    k_prev: np.ndarray          # (s, dim) previous stage values
    t_prev: float               # start of the previous step

    @property
    def sigma(self) -> float:
        return self.eta_prev.t_end


@dataclass(eq=False)
class Solution:
    history: HistoryFn
    stats: dict
    status: str = "completed"
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "completed"

    @property
    def segments(self) -> list:
        return self.history.segments

    def __call__(self, t: float) -> np.ndarray:
        return self.history.eval(t)

    def endpoint(self) -> np.ndarray:
        return self.segments[-1].at(1.0)


# -- compiled tableau ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Rows:
    matrix: np.ndarray      # (degree + 1, n_terms)
    sources: tuple          # ("prev0",) | ("prev1",) | ("kbar", j) | ("k", j)


@dataclass(frozen=True, eq=False)
class CompiledTableau:
    tableau: Tableau
    c: np.ndarray
    stages: tuple
    output: _Rows

    @property
    def s(self) -> int:
        return self.tableau.s


def _rows(terms) -> _Rows:
    terms = [(p.to_real(), src) for p, src in terms if not p.is_zero()]
    deg = max(p.degree for p, _ in terms)
    m = np.zeros((deg + 1, len(terms)))
    for col, (p, _) in enumerate(terms):
        m[:len(p.coeffs), col] = p.coeffs
    return _Rows(m, tuple(src for _, src in terms))


@lru_cache(maxsize=64)
def compile_tableau(t: Tableau) -> CompiledTableau:
    one = Poly.const(one_scalar(t.kind), t.kind)
    stages = []
    for i in range(t.s):
        terms = [(one - t.u[i], ("prev0",)), (t.u[i], ("prev1",))]
        terms += [(t.a_tilde[i][j], ("kbar", j)) for j in range(t.s)]
        terms += [(t.a[i][j], ("k", j)) for j in range(t.s)]
        stages.append(_rows(terms))
    terms = [(one - t.v, ("prev0",)), (t.v, ("prev1",))]
    terms += [(t.b_tilde[j], ("kbar", j)) for j in range(t.s)]
    terms += [(t.b[j], ("k", j)) for j in range(t.s)]
    return CompiledTableau(t, np.array([float(x) for x in t.c]), tuple(stages), _rows(terms))


def _gather(sources, y_prev2, y_prev1, hkbar, hk) -> np.ndarray:
    out = []
    for src in sources:
        tag = src[0]
        if tag == "prev0":
            out.append(y_prev2)
        elif tag == "prev1":
            out.append(y_prev1)
        elif tag == "kbar":
            out.append(hkbar[src[1]])
        else:
            out.append(hk[src[1]])
    return np.vstack(out)


def _eval_f(prob: Problem, t: float, view, what: str) -> np.ndarray:
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            val = prob.f(t, view)
    except Exception as exc:  # noqa: BLE001 - re-raised with context
        raise StepError(f"right-hand side failed at {what}, t={t!r}: {exc}", t=t) from exc
    val = np.asarray(val, dtype=float).reshape(prob.dim)
    if not np.all(np.isfinite(val)):
        raise StepError(f"non-finite value at {what}, t={t!r}", t=t)
    return val


def step(t: Tableau, prob: Problem, rec: StepRecord, hst: HistoryFn, h: float,
         *, sigma: float | None = None, counter: list | None = None):
    """Advance one step of size ``h`` from ``sigma`` (default: end of ``rec``).

    Returns the new dense segment and the record for the next step.
    """
    ct = compile_tableau(t)
    if sigma is None:
        sigma = rec.sigma
    seg_prev = rec.eta_prev
    if h == seg_prev.h:
        y_prev2 = seg_prev.coeffs[0]
    else:
        y_prev2 = seg_prev.at((sigma - h - seg_prev.t_start) / seg_prev.h)
    y_prev1 = seg_prev.at(1.0)
    hkbar = h * np.asarray(rec.k_prev, dtype=float)
    K = np.zeros((ct.s, prob.dim))
    hk = np.zeros_like(K)
    for i, rows in enumerate(ct.stages):
        with np.errstate(over="ignore", invalid="ignore"):   # overflow surfaces as non-finite f
            stage_coeffs = rows.matrix @ _gather(rows.sources, y_prev2, y_prev1, hkbar, hk)
        overlay = DenseSegment(sigma, h, stage_coeffs)
        ti = sigma + ct.c[i] * h
        view = StageView(hst, sigma, h, ct.c[i], overlay)
        try:
            K[i] = _eval_f(prob, ti, view, f"stage {i + 1}")
        except StepError as exc:
            exc.stage = i + 1
            raise
        if counter is not None:
            counter[0] += 1
        hk[i] = h * K[i]
    out = ct.output
    with np.errstate(over="ignore", invalid="ignore"):
        coeffs = out.matrix @ _gather(out.sources, y_prev2, y_prev1, hkbar, hk)
    if not np.all(np.isfinite(coeffs)):
        raise StepError(f"non-finite step output at t={sigma!r}", t=sigma)
    seg = DenseSegment(sigma, h, coeffs)
    return seg, StepRecord(seg, K, sigma)


def initial_record(prob: Problem, s: int, h: float, k_filler=None) -> StepRecord:
    """Record for the first step: a constant segment at phi(0) ending at t0."""
    y0 = prob.initial(0.0)
    seg = DenseSegment(prob.t0 - h, h, y0[None, :].copy())
    kbar = np.zeros((s, prob.dim)) if k_filler is None else np.broadcast_to(
        np.asarray(k_filler, dtype=float), (s, prob.dim)).copy()
    return StepRecord(seg, kbar, prob.t0 - h)


def recompute_kbar(t: Tableau, prob: Problem, hst: HistoryFn, sigma: float, h: float,
                   counter: list | None = None) -> np.ndarray:
    """Stage values of a virtual previous step [sigma - h, sigma] read off the history."""
    c = compile_tableau(t).c
    out = np.zeros((t.s, prob.dim))
    for j in range(t.s):
        tj = sigma - h + c[j] * h
        out[j] = _eval_f(prob, tj, hst.shifted(tj), f"previous-stage value {j + 1}")
        if counter is not None:
            counter[0] += 1
    return out


def check_integrable(t: Tableau) -> None:
    problems = validate(t)
    if problems:
        raise ValueError(f"tableau {t.name!r} is not admissible: " + "; ".join(problems))
    if not is_explicit(t):
        raise ValueError(f"tableau {t.name!r} is implicit; only explicit methods are supported")
    if any(float(ci) > 1.0 for ci in t.c):
        raise ValueError("abscissae above 1 are not supported")


def integrate(t: Tableau, prob: Problem, h: float, *, starter: Tableau | None = None,
              retain: str = "full") -> Solution:
    """Integrate with fixed step ``h``.

    Two-step methods take their first step with ``starter`` (default: the
    continuous RK4 from :func:`tsglm.methods.make_starter`); one-step
    tableaux run as they are. If ``h`` does not divide the interval the
    final step is shortened and ``stats["nonuniform_final_step"]`` is set.
    ``retain="window"`` keeps only the segments the delay can still reach.
    """
    check_integrable(t)
    if retain not in ("full", "window"):
        raise ValueError("retain must be 'full' or 'window'")
    hst = HistoryFn(prob.initial, prob.t0)
    stats = {"steps": 0, "f_evals": 0, "nonuniform_final_step": False, "method": t.name}
    span = prob.T - prob.t0
    if span == 0:
        return Solution(hst, stats)
    if not h > 0:
        raise ValueError("step size must be positive")
    n_float = span / h
    if n_float < 1 - 1e-9:
        raise ValueError(f"step size {h} exceeds the integration interval {span}")
    n_steps = round(n_float)
    uniform = abs(n_float - n_steps) <= 1e-9 * max(1.0, n_float)
    if not uniform:
        n_steps = math.floor(n_float) + 1
        stats["nonuniform_final_step"] = True

    one_step = is_one_step(t)
    first = t if one_step else (starter or make_starter())
    if not one_step:
        check_integrable(first)
        if not is_one_step(first):
            raise ValueError("starter must be a one-step method")
    counter = [0]

    def finish(status="completed", reason=None):
        stats["f_evals"] = counter[0]
        return Solution(hst, stats, status, reason)

    rec = initial_record(prob, first.s, h)
    for n in range(n_steps):
        sigma = prob.t0 + n * h
        hn = h if (uniform or n < n_steps - 1) else prob.T - sigma
        tab = first if n == 0 else t
        try:
            if n == 1 and not one_step:
                rec = StepRecord(rec.eta_prev, recompute_kbar(t, prob, hst, sigma, h, counter), rec.t_prev)
            if hn != h and not one_step and n > 0:
                rec = StepRecord(rec.eta_prev, recompute_kbar(t, prob, hst, sigma, hn, counter), rec.t_prev)
            with np.errstate(over="ignore", invalid="ignore"):
                seg, rec = step(tab, prob, rec, hst, hn, sigma=sigma, counter=counter)
        except StepError as exc:
            exc.step = n + 1
            return finish("failed", f"step {n + 1}: {exc}")
        hst = hst.append(seg)
        if retain == "window":
            hst = hst.pruned(sigma + hn, 2 * h)
        stats["steps"] += 1
    return finish()


# -- error measurement ------------------------------------------------------------

def uniform_error(sol: Solution, exact: Callable, probe: int = 33) -> float:
    """Max-norm error over ``probe`` equispaced points per step (endpoints included)."""
    alphas = np.linspace(0.0, 1.0, probe)
    worst = 0.0
    for seg in sol.segments:
        approx = seg.at_many(alphas)
        ref = np.array([np.asarray(exact(seg.t_start + a * seg.h), dtype=float).reshape(-1)
                        for a in alphas])
        worst = max(worst, float(np.max(np.abs(approx - ref))))
    return worst


def endpoint_error(sol: Solution, exact: Callable) -> float:
    seg = sol.segments[-1]
    ref = np.asarray(exact(seg.t_end), dtype=float).reshape(-1)
    return float(np.max(np.abs(seg.at(1.0) - ref)))


def sample(sol: Solution, probe: int = 33):
    """``probe`` points per step plus the final endpoint: ``steps*probe + 1`` rows."""
    ts, ys = [], []
    alphas = np.arange(probe) / probe
    for seg in sol.segments:
        ts.extend(seg.t_start + alphas * seg.h)
        ys.append(seg.at_many(alphas))
    if sol.segments:
        last = sol.segments[-1]
        ts.append(last.t_end)
        ys.append(last.at(1.0)[None, :])
    else:
        ts.append(sol.history.t0)
        ys.append(sol.history.initial(0.0)[None, :])
    return np.asarray(ts), np.vstack(ys)


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    uniform_error: float
    endpoint_error: float
    uniform_rate: float | None
    endpoint_rate: float | None


def _rate(coarse: float, fine: float, ratio: float) -> float:
    if fine == 0 or coarse == 0:
        return math.inf if fine == 0 and coarse > 0 else math.nan
    return math.log(coarse / fine) / math.log(ratio)


def observed_order(t: Tableau, prob: Problem, exact: Callable | None, h_list,
                   probe: int = 33, workers: int | None = None) -> list:
    """Errors and observed rates for a sequence of halved step sizes."""
    if exact is None:
        raise ValueError("an exact solution is required for order estimation")
    h_list = [float(h) for h in h_list]
    if len(h_list) < 3:
        raise ValueError("need at least 3 step sizes")
    for a, b in zip(h_list, h_list[1:]):
        if not (b < a) or abs(a / b - 2.0) > 1e-9:
            raise ValueError("step sizes must halve successively")

    def run(h):
        with np.errstate(over="ignore", invalid="ignore"):
            sol = integrate(t, prob, h)
            if not sol.ok:
                return math.nan, math.nan
            return uniform_error(sol, exact, probe), endpoint_error(sol, exact)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        errs = list(pool.map(run, h_list))
    rows = []
    for k, (h, (eu, ee)) in enumerate(zip(h_list, errs)):
        if k == 0:
            rows.append(ConvergenceRow(h, eu, ee, None, None))
        else:
            ratio = h_list[k - 1] / h
            rows.append(ConvergenceRow(h, eu, ee, _rate(errs[k - 1][0], eu, ratio),
                                       _rate(errs[k - 1][1], ee, ratio)))
    return rows
