"""Quadrature-defect polynomials and uniform (stage) order certification.

For a tableau the defect polynomials are

    G_k(alpha)  = 1/(k-1)! [ (1-v)(-1)^k/k + sum_j b_tilde_j (-(1-c_j))^(k-1)
                             + sum_j b_j c_j^(k-1) - alpha^k/k ]

and ``G_ik`` the same expression with ``(u_i, a_tilde_ij, a_ij)``. ``G_k``
lives on [0, 1] and ``G_ik`` on [0, c_i]; vanishing is always judged on that
domain, so for ``c_i = 0`` only the value at zero counts.

Certification chain: order 1 iff G_1 = 0; with G_1 = G_i1 = 0, order 2 iff
G_2 = 0; order 3 and 4 through the grouped product conditions; beyond that
only "stage order p and G_(p+1) = 0 gives order p+1".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from .poly import Poly, coerce_scalar, format_scalar, one_scalar, zero_scalar
from .tableau import Tableau, distinct_abscissae


@dataclass(frozen=True)
class GammaSet:
    gamma: dict          # k -> Poly
    gamma_stage: dict    # (i, k) -> Poly, i 0-based
    k_max: int
    tableau: Tableau = field(repr=False)


@dataclass(frozen=True)
class Witness:
    condition: str
    poly: object
    first_nonzero: object


@dataclass
class OrderReport:
    uniform_stage_order: int
    uniform_order: int
    discrete_order_at_1: int
    witnesses: list
    notes: list
    barrier: tuple | None = None    # (k, (k-1)! * G_k(1))


def _kpoly(t: Tableau, k: int, one_minus, tilde, coef) -> Poly:
    kind = t.kind
    one = one_scalar(kind)
    alpha = Poly.x(kind)
    sign = one if k % 2 == 0 else -one
    acc = one_minus * (sign / coerce_scalar(k, kind))
    for j in range(t.s):
        cj = t.c[j]
        acc = acc + tilde[j] * (-(one - cj)) ** (k - 1) + coef[j] * cj ** (k - 1)
    acc = acc - alpha ** k / k
    return acc / math.factorial(k - 1)


def defect_bracket(t: Tableau, k: int, stage: int | None = None) -> Poly:
    """``(k-1)! * G_k`` (or ``(k-1)! * G_ik`` for a 0-based stage)."""
    return _gamma(t, k, stage) * math.factorial(k - 1)


def _gamma(t: Tableau, k: int, stage: int | None) -> Poly:
    one = Poly.const(one_scalar(t.kind), t.kind)
    if stage is None:
        return _kpoly(t, k, one - t.v, t.b_tilde, t.b)
    i = stage
    return _kpoly(t, k, one - t.u[i], t.a_tilde[i], t.a[i])


def build_gammas(t: Tableau, k_max: int) -> GammaSet:
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    gamma = {k: _gamma(t, k, None) for k in range(1, k_max + 1)}
    gamma_stage = {(i, k): _gamma(t, k, i) for i in range(t.s) for k in range(1, k_max + 1)}
    return GammaSet(gamma, gamma_stage, k_max, t)


def on_domain(p: Poly, c) -> Poly:
    """Restrict ``p`` to [0, c]; a degenerate interval keeps only p(0)."""
    zero = zero_scalar(p.kind)
    if c == zero:
        return Poly([p(zero)], p.kind)
    return p


def _tol(t: Tableau, tol: float | None) -> float:
    if t.kind != "real":
        return 0.0
    return 1e-10 if tol is None else tol


def _vanishes(p: Poly, tol: float) -> bool:
    return p.is_zero(tol)


def _first_nonzero(p: Poly, tol: float = 0.0):
    for k, x in enumerate(p.coeffs):
        if (abs(x) > tol) if p.kind == "real" else bool(x):
            return (k, x)
    return None


def stage_order_failures(g: GammaSet, k: int, tol: float | None = None) -> list[Witness]:
    t = g.tableau
    tol = _tol(t, tol)
    out = []
    if not _vanishes(g.gamma[k], tol):
        out.append(Witness(f"G_{k} = 0", g.gamma[k], _first_nonzero(g.gamma[k], tol)))
    for i in range(t.s):
        p = on_domain(g.gamma_stage[(i, k)], t.c[i])
        if not _vanishes(p, tol):
            out.append(Witness(f"G_{i + 1},{k} = 0 on [0, c_{i + 1}]", p, _first_nonzero(p, tol)))
    return out


def uniform_stage_order(g: GammaSet, tol: float | None = None) -> int:
    p = 0
    for k in range(1, g.k_max + 1):
        if stage_order_failures(g, k, tol):
            break
        p = k
    return p


def _tensor_sum(terms, kind):
    """Sum of outer products of coefficient vectors, as a sparse dict."""
    acc: dict = {}
    for polys in terms:
        if any(not p.coeffs for p in polys):
            continue
        for idx in product(*(range(len(p.coeffs)) for p in polys)):
            val = one_scalar(kind)
            for p, k in zip(polys, idx):
                val = val * p.coeffs[k]
            acc[idx] = acc.get(idx, zero_scalar(kind)) + val
    return acc


def _tensor_zero(acc: dict, kind: str, tol: float) -> bool:
    if kind == "real":
        return all(abs(x) <= tol for x in acc.values())
    return all(not x for x in acc.values())


def grouped_condition_failures(g: GammaSet, order: int, tol: float | None = None) -> list[Witness]:
    """Grouped product conditions needed on top of G_order = 0 (order 3 or 4)."""
    t = g.tableau
    tol = _tol(t, tol)
    da = distinct_abscissae(t)
    out = []
    if order == 3 or order == 4:
        kk = order - 1
        for m, grp in enumerate(da.groups):
            terms = [(t.b[i], on_domain(g.gamma_stage[(i, kk)], t.c[i])) for i in grp]
            acc = _tensor_sum(terms, t.kind)
            if not _tensor_zero(acc, t.kind, tol):
                out.append(Witness(f"sum_(c_i=c*_{m + 1}) b_i(alpha) G_i{kk}(beta) = 0", acc,
                                   _first_tensor(acc, t.kind, tol)))
    if order == 4:
        for m, grp_i in enumerate(da.groups):
            for l, grp_j in enumerate(da.groups):
                terms = [(t.b[i], on_domain(t.a[i][j], t.c[i]), on_domain(g.gamma_stage[(j, 2)], t.c[j]))
                         for i in grp_i for j in grp_j]
                acc = _tensor_sum(terms, t.kind)
                if not _tensor_zero(acc, t.kind, tol):
                    out.append(Witness(
                        f"sum_(c_i=c*_{m + 1}, c_j=c*_{l + 1}) b_i a_ij G_j2 = 0", acc,
                        _first_tensor(acc, t.kind, tol)))
    return out


def _first_tensor(acc, kind, tol):
    for idx in sorted(acc):
        x = acc[idx]
        if (abs(x) > tol) if kind == "real" else bool(x):
            return (idx, x)
    return None


def uniform_order(t: Tableau, g: GammaSet, tol: float | None = None,
                  notes: list | None = None) -> int:
    """Largest uniform order certified by the sufficient-condition chain (a lower bound)."""
    tl = _tol(t, tol)
    notes = notes if notes is not None else []
    chain = 0
    if _vanishes(g.gamma[1], tl):
        chain = 1
        if not stage_order_failures(g, 1, tol) and g.k_max >= 2 and _vanishes(g.gamma[2], tl):
            chain = 2
            for p in (3, 4):
                if g.k_max < p:
                    break
                if _vanishes(g.gamma[p], tl) and not grouped_condition_failures(g, p, tol):
                    chain = p
                else:
                    break
    ps = uniform_stage_order(g, tol)
    via_stage = ps
    if ps + 1 <= g.k_max and ps >= 1 and _vanishes(g.gamma[ps + 1], tl):
        via_stage = ps + 1
    p = max(chain, via_stage)
    if p >= 4 and p + 1 <= g.k_max and _vanishes(g.gamma[p + 1], tl) and ps < p:
        notes.append(f"indeterminate above order {p}: G_{p + 1} = 0 but no sufficient condition applies")
    return p


def discrete_order_barrier(g: GammaSet, k: int):
    """``(k-1)! * G_k(1)``: the unnormalized defect at the step end."""
    if k > g.k_max:
        raise ValueError(f"k={k} exceeds k_max={g.k_max}")
    t = g.tableau
    one = one_scalar(t.kind)
    return g.gamma[k](one) * math.factorial(k - 1)


def gamma_at_one(g: GammaSet, k: int):
    """Normalized ``G_k(1)``."""
    return g.gamma[k](one_scalar(g.tableau.kind))


def principal_error_poly(g: GammaSet, p: int) -> Poly:
    """``G_(p+1)``: the quadrature part of the leading local error term.

    The contribution of the stage-error feedback through f is not included.
    """
    if p + 1 > g.k_max:
        raise ValueError(f"need k_max >= {p + 1}")
    return g.gamma[p + 1]


def discrete_order_at_1(g: GammaSet, tol: float | None = None) -> int:
    t = g.tableau
    tl = _tol(t, tol)
    one = one_scalar(t.kind)
    k = 0
    for j in range(1, g.k_max + 1):
        val = g.gamma[j](one)
        if (abs(val) > tl) if t.kind == "real" else bool(val):
            break
        k = j
    return k


def order_report(t: Tableau, k_max: int | None = None, tol: float | None = None) -> OrderReport:
    if k_max is None:
        target = int(t.metadata.get("stage_order", 4))
        k_max = max(target + 2, 6)
    g = build_gammas(t, k_max)
    notes: list = []
    ps = uniform_stage_order(g, tol)
    p = uniform_order(t, g, tol, notes)
    witnesses = []
    if ps + 1 <= k_max:
        witnesses.extend(stage_order_failures(g, ps + 1, tol))
    if p < 4 and p >= 2 and p + 1 <= k_max:
        witnesses.extend(grouped_condition_failures(g, p + 1, tol))
    if p + 1 <= k_max:
        gp = g.gamma[p + 1]
        if not _vanishes(gp, _tol(t, tol)):
            w = Witness(f"G_{p + 1} = 0", gp, _first_nonzero(gp, _tol(t, tol)))
            if all(x.condition != w.condition for x in witnesses):
                witnesses.append(w)
    barrier = (p + 1, discrete_order_barrier(g, p + 1)) if p + 1 <= k_max else None
    return OrderReport(ps, p, discrete_order_at_1(g, tol), witnesses, notes, barrier)


def format_report(t: Tableau, rep: OrderReport) -> str:
    lines = [f"method: {t.name or '(unnamed)'}  [{t.kind}, s={t.s}]",
             f"  uniform order        {rep.uniform_order}",
             f"  uniform stage order  {rep.uniform_stage_order}",
             f"  discrete order at 1  {rep.discrete_order_at_1}  (necessary-condition bound)"]
    if rep.barrier is not None:
        k, val = rep.barrier
        lines.append(f"  barrier (k-1)!*G_{k}(1) = {format_scalar(val)}  ≈ {float(val):.10g}"
                     f"   normalized G_{k}(1) ≈ {float(val) / math.factorial(k - 1):.10g}")
    for w in rep.witnesses:
        lines.append(f"  fails: {w.condition}   first nonzero coefficient {_fmt_first(w.first_nonzero)}")
    for n in rep.notes:
        lines.append(f"  note: {n}")
    return "\n".join(lines)


def _fmt_first(fz):
    if fz is None:
        return "-"
    idx, val = fz
    return f"{idx}: {format_scalar(val)}"
