"""Two-step general linear method tableaux with polynomial coefficients.

A tableau holds the abscissae ``c`` and the coefficient functions
``a, a_tilde`` (s x s), ``u, b, b_tilde`` (length s) and ``v``, all as
:class:`~tsglm.poly.Poly` in the variable alpha. The stage function of
stage ``i`` is

    Y_i(alpha h) = (1 - u_i) eta_bar(0) + u_i eta_bar(h)
                   + h sum_j a_tilde_ij K_bar_j + h sum_j a_ij K_j

and the step output replaces ``(u_i, a_tilde_ij, a_ij)`` by ``(v, b_tilde_j, b_j)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .poly import (KINDS, Poly, coerce_scalar, format_scalar, parse_scalar,
                   zero_scalar)


@dataclass(frozen=True)
class Tableau:
    s: int
    c: tuple
    a: tuple          # a[i][j], Poly
    a_tilde: tuple
    u: tuple
    b: tuple
    b_tilde: tuple
    v: Poly
    name: str = ""
    kind: str = "rational"
    meta: tuple = field(default=(), compare=False)

    def __post_init__(self):
        s = self.s
        if s < 1:
            raise ValueError("stage count must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"unknown scalar kind {self.kind!r}")
        for label, seq in (("c", self.c), ("u", self.u), ("b", self.b), ("b_tilde", self.b_tilde)):
            if len(seq) != s:
                raise ValueError(f"{label} must have length {s}, got {len(seq)}")
        for label, mat in (("a", self.a), ("a_tilde", self.a_tilde)):
            if len(mat) != s or any(len(row) != s for row in mat):
                raise ValueError(f"{label} must be {s}x{s}")
        for p in self.polys():
            if p.kind != self.kind:
                raise TypeError(f"scalar-kind mismatch: tableau is {self.kind}, coefficient is {p.kind}")
        object.__setattr__(self, "c", tuple(coerce_scalar(ci, self.kind) for ci in self.c))

    @classmethod
    def build(cls, c: Sequence, a, a_tilde, u, b, b_tilde, v, *, name="", kind=None, meta=None):
        """Build from nested sequences; ``None`` entries become zero polynomials."""
        s = len(c)
        if kind is None:
            kind = next((p.kind for p in _flatten(a, a_tilde, u, b, b_tilde, [v])
                         if isinstance(p, Poly)), "rational")

        def P(x):
            if x is None:
                return Poly.zero(kind)
            return x if isinstance(x, Poly) else Poly.const(coerce_scalar(x, kind), kind)

        def mat(m):
            m = m if m is not None else [[None] * s for _ in range(s)]
            return tuple(tuple(P(x) for x in row) for row in m)

        def vec(x):
            x = x if x is not None else [None] * s
            return tuple(P(e) for e in x)

        return cls(s=s, c=tuple(c), a=mat(a), a_tilde=mat(a_tilde), u=vec(u), b=vec(b),
                   b_tilde=vec(b_tilde), v=P(v), name=name, kind=kind,
                   meta=tuple(sorted((meta or {}).items())))

    def polys(self):
        for row in self.a:
            yield from row
        for row in self.a_tilde:
            yield from row
        yield from self.u
        yield from self.b
        yield from self.b_tilde
        yield self.v

    @property
    def metadata(self) -> dict:
        return dict(self.meta)

    def to_real(self) -> "Tableau":
        r = lambda p: p.to_real()
        return Tableau(
            s=self.s, c=tuple(float(x) for x in self.c),
            a=tuple(tuple(map(r, row)) for row in self.a),
            a_tilde=tuple(tuple(map(r, row)) for row in self.a_tilde),
            u=tuple(map(r, self.u)), b=tuple(map(r, self.b)),
            b_tilde=tuple(map(r, self.b_tilde)), v=self.v.to_real(),
            name=self.name, kind="real", meta=self.meta)


def _flatten(*items):
    for it in items:
        if it is None:
            continue
        for x in it:
            if isinstance(x, (list, tuple)):
                yield from x
            else:
                yield x


@dataclass(frozen=True)
class DistinctAbscissae:
    c_star: tuple
    groups: tuple     # groups[m] = tuple of 0-based stage indices with c_i == c_star[m]


def validate(t: Tableau) -> list[str]:
    """Structural violations (empty list if the tableau is admissible)."""
    out = []
    zero = zero_scalar(t.kind)
    for i, ci in enumerate(t.c):
        if ci < zero:
            out.append(f"c{i + 1} < 0")
    for i in range(t.s):
        if t.u[i](zero) != 1:
            out.append(f"u{i + 1}(0) ≠ 1")
        for j in range(t.s):
            if t.a[i][j](zero) != 0:
                out.append(f"a{i + 1}{j + 1}(0) ≠ 0")
            if t.a_tilde[i][j](zero) != 0:
                out.append(f"a_tilde{i + 1}{j + 1}(0) ≠ 0")
    for j in range(t.s):
        if t.b[j](zero) != 0:
            out.append(f"b{j + 1}(0) ≠ 0")
        if t.b_tilde[j](zero) != 0:
            out.append(f"b_tilde{j + 1}(0) ≠ 0")
    if t.v(zero) != 1:
        out.append("v(0) ≠ 1")
    return out


def is_explicit(t: Tableau) -> bool:
    return all(t.a[i][j].is_zero() for i in range(t.s) for j in range(i, t.s))


def is_one_step(t: Tableau, tol: float = 0.0) -> bool:
    """True if the method is the one-step RK method (u = v = 1, a_tilde = b_tilde = 0)."""
    one = Poly.const(1, t.kind) if t.kind != "real" else Poly([1.0], "real")
    return (all((ui - one).is_zero(tol) for ui in t.u)
            and (t.v - one).is_zero(tol)
            and all(p.is_zero(tol) for row in t.a_tilde for p in row)
            and all(p.is_zero(tol) for p in t.b_tilde))


def distinct_abscissae(t: Tableau) -> DistinctAbscissae:
    c_star = sorted(set(t.c))
    groups = tuple(tuple(i for i, ci in enumerate(t.c) if ci == cm) for cm in c_star)
    return DistinctAbscissae(tuple(c_star), groups)


# -- text format ---------------------------------------------------------------
#
#   # comment
#   name = order5
#   kind = sqrt41
#   s = 2
#   order = 5
#   c = [0, (11/10, -1/10)√41]
#   u[1] = [1]
#   a[2][1] = [0, 1, 2]
#   ...
#
# Polynomials are degree-ordered coefficient lists. Every coefficient entry
# must be present so that a truncated file is detected.

class TableauParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


_HEADER_KEYS = ("name", "kind", "s")
_LINE = re.compile(r"^\s*([A-Za-z_]+)((?:\[\d+\])*)\s*=\s*(.*?)\s*$")


def _split_list(text: str) -> list[str]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError("expected a bracketed list")
    body = text[1:-1].strip()
    if not body:
        return []
    items, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    items.append("".join(cur))
    if any(not x.strip() for x in items):
        raise ValueError("empty list item")
    return [x.strip() for x in items]


def serialize(t: Tableau) -> str:
    def plist(p: Poly) -> str:
        return "[" + ", ".join(format_scalar(x) for x in p.coeffs) + "]"

    lines = [f"name = {t.name}", f"kind = {t.kind}", f"s = {t.s}"]
    for k, val in t.meta:
        lines.append(f"{k} = {val}")
    lines.append("c = [" + ", ".join(format_scalar(x) for x in t.c) + "]")
    for i in range(t.s):
        lines.append(f"u[{i + 1}] = {plist(t.u[i])}")
    for label, mat in (("a", t.a), ("a_tilde", t.a_tilde)):
        for i in range(t.s):
            for j in range(t.s):
                lines.append(f"{label}[{i + 1}][{j + 1}] = {plist(mat[i][j])}")
    for label, vec in (("b", t.b), ("b_tilde", t.b_tilde)):
        for j in range(t.s):
            lines.append(f"{label}[{j + 1}] = {plist(vec[j])}")
    lines.append(f"v = {plist(t.v)}")
    return "\n".join(lines) + "\n"


_META_KEYS = ("order", "stage_order")


def parse(text: str) -> Tableau:
    header: dict = {}
    entries: dict = {}
    meta: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise TableauParseError(f"cannot parse {raw.strip()!r}", lineno)
        key, idx, val = m.group(1), m.group(2), m.group(3)
        index = tuple(int(x) for x in re.findall(r"\d+", idx))
        if key in _HEADER_KEYS and not index:
            header[key] = (val, lineno)
        elif key in _META_KEYS and not index:
            try:
                meta[key] = int(val)
            except ValueError:
                raise TableauParseError(f"{key} must be an integer", lineno) from None
        else:
            if (key, index) in entries:
                raise TableauParseError(f"duplicate entry {key}{idx}", lineno)
            entries[(key, index)] = (val, lineno)

    for k in ("kind", "s"):
        if k not in header:
            raise TableauParseError(f"missing header key {k!r}")
    kind, kline = header["kind"]
    if kind not in KINDS:
        raise TableauParseError(f"unknown kind {kind!r}", kline)
    try:
        s = int(header["s"][0])
        if s < 1:
            raise ValueError
    except ValueError:
        raise TableauParseError("s must be a positive integer", header["s"][1]) from None

    def take(key, index, shape):
        if (key, index) not in entries:
            where = key + "".join(f"[{k}]" for k in index)
            raise TableauParseError(f"missing entry {where}")
        val, lineno = entries.pop((key, index))
        try:
            items = [parse_scalar(x, kind) for x in _split_list(val)]
        except (ValueError, ZeroDivisionError) as exc:
            raise TableauParseError(str(exc), lineno) from None
        if shape == "vector" and len(items) != s:
            raise TableauParseError(f"{key} needs {s} entries", lineno)
        return items if shape == "vector" else Poly(items, kind)

    c = take("c", (), "vector")
    u = [take("u", (i,), "poly") for i in range(1, s + 1)]
    a = [[take("a", (i, j), "poly") for j in range(1, s + 1)] for i in range(1, s + 1)]
    at = [[take("a_tilde", (i, j), "poly") for j in range(1, s + 1)] for i in range(1, s + 1)]
    b = [take("b", (j,), "poly") for j in range(1, s + 1)]
    bt = [take("b_tilde", (j,), "poly") for j in range(1, s + 1)]
    v = take("v", (), "poly")
    if entries:
        (key, index), (_, lineno) = min(entries.items(), key=lambda kv: kv[1][1])
        raise TableauParseError(f"unexpected entry {key}{list(index)}", lineno)
    name = header.get("name", ("", 0))[0]
    return Tableau.build(c, a, at, u, b, bt, v, name=name, kind=kind, meta=meta)


def load(path) -> Tableau:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(t: Tableau, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(t))
