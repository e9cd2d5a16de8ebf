"""Univariate polynomials in the step fraction alpha.

Coefficients live in one of three scalar kinds:

* ``"rational"`` -- :class:`fractions.Fraction` (ints are promoted),
* ``"sqrt41"``   -- :class:`QuadScalar`, exact numbers ``a + b*sqrt(41)``,
* ``"real"``     -- Python floats.

A polynomial never mixes kinds. Exact kinds make "is this polynomial
identically zero" a decidable coefficient test.
"""
from __future__ import annotations

import decimal
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

RADICAND = 41
KINDS = ("rational", "sqrt41", "real")


class QuadScalar:
    """Exact element ``a + b*sqrt(41)`` of the field Q(sqrt 41)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def coerce(cls, x) -> "QuadScalar":
        if isinstance(x, QuadScalar):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadScalar")

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - RADICAND * self.b * self.b

    def __add__(self, other):
        try:
            o = QuadScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadScalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b)

    def __sub__(self, other):
        try:
            o = QuadScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadScalar(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QuadScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadScalar(self.a * o.a + RADICAND * self.b * o.b,
                          self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QuadScalar.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("QuadScalar division by zero")
        num = self * o.conjugate()
        return QuadScalar(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return QuadScalar.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out, base = QuadScalar(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = QuadScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(41)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 41 b^2
        d = self.a * self.a - RADICAND * self.b * self.b
        return sa if d > 0 else (-sa if d < 0 else 0)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        if self.b == 0:
            return float(self.a)
        # Enough working digits that the final rounding to double is the
        # only rounding that matters, even under heavy cancellation.
        size = max(len(str(x)) for x in (self.a.numerator, self.a.denominator,
                                          self.b.numerator, self.b.denominator))
        with decimal.localcontext() as ctx:
            ctx.prec = 2 * size + 60
            D = decimal.Decimal
            val = (D(self.a.numerator) / D(self.a.denominator)
                   + D(self.b.numerator) / D(self.b.denominator) * D(RADICAND).sqrt())
            return float(val)

    def __repr__(self):
        return f"QuadScalar({self.a}, {self.b})"

    def __str__(self):
        return format_scalar(self)


def sqrt41() -> QuadScalar:
    return QuadScalar(0, 1)


def scalar_kind(x) -> str:
    if isinstance(x, QuadScalar):
        return "sqrt41"
    if isinstance(x, float):
        return "real"
    if isinstance(x, Rational) and not isinstance(x, bool):
        return "rational"
    raise TypeError(f"unsupported scalar type {type(x).__name__}")


def coerce_scalar(x, kind: str):
    """Convert ``x`` into ``kind``; only lossless promotions are allowed."""
    if kind == "rational":
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return Fraction(x)
    elif kind == "sqrt41":
        if isinstance(x, (int, Fraction, QuadScalar)) and not isinstance(x, bool):
            return QuadScalar.coerce(x)
    elif kind == "real":
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            return float(x)
    else:
        raise ValueError(f"unknown scalar kind {kind!r}")
    raise TypeError(f"scalar-kind mismatch: {type(x).__name__} into {kind}")


def to_real_scalar(x) -> float:
    return float(x)


_ZERO = {"rational": Fraction(0), "sqrt41": QuadScalar(0), "real": 0.0}
_ONE = {"rational": Fraction(1), "sqrt41": QuadScalar(1), "real": 1.0}


def zero_scalar(kind: str):
    return _ZERO[kind]


def one_scalar(kind: str):
    return _ONE[kind]


class Poly:
    """Immutable polynomial ``sum(coeffs[k] * alpha**k)``."""

    __slots__ = ("coeffs", "kind")

    def __init__(self, coeffs: Iterable = (), kind: str | None = None):
        coeffs = list(coeffs)
        if kind is None:
            kind = _infer_kind(coeffs)
        if kind not in KINDS:
            raise ValueError(f"unknown scalar kind {kind!r}")
        cs = [coerce_scalar(c, kind) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def zero(cls, kind: str = "rational") -> "Poly":
        return cls((), kind)

    @classmethod
    def const(cls, c, kind: str | None = None) -> "Poly":
        return cls([c], kind or scalar_kind(c))

    @classmethod
    def x(cls, kind: str = "rational") -> "Poly":
        return cls([0, 1], kind)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO[self.kind]

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.kind != self.kind:
                raise TypeError(f"scalar-kind mismatch: {self.kind} vs {other.kind}")
            return other
        return Poly([coerce_scalar(other, self.kind)], self.kind)

    def __add__(self, other):
        q = self._lift(other)
        n = max(len(self.coeffs), len(q.coeffs))
        return Poly([self.coeff(k) + q.coeff(k) for k in range(n)], self.kind)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.kind)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        q = self._lift(other)
        if not self.coeffs or not q.coeffs:
            return Poly.zero(self.kind)
        out = [_ZERO[self.kind]] * (len(self.coeffs) + len(q.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(q.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out, self.kind)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Poly):
            raise TypeError("polynomial division is not supported")
        s = coerce_scalar(scalar, self.kind)
        return Poly([c / s for c in self.coeffs], self.kind)

    def __pow__(self, k: int):
        out = Poly([1], self.kind)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, alpha):
        return poly_eval(self, alpha)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.kind == other.kind and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.kind, self.coeffs))

    def is_zero(self, tol: float = 0.0) -> bool:
        return poly_is_zero(self, tol)

    def to_real(self) -> "Poly":
        return Poly([float(c) for c in self.coeffs], "real")

    def __repr__(self):
        return f"Poly([{', '.join(format_scalar(c) for c in self.coeffs)}], kind={self.kind!r})"


def _infer_kind(coeffs: Sequence) -> str:
    kinds = {scalar_kind(c) for c in coeffs}
    if not kinds:
        return "rational"
    if "real" in kinds:
        if kinds - {"real", "rational"} or any(isinstance(c, Fraction) for c in coeffs):
            raise TypeError("scalar-kind mismatch: floats mixed with exact scalars")
        return "real"
    return "sqrt41" if "sqrt41" in kinds else "rational"


def poly_add(p: Poly, q: Poly) -> Poly:
    return p + q


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def poly_eval(p: Poly, alpha):
    """Horner evaluation; exact when both ``p`` and ``alpha`` are exact."""
    if not p.coeffs:
        return _ZERO[p.kind] if not isinstance(alpha, float) else 0.0
    acc = p.coeffs[-1]
    for c in reversed(p.coeffs[:-1]):
        acc = acc * alpha + c
    return acc


def poly_is_zero(p: Poly, tol: float = 0.0) -> bool:
    if p.kind != "real" or tol == 0:
        return all(not c for c in p.coeffs)
    return all(abs(c) <= tol for c in p.coeffs)


def format_scalar(x) -> str:
    """Encode a scalar for the tableau file: ``p/q``, ``(p/q, r/t)√41`` or a float repr."""
    if isinstance(x, QuadScalar):
        return f"({x.a}, {x.b})√41"
    if isinstance(x, float):
        return repr(x)
    return str(Fraction(x))


def parse_scalar(text: str, kind: str):
    text = text.strip()
    if kind == "sqrt41":
        t = text.replace("sqrt41", "√41")
        if t.endswith("√41"):
            inner = t[: -len("√41")].strip()
            if not (inner.startswith("(") and inner.endswith(")")):
                raise ValueError(f"malformed sqrt41 scalar {text!r}")
            parts = inner[1:-1].split(",")
            if len(parts) != 2:
                raise ValueError(f"malformed sqrt41 scalar {text!r}")
            return QuadScalar(Fraction(parts[0].strip()), Fraction(parts[1].strip()))
        return QuadScalar(Fraction(text))
    if kind == "rational":
        return Fraction(text)
    if kind == "real":
        v = float(text)
        if not math.isfinite(v):
            raise ValueError(f"non-finite coefficient {text!r}")
        return v
    raise ValueError(f"unknown scalar kind {kind!r}")
