"""The number tower: exact rationals, exact Q(sqrt d), and high-precision reals.

Rationals are plain :class:`fractions.Fraction` (ints are accepted and
promoted).  :class:`QuadExt` is ``a + b*sqrt(d)`` with rational ``a, b`` and a
squarefree ``d > 1``; its ordering is decided exactly.  :class:`Real` wraps an
mpmath ``mpf`` together with the working precision in bits.

Equality between a :class:`Real` and an exact scalar is refused; use
:func:`close` with an explicit tolerance instead.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

import mpmath

DEFAULT_PREC = 256


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def squarefree_part(d: int) -> tuple[int, int]:
    """Return ``(s, k)`` with ``d == s * k**2`` and ``s`` squarefree."""
    if d <= 0:
        raise ValueError("d must be positive")
    s, k = 1, 1
    m = d
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            s *= p
        p += 1
    s *= m
    return s, k


class QuadExt:
    """Element ``a + b*sqrt(d)`` of the real quadratic field Q(sqrt d)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=2):
        if d < 2 or squarefree_part(d)[0] != d:
            raise ValueError(f"d={d} is not a squarefree integer > 1")
        self.a = _frac(a)
        self.b = _frac(b)
        self.d = int(d)

    @classmethod
    def sqrt(cls, d: int) -> "QuadExt | Fraction":
        s, k = squarefree_part(d)
        if s == 1:
            return Fraction(k)
        return cls(0, k, s)

    # coercion -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt {self.d}) and Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.d)
        return None

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a * other, self.b * other, self.d)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a * o.a + self.d * self.b * o.b,
                       self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt(self.a / nrm, -self.b / nrm, self.d)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("QuadExt division by zero")
            return QuadExt(self.a / other, self.b / other, self.d)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadExt(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # order --------------------------------------------------------------
    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d*b^2
        lhs = self.a * self.a
        rhs = self.d * self.b * self.b
        return sa if lhs > rhs else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QuadExt with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, Real):
            raise TypeError("compare Real with exact scalars through close()")
        o = self._coerce(other) if isinstance(other, (int, Fraction, QuadExt)) else None
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def floor(self) -> int:
        """Exact floor, via integer square roots."""
        den = math.lcm(self.a.denominator, self.b.denominator)
        p = self.a.numerator * (den // self.a.denominator)
        q = self.b.numerator * (den // self.b.denominator)
        if q == 0:
            return p // den
        r = math.isqrt(q * q * self.d)
        # q^2 d is never a perfect square here, so sqrt is strictly between r and r+1
        whole = p + r if q > 0 else p - r - 1
        return whole // den

    def to_mpf(self, prec: int = DEFAULT_PREC):
        with mpmath.workprec(prec + 32):
            v = mpmath.mpf(self.a.numerator) / self.a.denominator
            v += mpmath.mpf(self.b.numerator) / self.b.denominator * mpmath.sqrt(self.d)
        return v

    def __float__(self):
        return float(self.to_mpf(128))

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


class Real:
    """A high-precision real number carrying its precision in bits."""

    __slots__ = ("v", "prec")

    def __init__(self, value, prec: int = DEFAULT_PREC):
        self.prec = int(prec)
        with mpmath.workprec(self.prec):
            if isinstance(value, Fraction):
                self.v = mpmath.mpf(value.numerator) / value.denominator
            elif isinstance(value, QuadExt):
                self.v = +value.to_mpf(self.prec)
            elif isinstance(value, Real):
                self.v = +value.v
            else:
                self.v = mpmath.mpf(value)

    def _other(self, other):
        if isinstance(other, Real):
            return other.v, min(self.prec, other.prec)
        if isinstance(other, (int, Fraction, QuadExt, float)):
            return Real(other, self.prec).v, self.prec
        return None, None

    def _op(self, other, fn):
        ov, prec = self._other(other)
        if ov is None:
            return NotImplemented
        with mpmath.workprec(prec):
            return Real(fn(self.v, ov), prec)

    def __add__(self, other):
        return self._op(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._op(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._op(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._op(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._op(other, lambda x, y: x / y)

    def __rtruediv__(self, other):
        return self._op(other, lambda x, y: y / x)

    def __neg__(self):
        return Real(-self.v, self.prec)

    def __abs__(self):
        return Real(abs(self.v), self.prec)

    def __pow__(self, k):
        with mpmath.workprec(self.prec):
            return Real(self.v ** k, self.prec)

    def _cmpv(self, other):
        ov, _ = self._other(other)
        if ov is None:
            raise TypeError(f"cannot compare Real with {type(other).__name__}")
        return ov

    def __lt__(self, other):
        return self.v < self._cmpv(other)

    def __le__(self, other):
        return self.v <= self._cmpv(other)

    def __gt__(self, other):
        return self.v > self._cmpv(other)

    def __ge__(self, other):
        return self.v >= self._cmpv(other)

    def __eq__(self, other):
        if isinstance(other, Real):
            return self.v == other.v
        raise TypeError("compare Real with exact scalars through close()")

    def __hash__(self):
        return hash(self.v)

    def sign(self, tol=0) -> int:
        if abs(self.v) <= tol:
            return 0
        return 1 if self.v > 0 else -1

    def __float__(self):
        return float(self.v)

    def __repr__(self):
        return f"Real({mpmath.nstr(self.v, 20)}, prec={self.prec})"

    def __str__(self):
        return format_scalar(self)


Scalar = "Fraction | QuadExt | Real"


def as_scalar(x, prec: int = DEFAULT_PREC):
    """Coerce ints, Fractions, QuadExt, Real, floats, decimal strings."""
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, QuadExt, Real)):
        return x
    if isinstance(x, float):
        return Real(x, 53)
    if isinstance(x, str):
        return parse_scalar(x, prec)
    if isinstance(x, mpmath.mpf):
        return Real(x, prec)
    try:
        import numpy as np

        if isinstance(x, np.integer):
            return Fraction(int(x))
        if isinstance(x, np.floating):
            return Real(float(x), 53)
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot interpret {x!r} as a scalar")


def exact_tolerance(eps) -> Fraction:
    """Read a tolerance as an exact rational; floats are read by their decimal repr."""
    if isinstance(eps, float):
        return Fraction(repr(eps))
    if isinstance(eps, str):
        return Fraction(eps)
    if isinstance(eps, Real):
        return Fraction(mpmath.nstr(eps.v, 30))
    return _frac(eps) if not isinstance(eps, QuadExt) else eps


def is_exact(s) -> bool:
    return isinstance(s, (int, Fraction, QuadExt))


def sign(s, tol=None) -> int:
    """Exact sign for exact scalars; for Real a tolerance may be supplied."""
    if isinstance(s, (int, Fraction)):
        return (s > 0) - (s < 0)
    if isinstance(s, QuadExt):
        return s.sign()
    if isinstance(s, Real):
        return s.sign(0 if tol is None else tol)
    raise TypeError(type(s).__name__)


def is_zero(s, tol=None) -> bool:
    if isinstance(s, Real):
        if tol is None:
            raise ValueError("testing a Real for zero needs an explicit tolerance")
        return abs(s.v) <= tol
    return sign(s) == 0


def close(x, y, tol) -> bool:
    """|x - y| <= tol, evaluated exactly when both sides are exact."""
    if is_exact(x) and is_exact(y) and not isinstance(tol, (float, Real)):
        return abs(x - y) <= tol
    prec = max(_prec(x), _prec(y))
    return abs(to_mpf(x, prec) - to_mpf(y, prec)) <= to_mpf(as_scalar(tol), prec)


def _prec(s) -> int:
    return s.prec if isinstance(s, Real) else DEFAULT_PREC


def to_mpf(s, prec: int = DEFAULT_PREC):
    if isinstance(s, Real):
        return s.v
    if isinstance(s, QuadExt):
        return s.to_mpf(prec)
    if isinstance(s, (int, Fraction)):
        f = Fraction(s)
        with mpmath.workprec(prec):
            return mpmath.mpf(f.numerator) / f.denominator
    if isinstance(s, float):
        return mpmath.mpf(s)
    raise TypeError(type(s).__name__)


def to_float(s) -> float:
    return float(s)


def mode_label(s) -> str:
    if isinstance(s, Real):
        return f"float-{s.prec}"
    return "exact"


# text format -------------------------------------------------------------

_RAT = r"[+-]?\d+(?:/\d+)?"
_EXACT_RE = re.compile(
    rf"^(?P<rat>{_RAT})?(?:(?P<sgn>[+-])?(?:(?P<coef>\d+(?:/\d+)?)\*)?sqrt\((?P<d>\d+)\))?$"
)
_SURD_RE = re.compile(r"^(?P<sgn>[+-])?(?:(?P<coef>\d+(?:/\d+)?)\*)?sqrt\((?P<d>\d+)\)$")
_DECIMAL_RE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?$")


def parse_scalar(text: str, prec: int = DEFAULT_PREC):
    """Parse ``p/q``, ``p/q+r/s*sqrt(d)`` or a decimal literal."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty scalar literal")
    m = _SURD_RE.match(t) or _EXACT_RE.match(t)
    if m and (m.groupdict().get("rat") or m.group("d")):
        if m.groupdict().get("rat") and m.group("d") and not m.group("sgn"):
            raise ValueError(f"malformed scalar literal {text!r}")
        a = Fraction(m.groupdict().get("rat") or 0)
        if not m.group("d"):
            return a
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("sgn") == "-":
            coef = -coef
        root = QuadExt.sqrt(int(m.group("d")))
        if isinstance(root, Fraction):
            return a + coef * root
        out = QuadExt(a, coef * root.b, root.d)
        return out.a if out.b == 0 else out
    if _DECIMAL_RE.match(t):
        with mpmath.workprec(prec):
            return Real(mpmath.mpf(t), prec)
    raise ValueError(f"malformed scalar literal {text!r}")


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(s) -> str:
    """Inverse of :func:`parse_scalar`; bit-exact for exact scalars."""
    if isinstance(s, int):
        return str(s)
    if isinstance(s, Fraction):
        return _fmt_frac(s)
    if isinstance(s, QuadExt):
        if s.b == 0:
            return _fmt_frac(s.a)
        mag = abs(s.b)
        root = f"sqrt({s.d})" if mag == 1 else f"{_fmt_frac(mag)}*sqrt({s.d})"
        if s.a == 0:
            return root if s.b > 0 else "-" + root
        return f"{_fmt_frac(s.a)}{'+' if s.b > 0 else '-'}{root}"
    if isinstance(s, Real):
        digits = int(s.prec * 0.30103) + 2
        return mpmath.nstr(s.v, digits, strip_zeros=False, min_fixed=-5, max_fixed=5)
    raise TypeError(type(s).__name__)
