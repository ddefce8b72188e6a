"""Continued fractions of quadratic irrationals and the binary counterexample.

For theta quadratic with theta^2 irrational, the form y^2 - theta^2 x^2 is
indefinite and irrational yet bounded away from zero on Z^2 minus the
origin, because theta is badly approximable.  Everything here is exact
arithmetic in Q(sqrt d).
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionViolation
from .scalars import QuadExt, squarefree_part


@dataclass(frozen=True)
class QuadraticIrrational:
    """(a + b*sqrt(d)) / c, normalized so gcd(a, b, c) = 1 and c > 0."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.b == 0 or self.c == 0:
            raise ValueError("need b != 0 and c != 0")
        s, k = squarefree_part(self.d)
        if s <= 1:
            raise ValueError(f"sqrt({self.d}) is rational")
        a, b, c = self.a, self.b * k, self.c
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(a, b, c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)
        object.__setattr__(self, "d", s)

    @classmethod
    def from_scalar(cls, x: QuadExt) -> "QuadraticIrrational":
        if not isinstance(x, QuadExt) or x.b == 0:
            raise ValueError("not a quadratic irrational")
        den = math.lcm(x.a.denominator, x.b.denominator)
        return cls(int(x.a * den), int(x.b * den), den, x.d)

    @classmethod
    def parse(cls, text: str) -> "QuadraticIrrational":
        """Accepts ``1+sqrt2``, ``(1+sqrt(5))/2``, ``3/2-1/2*sqrt(7)`` and the like."""
        t = text.replace(" ", "")
        m = re.fullmatch(r"\((.*)\)/(\d+)", t)
        den = 1
        if m:
            t, den = m.group(1), int(m.group(2))
        t = re.sub(r"sqrt(\d+)", r"sqrt(\1)", t)
        from .scalars import parse_scalar

        x = parse_scalar(t)
        if not isinstance(x, QuadExt):
            raise ValueError(f"{text!r} is not a quadratic irrational")
        return cls.from_scalar(x / den)

    @property
    def value(self) -> QuadExt:
        return QuadExt(Fraction(self.a, self.c), Fraction(self.b, self.c), self.d)

    def __float__(self):
        return float(self.value)

    def __str__(self):
        coef = "" if abs(self.b) == 1 else f"{abs(self.b)}*"
        head = "" if self.a == 0 and self.b > 0 else str(self.a) if self.a else ""
        num = f"{head}{'+' if self.b > 0 and head else '' if self.b > 0 else '-'}{coef}sqrt({self.d})"
        return num if self.c == 1 else f"({num})/{self.c}"


@dataclass(frozen=True)
class ContinuedFraction:
    quotients: tuple
    preperiod: int | None = None  # index where the period starts
    period: int | None = None

    def convergents(self):
        """Yield (p_k, q_k) for the stored quotients."""
        p0, q0, p1, q1 = 1, 0, self.quotients[0], 1
        yield p1, q1
        for a in self.quotients[1:]:
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            yield p1, q1

    def periodic_part(self) -> tuple:
        if self.period is None:
            raise ValueError("period not detected")
        return self.quotients[self.preperiod:self.preperiod + self.period]

    def __str__(self):
        q = self.quotients
        if self.period is None:
            return f"[{q[0]}; {', '.join(map(str, q[1:]))}, ...]"
        pre = q[1:self.preperiod] if self.preperiod > 0 else ()
        per = self.periodic_part()
        head = f"[{q[0]}; " if self.preperiod > 0 else "["
        body = ", ".join(map(str, pre))
        if self.preperiod == 0:
            return f"[({', '.join(map(str, per))})*]"
        return head + (body + ", " if body else "") + f"({', '.join(map(str, per))})*]"


def _pq_state(theta: QuadraticIrrational):
    """(P, Q, D) with theta = (P + sqrt D) / Q and Q | D - P^2."""
    D = theta.b * theta.b * theta.d
    P, Q = (theta.a, theta.c) if theta.b > 0 else (-theta.a, -theta.c)
    if (D - P * P) % Q:
        P, Q, D = P * abs(Q), Q * abs(Q), D * Q * Q
    return P, Q, D


def cf_expand(theta: QuadraticIrrational, depth: int = 64) -> ContinuedFraction:
    """Partial quotients via the integer recurrence on (P, Q).

    a_k = floor((P + sqrt D) / Q), P' = a_k Q - P, Q' = (D - P'^2) / Q.
    The period is marked once a state repeats.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    P, Q, D = _pq_state(theta)
    r = math.isqrt(D)
    seen = {}
    quotients = []
    pre = per = None
    k = 0
    while k < depth or per is None:
        if per is None:
            if (P, Q) in seen:
                pre = seen[(P, Q)]
                per = k - pre
                if k >= depth:
                    break
            else:
                seen[(P, Q)] = k
        # floor((P + sqrt D)/Q) with exact integer sqrt of non-square D
        a = (P + r) // Q if Q > 0 else (P + r + 1) // Q
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
        k += 1
    return ContinuedFraction(tuple(quotients[:max(depth, 1)]), pre, per)


def _periodic_value(block) -> QuadExt:
    """Positive x with x = [block; x] (purely periodic continued fraction)."""
    cf = ContinuedFraction(tuple(block))
    conv = list(cf.convergents())
    p, q = conv[-1]
    pp, qq = conv[-2] if len(conv) > 1 else (1, 0)
    # q x^2 + (qq - p) x - pp = 0
    disc = (p - qq) ** 2 + 4 * q * pp
    return (Fraction(p - qq) + QuadExt.sqrt(disc)) / (2 * q)


def asymptotic_constant(theta: QuadraticIrrational) -> QuadExt:
    """liminf of q^2 |theta - p/q| over convergents, exact.

    For phase i of the period this is 1 / ([b_i; b_(i+1), ...] + [0; b_(i-1), b_(i-2), ...]).
    """
    cf = cf_expand(theta, 8)
    block = cf.periodic_part()
    L = len(block)
    best = None
    for i in range(L):
        fwd = block[i:] + block[:i]
        back = tuple(reversed(block[:i])) + tuple(reversed(block[i:]))
        val = 1 / (_periodic_value(fwd) + 1 / _periodic_value(back))
        best = val if best is None or val < best else best
    return best


def liouville_constant_estimate(theta: QuadraticIrrational, N: int):
    """c_N = min over convergent denominators q <= N of q^2 |theta - p/q|.

    Returns (c_N, (p, q)) with c_N exact.
    """
    th = theta.value
    best, arg = None, None
    depth = 8
    while True:
        cf = cf_expand(theta, depth)
        conv = list(cf.convergents())
        if conv[-1][1] > N:
            break
        depth *= 2
    for p, q in conv:
        if q > N:
            break
        val = abs(th * q - p) * q
        if best is None or val < best:
            best, arg = val, (p, q)
    return best, arg


@dataclass(frozen=True)
class CounterexampleResult:
    N: int
    minimum: QuadExt
    argmin: tuple
    c_N: QuadExt
    certified_bound: QuadExt
    classical_constant: QuadExt


def _check_theta(theta: QuadraticIrrational):
    sq = theta.value * theta.value
    if sq.is_rational:
        raise PreconditionViolation(f"theta^2 = {sq} is rational")
    if theta.value.sign() <= 0:
        raise PreconditionViolation("theta must be positive")


def counterexample_min(theta: QuadraticIrrational, N: int) -> CounterexampleResult:
    """min |y^2 - theta^2 x^2| over 0 < max(|x|, |y|) <= N, axes included.

    By symmetry x >= 0 and y >= 0.  For fixed x > 0 the minimum over y is
    at floor(theta x) or its successor (clipped to N).

    The certified bound: any y/x is either a convergent (so x^2|theta - y/x| >= c_N)
    or satisfies x^2|theta - y/x| >= 1/2, and |y/x + theta| >= theta, so
    |F(x, y)| >= min(c_N, 1/2) * theta when x > 0.  The x = 0 column gives
    y^2 >= 1, so the bound reported is min(min(c_N, 1/2) * theta, 1).
    """
    _check_theta(theta)
    if N < 1:
        raise ValueError("N must be >= 1")
    th = theta.value
    t2 = th * th
    best, arg = Fraction(1), (0, 1)  # x = 0 column: min y^2 = 1
    if t2 < best:
        best, arg = t2, (1, 0)
    for x in range(1, N + 1):
        base = (th * x).floor()
        x2 = t2 * (x * x)
        for y in (base, base + 1):
            y = min(max(y, 0), N)
            v = abs(x2 - y * y)
            if v < best:
                best, arg = v, (x, y)
    c_N, _ = liouville_constant_estimate(theta, N)
    bound = min(min(c_N, QuadExt(Fraction(1, 2), 0, th.d)) * th, QuadExt(1, 0, th.d))
    return CounterexampleResult(N, best, arg, c_N, bound, asymptotic_constant(theta))


def counterexample_series(theta: QuadraticIrrational, Ns) -> list:
    return [counterexample_min(theta, N) for N in Ns]


def write_series_csv(results, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "min_value", "min_value_float", "certified_bound", "certified_bound_float"])
        for r in results:
            w.writerow([r.N, str(r.minimum), f"{float(r.minimum):.17g}",
                        str(r.certified_bound), f"{float(r.certified_bound):.17g}"])
