"""Quadratic forms over the scalar tower: signature, isotropy, rationality.

A form is stored as its symmetric coefficient matrix ``f`` so that
``F(x) = sum_ij f_ij x_i x_j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np

from .errors import NonDegenerateViolation, PreconditionViolation, Undecided
from .scalars import (
    DEFAULT_PREC,
    QuadExt,
    Real,
    as_scalar,
    format_scalar,
    is_exact,
    parse_scalar,
    sign,
    to_mpf,
)


def _unify(rows):
    """Coerce entries to one field: Q, Q(sqrt d) for a single d, or Real."""
    flat = [as_scalar(v) for row in rows for v in row]
    ds = {v.d for v in flat if isinstance(v, QuadExt) and v.b != 0}
    if len(ds) > 1:
        raise ValueError(f"entries live in different fields Q(sqrt d), d in {sorted(ds)}")
    reals = [v for v in flat if isinstance(v, Real)]
    n = len(rows)
    if reals:
        prec = max(v.prec for v in reals)
        flat = [Real(v, prec) for v in flat]
    else:
        flat = [v.a if isinstance(v, QuadExt) and v.b == 0 else v for v in flat]
    return tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))


@dataclass(frozen=True)
class QuadraticForm:
    coeffs: tuple
    _det: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rows = [tuple(r) for r in self.coeffs]
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("coefficient matrix must be square")
        m = _unify(rows)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = m[i][j], m[j][i]
                same = (a.v == b.v) if isinstance(a, Real) else (a == b)
                if not same:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "coeffs", m)
        det = _determinant(m)
        if isinstance(det, Real):
            scale = max(abs(float(v)) for row in m for v in row) ** n
            if abs(det.v) <= mpmath.mpf(2) ** (-det.prec // 2) * scale:
                raise NonDegenerateViolation("determinant vanishes to working precision")
        elif det == 0:
            raise NonDegenerateViolation("determinant is zero")
        object.__setattr__(self, "_det", det)

    # construction ---------------------------------------------------------
    @classmethod
    def diag(cls, *entries) -> "QuadraticForm":
        n = len(entries)
        zero = Fraction(0)
        return cls(tuple(tuple(entries[i] if i == j else zero for j in range(n))
                         for i in range(n)))

    @classmethod
    def parse(cls, text: str, prec: int = DEFAULT_PREC) -> "QuadraticForm":
        """Read ``n`` followed by ``n`` rows of entries."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ValueError("empty form literal")
        try:
            n = int(lines[0])
        except ValueError:
            raise ValueError(f"first line must be the dimension, got {lines[0]!r}") from None
        if len(lines) != n + 1:
            raise ValueError(f"expected {n} rows, got {len(lines) - 1}")
        rows = []
        for k, ln in enumerate(lines[1:], start=1):
            cells = ln.replace(",", " ").split()
            if len(cells) != n:
                raise ValueError(f"row {k} has {len(cells)} entries, expected {n}")
            rows.append(tuple(parse_scalar(c, prec) for c in cells))
        return cls(tuple(rows))

    def to_text(self) -> str:
        body = "\n".join(" ".join(format_scalar(v) for v in row) for row in self.coeffs)
        return f"{self.n}\n{body}\n"

    # basic properties -----------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def det(self):
        return self._det

    @cached_property
    def field(self) -> tuple:
        """``("Q", None)``, ``("Q(sqrt d)", d)`` or ``("R", prec)``."""
        flat = [v for row in self.coeffs for v in row]
        if isinstance(flat[0], Real):
            return ("R", flat[0].prec)
        ds = {v.d for v in flat if isinstance(v, QuadExt)}
        if ds:
            d = ds.pop()
            return (f"Q(sqrt {d})", d)
        return ("Q", None)

    @property
    def is_exact(self) -> bool:
        return self.field[0] != "R"

    @property
    def prec(self):
        return self.field[1] if self.field[0] == "R" else None

    @property
    def mode(self) -> str:
        return "exact" if self.is_exact else f"float-{self.prec}"

    def __getitem__(self, ij):
        i, j = ij
        return self.coeffs[i][j]

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.coeffs], dtype=float)

    @cached_property
    def _integer_parts(self):
        """``(D, A, B, d)`` with F = (A + sqrt(d) B) / D and integer matrices A, B."""
        if not self.is_exact:
            return None
        d = self.field[1]
        dens = []
        for row in self.coeffs:
            for v in row:
                if isinstance(v, QuadExt):
                    dens += [v.a.denominator, v.b.denominator]
                else:
                    dens.append(v.denominator)
        D = math.lcm(*dens)
        A = [[0] * self.n for _ in range(self.n)]
        B = [[0] * self.n for _ in range(self.n)]
        for i, row in enumerate(self.coeffs):
            for j, v in enumerate(row):
                a, b = (v.a, v.b) if isinstance(v, QuadExt) else (v, Fraction(0))
                A[i][j] = int(a * D)
                B[i][j] = int(b * D)
        return D, A, B, d

    def evaluate(self, x):
        """F(x); exact for exact coefficients and rational x."""
        x = list(x)
        if len(x) != self.n:
            raise ValueError(f"vector has length {len(x)}, form has n={self.n}")
        if self.is_exact and all(isinstance(v, (int, np.integer)) for v in x):
            D, A, B, d = self._integer_parts
            xi = [int(v) for v in x]
            p = _int_quad(A, xi)
            if d is None:
                return Fraction(p, D)
            q = _int_quad(B, xi)
            if q == 0:
                return Fraction(p, D)
            return QuadExt(Fraction(p, D), Fraction(q, D), d)
        if self.is_exact:
            xs = [as_scalar(v) for v in x]
            total = Fraction(0)
            for i in range(self.n):
                for j in range(self.n):
                    c = self.coeffs[i][j]
                    if c:
                        total = total + c * xs[i] * xs[j]
            return total
        prec = self.prec
        with mpmath.workprec(prec):
            xs = [to_mpf(as_scalar(v), prec) for v in x]
            total = mpmath.mpf(0)
            for i in range(self.n):
                for j in range(self.n):
                    total += self.coeffs[i][j].v * xs[i] * xs[j]
        return Real(total, prec)

    __call__ = evaluate

    def evaluate_float(self, X: np.ndarray) -> np.ndarray:
        """Vectorised float64 values on the rows of ``X``."""
        X = np.asarray(X, dtype=float)
        return np.einsum("ki,ij,kj->k", X, self.float_matrix, X)

    # algebra --------------------------------------------------------------
    def direct_sum(self, other: "QuadraticForm") -> "QuadraticForm":
        n, m = self.n, other.n
        zero = Fraction(0)
        rows = []
        for i in range(n + m):
            row = []
            for j in range(n + m):
                if i < n and j < n:
                    row.append(self.coeffs[i][j])
                elif i >= n and j >= n:
                    row.append(other.coeffs[i - n][j - n])
                else:
                    row.append(zero)
            rows.append(tuple(row))
        return QuadraticForm(tuple(rows))

    def scaled(self, c) -> "QuadraticForm":
        c = as_scalar(c)
        return QuadraticForm(tuple(tuple(c * v for v in row) for row in self.coeffs))

    def __neg__(self):
        return self.scaled(-1)

    def transformed(self, U) -> "QuadraticForm":
        """The form x -> F(U x), i.e. matrix U^T f U, for an integer matrix U."""
        n = self.n
        U = [[int(U[i][j]) for j in range(n)] for i in range(n)]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Fraction(0)
                for k in range(n):
                    if U[k][i] == 0:
                        continue
                    for m in range(n):
                        if U[m][j]:
                            acc = acc + U[k][i] * self.coeffs[k][m] * U[m][j]
                row.append(acc)
            rows.append(tuple(row))
        return QuadraticForm(tuple(rows))


def _int_quad(M, x) -> int:
    total = 0
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        row = M[i]
        s = 0
        for j, xj in enumerate(x):
            if xj and row[j]:
                s += row[j] * xj
        total += xi * s
    return total


def _determinant(m):
    n = len(m)
    if isinstance(m[0][0], Real):
        prec = m[0][0].prec
        with mpmath.workprec(prec):
            M = mpmath.matrix([[v.v for v in row] for row in m])
            return Real(mpmath.det(M), prec)
    a = [list(row) for row in m]
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = det * a[k][k]
        inv = 1 / a[k][k] if isinstance(a[k][k], QuadExt) else Fraction(1) / a[k][k]
        for i in range(k + 1, n):
            if a[i][k] != 0:
                fct = a[i][k] * inv
                for j in range(k, n):
                    a[i][j] = a[i][j] - fct * a[k][j]
    if isinstance(det, QuadExt) and det.b == 0:
        return det.a
    return det


# signature and real isotropy ------------------------------------------------

def signature(F: QuadraticForm, tol=None) -> tuple[int, int]:
    """(number of positive, number of negative) squares.

    Exact forms use symmetric Gaussian elimination.  Real forms use the
    signs of the eigenvalues; eigenvalues within ``tol`` of zero (default
    ``2**(-prec/2)`` times the largest coefficient) count as degenerate.
    """
    n = F.n
    if not F.is_exact:
        prec = F.prec
        with mpmath.workprec(prec):
            M = mpmath.matrix([[v.v for v in row] for row in F.coeffs])
            ev = mpmath.eigsy(M, eigvals_only=True)
            scale = max(abs(v.v) for row in F.coeffs for v in row)
            thr = mpmath.mpf(tol) if tol is not None else mpmath.mpf(2) ** (-prec // 2) * scale
            pos = neg = 0
            for lam in ev:
                if abs(lam) <= thr:
                    raise NonDegenerateViolation("eigenvalue within tolerance of zero")
                if lam > 0:
                    pos += 1
                else:
                    neg += 1
        return pos, neg

    a = [list(row) for row in F.coeffs]
    pos = neg = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0),
                        None)
            if pair is None:
                raise NonDegenerateViolation("zero pivot chain exhausted")
            i, j = pair
            # x_i <- x_i + x_j makes the (i, i) entry 2 a_ij != 0
            for c in range(n):
                a[i][c] = a[i][c] + a[j][c]
            for r in range(n):
                a[r][i] = a[r][i] + a[r][j]
            piv = i
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            for row in a:
                row[k], row[piv] = row[piv], row[k]
        p = a[k][k]
        if sign(p) > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            if a[i][k] != 0:
                fct = a[i][k] / p
                for j in range(k, n):
                    a[i][j] = a[i][j] - fct * a[k][j]
        for i in range(k + 1, n):
            a[k][i] = Fraction(0)
    return pos, neg


def is_isotropic_real(F: QuadraticForm, tol=None) -> bool:
    pos, neg = signature(F, tol)
    return pos >= 1 and neg >= 1


# p-adic isotropy --------------------------------------------------------------

def vp(m: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if m == 0:
        raise ValueError("valuation of zero")
    m = abs(m)
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


def _int_det(M) -> int:
    n = len(M)
    a = [[Fraction(v) for v in row] for row in M]
    return int(_determinant(a))


@dataclass(frozen=True)
class PadicForm:
    """Integer symmetric matrix viewed over Q_p, with working precision p**K."""

    p: int
    matrix: tuple
    K: int | None = None

    def __post_init__(self):
        M = tuple(tuple(int(v) for v in row) for row in self.matrix)
        n = len(M)
        if n < 2 or any(len(r) != n for r in M):
            raise ValueError("need a square matrix with n >= 2")
        if any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
            raise ValueError("matrix is not symmetric")
        if self.p < 2 or any(self.p % q == 0 for q in range(2, math.isqrt(self.p) + 1)):
            raise ValueError(f"p={self.p} is not prime")
        content = math.gcd(*[v for row in M for v in row])
        if content == 0:
            raise NonDegenerateViolation("zero form")
        k = vp(content, self.p)
        if k:
            M = tuple(tuple(v // self.p ** k for v in row) for row in M)
        if _int_det(M) == 0:
            raise NonDegenerateViolation("determinant is zero")
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_form(cls, F: QuadraticForm, p: int, K: int | None = None) -> "PadicForm":
        if F.field[0] != "Q":
            raise PreconditionViolation("p-adic forms need rational coefficients")
        den = math.lcm(*[v.denominator for row in F.coeffs for v in row])
        return cls(p, tuple(tuple(int(v * den) for v in row) for row in F.coeffs), K)

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def det(self) -> int:
        return _int_det(self.matrix)

    @property
    def default_K(self) -> int:
        return 2 * vp(2 * self.det, self.p) + 3

    def evaluate(self, x) -> int:
        return _int_quad(self.matrix, [int(v) for v in x])

    def as_form(self) -> QuadraticForm:
        return QuadraticForm(self.matrix)


def _liftable(M, x, p, k) -> bool:
    """Hensel criterion at level k: 2 * min_i v_p(dF/dx_i) < k."""
    n = len(M)
    m = None
    for i in range(n):
        g = 2 * sum(M[i][j] * x[j] for j in range(n)) % p ** k
        if g == 0:
            continue
        v = vp(g, p)
        m = v if m is None else min(m, v)
    return m is not None and 2 * m < k


def is_isotropic_padic(F: PadicForm, K: int | None = None) -> bool:
    """Decide isotropy over Q_p by lifting primitive zeros mod p**k.

    Returns True once a zero mod p**k with ``v(F(x)) > 2 v(grad F(x))`` is
    found (Hensel lifts it), False when no primitive zero survives mod
    p**K.  If zeros survive but none is certified liftable, raises
    :class:`Undecided` carrying K.
    """
    if F.n >= 5:
        return True
    p, M, n = F.p, F.matrix, F.n
    K = K or F.K or F.default_K
    level = [x for x in itertools.product(range(p), repeat=n)
             if any(x) and _int_quad(M, x) % p == 0]
    k = 1
    while True:
        for x in level:
            if _liftable(M, x, p, k):
                return True
        if not level:
            return False
        if k >= K:
            raise Undecided(f"no liftable zero certified modulo {p}^{K}", K=K, survivors=len(level))
        pk = p ** k
        nxt = []
        for x in level:
            for y in itertools.product(range(p), repeat=n):
                z = tuple(xi + pk * yi for xi, yi in zip(x, y))
                if _int_quad(M, z) % (pk * p) == 0:
                    nxt.append(z)
        level = nxt
        k += 1


# rationality ------------------------------------------------------------------

@dataclass(frozen=True)
class RationalityVerdict:
    tag: str  # "Rational" | "Irrational" | "Undecided"
    scale: object = None
    reference: tuple | None = None
    integer_form: tuple | None = None
    witness: tuple | None = None
    witness_ratio: object = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_rational(self) -> bool:
        return self.tag == "Rational"


def _normalize_integer_matrix(rows):
    flat = [v for row in rows for v in row]
    g = math.gcd(*flat)
    first = next(v for v in flat if v != 0)
    s = g if first > 0 else -g
    return tuple(tuple(v // s for v in row) for row in rows), s


def rationality_test(F: QuadraticForm, bound: int = 10**6, tol=1e-30) -> RationalityVerdict:
    """Decide whether F is a real multiple of a rational form.

    Exact inputs are decided exactly (never Undecided).  Real inputs compare
    each coefficient ratio with its best rational approximation of
    denominator at most ``bound``.
    """
    n = F.n
    idx = [(i, j) for i in range(n) for j in range(n)]
    if F.is_exact:
        ref = next(ij for ij in idx if F[ij] != 0)
        fref = F[ref]
        ratios = {}
        for ij in idx:
            r = F[ij] / fref
            if isinstance(r, QuadExt):
                if r.b != 0:
                    return RationalityVerdict("Irrational", reference=ref,
                                              witness=(*ij, *ref), witness_ratio=r)
                r = r.a
            ratios[ij] = r
    else:
        prec = F.prec
        with mpmath.workprec(prec):
            mags = {ij: abs(F[ij].v) for ij in idx}
            top = max(mags.values())
            ref = next(ij for ij in idx if mags[ij] == top)
            fref = F[ref].v
            ratios = {}
            worst = mpmath.mpf(0)
            floor_err = mpmath.mpf(2) ** (-prec + 8)
            if floor_err * 4 > tol:
                return RationalityVerdict("Undecided", reference=ref,
                                          diagnostics={"prec": prec, "tol": tol,
                                                       "reason": "precision too low for tol"})
            for ij in idx:
                r = F[ij].v / fref
                neg, man, exp, _ = r._mpf_
                exact = Fraction(-int(man) if neg else int(man)) * (Fraction(2) ** int(exp))
                approx = exact.limit_denominator(bound)
                err = abs(r - mpmath.mpf(approx.numerator) / approx.denominator)
                worst = max(worst, err)
                if err > tol:
                    return RationalityVerdict(
                        "Irrational", reference=ref, witness=(*ij, *ref),
                        witness_ratio=Real(r, prec),
                        diagnostics={"best_approximation": str(approx),
                                     "error": float(err), "bound": bound, "tol": tol})
                ratios[ij] = approx
    den = math.lcm(*[r.denominator for r in ratios.values()])
    ints = [[int(ratios[(i, j)] * den) for j in range(n)] for i in range(n)]
    Fo, s = _normalize_integer_matrix(ints)
    # F = fref * ratios = fref * s / den * Fo
    c = fref * Fraction(s, den) if F.is_exact else Real(fref, F.prec) * Fraction(s, den)
    if isinstance(c, QuadExt) and c.b == 0:
        c = c.a
    diag = {} if F.is_exact else {"max_ratio_error": float(worst), "bound": bound, "tol": tol}
    return RationalityVerdict("Rational", scale=c, reference=ref, integer_form=Fo,
                              diagnostics=diag)
