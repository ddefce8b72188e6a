"""Unimodular lattices, basis reduction and short vector enumeration.

A lattice is the set of integer combinations of the *columns* of its basis
matrix; the group acts by left multiplication and SL_n(Z) by right
multiplication on the basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConditioningError
from ..search import _bareiss_det, maximal_minors_gcd

DET_TOL = 1e-9


def _dot(u, v) -> float:
    return math.fsum(a * b for a, b in zip(u, v))


def gram_schmidt(cols):
    """(mu, B) with mu[i][j] = <b_i, b*_j> / B_j and B_j = |b*_j|^2."""
    n = len(cols)
    star, B = [], []
    mu = [[0.0] * n for _ in range(n)]
    for i in range(n):
        v = list(cols[i])
        for j in range(i):
            mu[i][j] = _dot(cols[i], star[j]) / B[j]
            v = [a - mu[i][j] * b for a, b in zip(v, star[j])]
        star.append(v)
        B.append(_dot(v, v))
    return mu, B


def lll_columns(cols, delta: float = 0.99):
    """LLL-reduce a list of basis columns.

    Returns (reduced columns, U) where U is a list of integer coefficient
    columns: reduced[k] = sum_i U[k][i] * cols[i].
    """
    b = [list(map(float, c)) for c in cols]
    n = len(b)
    U = [[int(i == k) for i in range(n)] for k in range(n)]
    mu, B = gram_schmidt(b)
    if min(B) <= 0 or not all(map(math.isfinite, B)):
        raise ConditioningError("numerically singular basis")
    k = 1
    steps = 0
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                U[k] = [x - q * y for x, y in zip(U[k], U[j])]
                for l in range(j):
                    mu[k][l] -= q * mu[j][l]
                mu[k][j] -= q
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            U[k], U[k - 1] = U[k - 1], U[k]
            mu, B = gram_schmidt(b)
            if min(B) <= 0:
                raise ConditioningError("numerically singular basis")
            k = max(k - 1, 1)
        steps += 1
        if steps > 100_000:
            raise ConditioningError("reduction did not terminate")
    if _bareiss_det(U) < 0:  # keep the orientation: a swap has determinant -1
        b[-1] = [-x for x in b[-1]]
        U[-1] = [-x for x in U[-1]]
    return b, U


def lagrange2(a0, a1, b0, b1):
    """Gauss-Lagrange reduction of the plane basis (a, b), orientation kept."""
    na, nb = a0 * a0 + a1 * a1, b0 * b0 + b1 * b1
    if na > nb:
        a0, a1, b0, b1, na, nb = b0, b1, a0, a1, nb, na
    while True:
        q = round((a0 * b0 + a1 * b1) / na)
        if q:
            b0, b1 = b0 - q * a0, b1 - q * a1
            nb = b0 * b0 + b1 * b1
        if nb >= na:
            if a0 * b1 - a1 * b0 < 0:
                b0, b1 = -b0, -b1
            return a0, a1, b0, b1
        a0, a1, b0, b1, na, nb = b0, b1, a0, a1, nb, na


def short_vectors(cols, radius: float):
    """All nonzero integer coefficient vectors c with |sum c_i b_i| <= radius.

    Fincke-Pohst enumeration; both c and -c are returned.
    """
    n = len(cols)
    mu, B = gram_schmidt(cols)
    R2 = radius * radius * (1 + 1e-12) + 1e-300
    out = []
    c = [0] * n

    def rec(i, rem):
        center = -sum(mu[j][i] * c[j] for j in range(i + 1, n))
        width = math.sqrt(max(rem, 0.0) / B[i])
        for ci in range(math.ceil(center - width), math.floor(center + width) + 1):
            r = rem - B[i] * (ci - center) ** 2
            if r < -1e-12 * R2:
                continue
            c[i] = ci
            if i == 0:
                if any(c):
                    out.append(tuple(c))
            else:
                rec(i - 1, r)
        c[i] = 0

    rec(n - 1, R2)
    return out


def _combine(cols, coef):
    n = len(cols[0])
    return [math.fsum(coef[k] * cols[k][i] for k in range(len(cols))) for i in range(n)]


def _norm(v) -> float:
    return math.sqrt(_dot(v, v))


def minima(cols, count: int | None = None):
    """Lengths of the first ``count`` successive minima (default: all n)."""
    red, _ = lll_columns(cols)
    n = len(red)
    count = n if count is None else count
    norms = sorted(_norm(v) for v in red)
    vecs = [_combine(red, c) for c in short_vectors(red, norms[count - 1])]
    vecs.sort(key=_norm)
    chosen = []
    for v in vecs:
        M = np.array(chosen + [v])
        if np.linalg.matrix_rank(M, tol=1e-9 * max(1.0, np.abs(M).max())) == len(chosen) + 1:
            chosen.append(v)
            if len(chosen) == count:
                break
    return [_norm(v) for v in chosen]


def shortest_length_of_columns(cols) -> float:
    if len(cols) == 2:
        a0, a1, _, _ = lagrange2(cols[0][0], cols[0][1], cols[1][0], cols[1][1])
        return math.hypot(a0, a1)
    red, _ = lll_columns(cols)
    r = min(_norm(v) for v in red)
    return min(_norm(_combine(red, c)) for c in short_vectors(red, r))


def _canonical_key(v, scale):
    n2 = _dot(v, v)
    return (round(n2 / scale, 9), tuple(-round(x, 9) for x in v))


def _orient(v, coef):
    for x in v:
        if abs(x) > 1e-12:
            if x < 0:
                return [-y for y in v], [-c for c in coef]
            break
    return v, coef


def canonical_columns(cols):
    """A reduced basis depending only on the lattice (up to float ties).

    Greedy successive minima: repeatedly take the shortest vector that keeps
    the chosen set extendable to a basis; ties are broken by the vector's
    coordinates and signs fixed so the first nonzero coordinate is positive.
    Returns (columns, coefficient columns relative to ``cols``).
    """
    red, U = lll_columns(cols)
    n = len(red)
    radius = max(_norm(v) for v in red)
    while True:
        cands = []
        seen = set()
        for c in short_vectors(red, radius):
            if tuple(-x for x in c) in seen:
                continue
            seen.add(c)
            v, c2 = _orient(_combine(red, c), list(c))
            cands.append((_canonical_key(v, 1.0), v, c2))
        cands.sort(key=lambda item: item[0])
        chosen, coefs = [], []
        for _, v, c in cands:
            if maximal_minors_gcd(coefs + [c]) == 1:
                chosen.append(v)
                coefs.append(c)
                if len(chosen) == n:
                    break
        if len(chosen) == n:
            break
        radius *= 2
    if np.linalg.det(np.array(chosen).T) < 0:
        chosen[-1] = [-x for x in chosen[-1]]
        coefs[-1] = [-x for x in coefs[-1]]
    # coefficients relative to the input: U (input -> LLL) composed with coefs
    total = [[sum(c[k] * U[k][i] for k in range(n)) for i in range(n)] for c in coefs]
    return chosen, total


@dataclass(frozen=True, eq=False)
class LatticePoint:
    """The lattice basis * Z^n, with a reduced representative.

    ``basis @ reduction_transform == reduced_basis`` and the transform is an
    integer matrix of determinant 1.
    """

    basis: np.ndarray
    reduced_basis: np.ndarray
    reduction_transform: np.ndarray

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def from_basis(cls, basis, canonical: bool = True) -> "LatticePoint":
        B = np.array(basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("basis must be square")
        det = np.linalg.det(B)
        if not math.isfinite(det) or abs(det) < 1e-12:
            raise ConditioningError("numerically singular basis")
        if abs(det - 1) > DET_TOL:
            raise ConditioningError(f"basis has determinant {det!r}, not 1")
        cols = [list(B[:, k]) for k in range(B.shape[1])]
        if canonical:
            _, T = canonical_columns(cols)
        else:
            _, T = lll_columns(cols)
        T = np.array(T, dtype=np.int64).T
        R = B @ T
        if abs(np.linalg.det(R) - 1) > DET_TOL:
            raise ConditioningError("reduced basis lost unimodularity")
        return cls(B, R, T)

    @classmethod
    def standard(cls, n: int) -> "LatticePoint":
        return cls.from_basis(np.eye(n))

    def acted(self, g) -> "LatticePoint":
        """The lattice g * L (reduction recomputed from the reduced basis)."""
        return LatticePoint.from_basis(np.asarray(g, dtype=float) @ self.reduced_basis)


def reduce(L: LatticePoint) -> LatticePoint:
    """Fresh reduction of ``L.basis``."""
    return LatticePoint.from_basis(L.basis)


def shortest_vector_length(L) -> float:
    """Length of the shortest nonzero vector (exact over Fincke-Pohst candidates)."""
    B = L.reduced_basis if isinstance(L, LatticePoint) else np.asarray(L, dtype=float)
    return shortest_length_of_columns([list(B[:, k]) for k in range(B.shape[1])])


def successive_minima(L, count: int | None = None) -> list:
    B = L.reduced_basis if isinstance(L, LatticePoint) else np.asarray(L, dtype=float)
    return minima([list(B[:, k]) for k in range(B.shape[1])], count)


def random_unimodular(n: int, rng, steps: int = 12, max_entry: int = 10) -> np.ndarray:
    """Random element of SL_n(Z) from elementary moves, entries bounded by ``max_entry``."""
    g = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        s = int(rng.integers(-2, 3))
        trial = g.copy()
        trial[:, i] += s * trial[:, j]
        if np.abs(trial).max() <= max_entry:
            g = trial
    return g
