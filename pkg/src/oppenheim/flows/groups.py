"""One-parameter subgroups of SL_n(R): unipotent and diagonal."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import KindViolation


def _is_exact_matrix(y) -> bool:
    return all(isinstance(v, (int, Fraction)) for row in y for v in row)


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def _nilpotent_powers(y):
    """[I, y, y^2, ...] up to the last nonzero power; KindViolation if y^n != 0."""
    n = len(y)
    exact = _is_exact_matrix(y)
    if exact:
        eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        powers = [eye]
        cur = [[Fraction(v) for v in row] for row in y]
        for _ in range(n):
            if all(v == 0 for row in cur for v in row):
                return powers, True
            powers.append(cur)
            cur = _matmul(cur, y)
        raise KindViolation("generator is not nilpotent")
    Y = np.array(y, dtype=float)
    scale = max(1.0, np.abs(Y).max())
    powers = [np.eye(n)]
    cur = Y
    for _ in range(n):
        if np.abs(cur).max() <= 1e-12 * scale ** (len(powers)):
            return powers, False
        powers.append(cur)
        cur = cur @ Y
    raise KindViolation("generator is not nilpotent")


def unipotent_exp(y, t):
    """exp(t y) = sum_j (t y)^j / j! for nilpotent y.

    With an exact (int/Fraction) generator and exact t the result is a list
    of Fraction rows; otherwise a float ndarray.
    """
    powers, exact = _nilpotent_powers(y)
    n = len(powers[0])
    if exact and isinstance(t, (int, Fraction)):
        t = Fraction(t)
        out = [[Fraction(0)] * n for _ in range(n)]
        for j, P in enumerate(powers):
            c = t ** j / math.factorial(j)
            for r in range(n):
                for s in range(n):
                    out[r][s] += c * P[r][s]
        return out
    out = np.zeros((n, n))
    for j, P in enumerate(powers):
        out += (float(t) ** j / math.factorial(j)) * np.array(P, dtype=float)
    return out


@dataclass(frozen=True)
class OneParamSubgroup:
    """t -> exp(t * generator) for a nilpotent or a trace-zero diagonal generator."""

    kind: str  # "unipotent" or "diagonal"
    generator: tuple

    def __post_init__(self):
        if self.kind == "unipotent":
            _nilpotent_powers([list(r) for r in self.generator])
        elif self.kind == "diagonal":
            if abs(sum(float(v) for v in self.generator)) > 1e-12:
                raise KindViolation("diagonal generator must have trace zero")
        else:
            raise KindViolation(f"unknown kind {self.kind!r}")

    @classmethod
    def unipotent(cls, y) -> "OneParamSubgroup":
        return cls("unipotent", tuple(tuple(r) for r in y))

    @classmethod
    def diagonal(cls, entries) -> "OneParamSubgroup":
        return cls("diagonal", tuple(entries))

    @property
    def n(self) -> int:
        return len(self.generator)

    def at(self, t) -> np.ndarray:
        if self.kind == "diagonal":
            return np.diag([math.exp(float(t) * float(v)) for v in self.generator])
        return np.asarray(unipotent_exp([list(r) for r in self.generator], float(t)), dtype=float)

    def exact_at(self, t):
        if self.kind != "unipotent":
            raise KindViolation("exact evaluation needs a unipotent generator")
        return unipotent_exp([list(r) for r in self.generator], Fraction(t))


def horocycle() -> OneParamSubgroup:
    """u(t) = [[1, t], [0, 1]]."""
    return OneParamSubgroup.unipotent([[0, 1], [0, 0]])


def geodesic() -> OneParamSubgroup:
    """a(t) = diag(e^-t, e^t)."""
    return OneParamSubgroup.diagonal([-1, 1])
