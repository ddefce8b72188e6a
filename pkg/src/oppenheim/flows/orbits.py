"""Orbits of one-parameter flows on SL_n(R)/SL_n(Z) and their statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..errors import ConditioningError, PreconditionViolation
from ..forms import QuadraticForm, signature
from ..scalars import QuadExt
from .groups import OneParamSubgroup
from .lattice import (DET_TOL, LatticePoint, _combine, _dot, _norm, lagrange2, lll_columns,
                      minima, shortest_length_of_columns, short_vectors)


@dataclass(frozen=True)
class Observable:
    """A function of the lattice; ``fn`` receives any basis matrix of it."""

    name: str
    fn: Callable[[np.ndarray], float]

    def __call__(self, L) -> float:
        B = L.reduced_basis if isinstance(L, LatticePoint) else np.asarray(L, dtype=float)
        return float(self.fn(B))


def _l1(B) -> float:
    return shortest_length_of_columns([list(B[:, k]) for k in range(B.shape[1])])


SHORTEST = Observable("l1", _l1)
EXP_INV_SHORTEST = Observable("exp(-1/l1)", lambda B: math.exp(-1.0 / _l1(B)))
ONE = Observable("one", lambda B: 1.0)


@dataclass
class OrbitSeries:
    times: np.ndarray
    values: dict
    running: dict

    def to_csv(self, path):
        names = list(self.values)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + names + [f"running_avg[{k}]" for k in names])
            for i, t in enumerate(self.times):
                w.writerow([f"{t:.12g}"] + [f"{self.values[k][i]:.17g}" for k in names]
                           + [f"{self.running[k][i]:.17g}" for k in names])


def running_trapezoid(times, values) -> np.ndarray:
    """Prefix time averages t_k^-1 * integral_0^t_k by the trapezoid rule (Kahan sums)."""
    out = np.empty(len(values))
    out[0] = values[0]
    s = comp = 0.0
    for k in range(1, len(values)):
        inc = 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]) - comp
        tot = s + inc
        comp = (tot - s) - inc
        s = tot
        out[k] = s / (times[k] - times[0])
    return out


def _reduce_cols(cols):
    if len(cols) == 2:
        a0, a1, b0, b1 = lagrange2(cols[0][0], cols[0][1], cols[1][0], cols[1][1])
        return [[a0, a1], [b0, b1]]
    red, _ = lll_columns(cols)
    return red


def _det_cols(cols) -> float:
    if len(cols) == 2:
        return cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]
    return float(np.linalg.det(np.array(cols).T))


def _apply(g, cols):
    n = len(cols)
    return [[math.fsum(g[i][k] * c[k] for k in range(n)) for i in range(n)] for c in cols]


def flow_orbit(x0: LatticePoint, u: OneParamSubgroup, T: float, dt: float,
               observables: Sequence[Observable]) -> OrbitSeries:
    """Sample u(t_k) x0 at t_k = k dt, re-reducing after every step."""
    if dt <= 0 or T < dt:
        raise PreconditionViolation("need dt > 0 and T >= dt")
    K = int(round(T / dt))
    g = u.at(dt).tolist()
    cols = [list(x0.reduced_basis[:, k]) for k in range(x0.n)]
    times = np.arange(K + 1) * dt
    vals = {o.name: np.empty(K + 1) for o in observables}
    for k in range(K + 1):
        if k:
            cols = _reduce_cols(_apply(g, cols))
            if abs(_det_cols(cols) - 1) > DET_TOL:
                raise ConditioningError("determinant drifted", t=float(times[k]))
        B = np.array(cols).T
        for o in observables:
            vals[o.name][k] = o.fn(B)
    running = {name: running_trapezoid(times, v) for name, v in vals.items()}
    return OrbitSeries(times, vals, running)


def generic_start_sl2() -> LatticePoint:
    """A planar lattice whose horocycle orbit is not periodic.

    u(t) fixes exactly the horizontal vectors, and no nonzero vector of this
    lattice is horizontal: the second coordinates of the basis have ratio phi.
    """
    phi = (1 + math.sqrt(5)) / 2
    return LatticePoint.from_basis([[1.3, 0.0], [phi / 1.3, 1 / 1.3]])


def period_average(x0: LatticePoint, u: OneParamSubgroup, period: float, f: Observable,
                   nodes: int = 4096) -> float:
    """(1/period) * integral of f(u(s) x0) over one period (periodic trapezoid rule)."""
    tot = 0.0
    for k in range(nodes):
        B = u.at(period * k / nodes) @ x0.reduced_basis
        tot += f(B)
    return tot / nodes


# Haar measure on SL_2(R)/SL_2(Z) -----------------------------------------------------

@dataclass
class HaarSample(Sequence):
    """Points z = x + iy of the modular fundamental domain with frame angles."""

    x: np.ndarray
    y: np.ndarray
    angle: np.ndarray

    def __len__(self):
        return len(self.x)

    def basis(self, i) -> np.ndarray:
        x, y, th = self.x[i], self.y[i], self.angle[i]
        c, s = math.cos(th), math.sin(th)
        r = math.sqrt(y)
        A = np.array([[1 / r, x / r], [0.0, r]])
        return np.array([[c, -s], [s, c]]) @ A

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(len(self)))]
        return LatticePoint.from_basis(self.basis(i))

    def values(self, f: Observable) -> np.ndarray:
        return np.array([f(self.basis(i)) for i in range(len(self))])


def haar_sample_sl2(count: int, seed: int = 0) -> HaarSample:
    """Haar-random unimodular planar lattices.

    z is drawn with density proportional to y^-2 on {|x| <= 1/2, |z| >= 1}:
    y = 1/v with v uniform on (0, 2/sqrt 3] has density ~ y^-2 on y >= sqrt(3)/2,
    and points below the unit circle are rejected.  The frame angle is uniform.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    vmax = 2 / math.sqrt(3)
    xs, ys = [], []
    have = 0
    while have < count:
        m = max(2 * (count - have), 64)
        x = rng.uniform(-0.5, 0.5, m)
        y = 1.0 / (vmax * (1.0 - rng.random(m)))
        ok = x * x + y * y >= 1.0
        xs.append(x[ok])
        ys.append(y[ok])
        have += int(ok.sum())
    x = np.concatenate(xs)[:count]
    y = np.concatenate(ys)[:count]
    angle = rng.uniform(0, 2 * math.pi, count)
    return HaarSample(x, y, angle)


@dataclass(frozen=True)
class GapResult:
    gap: float
    time_average: float
    space_average: float
    space_stderr: float
    space_ci95: tuple


def equidistribution_gap(series: OrbitSeries, haar: HaarSample | Sequence, f: Observable,
                         bootstrap: int = 200, seed: int = 0) -> GapResult:
    """|time average - Haar average| with a bootstrap error bar on the Haar side."""
    if f.name not in series.running:
        raise KeyError(f"series has no observable {f.name!r}")
    t_avg = float(series.running[f.name][-1])
    vals = haar.values(f) if isinstance(haar, HaarSample) else np.array([f(L) for L in haar])
    s_avg = float(vals.mean())
    rng = np.random.default_rng(seed)
    boots = np.array([vals[rng.integers(0, len(vals), len(vals))].mean()
                      for _ in range(bootstrap)])
    lo, hi = np.quantile(boots, [0.025, 0.975])
    return GapResult(abs(t_avg - s_avg), t_avg, s_avg, float(boots.std(ddof=1)),
                     (float(lo), float(hi)))


# SO(F) orbits in SL_3(R)/SL_3(Z) -------------------------------------------------------

def so_nilpotent_generators(F: QuadraticForm):
    """Two nilpotent elements of so(F) generating opposite unipotent subgroups.

    With a, b F-orthogonal of opposite signs and F(a) = -F(b), u = a +- b is
    isotropic; for c F-orthogonal to a and b, X = u (Fc)^T - c (Fu)^T lies in
    so(F) and X^3 = 0.
    """
    if F.n != 3:
        raise PreconditionViolation("SO(F) scan needs n = 3")
    pos, neg = signature(F)
    if pos == 0 or neg == 0:
        raise PreconditionViolation("form is definite")
    M = F.float_matrix
    w, Q = np.linalg.eigh(M)
    # the eigenvalue whose sign occurs once
    lone = int(np.nonzero(np.sign(w) == (-1 if neg == 1 else 1))[0][0])
    rest = [i for i in range(3) if i != lone]
    a = Q[:, rest[0]] / math.sqrt(abs(w[rest[0]]))
    c = Q[:, rest[1]] / math.sqrt(abs(w[rest[1]]))
    b = Q[:, lone] / math.sqrt(abs(w[lone]))
    gens = []
    for u in (a + b, a - b):
        X = np.outer(u, M @ c) - np.outer(c, M @ u)
        gens.append(X / np.linalg.norm(X))
    return gens


HECKE_PRIME = 1_000_003


def hecke_sample_sl3(count: int, seed: int = 1, p: int = HECKE_PRIME) -> list:
    """Reduced bases of random index-p sublattices of Z^3, scaled to covolume 1.

    The sublattices {x : c.x = 0 mod p} for c uniform in P^2(F_p) equidistribute
    to Haar measure on SL_3(R)/SL_3(Z) as p grows (Hecke points), which gives
    a sampler that does not depend on any flow.
    """
    rng = np.random.default_rng(seed)
    s = p ** (-1.0 / 3.0)
    out = []
    while len(out) < count:
        c = [int(v) for v in rng.integers(0, p, 3)]
        if c[2] == 0:
            continue  # measure ~ 1/p; those points are skipped
        inv = pow(c[2], -1, p)
        a, b = (-c[0] * inv) % p, (-c[1] * inv) % p
        red, _ = lll_columns([[s, 0.0, a * s], [0.0, s, b * s], [0.0, 0.0, p * s]])
        out.append(red)
    return out


def _bin_index(edges, v):
    return int(np.searchsorted(edges, v, side="right")) - 1


def haar_bin_mass(bins: "ScanBins", count: int = 20_000, seed: int = 1) -> np.ndarray:
    """Fraction of Hecke-sampled lattices whose (l1, l2) falls in each bin."""
    e1, e2 = np.asarray(bins.l1_edges), np.asarray(bins.l2_edges)
    H = np.zeros((len(e1) - 1, len(e2) - 1))
    for red in hecke_sample_sl3(count, seed):
        l1, l2 = _two_minima3(red)
        i, j = _bin_index(e1, l1), _bin_index(e2, l2)
        if 0 <= i < H.shape[0] and 0 <= j < H.shape[1]:
            H[i, j] += 1
    return H / count


def support_from_mass(mass: np.ndarray) -> tuple:
    """Bins holding at least half of the uniform share of Haar mass, as '0'/'1' rows."""
    keep = mass >= 0.5 / mass.size
    return tuple("".join("1" if v else "0" for v in row) for row in keep)


# frozen from haar_bin_mass(ScanBins(), 20000, seed=1) and support_from_mass
HAAR_SUPPORT = (
    "000000000000",
    "000011111111",
    "000111111111",
    "000111111110",
    "000011111100",
    "000001111100",
    "000000111000",
    "000000011000",
    "000000000000",
)


@dataclass(frozen=True)
class ScanBins:
    """Fixed binning of (first minimum, second minimum) pairs.

    ``support`` marks the bins that count towards occupancy (rows of '0'/'1');
    None means every geometrically reachable bin.
    """

    l1_edges: tuple = tuple(np.round(np.linspace(0.25, 1.15, 10), 6))
    l2_edges: tuple = tuple(np.round(np.linspace(0.25, 1.45, 13), 6))
    support: tuple | None = HAAR_SUPPORT

    def support_mask(self) -> np.ndarray:
        if self.support is None:
            return self.reachable()
        return np.array([[ch == "1" for ch in row] for row in self.support])

    def reachable(self) -> np.ndarray:
        """Bins meeting {l1 <= l2, l1 * l2^2 <= sqrt 2} (Hermite's bound in dimension 3)."""
        R = np.zeros((len(self.l1_edges) - 1, len(self.l2_edges) - 1), dtype=bool)
        for i in range(R.shape[0]):
            a = self.l1_edges[i]
            for j in range(R.shape[1]):
                lo, hi = self.l2_edges[j], self.l2_edges[j + 1]
                b = max(lo, a)
                R[i, j] = b <= hi and a * b * b <= math.sqrt(2)
        return R


CLOSED_MIN_RATIO = 0.5
CLOSED_MAX_OCCUPANCY = 0.30
DENSE_MIN_OCCUPANCY = 0.90


@dataclass
class ScanResult:
    min_l1: float | None
    l1_start: float
    histogram: np.ndarray
    occupancy: float | None
    verdict: str | None
    steps: int
    thresholds: dict = field(default_factory=dict)
    projected: bool = False  # basis re-projected onto the exact orbit each step


def _two_minima3(red):
    """(l1, l2) of a reduced basis in R^3."""
    norms = sorted(_norm(v) for v in red)
    vecs = sorted((_combine(red, c) for c in short_vectors(red, norms[1])), key=_norm)
    a = vecs[0]
    n1 = _norm(a)
    for v in vecs[1:]:
        cr = (a[1] * v[2] - a[2] * v[1], a[2] * v[0] - a[0] * v[2], a[0] * v[1] - a[1] * v[0])
        nv = _norm(v)
        if math.sqrt(_dot(cr, cr)) > 1e-9 * n1 * nv:
            return n1, nv
    return n1, norms[1]


class _FormTracker:
    """Exact value of R^T F R along an orbit of SO(F) on an integral lattice.

    If R = g G with g in SO(F) and G integral, then R^T F R = G^T F G, which
    for F over Q(sqrt d) is (A + sqrt(d) B) / D with integer matrices A, B
    updated exactly by every reduction transform.  Projecting the float
    basis back onto {R : R^T F R = G^T F G} removes the rounding error that
    the flow amplifies transversally to the orbit.
    """

    def __init__(self, F: QuadraticForm, R0):
        n = F.n
        entries = [[F[i, j] for j in range(n)] for i in range(n)]
        d = next((e.d for row in entries for e in row if isinstance(e, QuadExt)), 1)
        a = [[Fraction(e.a if isinstance(e, QuadExt) else e) for e in row] for row in entries]
        b = [[Fraction(e.b) if isinstance(e, QuadExt) else Fraction(0) for e in row]
             for row in entries]
        D = math.lcm(*[x.denominator for row in a + b for x in row])
        G = [[int(round(v)) for v in row] for row in R0]
        self.d, self.D, self.n = d, D, n
        self.A = self._congruence([[int(x * D) for x in row] for row in a], G)
        self.B = self._congruence([[int(x * D) for x in row] for row in b], G)
        self.Fm = F.float_matrix
        self._k = None
        self._S = None

    @staticmethod
    def _congruence(M, G):
        n = len(M)
        MG = [[sum(M[i][k] * G[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        return [[sum(G[k][i] * MG[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    def update(self, U):
        """Apply the transform whose k-th coefficient column is U[k]."""
        G = [[U[j][i] for j in range(self.n)] for i in range(self.n)]
        self.A = self._congruence(self.A, G)
        if self.d != 1:
            self.B = self._congruence(self.B, G)

    def target(self) -> np.ndarray:
        if self.d == 1:
            return np.array([[x / self.D for x in row] for row in self.A])
        bits = max(abs(x).bit_length() for row in self.A + self.B for x in row) + 64
        if self._k is None or self._k < bits:
            self._k = 2 * bits
            self._S = math.isqrt(self.d << (2 * self._k))
        k, S = self._k, self._S
        scale = self.D << k
        return np.array([[(a * (1 << k) + b * S) / scale for a, b in zip(ra, rb)]
                         for ra, rb in zip(self.A, self.B)])

    def project(self, cols):
        R = np.array(cols).T
        G = self.target()
        for _ in range(2):
            A = R.T @ self.Fm @ R
            R = R + R @ (0.5 * np.linalg.solve(A, G - A))
        return [list(R[:, k]) for k in range(self.n)]


def so_orbit_scan(F: QuadraticForm, x0: LatticePoint, T: float, dt: float = 0.05,
                  seed: int = 0, bins: ScanBins = ScanBins()) -> ScanResult:
    """Walk SO(F)^o x0 by alternating blocks of the two unipotent flows.

    Block lengths are uniform in [0.5, 2] and the direction of time is a
    fair coin, both drawn from ``seed``.  Records the first two minima at
    every step.  The verdict is a heuristic diagnostic (thresholds in the
    result), not a decision procedure.
    """
    if x0.n != 3:
        raise PreconditionViolation("SO(F) scan needs a lattice in R^3")
    thresholds = {"closed_min_ratio": CLOSED_MIN_RATIO,
                  "closed_max_occupancy": CLOSED_MAX_OCCUPANCY,
                  "dense_min_occupancy": DENSE_MIN_OCCUPANCY,
                  "l1_edges": list(bins.l1_edges), "l2_edges": list(bins.l2_edges),
                  "support": list(bins.support) if bins.support else None}
    H = np.zeros((len(bins.l1_edges) - 1, len(bins.l2_edges) - 1), dtype=np.int64)
    l1_start = SHORTEST(x0)
    if T <= 0:
        return ScanResult(None, l1_start, H, None, None, 0, thresholds)
    gens = so_nilpotent_generators(F)
    from .groups import unipotent_exp

    rng = np.random.default_rng(seed)
    cols = [list(x0.reduced_basis[:, k]) for k in range(3)]
    R0 = x0.reduced_basis
    tracker = None
    if F.is_exact and np.allclose(R0, np.round(R0), atol=1e-12):
        tracker = _FormTracker(F, R0)
    e1, e2 = np.asarray(bins.l1_edges), np.asarray(bins.l2_edges)
    t = 0.0
    which = 0
    steps = 0
    min_l1 = math.inf
    while t < T - 1e-12:
        tau = min(float(rng.uniform(0.5, 2.0)), T - t)
        direction = 1.0 if rng.random() < 0.5 else -1.0
        nsub = max(1, int(math.ceil(tau / dt - 1e-9)))
        h = tau / nsub
        g = unipotent_exp(gens[which], direction * h).tolist()
        for _ in range(nsub):
            cols, U = lll_columns(_apply(g, cols))
            if tracker is not None:
                tracker.update(U)
                cols = tracker.project(cols)
            l1, l2 = _two_minima3(cols)
            steps += 1
            t += h
            if abs(_det_cols(cols) - 1) > DET_TOL:
                raise ConditioningError("determinant drifted", t=t)
            min_l1 = min(min_l1, l1)
            i = np.searchsorted(e1, l1, side="right") - 1
            j = np.searchsorted(e2, l2, side="right") - 1
            if 0 <= i < H.shape[0] and 0 <= j < H.shape[1]:
                H[i, j] += 1
        which ^= 1
    reach, supp = bins.reachable(), bins.support_mask()
    occupancy = float(((H > 0) & supp).sum() / supp.sum())
    thresholds["occupancy_all_reachable"] = float(((H > 0) & reach).sum() / reach.sum())
    if occupancy >= DENSE_MIN_OCCUPANCY:
        verdict = "dense-like"
    elif min_l1 >= CLOSED_MIN_RATIO * l1_start and occupancy < CLOSED_MAX_OCCUPANCY:
        verdict = "closed-like"
    else:
        verdict = "inconclusive"
    return ScanResult(min_l1, l1_start, H, occupancy, verdict, steps, thresholds,
                      tracker is not None)
