"""How fast a polynomial can fall from its maximum.

For a polynomial P of degree <= n whose maximum of |P| on [0, t] is reached
at t, there is eta > 0 depending only on n with |P(s)| > |P(t)|/2 for
s in ((1 - eta) t, t].  After rescaling, t = 1 and |P(1)| = 1; eta(P) is
1 minus the last point of [0, 1) where |P| <= 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as Poly
from scipy.optimize import minimize


def _argmax_abs(c) -> float:
    """Largest s in [0, 1] maximizing |P(s)| (critical points and endpoints)."""
    cand = [0.0, 1.0]
    if len(c) > 2:
        for r in Poly.polyroots(Poly.polyder(c)):
            if abs(r.imag) < 1e-12 and 0 <= r.real <= 1:
                cand.append(float(r.real))
    vals = [abs(Poly.polyval(s, c)) for s in cand]
    top = max(vals)
    return max(s for s, v in zip(cand, vals) if v >= top * (1 - 1e-10))


def _trim(c):
    """Drop leading coefficients that are negligible next to the largest one."""
    c = np.asarray(c, dtype=float)
    big = np.abs(c).max() if len(c) else 0.0
    k = len(c)
    while k and abs(c[k - 1]) <= 1e-13 * big:
        k -= 1
    return c[:k]


def normalize(c):
    """Rescale P so that max_[0,1] |P| is attained at 1 with P(1) = 1, or None for P = 0."""
    c = _trim(c)
    if len(c) == 0:
        return None
    s = _argmax_abs(c)
    val = Poly.polyval(s, c)
    if val == 0:
        return None
    return c * s ** np.arange(len(c)) / val


def eta_of(c) -> float:
    """eta for a polynomial already normalized by :func:`normalize`."""
    c = _trim(c)
    if len(c) <= 1:
        return 1.0
    last = None
    for shift in (0.5, -0.5):
        d = c.copy()
        d[0] -= shift
        for r in Poly.polyroots(d):
            if abs(r.imag) < 1e-9 and -1e-12 <= r.real < 1 - 1e-12:
                last = r.real if last is None else max(last, r.real)
    return 1.0 if last is None else 1.0 - max(last, 0.0)


def chebyshev_eta(n: int) -> float:
    """eta of T_n(2s - 1): the largest s < 1 with T_n = 1/2 is (1 + cos(pi/(3n)))/2."""
    return math.sin(math.pi / (6 * n)) ** 2


def chebyshev_candidate(n: int) -> np.ndarray:
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    # T_n(2s - 1) in the monomial basis of s
    return _compose_affine(C.cheb2poly(coef), -1.0, 2.0)


def _compose_affine(c, a, b):
    """Coefficients of P(a + b s)."""
    out = np.zeros(1)
    lin = np.array([a, b])
    power = np.ones(1)
    for ck in c:
        out = Poly.polyadd(out, ck * power)
        power = Poly.polymul(power, lin)
    return out


@dataclass(frozen=True)
class EtaEstimate:
    n: int
    eta: float
    eta_random: float
    eta_chebyshev: float
    eta_optimized: float
    worst: tuple  # coefficients of the worst polynomial found, normalized


def _grid_eta(P: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Approximate eta for each row of sampled values P (already normalized)."""
    low = np.abs(P) <= 0.5
    low[:, -1] = False
    idx = np.where(low.any(axis=1), len(grid) - 1 - np.argmax(low[:, ::-1], axis=1), -1)
    return np.where(idx >= 0, 1.0 - grid[np.maximum(idx, 0)], 1.0)


def poly_divergence_eta(n: int, trials: int = 10_000, seed: int = 0,
                        grid_points: int = 2001, refine: int = 64) -> EtaEstimate:
    """Smallest eta over random and targeted polynomials of degree <= n.

    Random Gaussian coefficients are screened on a grid; the ``refine``
    worst are recomputed exactly from their roots.  A Nelder-Mead search
    started at the Chebyshev candidate and at the worst random polynomial
    adds a targeted minimum.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    grid = np.linspace(0.0, 1.0, grid_points)
    V = np.vander(grid, n + 1, increasing=True)
    best, worst = 1.0, np.array([1.0])
    pool = []
    batch = 4096
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        coefs = rng.standard_normal((m, n + 1))
        vals = coefs @ V.T
        k = np.argmax(np.abs(vals), axis=1)
        s = grid[k]
        top = vals[np.arange(m), k]
        ok = (np.abs(top) > 0) & (s > 0)
        scaled = coefs[ok] * (s[ok, None] ** np.arange(n + 1)) / top[ok, None]
        etas = _grid_eta(scaled @ V.T, grid)
        order = np.argsort(etas)[:refine]
        pool.extend(coefs[ok][order])
        done += m
    for c in pool:
        q = normalize(c)
        if q is None:
            continue
        e = eta_of(q)
        if e < best:
            best, worst = e, q
    eta_random = best

    cheb = normalize(chebyshev_candidate(n))
    eta_cheb = eta_of(cheb)

    def objective(c):
        q = normalize(c)
        return 1.0 if q is None else eta_of(q)

    eta_opt = eta_cheb
    opt_best = cheb
    for start in (cheb, worst if len(worst) == n + 1 else cheb):
        res = minimize(objective, start, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        q = normalize(res.x)
        if q is not None and eta_of(q) < eta_opt:
            eta_opt, opt_best = eta_of(q), q
    overall = min(eta_random, eta_cheb, eta_opt)
    arg = worst if overall == eta_random else cheb if overall == eta_cheb else opt_best
    return EtaEstimate(n, overall, eta_random, eta_cheb, eta_opt, tuple(map(float, arg)))
