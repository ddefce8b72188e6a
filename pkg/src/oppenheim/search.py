"""Searches over Z^n and Z[1/p]^n for values of quadratic forms.

Two enumeration engines live here and are kept independent of each other:

* the *slice solver* fixes all coordinates but one and solves the
  resulting quadratic inequality for the last coordinate, so finding all
  x in a box with F(x) in a narrow window costs O(R^(n-1));
* the *box sweep* evaluates every point of a box (vectorised float64) and
  re-checks only points near a decision boundary with exact arithmetic.

Points are visited in expanding sup-norm shells.  Within a shell the
order is decreasing lexicographic, and only the representative of
{x, -x} whose first nonzero coordinate is positive is reported (F is even).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import IsotropyViolation, PrimitivityViolation
from .forms import PadicForm, QuadraticForm, is_isotropic_padic, is_isotropic_real, vp
from .scalars import Real, as_scalar, exact_tolerance, sign

CHUNK = 1 << 20


@dataclass(frozen=True)
class SearchBudget:
    max_radius: int = 512
    max_evals: int = 500_000_000
    seed: int = 0

    def __post_init__(self):
        if self.max_radius < 0 or self.max_evals <= 0:
            raise ValueError("budget fields must be positive")


@dataclass(frozen=True)
class BandQuery:
    a: object
    b: object
    r: int
    primitive_only: bool = False
    euclidean: bool = False

    def __post_init__(self):
        a, b = exact_tolerance(self.a), exact_tolerance(self.b)
        if a < 0 or a > b:
            raise ValueError("band needs 0 <= a <= b")
        if self.r < 0:
            raise ValueError("radius must be >= 0")


@dataclass
class BandResult:
    count: int
    samples: list
    partial: bool
    budget_used: int


@dataclass(frozen=True)
class Hit:
    x: tuple
    value: object

    @property
    def radius(self) -> int:
        return max(abs(v) for v in self.x)


@dataclass(frozen=True)
class SIntegerContext:
    p: int
    e: int
    eps_inf: float
    eps_p: float

    def __post_init__(self):
        if self.e < 0:
            raise ValueError("e must be >= 0")
        for eps in (self.eps_inf, self.eps_p):
            if not 0 < float(eps) < 1:
                raise ValueError("tolerances must lie in (0, 1)")


@dataclass(frozen=True)
class SIntegerHit:
    x: tuple  # Fractions, x = v / p**e
    v: tuple
    e: int
    real_abs: object
    padic_abs: Fraction


class _Meter:
    def __init__(self, budget: SearchBudget):
        self.limit = budget.max_evals
        self.used = 0

    def spend(self, k: int) -> bool:
        self.used += int(k)
        return self.used <= self.limit


# ordering helpers -----------------------------------------------------------

def shell_key(x) -> tuple:
    return (max(abs(int(v)) for v in x), tuple(-int(v) for v in x))


def _canonical_mask(X: np.ndarray) -> np.ndarray:
    nz = X != 0
    first = np.argmax(nz, axis=1)
    lead = X[np.arange(len(X)), first]
    return lead > 0


def _row_gcd(X: np.ndarray) -> np.ndarray:
    return np.gcd.reduce(np.abs(X), axis=1)


def _sorted_rows(X: np.ndarray) -> list:
    rows = [tuple(int(v) for v in r) for r in X]
    rows.sort(key=shell_key)
    return rows


def _grid_chunks(k: int, R: int, inner: int = -1, chunk: int = CHUNK):
    """Integer points of [-R, R]^k with sup-norm > inner, in chunks."""
    side = np.arange(-R, R + 1, dtype=np.int64)
    w = 2 * R + 1
    t = 1
    while t < k and w ** (t + 1) <= chunk:
        t += 1
    tail = np.stack(np.meshgrid(*([side] * t), indexing="ij"), axis=-1).reshape(-1, t)
    tail_norm = np.abs(tail).max(axis=1)
    if t == k:
        yield tail[tail_norm > inner]
        return
    per = max(1, chunk // len(tail))
    leads = itertools.product(range(-R, R + 1), repeat=k - t)
    while True:
        batch = list(itertools.islice(leads, per))
        if not batch:
            return
        L = np.array(batch, dtype=np.int64)
        lead_norm = np.abs(L).max(axis=1)
        keep_all = lead_norm > inner
        parts = []
        for Lrow, full in zip(L, keep_all):
            T = tail if full else tail[tail_norm > inner]
            if len(T) == 0:
                continue
            parts.append(np.hstack([np.broadcast_to(Lrow, (len(T), k - t)), T]))
        if parts:
            yield np.vstack(parts)


# exact comparisons ---------------------------------------------------------------

def _tol_for(F: QuadraticForm, eps):
    if F.is_exact:
        return exact_tolerance(eps)
    return Real(exact_tolerance(eps), F.prec)


def _nonzero(F, v) -> bool:
    if isinstance(v, Real):
        return abs(v.v) > 0
    return sign(v) != 0


# slice solver -------------------------------------------------------------------

def _half_grid(k: int, R: int, chunk: int = CHUNK):
    """Blocks (L, T) whose rows L_i + T_j cover [-R, R]^k with first coordinate >= 0.

    Points with first coordinate 0 appear with both signs of the rest; the
    caller canonicalises and de-duplicates.
    """
    side = np.arange(-R, R + 1, dtype=np.int64)
    half = np.arange(0, R + 1, dtype=np.int64)
    w = 2 * R + 1
    t = 1
    while t < k and w ** (t + 1) <= chunk:
        t += 1
    axes = [side] * t
    if t == k:
        axes[0] = half
    T = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, t)
    if t == k:
        yield np.zeros((1, 0), dtype=np.int64), T
        return
    per = max(1, chunk // len(T))
    ranges = [range(0, R + 1)] + [range(-R, R + 1)] * (k - t - 1)
    leads = itertools.product(*ranges)
    while True:
        batch = list(itertools.islice(leads, per))
        if not batch:
            return
        yield np.array(batch, dtype=np.int64), T


def _slice_candidates(F: QuadraticForm, lo: float, hi: float, R: int, inner: int,
                      meter: _Meter):
    """Superset of canonical x, inner < |x|_inf <= R, with lo < F(x) < hi.

    The coordinate with the largest diagonal coefficient is solved for; the
    others run over a half grid.  Returns None when the budget runs out.
    """
    f = F.float_matrix
    n = F.n
    diag = np.abs(np.diag(f))
    if diag.max() == 0 or n == 1:
        return _box_candidates(F, lo, hi, R, inner, meter)
    j = int(np.argmax(diag))
    others = [i for i in range(n) if i != j]
    g = f[np.ix_(others, others)]
    h = f[others, j].copy()
    alpha = f[j, j]
    eta = 1e-11 * (np.abs(f).sum() * (R + 1) ** 2 + abs(lo) + abs(hi) + 1.0)
    lo_w, hi_w = lo - eta, hi + eta
    if alpha < 0:
        alpha, h, g = -alpha, -h, -g
        lo_w, hi_w = -hi_w, -lo_w
    slack = 1e-9 * (R + 1)
    k = n - 1
    found = []
    for L, T in _half_grid(k, R):
        if not meter.spend(len(L) * len(T)):
            return None
        a = L.shape[1]
        Lf, Tf = L.astype(float), T.astype(float)
        gamma = (np.einsum("bi,ij,bj->b", Lf, g[:a, :a], Lf)[:, None]
                 + 2.0 * (Lf @ g[:a, a:]) @ Tf.T
                 + np.einsum("mi,ij,mj->m", Tf, g[a:, a:], Tf)[None, :])
        beta = 2.0 * ((Lf @ h[:a])[:, None] + (Tf @ h[a:])[None, :])
        b2 = beta * beta
        dh = b2 - 4.0 * alpha * (gamma - hi_w)
        sh = np.sqrt(np.maximum(dh, 0.0))
        dl = b2 - 4.0 * alpha * (gamma - lo_w)
        sl = np.sqrt(np.maximum(dl, 0.0))
        dead = dh < 0
        cut = dl > 0
        inv = 0.5 / alpha
        r1h = (-beta - sh) * inv
        r2h = (-beta + sh) * inv
        # {g < hi} minus {g <= lo}: [r1h, r1l] and [r2l, r2h]
        r1l = np.where(cut, (-beta - sl) * inv, r2h)
        r2l = np.where(cut, (-beta + sl) * inv, r2h)
        for A, B in ((r1h, r1l), (r2l, r2h)):
            ta = np.maximum(np.ceil(A - slack), -R)
            tb = np.minimum(np.floor(B + slack), R)
            live = (tb >= ta) & ~dead
            bi, mi = np.nonzero(live)
            if len(bi) == 0:
                continue
            ta_l = ta[bi, mi].astype(np.int64)
            cnt = tb[bi, mi].astype(np.int64) - ta_l + 1
            total = int(cnt.sum())
            if not meter.spend(total):
                return None
            rows = np.repeat(np.arange(len(bi)), cnt)
            starts = np.cumsum(cnt) - cnt
            t = ta_l[rows] + (np.arange(total) - starts[rows])
            Y = np.hstack([L[bi[rows]], T[mi[rows]]])
            X = np.insert(Y, j, t, axis=1)
            X[~_canonical_mask(X)] *= -1
            X = X[np.abs(X).max(axis=1) > inner]
            if len(X):
                found.append(X)
    if not found:
        return np.zeros((0, n), dtype=np.int64)
    return np.unique(np.vstack(found), axis=0)


def _box_candidates(F, lo, hi, R, inner, meter):
    f = F.float_matrix
    eta = 1e-11 * (np.abs(f).sum() * (R + 1) ** 2 + abs(lo) + abs(hi) + 1.0)
    found = []
    for X in _grid_chunks(F.n, R, inner):
        if not meter.spend(len(X)):
            return None
        X = X[_canonical_mask(X)]
        v = F.evaluate_float(X)
        X = X[(v > lo - eta) & (v < hi + eta)]
        if len(X):
            found.append(X)
    return np.vstack(found) if found else np.zeros((0, F.n), dtype=np.int64)


def _windowed_search(F: QuadraticForm, lo, hi, test, budget: SearchBudget, primitive=True,
                     start=0, collect=False):
    """Expanding-radius search for x with ``test(x, F(x))`` true.

    ``lo``/``hi`` bound F(x) (floats) and only prune; ``test`` decides
    exactly.  Radii double from 2 up to ``budget.max_radius``.
    """
    meter = _Meter(budget)
    inner = start
    R = min(max(2, 2 * start), budget.max_radius)
    hits = []
    exhausted = False
    while inner < budget.max_radius:
        X = _slice_candidates(F, lo, hi, R, inner, meter)
        if X is None:
            exhausted = True
            break
        if primitive and len(X):
            X = X[_row_gcd(X) == 1]
        for x in _sorted_rows(X):
            val = F.evaluate(x)
            if test(x, val):
                if not collect:
                    return Hit(x, val), meter.used, False
                hits.append(Hit(x, val))
        inner, R = R, min(2 * R, budget.max_radius)
    if collect:
        return hits, meter.used, exhausted
    return None, meter.used, exhausted


# public operations ----------------------------------------------------------------

def find_small_value(F: QuadraticForm, eps, budget: SearchBudget = SearchBudget(),
                     strict_nonzero: bool = True, primitive: bool = True, accept=None):
    """First x (shell order) with 0 < |F(x)| < eps, or |F(x)| < eps when not strict.

    ``accept`` is an optional extra predicate ``accept(x) -> bool``.
    Returns a :class:`Hit` or None when the budget runs out.
    """
    tol = _tol_for(F, eps)
    e = float(eps)

    def test(x, v):
        if not abs(v) < tol:
            return False
        if strict_nonzero and not _nonzero(F, v):
            return False
        return accept is None or accept(x)

    hit, _, _ = _windowed_search(F, -e, e, test, budget, primitive)
    return hit


def small_value_sweep(F: QuadraticForm, eps, budget: SearchBudget = SearchBudget()):
    """All primitive canonical x up to the budget radius with 0 < |F(x)| < eps."""
    tol = _tol_for(F, eps)
    e = float(eps)
    hits, _, _ = _windowed_search(
        F, -e, e, lambda x, v: abs(v) < tol and _nonzero(F, v), budget, True, collect=True)
    return hits


def sign_profile(values, eps) -> tuple[int, int]:
    """Counts of values in (0, eps) and in (-eps, 0)."""
    pos = neg = 0
    for v in values:
        v = v.value if isinstance(v, Hit) else v
        e = eps if isinstance(v, (float, int, Real)) else exact_tolerance(eps)
        if 0 < v < e:
            pos += 1
        elif -e < v < 0:
            neg += 1
    return pos, neg


def approx_value(F: QuadraticForm, c, eps, budget: SearchBudget = SearchBudget()):
    """Primitive x with |F(x) - c| < eps (density of F on primitive vectors)."""
    c = as_scalar(c)
    if (sign(c) == 0) if not isinstance(c, Real) else c.v == 0:
        return find_small_value(F, eps, budget, strict_nonzero=True)
    tol = _tol_for(F, eps)
    cf, e = float(c), float(eps)
    return _windowed_search(F, cf - e, cf + e, lambda x, v: abs(v - c) < tol, budget)[0]


def pair_difference_search(E: QuadraticForm, eps, budget: SearchBudget = SearchBudget()):
    """Integer x, y with 0 < |E(x) - E(y)| < eps, as ``(x, y, E(x) - E(y))``.

    For indefinite E the search runs on E itself with y = 0; otherwise it
    looks for small nonzero values of E + (-E) on Z^(2n).
    """
    n = E.n
    if is_isotropic_real(E):
        hit = find_small_value(E, eps, budget, strict_nonzero=True)
        if hit is None:
            return None
        return hit.x, (0,) * n, hit.value
    hit = find_small_value(E.direct_sum(-E), eps, budget, strict_nonzero=True)
    if hit is None:
        return None
    x, y = hit.x[:n], hit.x[n:]
    return x, y, E.evaluate(x) - E.evaluate(y)


def enumerate_band(F: QuadraticForm, q: BandQuery, sample_size: int = 20,
                   budget: SearchBudget | None = None) -> BandResult:
    """Count x in Z^n with |x|_inf <= r and a <= |F(x)| <= b (x and -x both count)."""
    meter = _Meter(budget or SearchBudget(max_radius=max(q.r, 1)))
    a_ex, b_ex = _tol_for(F, q.a), _tol_for(F, q.b)
    a, b = float(q.a), float(q.b)
    f = F.float_matrix
    margin = 1e-11 * (np.abs(f).sum() * (q.r + 1) ** 2 + b + 1.0)
    count = 0
    hits = []
    partial = False
    for X in _grid_chunks(F.n, q.r):
        if not meter.spend(len(X)):
            partial = True
            break
        if q.primitive_only:
            X = X[_row_gcd(X) == 1]
        if q.euclidean:
            X = X[(X * X).sum(axis=1) <= q.r * q.r]
        av = np.abs(F.evaluate_float(X))
        sure = (av > a + margin) & (av < b - margin)
        maybe = ~sure & (av >= a - margin) & (av <= b + margin)
        count += int(sure.sum())
        hits.append(X[sure])
        ok = []
        for i in np.nonzero(maybe)[0]:
            v = abs(F.evaluate(X[i].tolist()))
            if a_ex <= v <= b_ex:
                ok.append(i)
        count += len(ok)
        if ok:
            hits.append(X[ok])
        if sum(len(h) for h in hits) > 50 * max(sample_size, 1):
            hits = [np.array(sorted(np.vstack(hits).tolist(), key=shell_key)[:sample_size],
                             dtype=np.int64).reshape(-1, F.n)]
    allhits = np.vstack(hits) if hits else np.zeros((0, F.n), dtype=np.int64)
    samples = sorted((tuple(int(v) for v in r) for r in allhits), key=shell_key)[:sample_size]
    return BandResult(count, samples, partial, meter.used)


# primitive tuples ----------------------------------------------------------------------

def _bareiss_det(M) -> int:
    a = [list(map(int, row)) for row in M]
    n = len(a)
    sgn, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sgn = -sgn
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sgn * a[n - 1][n - 1]


def maximal_minors_gcd(t) -> int:
    rows = [list(map(int, v)) for v in t]
    m, n = len(rows), len(rows[0])
    g = 0
    for cols in itertools.combinations(range(n), m):
        g = math.gcd(g, _bareiss_det([[r[c] for c in cols] for r in rows]))
        if g == 1:
            return 1
    return g


def is_primitive_tuple(t) -> bool:
    """True iff the vectors extend to a basis of Z^n (gcd of maximal minors is 1)."""
    t = [tuple(int(v) for v in x) for x in t]
    if not t:
        return True
    m, n = len(t), len(t[0])
    if m > n or any(len(x) != n for x in t):
        return False
    if m == n:
        return abs(_bareiss_det(t)) == 1
    return maximal_minors_gcd(t) == 1


def complete_to_unimodular(t) -> tuple:
    """An n x n integer matrix with det 1 whose first m columns are ``t``.

    Row-reduces the n x m matrix with columns ``t`` to [I; 0] while
    accumulating the inverse transform W, so that W[:, :m] = t.
    """
    cols = [tuple(int(v) for v in x) for x in t]
    m = len(cols)
    n = len(cols[0])
    if m > n:
        raise PrimitivityViolation("more vectors than the dimension")
    M = [[cols[c][r] for c in range(m)] for r in range(n)]
    W = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap(i, j):
        M[i], M[j] = M[j], M[i]
        for row in W:
            row[i], row[j] = row[j], row[i]

    def addmul(i, j, k):  # row_i += k * row_j
        if k == 0:
            return
        M[i] = [a + k * b for a, b in zip(M[i], M[j])]
        for row in W:
            row[j] -= k * row[i]

    def negate(i):
        M[i] = [-a for a in M[i]]
        for row in W:
            row[i] = -row[i]

    for c in range(m):
        while True:
            nz = [r for r in range(c, n) if M[r][c] != 0]
            if not nz:
                raise PrimitivityViolation("vectors are linearly dependent")
            piv = min(nz, key=lambda r: abs(M[r][c]))
            if piv != c:
                swap(piv, c)
            done = True
            for r in range(c + 1, n):
                if M[r][c] != 0:
                    addmul(r, c, -(M[r][c] // M[c][c]))
                    if M[r][c] != 0:
                        done = False
            if done:
                break
        if abs(M[c][c]) != 1:
            raise PrimitivityViolation("tuple is not primitive")
        if M[c][c] < 0:
            negate(c)
        for r in range(c):
            addmul(r, c, -M[r][c])
    if m < n and _bareiss_det(W) < 0:
        for row in W:
            row[n - 1] = -row[n - 1]
    return tuple(tuple(row) for row in W)


def _assemble(cands, limit_pairs=10**6):
    """First primitive tuple picking one candidate per target, depth first."""
    tried = 0
    k = len(cands)

    def rec(i, chosen):
        nonlocal tried
        if i == k:
            return list(chosen)
        for x in cands[i]:
            tried += 1
            if tried > limit_pairs:
                return None
            trial = chosen + [x]
            if maximal_minors_gcd(trial) == 1:
                out = rec(i + 1, trial)
                if out is not None:
                    return out
        return None

    return rec(0, [])


def primitive_tuple_approx(F: QuadraticForm, targets, eps, budget: SearchBudget = SearchBudget(),
                           strategy: str = "auto", per_target: int = 64):
    """A primitive (n-1)-tuple (x_1, ..., x_{n-1}) with |F(x_i) - c_i| < eps.

    ``strategy`` is ``"band"`` (per-target window search, then assembly under
    the gcd-of-minors filter), ``"walk"`` (seeded random walk over SL_n(Z)
    by elementary column operations) or ``"auto"`` (band, then walk).
    """
    targets = [as_scalar(c) for c in targets]
    if strategy in ("auto", "band"):
        out = _tuple_by_bands(F, targets, eps, budget, per_target)
        if out is not None or strategy == "band":
            return out
    return _tuple_by_walk(F, targets, eps, budget)


def _tuple_by_bands(F, targets, eps, budget, per_target):
    tol = _tol_for(F, eps)
    e = float(eps)
    meter = _Meter(budget)
    lists = [[] for _ in targets]
    inner, R = 0, min(2, budget.max_radius)
    while True:
        for i, c in enumerate(targets):
            if len(lists[i]) >= per_target:
                continue
            cf = float(c)
            X = _slice_candidates(F, cf - e, cf + e, R, inner, meter)
            if X is None:
                return None
            X = X[_row_gcd(X) == 1] if len(X) else X
            scored = []
            for x in _sorted_rows(X):
                err = abs(F.evaluate(x) - c)
                if err < tol:
                    scored.append((shell_key(x)[0], err, x))
            # closest first within a shell, then the usual shell order
            scored.sort(key=lambda item: item[:2])
            lists[i].extend(x for _, _, x in scored[:per_target - len(lists[i])])
        if all(lists):
            out = _assemble(lists)
            if out is not None:
                return tuple(out)
        if R >= budget.max_radius:
            return None
        inner, R = R, min(2 * R, budget.max_radius)


def _tuple_by_walk(F, targets, eps, budget):
    n = F.n
    k = len(targets)
    tol = _tol_for(F, eps)
    rng = np.random.default_rng(budget.seed)
    f = F.float_matrix
    tf = np.array([float(c) for c in targets])
    g = np.eye(n, dtype=np.int64)

    def score(mat):
        cols = mat[:, :k].astype(float)
        vals = np.einsum("ik,ij,jk->k", cols, f, cols)
        return float(np.abs(vals - tf).sum()), vals

    cur, vals = score(g)
    steps = min(budget.max_evals, 200_000)
    temp = 1.0
    for step in range(steps):
        if np.all(np.abs(vals - tf) < float(eps)):
            tup = [tuple(int(v) for v in g[:, i]) for i in range(k)]
            if all(abs(F.evaluate(x) - c) < tol for x, c in zip(tup, targets)):
                return tuple(tup)
        i, j = rng.choice(n, size=2, replace=False)
        s = 1 if rng.random() < 0.5 else -1
        trial = g.copy()
        trial[:, i] += s * trial[:, j]
        if np.abs(trial).max() > budget.max_radius:
            continue
        new, nvals = score(trial)
        if new <= cur or rng.random() < math.exp(-(new - cur) / temp):
            g, cur, vals = trial, new, nvals
        temp = max(1e-3, temp * 0.9995)
    return None


# S-integers --------------------------------------------------------------------------

def s_integer_small_value(F_inf: QuadraticForm, F_p: PadicForm, ctx: SIntegerContext,
                          budget: SearchBudget = SearchBudget()):
    """x in p^(-e) Z^n with 0 < |F_inf(x)| < eps_inf and 0 < |F_p(x)|_p < eps_p.

    Points x = v / p**e are visited with v in expanding sup-norm shells
    (box sweep engine).  Both components must be isotropic.
    """
    if F_inf.n != F_p.n:
        raise ValueError("components have different dimensions")
    if F_p.p != ctx.p:
        raise ValueError("p-adic component uses a different prime")
    if not is_isotropic_real(F_inf):
        raise IsotropyViolation("real component is anisotropic")
    if not is_isotropic_padic(F_p):
        raise IsotropyViolation(f"{ctx.p}-adic component is anisotropic")
    p, e = ctx.p, ctx.e
    scale = p ** (2 * e)
    tol_inf = _tol_for(F_inf, ctx.eps_inf) * scale
    eps_p = exact_tolerance(ctx.eps_p)
    window = float(ctx.eps_inf) * scale
    f = F_inf.float_matrix
    meter = _Meter(budget)
    inner, R = 0, min(2, budget.max_radius)
    while inner < budget.max_radius:
        margin = 1e-11 * (np.abs(f).sum() * (R + 1) ** 2 + 1.0)
        cands = []
        for X in _grid_chunks(F_inf.n, R, inner):
            if not meter.spend(len(X)):
                return None
            X = X[_canonical_mask(X)]
            v = F_inf.evaluate_float(X)
            X = X[np.abs(v) < window + margin]
            if len(X):
                cands.append(X)
        rows = _sorted_rows(np.vstack(cands)) if cands else []
        for v in rows:
            real = F_inf.evaluate(v)
            if not (abs(real) < tol_inf and _nonzero(F_inf, real)):
                continue
            m = F_p.evaluate(v)
            if m == 0:
                continue
            padic = Fraction(p) ** (2 * e - vp(m, p))
            if padic < eps_p:
                x = tuple(Fraction(c, p ** e) for c in v)
                return SIntegerHit(x, v, e, abs(real) / scale, padic)
        inner, R = R, min(2 * R, budget.max_radius)
    return None
