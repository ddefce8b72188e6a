"""Exact symmetric-pair computations in sl_n over Q and Q(sqrt d).

The involution attached to a form F is dsigma(X) = -F^-1 X^T F; its fixed
space k is so(F) = {X : X^T F + F X = 0} and p is the (-1)-eigenspace.
Every check below is exact linear algebra on coordinate vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import HypothesisViolation, NonDegenerateViolation
from .forms import QuadraticForm
from .scalars import QuadExt, format_scalar

# matrices -------------------------------------------------------------------------


def zeros(n):
    return [[Fraction(0)] * n for _ in range(n)]


def matmul(a, b):
    # the basis matrices are very sparse, so skip zero products
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        row = out[i]
        for k in range(n):
            aik = a[i][k]
            if aik != 0:
                bk = b[k]
                for j in range(n):
                    if bk[j] != 0:
                        row[j] = row[j] + aik * bk[j]
    return out


def bracket(x, y):
    xy, yx = matmul(x, y), matmul(y, x)
    return [[p - q for p, q in zip(r, s)] for r, s in zip(xy, yx)]


def transpose(a):
    return [list(r) for r in zip(*a)]


def trace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def mat_inverse(a):
    n = len(a)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise NonDegenerateViolation("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [v - f * w for v, w in zip(m[r], m[c])]
    return [row[n:] for row in m]


def is_zero_matrix(a) -> bool:
    return all(v == 0 for row in a for v in row)


# exact subspaces --------------------------------------------------------------------

def _rref(rows):
    """Reduced row echelon form; returns (rows, pivots)."""
    rows = [list(r) for r in rows]
    out, pivots = [], []
    for r in rows:
        for basis_row, p in zip(out, pivots):
            if r[p] != 0:
                f = r[p]
                r = [a - f * b for a, b in zip(r, basis_row)]
        lead = next((i for i, v in enumerate(r) if v != 0), None)
        if lead is None:
            continue
        inv = 1 / r[lead]
        r = [v * inv for v in r]
        for k, basis_row in enumerate(out):
            if basis_row[lead] != 0:
                f = basis_row[lead]
                out[k] = [a - f * b for a, b in zip(basis_row, r)]
        out.append(r)
        pivots.append(lead)
    order = sorted(range(len(out)), key=lambda k: pivots[k])
    return [out[k] for k in order], [pivots[k] for k in order]


@dataclass(frozen=True)
class Subspace:
    """Span of coordinate vectors, stored in reduced row echelon form."""

    rows: tuple
    pivots: tuple
    ambient: int

    @classmethod
    def span(cls, vectors, ambient: int) -> "Subspace":
        rows, piv = _rref(vectors)
        return cls(tuple(tuple(r) for r in rows), tuple(piv), ambient)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, v) -> bool:
        r = list(v)
        for row, p in zip(self.rows, self.pivots):
            if r[p] != 0:
                f = r[p]
                r = [a - f * b for a, b in zip(r, row)]
        return all(x == 0 for x in r)

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.rows)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.ambient == other.ambient
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.rows, self.ambient))

    def join(self, vectors) -> "Subspace":
        return Subspace.span(list(self.rows) + list(vectors), self.ambient)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Exact intersection via the kernel of [A; -B]."""
        if self.dim == 0 or other.dim == 0:
            return Subspace((), (), self.ambient)
        A, B = list(self.rows), list(other.rows)
        # solve sum a_i A_i = sum b_j B_j
        cols = A + [[-x for x in r] for r in B]
        M = transpose(cols)  # ambient x (dimA + dimB)
        kernel = nullspace(M)
        vecs = []
        for k in kernel:
            v = [sum((k[i] * A[i][c] for i in range(len(A))), Fraction(0))
                 for c in range(self.ambient)]
            vecs.append(v)
        return Subspace.span(vecs, self.ambient)


def nullspace(M):
    """Basis of {c : M c = 0} for a matrix given as a list of rows."""
    if not M:
        return []
    ncols = len(M[0])
    rows, piv = _rref(M)
    free = [j for j in range(ncols) if j not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(rows, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


# sl_n ---------------------------------------------------------------------------------

class LieAlgebraSLn:
    """sl_n with basis E_ij (i != j, row-major) then H_i = E_ii - E_(i+1)(i+1)."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("n must be >= 2")
        self.n = n
        self.offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
        self.dim = n * n - 1

    def basis_element(self, k: int):
        n = self.n
        X = zeros(n)
        if k < len(self.offdiag):
            i, j = self.offdiag[k]
            X[i][j] = Fraction(1)
        else:
            i = k - len(self.offdiag)
            X[i][i] = Fraction(1)
            X[i + 1][i + 1] = Fraction(-1)
        return X

    @cached_property
    def basis(self) -> list:
        return [self.basis_element(k) for k in range(self.dim)]

    def coords(self, X) -> list:
        """Coordinates of a traceless matrix; H-coefficients are partial sums of the diagonal."""
        if trace(X) != 0:
            raise ValueError("matrix is not traceless")
        out = [X[i][j] for i, j in self.offdiag]
        acc = Fraction(0)
        for i in range(self.n - 1):
            acc = acc + X[i][i]
            out.append(acc)
        return out

    def from_coords(self, c):
        n = self.n
        X = zeros(n)
        for v, (i, j) in zip(c, self.offdiag):
            X[i][j] = v
        h = c[len(self.offdiag):]
        for i, v in enumerate(h):
            X[i][i] = X[i][i] + v
            X[i + 1][i + 1] = X[i + 1][i + 1] - v
        return X

    def ad(self, X):
        """Matrix of ad X in the basis (columns are images of basis vectors)."""
        cols = [self.coords(bracket(X, b)) for b in self.basis]
        return transpose(cols)

    @cached_property
    def structure_constants(self):
        """c[i][j] = coordinates of [b_i, b_j]."""
        return [[self.coords(bracket(a, b)) for b in self.basis] for a in self.basis]

    def jacobi_holds(self) -> bool:
        B = self.basis
        for x in range(self.dim):
            for y in range(x + 1, self.dim):
                for z in range(y + 1, self.dim):
                    X, Y, Z = B[x], B[y], B[z]
                    s = [bracket(X, bracket(Y, Z)), bracket(Y, bracket(Z, X)),
                         bracket(Z, bracket(X, Y))]
                    tot = [[a + b + c for a, b, c in zip(*rows)] for rows in zip(*s)]
                    if not is_zero_matrix(tot):
                        return False
        return True


def killing_form(alg: LieAlgebraSLn, X, Y):
    """trace(ad X o ad Y), from the definition."""
    return _trace_product(alg.ad(X), alg.ad(Y))


def _trace_product(P, Q):
    d = len(P)
    tot = 0
    for i in range(d):
        Pi = P[i]
        for j in range(d):
            if Pi[j] != 0 and Q[j][i] != 0:
                tot = tot + Pi[j] * Q[j][i]
    return tot


def killing_gram(alg: LieAlgebraSLn, xs, ys):
    """Matrix of B(x, y), each ad computed once."""
    ax = [alg.ad(X) for X in xs]
    ay = ax if ys is xs else [alg.ad(Y) for Y in ys]
    return [[_trace_product(P, Q) for Q in ay] for P in ax]


def killing_closed_form(alg: LieAlgebraSLn, X, Y):
    return 2 * alg.n * trace(matmul(X, Y))


# symmetric pairs ----------------------------------------------------------------------

@dataclass
class SymmetricPair:
    algebra: LieAlgebraSLn
    F: QuadraticForm
    sigma_matrix: list  # dsigma in coordinates (columns are images)
    k: Subspace
    p: Subspace
    checks: dict = field(default_factory=dict)

    def sigma(self, X):
        Fm = _form_matrix(self.F)
        return [[-v for v in row] for row in matmul(matmul(mat_inverse(Fm), transpose(X)), Fm)]

    def k_basis(self) -> list:
        return [self.algebra.from_coords(r) for r in self.k.rows]

    def p_basis(self) -> list:
        return [self.algebra.from_coords(r) for r in self.p.rows]


def _form_matrix(F: QuadraticForm):
    return [[F[i, j] if isinstance(F[i, j], QuadExt) else Fraction(F[i, j])
             for j in range(F.n)] for i in range(F.n)]


def build_pair(F: QuadraticForm) -> SymmetricPair:
    """k and p for dsigma(X) = -F^-1 X^T F, with every structural check run."""
    if not F.is_exact:
        raise ValueError("symmetric pairs need exact coefficients")
    n = F.n
    alg = LieAlgebraSLn(n)
    Fm = _form_matrix(F)
    Finv = mat_inverse(Fm)

    def sigma(X):
        return [[-v for v in row] for row in matmul(matmul(Finv, transpose(X)), Fm)]

    images = [alg.coords(sigma(b)) for b in alg.basis]
    S = transpose(images)
    d = alg.dim
    eye = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    k_vecs = nullspace([[S[i][j] - eye[i][j] for j in range(d)] for i in range(d)])
    p_vecs = nullspace([[S[i][j] + eye[i][j] for j in range(d)] for i in range(d)])
    k = Subspace.span(k_vecs, d)
    p = Subspace.span(p_vecs, d)
    pair = SymmetricPair(alg, F, S, k, p)

    sig_b = [sigma(b) for b in alg.basis]
    checks = {}
    checks["involutive"] = all(alg.coords(sigma(sb)) == alg.coords(b)
                               for sb, b in zip(sig_b, alg.basis))
    checks["automorphism"] = all(
        alg.coords(sigma(bracket(alg.basis[i], alg.basis[j])))
        == alg.coords(bracket(sig_b[i], sig_b[j]))
        for i in range(d) for j in range(i + 1, d))
    checks["dim_k"] = k.dim == n * (n - 1) // 2
    checks["dim_p"] = p.dim == n * (n + 1) // 2 - 1
    kb, pb = pair.k_basis(), pair.p_basis()

    def in_space(space, X):
        return space.contains(alg.coords(X))

    checks["k_k_in_k"] = all(in_space(k, bracket(a, b)) for a in kb for b in kb)
    checks["k_p_in_p"] = all(in_space(p, bracket(a, b)) for a in kb for b in pb)
    checks["p_p_in_k"] = all(in_space(k, bracket(a, b)) for a in pb for b in pb)
    # k is so(F): k lies in so(F) and so(F) has dimension n(n-1)/2
    so_eqs = []
    for b in alg.basis:
        M = [[x + y for x, y in zip(r1, r2)]
             for r1, r2 in zip(matmul(transpose(b), Fm), matmul(Fm, b))]
        so_eqs.append([v for row in M for v in row])
    so_dim = len(nullspace(transpose(so_eqs)))
    checks["k_is_so_F"] = so_dim == k.dim and all(
        is_zero_matrix([[x + y for x, y in zip(r1, r2)]
                        for r1, r2 in zip(matmul(transpose(X), Fm), matmul(Fm, X))])
        for X in kb)
    pair.checks = checks
    return pair


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    detail: dict


def verify_step_b(pair: SymmetricPair) -> CheckResult:
    """[p, p] = k: the brackets of p span exactly k."""
    alg = pair.algebra
    pb = pair.p_basis()
    span = Subspace.span([alg.coords(bracket(a, b)) for i, a in enumerate(pb)
                          for b in pb[i + 1:]], alg.dim)
    ok = span == pair.k
    defect = None
    if not ok:
        defect = {"span_dim": span.dim, "k_dim": pair.k.dim,
                  "span_in_k": pair.k.contains_space(span)}
    return CheckResult(ok, {"span_dim": span.dim, "k_dim": pair.k.dim, "defect": defect})


def verify_orthogonality(pair: SymmetricPair) -> CheckResult:
    """B(k, p) = 0 and B restricted to k and to p is non-degenerate."""
    alg = pair.algebra
    kb, pb = pair.k_basis(), pair.p_basis()
    cross = all(v == 0 for row in killing_gram(alg, kb, pb) for v in row)
    gk = killing_gram(alg, kb, kb)
    gp = killing_gram(alg, pb, pb)
    dk, dp = _det(gk), _det(gp)
    return CheckResult(cross and dk != 0 and dp != 0,
                       {"cross_zero": cross, "det_gram_k": format_scalar(dk),
                        "det_gram_p": format_scalar(dp)})


def _det(m):
    if not m:
        return Fraction(1)
    a = [list(r) for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            if a[r][c] != 0:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    if isinstance(det, QuadExt) and det.b == 0:
        return det.a
    return det


def _random_element(alg: LieAlgebraSLn, rng: random.Random, space: Subspace | None = None):
    rows = space.rows if space is not None else [
        [Fraction(int(i == j)) for j in range(alg.dim)] for i in range(alg.dim)]
    while True:
        c = [rng.randint(-3, 3) for _ in rows]
        if any(c):
            v = [sum((ci * r[j] for ci, r in zip(c, rows)), Fraction(0)) for j in range(alg.dim)]
            return alg.from_coords(v)


def invariance_check(pair_or_alg, triples: int = 50, seed: int = 0) -> CheckResult:
    """B([a, b], c) = B(a, [b, c]) on random integer-coordinate triples."""
    alg = pair_or_alg.algebra if isinstance(pair_or_alg, SymmetricPair) else pair_or_alg
    rng = random.Random(seed)
    for t in range(triples):
        a, b, c = (_random_element(alg, rng) for _ in range(3))
        if killing_form(alg, bracket(a, b), c) != killing_form(alg, a, bracket(b, c)):
            return CheckResult(False, {"failed_triple": t})
    return CheckResult(True, {"triples": triples})


def invariant_span(pair: SymmetricPair, seeds) -> Subspace:
    """Smallest ad(k)-invariant subspace containing the seed matrices."""
    alg = pair.algebra
    kb = pair.k_basis()
    space = Subspace.span([alg.coords(s) for s in seeds], alg.dim)
    frontier = [alg.from_coords(r) for r in space.rows]
    while frontier:
        new = []
        for X in frontier:
            for K in kb:
                v = alg.coords(bracket(K, X))
                if not space.contains(v):
                    space = space.join([v])
                    new.append(alg.from_coords(v))
        frontier = new
    return space


@dataclass(frozen=True)
class MaximalityReport:
    ok: bool
    trials: int
    full_span_count: int
    irreducible_count: int


def maximality_check(pair: SymmetricPair, trials: int = 20, seed: int = 0) -> MaximalityReport:
    """Random evidence that k is a maximal subalgebra, plus irreducibility of p.

    For random w in p: the ad(k)-closure of k + w is all of sl_n, and the
    ad(k)-closure of w alone is all of p.
    """
    if pair.algebra.n == 2:
        raise HypothesisViolation("k is not semisimple for n = 2")
    rng = random.Random(seed)
    full = irred = 0
    kb = pair.k_basis()
    for _ in range(trials):
        w = _random_element(pair.algebra, rng, pair.p)
        if invariant_span(pair, kb + [w]).dim == pair.algebra.dim:
            full += 1
        if invariant_span(pair, [w]).intersect(pair.p) == pair.p:
            irred += 1
    return MaximalityReport(full == trials and irred == trials, trials, full, irred)


@dataclass
class CounterexampleReport:
    dims: tuple
    chain_proper: bool
    k_n_in_n: bool
    k_m_in_m: bool
    n_abelian: bool
    m_abelian: bool
    killing_n_n_zero: bool
    m_n_spans_k: bool
    n_m_in_p: bool
    invariant: bool

    @property
    def ok(self) -> bool:
        return all(v for k, v in self.__dict__.items() if isinstance(v, bool))


def counterexample_sl2() -> CounterexampleReport:
    """sl_2 with the involution fixing the diagonal: k + n is a proper invariant subspace."""
    F = QuadraticForm(((0, 1), (1, 0)))
    pair = build_pair(F)
    alg = pair.algebra
    E12 = alg.basis_element(alg.offdiag.index((0, 1)))
    E21 = alg.basis_element(alg.offdiag.index((1, 0)))
    n_sp = Subspace.span([alg.coords(E12)], alg.dim)
    m_sp = Subspace.span([alg.coords(E21)], alg.dim)
    kb = pair.k_basis()
    kn = pair.k.join(n_sp.rows)
    closure = invariant_span(pair, kb + [E12])
    c = lambda X: alg.coords(X)  # noqa: E731
    return CounterexampleReport(
        dims=(pair.k.dim, kn.dim, alg.dim),
        chain_proper=pair.k.dim < kn.dim < alg.dim,
        k_n_in_n=all(n_sp.contains(c(bracket(K, E12))) for K in kb),
        k_m_in_m=all(m_sp.contains(c(bracket(K, E21))) for K in kb),
        n_abelian=is_zero_matrix(bracket(E12, E12)),
        m_abelian=is_zero_matrix(bracket(E21, E21)),
        killing_n_n_zero=killing_form(alg, E12, E12) == 0,
        m_n_spans_k=Subspace.span([c(bracket(E21, E12))], alg.dim) == pair.k,
        n_m_in_p=pair.p.contains(c(E12)) and pair.p.contains(c(E21)),
        invariant=closure == kn,
    )


def full_report(F: QuadraticForm, trials: int = 20, seed: int = 0) -> dict:
    """Every check for one form, as a JSON-ready dict."""
    pair = build_pair(F)
    n = F.n
    steps = {}
    steps["involution"] = {"status": pair.checks["involutive"] and pair.checks["automorphism"],
                           "dimensions": {"k": pair.k.dim, "p": pair.p.dim},
                           "witness": {"k_is_so_F": pair.checks["k_is_so_F"]}}
    rel = all(pair.checks[key] for key in ("k_k_in_k", "k_p_in_p", "p_p_in_k"))
    steps["bracket_relations"] = {"status": rel, "dimensions": {"g": pair.algebra.dim},
                                  "witness": {k: pair.checks[k] for k in
                                              ("k_k_in_k", "k_p_in_p", "p_p_in_k")}}
    orth = verify_orthogonality(pair)
    steps["killing_orthogonality"] = {"status": orth.ok, "dimensions": {}, "witness": orth.detail}
    sb = verify_step_b(pair)
    steps["p_brackets_span_k"] = {"status": sb.ok, "dimensions": {"span": sb.detail["span_dim"]},
                                  "witness": sb.detail}
    inv = invariance_check(pair, 50, seed)
    steps["killing_invariance"] = {"status": inv.ok, "dimensions": {}, "witness": inv.detail}
    if n >= 3:
        mx = maximality_check(pair, trials, seed)
        steps["maximality"] = {"status": mx.ok, "dimensions": {"g": pair.algebra.dim},
                               "witness": {"trials": mx.trials, "full_span": mx.full_span_count,
                                           "irreducible": mx.irreducible_count}}
    else:
        steps["maximality"] = {"status": None, "dimensions": {},
                               "witness": {"skipped": "k is not semisimple for n = 2"}}
    return {"n": n, "form": F.to_text(), "steps": steps,
            "all_passed": all(s["status"] is not False for s in steps.values())}
