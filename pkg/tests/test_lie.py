import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oppenheim.errors import HypothesisViolation, NonDegenerateViolation
from oppenheim.forms import QuadraticForm
from oppenheim.lie import (LieAlgebraSLn, Subspace, bracket, build_pair, counterexample_sl2,
                           full_report, invariance_check, invariant_span, killing_closed_form,
                           killing_form, killing_gram, matmul, maximality_check, transpose,
                           verify_orthogonality, verify_step_b)
from oppenheim.scalars import QuadExt

from oracles import gl_killing

S2 = QuadExt.sqrt(2)


def lorentz(n):
    return QuadraticForm.diag(*([1] * (n - 1) + [-1]))


FORMS = [lorentz(2), lorentz(3), lorentz(4), QuadraticForm.diag(1, 1, -S2)]


def E(n, i, j):
    return [[Fraction(int(a == i and b == j)) for b in range(n)] for a in range(n)]


def test_killing_examples():
    alg = LieAlgebraSLn(2)
    assert killing_form(alg, E(2, 0, 1), E(2, 1, 0)) == 4
    h = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(-1)]]
    assert killing_form(alg, h, h) == 8
    assert killing_form(alg, E(2, 0, 1), E(2, 0, 1)) == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_killing_three_routes_agree_on_basis_pairs(n):
    alg = LieAlgebraSLn(n)
    basis = alg.basis
    gram = killing_gram(alg, basis, basis)
    for (a, X), (b, Y) in itertools.product(enumerate(basis), repeat=2):
        closed = killing_closed_form(alg, X, Y)
        assert gram[a][b] == closed == gl_killing(X, Y)
    # the single-pair route too, on a sample
    for a, b in [(0, 1), (1, 0), (len(basis) - 1, len(basis) - 1)]:
        assert killing_form(alg, basis[a], basis[b]) == gram[a][b]


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=8, max_size=8),
       st.lists(st.integers(-4, 4), min_size=8, max_size=8))
def test_killing_is_symmetric_and_matches_trace_formula(cx, cy):
    alg = LieAlgebraSLn(3)
    X, Y = alg.from_coords(cx), alg.from_coords(cy)
    assert killing_form(alg, X, Y) == killing_form(alg, Y, X) == killing_closed_form(alg, X, Y)


@pytest.mark.parametrize("n", [2, 3])
def test_jacobi_and_coordinates(n):
    alg = LieAlgebraSLn(n)
    assert alg.jacobi_holds()
    for X in alg.basis:
        assert alg.from_coords(alg.coords(X)) == X


@pytest.mark.parametrize("F", FORMS, ids=["n2", "n3", "n4", "sqrt2"])
def test_symmetric_pair_structure(F):
    pair = build_pair(F)
    n = F.n
    assert pair.k.dim == n * (n - 1) // 2
    assert pair.p.dim == n * (n + 1) // 2 - 1
    assert all(pair.checks.values())
    # k is so(F): X^T F + F X = 0
    Fm = [[F[i, j] for j in range(n)] for i in range(n)]
    for K in pair.k_basis():
        s = [[a + b for a, b in zip(r1, r2)]
             for r1, r2 in zip(matmul(transpose(K), Fm), matmul(Fm, K))]
        assert all(v == 0 for row in s for v in row)
    for X in pair.k_basis() + pair.p_basis():
        assert pair.sigma(pair.sigma(X)) == X
    assert verify_step_b(pair).ok
    assert verify_orthogonality(pair).ok
    assert invariance_check(pair, triples=10).ok


def test_degenerate_form_rejected():
    with pytest.raises(NonDegenerateViolation):
        build_pair(QuadraticForm.diag(1, 1, 0))


def test_invariant_span_examples():
    pair = build_pair(lorentz(3))
    alg = pair.algebra
    assert invariant_span(pair, pair.k_basis()) == pair.k
    assert invariant_span(pair, []).dim == 0
    w = pair.p_basis()[0]
    assert invariant_span(pair, pair.k_basis() + [w]).dim == alg.dim


def test_closure_of_k_plus_any_p_element_is_everything():
    """For 100 random nonzero w in p, the ad(k)-closure of k + w is sl_3."""
    pair = build_pair(lorentz(3))
    rep = maximality_check(pair, trials=100, seed=7)
    assert rep.full_span_count == 100 and rep.irreducible_count == 100


@pytest.mark.parametrize("F", [lorentz(3), lorentz(4), QuadraticForm.diag(1, 1, -S2)],
                         ids=["n3", "n4", "sqrt2"])
def test_maximality(F):
    assert maximality_check(build_pair(F), trials=20).ok


def test_maximality_needs_n_at_least_three():
    with pytest.raises(HypothesisViolation):
        maximality_check(build_pair(lorentz(2)))


def test_sl2_counterexample():
    rep = counterexample_sl2()
    assert rep.ok
    assert rep.dims == (1, 2, 3)


def test_full_report_shape():
    rep = full_report(lorentz(2))
    assert rep["all_passed"]
    assert rep["steps"]["maximality"]["status"] is None
    rep = full_report(lorentz(3), trials=5)
    assert rep["all_passed"] and rep["steps"]["maximality"]["status"] is True


def test_subspace_intersection():
    a = Subspace.span([[1, 0, 0], [0, 1, 0]], 3)
    b = Subspace.span([[0, 1, 0], [0, 0, 1]], 3)
    assert a.intersect(b) == Subspace.span([[0, 1, 0]], 3)
    assert a.join([[0, 0, 1]]).dim == 3


def test_bracket_antisymmetry():
    X, Y = E(3, 0, 1), E(3, 1, 2)
    assert bracket(X, Y) == E(3, 0, 2)
    assert bracket(Y, X) == [[-v for v in r] for r in E(3, 0, 2)]
