import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oppenheim.errors import IsotropyViolation, PrimitivityViolation
from oppenheim.forms import PadicForm, QuadraticForm
from oppenheim.scalars import QuadExt
from oppenheim.search import (BandQuery, SearchBudget, SIntegerContext, approx_value,
                              complete_to_unimodular, enumerate_band, find_small_value,
                              is_primitive_tuple, pair_difference_search, primitive_tuple_approx,
                              s_integer_small_value, shell_key, sign_profile, small_value_sweep)

from oracles import naive_band_count, snf_primitive

S2 = QuadExt.sqrt(2)
IRR = QuadraticForm.diag(1, 1, -S2)


def _random_form(rng: random.Random, n: int) -> QuadraticForm:
    while True:
        M = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                v = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
                if rng.random() < 0.4:
                    v = v + Fraction(rng.randint(-3, 3), 2) * S2
                M[i][j] = M[j][i] = v
        try:
            return QuadraticForm(tuple(map(tuple, M)))
        except Exception:
            continue


# band counting ---------------------------------------------------------------------------

def test_band_examples():
    F = QuadraticForm.diag(1, -1)
    assert enumerate_band(F, BandQuery(1, 1, 3)).count == 4
    assert enumerate_band(IRR, BandQuery(1, 2, 0)).count == 0


def test_band_matches_naive_loop_on_20_forms():
    rng = random.Random(11)
    for k in range(20):
        n = 2 + k % 2
        F = _random_form(rng, n)
        r = rng.randint(1, 8 if n == 2 else 5)
        a = Fraction(rng.randint(0, 4), 2)
        b = a + Fraction(rng.randint(0, 12), 2)
        got = enumerate_band(F, BandQuery(a, b, r)).count
        assert got == naive_band_count(F.coeffs, a, b, r), (F.to_text(), a, b, r)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.fractions(0, 3, max_denominator=4), st.fractions(0, 3, max_denominator=4))
def test_band_monotone_and_symmetric(r, a, w):
    b = a + w
    c = enumerate_band(IRR, BandQuery(a, b, r)).count
    assert c <= enumerate_band(IRR, BandQuery(a, b, r + 1)).count
    assert c <= enumerate_band(IRR, BandQuery(a, b + 1, r)).count
    a2 = a + Fraction(1, 4)
    if a2 <= b:
        assert c >= enumerate_band(IRR, BandQuery(a2, b, r)).count
    assert c % 2 == 0 or a == 0  # x and -x pair up; only x = 0 is unpaired


def test_band_primitive_and_euclidean_filters():
    q = BandQuery(1, 2, 6, primitive_only=True)
    res = enumerate_band(IRR, q, sample_size=1000)
    assert all(math.gcd(*x) == 1 for x in res.samples)
    naive = sum(1 for x in itertools.product(range(-6, 7), repeat=3)
                if math.gcd(*x) == 1 and 1 <= abs(IRR.evaluate(x)) <= 2)
    assert res.count == naive
    e = enumerate_band(IRR, BandQuery(1, 2, 6, euclidean=True)).count
    naive_e = sum(1 for x in itertools.product(range(-6, 7), repeat=3)
                  if sum(v * v for v in x) <= 36 and 1 <= abs(IRR.evaluate(x)) <= 2)
    assert e == naive_e


def test_band_budget_partial():
    res = enumerate_band(IRR, BandQuery(1, 2, 30), budget=SearchBudget(max_radius=30, max_evals=1000))
    assert res.partial


def test_band_query_validation():
    with pytest.raises(ValueError):
        BandQuery(2, 1, 3)
    with pytest.raises(ValueError):
        BandQuery(0, 1, -1)


# small values --------------------------------------------------------------------------

def test_small_value_examples():
    assert find_small_value(QuadraticForm.diag(1, -1), Fraction(1, 2),
                            SearchBudget(max_radius=40)) is None
    hit = find_small_value(QuadraticForm.diag(1, 1, -1), Fraction(1, 10), SearchBudget(max_radius=4),
                           strict_nonzero=False)
    assert hit.x == (1, 0, 1) and hit.value == 0
    hit = find_small_value(IRR, Fraction(1, 100), SearchBudget(max_radius=1000))
    assert hit is not None and 0 < abs(IRR.evaluate(hit.x)) < Fraction(1, 100)
    assert math.gcd(*hit.x) == 1


def test_small_value_is_first_in_shell_order():
    eps = Fraction(1, 20)
    hit = find_small_value(IRR, eps, SearchBudget(max_radius=200))
    R = hit.radius
    better = [x for x in itertools.product(range(-R, R + 1), repeat=3)
              if math.gcd(*x) == 1 and x[next(i for i, v in enumerate(x) if v)] > 0
              and 0 < abs(IRR.evaluate(x)) < eps and shell_key(x) < shell_key(hit.x)]
    assert better == []


def test_sign_profile_examples():
    assert sign_profile([0.3, -0.2, 0.1], 0.5) == (2, 1)
    assert sign_profile([], 0.5) == (0, 0)
    hits = small_value_sweep(IRR, Fraction(1, 10), SearchBudget(max_radius=100, max_evals=10**6))
    pos, neg = sign_profile(hits, Fraction(1, 10))
    assert pos >= 1 and neg >= 1


def test_approx_value_examples():
    hit = approx_value(IRR, Fraction(21, 4), Fraction(1, 100), SearchBudget(max_radius=200))
    assert hit is not None and abs(IRR.evaluate(hit.x) - Fraction(21, 4)) < Fraction(1, 100)
    assert approx_value(QuadraticForm.diag(1, -1), Fraction(1, 2), Fraction(1, 4),
                        SearchBudget(max_radius=30)) is None


def test_pair_difference_examples():
    assert pair_difference_search(QuadraticForm.diag(1, 1), Fraction(1, 2),
                                  SearchBudget(max_radius=6)) is None
    x, y, d = pair_difference_search(IRR, Fraction(1, 100), SearchBudget(max_radius=1000))
    assert 0 < abs(d) < Fraction(1, 100) and d == IRR.evaluate(x) - IRR.evaluate(y)


def test_pair_difference_rational_respects_discreteness():
    E = QuadraticForm.diag(2, 4)
    assert pair_difference_search(E, Fraction(19, 10), SearchBudget(max_radius=4)) is None
    x, y, d = pair_difference_search(E, Fraction(21, 10), SearchBudget(max_radius=4))
    assert abs(d) >= 2


# primitive tuples ------------------------------------------------------------------------

def test_primitive_examples():
    assert is_primitive_tuple([(1, 0, 0)])
    assert not is_primitive_tuple([(2, 0, 0)])
    assert is_primitive_tuple([(1, 2, 3), (0, 1, 4)])
    assert not is_primitive_tuple([(1, 2, 3), (2, 4, 6)])
    assert not is_primitive_tuple([(0, 0, 0)])


def _check_completion(t):
    U = complete_to_unimodular(t)
    n = len(U)
    assert round(np.linalg.det(np.array(U, dtype=float))) == 1
    for k, x in enumerate(t):
        assert tuple(U[i][k] for i in range(n)) == tuple(x)


def test_completion_examples():
    assert complete_to_unimodular([(1, 0, 0)]) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    _check_completion([(0, 1, 0), (0, 0, 1)])
    _check_completion([(1, 2, 3), (0, 1, 4)])
    with pytest.raises(PrimitivityViolation):
        complete_to_unimodular([(2, 0, 0)])


def test_primitive_equivalences_exhaustive_small():
    """Minor-gcd criterion, Smith normal form and completion agree.

    Exhaustive for single vectors in [-2, 2]^3 and pairs in [-1, 1]^3, plus
    a seeded sample of pairs in [-2, 2]^3.
    """
    vecs = list(itertools.product(range(-2, 3), repeat=3))
    for v in vecs:
        assert is_primitive_tuple([v]) == snf_primitive([v])
    small = list(itertools.product(range(-1, 2), repeat=3))
    rng = random.Random(5)
    pairs = [(u, v) for u in small for v in small]
    pairs += rng.sample([(u, v) for u in vecs for v in vecs], 800)
    for u, v in pairs:
        t = [u, v]
        p = is_primitive_tuple(t)
        assert p == snf_primitive(t), t
        if p:
            _check_completion(t)
        else:
            with pytest.raises(PrimitivityViolation):
                complete_to_unimodular(t)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=1, max_size=2))
def test_primitive_iff_completion(t):
    t = [tuple(x) for x in t]
    if is_primitive_tuple(t):
        _check_completion(t)
    else:
        with pytest.raises(PrimitivityViolation):
            complete_to_unimodular(t)


def test_tuple_examples():
    assert primitive_tuple_approx(IRR, [1, 1], Fraction(1, 10)) == ((1, 0, 0), (0, 1, 0))
    t = primitive_tuple_approx(IRR, [Fraction(1, 2), Fraction(-1, 3)], Fraction(1, 10),
                               SearchBudget(max_radius=200))
    assert t is not None and is_primitive_tuple(t)
    for x, c in zip(t, (Fraction(1, 2), Fraction(-1, 3))):
        assert abs(IRR.evaluate(x) - c) < Fraction(1, 10)
    assert primitive_tuple_approx(QuadraticForm.diag(1, 1, -2), [Fraction(1, 2)], Fraction(1, 4),
                                  SearchBudget(max_radius=20), strategy="band") is None


def test_tuple_walk_strategy_is_seeded():
    targets = [Fraction(1, 2), Fraction(-1, 3)]
    a = primitive_tuple_approx(IRR, targets, Fraction(1, 10), SearchBudget(max_radius=200, seed=3),
                               strategy="walk")
    b = primitive_tuple_approx(IRR, targets, Fraction(1, 10), SearchBudget(max_radius=200, seed=3),
                               strategy="walk")
    assert a == b
    if a is not None:
        assert is_primitive_tuple(a)


# S-integers ------------------------------------------------------------------------------

def test_s_integer_rational_pair_none_found():
    F = QuadraticForm.diag(1, 1, -1)
    ctx = SIntegerContext(3, 1, 0.1, 0.5)  # real values are multiples of 1/9 > 0.1
    assert s_integer_small_value(F, PadicForm.from_form(F, 3), ctx, SearchBudget(max_radius=40)) is None


def test_s_integer_found_and_verified():
    Fp = PadicForm.from_form(QuadraticForm.diag(1, 1, -1), 7)
    ctx = SIntegerContext(7, 1, 0.3, 0.5)
    hit = s_integer_small_value(IRR, Fp, ctx, SearchBudget(max_radius=60))
    assert hit is not None
    real = IRR.evaluate(hit.x)
    assert 0 < abs(real) < Fraction(3, 10) and abs(real) == hit.real_abs
    m = Fp.evaluate(hit.v)
    v = 0
    while m % 7 == 0:
        m //= 7
        v += 1
    assert hit.padic_abs == Fraction(7) ** (2 - v) < Fraction(1, 2)


def test_s_integer_isotropy_gate():
    with pytest.raises(IsotropyViolation):
        s_integer_small_value(IRR, PadicForm.from_form(QuadraticForm.diag(1, 1, -7), 7),
                              SIntegerContext(7, 0, 0.1, 0.5))
    with pytest.raises(IsotropyViolation):
        s_integer_small_value(QuadraticForm.diag(1, 1, 1),
                              PadicForm.from_form(QuadraticForm.diag(1, 1, -1), 7),
                              SIntegerContext(7, 0, 0.1, 0.5))


def _e0_configs(count=10):
    rng = random.Random(2024)
    out = []
    for _ in range(count):
        a, b = rng.randint(1, 3), rng.randint(1, 3)
        c = QuadExt(0, Fraction(rng.randint(1, 5), rng.randint(1, 3)), rng.choice((2, 3, 5)))
        p = rng.choice((3, 5, 7))
        Fp = QuadraticForm.diag(1, 1, -1) if p != 3 else QuadraticForm.diag(1, 2, -3)
        out.append((QuadraticForm.diag(a, b, -c), PadicForm.from_form(Fp, p),
                    SIntegerContext(p, 0, rng.choice((0.05, 0.1, 0.2)), 0.5)))
    return out


@pytest.mark.parametrize("k", range(10))
def test_s_integer_e0_reduces_to_small_value_search(k):
    F, Fp, ctx = _e0_configs()[k]
    budget = SearchBudget(max_radius=64)
    hit = s_integer_small_value(F, Fp, ctx, budget)
    ref = find_small_value(F, ctx.eps_inf, budget, primitive=False,
                           accept=lambda x: Fp.evaluate(x) != 0 and Fp.evaluate(x) % ctx.p == 0)
    assert (hit is None) == (ref is None)
    if hit is not None:
        assert hit.v == ref.x
