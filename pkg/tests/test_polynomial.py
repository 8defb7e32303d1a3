import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from hvtest.polynomial import (
    Monomial,
    MonomialBasis,
    ONE,
    Polynomial,
    basis_size,
    enumerate_monomials,
)


def test_monomial_basic():
    m = Monomial(((0, 2), (3, 1)))
    assert m.degree == 3
    assert m.exponent(0) == 2 and m.exponent(3) == 1 and m.exponent(1) == 0
    assert m.dense(4) == (2, 0, 0, 1)
    assert Monomial.from_dense((2, 0, 0, 1)) == m
    assert m.eval([2.0, 5.0, 7.0, 3.0]) == 12.0


def test_monomial_zero_exponents_dropped():
    assert Monomial(((0, 0), (1, 2))) == Monomial(((1, 2),))
    assert Monomial(()) == ONE
    assert ONE.degree == 0


def test_monomial_validation():
    with pytest.raises(ValueError):
        Monomial(((0, -1),))
    with pytest.raises(ValueError):
        Monomial(((0, 1), (0, 2)))


def test_monomial_mul():
    a = Monomial(((0, 1),))
    b = Monomial(((0, 2), (1, 1)))
    assert a * b == Monomial(((0, 3), (1, 1)))


def test_grevlex_degree_one_slice_order():
    # ascending grevlex in two variables: constant, then [x2, x1]
    monos = enumerate_monomials(2, 1)
    assert monos[0] == ONE
    assert monos[1] == Monomial(((1, 1),))
    assert monos[2] == Monomial(((0, 1),))


def test_enumerate_monomials_counts():
    for nvars, deg in ((1, 3), (2, 4), (3, 2), (4, 3)):
        monos = enumerate_monomials(nvars, deg)
        assert len(monos) == basis_size(nvars, deg)
        assert len(set(monos)) == len(monos)
        degs = [m.degree for m in monos]
        assert degs == sorted(degs)


def test_polynomial_constructors():
    x = Polynomial.variable(3, 1)
    assert x.degree == 1 and x.eval([5.0, 7.0, 1.0]) == 7.0
    c = Polynomial.constant(2, 4.5)
    assert c.degree == 0 and c.eval([0.0, 0.0]) == 4.5
    z = Polynomial.zero(2)
    assert z.is_zero() and z.degree == 0


def test_polynomial_arithmetic_matches_numeric():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    one = Polynomial.constant(2, 1.0)
    p = (x + y) * (one - x) - y.scale(0.5)
    pts = np.array([[0.3, 0.7], [1.0, -2.0], [0.0, 0.0]])
    want = [(a + b) * (1 - a) - 0.5 * b for a, b in pts]
    assert_allclose(p.eval_many(pts), want, atol=1e-14)


def test_polynomial_zero_coefficients_cleaned():
    x = Polynomial.variable(1, 0)
    assert (x - x).is_zero()
    assert (x - x) == Polynomial.zero(1)


def test_shift_and_scale():
    x = Polynomial.variable(1, 0)
    p = x.scale(3.0).shift_constant(-1.0)
    assert p.eval([2.0]) == 5.0
    assert p.coeff(ONE) == -1.0


def test_var_degree():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = x * x * y + y
    assert p.var_degree(0) == 2 and p.var_degree(1) == 1
    assert p.degree == 3


def test_ring_mismatch_rejected():
    with pytest.raises(ValueError):
        Polynomial.variable(2, 0) + Polynomial.variable(3, 0)


@st.composite
def polys(draw, nvars=2, max_deg=3):
    n_terms = draw(st.integers(0, 5))
    terms = {}
    for _ in range(n_terms):
        exps = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        coeff = draw(st.floats(-4, 4, allow_nan=False))
        terms[Monomial.from_dense(exps)] = coeff
    return Polynomial(nvars, terms)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2))
def test_product_evaluates_pointwise(p, q, pt):
    pv, qv = p.eval(pt), q.eval(pt)
    assert (p * q).eval(pt) == pytest.approx(pv * qv, abs=1e-9 + 1e-7 * abs(pv * qv))


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2))
def test_sum_evaluates_pointwise(p, q, pt):
    assert (p + q).eval(pt) == pytest.approx(p.eval(pt) + q.eval(pt), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(polys())
def test_eval_many_matches_eval(p):
    pts = np.array([[0.2, 0.4], [1.0, 1.0], [-0.5, 0.3]])
    many = p.eval_many(pts)
    assert_allclose(many, [p.eval(x) for x in pts], atol=1e-12)


def test_basis_eval_shape_and_completeness():
    basis = MonomialBasis(2, 2)
    assert len(basis) == 6
    pts = np.array([[0.5, 2.0]])
    vals = basis.eval_many(pts)
    assert vals.shape == (1, 6)
    # every monomial of degree <= 2 appears exactly once
    assert sorted(m.dense(2) for m in basis) == sorted(
        [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])


def test_basis_restrict():
    basis = MonomialBasis(2, 2)
    even = basis.restrict(lambda m: m.degree % 2 == 0)
    assert all(m.degree % 2 == 0 for m in even)
    assert len(even) == 4
