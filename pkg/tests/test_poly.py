import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unionroa.poly import (
    DimensionError,
    DynamicalSystem,
    Polynomial,
    PolynomialSyntaxError,
    format_polynomial,
    grlex_key,
    lie_derivative,
    parse_polynomial,
    polynomial_from_gram,
)

x1, x2 = Polynomial.variables(2)


def poly_strategy(nvars=2, max_deg=4, max_terms=6):
    mono = st.tuples(*[st.integers(0, max_deg)] * nvars).filter(lambda m: sum(m) <= max_deg)
    coef = st.floats(-10, 10, allow_nan=False).filter(lambda c: abs(c) > 1e-6)
    return st.dictionaries(mono, coef, max_size=max_terms).map(lambda d: Polynomial(nvars, d))


def dense_eval(p, X):
    # independent evaluator: explicit loops over terms
    X = np.atleast_2d(X)
    out = np.zeros(len(X))
    for m, c in p.items():
        term = np.full(len(X), c)
        for k, e in enumerate(m):
            term = term * X[:, k] ** e
        out += term
    return out


def test_arithmetic_basics():
    p = (x1 + x2) ** 2
    assert p == x1 * x1 + 2 * x1 * x2 + x2 * x2
    assert (p - p).is_zero()
    assert p.degree == 2 and p.min_degree == 2
    assert (3 - x1).coeff((0, 0)) == 3.0
    assert (p / 2).coeff((1, 1)) == 1.0


def test_zero_terms_are_pruned():
    p = Polynomial(2, {(1, 0): 1.0, (0, 1): 1e-20})
    assert p.monomials() == [(1, 0)]


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        x1 + Polynomial.variable(3, 0)


def test_grlex_order():
    mons = sorted([(0, 2), (1, 0), (2, 0), (0, 1), (1, 1), (0, 0)], key=grlex_key)
    assert mons == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_quadratic_form_with_center():
    N = np.array([[2.0, 0.5], [0.5, 1.0]])
    c = np.array([0.3, -1.0])
    p = Polynomial.quadratic_form(N, c)
    X = np.random.default_rng(0).normal(size=(50, 2))
    d = X - c
    assert np.allclose(p(X), np.einsum("ij,jk,ik->i", d, N, d))


@settings(max_examples=60, deadline=None)
@given(poly_strategy(), poly_strategy())
def test_evaluation_matches_loop_oracle(p, q):
    X = np.random.default_rng(1).uniform(-2, 2, size=(20, 2))
    assert np.allclose(p(X), dense_eval(p, X))
    assert np.allclose((p * q)(X), dense_eval(p, X) * dense_eval(q, X), rtol=1e-10, atol=1e-8)
    assert np.allclose((p - q)(X), dense_eval(p, X) - dense_eval(q, X))


@settings(max_examples=60, deadline=None)
@given(poly_strategy(max_deg=6))
def test_gradient_matches_finite_differences(p):
    X = np.random.default_rng(2).uniform(-1, 1, size=(10, 2))
    h = 1e-6
    for k, g in enumerate(p.grad()):
        e = np.zeros(2)
        e[k] = h
        fd = (p(X + e) - p(X - e)) / (2 * h)
        scale = max(1.0, np.max(np.abs(fd)))
        assert np.max(np.abs(g(X) - fd)) <= 1e-6 * scale * 10


@settings(max_examples=80, deadline=None)
@given(poly_strategy(nvars=3, max_deg=5))
def test_format_parse_roundtrip(p):
    q = parse_polynomial(format_polynomial(p), 3)
    assert q == p


def test_format_is_canonical():
    p = Polynomial(2, {(0, 1): -0.5, (2, 1): 3.0})
    assert format_polynomial(p) == "3*x1^2*x2 - 0.5*x2"
    assert format_polynomial(x1) == "x1"
    assert format_polynomial(Polynomial.zero(2)) == "0"


def test_parser_features():
    p = parse_polynomial("2(x1 + x2)^2 - 1.5e-1*x1 x2", 2)
    assert p.allclose(2 * (x1 + x2) ** 2 - 0.15 * x1 * x2)
    assert parse_polynomial("-(x1)", 2) == -x1


@pytest.mark.parametrize("bad", ["x3", "x1 +", "(x1", "x1^-1", "2**", "y"])
def test_parser_rejects(bad):
    with pytest.raises(PolynomialSyntaxError):
        parse_polynomial(bad, 2)


def test_lie_derivative_by_hand():
    sys = DynamicalSystem((-x2, x1 - x2))
    V = x1**2 + x1 * x2
    # dV/dx = (2x1 + x2, x1)
    expected = (2 * x1 + x2) * (-x2) + x1 * (x1 - x2)
    assert lie_derivative(V, sys) == expected


def test_system_validation():
    with pytest.raises(ValueError):
        DynamicalSystem((x1 + 1, x2))
    with pytest.raises(DimensionError):
        DynamicalSystem((x1,))
    sys = DynamicalSystem.from_strings(["-x1 + x2^2", "-x2"])
    assert sys.degree == 2
    assert np.allclose(sys([1.0, 2.0]), [3.0, -2.0])
    assert DynamicalSystem.from_strings(sys.to_strings()).f == sys.f


def test_rescaled_system_is_conjugate():
    sys = DynamicalSystem.from_strings(["-x1 + x1*x2^2", "x1 - 3*x2"])
    d = np.array([2.0, 0.5])
    sz = sys.rescaled(d)
    Z = np.random.default_rng(3).normal(size=(10, 2))
    assert np.allclose(sz(Z), sys(Z * d) / d)


def test_polynomial_from_gram():
    basis = [(1, 0), (0, 1)]
    Q = np.array([[1.0, 1.0], [1.0, 1.0]])
    assert polynomial_from_gram(Q, basis, 2) == (x1 + x2) ** 2


def test_substitute_scale_per_variable():
    p = x1**2 * x2 + 3 * x2
    q = p.substitute_scale([2.0, 3.0])
    for x in itertools.product([-1.0, 0.5], repeat=2):
        assert np.isclose(q(np.array(x)), p(np.array(x) * [2.0, 3.0]))
