import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unionroa import bench
from unionroa.lyap import initial_candidate
from unionroa.poly import Polynomial, lie_derivative
from unionroa.sdp import SdpSolution, Status, solve
from unionroa.sos import (
    GramVariable,
    LieDerivative,
    MonomialBasis,
    SosExpression,
    StructuralInfeasibility,
    assemble,
    coefficient_match,
    extract,
    gram_for,
    is_sos,
    match_residual,
    monomial_basis,
    sos_constraint,
)

x1, x2 = Polynomial.variables(2)
MOTZKIN = x1**4 * x2**2 + x1**2 * x2**4 - 3 * x1**2 * x2**2 + 1


def enumerate_monomials(n, lo, hi):
    # brute force over the exponent box
    return {m for m in itertools.product(range(hi + 1), repeat=n) if lo <= sum(m) <= hi}


def test_basis_examples():
    assert monomial_basis(2, 2, 2).entries == ((1, 0), (0, 1))
    b = monomial_basis(2, 2, 6)
    assert len(b) == 9 and set(b) == enumerate_monomials(2, 1, 3)
    b3 = monomial_basis(3, 2, 4)
    assert len(b3) == 9 and set(b3) == enumerate_monomials(3, 1, 2)


@pytest.mark.parametrize("n,lo,hi", [(1, 0, 4), (2, 0, 4), (3, 2, 6), (3, 0, 8), (2, 3, 7)])
def test_basis_matches_enumeration(n, lo, hi):
    b = monomial_basis(n, lo, hi)
    want = enumerate_monomials(n, (lo + 1) // 2, hi // 2)
    assert set(b) == want
    assert len(b) == comb(n + hi // 2, n) - comb(n + (lo + 1) // 2 - 1, n)
    assert list(b.degrees) == sorted(b.degrees)


def test_basis_errors():
    with pytest.raises(ValueError):
        monomial_basis(2, 3, 2)
    with pytest.raises(ValueError):
        monomial_basis(2, 3, 3)
    with pytest.raises(ValueError):
        MonomialBasis(2, ((1, 0), (1, 0)))


def test_match_unique_quadratic():
    G = GramVariable(monomial_basis(2, 2, 2), "Q")
    eqs = coefficient_match(SosExpression(2).add(G), (x1 + x2) ** 2)
    got = {m: (row, b) for m, row, b in zip(eqs.monomials, eqs.rows, eqs.rhs)}
    assert got[(2, 0)] == ({("Q", 0, 0): 1.0}, 1.0)
    assert got[(1, 1)] == ({("Q", 0, 1): 2.0}, 2.0)
    assert got[(0, 2)] == ({("Q", 1, 1): 1.0}, 1.0)


def test_match_gram_family_underdetermined():
    G = GramVariable(monomial_basis(2, 2, 4), "Q")
    eqs = coefficient_match(SosExpression(2).add(G), x1**4)
    # x1^2 * x1^2 and (x1)(x1^3)-style products share monomials
    assert len(eqs.rows) < G.side * (G.side + 1) // 2


def test_structural_infeasibility_names_monomial():
    G = GramVariable(monomial_basis(2, 2, 2), "Q")
    with pytest.raises(StructuralInfeasibility) as e:
        coefficient_match(SosExpression(2).add(G), x1**3)
    assert e.value.monomial == (3, 0)
    assert "x1^3" in str(e.value)


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda m: sum(m) <= 4),
    st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3), min_size=1, max_size=6))
def test_structural_detection_matches_support_analysis(terms):
    target = Polynomial(2, terms)
    G = GramVariable(monomial_basis(2, 2, 2), "Q")
    producible = {tuple(a + b for a, b in zip(u, v)) for u in G.basis for v in G.basis}
    expect_ok = all(m in producible for m, _ in target.items())
    try:
        coefficient_match(SosExpression(2).add(G), target)
        ok = True
    except StructuralInfeasibility:
        ok = False
    assert ok == expect_ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_gram_roundtrip(seed):
    rng = np.random.default_rng(seed)
    G = GramVariable(monomial_basis(2, 2, 4), "Q")
    B = rng.normal(size=(G.side, G.side))
    Q = B @ B.T
    p = extract(SdpSolution(Status.FEASIBLE, {"Q": Q}), G)
    expr = SosExpression(2).add(G)
    eqs = coefficient_match(expr, p)
    for row, b in zip(eqs.rows, eqs.rhs):
        lhs = sum(c * Q[i, j] for (_, i, j), c in row.items())
        assert abs(lhs - b) <= 1e-10 * max(1.0, abs(b))
    assert match_residual(expr, p, {"Q": Q}) <= 1e-10 * np.abs(Q).max()
    X = rng.uniform(-10, 10, size=(1000, 2))
    vals = p(X)
    assert np.all(vals >= -1e-8 * np.maximum(1.0, np.abs(vals)))


def test_extract_examples():
    G = GramVariable(monomial_basis(2, 2, 2), "Q")
    assert extract(SdpSolution(Status.FEASIBLE, {"Q": np.eye(2)}), G) == x1**2 + x2**2
    assert extract(SdpSolution(Status.FEASIBLE, {"Q": np.ones((2, 2))}), G) == (x1 + x2) ** 2
    with pytest.raises(KeyError):
        extract(SdpSolution(Status.FEASIBLE, {}), G)


def test_assemble_single_constraint():
    expr, target, C = sos_constraint(x1**2 + x2**2, name="C")
    asm = assemble([(expr, target)])
    assert asm.problem.blocks == (("C", 2),)
    assert asm.problem.A.shape[0] == 3
    assert solve(asm.problem).feasible


def test_assemble_rejects_empty_and_clashing_names():
    with pytest.raises(ValueError):
        assemble([])
    a = GramVariable(monomial_basis(2, 2, 2), "Q")
    b = GramVariable(monomial_basis(2, 2, 2), "Q")
    e1 = SosExpression(2).add(a)
    e2 = SosExpression(2).add(b)
    with pytest.raises(ValueError):
        assemble([(e1, x1**2), (e2, x2**2)])


def test_is_sos_examples():
    ok, Q, C = is_sos((x1 - 2 * x2) ** 2 + (x1 * x2 - 1) ** 2)
    assert ok and np.linalg.eigvalsh(Q)[0] >= -1e-8
    # Motzkin: nonnegative yet not SOS
    X = np.random.default_rng(0).uniform(-2, 2, size=(10_000, 2))
    assert MOTZKIN(X).min() >= 0
    ok, _, _ = is_sos(MOTZKIN)
    assert not ok
    assert not is_sos(x1**3)[0]
    assert not is_sos(-x1**2)[0]


def test_extracted_sos_nonnegative_on_samples():
    p = (x1**2 - x2) ** 2 + 0.5 * (x1 * x2 + x2 - 1) ** 2 + x2**4
    ok, Q, C = is_sos(p)
    assert ok
    s = extract(SdpSolution(Status.FEASIBLE, {C.name: Q}), C)
    X = np.random.default_rng(1).uniform(-10, 10, size=(1000, 2))
    vals = s(X)
    assert np.all(vals >= -1e-7 * np.maximum(1.0, np.abs(p(X))))


def test_gram_for_sizes():
    assert gram_for(2, {(2, 0), (0, 2)}).side == 2
    assert gram_for(2, {(0, 0), (4, 0)}).side == 6
    assert gram_for(2, set()).side == 1


def test_lie_derivative_operator_agrees():
    sys = bench.get("vdp").system
    G = GramVariable(monomial_basis(2, 2, 4), "V")
    rng = np.random.default_rng(2)
    B = rng.normal(size=(G.side, G.side))
    Q = B @ B.T
    V = extract(SdpSolution(Status.FEASIBLE, {"V": Q}), G)
    expr = SosExpression(2).add(G, LieDerivative(sys))
    assert expr.value({"V": Q}).allclose(lie_derivative(V, sys), atol=1e-9)


def test_gamma_step_instance_small_gamma():
    # Lemma-1 regime: a small sublevel set of V0 is certified
    sys = bench.get("vdp").system
    V0 = initial_candidate(sys)
    l2 = 1e-6 * (x1**2 + x2**2)
    s0 = GramVariable(monomial_basis(2, 2, 4), "s0")
    expr, target, C = sos_constraint(-(lie_derivative(V0, sys) + l2), [(s0, V0 - 0.1)], "C")
    sol = solve(assemble([(expr, target)]).problem)
    assert sol.status is Status.FEASIBLE
    assert match_residual(expr, target, sol.blocks) <= 1e-6
