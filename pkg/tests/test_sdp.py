import numpy as np
import pytest
import scipy.sparse as sp

from unionroa.poly import Polynomial
from unionroa.sdp import (
    SdpFormatError,
    SdpProblem,
    Status,
    dump,
    solve,
    tri_index,
    tri_len,
)
from unionroa.sos import assemble, match_residual, sos_constraint

x1, x2 = Polynomial.variables(2)


def single_block(rows, rhs, side=2, objective=None):
    """One block; ``rows`` are dicts (i, j) -> coef."""
    A = sp.lil_matrix((len(rows), tri_len(side)))
    for r, row in enumerate(rows):
        for (i, j), c in row.items():
            A[r, tri_index(i, j)] = c
    return SdpProblem((("Q", side),), A.tocsr(), np.asarray(rhs, float), objective)


def test_tri_layout():
    assert [tri_index(i, j) for j in range(3) for i in range(j + 1)] == list(range(6))
    assert tri_index(2, 0) == tri_index(0, 2)
    assert tri_len(4) == 10


def test_feasible_rank_one():
    prob = single_block([{(0, 0): 1}, {(1, 1): 1}, {(0, 1): 1}], [1, 1, 1])
    sol = solve(prob)
    assert sol.status is Status.FEASIBLE
    assert np.allclose(sol.blocks["Q"], np.ones((2, 2)), atol=1e-6)
    assert sol.eq_residual <= 1e-7 and sol.min_eig["Q"] >= -1e-8


def test_negative_diagonal_infeasible():
    sol = solve(single_block([{(0, 0): 1}], [-1]))
    assert sol.status is Status.INFEASIBLE
    assert not sol.feasible


def test_inconsistent_empty_row():
    A = sp.csr_matrix((1, 3))
    sol = solve(SdpProblem((("Q", 2),), A, np.array([1.0])))
    assert sol.status is Status.INFEASIBLE


def test_minimize_trace():
    # min Q11 + Q22 with Q12 = 1 gives Q = [[1,1],[1,1]]
    c = np.zeros(3)
    c[tri_index(0, 0)] = c[tri_index(1, 1)] = 1.0
    sol = solve(single_block([{(0, 1): 1}], [1.0], objective=c))
    assert sol.feasible and abs(sol.objective - 2.0) <= 1e-6


def test_format_errors():
    with pytest.raises(SdpFormatError):
        SdpProblem((), sp.csr_matrix((0, 0)), np.zeros(0))
    with pytest.raises(SdpFormatError):
        SdpProblem((("Q", 0),), sp.csr_matrix((0, 0)), np.zeros(0))
    with pytest.raises(SdpFormatError):
        SdpProblem((("Q", 2),), sp.csr_matrix((1, 4)), np.zeros(1))
    with pytest.raises(SdpFormatError):
        SdpProblem((("Q", 2),), sp.csr_matrix((1, 3)), np.zeros(2))


def motzkin_problem():
    p = x1**4 * x2**2 + x1**2 * x2**4 - 3 * x1**2 * x2**2 + 1
    expr, target, _ = sos_constraint(p, name="C")
    return assemble([(expr, target)]).problem


def regression_suite():
    out = [("motzkin", motzkin_problem(), Status.INFEASIBLE)]
    for name, p, want in [
        ("square", (x1 - x2) ** 2 + (x1 * x2 + 1) ** 2, Status.FEASIBLE),
        ("quartic", x1**4 + x2**4 + 1, Status.FEASIBLE),
        ("negative", -(x1**2) - x2**2, Status.INFEASIBLE),
    ]:
        expr, target, _ = sos_constraint(p, name="C")
        out.append((name, assemble([(expr, target)]).problem, want))
    out.append(("rank1", single_block([{(0, 0): 1}, {(1, 1): 1}, {(0, 1): 1}], [1, 1, 1]), Status.FEASIBLE))
    out.append(("negdiag", single_block([{(0, 0): 1}], [-1]), Status.INFEASIBLE))
    return out


@pytest.mark.parametrize("name,prob,want", regression_suite(), ids=lambda v: v if isinstance(v, str) else "")
def test_regression_suite_status(name, prob, want):
    assert solve(prob).status is want


@pytest.mark.parametrize("name,prob,want", regression_suite(), ids=lambda v: v if isinstance(v, str) else "")
def test_scale_robustness(name, prob, want):
    assert solve(prob.scaled(1e3)).status is want


def test_feasible_replays_through_sos():
    p = (x1**2 - 2 * x2) ** 2 + (x1 - x2) ** 2 + x2**4
    expr, target, C = sos_constraint(p, name="C")
    sol = solve(assemble([(expr, target)]).problem)
    assert sol.feasible
    assert match_residual(expr, target, sol.blocks) <= 1e-7
    assert np.linalg.eigvalsh(sol.blocks["C"])[0] >= -1e-8


def test_deterministic():
    prob = motzkin_problem()
    a, b = solve(prob), solve(prob)
    assert a.status == b.status and a.eq_residual == b.eq_residual
    expr, target, _ = sos_constraint(x1**4 + x1**2 * x2**2 + 1, name="C")
    prob = assemble([(expr, target)]).problem
    a, b = solve(prob), solve(prob)
    assert a.status == b.status and a.eq_residual == b.eq_residual
    assert np.array_equal(a.blocks["C"], b.blocks["C"])


def test_dump_is_deterministic():
    prob = motzkin_problem()
    text = dump(prob, solve(prob))
    assert text == dump(prob, solve(prob))
    assert text.startswith("# sdp-problem v1\nsense feasibility\nblock C 10 offset 0\n")
    assert "status Infeasible" in text
    assert "np." not in text
