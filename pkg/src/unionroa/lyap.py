"""Quadratic Lyapunov candidates from the linearization at the origin."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import DynamicalSystem, Polynomial

HURWITZ_MARGIN = 1e-9


class NotHurwitz(ValueError):
    """The linearization has an eigenvalue with nonnegative real part."""


@dataclass(frozen=True)
class LinearizedSystem:
    A: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.A)

    @property
    def is_hurwitz(self) -> bool:
        return bool(np.max(self.eigenvalues.real) <= -HURWITZ_MARGIN)


def linearize(sys: DynamicalSystem) -> LinearizedSystem:
    """Jacobian at the origin, read off the degree-one coefficients."""
    n = sys.nvars
    A = np.zeros((n, n))
    for k, fk in enumerate(sys.f):
        for j in range(n):
            e = [0] * n
            e[j] = 1
            A[k, j] = fk.coeff(tuple(e))
    return LinearizedSystem(A)


def solve_lyapunov(A, Q) -> np.ndarray:
    """Solve ``A^T P + P A = -Q`` for symmetric ``P``.

    The equation is written as a dense linear system in the ``n(n+1)/2``
    upper-triangular entries of ``P``.
    """
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n = A.shape[0]
    eig = np.linalg.eigvals(A)
    if np.max(eig.real) > -HURWITZ_MARGIN:
        raise NotHurwitz(f"linearization is not Hurwitz (eigenvalues {np.round(eig, 6)})")

    idx = {}
    for i in range(n):
        for j in range(i, n):
            idx[(i, j)] = len(idx)
    m = len(idx)
    M = np.zeros((m, m))
    rhs = np.zeros(m)

    def var(i, j):
        return idx[(i, j) if i <= j else (j, i)]

    # (A^T P + P A)_{ij} = sum_k A_ki P_kj + P_ik A_kj
    for (i, j), r in idx.items():
        for k in range(n):
            M[r, var(k, j)] += A[k, i]
            M[r, var(i, k)] += A[k, j]
        rhs[r] = -Q[i, j]
    p = np.linalg.solve(M, rhs)
    P = np.zeros((n, n))
    for (i, j), r in idx.items():
        P[i, j] = P[j, i] = p[r]
    if np.linalg.eigvalsh(P)[0] <= 0:
        raise NotHurwitz("Lyapunov solution is not positive definite")
    return P


def initial_candidate(sys: DynamicalSystem, Q=None) -> Polynomial:
    """``V0 = x^T P x`` with ``A^T P + P A = -Q`` (default ``Q = I``)."""
    lin = linearize(sys)
    if Q is None:
        Q = np.eye(sys.nvars)
    P = solve_lyapunov(lin.A, Q)
    return Polynomial.quadratic_form(P)
