"""Small semidefinite programs: PSD blocks, linear equalities, linear objective.

Decision variables are the upper-triangular entries of symmetric blocks,
stored column by column: for a block of side ``n`` the entry ``(i, j)``
with ``i <= j`` sits at offset ``j*(j+1)/2 + i``.  Equality rows act on the
concatenation of all blocks.

The interior-point engine is Clarabel (homogeneous embedding, so
infeasibility comes back as a certificate rather than a stall).
"""

from __future__ import annotations

import enum
import io
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

EQ_TOL = 1e-7
PSD_TOL = 1e-8
GAP_TOL = 1e-8
MAX_ITER = 200


class SdpFormatError(ValueError):
    """The problem data is inconsistent (bad block reference, shapes...)."""


class Status(str, enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    MARGINAL = "Marginal"


def tri_len(n: int) -> int:
    return n * (n + 1) // 2


def tri_index(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return j * (j + 1) // 2 + i


@dataclass(frozen=True)
class SdpProblem:
    """``find Q_k >= 0  s.t.  A vec(Q) = b``, optionally minimizing ``c . vec(Q)``.

    Attributes
    ----------
    blocks : tuple of (name, side)
    A : scipy.sparse.csr_matrix
        Equality rows over the stacked triangular block entries.
    b : ndarray
    objective : ndarray or None
        Linear cost on the same variable vector; ``None`` means feasibility.
    """

    blocks: tuple
    A: sp.csr_matrix
    b: np.ndarray
    objective: np.ndarray | None = None

    def __post_init__(self):
        if not self.blocks:
            raise SdpFormatError("problem has no blocks")
        for name, side in self.blocks:
            if side < 1:
                raise SdpFormatError(f"block {name!r} has side {side}")
        nv = self.nvars
        if self.A.shape[1] != nv:
            raise SdpFormatError(f"equality matrix has {self.A.shape[1]} columns, expected {nv}")
        if self.A.shape[0] != len(self.b):
            raise SdpFormatError("rhs length does not match equality rows")
        if self.objective is not None and len(self.objective) != nv:
            raise SdpFormatError("objective length does not match variables")

    @property
    def sense(self) -> str:
        return "feasibility" if self.objective is None else "minimize"

    @property
    def nvars(self) -> int:
        return sum(tri_len(s) for _, s in self.blocks)

    @property
    def offsets(self) -> list[int]:
        out, k = [], 0
        for _, s in self.blocks:
            out.append(k)
            k += tri_len(s)
        return out

    def block_index(self, name) -> int:
        for k, (nm, _) in enumerate(self.blocks):
            if nm == name:
                return k
        raise KeyError(name)

    def scaled(self, factor: float) -> "SdpProblem":
        return SdpProblem(self.blocks, (self.A * factor).tocsr(), self.b * factor, self.objective)


@dataclass
class SdpSolution:
    status: Status
    blocks: dict = field(default_factory=dict)
    eq_residual: float = float("inf")
    min_eig: dict = field(default_factory=dict)
    objective: float | None = None
    iterations: int = 0
    solver_status: str = ""

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


def _normalize_rows(A: sp.csr_matrix, b: np.ndarray):
    """Drop empty/duplicate rows and scale each row to unit max-abs."""
    A = A.tocsr()
    A.sum_duplicates()
    A.eliminate_zeros()
    rows, rhs, seen = [], [], {}
    bad = []
    for r in range(A.shape[0]):
        lo, hi = A.indptr[r], A.indptr[r + 1]
        idx = A.indices[lo:hi]
        val = A.data[lo:hi]
        if len(val) == 0:
            if abs(b[r]) > EQ_TOL:
                bad.append(r)
            continue
        s = np.max(np.abs(val))
        order = np.argsort(idx)
        idx, val = idx[order], val[order] / s
        key = (tuple(idx), tuple(np.round(val, 12)), round(b[r] / s, 12))
        if key in seen:
            continue
        seen[key] = True
        rows.append((idx, val))
        rhs.append(b[r] / s)
    if rows:
        indptr = np.cumsum([0] + [len(i) for i, _ in rows])
        M = sp.csr_matrix(
            (np.concatenate([v for _, v in rows]), np.concatenate([i for i, _ in rows]), indptr),
            shape=(len(rows), A.shape[1]),
        )
    else:
        M = sp.csr_matrix((0, A.shape[1]))
    return M, np.asarray(rhs, dtype=float), bad


def _unpack(x: np.ndarray, side: int) -> np.ndarray:
    Q = np.zeros((side, side))
    k = 0
    for j in range(side):
        Q[: j + 1, j] = x[k : k + j + 1]
        k += j + 1
    return Q + np.triu(Q, 1).T


# alternative engine settings tried in turn when the default run neither
# converges nor certifies infeasibility
RETRY_SETTINGS = (
    {"equilibrate_enable": False},
    {"iterative_refinement_max_iter": 50, "iterative_refinement_reltol": 1e-16, "iterative_refinement_abstol": 1e-16},
    {"max_step_fraction": 0.9},
)


def solve(
    problem: SdpProblem,
    eq_tol: float = EQ_TOL,
    psd_tol: float = PSD_TOL,
    gap_tol: float = GAP_TOL,
    max_iter: int = MAX_ITER,
    overrides: dict | None = None,
    retry: bool = True,
) -> SdpSolution:
    """Solve ``problem``; numerical trouble is reported as ``Marginal``.

    The status rests on evidence: ``Feasible`` whenever the returned point
    meets both tolerances, whatever the engine reported, and ``Infeasible``
    only with an infeasibility certificate from the default settings.
    """
    import clarabel

    A, b, bad = _normalize_rows(problem.A, problem.b)
    if bad:
        return SdpSolution(Status.INFEASIBLE, solver_status="inconsistent empty row")
    nv = problem.nvars
    m_eq = A.shape[0]

    # PSD cone rows: s = svec(Q) with sqrt(2) on off-diagonals, i.e. -G x + s = 0
    diag = []
    for _, side in problem.blocks:
        for j in range(side):
            for i in range(j + 1):
                diag.append(1.0 if i == j else np.sqrt(2.0))
    diag = np.asarray(diag)
    Acl = sp.vstack([A, -sp.diags(diag)]).tocsc()
    bcl = np.concatenate([b, np.zeros(nv)])
    cones = []
    if m_eq:
        cones.append(clarabel.ZeroConeT(m_eq))
    for _, side in problem.blocks:
        cones.append(clarabel.PSDTriangleConeT(side))
    P = sp.csc_matrix((nv, nv))
    q = np.zeros(nv) if problem.objective is None else np.asarray(problem.objective, float)

    def attempt(extra):
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.max_iter = max_iter
        settings.tol_feas = min(eq_tol * 0.01, 1e-9)
        settings.tol_gap_abs = gap_tol
        settings.tol_gap_rel = gap_tol
        settings.max_threads = 1
        settings.presolve_enable = False
        settings.chordal_decomposition_enable = False
        for k, v in {**(overrides or {}), **extra}.items():
            setattr(settings, k, v)
        try:
            res = clarabel.DefaultSolver(P, q, Acl, bcl, cones, settings).solve()
        except (KeyboardInterrupt, SystemExit):
            raise
        except BaseException as e:  # the Rust core panics on non-finite iterates
            log.debug("SDP engine aborted: %s", e)
            return "Panic", None, 0
        # the cone slack lies in the PSD cone by construction, while x
        # matches it only up to the primal residual
        return str(res.status), np.asarray(res.s)[m_eq:] / diag, int(res.iterations)

    def evaluate(x):
        blocks, min_eig = {}, {}
        finite = x is not None and bool(np.all(np.isfinite(x)))
        for (name, side), off in zip(problem.blocks, problem.offsets):
            if finite:
                Q = _unpack(x[off : off + tri_len(side)], side)
                blocks[name] = Q
                min_eig[name] = float(np.linalg.eigvalsh(Q)[0])
            else:
                blocks[name] = np.full((side, side), np.nan)
                min_eig[name] = -np.inf
        if not finite:
            resid = float("inf")
        else:
            resid = float(np.max(np.abs(A @ x - b))) if m_eq else 0.0
        ok = resid <= eq_tol and min(min_eig.values(), default=0.0) >= -psd_tol
        return blocks, min_eig, resid, ok

    total_iters = 0
    first = None
    for extra in ({},) + (RETRY_SETTINGS if retry else ()):
        status, x, iters = attempt(extra)
        total_iters += iters
        blocks, min_eig, resid, ok = evaluate(x)
        if ok:
            obj = float(q @ x) if problem.objective is not None else None
            return SdpSolution(Status.FEASIBLE, blocks, resid, min_eig, obj, total_iters, status)
        if first is None:
            first = (status, blocks, min_eig, resid)
            # infeasibility certificates from the retry settings proved
            # unreliable; only the default run may declare infeasibility
            if status == "PrimalInfeasible":
                return SdpSolution(Status.INFEASIBLE, blocks, resid, min_eig, None, total_iters, status)
        if status in ("Solved", "AlmostSolved") and problem.objective is None:
            # converged, only outside the tolerances: another run will not help
            break
    status, blocks, min_eig, resid = first
    return SdpSolution(Status.MARGINAL, blocks, resid, min_eig, None, total_iters, status)


def dump(problem: SdpProblem, solution: SdpSolution | None = None) -> str:
    """Deterministic text dump for regression diffs."""
    out = io.StringIO()
    out.write("# sdp-problem v1\n")
    out.write(f"sense {problem.sense}\n")
    for (name, side), off in zip(problem.blocks, problem.offsets):
        out.write(f"block {name} {side} offset {off}\n")
    A = problem.A.tocoo()
    order = np.lexsort((A.col, A.row))
    out.write(f"equalities {problem.A.shape[0]} nnz {A.nnz}\n")
    for k in order:
        out.write(f"A {A.row[k]} {A.col[k]} {float(A.data[k])!r}\n")
    for r, v in enumerate(problem.b):
        if v != 0.0:
            out.write(f"b {r} {float(v)!r}\n")
    if problem.objective is not None:
        for k, v in enumerate(problem.objective):
            if v != 0.0:
                out.write(f"c {k} {float(v)!r}\n")
    if solution is not None:
        out.write(f"status {solution.status.value} ({solution.solver_status})\n")
        out.write(f"eq_residual {float(solution.eq_residual)!r}\n")
        for name, _ in problem.blocks:
            if name in solution.min_eig:
                out.write(f"min_eig {name} {float(solution.min_eig[name])!r}\n")
    return out.getvalue()
