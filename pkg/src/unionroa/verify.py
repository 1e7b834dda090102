"""SOS-free checks: trajectory simulation, brute-force ROA masks, sampling audits."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from .poly import DynamicalSystem, Polynomial

DT = 1e-3
T_MAX = 50.0
CONVERGE_EPS = 1e-4
ESCAPE_RADIUS = 1e3
BOUNDARY_BAND = 1e-3
ORIGIN_BALL = 1e-3


@dataclass
class TrajectoryResult:
    converged: bool
    final_norm: float
    steps: int
    escaped: bool
    final_state: np.ndarray | None = None


class _Field:
    """Vectorized evaluation of a polynomial vector field."""

    def __init__(self, sys: DynamicalSystem):
        mons = sorted({m for fk in sys.f for m, _ in fk.items()})
        self.E = np.array(mons, dtype=np.int64).reshape(len(mons), sys.nvars)
        self.C = np.zeros((len(mons), sys.nvars))
        for k, fk in enumerate(sys.f):
            for r, m in enumerate(mons):
                self.C[r, k] = fk.coeff(m)
        self.maxdeg = int(self.E.max()) if self.E.size else 0
        self.n = sys.nvars

    def __call__(self, X: np.ndarray) -> np.ndarray:
        m = X.shape[0]
        vals = np.ones((m, self.E.shape[0]))
        for k in range(self.n):
            col = self.E[:, k]
            if not col.any():
                continue
            pw = np.empty((m, self.maxdeg + 1))
            pw[:, 0] = 1.0
            for d in range(1, self.maxdeg + 1):
                pw[:, d] = pw[:, d - 1] * X[:, k]
            vals *= pw[:, col]
        return vals @ self.C


def terminal_set(sys: DynamicalSystem, safety: float = 0.5):
    """Ellipsoid ``{x : x^T P x <= c}`` proven to converge to the origin.

    ``P`` solves the Lyapunov equation with ``Q = I``.  With ``g`` the
    nonlinear part of ``f`` and ``|x^m| <= |x|^deg(m)``,
    ``d/dt x^T P x <= -|x|^2 + 2 |P| |x| G(|x|)`` where ``G`` bounds ``|g|``
    by the absolute coefficient sums.  The radius ``r`` is the largest one
    with ``2 |P| G(r) / r <= safety``; the ellipsoid inscribed in that ball
    is forward invariant and every trajectory in it converges.
    """
    from .lyap import linearize, solve_lyapunov

    A = linearize(sys).A
    P = solve_lyapunov(A, np.eye(sys.nvars))
    normP = float(np.linalg.norm(P, 2))
    maxdeg = max(2, sys.degree)
    # per-component coefficient-magnitude polynomials in r
    comp = np.zeros((sys.nvars, maxdeg + 1))
    for k, fk in enumerate(sys.f):
        for m, c in fk.items():
            d = sum(m)
            if d >= 2:
                comp[k, d] += abs(c)

    def ratio(r):
        G = np.sqrt(np.sum(np.polynomial.polynomial.polyval(r, comp.T) ** 2))
        return 2.0 * normP * G / r

    if not comp.any():
        return P, np.inf
    lo, hi = 0.0, 1.0
    while ratio(hi) < safety:
        lo, hi = hi, 2 * hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid > 0 and ratio(mid) <= safety:
            lo = mid
        else:
            hi = mid
    r = lo
    c = float(np.linalg.eigvalsh(P)[0]) * r * r
    return P, c


def simulate_many(
    sys: DynamicalSystem,
    X0,
    t_max: float = T_MAX,
    dt: float = DT,
    converge_eps: float = CONVERGE_EPS,
    escape_radius: float = ESCAPE_RADIUS,
    terminal=None,
):
    """Fixed-step RK4 from every row of ``X0``.

    Returns ``(converged, escaped, final_states, steps)``; a trajectory is
    frozen the first step it enters the ``converge_eps`` ball or leaves the
    ``escape_radius`` ball.  ``terminal=(P, c)`` adds the ellipsoid
    ``x^T P x <= c`` (see :func:`terminal_set`) as a convergence target.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    X = np.array(X0, dtype=float, ndmin=2).copy()
    m = X.shape[0]
    F = _Field(sys)
    n_steps = int(round(t_max / dt))
    converged = np.zeros(m, dtype=bool)
    escaped = np.zeros(m, dtype=bool)
    steps = np.zeros(m, dtype=np.int64)
    if terminal is not None:
        TP, tc = terminal

        def reached(Y, nrm):
            return (nrm <= converge_eps) | (np.einsum("ij,jk,ik->i", Y, TP, Y) <= tc)
    else:

        def reached(Y, nrm):
            return nrm <= converge_eps

    norms = np.linalg.norm(X, axis=1)
    converged |= reached(X, norms)
    escaped |= ~np.isfinite(norms) | (norms > escape_radius)
    active = np.flatnonzero(~(converged | escaped))
    Y = X[active]
    h = dt
    for step in range(1, n_steps + 1):
        if active.size == 0:
            break
        k1 = F(Y)
        k2 = F(Y + 0.5 * h * k1)
        k3 = F(Y + 0.5 * h * k2)
        k4 = F(Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        nrm = np.sqrt(np.einsum("ij,ij->i", Y, Y))
        done_c = reached(Y, nrm)
        done_e = ~np.isfinite(nrm) | (nrm > escape_radius)
        done = done_c | done_e
        if done.any():
            idx = active[done]
            X[idx] = Y[done]
            converged[active[done_c]] = True
            escaped[active[done_e]] = True
            steps[idx] = step
            keep = ~done
            active, Y = active[keep], Y[keep]
    X[active] = Y
    steps[active] = n_steps
    return converged, escaped, X, steps


def simulate(sys: DynamicalSystem, x0, t_max: float = T_MAX, dt: float = DT, **kw) -> TrajectoryResult:
    c, e, X, s = simulate_many(sys, np.atleast_2d(x0), t_max, dt, **kw)
    return TrajectoryResult(bool(c[0]), float(np.linalg.norm(X[0])), int(s[0]), bool(e[0]), X[0])


def grid_points(box, resolution):
    """Cell centers of a uniform grid; ``box`` is a sequence of (lo, hi)."""
    box = np.asarray(box, dtype=float)
    n = box.shape[0]
    res = [resolution] * n if np.isscalar(resolution) else list(resolution)
    axes = [lo + (np.arange(r) + 0.5) * (hi - lo) / r for (lo, hi), r in zip(box, res)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    cell = float(np.prod([(hi - lo) / r for (lo, hi), r in zip(box, res)]))
    return pts, axes, cell


@dataclass
class RoaMask:
    mask: np.ndarray  # shape = grid shape
    axes: list
    cell_volume: float
    box: np.ndarray
    resolution: tuple

    @property
    def area(self) -> float:
        return float(self.mask.sum()) * self.cell_volume

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)


def oracle_roa_mask(
    sys: DynamicalSystem, box, grid_resolution, chunk: int = 200_000, accelerate: bool = True, **sim_kw
) -> RoaMask:
    """Simulate from each cell center; membership is convergence to the origin.

    With ``accelerate`` trajectories also stop on entering
    :func:`terminal_set`.  Every trajectory in that set converges, so the
    verdict can only change for one that converges too slowly to reach the
    ``1e-4`` ball within ``t_max``.
    """
    if accelerate and "terminal" not in sim_kw:
        sim_kw["terminal"] = terminal_set(sys)
    pts, axes, cell = grid_points(box, grid_resolution)
    conv = np.zeros(len(pts), dtype=bool)
    for lo in range(0, len(pts), chunk):
        c, _, _, _ = simulate_many(sys, pts[lo : lo + chunk], **sim_kw)
        conv[lo : lo + chunk] = c
    shape = tuple(len(a) for a in axes)
    return RoaMask(conv.reshape(shape), axes, cell, np.asarray(box, float), shape)


def sublevel_mask(V: Polynomial, gamma: float, box, grid_resolution) -> RoaMask:
    pts, axes, cell = grid_points(box, grid_resolution)
    inside = V(pts) <= gamma
    shape = tuple(len(a) for a in axes)
    return RoaMask(inside.reshape(shape), axes, cell, np.asarray(box, float), shape)


def sample_sublevel(
    V: Polynomial, gamma: float, n_samples: int, seed: int, box=None, batch: int = 20000, max_draws: int = 10**8
) -> np.ndarray:
    """Rejection-sample ``{V <= gamma}`` uniformly inside a bounding box."""
    rng = np.random.default_rng(seed)
    if box is None:
        box = sublevel_bounding_box(V, gamma)
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    out, drawn = [], 0
    have = 0
    while have < n_samples:
        if drawn > max_draws:
            raise RuntimeError("rejection sampling acceptance too low")
        P = lo + (hi - lo) * rng.random((batch, len(lo)))
        drawn += batch
        keep = P[V(P) <= gamma]
        out.append(keep)
        have += len(keep)
    return np.concatenate(out)[:n_samples]


def sublevel_bounding_box(V: Polynomial, gamma: float, n_dirs: int = 720, margin: float = 1.05):
    """Axis-aligned box around ``{V <= gamma}`` from ray crossings."""
    from .shapes import RaySpec, ray_level_intersection

    n = V.nvars
    pts = []
    if n == 2:
        rays = [RaySpec(t) for t in np.linspace(0, 360, n_dirs, endpoint=False)]
    else:
        k = int(np.sqrt(n_dirs))
        rays = [RaySpec(t, p) for t in np.linspace(-89, 89, k) for p in np.linspace(-180, 180, k, endpoint=False)]
    for r in rays:
        pts.append(ray_level_intersection(V, gamma, r))
    pts = np.array(pts)
    ext = np.max(np.abs(pts), axis=0) * margin
    # rays only see the star-shaped hull from the origin; widen to catch lobes
    ext = ext * 1.2
    return np.stack([-ext, ext], axis=1)


@dataclass
class Violation:
    kind: str
    point: np.ndarray
    detail: str = ""


@dataclass
class CheckReport:
    n_samples: int
    seed: int
    violations: list = field(default_factory=list)
    n_convergence_checked: int = 0
    n_shape_samples: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def counts(self) -> dict:
        out: dict = {}
        for v in self.violations:
            out[v.kind] = out.get(v.kind, 0) + 1
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(self.violations[0].point) if self.violations else 0
        w.writerow(["kind"] + [f"x{k + 1}" for k in range(n)] + ["detail"])
        for v in self.violations:
            w.writerow([v.kind] + [repr(float(c)) for c in v.point] + [v.detail])
        return buf.getvalue()


def check_certificate(
    cert,
    sys: DynamicalSystem,
    n_samples: int = 10_000,
    seed: int = 0,
    simulate_points: bool = True,
    shape_samples: int | None = None,
    **sim_kw,
) -> CheckReport:
    """Audit a certificate by sampling.

    Points are drawn from ``{V <= gamma}``; each must have ``V > 0`` and
    ``Vdot < 0`` away from the origin and must converge under simulation
    (points within ``1e-3`` of the boundary are exempt from the last test).
    Each shape region ``{p_i <= beta_i}`` is sampled separately and must lie
    in ``{V <= gamma}``.
    """
    from .poly import lie_derivative

    V, gamma = cert.V, cert.gamma
    rep = CheckReport(n_samples, seed)
    pts = sample_sublevel(V, gamma, n_samples, seed)
    Vdot = lie_derivative(V, sys)
    nrm = np.linalg.norm(pts, axis=1)
    off = nrm > ORIGIN_BALL
    vals = V(pts)
    dvals = Vdot(pts)
    for p in pts[off & (vals <= 0)]:
        rep.violations.append(Violation("V_nonpositive", p))
    for p, d in zip(pts[off & (dvals >= 0)], dvals[off & (dvals >= 0)]):
        rep.violations.append(Violation("Vdot_nonnegative", p, f"{d:.3e}"))

    if simulate_points:
        sim_kw.setdefault("terminal", terminal_set(sys))
        gnorm = np.linalg.norm(np.stack([g(pts) for g in V.grad()], axis=1), axis=1)
        band = (gamma - vals) <= BOUNDARY_BAND * np.maximum(gnorm, 1e-12)
        test = ~band
        conv, esc, X, _ = simulate_many(sys, pts[test], **sim_kw)
        rep.n_convergence_checked = int(test.sum())
        for p, e in zip(pts[test][~conv], esc[~conv]):
            rep.violations.append(Violation("not_converged", p, "escaped" if e else "stalled"))

    ns = n_samples if shape_samples is None else shape_samples
    rng = np.random.default_rng(seed + 1)
    for k, (sf, beta, _s) in enumerate(cert.shapes):
        if beta <= 0:
            continue
        P = sample_ellipsoid(sf.N, sf.center, beta, ns, rng)
        rep.n_shape_samples += len(P)
        bad = V(P) > gamma * (1 + 1e-9)
        for p in P[bad]:
            rep.violations.append(Violation("union_containment", p, f"shape {k}"))
    return rep


def sample_ellipsoid(N, center, beta: float, n: int, rng) -> np.ndarray:
    """Uniform samples of ``{(x-c)^T N (x-c) <= beta}``."""
    N = np.asarray(N, dtype=float)
    d = N.shape[0]
    L = np.linalg.cholesky(N / beta)
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(n) ** (1.0 / d)
    u = g * r[:, None]
    # x - c = L^{-T} u  gives (x-c)^T N/beta (x-c) = |u|^2
    return center + np.linalg.solve(L.T, u.T).T


@dataclass
class CoverageReport:
    estimated_area: float
    oracle_area: float
    ratio: float
    violations: int


def coverage(cert, sys: DynamicalSystem, box, grid_resolution, oracle: RoaMask | None = None) -> CoverageReport:
    """Area of ``{V <= gamma}`` relative to the simulated ROA inside ``box``."""
    if oracle is None:
        oracle = oracle_roa_mask(sys, box, grid_resolution)
    est = sublevel_mask(cert.V, cert.gamma, box, oracle.resolution)
    bad = int(np.sum(est.mask & ~oracle.mask))
    ratio = est.area / oracle.area if oracle.area > 0 else float("nan")
    return CoverageReport(est.area, oracle.area, ratio, bad)


def mask_csv(mask: RoaMask, header: dict | None = None) -> str:
    buf = io.StringIO()
    for k, v in (header or {}).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    n = len(mask.axes)
    w.writerow([f"x{k + 1}" for k in range(n)] + ["in_roa"])
    for idx in itertools.product(*[range(len(a)) for a in mask.axes]):
        w.writerow([repr(float(mask.axes[k][i])) for k, i in enumerate(idx)] + [int(mask.mask[idx])])
    return buf.getvalue()


def monte_carlo_volume(V: Polynomial, gamma: float, box, n: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    box = np.asarray(box, dtype=float)
    P = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((n, box.shape[0]))
    frac = float(np.mean(V(P) <= gamma))
    return frac * float(np.prod(box[:, 1] - box[:, 0]))
