"""Alternating (V-s) search for a polynomial Lyapunov function whose level set
contains several shape-function regions at once.

Each iteration runs three convex subproblems:

* gamma step -- for fixed ``V`` find the largest ``gamma`` such that
  ``-(dV/dx f + l2) + (V - gamma) s0`` is SOS for some SOS ``s0``;
* beta step -- for fixed ``V, gamma`` and every shape ``p_i`` find the largest
  ``beta_i`` with ``-(V - gamma) + (p_i - beta_i) s_i`` SOS;
* V step -- with all multipliers fixed, find any ``V`` satisfying the same
  constraints plus ``V - l1`` SOS,

followed by the rescaling ``V <- V / gamma``.  A round stops when the V step
is infeasible, when every ``beta_i`` stalls, or after ``max_iters``.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .lyap import initial_candidate
from .poly import DynamicalSystem, Polynomial, lie_derivative, polynomial_from_gram
from .sdp import solve
from .shapes import NoIntersection, ShapeFunction, ShapeSpec, as_polynomial, ray_level_intersection
from .sos import (
    GramVariable,
    LieDerivative,
    Multiply,
    StructuralInfeasibility,
    Sum,
    assemble,
    extract,
    match_residual,
    monomial_basis,
    sos_constraint,
)

log = logging.getLogger(__name__)

GAMMA_CAP = 2.0**30
GAMMA_FLOOR = 2.0**-30


class ConfigError(ValueError):
    pass


class InfeasibleAtZero(RuntimeError):
    """No multiplier certifies any sublevel set of the candidate."""


class ShapeInfeasible(RuntimeError):
    def __init__(self, index: int, v_at_center: float, gamma: float):
        self.index = index
        self.v_at_center = v_at_center
        super().__init__(
            f"shape {index}: no beta >= 0 is feasible (V(center) = {v_at_center:.6g}, gamma = {gamma:.6g})"
        )


class VStepInfeasible(RuntimeError):
    pass


def default_l(nvars: int, eps: float = 1e-6) -> Polynomial:
    return Polynomial.quadratic_form(eps * np.eye(nvars))


@dataclass
class IterationConfig:
    deg_V: int = 6
    deg_s0: tuple = (2, 4)
    deg_si: tuple = (0, 4)
    l_eps: float = 1e-6
    l1: Polynomial | None = None
    l2: Polynomial | None = None
    gamma_bisect_tol: float = 1e-3
    beta_bisect_tol: float = 1e-3
    beta_stall_tol: float = 1e-3
    max_iters: int = 100
    backoff: float = 1e-3
    rescale: bool = True
    shape_degree: int = 2

    def __post_init__(self):
        self.deg_s0 = tuple(self.deg_s0)
        self.deg_si = tuple(self.deg_si)
        if self.deg_V < 2 or self.deg_V % 2:
            raise ConfigError("deg_V must be an even integer >= 2")
        for nm in ("deg_s0", "deg_si"):
            lo, hi = getattr(self, nm)
            if not 0 <= lo <= hi:
                raise ConfigError(f"{nm}: invalid degree range {getattr(self, nm)}")
        if not 0.0 <= self.backoff < 0.5:
            raise ConfigError("backoff must lie in [0, 0.5)")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        for nm in ("gamma_bisect_tol", "beta_bisect_tol", "beta_stall_tol"):
            if not getattr(self, nm) > 0:
                raise ConfigError(f"{nm} must be positive")
        l1_deg = self.l1.degree if self.l1 is not None else 2
        if self.deg_V < l1_deg:
            raise ConfigError(f"degree condition deg(V) >= deg(l1) violated: {self.deg_V} < {l1_deg}")
        if self.shape_degree + self.deg_si[1] < self.deg_V:
            raise ConfigError(
                "degree condition deg(p_i) + deg(s_i) >= deg(V) violated: "
                f"{self.shape_degree} + {self.deg_si[1]} < {self.deg_V}"
            )

    def l1_for(self, n: int) -> Polynomial:
        return self.l1 if self.l1 is not None else default_l(n, self.l_eps)

    def l2_for(self, n: int) -> Polynomial:
        return self.l2 if self.l2 is not None else default_l(n, self.l_eps)

    def validate_for(self, sys: DynamicalSystem) -> None:
        lie_deg = self.deg_V - 1 + sys.degree
        l2_deg = self.l2_for(sys.nvars).degree
        if self.deg_V + self.deg_s0[1] < max(lie_deg, l2_deg):
            raise ConfigError(
                "degree condition deg(V) + deg(s0) >= max(deg(dV/dx f), deg(l2)) violated: "
                f"{self.deg_V} + {self.deg_s0[1]} < {max(lie_deg, l2_deg)}"
            )

    def to_dict(self) -> dict:
        return {
            "deg_V": self.deg_V,
            "deg_s0": list(self.deg_s0),
            "deg_si": list(self.deg_si),
            "l_eps": self.l_eps,
            "gamma_bisect_tol": self.gamma_bisect_tol,
            "beta_bisect_tol": self.beta_bisect_tol,
            "beta_stall_tol": self.beta_stall_tol,
            "max_iters": self.max_iters,
            "backoff": self.backoff,
            "rescale": self.rescale,
        }


@dataclass
class Certificate:
    """Everything needed to re-check one ROA estimate ``{V <= gamma}``."""

    V: Polynomial
    gamma: float
    shapes: list  # (ShapeFunction, beta, s)
    s0: Polynomial
    round_index: int = 0
    iter_index: int = 0
    l1: Polynomial | None = None
    l2: Polynomial | None = None
    global_stability: bool = False

    def __post_init__(self):
        n = self.V.nvars
        if self.l1 is None:
            self.l1 = default_l(n)
        if self.l2 is None:
            self.l2 = default_l(n)

    @property
    def nvars(self) -> int:
        return self.V.nvars

    @property
    def betas(self) -> list:
        return [b for _, b, _ in self.shapes]

    def scaled_V(self) -> Polynomial:
        return self.V / self.gamma

    def contains(self, X) -> np.ndarray:
        return self.V(np.atleast_2d(X)) <= self.gamma


# ---------------------------------------------------------------------------
# single subproblems

@dataclass
class Feasibility:
    ok: bool
    grams: dict = field(default_factory=dict)
    iterations: int = 0
    status: str = ""


def _solve(constraints, objective=None, retry: bool = True) -> tuple[Feasibility, dict]:
    try:
        asm = assemble(constraints, objective)
    except StructuralInfeasibility as e:
        return Feasibility(False, status=f"structural: {e}"), {}
    sol = solve(asm.problem, retry=retry)
    return Feasibility(sol.feasible, sol.blocks, sol.iterations, sol.status.value), asm.variables


class _Counter:
    def __init__(self):
        self.sdps = 0
        self.iters = 0

    def add(self, f: Feasibility):
        self.sdps += 1
        self.iters += f.iterations


class Frame:
    """Diagonal change of variables ``x = d * z``.

    SOS is invariant under an invertible linear substitution, so every
    program may be solved in ``z`` and mapped back exactly.  The factors are
    powers of two, which keeps the substitution exact in floating point.
    """

    def __init__(self, d):
        self.d = np.asarray(d, dtype=float)

    @classmethod
    def identity(cls, n: int) -> "Frame":
        return cls(np.ones(n))

    @classmethod
    def fit(cls, V: Polynomial, level: float) -> "Frame":
        """Unit-size ``{V <= level}`` along each axis, to within a factor 2."""
        n = V.nvars
        d = np.ones(n)
        for k in range(n):
            e = np.zeros(n)
            e[k] = 1.0
            try:
                r = np.sqrt(
                    np.linalg.norm(ray_level_intersection(V, level, e))
                    * np.linalg.norm(ray_level_intersection(V, level, -e))
                )
            except (NoIntersection, ValueError):
                continue
            if r > 0 and np.isfinite(r):
                d[k] = 2.0 ** round(float(np.log2(r)))
        return cls(d)

    def into(self, p: Polynomial) -> Polynomial:
        return p.substitute_scale(self.d)

    def out(self, p: Polynomial) -> Polynomial:
        return p.substitute_scale(1.0 / self.d)

    def system(self, sys: DynamicalSystem) -> DynamicalSystem:
        return sys.rescaled(self.d)


def _frame(V: Polynomial, level: float, cfg: IterationConfig) -> Frame:
    return Frame.fit(V, level) if cfg.rescale else Frame.identity(V.nvars)


def extract_poly(grams: dict, var: GramVariable) -> Polynomial:
    return polynomial_from_gram(grams[var.name], var.basis, var.nvars)


def _feasible_multiplier(fixed: Polynomial, mult_of: Polynomial, basis, counter: _Counter):
    """Is ``fixed + mult_of * s`` SOS for some SOS ``s``?  Returns ``(ok, s)``."""
    S = GramVariable(basis, "S")
    expr, target, _ = sos_constraint(fixed, [(S, Multiply(mult_of))], "C")
    # a bisection probe that fails only costs resolution, so skip the retries
    f, _ = _solve([(expr, target)], retry=False)
    counter.add(f)
    return (True, extract_poly(f.grams, S)) if f.ok else (False, None)


def _maximize(feas, start: float, tol: float, cap: float, floor: float, step: float = 1.0):
    """Bracket outwards from ``start``, then bisect.

    The bracket moves by a factor ``1 + step``, with ``step`` doubling after
    each move up to 1 (plain doubling or halving).  A small ``step`` suits a
    warm ``start`` that is already close to the answer.

    Returns ``(lo, s_lo, hit_cap)``; ``lo`` is ``None`` when nothing down to
    ``floor`` is feasible.
    """
    ok, s = feas(start)
    if ok:
        lo, s_lo = start, s
        while True:
            g = lo * (1.0 + step)
            step = min(2.0 * step, 1.0)
            if g > cap:
                return lo, s_lo, True
            ok, s = feas(g)
            if not ok:
                hi = g
                break
            lo, s_lo = g, s
    else:
        hi = start
        while True:
            g = hi / (1.0 + step)
            step = min(2.0 * step, 1.0)
            if g < floor:
                return None, None, False
            ok, s = feas(g)
            if ok:
                lo, s_lo = g, s
                break
            hi = g
    while hi - lo > tol * lo:
        mid = 0.5 * (lo + hi)
        ok, s = feas(mid)
        if ok:
            lo, s_lo = mid, s
        else:
            hi = mid
    return lo, s_lo, False


def _back_off(feas, lo, s_lo, backoff):
    # multipliers solved strictly inside the feasible range keep the next
    # V step and the replay away from an empty-interior problem
    if backoff <= 0:
        return lo, s_lo
    b = lo * (1.0 - backoff)
    ok, s = feas(b)
    return (b, s) if ok else (lo, s_lo)


@dataclass
class GammaResult:
    gamma: float
    s0: Polynomial
    unbounded: bool = False
    sdp_count: int = 0
    sdp_iterations: int = 0


def gamma_step(
    V: Polynomial, sys: DynamicalSystem, cfg: IterationConfig, start: float = 1.0, warm: bool = False
) -> GammaResult:
    """Largest ``gamma`` (relative tolerance ``cfg.gamma_bisect_tol``).

    ``warm`` says ``start`` is expected to be close, so the bracket starts
    narrow.

    ``unbounded`` is set when ``gamma`` passes ``GAMMA_CAP``: the Lyapunov
    inequality then holds on the whole space.
    """
    n = sys.nvars
    fr = _frame(V, start, cfg)
    Vz = fr.into(V)
    fixed = -(lie_derivative(Vz, fr.system(sys)) + fr.into(cfg.l2_for(n)))
    basis = monomial_basis(n, *cfg.deg_s0)
    cnt = _Counter()

    def feas(g):
        return _feasible_multiplier(fixed, Vz - g, basis, cnt)

    step = 2.0 * cfg.gamma_bisect_tol if warm else 1.0
    lo, s_lo, unbounded = _maximize(feas, start, cfg.gamma_bisect_tol, GAMMA_CAP, GAMMA_FLOOR, step)
    if lo is None:
        raise InfeasibleAtZero(f"no SOS multiplier s0 certifies any sublevel set down to gamma={GAMMA_FLOOR:g}")
    if not unbounded:
        lo, s_lo = _back_off(feas, lo, s_lo, cfg.backoff)
    return GammaResult(lo, fr.out(s_lo), unbounded, cnt.sdps, cnt.iters)


@dataclass
class BetaResult:
    betas: list
    multipliers: list
    sdp_count: int = 0
    sdp_iterations: int = 0


def beta_step(
    V: Polynomial,
    gamma: float,
    shapes: list,
    cfg: IterationConfig,
    previous: list | None = None,
) -> BetaResult:
    """Largest ``beta_i`` for each shape, solved shape by shape.

    Each bisection is seeded with ``previous[i]`` when that value is still
    feasible for the current ``V``; otherwise it starts over from scratch.
    """
    n = V.nvars
    fr = _frame(V, gamma, cfg)
    fixed = -(fr.into(V) - gamma)
    basis = monomial_basis(n, *cfg.deg_si)
    cnt = _Counter()
    betas, mults = [], []
    for i, sf in enumerate(shapes):
        vc = float(V(sf.center))
        if vc >= gamma:
            raise ShapeInfeasible(i, vc, gamma)
        pz = fr.into(as_polynomial(sf))

        def feas(b):
            return _feasible_multiplier(fixed, pz - b, basis, cnt)

        seed = previous[i] if previous is not None and i < len(previous) else 0.0
        if seed > 0:
            lo, s_lo, _ = _maximize(feas, seed, cfg.beta_bisect_tol, np.inf, 1e-12, 2.0 * cfg.beta_bisect_tol)
        else:
            lo, s_lo, _ = _maximize(feas, 1.0, cfg.beta_bisect_tol, np.inf, 1e-12)
        if lo is None:
            ok, s_lo = feas(0.0)
            if not ok:
                raise ShapeInfeasible(i, vc, gamma)
            lo = 0.0
        elif lo > 0:
            lo, s_lo = _back_off(feas, lo, s_lo, cfg.backoff)
        betas.append(lo)
        mults.append(fr.out(s_lo))
    return BetaResult(betas, mults, cnt.sdps, cnt.iters)


def v_step(
    sys: DynamicalSystem,
    gamma: float,
    s0: Polynomial,
    shapes: list,
    betas: list,
    multipliers: list,
    cfg: IterationConfig,
    V_ref: Polynomial | None = None,
) -> tuple[Polynomial, Feasibility]:
    """Find a new ``V`` feasible for all constraints with multipliers fixed.

    ``V = l1 + Z' Q Z`` with ``Z`` the monomials of degree 1..deg_V/2, so
    ``V - l1`` is SOS and ``V(0) = 0`` by construction.  ``V_ref`` (usually
    the current ``V``) only chooses the scaling of the variables.
    """
    n = sys.nvars
    fr = _frame(V_ref, gamma, cfg) if V_ref is not None else Frame.identity(n)
    sz = fr.system(sys)
    l1, l2 = fr.into(cfg.l1_for(n)), fr.into(cfg.l2_for(n))
    s0 = fr.into(s0)
    QV = GramVariable(monomial_basis(n, 2, cfg.deg_V), "QV")
    cons = []
    fixed = -lie_derivative(l1, sz) - l2 + (l1 - gamma) * s0
    cons.append(sos_constraint(fixed, [(QV, Sum(LieDerivative(sz, -1.0), Multiply(s0)))], "C0")[:2])
    for i, (sf, b, s) in enumerate(zip(shapes, betas, multipliers)):
        p = fr.into(as_polynomial(sf))
        fixed_i = -l1 + gamma + (p - b) * fr.into(s)
        cons.append(sos_constraint(fixed_i, [(QV, Multiply(-1.0, n))], f"C{i + 1}")[:2])
    f, _ = _solve(cons)
    if not f.ok:
        raise VStepInfeasible(f"V step infeasible ({f.status})")
    return cfg.l1_for(n) + fr.out(extract_poly(f.grams, QV)), f


# ---------------------------------------------------------------------------
# replay

@dataclass
class ReplayReport:
    feasible: bool
    residuals: dict
    statuses: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def certificate_conditions(cert: Certificate, sys: DynamicalSystem, multipliers: bool = True) -> list:
    """``(name, polynomial)`` pairs that must all be SOS."""
    out = [
        ("V-l1", cert.V - cert.l1),
        ("lyapunov", -(lie_derivative(cert.V, sys) + cert.l2) + (cert.V - cert.gamma) * cert.s0),
    ]
    for i, (sf, b, s) in enumerate(cert.shapes):
        out.append((f"shape{i + 1}", -(cert.V - cert.gamma) + (as_polynomial(sf) - b) * s))
    if multipliers:
        out.append(("s0", cert.s0))
        out += [(f"s{i + 1}", s) for i, (_, _, s) in enumerate(cert.shapes)]
    return out


def replay(cert: Certificate, sys: DynamicalSystem, multipliers: bool = True, rescale: bool = True) -> ReplayReport:
    """Re-solve for a slack Gram matrix of every certificate condition.

    Residuals are coefficient mismatches measured in the scaled variables
    (exactly equivalent, see :class:`Frame`).
    """
    fr = Frame.fit(cert.V, cert.gamma) if rescale else Frame.identity(sys.nvars)
    res, st = {}, {}
    ok_all = True
    for name, poly in certificate_conditions(cert, sys, multipliers):
        poly = fr.into(poly)
        if poly.is_zero():
            res[name], st[name] = 0.0, "Feasible"
            continue
        expr, target, _ = sos_constraint(poly, (), "C")
        try:
            asm = assemble([(expr, target)])
        except StructuralInfeasibility as e:
            res[name], st[name] = float("inf"), f"structural: {e}"
            ok_all = False
            continue
        sol = solve(asm.problem)
        st[name] = sol.status.value
        if sol.feasible:
            res[name] = match_residual(expr, target, sol.blocks)
        else:
            res[name] = float("inf")
            ok_all = False
    return ReplayReport(ok_all, res, st)


# ---------------------------------------------------------------------------
# rounds

@dataclass
class TraceRow:
    round_index: int
    iteration: int
    gamma: float
    betas: list
    sdp_count: int
    sdp_iterations: int
    wall_time: float


@dataclass
class RoundResult:
    V_final: Polynomial
    certificate: Certificate
    trace: list
    stop_reason: str
    shapes: list
    global_stability: bool = False


def _stalled(history: list, tol: float) -> bool:
    """Criterion B: no beta grew by more than ``tol`` (relative) twice running."""
    if len(history) < 3:
        return False
    for k in (-1, -2):
        cur, prev = history[k], history[k - 1]
        for b1, b0 in zip(cur, prev):
            if b1 - b0 > tol * max(abs(b0), 1e-12):
                return False
    return True


def run_round(
    sys: DynamicalSystem,
    shape_specs: list,
    cfg: IterationConfig,
    V_init: Polynomial,
    round_index: int = 0,
    replay_final: bool = True,
) -> RoundResult:
    """Iterate gamma/beta/V steps from ``V_init`` until a stopping rule fires.

    ``shape_specs`` may be :class:`ShapeSpec` (centers placed on the
    ``{V_init = gamma*}`` level set) or ready :class:`ShapeFunction` objects.
    An empty list runs the plain alternation without shape functions.
    """
    cfg.validate_for(sys)
    n = sys.nvars
    l1, l2 = cfg.l1_for(n), cfg.l2_for(n)
    t0 = time.perf_counter()
    g = gamma_step(V_init, sys, cfg)
    if g.unbounded:
        cert = Certificate(V_init, g.gamma, [], g.s0, round_index, 0, l1, l2, global_stability=True)
        row = TraceRow(round_index, 0, g.gamma, [], g.sdp_count, g.sdp_iterations, time.perf_counter() - t0)
        log.info("gamma unbounded: origin is globally asymptotically stable")
        return RoundResult(V_init, cert, [row], "global_stability", [], True)

    shapes = []
    for spec in shape_specs:
        if isinstance(spec, ShapeFunction):
            shapes.append(ShapeFunction(spec.N, spec.center, spec.beta))
        else:
            shapes.append(spec.build(V_init, g.gamma))

    V = V_init
    trace, history, certs = [], [], []
    prev_betas = [sf.beta for sf in shapes] if shapes else None
    stop = "max_iters"
    for it in range(1, cfg.max_iters + 1):
        t_it = time.perf_counter()
        try:
            if it > 1:
                # V was scaled by the last gamma, so the new one is near 1
                g = gamma_step(V, sys, cfg, warm=True)
                if g.unbounded:
                    stop = "global_stability"
                    break
            b = beta_step(V, g.gamma, shapes, cfg, prev_betas) if shapes else BetaResult([], [])
        except (InfeasibleAtZero, ShapeInfeasible) as e:
            if it == 1:
                raise
            # the latest V lost a shape center; keep the previous certificate
            log.info("round %d stopped at iteration %d: %s", round_index, it, e)
            stop = "shape_infeasible" if isinstance(e, ShapeInfeasible) else "gamma_infeasible"
            break
        for sf, beta in zip(shapes, b.betas):
            sf.beta = beta
        cert = Certificate(
            V, g.gamma,
            [(ShapeFunction(sf.N, sf.center, beta), beta, s) for sf, beta, s in zip(shapes, b.betas, b.multipliers)],
            g.s0, round_index, it, l1, l2,
        )
        certs.append(cert)
        history.append(list(b.betas))
        prev_betas = list(b.betas)
        row = TraceRow(
            round_index, it, g.gamma, list(b.betas),
            g.sdp_count + b.sdp_count, g.sdp_iterations + b.sdp_iterations, 0.0,
        )
        trace.append(row)
        log.debug("round %d iter %d gamma=%.6g betas=%s", round_index, it, g.gamma, b.betas)
        if shapes and _stalled(history, cfg.beta_stall_tol):
            stop = "beta_stalled"
            row.wall_time = time.perf_counter() - t_it
            break
        if it == cfg.max_iters:
            row.wall_time = time.perf_counter() - t_it
            break
        try:
            V_new, f = v_step(sys, g.gamma, g.s0, shapes, b.betas, b.multipliers, cfg, V_ref=V)
        except VStepInfeasible:
            stop = "v_step_infeasible"
            row.wall_time = time.perf_counter() - t_it
            break
        row.sdp_count += 1
        row.sdp_iterations += f.iterations
        V = V_new / g.gamma
        row.wall_time = time.perf_counter() - t_it

    final = certs[-1]
    if replay_final:
        for c in reversed(certs):
            if replay(c, sys).feasible:
                final = c
                break
            log.warning("certificate from iteration %d failed replay", c.iter_index)
        else:
            raise RuntimeError("no certificate of this round passed replay")
    return RoundResult(final.V / final.gamma, final, trace, stop, shapes)


@dataclass
class MultiRoundResult:
    rounds: list

    @property
    def certificate(self) -> Certificate:
        return self.rounds[-1].certificate

    @property
    def trace(self) -> list:
        return [row for r in self.rounds for row in r.trace]


def run_multiround(
    sys: DynamicalSystem,
    rounds: list,
    cfg: IterationConfig,
    Q=None,
    V_init: Polynomial | None = None,
) -> MultiRoundResult:
    """Chain rounds, each starting from the previous round's scaled ``V``."""
    if not rounds:
        raise ConfigError("at least one round is required")
    cfg.validate_for(sys)
    first = rounds[0]
    if V_init is None:
        init = getattr(first, "initial_V", "lyapunov_equation")
        V_init = initial_candidate(sys, Q) if isinstance(init, str) else init
    out = []
    V = V_init
    for k, rc in enumerate(rounds):
        specs = rc.shapes if hasattr(rc, "shapes") else rc
        r = run_round(sys, specs, cfg, V, round_index=k + 1)
        out.append(r)
        if r.global_stability:
            break
        V = r.V_final
    return MultiRoundResult(out)


def trace_csv(trace: list, include_time: bool = False) -> str:
    """One row per iteration; beta columns padded to the widest round."""
    width = max((len(r.betas) for r in trace), default=0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["round", "iter", "gamma"] + [f"beta{k + 1}" for k in range(width)] + ["sdp_count", "sdp_iterations"]
    if include_time:
        head.append("wall_time")
    w.writerow(head)
    for r in trace:
        row = [r.round_index, r.iteration, repr(float(r.gamma))]
        row += [repr(float(b)) for b in r.betas] + [""] * (width - len(r.betas))
        row += [r.sdp_count, r.sdp_iterations]
        if include_time:
            row.append(f"{r.wall_time:.3f}")
        w.writerow(row)
    return buf.getvalue()


def shapes_from_specs(specs: list, V: Polynomial, gamma: float) -> list:
    return [s.build(V, gamma) if isinstance(s, ShapeSpec) else s for s in specs]


__all__ = [
    "IterationConfig", "Certificate", "gamma_step", "beta_step", "v_step", "run_round",
    "run_multiround", "replay", "trace_csv", "ConfigError", "InfeasibleAtZero",
    "ShapeInfeasible", "VStepInfeasible", "GammaResult", "BetaResult", "RoundResult",
    "MultiRoundResult", "extract", "replace",
]
