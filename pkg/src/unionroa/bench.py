"""The four benchmark systems and their round configurations."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .poly import DynamicalSystem
from .shapes import ShapeSpec, cuboid_angles


@dataclass
class RoundConfig:
    """One round of the alternation.

    ``initial_V`` is ``"lyapunov_equation"`` or an explicit polynomial; later
    rounds of a multi-round run ignore it and start from the previous result.
    """

    shapes: list
    initial_V: object = "lyapunov_equation"

    def __post_init__(self):
        if not self.shapes:
            raise ValueError("a round needs at least one shape function")

    def to_dict(self) -> dict:
        d = {"shapes": [s.to_dict() for s in self.shapes]}
        if isinstance(self.initial_V, str):
            d["initial_V"] = self.initial_V
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RoundConfig":
        return cls([ShapeSpec.from_dict(s) for s in d["shapes"]], d.get("initial_V", "lyapunov_equation"))


@dataclass
class BenchmarkPreset:
    name: str
    system: DynamicalSystem
    rounds: list
    box: np.ndarray
    notes: dict = field(default_factory=dict)
    summary: str = ""

    def copy(self) -> "BenchmarkPreset":
        return copy.deepcopy(self)


def _ray_round(thetas, Ns, sigma=0.8):
    return RoundConfig([ShapeSpec(N, "ray", theta_deg=t, sigma=sigma) for t, N in zip(thetas, Ns)])


def _vdp() -> BenchmarkPreset:
    sys = DynamicalSystem.from_strings(["-x2", "x1 + 5*x1^2*x2 - 5*x2"], "vdp")
    N = [[1, 0], [0, 0.5]]
    rounds = [_ray_round([60, 209, 260], [N] * 3) for _ in range(3)]
    return BenchmarkPreset(
        "vdp", sys, rounds, np.array([[-3.0, 3.0], [-3.0, 3.0]]),
        {"equilibria": [[0.0, 0.0]], "roa": "bounded by an unstable limit cycle"},
        "Van der Pol oscillator in reverse time (mu=5)",
    )


def _ex2() -> BenchmarkPreset:
    sys = DynamicalSystem.from_strings(["-4*x1^3 + 6*x1^2 - 2*x1", "-2*x2"], "ex2")
    A = [[5, 0], [0, 0.3]]
    B = [[0.5, 0], [0, 1]]
    th = [132, 183, 234]
    rounds = [_ray_round(th, [A, A, A]), _ray_round(th, [B, B, B]), _ray_round(th, [B, A, B])]
    return BenchmarkPreset(
        "ex2", sys, rounds, np.array([[-4.0, 2.0], [-3.0, 3.0]]),
        {"equilibria": [[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]], "saddle": [0.5, 0.0], "other_sink": [1.0, 0.0]},
        "decoupled bistable system, sinks (0,0),(1,0), saddle (0.5,0)",
    )


def _ex3() -> BenchmarkPreset:
    sys = DynamicalSystem.from_strings(
        ["-50*x1 - 16*x2 + 13.8*x1*x2", "13*x1 - 9*x2 + 5.5*x1*x2"], "ex3"
    )
    r1 = _ray_round([183, 183, 285], [[[15, 0], [0, 0.3]], [[14.47, 18.55], [18.55, 26.53]], [[0.5, 0], [0, 12]]])
    r2 = _ray_round([178, 236], [[[1, 0], [0, 1]], [[0.3, 0], [0, 1]]])
    # the listed saddle is rounded; Newton refinement gives the exact root
    saddle = refine_root(sys, [1.45, 18.17])
    return BenchmarkPreset(
        "ex3", sys, [r1, r2], np.array([[-8.0, 2.0], [-25.0, 20.0]]),
        {"saddle": [1.45, 18.17], "saddle_refined": saddle.tolist()},
        "coupled quadratic system, saddle near (1.45, 18.17)",
    )


def _ex4() -> BenchmarkPreset:
    sys = DynamicalSystem.from_strings(
        [
            "x2 + x3^2",
            "x3 - x1^2 - x1*(x1 - 0.16666666666666666*x1^3)",
            "-x1 - 2*x2 - x3 + x2^3 + 0.1*(0.6666666666666666*x3^3 + 0.4*x3^5)",
        ],
        "ex4",
    )
    N = np.diag([1.0, 0.5, 0.5])
    r1 = RoundConfig([ShapeSpec(N, "origin")])
    rays = cuboid_angles()
    r2 = RoundConfig([ShapeSpec(N, "ray", theta_deg=r.theta, psi_deg=r.psi) for r in rays])
    r3 = RoundConfig([ShapeSpec(N, "ray", theta_deg=r.theta, psi_deg=r.psi) for r in rays])
    return BenchmarkPreset(
        "ex4", sys, [r1, r2, r3], np.array([[-4.0, 4.0]] * 3),
        {"rounds_note": "round structure 1 / 14 / 14 shapes"},
        "third-order system with a quintic term",
    )


_PRESETS = {"vdp": _vdp, "ex2": _ex2, "ex3": _ex3, "ex4": _ex4}


def get(name: str) -> BenchmarkPreset:
    try:
        return _PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {sorted(_PRESETS)}") from None


def names() -> list[str]:
    return list(_PRESETS)


def list_presets() -> list[dict]:
    out = []
    for name in _PRESETS:
        p = get(name)
        out.append(
            {"name": name, "nvars": p.system.nvars, "rounds": len(p.rounds), "summary": p.summary}
        )
    return out


def refine_root(sys: DynamicalSystem, x0, tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """Newton refinement of an equilibrium guess."""
    x = np.asarray(x0, dtype=float).copy()
    J = [[fk.diff(j) for j in range(sys.nvars)] for fk in sys.f]
    for _ in range(max_iter):
        F = sys(x)
        if np.linalg.norm(F) <= tol:
            break
        Jx = np.array([[J[k][j](x) for j in range(sys.nvars)] for k in range(sys.nvars)])
        x = x - np.linalg.solve(Jx, F)
    return x
