"""Versioned JSON run configuration.

Minimal example::

    {"version": 1, "system": "vdp"}

Full form::

    {
      "version": 1,
      "system": {"name": "mine", "f": ["-x1 + x2^2", "-x2"]},
      "rounds": [{"shapes": [{"center_mode": "ray", "theta_deg": 60,
                              "N": [[1, 0], [0, 0.5]], "sigma": 0.8}]}],
      "iteration": {"deg_V": 6, "deg_s0": [2, 4], "deg_si": [0, 4],
                    "max_iters": 100},
      "box": [[-3, 3], [-3, 3]],
      "seed": 0
    }

A round with an empty ``shapes`` list runs without shape functions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bench
from .poly import DynamicalSystem, PolynomialSyntaxError, format_polynomial, parse_polynomial
from .shapes import ShapeSpec
from .vsiter import ConfigError, IterationConfig

CONFIG_VERSION = 1
_TOP = {"version", "system", "rounds", "iteration", "box", "seed"}
_ITER = {
    "deg_V", "deg_s0", "deg_si", "l_eps", "gamma_bisect_tol", "beta_bisect_tol",
    "beta_stall_tol", "max_iters", "backoff", "rescale",
}


@dataclass
class Round:
    shapes: list
    initial_V: object = "lyapunov_equation"

    def to_dict(self, nvars: int) -> dict:
        d = {"shapes": [s.to_dict() for s in self.shapes]}
        if not isinstance(self.initial_V, str):
            d["initial_V"] = {"polynomial": format_polynomial(self.initial_V)}
        return d


@dataclass
class RunConfig:
    system: DynamicalSystem
    rounds: list
    iteration: IterationConfig
    preset: str | None = None
    box: np.ndarray | None = None
    seed: int = 0
    iteration_overrides: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"version": CONFIG_VERSION}
        if self.preset is not None:
            d["system"] = self.preset
        else:
            d["system"] = {"name": self.system.name, "f": self.system.to_strings()}
        d["rounds"] = [r.to_dict(self.system.nvars) for r in self.rounds]
        d["iteration"] = self.iteration.to_dict()
        if self.box is not None:
            d["box"] = np.asarray(self.box, dtype=float).tolist()
        d["seed"] = self.seed
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def __eq__(self, other) -> bool:
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()


def _err(path: str, msg: str) -> ConfigError:
    return ConfigError(f"{path}: {msg}")


def _parse_system(d, path="system"):
    if isinstance(d, str):
        try:
            p = bench.get(d)
        except KeyError as e:
            raise _err(path, e.args[0]) from None
        return p.system, d, p
    if not isinstance(d, dict) or "f" not in d:
        raise _err(path, "expected a preset name or an object with 'f'")
    extra = set(d) - {"name", "f"}
    if extra:
        raise _err(path, f"unknown fields {sorted(extra)}")
    f = d["f"]
    if not isinstance(f, list) or not f:
        raise _err(f"{path}.f", "expected a non-empty list of polynomials")
    try:
        sys = DynamicalSystem(tuple(parse_polynomial(t, len(f)) for t in f), d.get("name", "custom"))
    except (PolynomialSyntaxError, ValueError) as e:
        raise _err(f"{path}.f", str(e)) from None
    return sys, None, None


def _parse_round(d, nvars, path):
    if not isinstance(d, dict):
        raise _err(path, "expected an object")
    extra = set(d) - {"shapes", "initial_V"}
    if extra:
        raise _err(path, f"unknown fields {sorted(extra)}")
    shapes = []
    for k, s in enumerate(d.get("shapes", [])):
        sp = f"{path}.shapes[{k}]"
        try:
            spec = ShapeSpec.from_dict(s)
        except (KeyError, TypeError, ValueError) as e:
            raise _err(sp, str(e)) from None
        if spec.N.shape != (nvars, nvars):
            raise _err(f"{sp}.N", f"expected a {nvars}x{nvars} matrix")
        if nvars == 3 and spec.center_mode == "ray" and spec.psi_deg is None:
            raise _err(sp, "3-D rays need psi_deg")
        shapes.append(spec)
    init = d.get("initial_V", "lyapunov_equation")
    if isinstance(init, dict):
        try:
            init = parse_polynomial(init["polynomial"], nvars)
        except (KeyError, PolynomialSyntaxError, ValueError) as e:
            raise _err(f"{path}.initial_V", str(e)) from None
    elif init != "lyapunov_equation":
        raise _err(f"{path}.initial_V", "expected 'lyapunov_equation' or {'polynomial': ...}")
    return Round(shapes, init)


def from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("config: expected a JSON object")
    extra = set(d) - _TOP
    if extra:
        raise ConfigError(f"config: unknown fields {sorted(extra)}")
    if d.get("version") != CONFIG_VERSION:
        raise _err("version", f"expected {CONFIG_VERSION}, found {d.get('version')!r}")
    if "system" not in d:
        raise _err("system", "missing")
    sys, preset_name, preset = _parse_system(d["system"])
    n = sys.nvars

    if "rounds" in d:
        if not isinstance(d["rounds"], list) or not d["rounds"]:
            raise _err("rounds", "expected a non-empty list")
        rounds = [_parse_round(r, n, f"rounds[{k}]") for k, r in enumerate(d["rounds"])]
    elif preset is not None:
        rounds = [Round(list(r.shapes), r.initial_V) for r in preset.rounds]
    else:
        raise _err("rounds", "required for an inline system")

    it = d.get("iteration", {})
    if not isinstance(it, dict):
        raise _err("iteration", "expected an object")
    extra = set(it) - _ITER
    if extra:
        raise _err("iteration", f"unknown fields {sorted(extra)}")
    kw = dict(it)
    for key in ("deg_s0", "deg_si"):
        if key in kw:
            kw[key] = tuple(kw[key])
    try:
        cfg = IterationConfig(**kw)
        cfg.validate_for(sys)
    except (ConfigError, TypeError) as e:
        raise _err("iteration", str(e)) from None

    box = d.get("box")
    if box is not None:
        box = np.asarray(box, dtype=float)
        if box.shape != (n, 2) or np.any(box[:, 0] >= box[:, 1]):
            raise _err("box", f"expected {n} increasing [lo, hi] pairs")
    elif preset is not None:
        box = preset.box
    seed = d.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise _err("seed", "expected an integer")
    return RunConfig(sys, rounds, cfg, preset_name, box, seed, dict(it))


def loads(text: str) -> RunConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config: invalid JSON ({e})") from None
    return from_dict(d)


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"config: cannot read {path} ({e.strerror})") from None
    return loads(text)


def preset_config(name: str) -> RunConfig:
    return from_dict({"version": CONFIG_VERSION, "system": name})
