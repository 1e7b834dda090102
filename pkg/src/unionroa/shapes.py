"""Shape functions and the placement of their centers.

A shape function is ``p(x) = (x - c)^T N (x - c)`` with ``N`` positive
definite.  Shifted centers are placed on a ray from the origin at a fraction
``sigma`` of the distance to the first crossing of the level set
``{V = gamma}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import Polynomial

BOX = 1e3


class NoIntersection(ValueError):
    """The ray leaves the search box without reaching the level set."""


@dataclass
class ShapeFunction:
    N: np.ndarray
    center: np.ndarray
    beta: float = 0.0

    def __post_init__(self):
        self.N = np.atleast_2d(np.asarray(self.N, dtype=float))
        self.center = np.asarray(self.center, dtype=float).reshape(-1)
        n = self.N.shape[0]
        if self.N.shape != (n, n) or self.center.shape != (n,):
            raise ValueError("shape matrix and center dimensions disagree")
        if not np.allclose(self.N, self.N.T):
            raise ValueError("shape matrix must be symmetric")
        if np.linalg.eigvalsh(self.N)[0] <= 0:
            raise ValueError("shape matrix must be positive definite")

    @classmethod
    def at_origin(cls, N) -> "ShapeFunction":
        N = np.atleast_2d(np.asarray(N, dtype=float))
        return cls(N, np.zeros(N.shape[0]))

    @property
    def nvars(self) -> int:
        return self.N.shape[0]

    def as_polynomial(self) -> Polynomial:
        return as_polynomial(self)

    def __call__(self, x):
        d = np.atleast_2d(np.asarray(x, dtype=float)) - self.center
        v = np.einsum("ij,jk,ik->i", d, self.N, d)
        return float(v[0]) if np.ndim(x) == 1 else v


def as_polynomial(sf: ShapeFunction) -> Polynomial:
    return Polynomial.quadratic_form(sf.N, sf.center)


@dataclass(frozen=True)
class RaySpec:
    """Direction from the origin, angles in degrees.

    In 2-D only ``theta`` (inclination) is used.  In 3-D ``theta`` is the
    elevation and ``psi`` the azimuth.
    """

    theta: float
    psi: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.theta) or (self.psi is not None and not np.isfinite(self.psi)):
            raise ValueError("ray angles must be finite")

    def direction(self, nvars: int = 2) -> np.ndarray:
        t = np.deg2rad(self.theta)
        if nvars == 2:
            return np.array([np.cos(t), np.sin(t)])
        if nvars == 3:
            p = np.deg2rad(self.psi or 0.0)
            return np.array([np.cos(t) * np.cos(p), np.cos(t) * np.sin(p), np.sin(t)])
        raise ValueError("rays are defined for 2 or 3 state variables")


def ray_level_intersection(
    V: Polynomial, gamma: float, ray: RaySpec, box: float = BOX, max_bisect: int = 200
) -> np.ndarray:
    """First point ``r u`` (``r > 0``) on the ray with ``V(r u) = gamma``.

    ``ray`` is a :class:`RaySpec` or a unit direction vector.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if isinstance(ray, RaySpec):
        u = ray.direction(V.nvars)
    else:
        u = np.asarray(ray, dtype=float)
        u = u / np.linalg.norm(u)
    # V restricted to the ray is a univariate polynomial in r
    coeffs: dict = {}
    for m, c in V.items():
        d = sum(m)
        coeffs[d] = coeffs.get(d, 0.0) + c * float(np.prod(u ** np.array(m)))
    deg = max(coeffs) if coeffs else 0
    poly = np.zeros(deg + 1)
    for d, c in coeffs.items():
        poly[d] = c

    def g(r):
        return np.polynomial.polynomial.polyval(r, poly) - gamma

    a2 = poly[2] if deg >= 2 else 0.0
    guess = np.sqrt(gamma / a2) if a2 > 0 else 1.0
    step = 0.01 * guess
    r_max = box * np.sqrt(V.nvars)
    lo = 0.0
    hi = step
    while g(hi) < 0:
        lo = hi
        hi += step
        if hi > r_max:
            raise NoIntersection(
                f"V stays below {gamma:g} along {ray} inside the box"
            )
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
        if abs(g(hi)) <= 1e-12 or hi - lo <= 1e-15 * max(1.0, hi):
            break
    r = hi if abs(g(hi)) <= abs(g(lo)) else lo
    return r * u


def shifting_center(x_int, sigma: float) -> np.ndarray:
    """Center at fraction ``sigma`` of the way to the boundary point."""
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie strictly between 0 and 1")
    x_int = np.asarray(x_int, dtype=float)
    rho = np.linalg.norm(x_int)
    if rho == 0.0:
        return np.zeros_like(x_int)
    return sigma * rho * (x_int / rho)


# vertices then face centers of a cube around the origin, as (psi, theta)
_CUBOID = (
    (-45, -35), (-45, 35), (-135, -35), (-135, 35),
    (45, -35), (45, 35), (135, -35), (135, 35),
    (0, 0), (90, 0), (180, 0), (-90, 0), (0, 90), (0, -90),
)


def cuboid_angles() -> list[RaySpec]:
    return [RaySpec(theta=float(t), psi=float(p)) for p, t in _CUBOID]


@dataclass
class ShapeSpec:
    """Config-level description of one shape function in a round."""

    N: np.ndarray
    center_mode: str = "ray"  # "origin" | "ray"
    theta_deg: float | None = None
    psi_deg: float | None = None
    sigma: float = 0.8

    def __post_init__(self):
        self.N = np.atleast_2d(np.asarray(self.N, dtype=float))
        if self.center_mode not in ("origin", "ray"):
            raise ValueError(f"unknown center_mode {self.center_mode!r}")
        if self.center_mode == "ray" and self.theta_deg is None:
            raise ValueError("ray-centered shape needs theta_deg")

    def ray(self) -> RaySpec:
        return RaySpec(self.theta_deg, self.psi_deg)

    def build(self, V: Polynomial, gamma: float) -> ShapeFunction:
        if self.center_mode == "origin":
            return ShapeFunction.at_origin(self.N)
        x_int = ray_level_intersection(V, gamma, self.ray())
        return ShapeFunction(self.N, shifting_center(x_int, self.sigma))

    def to_dict(self) -> dict:
        d = {"center_mode": self.center_mode, "N": self.N.tolist(), "sigma": self.sigma}
        if self.theta_deg is not None:
            d["theta_deg"] = self.theta_deg
        if self.psi_deg is not None:
            d["psi_deg"] = self.psi_deg
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ShapeSpec":
        known = {"N", "center_mode", "theta_deg", "psi_deg", "sigma"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown shape fields: {sorted(unknown)}")
        return cls(
            N=d["N"],
            center_mode=d.get("center_mode", "ray"),
            theta_deg=d.get("theta_deg"),
            psi_deg=d.get("psi_deg"),
            sigma=d.get("sigma", 0.8),
        )
