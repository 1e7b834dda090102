import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unionroa import bench
from unionroa.lyap import initial_candidate
from unionroa.poly import Polynomial
from unionroa.shapes import (
    NoIntersection,
    RaySpec,
    ShapeFunction,
    ShapeSpec,
    as_polynomial,
    cuboid_angles,
    ray_level_intersection,
    shifting_center,
)

x1, x2 = Polynomial.variables(2)


def test_as_polynomial():
    assert as_polynomial(ShapeFunction.at_origin(np.eye(2))) == x1**2 + x2**2
    N = [[1.0, 0.0], [0.0, 0.5]]
    assert as_polynomial(ShapeFunction.at_origin(N)) == x1**2 + 0.5 * x2**2
    p = as_polynomial(ShapeFunction(np.eye(2), [1.0, 0.0]))
    assert p.allclose(x1**2 - 2 * x1 + 1 + x2**2)
    assert p(np.array([1.0, 0.0])) == 0.0


def test_shape_validation():
    with pytest.raises(ValueError):
        ShapeFunction(np.array([[1.0, 0.0], [0.0, -1.0]]), [0, 0])
    with pytest.raises(ValueError):
        ShapeFunction(np.array([[1.0, 0.2], [0.0, 1.0]]), [0, 0])
    with pytest.raises(ValueError):
        ShapeFunction(np.eye(2), [0, 0, 0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_shape_positive_away_from_center(seed):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(2, 2))
    sf = ShapeFunction(B @ B.T + 0.05 * np.eye(2), rng.normal(size=2))
    p = sf.as_polynomial()
    X = rng.normal(size=(200, 2)) * 3
    assert abs(p(sf.center)) < 1e-12
    assert np.all(p(X) > 0)
    assert np.allclose(p(X), sf(X))


def test_ray_unit_circle():
    x = ray_level_intersection(x1**2 + x2**2, 1.0, RaySpec(60.0))
    assert np.allclose(x, [0.5, np.sqrt(3) / 2], atol=1e-10)


def test_ray_axis():
    x = ray_level_intersection(x1**2 + 0.5 * x2**2, 1.0, RaySpec(90.0))
    assert np.allclose(x, [0.0, np.sqrt(2)], atol=1e-10)


def test_ray_vdp_against_dense_grid():
    V0 = initial_candidate(bench.get("vdp").system)
    ray = RaySpec(209.0)
    x = ray_level_intersection(V0, 1.0, ray)
    assert abs(V0(x) - 1.0) <= 1e-10
    # oracle: first sign change of V(r u) - 1 on a fine r-grid
    u = ray.direction()
    r = np.linspace(0, 5, 500_001)
    g = V0(np.outer(r, u)) - 1.0
    k = np.argmax(g >= 0)
    assert abs(np.linalg.norm(x) - r[k]) <= 2e-5


def test_ray_takes_first_crossing():
    # V along the x1 axis rises to 1 at r=1, dips, then grows again
    V = x1**2 * (x1 - 2) ** 2 + x2**2
    x = ray_level_intersection(V, 0.5, [1.0, 0.0])
    assert x[0] < 1.0 and abs(V(x) - 0.5) < 1e-10


def test_ray_unbounded_direction():
    with pytest.raises(NoIntersection):
        ray_level_intersection(x2**2, 1.0, RaySpec(0.0))
    with pytest.raises(ValueError):
        ray_level_intersection(x1**2, 0.0, RaySpec(0.0))


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 360), st.floats(0.1, 10))
def test_ray_lands_on_level(theta, gamma):
    V = 2 * x1**2 + x1 * x2 + x2**2 + x1**4
    x = ray_level_intersection(V, gamma, RaySpec(theta))
    assert abs(V(x) - gamma) <= 1e-9 * max(1.0, gamma)


def test_shifting_center():
    c = shifting_center([0.5, np.sqrt(3) / 2], 0.8)
    assert np.allclose(c, [0.4, 0.4 * np.sqrt(3)])
    assert np.allclose(shifting_center([2.0, 0.0], 0.5), [1.0, 0.0])
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            shifting_center([1.0, 0.0], bad)


def test_shifting_center_3d():
    ray = RaySpec(theta=35.0, psi=-45.0)
    t, p = np.deg2rad(35.0), np.deg2rad(-45.0)
    expected = 0.8 * np.array([np.cos(t) * np.cos(p), np.cos(t) * np.sin(p), np.sin(t)])
    V = sum(xi * xi for xi in Polynomial.variables(3))
    assert np.allclose(shifting_center(ray_level_intersection(V, 1.0, ray), 0.8), expected)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=3), st.floats(0.01, 0.99))
def test_center_norm(x, sigma):
    assert np.isclose(np.linalg.norm(shifting_center(x, sigma)), sigma * np.linalg.norm(x))


def test_cuboid_angles():
    rays = cuboid_angles()
    assert len(rays) == 14
    assert (rays[0].psi, rays[0].theta) == (-45.0, -35.0)
    assert (rays[12].psi, rays[12].theta) == (0.0, 90.0)
    dirs = np.array([r.direction(3) for r in rays])
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
    # six face centers are the coordinate axes
    faces = dirs[8:]
    assert np.allclose(np.sort(np.abs(faces).max(axis=1)), 1.0)


def test_centers_inside_level_set():
    V0 = initial_candidate(bench.get("vdp").system)
    for theta in (60.0, 209.0, 260.0):
        sf = ShapeSpec(np.diag([1.0, 0.5]), "ray", theta).build(V0, 1.0)
        assert V0(sf.center) < 1.0


def test_shape_spec_roundtrip():
    s = ShapeSpec(np.diag([1.0, 0.5]), "ray", 60.0, sigma=0.7)
    t = ShapeSpec.from_dict(s.to_dict())
    assert np.array_equal(t.N, s.N) and t.theta_deg == 60.0 and t.sigma == 0.7
    with pytest.raises(ValueError):
        ShapeSpec.from_dict({"N": [[1]], "bogus": 1})
    with pytest.raises(ValueError):
        ShapeSpec(np.eye(2), "ray")
