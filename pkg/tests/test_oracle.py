import math

import numpy as np
import pytest

from rosette import potential as pc
from rosette.bifurcation import count_configurations
from rosette.errors import CollisionError, DomainError
from rosette.oracle import PlanarConfiguration, build_configuration, check_central, newtonian
from rosette.potential import RosetteParams


def reduced_potential(x, params):
    """Potential per (n m1)^2 for inner radius 1, from the polygon constants and the cross sum."""
    n, eps, mu = params.n, params.epsilon, params.mu
    k = pc.polygon_potential(n)
    u = pc.angle_table(n).u
    cross = np.sum(1.0 / np.sqrt(1 + x * x - 2 * x * u))
    return (mu / n) * (1 + eps / x) + k * (1 + eps**2 / x) + eps * cross / n


def test_five_body_construction():
    cfg = build_configuration(1.0, RosetteParams(2, 0.5, 1.0))
    expected = np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    np.testing.assert_allclose(cfg.positions, expected, atol=1e-15)
    np.testing.assert_array_equal(cfg.masses, [1.0, 1.0, 1.0, 0.5, 0.5])


def test_center_of_mass_and_inertia():
    for n in (2, 3, 7):
        p = RosetteParams(n, 0.3, 2.0)
        cfg = build_configuration(1.7, p, r1=0.8)
        assert np.all(np.abs(cfg.center_of_mass) < 1e-14)
        _, _, inertia = newtonian(cfg)
        assert inertia == pytest.approx(n * (0.8**2 + 0.3 * (1.7 * 0.8) ** 2), rel=1e-14)


def test_two_unit_masses():
    cfg = PlanarConfiguration(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([1.0, 1.0]), 1)
    U, grad, _ = newtonian(cfg)
    assert U == 1.0
    np.testing.assert_allclose(grad, [[1.0, 0.0], [-1.0, 0.0]])


@pytest.mark.parametrize("n", [2, 3, 5, 12])
def test_potential_matches_reduced_form(n, rng):
    for _ in range(10):
        p = RosetteParams(n, float(rng.uniform(0.1, 3)), float(rng.uniform(0, 4)))
        x = float(rng.uniform(0.2, 4))
        U, _, _ = newtonian(build_configuration(x, p))
        assert U == pytest.approx(n**2 * reduced_potential(x, p), rel=1e-12)


def test_gradient_matches_finite_differences(rng):
    for trial in range(20):
        count = int(rng.integers(2, 8))
        q = rng.normal(size=(count, 2))
        if trial % 4 == 0:
            q[1] = q[0] + 1e-3 * rng.normal(size=2)  # near collision
        m = rng.uniform(0.1, 2, size=count)
        cfg = PlanarConfiguration(q, m, 0)
        _, grad, _ = newtonian(cfg)
        step = 1e-5 * min(np.linalg.norm(q[i] - q[j]) for i in range(count) for j in range(i))
        for i in range(count):
            for c in range(2):
                dq = np.zeros_like(q)
                dq[i, c] = step
                up = newtonian(PlanarConfiguration(q + dq, m, 0))[0]
                dn = newtonian(PlanarConfiguration(q - dq, m, 0))[0]
                fd = (up - dn) / (2 * step)
                assert fd == pytest.approx(grad[i, c], rel=1e-6, abs=1e-6 * np.abs(grad).max())


def test_homogeneity_and_rotation():
    p = RosetteParams(4, 0.6, 0.7)
    cfg = build_configuration(1.3, p)
    U, grad, inertia = newtonian(cfg)
    U2, grad2, inertia2 = newtonian(cfg.scaled(2.5))
    assert U2 == pytest.approx(U / 2.5, rel=1e-14)
    assert inertia2 == pytest.approx(inertia * 2.5**2, rel=1e-14)
    np.testing.assert_allclose(grad2, grad / 2.5**2, rtol=1e-12, atol=1e-14)
    U3, grad3, _ = newtonian(cfg.rotated(0.7))
    assert U3 == pytest.approx(U, rel=1e-13)
    c, s = math.cos(0.7), math.sin(0.7)
    np.testing.assert_allclose(grad3, grad @ np.array([[c, -s], [s, c]]).T, atol=1e-12)


def test_collision_and_domain():
    cfg = PlanarConfiguration(np.zeros((2, 2)), np.ones(2), 1)
    with pytest.raises(CollisionError):
        newtonian(cfg)
    with pytest.raises(DomainError):
        build_configuration(0.0, RosetteParams(3, 0.5, 1.0))


def test_roots_are_central():
    for p in [RosetteParams(3, 1.0, 0.001), RosetteParams(5, 0.3, 1e-3), RosetteParams(4, 2.0, 0.5),
              RosetteParams(2, 0.7, 0.0)]:
        for x in count_configurations(p).roots.xs:
            for r1 in (1.0, 0.3):
                res = check_central(x, p, r1)
                assert res.max_relative_residual < 1e-10
                assert res.lambda_fit < 0


def test_symmetric_equal_mass_is_central():
    for n in (3, 4, 9):
        assert check_central(1.0, RosetteParams(n, 1.0, 0.2)).max_relative_residual < 1e-12


def test_negative_control():
    assert check_central(0.5, RosetteParams(5, 0.5, 1.0)).max_relative_residual > 1e-3


def test_oracle_agrees_with_residual(rng):
    # off-root points fail the oracle; points on roots pass it
    for _ in range(100):
        n = int(rng.integers(2, 9))
        p = RosetteParams(n, float(rng.uniform(0.1, 0.95)), float(rng.uniform(0, 3)))
        x = float(rng.uniform(0.1, 3))
        if abs(x - 1) < 0.02:
            continue
        scale = p.mu / n + pc.polygon_potential(n) + 1
        if abs(pc.shape_residual(x, p)) > 1e-3 * scale:
            assert check_central(x, p).max_relative_residual > 1e-8
