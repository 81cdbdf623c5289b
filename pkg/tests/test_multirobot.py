import logging

import numpy as np
import pytest

from vfnav.fields import Goal, circle_normal_field, nav_field, plane_normal_field
from vfnav.multirobot import (NeighborState, RobotSpec, collision_field,
                              neighbor_sets, proximity_bump, separation,
                              sphere_frame)
from vfnav.obstacles import avoidance_frame, normal_blend

GOAL = Goal(np.zeros(3), np.array([1.0, 0.0, 0.0]), np.eye(3))


def _spec(rid, p0, r_c=1.0, r_d=10.0):
    return RobotSpec(rid, np.asarray(p0, dtype=float), np.eye(3), GOAL, r_c=r_c, r_d=r_d)


def _aux_at(p):
    return nav_field(p), circle_normal_field(p), plane_normal_field(p)


def test_separation_basic():
    assert separation([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert separation([3.0, 4.0, 0.0], [0.0, 0.0, 0.0]) == 5.0


def test_separation_symmetric(rng):
    for _ in range(200):
        a, b = rng.normal(size=3), rng.normal(size=3)
        assert separation(a, b) == separation(b, a)
        assert abs(separation(a, b) - np.linalg.norm(a - b)) < 1e-12


def test_neighbor_sets_four_robot_configuration():
    # distances: all pairs inside (r_c, r_d) except the 2-4 pair
    specs = [_spec(1, [0.0, 0.0, 0.0]), _spec(2, [8.0, 0.0, 0.0]),
             _spec(3, [4.0, 5.0, 0.0]), _spec(4, [-4.0, 5.0, 0.0])]
    positions = [s.position0 for s in specs]
    ns = {i: neighbor_sets(i, positions, specs) for i in (1, 2, 3, 4)}
    assert ns[1].detected == {2, 3, 4} and ns[1].higher_priority == set()
    assert ns[2].detected == {1, 3} and ns[2].higher_priority == {1}
    assert ns[3].detected == {1, 2, 4} and ns[3].higher_priority == {1, 2}
    assert ns[4].detected == {1, 3} and ns[4].higher_priority == {1, 3}


def test_neighbor_sets_all_far_apart():
    specs = [_spec(1, [0.0, 0.0, 0.0]), _spec(2, [100.0, 0.0, 0.0]),
             _spec(3, [0.0, 100.0, 0.0])]
    positions = [s.position0 for s in specs]
    for i in (1, 2, 3):
        ns = neighbor_sets(i, positions, specs)
        assert ns.detected == set() and ns.higher_priority == set()


def test_neighbor_sets_matches_brute_force(rng):
    for _ in range(100):
        n = int(rng.integers(2, 7))
        specs = [_spec(i + 1, rng.uniform(-15, 15, size=3)) for i in range(n)]
        positions = [s.position0 for s in specs]
        for i in range(1, n + 1):
            ns = neighbor_sets(i, positions, specs)
            expected = set()
            for j in range(1, n + 1):
                if j == i:
                    continue
                d = separation(positions[i - 1], positions[j - 1])
                if specs[j - 1].r_c <= d <= specs[j - 1].r_d:
                    expected.add(j)
            assert ns.detected == expected
            assert ns.higher_priority == {j for j in expected if j < i}


def test_proximity_bump_boundaries():
    assert proximity_bump(1.0, 1.0, 10.0) == 0.0
    assert proximity_bump(0.2, 1.0, 10.0) == 0.0
    assert proximity_bump(10.0, 1.0, 10.0) == 1.0
    assert proximity_bump(5.5, 1.0, 10.0) == 0.5


def test_collision_field_no_neighbors():
    p = np.array([-5.0, 2.0, 1.0])
    f, g, h = _aux_at(p)
    assert np.array_equal(collision_field(p, f, [], g, h), f)


def test_collision_field_boundary_reductions(rng):
    p = np.array([-5.0, 2.0, 1.0])
    f, g, h = _aux_at(p)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    # neighbor exactly at the dangerous radius: purely tangential
    nb = NeighborState(1, p - 1.0 * direction, np.zeros(3), 1.0, 10.0)
    sf = sphere_frame(p, nb.position, f, g, h)
    out = collision_field(p, f, [nb], g, h)
    assert np.allclose(out, sf.tangent_b, atol=1e-12)
    # neighbor exactly at the detection radius: guidance field untouched
    nb = NeighborState(1, p - 10.0 * direction, np.zeros(3), 1.0, 10.0)
    assert np.array_equal(collision_field(p, f, [nb], g, h), f)


def test_collision_field_breach_logged(caplog):
    p = np.array([-5.0, 2.0, 1.0])
    f, g, h = _aux_at(p)
    nb = NeighborState(3, p + np.array([0.5, 0.0, 0.0]), np.zeros(3), 1.0, 10.0)
    with caplog.at_level(logging.WARNING, logger="vfnav.multirobot"):
        out = collision_field(p, f, [nb], g, h)
    assert any("breach" in rec.message for rec in caplog.records)
    assert np.all(np.isfinite(out))


def test_sphere_frame_unit_normal(rng):
    for _ in range(200):
        p = rng.uniform(-8, 8, size=3)
        q = rng.uniform(-8, 8, size=3)
        if separation(p, q) < 1e-3 or np.linalg.norm(nav_field(p)) < 1e-9:
            continue
        f, g, h = _aux_at(p)
        sf = sphere_frame(p, q, f, g, h)
        assert abs(np.linalg.norm(sf.normal) - 1.0) < 1e-12
        if not sf.collinear:
            assert abs(sf.tangent_b @ sf.normal) < 1e-9 * np.linalg.norm(sf.tangent_b)
            assert sf.tangent_b @ f >= 0.0


def test_sphere_frame_collinear_branch():
    p = np.array([3.0, 1.0, -2.0])
    f, g, h = _aux_at(p)
    fhat = f / np.linalg.norm(f)
    sf = sphere_frame(p, p - 2.0 * fhat, f, g, h)
    assert sf.collinear
    assert np.array_equal(sf.tangent_a, h)
    assert np.array_equal(sf.tangent_b, g)


def test_collision_frame_reductions_and_orthogonality(rng):
    # same companion-frame contract as the obstacle case, with sphere normals
    for _ in range(200):
        p = rng.uniform(-8, 8, size=3)
        if p[1] ** 2 + p[2] ** 2 < 0.1:
            continue
        f, g, h = _aux_at(p)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        dist = rng.uniform(1.0 + 1e-6, 10.0 - 1e-6)
        nb_pos = p - dist * direction
        sf = sphere_frame(p, nb_pos, f, g, h)
        chi = proximity_bump(dist, 1.0, 10.0)
        try:
            mu = normal_blend(chi, f, sf.normal, sf.tangent_b, g)
        except ArithmeticError:
            mu = None
        tri = avoidance_frame(chi, mu, f, g, h, sf)
        E = tri.R.T @ tri.R - np.eye(3)
        assert np.abs(E).max() < 1e-9


def test_collision_frame_boundary_reductions():
    p = np.array([-5.0, 2.0, 1.0])
    f, g, h = _aux_at(p)
    # no active neighbor: plain guidance triad
    tri = avoidance_frame(1.0, 1.0, f, g, h,
                          sphere_frame(p, p - np.array([20.0, 0, 0]), f, g, h))
    for col, vec in zip(range(3), (f, h, g)):
        assert np.allclose(tri.R[:, col], vec / np.linalg.norm(vec), atol=1e-9)
    # neighbor at the dangerous radius: sphere-surface triad
    d = np.array([0.6, -0.3, 0.74])
    d /= np.linalg.norm(d)
    sf = sphere_frame(p, p - 1.0 * d, f, g, h)
    assert not sf.collinear
    mu = normal_blend(0.0, f, sf.normal, sf.tangent_b, g)
    tri = avoidance_frame(0.0, mu, f, g, h, sf)
    for col, vec in zip(range(3), (sf.tangent_b, sf.tangent_a, sf.normal)):
        assert np.allclose(tri.R[:, col], vec / np.linalg.norm(vec), atol=1e-9)


def test_responsibility_is_one_sided(rng):
    # for any pair, only the lower-priority robot's field carries an
    # avoidance term
    p_hi = np.array([-6.0, 3.0, 0.5])
    p_lo = np.array([-4.0, 2.0, 0.2])
    f_hi, g_hi, h_hi = _aux_at(p_hi)
    f_lo, g_lo, h_lo = _aux_at(p_lo)
    # higher-priority robot (id 1) plans with an empty avoid set
    out_hi = collision_field(p_hi, f_hi, [], g_hi, h_hi)
    assert np.array_equal(out_hi, f_hi)
    # lower-priority robot (id 2) must react to robot 1
    nb = NeighborState(1, p_hi, np.zeros(3), 1.0, 10.0)
    out_lo = collision_field(p_lo, f_lo, [nb], g_lo, h_lo)
    assert not np.allclose(out_lo, f_lo)


def test_robot_spec_validation():
    with pytest.raises(ValueError):
        _spec(1, [0, 0, 0], r_c=5.0, r_d=2.0)
    with pytest.raises(ValueError):
        RobotSpec(1, np.zeros(3), np.eye(3), GOAL, k_w=0.0)
