"""Deterministic map: fixed points, contraction, boundary orbits, edge asymptotics."""

import math
import random

import pytest

from errw import dynsys as dyn
from errw import simplex as sx


def random_interior(rng, margin=0.02):
    while True:
        a, b = sorted((rng.random(), rng.random()))
        p = (a, b - a, 1.0 - b)
        if min(p) > margin:
            return p


def test_fixed_points_are_exactly_equilibrium_pairs():
    rng = random.Random(1)
    for _ in range(50):
        p = random_interior(rng)
        q = sx.equilibrium_q(p)
        p1, q1 = dyn.phi_step(p, q, rho=0.5)
        assert max(abs(p1[i] - p[i]) for i in range(3)) < 1e-14
        assert max(abs(q1[i] - q[i]) for i in range(3)) < 1e-14


def test_grid_search_finds_no_spurious_fixed_points():
    rng = random.Random(2)
    for _ in range(5):
        p = random_interior(rng)
        q_star = sx.equilibrium_q(p)
        n = 20
        for i in range(n + 1):
            for j in range(n + 1 - i):
                q = (i / n, j / n, (n - i - j) / n)
                p1, q1 = dyn.phi_step(p, q, rho=0.5)
                res = max(max(abs(p1[k] - p[k]), abs(q1[k] - q[k])) for k in range(3))
                if res < 1e-10:
                    assert max(abs(q[k] - q_star[k]) for k in range(3)) < 1e-9


def test_interior_orbit_contracts_by_operator_norm_bound():
    rng = random.Random(3)
    rho = 0.5
    for _ in range(10):
        p = random_interior(rng, margin=0.1)
        q = random_interior(rng, margin=0.05)
        pts = dyn.orbit(p, q, rho, 40)
        for (p0, q0), (p1, q1) in zip(pts, pts[1:]):
            v0 = sx.l1(tuple(q0[i] - sx.equilibrium_q(p0)[i] for i in range(3)))
            v1 = sx.l1(tuple(q1[i] - sx.equilibrium_q(p1)[i] for i in range(3)))
            bound = (1 - rho / 2) * (1 - sx.chi(p0)) + rho / 2
            assert v1 <= bound * v0 + 1e-13


def test_perturbed_step_and_left_simplex():
    p = (0.4, 0.35, 0.25)
    q = (0.3, 0.3, 0.4)
    s = (1e-3, -1e-3, 0.0)
    r = (0.0, 1e-3, -1e-3)
    p1, q1 = dyn.phi_step_perturbed(p, q, 0.5, s, r)
    p0, q0 = dyn.phi_step(p, q, 0.5)
    assert max(abs(q1[i] - q0[i] - r[i]) for i in range(3)) < 1e-12
    with pytest.raises(dyn.LeftSimplex):
        dyn.phi_step_perturbed((0.98, 0.01, 0.01), sx.equilibrium_q((0.98, 0.01, 0.01)),
                               0.5, (0.5, 0.0, 0.0), (0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        dyn.phi_step(p, q, rho=1.5)


def test_orbit_snaps_underflowed_weight_share():
    p0 = (0.5, 0.5 - 1e-310, 1e-310)
    pts = dyn.orbit(p0, (0.0, 0.0, 1.0), 0.5, 3)
    assert pts[1][0][2] == 0.0


def test_boundary_orbit_first_step_example():
    res = dyn.boundary_orbit((0.5, 0.5, 0.0), (0.0, 0.0, 1.0), 0.5, 10)
    p1, q1 = res.points[1]
    assert p1 == pytest.approx((0.5, 0.5, 0.0), abs=1e-15)
    assert q1 == pytest.approx((0.5, 0.5, 0.0), abs=1e-15)
    assert res.amplitude == pytest.approx(1.0)
    assert res.q_limit_even == pytest.approx((0.0, 0.0, 1.0), abs=1e-12)
    assert res.q_limit_odd == pytest.approx((0.5, 0.5, 0.0), abs=1e-12)


def test_boundary_orbit_matches_full_map():
    # the closed-form recursion must agree with the generic map on the edge
    p0, q0 = (0.3, 0.7, 0.0), (0.2, 0.5, 0.3)
    res = dyn.boundary_orbit(p0, q0, 0.5, 30)
    p, q = p0, q0
    for n in range(1, 31):
        p, q = dyn.phi_step(p, q, 0.5)
        pb, qb = res.points[n]
        assert max(abs(p[i] - pb[i]) for i in range(3)) < 1e-12
        assert max(abs(q[i] - qb[i]) for i in range(3)) < 1e-12


def test_boundary_orbit_off_edge_share_flips():
    res = dyn.boundary_orbit((0.4, 0.6, 0.0), (0.3, 0.4, 0.3), 0.5, 20)
    cs = [q[2] for _, q in res.points]
    for n, c in enumerate(cs):
        assert c == pytest.approx(0.3 if n % 2 == 0 else 0.7, abs=1e-15)


def test_boundary_orbit_weight_increment_contraction():
    rng = random.Random(4)
    for _ in range(10):
        x0, c0 = rng.uniform(0.1, 0.9), rng.random()
        a0 = rng.uniform(0.0, 1.0 - c0)
        q0 = (a0, 1.0 - c0 - a0, c0)
        res = dyn.boundary_orbit((x0, 1.0 - x0, 0.0), q0, 0.5, 60)
        xs = [p[0] for p, _ in res.points]
        d0 = max(abs(xs[1] - xs[0]), abs(xs[2] - xs[1]), 1e-30)
        for n in range(2, 60):
            assert abs(xs[n + 1] - xs[n]) <= d0 * 0.25 ** ((n - 1) // 2) + 1e-15


def test_boundary_orbit_other_edges_by_relabeling():
    # same orbit on each edge after cyclic relabeling of the coordinates
    base = dyn.boundary_orbit((0.3, 0.7, 0.0), (0.2, 0.5, 0.3), 0.5, 40)
    for shift, edge in ((1, 1), (2, 2)):
        def rot(t):
            return tuple(t[(k - shift) % 3] for k in range(3))
        res = dyn.boundary_orbit(rot((0.3, 0.7, 0.0)), rot((0.2, 0.5, 0.3)), 0.5, 40)
        assert res.edge == edge
        for (pb, qb), (pr, qr) in zip(base.points, res.points):
            assert max(abs(rot(pb)[i] - pr[i]) for i in range(3)) < 1e-12
            assert max(abs(rot(qb)[i] - qr[i]) for i in range(3)) < 1e-12


def test_boundary_orbit_rejects_interior_and_vertex():
    with pytest.raises(sx.NotBoundary):
        dyn.boundary_orbit((0.4, 0.3, 0.3), (0.3, 0.3, 0.4), 0.5, 5)
    with pytest.raises(sx.VertexPoint):
        dyn.boundary_orbit((1.0, 0.0, 0.0), (0.0, 0.5, 0.5), 0.5, 5)


def test_local_coords_roundtrip():
    p = (0.5, 0.45, 0.05)
    data = sx.eigen_data(p)
    q_eq = sx.equilibrium_q(p)
    q = tuple(q_eq[i] + 0.1 * data.e0[i] - 0.2 * data.e_minus1[i] for i in range(3))
    loc = dyn.local_coords(p, q, edge=3)
    assert loc.x == pytest.approx(0.5)
    assert loc.z == pytest.approx(0.05)
    assert loc.alpha == pytest.approx(0.1, abs=1e-10)
    assert loc.beta == pytest.approx(-0.2, abs=1e-10)


def test_newas_equilibrium_has_zero_remainders():
    rep = dyn.verify_newas(0.5, alpha=0.0, beta=0.0, z_ladder=(1e-2, 1e-3))
    for row in rep["rows"]:
        assert row["r_z"] < 1e-14
        assert row["r_beta"] < 1e-14


def test_newas_ladder_slopes():
    rep = dyn.verify_newas(0.5, x=0.5, alpha=0.0, beta=0.25,
                           z_ladder=(1e-2, 1e-3, 1e-4))
    assert abs(rep["slope_z"] - 2.0) < 0.2
    assert abs(rep["slope_beta"] - 1.0) < 0.2
    # remainder constants stay modest on the whole ladder
    for row in rep["rows"]:
        assert row["r_z"] < 10.0 * row["z"] ** 2
        assert row["r_beta"] < 10.0 * row["z"]


def test_newas_phase_locked_refinement():
    # with the refined damping term the beta remainder drops by an order
    beta = 0.02
    generic = dyn.verify_newas(0.5, beta=beta, z_ladder=(1e-2, 1e-3))
    locked = dyn.verify_newas(0.5, beta=beta, z_ladder=(1e-2, 1e-3), phase_locked=True)
    for g, l in zip(generic["rows"], locked["rows"]):
        assert l["r_beta"] < g["r_beta"] / 5.0


def test_newas_alpha_damping():
    rep = dyn.verify_newas(0.5, x=0.4, alpha=0.1, beta=0.25, z_ladder=(1e-4, 1e-5))
    for row in rep["rows"]:
        # alpha_hat = -(rho/2)(1-beta) alpha + O(z)
        assert row["r_alpha"] < 1e-2 * abs(0.1)
