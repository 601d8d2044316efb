"""Scenario classification on synthetic series and short real runs."""

import math

import pytest

import errw.classify as cl
from errw import offspring as osp
from errw import process as proc
from errw import simplex as sx


def make_series(theta, amp, n=250, wobble=0.0):
    """Constant weight shares, occupation oscillating along e_minus1."""
    em = (sx.e_minus1_boundary(theta) if min(theta) <= 1e-12
          else sx.eigen_data(theta).e_minus1)
    thetas, vs = [], []
    for k in range(n):
        sign = 1.0 if k % 2 == 0 else -1.0
        w = wobble * math.sin(k)
        vs.append(tuple(sign * amp * em[i] + w * (1 if i == 0 else -0.5) for i in range(3)))
        thetas.append(theta)
    return thetas, vs


def test_estimate_ell_constant_and_alternating():
    ell, spread = cl.estimate_ell([0.25] * 300, window=200)
    assert ell == pytest.approx(0.25)
    assert spread == 0.0
    with pytest.raises(cl.InsufficientTail):
        cl.estimate_ell([0.1] * 100, window=200)


def test_internal_equilibrium():
    thetas, vs = make_series((0.4, 0.35, 0.25), amp=0.0)
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "internal_equilibrium"
    assert rep.dominance == "none"
    assert rep.ell_hat == pytest.approx(0.0, abs=1e-12)


def test_edge_equilibrium_and_two_cycle():
    edge_theta = (0.55, 0.45 - 1e-7, 1e-7)
    thetas, vs = make_series(edge_theta, amp=0.0)
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "edge_equilibrium"
    assert rep.dominance == "partial"

    thetas, vs = make_series(edge_theta, amp=1.0 / 3.0)
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "edge_two_cycle"
    assert rep.ell_hat == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert rep.diagnostics["beta_alternation"] >= 0.99


def test_vertex_equilibrium_and_two_cycle():
    vert_theta = (1.0 - 2e-7, 1e-7, 1e-7)
    thetas, vs = make_series(vert_theta, amp=0.0)
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "vertex_equilibrium"
    assert rep.dominance == "full"

    thetas, vs = make_series(vert_theta, amp=0.4)
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "vertex_two_cycle"


def test_interior_with_oscillation_is_undecided():
    thetas, vs = make_series((0.4, 0.35, 0.25), amp=0.3)
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "undecided"
    assert rep.dominance == "undecided"


def test_unstable_spread_is_undecided():
    edge_theta = (0.55, 0.45 - 1e-7, 1e-7)
    thetas, vs = make_series(edge_theta, amp=0.3, wobble=0.05)
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "undecided"


def test_no_alternation_is_undecided():
    # oscillation magnitude without sign flips
    edge_theta = (0.55, 0.45 - 1e-7, 1e-7)
    em = sx.eigen_data(edge_theta).e_minus1
    thetas = [edge_theta] * 250
    vs = [tuple(0.3 * em[i] for i in range(3))] * 250
    rep = cl.classify_series(thetas, vs)
    assert rep.scenario == "undecided"


def test_scale_invariance():
    # shares from weights and from scaled weights classify identically
    ts = [(2.0 * 1.5**k, 1.0 * 1.5**k, 1.0 * 1.5**k) for k in range(250)]
    def shares(scale):
        out = []
        for t in ts:
            s = sum(v * scale for v in t)
            out.append(tuple(v * scale / s for v in t))
        return out
    vs = [(0.0, 0.0, 0.0)] * 250
    a = cl.classify_series(shares(1.0), vs)
    b = cl.classify_series(shares(7.25), vs)
    assert a.scenario == b.scenario == "internal_equilibrium"
    assert a.theta_limit == pytest.approx(b.theta_limit, abs=1e-12)


def test_insufficient_tail():
    with pytest.raises(cl.InsufficientTail):
        cl.classify_series([(0.4, 0.3, 0.3)] * 50, [(0.0, 0.0, 0.0)] * 50)


def test_growth_report_exponential_growth():
    traj = proc.run(osp.constant(2), (1, 1, 1), (1, 1, 1), 200, seed=2)
    rep = cl.growth_report(traj)
    assert rep.windows[0] == (100, 200)
    assert rep.frozen_edges == 0
    assert rep.qv_bounded_by_y
    assert min(rep.slopes[0]) > 1.0  # exponential growth beats any power law


def test_growth_report_frozen_edge():
    traj = proc.run(osp.constant(2), (1, 1, 1), (1, 1, 1), 40,
                    schedule=[(0, 40, proc.EdgeAvoid(1))], seed=2)
    rep = cl.growth_report(traj)
    assert rep.frozen_edges == 1
    assert rep.slopes[0][0] == pytest.approx(0.0, abs=1e-12)


def test_classify_trajectory_object():
    sched = [(0, 40, proc.EqualSplit()), (40, 300, proc.Free())]
    traj = proc.run(osp.constant(2), (1, 1, 1), (1, 1, 1), 300, schedule=sched, seed=0)
    rep = cl.classify(traj)
    assert rep.scenario == "internal_equilibrium"
    d = rep.to_dict()
    assert d["scenario"] == "internal_equilibrium"
    assert len(d["theta_limit"]) == 3
