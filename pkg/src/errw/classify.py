"""Tail-based classification of trajectories into limiting scenarios.

Five scenarios: an interior weight-share limit with matching occupation
(internal equilibrium), an edge limit with converging or two-cycling
occupation (edge equilibrium / edge two-cycle), and the same pair at a
vertex. Classification reads only the tail window of the recorded shares,
is scale invariant by construction (shares only), and returns Undecided
rather than guessing when the diagnostics are unstable.
"""

import math
from dataclasses import dataclass, field

from . import simplex as sx

SCENARIOS = (
    "internal_equilibrium",
    "edge_equilibrium",
    "edge_two_cycle",
    "vertex_equilibrium",
    "vertex_two_cycle",
    "undecided",
)

DOMINANCE = {
    "internal_equilibrium": "none",
    "edge_equilibrium": "partial",
    "edge_two_cycle": "partial",
    "vertex_equilibrium": "full",
    "vertex_two_cycle": "full",
    "undecided": "undecided",
}


class InsufficientTail(ValueError):
    """Fewer recorded steps than the tail window needs."""


@dataclass(frozen=True)
class Thresholds:
    eps_edge: float = 1e-4      # weight share below this counts as on an edge
    eps_vertex: float = 1e-4    # 1 - max share below this counts as at a vertex
    eps_ell: float = 1e-3       # oscillation sizes below this count as zero
    tail_window: int = 200
    alternation_min: float = 0.9
    stability_factor: float = 10.0


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    dominance: str
    theta_limit: tuple
    ell_hat: float
    ell_spread: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "dominance": self.dominance,
            "theta_limit": list(self.theta_limit),
            "ell_hat": self.ell_hat,
            "ell_spread": self.ell_spread,
            "diagnostics": self.diagnostics,
        }


def estimate_ell(v_norms, window: int = 200) -> tuple[float, float]:
    """Median and spread of the occupation-deviation norms over the tail window."""
    if len(v_norms) < window:
        raise InsufficientTail(f"need {window} recorded steps, got {len(v_norms)}")
    tail = sorted(v_norms[-window:])
    k = len(tail)
    med = tail[k // 2] if k % 2 else (tail[k // 2 - 1] + tail[k // 2]) / 2.0
    return med, tail[-1] - tail[0]


def _beta_alternation(thetas, vs) -> float:
    """Fraction of consecutive tail steps with a strict oscillation sign flip."""
    betas = []
    for th, v in zip(thetas, vs):
        try:
            betas.append(sx.tangent_coords(th, v)[1])
        except (sx.DegenerateBasis, sx.VertexPoint, ValueError):
            betas.append(0.0)
    flips = sum(
        1 for b0, b1 in zip(betas, betas[1:])
        if b0 != 0.0 and b1 != 0.0 and (b0 > 0.0) != (b1 > 0.0)
    )
    return flips / max(len(betas) - 1, 1)


def classify_series(thetas, vs, thresholds: Thresholds = Thresholds()) -> ScenarioReport:
    """Classify from parallel weight-share and occupation-deviation series."""
    th = thresholds
    if len(thetas) < th.tail_window:
        raise InsufficientTail(f"need {th.tail_window} recorded steps, got {len(thetas)}")
    tail_th = thetas[-th.tail_window:]
    tail_v = vs[-th.tail_window:]
    k = len(tail_th)
    mean = [sum(t[i] for t in tail_th) / k for i in range(3)]
    s = sum(mean)
    theta_limit = tuple(c / s for c in mean)
    theta_var = max(
        max(abs(t[i] - theta_limit[i]) for i in range(3)) for t in tail_th
    )
    ell_hat, ell_spread = estimate_ell([sx.l1(v) for v in tail_v], th.tail_window)

    diagnostics = {
        "theta_tail_variation": theta_var,
        "theta_min": min(theta_limit),
        "theta_max": max(theta_limit),
        "ell_spread": ell_spread,
    }

    def report(name):
        return ScenarioReport(scenario=name, dominance=DOMINANCE[name],
                              theta_limit=theta_limit, ell_hat=ell_hat,
                              ell_spread=ell_spread, diagnostics=diagnostics)

    oscillating = ell_hat > th.eps_ell
    stable = ell_spread <= th.stability_factor * th.eps_ell
    if oscillating:
        diagnostics["beta_alternation"] = _beta_alternation(tail_th, tail_v)

    if 1.0 - max(theta_limit) <= th.eps_vertex:
        kind = "vertex"
    elif min(theta_limit) <= th.eps_edge:
        kind = "edge"
    else:
        kind = "interior"

    if not stable:
        return report("undecided")
    if kind == "interior":
        # a persistent oscillation is inconsistent with an interior limit
        return report("internal_equilibrium" if not oscillating else "undecided")
    if not oscillating:
        return report(f"{kind}_equilibrium")
    if diagnostics["beta_alternation"] >= th.alternation_min:
        return report(f"{kind}_two_cycle")
    return report("undecided")


def classify(traj, thresholds: Thresholds = Thresholds()) -> ScenarioReport:
    """Classify a recorded trajectory (anything with theta_series / v_series)."""
    return classify_series(traj.theta_series(), traj.v_series(), thresholds)


@dataclass(frozen=True)
class GrowthReport:
    """Log-log growth slopes of edge weights over dyadic tail windows."""
    windows: list              # (n_lo, n_hi) pairs, most recent first
    slopes: list               # per window: triple of per-edge slopes (None if flat/short)
    frozen_edges: int          # edges with no growth over the final half
    qv_bounded_by_y: bool

    def to_dict(self) -> dict:
        return {
            "windows": [list(w) for w in self.windows],
            "slopes": [list(s) for s in self.slopes],
            "frozen_edges": self.frozen_edges,
            "qv_bounded_by_y": self.qv_bounded_by_y,
        }


def _loglog_slope(ns, ts) -> float | None:
    pts = [(math.log(n), math.log(t)) for n, t in zip(ns, ts) if t > 0.0]
    if len(pts) < 3:
        return None
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    den = sum((px - mx) ** 2 for px, _ in pts)
    if den == 0.0:
        return None
    return sum((px - mx) * (py - my) for px, py in pts) / den


def growth_report(traj) -> GrowthReport:
    """Fit per-edge weight growth exponents over dyadic windows of the run."""
    recs = traj.records
    if not recs:
        raise InsufficientTail("empty trajectory")
    horizon = recs[-1].n
    t_series = {r.n: r.T for r in recs}

    windows, slopes = [], []
    hi = horizon
    while hi >= 4:
        lo = hi // 2
        ns = [n for n in t_series if lo < n <= hi]
        if len(ns) < 3:
            break
        windows.append((lo, hi))
        slopes.append(tuple(_loglog_slope(ns, [t_series[n][i] for n in ns]) for i in range(3)))
        hi = lo

    half = [n for n in t_series if n > horizon // 2]
    frozen = 0
    if half:
        first, last = min(half), max(half)
        frozen = sum(1 for i in range(3) if t_series[first][i] == t_series[last][i])
    qv_ok = all(r.cumQV[i] <= r.cumY[i] * (1.0 + 1e-12) + 1e-9
                for r in recs for i in range(3))
    return GrowthReport(windows=windows, slopes=slopes, frozen_edges=frozen,
                        qv_bounded_by_y=qv_ok)
