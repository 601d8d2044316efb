"""State machine for the reinforced branching walk on the triangle.

State is three edge weights T (initial real weights plus integer traversal
counts) and three vertex occupation counts N. One step branches every
particle, moves the children across the two edges at their vertex, and
reinforces each edge by the number of crossings. Counts are exact Python
integers until any of them exceeds 2^63, after which the whole state runs
on floats permanently.

Besides the raw counts, every step records the full perturbation telemetry:
the remainders R, S (occupation and weight-share recursions), the combined
remainders U, W of the centered recursions, and the martingale increments
of the edge-weight decomposition.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import offspring as osp
from . import simplex as sx

FLOAT_SWITCH_LIMIT = 2**63


@dataclass(frozen=True)
class Free:
    """Reinforced random movement: binomial thinning by edge-weight shares."""


@dataclass(frozen=True)
class EqualSplit:
    """Forced half/half movement at every vertex (odd totals alternate rounding)."""


@dataclass(frozen=True)
class EdgeAvoid:
    """No crossings of one edge; equal split at the opposite vertex."""
    edge: int  # 1-based avoided edge index

    def __post_init__(self):
        if self.edge not in (1, 2, 3):
            raise ValueError(f"edge must be 1, 2 or 3, got {self.edge!r}")


Policy = Free | EqualSplit | EdgeAvoid

Schedule = list[tuple[int, int, Policy]]  # disjoint [start, stop) segments


def validate_schedule(schedule: Schedule, horizon: int) -> None:
    segs = sorted(schedule, key=lambda s: s[0])
    pos = 0
    for start, stop, _ in segs:
        if start != pos or stop <= start:
            raise ValueError(f"schedule must cover [0, {horizon}) disjointly: {schedule!r}")
        pos = stop
    if pos != horizon:
        raise ValueError(f"schedule must cover [0, {horizon}) exactly, covers [0, {pos})")


def policy_at(schedule: Schedule, n: int) -> Policy:
    for start, stop, pol in schedule:
        if start <= n < stop:
            return pol
    raise ValueError(f"step {n} not covered by schedule")


@dataclass
class ProcessState:
    """Edge weights (initial reals + traversal counts), occupation counts, step index."""
    t0: tuple[float, float, float]
    traversals: list  # per-edge crossing totals, int (exact mode) or float
    counts: list      # per-vertex particle counts, int or float
    step_index: int
    exact: bool
    rng: np.random.Generator

    @property
    def T(self) -> tuple:
        # keep integer arithmetic when the initial weights are integral, so
        # conservation stays exact past 2^53 in integer mode
        out = []
        for i in range(3):
            base = self.t0[i]
            if self.exact and base.is_integer():
                out.append(int(base) + self.traversals[i])
            else:
                out.append(base + self.traversals[i])
        return tuple(out)

    @property
    def N(self) -> tuple:
        return tuple(self.counts)

    def theta(self) -> tuple[float, float, float]:
        t = self.T
        s = t[0] + t[1] + t[2]
        return (t[0] / s, t[1] / s, t[2] / s)

    def pi(self) -> tuple[float, float, float]:
        s = self.counts[0] + self.counts[1] + self.counts[2]
        return (self.counts[0] / s, self.counts[1] / s, self.counts[2] / s)


def init_state(n0, t0, rng: np.random.Generator) -> ProcessState:
    n0 = [int(v) for v in n0]
    t0 = tuple(float(v) for v in t0)
    if min(n0) < 0 or sum(n0) < 1:
        raise ValueError(f"need a nonnegative occupation with at least one particle: {n0!r}")
    if min(t0) <= 0.0:
        raise ValueError(f"edge weights must be positive: {t0!r}")
    return ProcessState(t0=t0, traversals=[0, 0, 0], counts=n0,
                        step_index=0, exact=True, rng=rng)


@dataclass(frozen=True)
class StepRecord:
    """Counts and perturbation telemetry produced by one step (state at index n)."""
    n: int
    T: tuple              # absolute edge weights after the step
    N: tuple              # particle counts per vertex after the step
    theta: tuple          # weight shares after the step
    pi: tuple             # occupation shares after the step
    v: tuple              # pi minus the equilibrium share at theta
    rho_n: float          # particle-to-weight mass ratio after the step
    chi: float
    children: tuple
    B: tuple
    Bbar: tuple
    C: tuple              # movement counts centered at their binomial means
    upsilon: tuple        # branching share fluctuation
    xi: tuple             # movement fluctuation
    R: tuple
    S: tuple
    U: tuple
    W: tuple
    dM: tuple             # edge martingale increments
    dY: tuple             # predictable edge growth increments
    dQV: tuple            # quadratic variation increments
    cumM: tuple
    cumY: tuple
    cumQV: tuple
    exact: bool


def _movement(state: ProcessState, policy: Policy, children, P):
    """Per-vertex counts crossing the predecessor edge, under the given policy."""
    rng = state.rng
    if isinstance(policy, Free):
        return [osp.sample_binomial(children[i], P[i], rng) for i in range(3)]
    if isinstance(policy, EqualSplit):
        return [_half(children[i], state.step_index, state.exact) for i in range(3)]
    a = policy.edge - 1
    B = [None, None, None]
    B[(a + 1) % 3] = 0 if state.exact else 0.0
    B[(a + 2) % 3] = children[(a + 2) % 3]
    B[a] = _half(children[a], state.step_index, state.exact)
    return B


def _half(total, step_index: int, exact: bool):
    if not exact:
        return total / 2.0
    if total % 2 == 0:
        return total // 2
    # odd totals: floor on even steps, ceil on odd steps
    return total // 2 if step_index % 2 == 0 else total // 2 + 1


def step(state: ProcessState, policy: Policy, spec: osp.OffspringSpec,
         rho_limit: float | None = None) -> StepRecord:
    """Advance the state by one branch/move/reinforce cycle and record telemetry."""
    if rho_limit is None:
        rho_limit = 1.0 - 1.0 / spec.mean
    T = state.T
    theta_n = state.theta()
    pi_n = state.pi()
    P = [0.0, 0.0, 0.0]
    for i in range(3):
        prv, nxt = (i + 2) % 3, (i + 1) % 3
        P[i] = T[prv] / (T[prv] + T[nxt])

    children = [osp.sample_offspring_sum(state.counts[i], spec, state.rng) for i in range(3)]
    B = _movement(state, policy, children, P)
    Bbar = [children[i] - B[i] for i in range(3)]

    new_N = [0, 0, 0]
    for i in range(3):
        prv, nxt = (i + 2) % 3, (i + 1) % 3
        new_N[i] = B[prv] + Bbar[nxt]
        state.traversals[i] = state.traversals[i] + B[nxt] + Bbar[prv]
    state.counts = new_N
    state.step_index += 1
    if state.exact and max(max(new_N), max(state.traversals)) > FLOAT_SWITCH_LIMIT:
        state.exact = False
        state.traversals = [float(v) for v in state.traversals]
        state.counts = [float(v) for v in state.counts]

    norm_n1 = children[0] + children[1] + children[2]
    pi_n1 = tuple(new_N[i] / norm_n1 for i in range(3))
    theta_n1 = state.theta()
    t_new = state.T
    rho_n1 = norm_n1 / (t_new[0] + t_new[1] + t_new[2])

    ups = tuple(children[i] / norm_n1 - pi_n[i] for i in range(3))
    C = tuple(B[i] - P[i] * children[i] for i in range(3))
    R, S, xi = [0.0] * 3, [0.0] * 3, [0.0] * 3
    dM, dY, dQV = [0.0] * 3, [0.0] * 3, [0.0] * 3
    for i in range(3):
        prv, nxt = (i + 2) % 3, (i + 1) % 3
        xi[i] = (C[prv] - C[nxt]) / norm_n1
        R[i] = ups[nxt] * (1.0 - P[nxt]) + ups[prv] * P[prv] + xi[i]
        S[i] = rho_n1 * (ups[nxt] + ups[prv]) \
            + (rho_n1 - rho_limit) * (1.0 - pi_n[i] - pi_n1[i] - theta_n[i])
        dM[i] = C[nxt] - C[prv]
        dY[i] = P[nxt] * children[nxt] + (1.0 - P[prv]) * children[prv]
        dQV[i] = P[nxt] * (1.0 - P[nxt]) * children[nxt] \
            + P[prv] * (1.0 - P[prv]) * children[prv]

    half = rho_limit / 2.0
    U = tuple((1.0 - half) * R[i] + S[i] / 2.0 for i in range(3))
    W = tuple(S[i] - rho_limit * R[i] for i in range(3))
    q1 = sx.equilibrium_q(theta_n1)
    v = tuple(pi_n1[i] - q1[i] for i in range(3))

    return StepRecord(
        n=state.step_index,
        T=t_new, N=tuple(new_N),
        theta=theta_n1, pi=pi_n1, v=v, rho_n=rho_n1,
        chi=sx.chi(theta_n1),
        children=tuple(children), B=tuple(B), Bbar=tuple(Bbar), C=C,
        upsilon=ups, xi=tuple(xi), R=tuple(R), S=tuple(S), U=U, W=W,
        dM=tuple(dM), dY=tuple(dY), dQV=tuple(dQV),
        cumM=(0.0, 0.0, 0.0), cumY=(0.0, 0.0, 0.0), cumQV=(0.0, 0.0, 0.0),
        exact=state.exact,
    )


@dataclass
class Trajectory:
    """Recorded steps of one run plus the initial and final state."""
    seed: int
    run_index: int
    horizon: int
    stride: int
    rho_limit: float
    theta0: tuple
    pi0: tuple
    records: list = field(default_factory=list)
    final_state: ProcessState | None = None

    def theta_series(self):
        return [r.theta for r in self.records]

    def v_series(self):
        return [r.v for r in self.records]


def run(spec: osp.OffspringSpec, n0, t0, horizon: int, schedule: Schedule | None = None,
        seed: int = 0, run_index: int = 0, stride: int = 1,
        rho_limit: float | None = None) -> Trajectory:
    """Run one trajectory, recording every stride-th step (and the last)."""
    if horizon < 1:
        raise ValueError(f"horizon must be positive: {horizon!r}")
    if stride < 1:
        raise ValueError(f"stride must be positive: {stride!r}")
    if schedule is None:
        schedule = [(0, horizon, Free())]
    validate_schedule(schedule, horizon)
    if rho_limit is None:
        rho_limit = 1.0 - 1.0 / spec.mean

    state = init_state(n0, t0, osp.stream(seed, run_index))
    traj = Trajectory(seed=seed, run_index=run_index, horizon=horizon, stride=stride,
                      rho_limit=rho_limit, theta0=state.theta(), pi0=state.pi())
    cum_m = [0.0, 0.0, 0.0]
    cum_y = [0.0, 0.0, 0.0]
    cum_qv = [0.0, 0.0, 0.0]
    for n in range(horizon):
        rec = step(state, policy_at(schedule, n), spec, rho_limit)
        for i in range(3):
            cum_m[i] += rec.dM[i]
            cum_y[i] += rec.dY[i]
            cum_qv[i] += rec.dQV[i]
        if rec.n % stride == 0 or rec.n == horizon:
            traj.records.append(replace(rec, cumM=tuple(cum_m), cumY=tuple(cum_y),
                                        cumQV=tuple(cum_qv)))
    traj.final_state = state
    return traj


def martingale_summary(traj: Trajectory) -> dict:
    """Per-edge martingale, compensator and quadratic variation paths."""
    out = {"n": [r.n for r in traj.records]}
    for i in range(3):
        out[f"M_{i + 1}"] = [r.cumM[i] for r in traj.records]
        out[f"Y_{i + 1}"] = [r.cumY[i] for r in traj.records]
        out[f"QV_{i + 1}"] = [r.cumQV[i] for r in traj.records]
    out["qv_bounded_by_y"] = all(
        r.cumQV[i] <= r.cumY[i] * (1.0 + 1e-12) + 1e-9
        for r in traj.records for i in range(3)
    )
    return out
