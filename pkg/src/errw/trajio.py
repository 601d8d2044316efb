"""Config parsing and trajectory serialization (CSV, JSONL, JSON reports).

CSV files start with a version comment line, then a stable header. Numbers
are written with repr so identical runs produce identical bytes.
"""

import csv
import json
from dataclasses import dataclass, field

from . import offspring as osp
from . import process as proc
from . import simplex as sx
from .classify import Thresholds

CSV_VERSION_LINE = "# errw-trajectory-csv v1"
CSV_COLUMNS = [
    "n",
    "theta_1", "theta_2", "theta_3",
    "pi_1", "pi_2", "pi_3",
    "v_norm", "rho", "chi",
    "T_1", "T_2", "T_3",
    "N_1", "N_2", "N_3",
    "theta_u", "theta_w", "pi_u", "pi_w",
]


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    """Everything one replication needs; also the unit sent to worker processes."""
    offspring: osp.OffspringSpec
    n0: tuple
    t0: tuple
    horizon: int
    seed: int = 0
    stride: int = 1
    replications: int = 1
    schedule: list = field(default_factory=list)  # (start, stop, policy) triples
    rho: float | None = None
    thresholds: Thresholds = field(default_factory=Thresholds)

    def to_dict(self) -> dict:
        return {
            "offspring": self.offspring.to_config(),
            "n0": list(self.n0),
            "t0": list(self.t0),
            "horizon": self.horizon,
            "seed": self.seed,
            "stride": self.stride,
            "replications": self.replications,
            "schedule": [_policy_to_dict(start, stop, pol) for start, stop, pol in self.schedule],
            "rho": self.rho,
            "thresholds": {
                "eps_edge": self.thresholds.eps_edge,
                "eps_vertex": self.thresholds.eps_vertex,
                "eps_ell": self.thresholds.eps_ell,
                "tail_window": self.thresholds.tail_window,
            },
        }


def _policy_to_dict(start, stop, pol) -> dict:
    out = {"start": start, "stop": stop}
    if isinstance(pol, proc.Free):
        out["policy"] = "free"
    elif isinstance(pol, proc.EqualSplit):
        out["policy"] = "equal_split"
    elif isinstance(pol, proc.EdgeAvoid):
        out["policy"] = "edge_avoid"
        out["edge"] = pol.edge
    else:
        raise ConfigError(f"unknown policy object: {pol!r}")
    return out


def _policy_from_dict(seg: dict):
    name = seg.get("policy")
    if name == "free":
        return proc.Free()
    if name == "equal_split":
        return proc.EqualSplit()
    if name == "edge_avoid":
        if "edge" not in seg:
            raise ConfigError(f"edge_avoid segment needs an 'edge': {seg!r}")
        return proc.EdgeAvoid(edge=int(seg["edge"]))
    raise ConfigError(f"unknown policy name: {name!r}")


def config_from_dict(raw: dict) -> RunConfig:
    try:
        spec = osp.make_offspring(raw["offspring"])
    except KeyError:
        raise ConfigError("config needs an 'offspring' section")
    except osp.InvalidOffspring as exc:
        raise ConfigError(str(exc))
    try:
        n0 = tuple(int(v) for v in raw["n0"])
        t0 = tuple(float(v) for v in raw["t0"])
        horizon = int(raw["horizon"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config needs n0, t0 and horizon: {exc}")
    if len(n0) != 3 or len(t0) != 3:
        raise ConfigError("n0 and t0 must have three entries")
    schedule = []
    for seg in raw.get("schedule", []):
        try:
            schedule.append((int(seg["start"]), int(seg["stop"]), _policy_from_dict(seg)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad schedule segment {seg!r}: {exc}")
    if not schedule:
        schedule = [(0, horizon, proc.Free())]
    try:
        proc.validate_schedule(schedule, horizon)
    except ValueError as exc:
        raise ConfigError(str(exc))
    thr_raw = raw.get("thresholds", {})
    try:
        thresholds = Thresholds(**thr_raw)
    except TypeError as exc:
        raise ConfigError(f"bad thresholds {thr_raw!r}: {exc}")
    cfg = RunConfig(
        offspring=spec, n0=n0, t0=t0, horizon=horizon,
        seed=int(raw.get("seed", 0)), stride=int(raw.get("stride", 1)),
        replications=int(raw.get("replications", 1)),
        schedule=schedule,
        rho=None if raw.get("rho") is None else float(raw["rho"]),
        thresholds=thresholds,
    )
    if cfg.horizon < 1 or cfg.stride < 1 or cfg.replications < 1:
        raise ConfigError("horizon, stride and replications must be positive")
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(raw)


def _row(n, theta, pi, v_norm, rho, chi_val, t, nvec) -> list:
    tu, tw = sx.ternary_xy(theta)
    pu, pw = sx.ternary_xy(pi)
    return [repr(x) for x in (
        n, *theta, *pi, v_norm, rho, chi_val, *t, *nvec, tu, tw, pu, pw
    )]


def write_trajectory_csv(path: str, traj: proc.Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(CSV_VERSION_LINE + "\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in traj.records:
            writer.writerow(_row(r.n, r.theta, r.pi, sx.l1(r.v), r.rho_n, r.chi,
                                 tuple(float(t) for t in r.T),
                                 tuple(float(c) for c in r.N)))


def write_orbit_csv(path: str, points, rho: float) -> None:
    """Deterministic orbits share the trajectory schema; counts are absent (nan)."""
    nan = float("nan")
    with open(path, "w", newline="") as fh:
        fh.write(CSV_VERSION_LINE + "\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for n, (p, q) in enumerate(points):
            q_eq = sx.equilibrium_q(p)
            v = tuple(q[i] - q_eq[i] for i in range(3))
            try:
                chi_val = sx.chi(p)
            except sx.VertexPoint:
                chi_val = nan
            writer.writerow(_row(n, p, q, sx.l1(v), rho, chi_val,
                                 (nan, nan, nan), (nan, nan, nan)))


def read_trajectory_csv(path: str) -> dict:
    """Read a trajectory CSV back into parallel column lists."""
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith("# errw-trajectory-csv"):
            raise ConfigError(f"not a trajectory CSV (missing version line): {path}")
        reader = csv.DictReader(fh)
        rows = list(reader)
    out = {
        "n": [int(float(r["n"])) for r in rows],
        "theta": [(float(r["theta_1"]), float(r["theta_2"]), float(r["theta_3"])) for r in rows],
        "pi": [(float(r["pi_1"]), float(r["pi_2"]), float(r["pi_3"])) for r in rows],
        "v_norm": [float(r["v_norm"]) for r in rows],
    }
    return out


def write_jsonl(path: str, traj: proc.Trajectory) -> None:
    with open(path, "w") as fh:
        for r in traj.records:
            obj = {
                "n": r.n,
                "T": [float(t) for t in r.T],
                "N": [float(c) for c in r.N],
                "theta": list(r.theta), "pi": list(r.pi), "v": list(r.v),
                "rho": r.rho_n, "chi": r.chi,
                "children": [float(c) for c in r.children],
                "B": [float(b) for b in r.B],
                "C": list(r.C),
                "upsilon": list(r.upsilon), "xi": list(r.xi),
                "R": list(r.R), "S": list(r.S), "U": list(r.U), "W": list(r.W),
                "dM": list(r.dM), "dY": list(r.dY), "dQV": list(r.dQV),
                "cumM": list(r.cumM), "cumY": list(r.cumY), "cumQV": list(r.cumQV),
                "exact": r.exact,
            }
            fh.write(json.dumps(obj) + "\n")


def write_json(path: str, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
