"""Command line interface.

Subcommands: simulate (one trajectory), montecarlo (replications with
scenario frequencies), dynsys (orbit / boundary / newas), spectral (grid
sweep with identity checks), classify (re-classify a trajectory CSV).

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
tolerance violation. Set ERRW_LOG to a level name for progress logging.
"""

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .classify import (SCENARIOS, InsufficientTail, Thresholds,
                       classify as classify_traj, classify_series)
from . import dynsys as dyn
from . import offspring as osp
from . import process as proc
from . import simplex as sx
from . import trajio

log = logging.getLogger("errw")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_TOLERANCE = 4


class ToleranceError(RuntimeError):
    """A numerical identity exceeded its tolerance."""


def _setup_logging() -> None:
    level = os.environ.get("ERRW_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _parse_point(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise trajio.ConfigError(f"need three comma-separated coordinates: {text!r}")
    sx.check_simplex(parts)
    return tuple(parts)


def _load(args) -> trajio.RunConfig:
    cfg = trajio.load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "stride", None) is not None:
        cfg.stride = args.stride
    return cfg


def _run_trajectory(cfg: trajio.RunConfig, run_index: int) -> proc.Trajectory:
    return proc.run(cfg.offspring, cfg.n0, cfg.t0, cfg.horizon,
                    schedule=cfg.schedule, seed=cfg.seed, run_index=run_index,
                    stride=cfg.stride, rho_limit=cfg.rho)


def _classify_run(raw_config: dict, run_index: int) -> dict:
    """Worker: one replication to a scenario report (picklable in and out)."""
    cfg = trajio.config_from_dict(raw_config)
    traj = _run_trajectory(cfg, run_index)
    rep = classify_traj(traj, cfg.thresholds)
    out = rep.to_dict()
    out["run_index"] = run_index
    return out


def cmd_simulate(args) -> int:
    cfg = _load(args)
    os.makedirs(args.out, exist_ok=True)
    traj = _run_trajectory(cfg, run_index=0)
    trajio.write_trajectory_csv(os.path.join(args.out, "trajectory.csv"), traj)
    trajio.write_jsonl(os.path.join(args.out, "trajectory.jsonl"), traj)
    report = {"config": cfg.to_dict(), "final_exact_mode": traj.final_state.exact,
              "martingale": proc.martingale_summary(traj)}
    try:
        report["classification"] = classify_traj(traj, cfg.thresholds).to_dict()
    except InsufficientTail:
        report["classification"] = None
    trajio.write_json(os.path.join(args.out, "report.json"), report)
    log.info("simulate: wrote %s", args.out)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    cfg = _load(args)
    os.makedirs(args.out, exist_ok=True)
    raw = cfg.to_dict()
    indices = list(range(cfg.replications))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_classify_run, [raw] * len(indices), indices))
    else:
        reports = [_classify_run(raw, i) for i in indices]
    reports.sort(key=lambda r: r["run_index"])

    with open(os.path.join(args.out, "runs.jsonl"), "w") as fh:
        for rep in reports:
            fh.write(json.dumps(rep, sort_keys=True) + "\n")
    counts = {name: 0 for name in SCENARIOS}
    ells = {name: [] for name in SCENARIOS}
    for rep in reports:
        counts[rep["scenario"]] += 1
        ells[rep["scenario"]].append(rep["ell_hat"])
    with open(os.path.join(args.out, "frequencies.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "count", "mean_ell"])
        for name in SCENARIOS:
            mean_ell = sum(ells[name]) / len(ells[name]) if ells[name] else 0.0
            writer.writerow([name, counts[name], repr(mean_ell)])
    log.info("montecarlo: %d runs, counts %s", len(reports), counts)
    return EXIT_OK


def cmd_dynsys(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.mode == "orbit":
        points = dyn.orbit(_parse_point(args.p), _parse_point(args.q), args.rho, args.steps)
        trajio.write_orbit_csv(os.path.join(args.out, "orbit.csv"), points, args.rho)
        return EXIT_OK
    if args.mode == "boundary":
        res = dyn.boundary_orbit(_parse_point(args.p), _parse_point(args.q),
                                 args.rho, args.steps)
        trajio.write_orbit_csv(os.path.join(args.out, "boundary_orbit.csv"),
                               res.points, args.rho)
        trajio.write_json(os.path.join(args.out, "boundary_limits.json"), {
            "edge": res.edge,
            "p_star": list(res.p_star),
            "amplitude": res.amplitude,
            "q_limit_even": list(res.q_limit_even),
            "q_limit_odd": list(res.q_limit_odd),
        })
        return EXIT_OK
    ladder = [float(z) for z in args.z_ladder.split(",")]
    report = dyn.verify_newas(args.rho, x=args.x, alpha=args.alpha, beta=args.beta,
                              z_ladder=ladder, phase_locked=args.phase_locked)
    trajio.write_json(os.path.join(args.out, "newas.json"), report)
    return EXIT_OK


def cmd_spectral(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    n = args.grid_n
    worst = 0.0
    rows = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            p = (i / n, j / n, k / n)
            if sx.is_vertex(p, tol=1e-9):
                continue
            data = sx.eigen_data(p)
            m = sx.transition_matrix(p)
            chi_val = sx.chi(p)
            norm = sx.operator_norm_L(p)
            res = max(
                sx.l1(tuple(a - data.lambda0 * b for a, b in zip(sx.mat_vec(m, data.e0), data.e0))),
                sx.l1(tuple(a - data.lambda_minus1 * b
                            for a, b in zip(sx.mat_vec(m, data.e_minus1), data.e_minus1))),
                abs(data.lambda0 + data.lambda_minus1 + 1.0),
                abs(data.lambda0 * data.lambda_minus1 - sx.eigenvalue_product(p)),
                abs(norm - (1.0 - chi_val)),
            )
            worst = max(worst, res)
            rows.append([repr(v) for v in (*p, data.lambda0, data.lambda_minus1,
                                           chi_val, norm, res)])
    with open(os.path.join(args.out, "spectral.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z", "lambda0", "lambda_minus1", "chi",
                         "norm_L", "residual"])
        writer.writerows(rows)
    log.info("spectral: %d grid points, worst residual %.3e", len(rows), worst)
    if worst > args.tol:
        raise ToleranceError(f"worst spectral residual {worst:.3e} exceeds {args.tol:.3e}")
    return EXIT_OK


def cmd_classify(args) -> int:
    data = trajio.read_trajectory_csv(args.trajectory)
    thetas = data["theta"]
    vs = []
    for th, pi in zip(thetas, data["pi"]):
        q_eq = sx.equilibrium_q(th)
        vs.append(tuple(pi[i] - q_eq[i] for i in range(3)))
    thresholds = Thresholds(tail_window=args.tail_window)
    rep = classify_series(thetas, vs, thresholds)
    out = rep.to_dict()
    print(json.dumps(out, sort_keys=True, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="errw",
                                     description="Reinforced branching walk on a triangle")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one trajectory")
    sim.add_argument("--config", required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--stride", type=int, default=None)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    mc = sub.add_parser("montecarlo", help="replicate and tabulate scenarios")
    mc.add_argument("--config", required=True)
    mc.add_argument("--seed", type=int, default=None)
    mc.add_argument("--stride", type=int, default=None)
    mc.add_argument("--jobs", type=int, default=1)
    mc.add_argument("--out", required=True)
    mc.set_defaults(func=cmd_montecarlo)

    dy = sub.add_parser("dynsys", help="deterministic dynamics tools")
    dy.add_argument("mode", choices=["orbit", "boundary", "newas"])
    dy.add_argument("--p", default="0.4,0.35,0.25")
    dy.add_argument("--q", default="0.3,0.3,0.4")
    dy.add_argument("--rho", type=float, default=0.5)
    dy.add_argument("--steps", type=int, default=200)
    dy.add_argument("--x", type=float, default=0.5)
    dy.add_argument("--alpha", type=float, default=0.0)
    dy.add_argument("--beta", type=float, default=0.25)
    dy.add_argument("--z-ladder", default="1e-2,1e-3,1e-4")
    dy.add_argument("--phase-locked", action="store_true")
    dy.add_argument("--out", required=True)
    dy.set_defaults(func=cmd_dynsys)

    sp = sub.add_parser("spectral", help="grid sweep of spectral identities")
    sp.add_argument("--grid-n", type=int, default=50)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_spectral)

    cl = sub.add_parser("classify", help="classify a trajectory CSV")
    cl.add_argument("trajectory")
    cl.add_argument("--tail-window", type=int, default=200)
    cl.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (trajio.ConfigError, osp.InvalidOffspring, sx.VertexPoint, sx.NotBoundary,
            InsufficientTail, ValueError) as exc:
        log.error("configuration error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ToleranceError as exc:
        log.error("tolerance violation: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
