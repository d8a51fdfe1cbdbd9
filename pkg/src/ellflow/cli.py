"""Command-line front end: config-driven runs emitting CSV/JSON artifacts.

Exit codes: 0 success, 1 input error, 2 not converged within t_max,
3 invariant verdict failure, 4 spectral gap above tolerance.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import asymptotics as asym_mod
from . import flow as flow_mod
from . import fock as fock_mod
from . import invariants as inv_mod
from . import linalg
from .errors import FlowError, InputError, NotConverged
from .problem import FlowProblem, default_config
from .scenarios import generate

SEED_ENV = "ELLIPTIC_FLOW_SEED"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_VERDICT = 3
EXIT_SPECTRAL_GAP = 4


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputError("config root must be a JSON object")
    return obj


def _problem_from_config(cfg: dict) -> FlowProblem:
    if "problem" in cfg:
        try:
            return FlowProblem.from_json(cfg["problem"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
    if "scenario" in cfg:
        spec = cfg["scenario"]
        try:
            seed = int(os.environ.get(SEED_ENV, spec.get("seed", 0)))
            scn = generate(seed, spec.get("regime", ["bounded"]), int(spec.get("dim", 2)))
        except (FlowError, KeyError, TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        return scn.problem
    raise InputError("config needs a 'problem' or 'scenario' section")


def _config_overrides(cfg: dict, args) -> dict:
    overrides = dict(cfg.get("integrator", {}))
    for key, attr in (
        ("rtol", "rtol"),
        ("atol", "atol"),
        ("t_max", "t_max"),
        ("stop_tol", "stop_tol"),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            overrides[key] = val
    return overrides


def _write_manifest(out_dir: Path, command: str, args_echo: dict, artifacts: list, overrides: dict | None = None) -> None:
    checksums = {}
    for name in artifacts:
        p = out_dir / name
        checksums[name] = hashlib.sha256(p.read_bytes()).hexdigest()
    manifest = {
        "command": command,
        "inputs": args_echo,
        "integrator_overrides": overrides or {},
        "out_dir": str(out_dir),
        "seed_env": os.environ.get(SEED_ENV),
        "artifacts": checksums,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _trajectory_rows(traj, problem):
    grid = flow_mod.sample_grid(traj, 200)
    rows = []
    for t in grid:
        st = flow_mod.dense_eval(traj, float(t))
        fd = inv_mod.frakD(st, problem)
        fb = inv_mod.frakB(st, problem)
        rows.append(
            (
                float(t),
                float(np.linalg.norm(st.d)),
                linalg.norm(st.d, "operator"),
                float(np.trace(st.delta).real),
                inv_mod.motion_trace(st, problem),
                linalg.min_eigenvalue(fd),
                linalg.norm(fb, "trace"),
            )
        )
    return rows


def _write_trajectory_csv(path: Path, rows) -> None:
    header = "t,hs_norm_D,op_norm_D,tr_Delta,tr_motion,zeta,frakB_trace_norm"
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _run_flow(cfg: dict, args, out_dir: Path):
    problem = _problem_from_config(cfg)
    config = default_config(problem, **_config_overrides(cfg, args))
    traj = flow_mod.integrate(problem, config)
    return problem, config, traj


def cmd_flow(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _load_config(args.config)
    problem, _, traj = _run_flow(cfg, args, out_dir)
    _write_trajectory_csv(out_dir / "trajectory.csv", _trajectory_rows(traj, problem))
    final = traj.states[-1]
    state_obj = {"state": final.to_json(), "stats": traj.stats}
    (out_dir / "state_final.json").write_text(json.dumps(state_obj, indent=2))
    _write_manifest(
        out_dir,
        "flow",
        {"config": args.config},
        ["trajectory.csv", "state_final.json"],
        _config_overrides(cfg, args),
    )
    return EXIT_OK if traj.reached_stop else EXIT_NOT_CONVERGED


def cmd_invariants(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _load_config(args.config)
    problem, _, traj = _run_flow(cfg, args, out_dir)
    report = inv_mod.audit(traj)
    (out_dir / "invariants.json").write_text(json.dumps(report.to_json(), indent=2))
    _write_manifest(
        out_dir, "invariants", {"config": args.config}, ["invariants.json"],
        _config_overrides(cfg, args),
    )
    return EXIT_OK if report.all_asserted_hold else EXIT_VERDICT


def cmd_asymptote(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _load_config(args.config)
    _, _, traj = _run_flow(cfg, args, out_dir)
    try:
        result = asym_mod.limit_operator(traj)
    except NotConverged as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    (out_dir / "asymptotics.json").write_text(json.dumps(result.to_json(), indent=2))
    _write_manifest(
        out_dir, "asymptote", {"config": args.config}, ["asymptotics.json"],
        _config_overrides(cfg, args),
    )
    return EXIT_OK


def cmd_fock(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _load_config(args.config)
    problem, config, traj = _run_flow(cfg, args, out_dir)
    ops = fock_mod.jordan_wigner(problem.dim)
    try:
        asym = asym_mod.limit_operator(traj)
    except NotConverged as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    comparison = fock_mod.validate(problem, asym, ops)
    (out_dir / "spectra.json").write_text(json.dumps(comparison.to_json(), indent=2))
    _write_manifest(
        out_dir, "fock", {"config": args.config}, ["spectra.json"],
        _config_overrides(cfg, args),
    )
    return EXIT_OK if comparison.max_abs_gap <= args.tolerance else EXIT_SPECTRAL_GAP


def cmd_scalar(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    alpha, beta = args.alpha, args.beta
    t_max = args.t_max if args.t_max is not None else 2.5
    grid = np.linspace(0.0, t_max, 201)
    ups0 = np.array([[-alpha]], dtype=np.complex128)
    d0 = np.array([[1j * beta]], dtype=np.complex128)
    mu = abs(alpha) + 1.0
    problem = FlowProblem(ups0, d0, mu=mu, epsilon=0.5)
    config = default_config(problem, t_max=t_max, stop_tol=1e-300)
    traj = flow_mod.integrate(problem, config)
    lines = ["t,f_closed,g_closed,f_numeric,g_numeric,abs_err"]
    closed = None if beta == 0.0 else asym_mod.ScalarFlow(alpha, beta)
    for t in grid:
        st = flow_mod.dense_eval(traj, float(t))
        f_num = float(st.delta[0, 0].real)
        g_num = float(abs(st.d[0, 0]))
        if closed is None:
            f_cl, g_cl = 0.0, 0.0  # constant flow: closed form degenerates
        else:
            f_cl, g_cl = asym_mod.scalar_closed_form(closed, float(t))
        err = max(abs(f_cl - f_num), abs(g_cl - g_num))
        lines.append(",".join(_fmt(x) for x in (t, f_cl, g_cl, f_num, g_num, err)))
    (out_dir / "scalar.csv").write_text("\n".join(lines) + "\n")
    _write_manifest(
        out_dir,
        "scalar",
        {"alpha": alpha, "beta": beta, "t_max": t_max},
        ["scalar.csv"],
    )
    return EXIT_OK


def _sweep_one(payload):
    sub_cfg, out_sub, argv_extra = payload
    sub_dir = Path(out_sub)
    sub_dir.mkdir(parents=True, exist_ok=True)
    cfg_path = sub_dir / "config.json"
    cfg_path.write_text(json.dumps(sub_cfg, indent=2))
    args = _build_parser().parse_args(
        ["flow", "--config", str(cfg_path), "--out", str(sub_dir)] + argv_extra
    )
    try:
        return cmd_flow(args)
    except FlowError as exc:
        print(f"sweep run failed: {exc}", file=sys.stderr)
        return EXIT_INPUT


def cmd_sweep(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _load_config(args.config)
    runs = cfg.get("sweep")
    if not isinstance(runs, list) or not runs:
        raise InputError("sweep config needs a nonempty 'sweep' list")
    payloads = [
        (run, str(out_dir / f"run_{i:03d}"), [])
        for i, run in enumerate(runs)
    ]
    codes = []
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_sweep_one, payloads))
    else:
        codes = [_sweep_one(p) for p in payloads]
    (out_dir / "sweep_summary.json").write_text(
        json.dumps({"exit_codes": codes}, indent=2)
    )
    return max(codes) if codes else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellflow",
        description="Integrate the elliptic matrix flow and audit its invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--rtol", type=float, default=None)
        p.add_argument("--atol", type=float, default=None)
        p.add_argument("--t-max", dest="t_max", type=float, default=None)
        p.add_argument("--stop-tol", dest="stop_tol", type=float, default=None)

    add_common(sub.add_parser("flow", help="integrate and dump the trajectory"))
    add_common(sub.add_parser("invariants", help="audit invariants along the flow"))
    add_common(sub.add_parser("asymptote", help="extract the infinite-time limit"))
    p_fock = sub.add_parser("fock", help="validate the Fock-space diagonalization")
    add_common(p_fock)
    p_fock.add_argument("--tolerance", type=float, default=1e-5)
    p_scalar = sub.add_parser("scalar", help="closed form vs integrator at dim 1")
    p_scalar.add_argument("--alpha", type=float, required=True)
    p_scalar.add_argument("--beta", type=float, required=True)
    p_scalar.add_argument("--t-max", dest="t_max", type=float, default=None)
    p_scalar.add_argument("--out", required=True)
    p_sweep = sub.add_parser("sweep", help="run independent scenarios in parallel")
    add_common(p_sweep)
    p_sweep.add_argument("--jobs", type=int, default=1)
    return parser


_COMMANDS = {
    "flow": cmd_flow,
    "invariants": cmd_invariants,
    "asymptote": cmd_asymptote,
    "fock": cmd_fock,
    "scalar": cmd_scalar,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
