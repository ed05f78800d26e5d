"""Command-line entry point: ``gfm-mpc {simulate,cct,doa,sweep,landmarks}``.

Exit codes: 0 success, 2 configuration error, 3 simulation error,
4 degenerate analysis (e.g. unstable without a fault).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis
from .config import ScenarioConfig, defaults_toml, load_config
from .controllers import STRATEGIES
from .exceptions import AnalysisDegenerateError, ConfigError, GfmError, NoEquilibriumError
from .mpc import write_solve_log
from .plant import reference_voltage

EXIT_OK, EXIT_CONFIG, EXIT_SIMULATION, EXIT_DEGENERATE = 0, 2, 3, 4

DEFAULT_SWEEP_VALUES = {
    "fault_voltage": (0.05, 0.1, 0.15, 0.2, 0.25, 0.3),
    "reference_power": (0.4, 0.48, 0.56, 0.64, 0.72, 0.8),
    "horizon": (0.06, 0.1, 0.14, 0.2, 0.26, 0.3),
    "impedance_error": (0.9, 0.95, 1.0, 1.05, 1.1),
}


def _out_dir(args, cfg: ScenarioConfig) -> Path:
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _strategies(arg, default):
    if not arg:
        return tuple(default)
    names = tuple(s.strip() for s in arg.split(",") if s.strip())
    for s in names:
        if s not in STRATEGIES:
            raise ConfigError(f"unknown strategy {s!r}; expected one of {STRATEGIES}")
    return names


def cmd_simulate(args, cfg):
    ref = cfg.controller(args.strategy)
    log_rows = [] if ref.kind == "mpc" else None
    if log_rows is not None:
        ref = ref.replace(solve_log=log_rows)
    traj, verdict = analysis.run_scenario(cfg.scenario, ref, cfg.params, cfg.run.dt, cfg.plant,
                                          post_time=cfg.run.t_post)
    out = _out_dir(args, cfg)
    traj.to_csv(out / "trajectory.csv")
    if log_rows is not None:
        write_solve_log(log_rows, out / "solve_log.csv")
    print(f"strategy {ref.kind}: {verdict.summary()}")
    for t, msg in traj.events:
        print(f"  event at t={t:.4f}: {msg}")
    return EXIT_OK


def cmd_cct(args, cfg):
    names = _strategies(args.strategy, cfg.sweep.strategies)
    tol = args.tol if args.tol is not None else cfg.sweep.tol
    rows = []
    for name in names:
        res = analysis.cct_search(cfg.scenario, cfg.controller(name), cfg.params, tol=tol,
                                  dt=cfg.run.dt, options=cfg.plant)
        rows.append(analysis.SweepRow(cfg.fault_v_g, name, cct_s=res.cct))
        print(f"{name:>13}: CCT {res.cct:.4f} s (bracket [{res.lo:.4f}, {res.hi:.4f}], {res.probes} runs)")
    analysis.write_cct_csv(rows, _out_dir(args, cfg) / "cct.csv")
    return EXIT_OK


def cmd_doa(args, cfg):
    d = cfg.doa
    ref = cfg.controller(args.strategy)
    thetas = np.linspace(0.0, math.pi / 2 - cfg.params.beta, d.n_theta)
    kw = dict(omega_bracket=(d.omega_lo, d.omega_hi), tol=d.tol, dt=cfg.run.dt, workers=args.workers)
    curves = []
    if ref.kind == "cl0" and d.delta_p_ref_max_values:
        for dp in d.delta_p_ref_max_values:
            curves.append(analysis.doa_boundary(ref.replace(delta_p_ref_max=dp), cfg.params, cfg.grid, thetas,
                                                options=cfg.plant, label=f"cl0_dpmax={dp:g}", **kw))
    else:
        curves.append(analysis.doa_boundary(ref, cfg.params, cfg.grid, thetas, options=cfg.plant,
                                            label=ref.kind, **kw))
    if d.compare_unsaturated:
        unsat = replace(cfg.plant, saturation_enabled=False)
        curves.append(analysis.doa_boundary(ref, cfg.params, cfg.grid, thetas, options=unsat,
                                            label=f"{ref.kind}_unsaturated", **kw))
    analysis.write_doa_csv(curves, _out_dir(args, cfg) / "doa.csv")
    for c in curves:
        n_open = int(np.count_nonzero(c.open_low | c.open_high))
        print(f"{c.strategy}: {len(c.theta)} angles, {n_open} open ends")
    return EXIT_OK


def cmd_sweep(args, cfg):
    kind = args.kind or cfg.sweep.kind
    if kind not in analysis.SWEEP_KINDS:
        raise ConfigError(f"unknown sweep kind {kind!r}; expected one of {analysis.SWEEP_KINDS}")
    # configured values belong to the configured kind; another kind on the command line uses its defaults
    values = cfg.sweep.values if cfg.sweep.values and kind == cfg.sweep.kind else DEFAULT_SWEEP_VALUES[kind]
    strategies = _strategies(args.strategy, cfg.sweep.strategies)
    if kind in ("horizon", "impedance_error"):
        strategies = tuple(s for s in strategies if s == "mpc") or ("mpc",)
    refs = tuple(cfg.controller(s) for s in strategies)
    sc = analysis.SweepConfig(kind, tuple(values), refs, cfg.params, cfg.z_g, cfg.fault_v_g, cfg.duration,
                              cfg.t_on, args.tol if args.tol is not None else cfg.sweep.tol,
                              dt=cfg.run.dt, options=cfg.plant)
    rows = analysis.sweep(sc, workers=args.workers)
    out = _out_dir(args, cfg)
    if kind in ("fault_voltage", "reference_power"):
        analysis.write_cct_csv(rows, out / "cct_sweep.csv")
    else:
        analysis.write_trajectory_sweep_csv(rows, out / "trajectory_sweep.csv")
    for r in rows:
        detail = r.error or (f"CCT {r.cct_s:.4f} s" if not math.isnan(r.cct_s) else r.classification)
        print(f"{kind}={r.param:g} {r.strategy}: {detail}")
    return EXIT_OK


def cmd_landmarks(args, cfg):
    p, grid = cfg.params, cfg.grid
    v_ref = reference_voltage(0.0, grid, p, cfg.plant)
    print(f"grid: V_g={grid.v_g:g} p.u., X={grid.x:.4f} p.u., v_ref={v_ref:.4f} p.u.")
    try:
        lm = analysis.landmark_angles(p, grid, v_ref)
    except NoEquilibriumError as exc:
        print(f"theta_eq        : absent ({exc})")
        print(f"theta_zc_sat    : {math.pi / 2 - p.beta:.4f}   pi/2 - beta")
        return EXIT_OK
    ue = "absent (P0 above the saturated power peak)" if lm.theta_ue_sat is None else f"{lm.theta_ue_sat:.4f}"
    print(f"theta_eq        : {lm.theta_eq:.4f}   arcsin(P0 X / (V_g v_ref))")
    print(f"theta_sat       : {lm.theta_sat:.4f}   arccos of the saturation threshold")
    print(f"theta_ue_sat    : {ue}   -beta + arccos(P0 (1 - X C w_n) / (I_max V_g))")
    print(f"theta_zc_sat    : {lm.theta_zc_sat:.4f}   pi/2 - beta")
    print(f"theta_ue_unsat  : {lm.theta_ue_unsat:.4f}   pi - theta_eq")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "cct": cmd_cct,
    "doa": cmd_doa,
    "sweep": cmd_sweep,
    "landmarks": cmd_landmarks,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="gfm-mpc", description=__doc__.splitlines()[0])
    parser.add_argument("--print-defaults", action="store_true", help="print the baseline scenario file and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="scenario TOML file (defaults when omitted)")
        p.add_argument("--out", help="output directory (overrides [output] dir)")
        p.add_argument("--strategy", help="strategy name; cct and sweep accept a comma list")
        p.add_argument("--tol", type=float, help="clearing-time bisection tolerance in s")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        if name == "sweep":
            p.add_argument("kind", nargs="?", choices=analysis.SWEEP_KINDS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.print_defaults:
        sys.stdout.write(defaults_toml())
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        if args.strategy and args.command in ("simulate", "doa"):
            _strategies(args.strategy, ())
        if args.tol is not None and args.tol < cfg.run.dt:
            raise ConfigError(f"--tol must be at least the plant step {cfg.run.dt}")
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AnalysisDegenerateError as exc:
        print(f"degenerate analysis: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (GfmError, ArithmeticError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
