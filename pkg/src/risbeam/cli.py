"""Command-line entry point: run sweeps, validate a config, trace one solve.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

import numpy as np

from . import experiments
from .cee import ErrorSpec, make_channel_set
from .config import ConfigError, SystemConfig, apply_paper_scale, parse_config, to_ini, validate_config
from .covariance import NumericalError, sigma_design, sigma_eval
from .geometry import build_scene
from .solver import bcd_solve

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risbeam",
        description="RIS-aided MIMO beamforming simulator (near / piece-wise / far-field models)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("run", "execute the configured sweep and write records/summary CSVs"),
        ("validate", "parse the config and run the one-trial invariant suite"),
        ("trace", "run a single trial and dump the per-iteration trace CSV"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", metavar="PATH", default=None, help="INI config file")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--threads", type=int, default=None, help="worker processes (0 = machine)")
        p.add_argument("--out", metavar="DIR", default=None, help="output directory override")
        p.add_argument("--paper-scale", action="store_true", help="full-scale arrays and scene")
        p.add_argument("--timing", action="store_true", help="record wall times (breaks bitwise reproducibility)")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "validate":
            p.add_argument("--echo", action="store_true", help="print the effective config INI")
    return parser


def _load_config(args: argparse.Namespace) -> SystemConfig:
    cfg = parse_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.timing:
        overrides["timing"] = True
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    if args.paper_scale:
        cfg = apply_paper_scale(cfg)
    validate_config(cfg)
    return cfg


def cmd_run(cfg: SystemConfig) -> int:
    os.makedirs(cfg.out_dir, exist_ok=True)
    if cfg.sweep.family == "convergence":
        # this family studies per-iteration behavior; keep every solve's trace
        records, traces = experiments.run_sweep(cfg, with_traces=True)
        for rec, rows in traces.items():
            if rows:
                experiments.write_trace_rows(
                    rows, os.path.join(cfg.out_dir, experiments.trace_filename(rec))
                )
    else:
        records = experiments.run_sweep(cfg)
    summary = experiments.summarize(records)
    rec_path = os.path.join(cfg.out_dir, "records.csv")
    sum_path = os.path.join(cfg.out_dir, "summary.csv")
    cfg_path = os.path.join(cfg.out_dir, "effective-config.ini")
    experiments.write_records_csv(records, rec_path)
    experiments.write_summary_csv(summary, sum_path)
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(to_ini(cfg))
    for row in summary:
        log.info(
            "%s %s K=%d %s=%g: SE %.3f +- %.3f (n=%d, conv %.0f%%)",
            row.family, row.model, row.k, experiments.SWEEP_NAMES[row.family],
            row.sweep_value, row.mean_se, row.stderr_se, row.n, 100 * row.conv_rate,
        )
    print(rec_path)
    print(sum_path)
    return EXIT_OK


def _check(name: str, ok: bool, detail: str = "") -> bool:
    print(f"  [{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    return ok


def cmd_validate(cfg: SystemConfig, echo: bool = False) -> int:
    """One-trial invariant suite on the effective config."""
    if echo:
        sys.stdout.write(to_ini(cfg))
        return EXIT_OK
    ok = True
    geom = build_scene(cfg)
    pw = geom.pairwise_tx_ris
    ok &= _check(
        "reference distance inside the pairwise range",
        float(pw.min()) <= geom.d_tr <= float(pw.max()),
        f"d_tr={geom.d_tr:.4f} m",
    )
    centers = geom.subsurface_centers(1)
    grid_center = geom.ris_positions.mean(axis=0)
    ok &= _check(
        "subsurface centroids average to the RIS center",
        float(np.linalg.norm(centers.mean(axis=0) - grid_center)) < 1e-12,
    )
    seed = experiments.trial_seed(cfg.seed, cfg.sweep.family, cfg.model, cfg.k, 0.0, 0)
    rng = np.random.default_rng(seed)
    cs = make_channel_set(
        geom, cfg.wavelength, cfg.model, cfg.k,
        ErrorSpec(tau_g=cfg.tau_g, tau_r=cfg.tau_r, seed=seed),
        rng=rng, l_rx=cfg.l_rx, nlos_gain_db=cfg.nlos_gain_db,
        normalize=cfg.pathloss_reference,
    )
    recon = np.max(np.abs(cs.g_true - (cs.g_hat + cs.delta_g + cs.delta_m)))
    scale = float(np.max(np.abs(cs.g_true)))
    ok &= _check("reconstruction identity", recon <= 1e-12 * max(scale, 1.0), f"gap {recon:.2e}")
    state = bcd_solve(cs, cfg.solver, cfg.p_tx, cfg.noise_power_w, cfg.n_s, rng)
    p_ratio = float(np.linalg.norm(state.w) ** 2) / cfg.p_tx
    ok &= _check("power feasibility", p_ratio <= 1.0 + 1e-9, f"||W||^2/P = {p_ratio:.12f}")
    phi_dev = float(np.max(np.abs(np.abs(state.phi) - 1.0)))
    ok &= _check("unit-modulus phases", phi_dev < 1e-9, f"max deviation {phi_dev:.2e}")
    seq = []
    for t in state.trace:
        seq += [t.obj_after_z, t.obj_after_omega, t.obj_after_w, t.objective]
    max_inc = max((seq[i + 1] - seq[i] for i in range(len(seq) - 1)), default=0.0)
    ok &= _check("objective monotone across sub-steps", max_inc <= 1e-9, f"max increase {max_inc:.2e}")
    sig_d = sigma_design(cs, state.w, state.phi, cfg.noise_power_w)
    sig_e = sigma_eval(cs, state.w, state.phi, cfg.noise_power_w)
    herm = max(
        float(np.linalg.norm(s.matrix - s.matrix.conj().T)) for s in (sig_d, sig_e)
    )
    ok &= _check("covariances Hermitian PSD", herm < 1e-12, "verified at construction")
    ok &= _check(
        "solver finished",
        state.iters >= 1,
        f"{state.iters} iterations, converged={state.converged}, SE {state.se_eval:.3f}",
    )
    if not ok:
        raise NumericalError("validation failed")
    return EXIT_OK


def cmd_trace(cfg: SystemConfig) -> int:
    os.makedirs(cfg.out_dir, exist_ok=True)
    seed = experiments.trial_seed(cfg.seed, cfg.sweep.family, cfg.model, cfg.k, 0.0, 0)
    rng = np.random.default_rng(seed)
    geom = build_scene(cfg)
    cs = make_channel_set(
        geom, cfg.wavelength, cfg.model, cfg.k,
        ErrorSpec(tau_g=cfg.tau_g, tau_r=cfg.tau_r, seed=seed),
        rng=rng, l_rx=cfg.l_rx, nlos_gain_db=cfg.nlos_gain_db,
        normalize=cfg.pathloss_reference,
    )
    state = bcd_solve(cs, cfg.solver, cfg.p_tx, cfg.noise_power_w, cfg.n_s, rng)
    path = os.path.join(cfg.out_dir, "trace.csv")
    experiments.write_trace_csv(state, path)
    log.info(
        "trace: %d iterations, converged=%s, SE(design)=%.3f SE(eval)=%.3f",
        state.iters, state.converged, state.se_design, state.se_eval,
    )
    print(path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _load_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "validate":
            return cmd_validate(cfg, echo=getattr(args, "echo", False))
        return cmd_trace(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
