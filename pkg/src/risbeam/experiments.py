"""Monte Carlo sweep harness: seeded trials, records, summaries, CSV output.

Five sweep families mirror the study's experiment axes: convergence
(Tx-RIS distance), SE vs SNR, SE vs normalized error level, SE vs Tx
antenna count and SE vs RIS element count. Each (model, K, value, trial)
cell derives its own seed from the master seed by a keyed split, so
adding sweep points or running cells in parallel never perturbs other
trials, and a record's seed alone reproduces it.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cee import ErrorSpec, make_channel_set
from .config import MODELS, SWEEP_NAMES, SystemConfig
from .geometry import build_scene
from .solver import BeamformingState, bcd_solve

log = logging.getLogger(__name__)

FAMILY_IDS = {"convergence": 1, "se_vs_snr": 2, "se_vs_tau": 3, "se_vs_ntx": 4, "se_vs_nris": 5}
MODEL_IDS = {m: i + 1 for i, m in enumerate(MODELS)}

RECORD_COLUMNS = (
    "family", "model", "K", "sweep_name", "sweep_value", "trial", "seed",
    "se_eval_bits", "se_design_bits", "outer_iters", "converged", "wall_s",
)
SUMMARY_COLUMNS = (
    "family", "model", "K", "sweep_value", "mean_se", "stderr_se", "n", "conv_rate",
)


@dataclass(frozen=True)
class ExperimentRecord:
    """One Monte Carlo trial at one sweep point.

    outer_iters == 0 marks a failed trial (numerical error, recorded and
    skipped by summaries rather than aborting the sweep).
    """

    family: str
    model: str
    k: int
    sweep_name: str
    sweep_value: float
    trial: int
    seed: int
    se_eval_bits: float
    se_design_bits: float
    outer_iters: int
    converged: bool
    wall_s: float

    @property
    def failed(self) -> bool:
        return self.outer_iters == 0

    def sort_key(self):
        return (self.family, self.model, self.k, self.sweep_value, self.trial)


@dataclass(frozen=True)
class SummaryRow:
    family: str
    model: str
    k: int
    sweep_value: float
    mean_se: float
    stderr_se: float
    n: int
    conv_rate: float


def trial_seed(master: int, family: str, model: str, k: int, value: float, trial: int) -> int:
    """Counter-based split keyed on the full cell identity."""
    vbits = int(np.float64(value).view(np.uint64))
    ss = np.random.SeedSequence(
        [int(master), FAMILY_IDS[family], MODEL_IDS[model], int(k), vbits, int(trial)]
    )
    return int(ss.generate_state(1, np.uint64)[0])


def apply_sweep_value(cfg: SystemConfig, family: str, value: float) -> SystemConfig:
    """Specialize the base config to one sweep point."""
    if family == "convergence":
        tx = cfg.tx_pos
        return dataclasses.replace(cfg, tx_pos=(tx[0], -float(value), tx[2]))
    if family == "se_vs_snr":
        return dataclasses.replace(cfg, snr_db=float(value), p_tx_w=None)
    if family == "se_vs_tau":
        return dataclasses.replace(cfg, tau_g=float(value))
    if family == "se_vs_ntx":
        n_tx = int(value)
        n_s = min(cfg.n_streams, n_tx)  # keep auto (0); clamp explicit n_s to n_tx
        return dataclasses.replace(cfg, n_tx=n_tx, n_streams=n_s)
    if family == "se_vs_nris":
        side = math.isqrt(int(value))
        return dataclasses.replace(cfg, n_ry=side, n_rz=side)
    raise ValueError(f"unknown sweep family {family!r}")


def expand_runs(cfg: SystemConfig) -> list[tuple[str, int, float, int]]:
    """All (model, k, value, trial) cells of the sweep, in canonical order."""
    sw = cfg.sweep
    combos: list[tuple[str, int]] = []
    for model in sw.models:
        if model == "piecewise":
            combos.extend(("piecewise", k) for k in sw.k_values)
        else:
            combos.append((model, 0))
    return [
        (model, k, float(value), trial)
        for model, k in combos
        for value in sw.values
        for trial in range(sw.trials)
    ]


def run_trial(
    cfg: SystemConfig, model: str, k: int, value: float, trial: int
) -> tuple[ExperimentRecord, BeamformingState | None]:
    """One seeded trial; failures are captured in the record, not raised."""
    family = cfg.sweep.family
    seed = trial_seed(cfg.seed, family, model, k, value, trial)
    point = apply_sweep_value(cfg, family, value)
    point = dataclasses.replace(point, model=model, k=k if k > 0 else 1)
    base = dict(
        family=family, model=model, k=k, sweep_name=SWEEP_NAMES[family],
        sweep_value=float(value), trial=trial, seed=seed,
    )
    t0 = time.perf_counter() if cfg.timing else 0.0
    try:
        rng = np.random.default_rng(seed)
        geom = build_scene(point)
        cs = make_channel_set(
            geom, point.wavelength, model, point.k,
            ErrorSpec(tau_g=point.tau_g, tau_r=point.tau_r, seed=seed),
            rng=rng, l_rx=point.l_rx, nlos_gain_db=point.nlos_gain_db,
            normalize=point.pathloss_reference,
        )
        state = bcd_solve(
            cs, point.solver, point.p_tx, point.noise_power_w, point.n_s, rng,
        )
    except Exception as exc:  # noqa: BLE001 - a sweep must survive bad cells
        log.warning("trial failed (%s k=%s value=%s trial=%d): %s", model, k, value, trial, exc)
        rec = ExperimentRecord(
            **base, se_eval_bits=0.0, se_design_bits=0.0,
            outer_iters=0, converged=False, wall_s=0.0,
        )
        return rec, None
    wall = time.perf_counter() - t0 if cfg.timing else 0.0
    rec = ExperimentRecord(
        **base,
        se_eval_bits=state.se_eval,
        se_design_bits=state.se_design,
        outer_iters=state.iters,
        converged=state.converged,
        wall_s=wall,
    )
    return rec, state


def _run_cell(args):
    cfg, model, k, value, trial = args
    record, state = run_trial(cfg, model, k, value, trial)
    return record, (state.trace if state is not None else [])


def run_sweep(
    cfg: SystemConfig, workers: int | None = None, with_traces: bool = False
):
    """Execute every cell of the configured sweep.

    Trials are independent; with workers > 1 they are distributed over
    processes. Output ordering is canonical (sorted by cell key) and
    independent of scheduling. With with_traces=True (used by the
    convergence family, which studies per-iteration behavior) also
    returns {record: per-outer-iteration trace rows}.
    """
    runs = expand_runs(cfg)
    if workers is None:
        workers = cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)
    log.info("sweep %s: %d cells, %d worker(s)", cfg.sweep.family, len(runs), workers)
    args = [(cfg, model, k, value, trial) for model, k, value, trial in runs]
    if workers <= 1:
        out = [_run_cell(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_run_cell, args, chunksize=4))
    out.sort(key=lambda pair: pair[0].sort_key())
    records = [rec for rec, _ in out]
    n_fail = sum(r.failed for r in records)
    if n_fail:
        log.warning("%d of %d trials failed", n_fail, len(records))
    if with_traces:
        return records, {rec: trace for rec, trace in out}
    return records


def summarize(records: list[ExperimentRecord]) -> list[SummaryRow]:
    """Mean/stderr of the evaluated SE per sweep cell.

    Failed trials are excluded from the statistics; n counts the
    aggregated (non-failed) records and conv_rate is the converged
    fraction among them.
    """
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for rec in records:
        if rec.failed:
            continue
        groups.setdefault((rec.family, rec.model, rec.k, rec.sweep_value), []).append(rec)
    rows = []
    for (family, model, k, value), recs in sorted(groups.items()):
        ses = np.array([r.se_eval_bits for r in recs])
        n = len(recs)
        stderr = float(np.std(ses, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        rows.append(SummaryRow(
            family=family, model=model, k=k, sweep_value=value,
            mean_se=float(np.mean(ses)), stderr_se=stderr, n=n,
            conv_rate=float(np.mean([r.converged for r in recs])),
        ))
    return rows


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records_csv(records: list[ExperimentRecord], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow([
                r.family, r.model, r.k, r.sweep_name, _fmt(r.sweep_value), r.trial,
                r.seed, _fmt(r.se_eval_bits), _fmt(r.se_design_bits),
                r.outer_iters, _fmt(r.converged), _fmt(r.wall_s),
            ])


def write_summary_csv(rows: list[SummaryRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for r in rows:
            writer.writerow([
                r.family, r.model, r.k, _fmt(r.sweep_value),
                _fmt(r.mean_se), _fmt(r.stderr_se), r.n, _fmt(r.conv_rate),
            ])


def write_trace_rows(rows, path: str) -> None:
    """Per-outer-iteration dump of one solve."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "outer_iter", "objective", "se_design", "se_eval",
            "adpm_iters", "adpm_residual", "eta",
        ])
        for t in rows:
            writer.writerow([
                t.outer_iter, _fmt(t.objective), _fmt(t.se_design), _fmt(t.se_eval),
                t.adpm_iters, _fmt(t.adpm_residual), _fmt(t.eta),
            ])


def write_trace_csv(state: BeamformingState, path: str) -> None:
    write_trace_rows(state.trace, path)


def trace_filename(rec: ExperimentRecord) -> str:
    return (
        f"trace_{rec.model}_K{rec.k}_{rec.sweep_name}{rec.sweep_value:g}_t{rec.trial}.csv"
    )
