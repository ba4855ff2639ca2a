"""Channel estimation errors and model mismatch.

The ground truth Tx-RIS link is always the spherical-wave (near-field)
matrix. A structured model of it (near / piece-wise / far) leaves a
deterministic mismatch dM = G_true - G_model; estimation adds an i.i.d.
circularly-symmetric Gaussian error dG on top, so that

    G_true = G_hat + dG + dM        (exactly, by construction)

with G_hat = G_model - dG. The RIS-Rx link has no structured model, only
an estimation error: R = R_hat + dR. Error variances are calibrated from
normalized error levels tau in [0, 1): per-entry variance
sigma^2 = tau * ||G_model||_F^2 / ((1 - tau) * n_entries), which makes
the expected error-to-estimate energy ratio E||dG||^2 / E||G_hat||^2
equal to tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    PathParams,
    build_far_field,
    build_near_field,
    build_piecewise,
    build_ris_rx,
    far_field_gain,
    los_path_gain,
    sample_path_params,
)
from .geometry import SceneGeometry

MODEL_NEAR = "near"
MODEL_PIECEWISE = "piecewise"
MODEL_FAR = "far"


@dataclass(frozen=True)
class ErrorSpec:
    """Normalized error levels and the RNG seed of one realization."""

    tau_g: float = 0.0
    tau_r: float | None = None   # None = same level as tau_g
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.tau_g < 1.0:
            raise ValueError("tau_g: tau must be in [0,1)")
        if self.tau_r is not None and not 0.0 <= self.tau_r < 1.0:
            raise ValueError("tau_r: tau must be in [0,1)")

    @property
    def tau_r_value(self) -> float:
        return self.tau_g if self.tau_r is None else self.tau_r


@dataclass(frozen=True)
class ChannelSet:
    """Ground truth, structured model, mismatch, and estimates of one trial."""

    model: str
    k: int
    g_true: np.ndarray    # (n_r, n_tx) spherical-wave truth
    g_model: np.ndarray   # structured model of g_true
    delta_m: np.ndarray   # g_true - g_model, deterministic
    g_hat: np.ndarray     # estimate seen by the optimizer
    delta_g: np.ndarray   # sampled estimation error, g_model - g_hat
    r_true: np.ndarray    # (n_rx, n_r)
    r_hat: np.ndarray
    delta_r: np.ndarray
    sigma_g2: float       # per-entry error variance of the Tx-RIS link
    sigma_r2: float
    paths: PathParams

    @property
    def n_r(self) -> int:
        return self.g_true.shape[0]

    @property
    def n_tx(self) -> int:
        return self.g_true.shape[1]

    @property
    def n_rx(self) -> int:
        return self.r_true.shape[0]


def sample_matrix_gaussian(
    rows: int, cols: int, variance: float, rng: np.random.Generator
) -> np.ndarray:
    """i.i.d. CN(0, variance) entries; real/imag parts carry variance/2 each."""
    if variance < 0:
        raise ValueError("variance must be >= 0")
    if variance == 0.0:
        return np.zeros((rows, cols), dtype=complex)
    s = np.sqrt(variance / 2.0)
    return s * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))


def calibrate_variance(g_struct: np.ndarray, tau: float) -> float:
    """Per-entry error variance hitting a normalized error level tau.

    Solves E||dG||_F^2 / E||G + dG||_F^2 = tau for the entry variance,
    giving tau * ||G||_F^2 / ((1 - tau) * size).
    """
    if not 0.0 <= tau < 1.0:
        raise ValueError("tau must be in [0,1)")
    if tau == 0.0:
        return 0.0
    energy = float(np.linalg.norm(g_struct) ** 2)
    return tau * energy / ((1.0 - tau) * g_struct.size)


def build_model_channel(geom: SceneGeometry, lam: float, model: str, k: int) -> np.ndarray:
    if model == MODEL_NEAR:
        return build_near_field(geom, lam)
    if model == MODEL_PIECEWISE:
        return build_piecewise(geom, lam, k)
    if model == MODEL_FAR:
        return build_far_field(geom, lam)
    raise ValueError(f"unknown channel model {model!r}")


def make_channel_set(
    geom: SceneGeometry,
    lam: float,
    model: str,
    k: int,
    spec: ErrorSpec,
    rng: np.random.Generator | None = None,
    l_rx: int = 3,
    nlos_gain_db: float = -10.0,
    normalize: bool = True,
) -> ChannelSet:
    """Draw one full channel realization for a given structured model.

    With normalize=True (the default) the Tx-RIS matrices are divided by
    the reference path gain |gamma(d_tr)| and R by |beta(d_rr)|, a
    model-independent common scale that keeps transmit-SNR sweeps in a
    numerically meaningful range; mismatch and normalized error levels
    are scale-invariant. RNG consumption order is fixed: NLoS paths,
    then dG, then dR.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    g_scale = np.abs(far_field_gain(geom, lam)) if normalize else 1.0
    r_scale = np.abs(los_path_gain(geom, lam)) if normalize else 1.0

    g_true = build_near_field(geom, lam) / g_scale
    g_model = build_model_channel(geom, lam, model, k) / g_scale
    delta_m = g_true - g_model if model != MODEL_NEAR else np.zeros_like(g_true)

    paths = sample_path_params(geom, lam, l_rx=l_rx, nlos_gain_db=nlos_gain_db, rng=rng)
    r_true = build_ris_rx(geom, lam, paths) / r_scale

    sigma_g2 = calibrate_variance(g_model, spec.tau_g)
    delta_g = sample_matrix_gaussian(g_model.shape[0], g_model.shape[1], sigma_g2, rng)
    g_hat = g_model - delta_g

    sigma_r2 = calibrate_variance(r_true, spec.tau_r_value)
    delta_r = sample_matrix_gaussian(r_true.shape[0], r_true.shape[1], sigma_r2, rng)
    r_hat = r_true - delta_r

    return ChannelSet(
        model=model,
        k=k if model == MODEL_PIECEWISE else 0,
        g_true=g_true,
        g_model=g_model,
        delta_m=delta_m,
        g_hat=g_hat,
        delta_g=delta_g,
        r_true=r_true,
        r_hat=r_hat,
        delta_r=delta_r,
        sigma_g2=sigma_g2,
        sigma_r2=sigma_r2,
        paths=paths,
    )
