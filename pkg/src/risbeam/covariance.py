"""Interference-plus-noise covariance of the estimated-channel receiver.

With the cascaded estimate H_hat = R_hat Phi G_hat, the residual signal
(channel errors plus mismatch, treated as noise) has covariance

    Sigma = dH_M W W^H dH_M^H                      (mismatch, dH_M = R_hat Phi dM)
          + sigma_r^2 tr(G_hat W W^H G_hat^H) I    (RIS-Rx error)
          + sigma_g^2 tr(W W^H) R_hat R_hat^H      (Tx-RIS error)
          + sigma^2 I                              (thermal)

Two variants are exposed. The "design" variant drops the mismatch term
(a designer does not know dM) and adds the second-order cross term
n_r sigma_g^2 sigma_r^2 tr(W W^H) I, matching the precoder update it is
plugged into; the "evaluation" variant is the full expression above,
used for performance reporting. A Monte Carlo sample covariance serves
as the oracle for both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cee import ChannelSet, sample_matrix_gaussian

DESIGN = "design"
EVALUATION = "evaluation"

_HERM_RTOL = 1e-10


class NumericalError(RuntimeError):
    """A numerical contract was violated (singularity, lost PSD-ness, ...)."""


def _check_phi(phi: np.ndarray, n_r: int) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.shape[0] != n_r:
        raise ValueError(f"phi must have length {n_r}")
    if np.max(np.abs(np.abs(phi) - 1.0)) > 1e-9:
        raise ValueError("non-unit-modulus RIS phase vector")
    return phi


def _verify_psd(sigma: np.ndarray, noise_var: float) -> np.ndarray:
    """Verify Hermitian PSD-ness (no projection); symmetrize rounding dust."""
    scale = float(np.linalg.norm(sigma))
    herm_gap = float(np.linalg.norm(sigma - sigma.conj().T))
    if scale > 0 and herm_gap > _HERM_RTOL * scale:
        raise NumericalError(f"covariance not Hermitian: gap {herm_gap:.3e}")
    sigma = 0.5 * (sigma + sigma.conj().T)
    min_eig = float(np.linalg.eigvalsh(sigma)[0])
    if min_eig < noise_var - max(1e-10, 1e-12 * scale):
        raise NumericalError(
            f"covariance lost positive definiteness: min eig {min_eig:.3e} "
            f"vs thermal floor {noise_var:.3e}"
        )
    return sigma


@dataclass(frozen=True)
class NoiseCovariance:
    """Covariance matrix plus its individually-PSD addends."""

    matrix: np.ndarray     # (n_rx, n_rx), Hermitian PSD
    variant: str           # "design" or "evaluation"
    mismatch: np.ndarray   # dH_M W W^H dH_M^H (zero in the design variant)
    cee_r: np.ndarray      # sigma_r^2 tr(G_hat W W^H G_hat^H) I
    cee_g: np.ndarray      # sigma_g^2 tr(W W^H) R_hat R_hat^H
    cross: np.ndarray      # n_r sigma_g^2 sigma_r^2 tr(W W^H) I (design only)
    thermal: np.ndarray    # sigma^2 I


def lemma1_expectation(
    x_hat: np.ndarray,
    z: np.ndarray,
    r_n: np.ndarray,
    r_m: np.ndarray,
    variance: float,
) -> np.ndarray:
    """E{X Z X^H} for X with mean x_hat and covariance variance * (r_n x r_m).

    Returns x_hat Z x_hat^H + variance * tr(Z r_m^T) r_n; identity
    correlation matrices reduce this to the white per-entry case.
    """
    n, m = x_hat.shape
    if z.shape != (m, m):
        raise ValueError(f"Z must be {m}x{m}, got {z.shape}")
    if r_n.shape != (n, n) or r_m.shape != (m, m):
        raise ValueError("correlation matrices do not match x_hat")
    return x_hat @ z @ x_hat.conj().T + variance * np.trace(z @ r_m.T) * r_n


def _common_terms(cs: ChannelSet, w: np.ndarray, noise_var: float):
    n_rx = cs.n_rx
    eye = np.eye(n_rx)
    p_w = float(np.linalg.norm(w) ** 2)
    gw = cs.g_hat @ w
    cee_r = cs.sigma_r2 * float(np.linalg.norm(gw) ** 2) * eye
    cee_g = cs.sigma_g2 * p_w * (cs.r_hat @ cs.r_hat.conj().T)
    thermal = noise_var * eye
    return eye, p_w, cee_r, cee_g, thermal


def sigma_design(
    cs: ChannelSet, w: np.ndarray, phi: np.ndarray, noise_var: float
) -> NoiseCovariance:
    """Designer-side covariance: no mismatch term, with the cross term."""
    phi = _check_phi(phi, cs.n_r)
    eye, p_w, cee_r, cee_g, thermal = _common_terms(cs, w, noise_var)
    cross = cs.n_r * cs.sigma_g2 * cs.sigma_r2 * p_w * eye
    total = _verify_psd(cee_r + cee_g + cross + thermal, noise_var)
    return NoiseCovariance(
        matrix=total,
        variant=DESIGN,
        mismatch=np.zeros_like(thermal),
        cee_r=cee_r,
        cee_g=cee_g,
        cross=cross,
        thermal=thermal,
    )


def sigma_eval(
    cs: ChannelSet, w: np.ndarray, phi: np.ndarray, noise_var: float
) -> NoiseCovariance:
    """Full evaluation covariance including the model-mismatch term."""
    phi = _check_phi(phi, cs.n_r)
    eye, p_w, cee_r, cee_g, thermal = _common_terms(cs, w, noise_var)
    dhm_w = cs.r_hat @ (phi[:, None] * cs.delta_m) @ w
    mismatch = dhm_w @ dhm_w.conj().T
    total = _verify_psd(mismatch + cee_r + cee_g + thermal, noise_var)
    return NoiseCovariance(
        matrix=total,
        variant=EVALUATION,
        mismatch=mismatch,
        cee_r=cee_r,
        cee_g=cee_g,
        cross=np.zeros_like(thermal),
        thermal=thermal,
    )


def empirical_covariance(
    cs: ChannelSet,
    w: np.ndarray,
    phi: np.ndarray,
    noise_var: float,
    draws: int,
    rng: np.random.Generator,
    exact: bool = False,
    chunk: int = 20000,
) -> np.ndarray:
    """Sample covariance of the residual-plus-noise signal.

    Redraws dG, dR, the data symbols and the thermal noise each draw
    while keeping the estimates fixed. With exact=False the residual
    uses the first-order terms dR Phi G_hat + R_hat Phi dG + R_hat Phi dM;
    exact=True adds the second-order products dR Phi dG and dR Phi dM.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    phi = _check_phi(phi, cs.n_r)
    n_rx, n_r, n_tx = cs.n_rx, cs.n_r, cs.n_tx
    n_s = w.shape[1]
    phi_g_hat_t = (phi[:, None] * cs.g_hat).T      # (n_tx, n_r)
    phi_dm_t = (phi[:, None] * cs.delta_m).T       # (n_tx, n_r)
    r_hat_t = cs.r_hat.T                           # (n_r, n_rx)
    acc = np.zeros((n_rx, n_rx), dtype=complex)
    done = 0
    while done < draws:
        b = min(chunk, draws - done)
        s = (rng.standard_normal((b, n_s)) + 1j * rng.standard_normal((b, n_s))) / np.sqrt(2)
        ws = s @ w.T                                               # (b, n_tx)
        d_r = sample_matrix_gaussian(b * n_rx, n_r, cs.sigma_r2, rng).reshape(b, n_rx, n_r)
        d_g = sample_matrix_gaussian(b * n_r, n_tx, cs.sigma_g2, rng).reshape(b, n_r, n_tx)
        noise = np.sqrt(noise_var / 2.0) * (
            rng.standard_normal((b, n_rx)) + 1j * rng.standard_normal((b, n_rx))
        )

        u_hat = ws @ phi_g_hat_t                                   # Phi G_hat W s
        y = np.einsum("bij,bj->bi", d_r, u_hat)                    # dR Phi G_hat W s
        v = np.einsum("bij,bj->bi", d_g, ws) * phi[None, :]        # Phi dG W s
        y += v @ r_hat_t
        m = ws @ phi_dm_t                                          # Phi dM W s
        y += m @ r_hat_t
        if exact:
            y += np.einsum("bij,bj->bi", d_r, v + m)
        y += noise
        acc += np.einsum("bi,bj->ij", y, y.conj())
        done += b
    return acc / draws
