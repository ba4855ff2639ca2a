"""Steering vectors and the Tx-RIS / RIS-Rx channel matrices.

Three structured models of the Tx-RIS link:
  * near field: per element-pair spherical wave, entry (n, m) =
    lambda^2/(4 pi d_nm)^2 * exp(-j 2 pi d_nm / lambda)
  * far field: rank-one plane wave, gamma * a_ris(psi) a_tx(theta)^H with
    gamma = lambda^2/(4 pi d_TR)^2 * exp(-j 2 pi d_TR / lambda)
  * piece-wise near field: the RIS split into k x k subsurfaces, each in
    its own far-field regime; assembled as a Kronecker product of k
    horizontal and k vertical strip factors times a_tx^H, so the matrix
    stays rank one while carrying per-subsurface distances and angles.

The RIS-Rx link is a Saleh-Valenzuela sum of L paths (one deterministic
LoS, the rest random NLoS), each a rank-one outer product of Rx and RIS
steering vectors.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import SceneGeometry

TWO_PI = 2.0 * np.pi


def steering_ula(theta: float, n: int, d: float, lam: float) -> np.ndarray:
    """ULA response, entry p = exp(-j 2 pi p d sin(theta) / lambda), p = 0..n-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.exp(-1j * TWO_PI / lam * np.arange(n) * d * np.sin(theta))


def _upa_factor_y(az: float, el: float, n: int, d: float, lam: float) -> np.ndarray:
    # horizontal factor, phase step sin(az) cos(el)
    return np.exp(-1j * TWO_PI / lam * np.arange(n) * d * np.sin(az) * np.cos(el))


def _upa_factor_z(az: float, el: float, n: int, d: float, lam: float) -> np.ndarray:
    # vertical factor, phase step sin(az) sin(el)
    return np.exp(-1j * TWO_PI / lam * np.arange(n) * d * np.sin(az) * np.sin(el))


def steering_upa(az: float, el: float, n_y: int, n_z: int, d: float, lam: float) -> np.ndarray:
    """UPA response: kron of the y and z factors, length n_y * n_z."""
    if n_y < 1 or n_z < 1:
        raise ValueError("n_y and n_z must be >= 1")
    return np.kron(_upa_factor_y(az, el, n_y, d, lam), _upa_factor_z(az, el, n_z, d, lam))


def build_near_field(geom: SceneGeometry, lam: float) -> np.ndarray:
    """Ground-truth spherical-wave Tx-RIS channel, shape (n_r, n_tx)."""
    d = geom.pairwise_tx_ris
    if np.any(d <= 0):
        raise ValueError("zero Tx-RIS element distance")
    amp = lam**2 / (4.0 * np.pi * d) ** 2
    return amp * np.exp(-1j * TWO_PI / lam * d)


def far_field_gain(geom: SceneGeometry, lam: float) -> complex:
    """Center-to-center path coefficient gamma of the far-field model."""
    return lam**2 / (4.0 * np.pi * geom.d_tr) ** 2 * np.exp(-1j * TWO_PI / lam * geom.d_tr)


def build_far_field(geom: SceneGeometry, lam: float) -> np.ndarray:
    """Rank-one plane-wave Tx-RIS channel, shape (n_r, n_tx)."""
    if geom.d_tr <= 0:
        raise ValueError("d_tr must be > 0")
    a_r = steering_upa(geom.psi_az, geom.psi_el, geom.n_ry, geom.n_rz, geom.spacing, lam)
    a_t = steering_ula(geom.theta_tx, geom.n_tx, geom.spacing, lam)
    return far_field_gain(geom, lam) * np.outer(a_r, a_t.conj())


def _strip_stack(r, az, el, r0, m, k, d, lam, factor_fn):
    """Concatenated strip factors for one RIS axis.

    Each strip is a far-field patch of m elements anchored at its
    reference element. The effective strip distance 2 r_i - r0
    (extrapolated through the link reference distance) makes the
    horizontal/vertical factor product carry the full per-subsurface
    carrier phase and a first-order-exact amplitude; at k = 1 it reduces
    exactly to the plain factor lambda/(4 pi r0) * exp(-j pi r0/lambda).
    """
    parts = []
    for i in range(k):
        rho = 2.0 * r[i] - r0
        if rho <= 0:
            raise ValueError("RIS aperture too deep for the piece-wise model")
        scalar = lam / (4.0 * np.pi * rho) * np.exp(-1j * np.pi / lam * rho)
        parts.append(scalar * factor_fn(az[i], el[i], m, d, lam))
    return np.concatenate(parts)


def build_piecewise(geom: SceneGeometry, lam: float, k: int) -> np.ndarray:
    """Piece-wise near-field Tx-RIS channel for a k x k partition.

    Degenerates entrywise to the far-field matrix at k = 1. Raises
    ValueError when k does not divide the RIS grid.
    """
    r_h, az_h, el_h, r_v, az_v, el_v = geom.strip_params(k)
    d, r0 = geom.spacing, geom.d_tr
    stack_h = _strip_stack(r_h, az_h, el_h, r0, geom.n_ry // k, k, d, lam, _upa_factor_y)
    stack_v = _strip_stack(r_v, az_v, el_v, r0, geom.n_rz // k, k, d, lam, _upa_factor_z)
    a_t = steering_ula(geom.theta_tx, geom.n_tx, geom.spacing, lam)
    return np.outer(np.kron(stack_h, stack_v), a_t.conj())


@dataclass(frozen=True)
class PathParams:
    """Per-path gains and angles of the RIS-Rx multipath channel."""

    gains: np.ndarray     # complex amplitudes, length L
    phi_rx: np.ndarray    # arrival angle at the Rx, length L
    phi_r_az: np.ndarray  # departure azimuth at the RIS, length L
    phi_r_el: np.ndarray  # departure elevation at the RIS, length L

    def __post_init__(self):
        if len(self.gains) < 1:
            raise ValueError("at least one path required")
        for a in (self.gains, self.phi_rx, self.phi_r_az, self.phi_r_el):
            if len(a) != len(self.gains) or not np.all(np.isfinite(a)):
                raise ValueError("path parameter arrays must match and be finite")

    @property
    def l_rx(self) -> int:
        return len(self.gains)


def los_path_gain(geom: SceneGeometry, lam: float) -> complex:
    """Deterministic LoS path coefficient lambda^2/(4 pi d_RR)^2 e^{-j 2 pi d_RR/lambda}."""
    return lam**2 / (4.0 * np.pi * geom.d_rr) ** 2 * np.exp(-1j * TWO_PI / lam * geom.d_rr)


def sample_path_params(
    geom: SceneGeometry,
    lam: float,
    l_rx: int = 3,
    nlos_gain_db: float = -10.0,
    rng: np.random.Generator | None = None,
) -> PathParams:
    """LoS path from the scene geometry plus l_rx - 1 random NLoS paths.

    NLoS gains sit nlos_gain_db below the LoS amplitude with uniform
    random phase; NLoS angles are uniform over their principal ranges.
    """
    if l_rx < 1:
        raise ValueError("l_rx must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    beta0 = los_path_gain(geom, lam)
    gains = [beta0]
    phi_rx = [geom.phi_rx_los]
    phi_az = [geom.phi_r_az_los]
    phi_el = [geom.phi_r_el_los]
    scale = np.abs(beta0) * 10.0 ** (nlos_gain_db / 20.0)
    for _ in range(l_rx - 1):
        gains.append(scale * np.exp(1j * rng.uniform(0.0, TWO_PI)))
        phi_rx.append(rng.uniform(-np.pi / 2, np.pi / 2))
        phi_az.append(rng.uniform(0.0, np.pi))
        phi_el.append(rng.uniform(-np.pi, np.pi))
    return PathParams(
        gains=np.asarray(gains, dtype=complex),
        phi_rx=np.asarray(phi_rx),
        phi_r_az=np.asarray(phi_az),
        phi_r_el=np.asarray(phi_el),
    )


def build_ris_rx(geom: SceneGeometry, lam: float, paths: PathParams) -> np.ndarray:
    """Multipath RIS-Rx channel, shape (n_rx, n_r)."""
    d = geom.spacing
    out = np.zeros((geom.n_rx, geom.n_r), dtype=complex)
    for beta, p_rx, p_az, p_el in zip(paths.gains, paths.phi_rx, paths.phi_r_az, paths.phi_r_el):
        a_rx = steering_ula(p_rx, geom.n_rx, d, lam)
        b = steering_upa(p_az, p_el, geom.n_ry, geom.n_rz, d, lam)
        out += beta * np.outer(a_rx, b.conj())
    return out


def write_matrix_csv(matrix: np.ndarray, path: str) -> None:
    """Dump a complex matrix as (row, col, re, im) rows for golden tests."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "re", "im"])
        for i in range(matrix.shape[0]):
            for j in range(matrix.shape[1]):
                v = matrix[i, j]
                writer.writerow([i, j, repr(float(v.real)), repr(float(v.imag))])
