"""Scene geometry: element coordinates, distances, angles, RIS partitions.

Conventions (fixed throughout the package):
  * Tx and Rx are ULAs along the global y axis; the RIS is a UPA in the
    y-z plane with n_ry elements along y and n_rz along z. Arrays are
    centered on their configured positions.
  * RIS elements are vectorized y-major: flat index = iy * n_rz + iz,
    matching the Kronecker ordering of the RIS steering vectors.
  * Azimuth is measured from the array broadside (x axis for the RIS,
    so sin(az) is the magnitude of the in-plane direction cosine);
    elevation is the in-plane angle from y toward z. With this choice
    sin(az)cos(el) and sin(az)sin(el) are the y and z direction cosines.
  * ULA angles are arcsin of the y direction cosine.
  * Link reference distances (d_tr, d_rr) and the angles feeding the
    structured channel models are measured between the arrays' reference
    elements (flat index 0). Steering vectors are phase-referenced at
    that same element, so the composite plane-wave models line up with
    the spherical-wave truth without a spurious constant rotation; for
    single-element arrays this coincides with center-to-center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig


def rayleigh_distance(aperture_m: float, wavelength_m: float) -> float:
    """Far-field boundary 2 D^2 / lambda for an aperture of size D."""
    if aperture_m < 0:
        raise ValueError("aperture must be >= 0")
    if wavelength_m <= 0:
        raise ValueError("wavelength must be > 0")
    return 2.0 * aperture_m**2 / wavelength_m


def ula_positions(center: np.ndarray, n: int, spacing: float) -> np.ndarray:
    """n element coordinates along the y axis, centered on `center`."""
    offsets = (np.arange(n) - (n - 1) / 2.0) * spacing
    pos = np.tile(np.asarray(center, dtype=float), (n, 1))
    pos[:, 1] += offsets
    return pos


def upa_positions(center: np.ndarray, n_y: int, n_z: int, spacing: float) -> np.ndarray:
    """y-z plane UPA coordinates, y-major flat ordering (iy * n_z + iz)."""
    oy = (np.arange(n_y) - (n_y - 1) / 2.0) * spacing
    oz = (np.arange(n_z) - (n_z - 1) / 2.0) * spacing
    pos = np.tile(np.asarray(center, dtype=float), (n_y * n_z, 1))
    pos[:, 1] += np.repeat(oy, n_z)
    pos[:, 2] += np.tile(oz, n_y)
    return pos


def ula_angle(direction: np.ndarray) -> float:
    """Steering angle of a y-axis ULA for a unit propagation direction."""
    return float(np.arcsin(np.clip(direction[1], -1.0, 1.0)))


def upa_angles(direction: np.ndarray) -> tuple[float, float]:
    """(azimuth, elevation) of a unit direction in the RIS convention."""
    az = float(np.arccos(np.clip(direction[0], -1.0, 1.0)))
    el = float(np.arctan2(direction[2], direction[1]))
    return az, el


def _unit(vec: np.ndarray) -> tuple[np.ndarray, float]:
    d = float(np.linalg.norm(vec))
    if d <= 0:
        raise ValueError("degenerate geometry: zero distance between nodes")
    return vec / d, d


@dataclass(frozen=True)
class SceneGeometry:
    """Element coordinates and derived distances/angles for one scene.

    Immutable after construction; all members are plain arrays/floats, so
    instances are safe to share across threads.
    """

    tx_positions: np.ndarray     # (n_tx, 3) m
    ris_positions: np.ndarray    # (n_r, 3) m, y-major
    rx_positions: np.ndarray     # (n_rx, 3) m
    tx_center: np.ndarray
    ris_center: np.ndarray
    rx_center: np.ndarray
    n_ry: int
    n_rz: int
    spacing: float               # m
    pairwise_tx_ris: np.ndarray  # (n_r, n_tx) m
    d_tr: float                  # Tx to RIS reference-element distance, m
    d_rr: float                  # RIS to Rx reference-element distance, m
    theta_tx: float              # azimuth AoD at the Tx toward the RIS reference element
    psi_az: float                # arrival azimuth at the RIS (Tx link, reference direction)
    psi_el: float                # arrival elevation at the RIS (Tx link, reference direction)
    phi_rx_los: float            # LoS arrival angle at the Rx
    phi_r_az_los: float          # LoS departure azimuth at the RIS toward the Rx
    phi_r_el_los: float          # LoS departure elevation at the RIS toward the Rx

    @property
    def n_tx(self) -> int:
        return self.tx_positions.shape[0]

    @property
    def n_rx(self) -> int:
        return self.rx_positions.shape[0]

    @property
    def n_r(self) -> int:
        return self.ris_positions.shape[0]

    def _check_partition(self, k: int) -> None:
        if k < 1:
            raise ValueError("k must be >= 1")
        if self.n_ry % k or self.n_rz % k:
            raise ValueError(
                f"RIS {self.n_ry}x{self.n_rz} not divisible into {k}x{k} subsurfaces"
            )

    def subsurface_centers(self, k: int) -> np.ndarray:
        """Centroids of the k x k element blocks, shape (k*k, 3), i-major."""
        self._check_partition(k)
        grid = self.ris_positions.reshape(self.n_ry, self.n_rz, 3)
        my, mz = self.n_ry // k, self.n_rz // k
        blocks = grid.reshape(k, my, k, mz, 3)
        return blocks.mean(axis=(1, 3)).reshape(k * k, 3)

    def strip_params(self, k: int):
        """Distance and propagation angles from the Tx per RIS strip.

        Horizontal strip i groups the i-th block of rows along y (all z),
        vertical strip j the j-th block of columns along z (all y). Each
        strip is anchored at its reference element (lowest y and z index
        of the strip, at the z respectively y anchor row), measured from
        the Tx reference element; anchoring at reference elements rather
        than centroids keeps the k = 1 case exactly equal to the
        far-field composite and the mismatch decreasing in k. Returns
        (r_h, az_h, el_h, r_v, az_v, el_v), each of length k; the angles
        parameterize the Tx-to-strip propagation direction in the RIS
        azimuth/elevation convention.
        """
        self._check_partition(k)
        tx0 = self.tx_positions[0]
        grid = self.ris_positions.reshape(self.n_ry, self.n_rz, 3)
        h_refs = grid[:: self.n_ry // k, 0, :]
        v_refs = grid[0, :: self.n_rz // k, :]

        def _params(refs):
            r = np.empty(k)
            az = np.empty(k)
            el = np.empty(k)
            for i, c in enumerate(refs):
                u, dist = _unit(c - tx0)
                r[i] = dist
                az[i], el[i] = upa_angles(u)
            return r, az, el

        r_h, az_h, el_h = _params(h_refs)
        r_v, az_v, el_v = _params(v_refs)
        return r_h, az_h, el_h, r_v, az_v, el_v


def build_scene(cfg: SystemConfig) -> SceneGeometry:
    """Construct all element coordinates and derived scene quantities.

    Raises ValueError for coincident elements or a partition that does not
    divide the RIS grid.
    """
    d = cfg.spacing
    tx_c = np.asarray(cfg.tx_pos, dtype=float)
    ris_c = np.asarray(cfg.ris_pos, dtype=float)
    rx_c = np.asarray(cfg.rx_pos, dtype=float)

    tx = ula_positions(tx_c, cfg.n_tx, d)
    ris = upa_positions(ris_c, cfg.n_ry, cfg.n_rz, d)
    rx = ula_positions(rx_c, cfg.n_rx, d)

    diff = ris[:, None, :] - tx[None, :, :]
    pairwise = np.linalg.norm(diff, axis=2)
    if np.min(pairwise) < 1e-9:
        raise ValueError("coincident elements: Tx and RIS arrays overlap")

    u_t2r, d_tr = _unit(ris[0] - tx[0])
    u_r2rx, d_rr = _unit(rx[0] - ris[0])
    if float(np.min(np.linalg.norm(rx[:, None, :] - ris[None, :, :], axis=2))) < 1e-9:
        raise ValueError("coincident elements: RIS and Rx arrays overlap")

    geom = SceneGeometry(
        tx_positions=tx,
        ris_positions=ris,
        rx_positions=rx,
        tx_center=tx_c,
        ris_center=ris_c,
        rx_center=rx_c,
        n_ry=cfg.n_ry,
        n_rz=cfg.n_rz,
        spacing=d,
        pairwise_tx_ris=pairwise,
        d_tr=d_tr,
        d_rr=d_rr,
        theta_tx=ula_angle(u_t2r),
        psi_az=upa_angles(u_t2r)[0],
        psi_el=upa_angles(u_t2r)[1],
        phi_rx_los=ula_angle(u_r2rx),
        phi_r_az_los=upa_angles(u_r2rx)[0],
        phi_r_el_los=upa_angles(u_r2rx)[1],
    )
    geom._check_partition(cfg.k if cfg.model == "piecewise" else 1)
    return geom
