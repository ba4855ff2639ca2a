import csv
import math

import numpy as np
import pytest

from risbeam.channel import (
    PathParams,
    build_far_field,
    build_near_field,
    build_piecewise,
    build_ris_rx,
    far_field_gain,
    los_path_gain,
    sample_path_params,
    steering_ula,
    steering_upa,
    write_matrix_csv,
)
from risbeam.config import SystemConfig
from risbeam.geometry import build_scene

from conftest import random_scene_config

LAM = 0.01


def scene(**kw):
    return build_scene(SystemConfig(**kw))


def pair_scene(distance, lam=LAM):
    # single-element Tx and RIS separated along x
    cfg = SystemConfig(
        carrier_hz=299792458.0 / lam,
        n_tx=1, n_rx=1, n_ry=1, n_rz=1,
        tx_pos=(distance, 0.0, 0.0), ris_pos=(0.0, 0.0, 0.0), rx_pos=(-5.0, 0.0, 0.0),
    )
    return build_scene(cfg)


# ---- steering vectors ----

def test_steering_ula_zero_angle():
    np.testing.assert_allclose(steering_ula(0.0, 4, LAM / 2, LAM), np.ones(4))


def test_steering_ula_single_element():
    np.testing.assert_allclose(steering_ula(1.1, 1, LAM / 2, LAM), [1.0])


def test_steering_ula_broadside_pair():
    # theta = pi/2, d = lambda/2: second entry exp(-j pi) = -1
    v = steering_ula(np.pi / 2, 2, LAM / 2, LAM)
    np.testing.assert_allclose(v, [1.0, -1.0], atol=1e-12)


def test_steering_upa_zero_azimuth_all_ones():
    np.testing.assert_allclose(steering_upa(0.0, 0.7, 3, 2, LAM / 2, LAM), np.ones(6))


def test_steering_upa_single_element():
    np.testing.assert_allclose(steering_upa(0.3, -0.2, 1, 1, LAM / 2, LAM), [1.0])


def test_steering_upa_reduces_to_ula():
    v = steering_upa(np.pi / 2, 0.0, 2, 1, LAM / 2, LAM)
    np.testing.assert_allclose(v, [1.0, -1.0], atol=1e-12)


def test_steering_unit_modulus_and_leading_one(rng):
    for _ in range(50):
        theta = rng.uniform(-np.pi, np.pi)
        az, el = rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi)
        n, ny, nz = int(rng.integers(1, 9)), int(rng.integers(1, 6)), int(rng.integers(1, 6))
        for v in (steering_ula(theta, n, LAM / 2, LAM), steering_upa(az, el, ny, nz, LAM / 2, LAM)):
            assert np.max(np.abs(np.abs(v) - 1.0)) < 1e-12
            assert v[0] == pytest.approx(1.0, abs=1e-15)


def test_steering_rejects_empty():
    with pytest.raises(ValueError):
        steering_ula(0.0, 0, LAM / 2, LAM)
    with pytest.raises(ValueError):
        steering_upa(0.0, 0.0, 0, 1, LAM / 2, LAM)


# ---- near field ----

def test_near_field_single_pair_magnitude_and_phase():
    geom = pair_scene(1.0)
    g = build_near_field(geom, LAM)
    # amplitude lambda^2/(4 pi d)^2 at d = 1, phase -2 pi * 100 = 0 mod 2 pi
    assert abs(g[0, 0]) == pytest.approx(LAM**2 / (4 * np.pi) ** 2, rel=1e-12)
    assert abs(g[0, 0]) == pytest.approx(6.333e-7, rel=1e-3)
    assert np.angle(g[0, 0]) == pytest.approx(0.0, abs=1e-9)


def test_near_field_inverse_square_amplitude():
    g1 = build_near_field(pair_scene(1.0), LAM)
    g2 = build_near_field(pair_scene(2.0), LAM)
    assert abs(g1[0, 0]) / abs(g2[0, 0]) == pytest.approx(4.0, rel=1e-12)


def test_near_field_matches_per_entry_oracle():
    geom = scene(n_tx=2, n_ry=2, n_rz=1, n_rx=1)
    g = build_near_field(geom, LAM)
    for i in range(geom.n_r):
        for j in range(geom.n_tx):
            d = np.linalg.norm(geom.ris_positions[i] - geom.tx_positions[j])
            expect = LAM**2 / (4 * np.pi * d) ** 2 * np.exp(-1j * 2 * np.pi * d / LAM)
            assert g[i, j] == pytest.approx(expect, rel=1e-15)


# ---- far field ----

def test_far_field_scalar_case():
    geom = pair_scene(7.3)
    g = build_far_field(geom, LAM)
    assert g.shape == (1, 1)
    assert abs(g[0, 0]) == pytest.approx(LAM**2 / (4 * np.pi * geom.d_tr) ** 2, rel=1e-12)


def test_far_field_rank_one(rng):
    for _ in range(5):
        cfg = random_scene_config(rng)
        geom = build_scene(cfg)
        g = build_far_field(geom, cfg.wavelength)
        s = np.linalg.svd(g, compute_uv=False)
        if s.size > 1:
            assert s[1] <= 1e-10 * s[0]


def test_far_field_leading_entry_is_gain():
    geom = scene(n_tx=4, n_ry=4, n_rz=2, n_rx=2)
    g = build_far_field(geom, LAM)
    assert g[0, 0] == pytest.approx(far_field_gain(geom, LAM), rel=1e-12)


# ---- piecewise ----

def test_piecewise_k1_equals_far_field_random_geometries(rng):
    for _ in range(20):
        cfg = random_scene_config(rng)
        geom = build_scene(cfg)
        gf = build_far_field(geom, cfg.wavelength)
        gp = build_piecewise(geom, cfg.wavelength, 1)
        scale = np.max(np.abs(gf))
        assert np.max(np.abs(gp - gf)) < 1e-12 * scale


def test_piecewise_single_element_equals_near_field():
    geom = pair_scene(3.0)
    gp = build_piecewise(geom, LAM, 1)
    gn = build_near_field(geom, LAM)
    assert gp[0, 0] == pytest.approx(gn[0, 0], rel=1e-12)


def test_piecewise_mismatch_non_increasing_in_k():
    geom = scene()  # desk default, 8x8 RIS
    lam = SystemConfig().wavelength
    gn = build_near_field(geom, lam)
    norms = [np.linalg.norm(gn - build_piecewise(geom, lam, k)) for k in (1, 2, 4)]
    assert norms[0] >= norms[1] >= norms[2]


def test_piecewise_rank_one():
    geom = scene()
    lam = SystemConfig().wavelength
    for k in (1, 2, 4, 8):
        s = np.linalg.svd(build_piecewise(geom, lam, k), compute_uv=False)
        assert s[1] <= 1e-10 * s[0]


def test_piecewise_rejects_nondivisible():
    geom = scene()
    with pytest.raises(ValueError, match="divisible"):
        build_piecewise(geom, LAM, 3)


# ---- RIS-Rx ----

def test_ris_rx_los_gain_magnitude():
    cfg = SystemConfig()
    geom = build_scene(cfg)
    lam = cfg.wavelength
    paths = sample_path_params(geom, lam, l_rx=1)
    assert abs(paths.gains[0]) == pytest.approx(lam**2 / (4 * np.pi * geom.d_rr) ** 2, rel=1e-12)


def test_ris_rx_rank_follows_path_count(rng):
    cfg = SystemConfig(n_rx=4)
    geom = build_scene(cfg)
    lam = cfg.wavelength
    r1 = build_ris_rx(geom, lam, sample_path_params(geom, lam, l_rx=1))
    s1 = np.linalg.svd(r1, compute_uv=False)
    assert s1[1] <= 1e-10 * s1[0]

    paths2 = sample_path_params(geom, lam, l_rx=2, rng=rng)
    r2 = build_ris_rx(geom, lam, paths2)
    s2 = np.linalg.svd(r2, compute_uv=False)
    assert s2[1] > 1e-6 * s2[0]


def test_path_params_validation():
    with pytest.raises(ValueError):
        PathParams(
            gains=np.array([]), phi_rx=np.array([]),
            phi_r_az=np.array([]), phi_r_el=np.array([]),
        )


def test_matrix_csv_dump(tmp_path):
    m = np.array([[1 + 2j, 3 - 4j]])
    path = tmp_path / "m.csv"
    write_matrix_csv(m, str(path))
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["row", "col", "re", "im"]
    assert rows[1] == ["0", "0", "1.0", "2.0"]
    assert rows[2] == ["0", "1", "3.0", "-4.0"]
