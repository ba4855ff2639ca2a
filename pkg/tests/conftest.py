import numpy as np
import pytest

from risbeam.config import SystemConfig


def random_scene_config(rng: np.random.Generator) -> SystemConfig:
    """Random small scene: counts, wavelength and node placement."""
    lam = float(rng.uniform(0.005, 0.02))
    carrier = 299792458.0 / lam
    tx = tuple(float(v) for v in rng.uniform(-3.0, 3.0, 3))
    ris = tuple(float(v) for v in (rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 2)))
    # keep the Tx clearly away from the RIS
    tx = (ris[0] + 2.0 + abs(tx[0]), tx[1], tx[2])
    rx = (ris[0] - 4.0, ris[1] + float(rng.uniform(-2, 2)), ris[2])
    return SystemConfig(
        carrier_hz=carrier,
        tx_pos=tx,
        ris_pos=ris,
        rx_pos=rx,
        n_tx=int(rng.integers(1, 7)),
        n_rx=int(rng.integers(1, 5)),
        n_ry=int(rng.integers(1, 7)),
        n_rz=int(rng.integers(1, 7)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
