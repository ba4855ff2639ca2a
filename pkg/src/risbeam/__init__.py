"""RIS-aided MIMO beamforming simulator.

Channel synthesis under near-field, piece-wise near-field and far-field
models, calibrated estimation-error injection, analytic interference
covariances, a WMMSE block-coordinate-descent beamforming optimizer with
an ADPM unit-modulus phase solver, and seeded Monte Carlo sweeps.
"""

from .cee import ChannelSet, ErrorSpec, calibrate_variance, make_channel_set, sample_matrix_gaussian
from .channel import (
    PathParams,
    build_far_field,
    build_near_field,
    build_piecewise,
    build_ris_rx,
    sample_path_params,
    steering_ula,
    steering_upa,
)
from .config import ConfigError, SolverConfig, SweepSpec, SystemConfig, parse_config
from .covariance import (
    NoiseCovariance,
    NumericalError,
    empirical_covariance,
    lemma1_expectation,
    sigma_design,
    sigma_eval,
)
from .experiments import ExperimentRecord, SummaryRow, run_sweep, summarize, trial_seed
from .geometry import SceneGeometry, build_scene, rayleigh_distance
from .solver import (
    AdpmResult,
    BeamformingState,
    achievable_se,
    adpm_solve,
    bcd_solve,
    build_qp,
    mse_matrix,
    update_omega,
    update_w,
    update_z,
)

__version__ = "0.1.0"

__all__ = [
    "AdpmResult",
    "BeamformingState",
    "ChannelSet",
    "ConfigError",
    "ErrorSpec",
    "ExperimentRecord",
    "NoiseCovariance",
    "NumericalError",
    "PathParams",
    "SceneGeometry",
    "SolverConfig",
    "SummaryRow",
    "SweepSpec",
    "SystemConfig",
    "achievable_se",
    "adpm_solve",
    "bcd_solve",
    "build_far_field",
    "build_near_field",
    "build_piecewise",
    "build_qp",
    "build_ris_rx",
    "build_scene",
    "calibrate_variance",
    "empirical_covariance",
    "lemma1_expectation",
    "make_channel_set",
    "mse_matrix",
    "parse_config",
    "rayleigh_distance",
    "run_sweep",
    "sample_matrix_gaussian",
    "sample_path_params",
    "sigma_design",
    "sigma_eval",
    "steering_ula",
    "steering_upa",
    "summarize",
    "trial_seed",
    "update_omega",
    "update_w",
    "update_z",
]
