"""Scenario configuration: defaults, INI parsing, validation.

One flat config object drives the whole pipeline. The file format is plain
INI sections of key = value pairs so that runs are diff-able; CLI flags
override file values. Unknown keys are rejected by name.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import logging
import math
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

C_LIGHT = 299792458.0

MODELS = ("near", "piecewise", "far")
FAMILIES = ("convergence", "se_vs_snr", "se_vs_tau", "se_vs_ntx", "se_vs_nris")

# x-axis name used in output CSVs, per sweep family
SWEEP_NAMES = {
    "convergence": "d_br_m",
    "se_vs_snr": "snr_db",
    "se_vs_tau": "tau",
    "se_vs_ntx": "n_tx",
    "se_vs_nris": "n_ris",
}

FAMILY_DEFAULT_VALUES = {
    "convergence": (2.0,),
    "se_vs_snr": (-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0),
    "se_vs_tau": (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8),
    "se_vs_ntx": (4.0, 8.0, 16.0, 32.0),
    "se_vs_nris": (16.0, 64.0, 144.0, 256.0),
}


class ConfigError(ValueError):
    """Invalid configuration file, key, or value."""


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rules and inner-solver parameters."""

    eps_outer: float = 1e-3        # |objective change| tolerance of the outer loop
    r_max: int = 100               # outer iteration cap
    adpm_eps: float = 1e-6         # residual ||phi - phi0|| tolerance
    adpm_delta1: float = 0.95      # residual decrease factor keeping rho fixed
    adpm_delta2: float = 1.05      # penalty growth factor
    adpm_kappa: float = 1e3        # multiplier rescaling threshold
    adpm_max_iters: int = 500
    eta_tol: float = 1e-8          # relative power tolerance of the eta bisection
    eta_max_doublings: int = 200


@dataclass(frozen=True)
class SweepSpec:
    """One experiment family: swept values, models, trial count."""

    family: str = "se_vs_snr"
    values: tuple[float, ...] = FAMILY_DEFAULT_VALUES["se_vs_snr"]
    models: tuple[str, ...] = ("near", "piecewise", "far")
    k_values: tuple[int, ...] = (1, 2, 4, 8)
    trials: int = 20


@dataclass(frozen=True)
class SystemConfig:
    """Full scenario: scene, arrays, channel model, errors, solver, sweep."""

    # [system]
    carrier_hz: float = 30e9
    noise_dbm: float = -80.0
    snr_db: float | None = None      # transmit SNR, 10*log10(P_Tx / sigma^2)
    p_tx_w: float | None = None      # mutually exclusive with snr_db
    n_streams: int = 0               # 0 = auto = min(n_tx, n_rx)
    tx_pos: tuple[float, float, float] = (0.3, -0.5, 0.15)
    ris_pos: tuple[float, float, float] = (0.0, 0.0, 0.3)
    rx_pos: tuple[float, float, float] = (3.0, 1.5, 0.15)
    pathloss_reference: bool = True  # scale channels by center-distance pathloss

    # [arrays]
    n_tx: int = 16
    n_rx: int = 4
    n_ry: int = 8
    n_rz: int = 8
    spacing_wavelengths: float = 0.5

    # [channel]
    model: str = "near"
    k: int = 8                       # subsurface partitions per RIS axis
    l_rx: int = 3                    # RIS-Rx path count (1 LoS + l_rx-1 NLoS)
    nlos_gain_db: float = -10.0
    tau_g: float = 0.0               # normalized CEE of the Tx-RIS link
    tau_r: float | None = None       # None = follow tau_g

    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepSpec = field(default_factory=SweepSpec)

    # [run]
    seed: int = 1
    out_dir: str = "out"
    threads: int = 0                 # 0 = machine parallelism
    timing: bool = False             # opt-in; breaks bitwise reproducibility

    # ---- derived quantities ----

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.carrier_hz

    @property
    def spacing(self) -> float:
        return self.spacing_wavelengths * self.wavelength

    @property
    def noise_power_w(self) -> float:
        return 10.0 ** ((self.noise_dbm - 30.0) / 10.0)

    @property
    def p_tx(self) -> float:
        if self.p_tx_w is not None:
            return self.p_tx_w
        snr = 10.0 if self.snr_db is None else self.snr_db
        return self.noise_power_w * 10.0 ** (snr / 10.0)

    @property
    def n_s(self) -> int:
        return self.n_streams if self.n_streams > 0 else min(self.n_tx, self.n_rx)

    @property
    def n_r(self) -> int:
        return self.n_ry * self.n_rz

    def tau_r_value(self) -> float:
        return self.tau_g if self.tau_r is None else self.tau_r


# ---------------------------------------------------------------------------
# INI schema: section -> key -> (decode, encode). Decode raises ValueError on
# malformed input; encode produces the canonical text written by to_ini().
# ---------------------------------------------------------------------------

def _f(s: str) -> float:
    return float(s)


def _i(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"expected an integer, got {s!r}")
    return int(v)


def _b(s: str) -> bool:
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _pos3(s: str) -> tuple[float, float, float]:
    parts = [p for p in s.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ValueError(f"expected 'x, y, z', got {s!r}")
    return (float(parts[0]), float(parts[1]), float(parts[2]))


def _floats(s: str) -> tuple[float, ...]:
    parts = [p for p in s.replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


def _ints(s: str) -> tuple[int, ...]:
    return tuple(_i(p) for p in s.replace(",", " ").split() if p)


def _names(s: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in s.split(",") if p.strip())


def _opt_f(s: str) -> float | None:
    t = s.strip().lower()
    if t in ("", "none", "follow", "auto"):
        return None
    return float(s)


def _enc(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(_enc(x) for x in v)
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _auto_int(s: str) -> int:
    return 0 if s.strip().lower() in ("auto", "0") else _i(s)


# (field name, decoder); field order defines the canonical echo order
_SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "system": {
        "carrier_hz": ("carrier_hz", _f),
        "noise_dbm": ("noise_dbm", _f),
        "snr_db": ("snr_db", _opt_f),
        "p_tx_w": ("p_tx_w", _opt_f),
        "n_streams": ("n_streams", _auto_int),
        "tx_pos": ("tx_pos", _pos3),
        "ris_pos": ("ris_pos", _pos3),
        "rx_pos": ("rx_pos", _pos3),
        "pathloss_reference": ("pathloss_reference", _b),
    },
    "arrays": {
        "n_tx": ("n_tx", _i),
        "n_rx": ("n_rx", _i),
        "n_ry": ("n_ry", _i),
        "n_rz": ("n_rz", _i),
        "spacing_wavelengths": ("spacing_wavelengths", _f),
    },
    "channel": {
        "model": ("model", str.strip),
        "k": ("k", _i),
        "l_rx": ("l_rx", _i),
        "nlos_gain_db": ("nlos_gain_db", _f),
        "tau_g": ("tau_g", _f),
        "tau_r": ("tau_r", _opt_f),
    },
    "solver": {
        "eps_outer": ("eps_outer", _f),
        "r_max": ("r_max", _i),
        "adpm_eps": ("adpm_eps", _f),
        "adpm_delta1": ("adpm_delta1", _f),
        "adpm_delta2": ("adpm_delta2", _f),
        "adpm_kappa": ("adpm_kappa", _f),
        "adpm_max_iters": ("adpm_max_iters", _i),
        "eta_tol": ("eta_tol", _f),
        "eta_max_doublings": ("eta_max_doublings", _i),
    },
    "sweep": {
        "family": ("family", str.strip),
        "values": ("values", _floats),
        "models": ("models", _names),
        "k_values": ("k_values", _ints),
        "trials": ("trials", _i),
    },
    "run": {
        "seed": ("seed", _i),
        "out_dir": ("out_dir", str.strip),
        "threads": ("threads", _i),
        "timing": ("timing", _b),
    },
}

_SOLVER_FIELDS = {f.name for f in dataclasses.fields(SolverConfig)}
_SWEEP_FIELDS = {f.name for f in dataclasses.fields(SweepSpec)}


def parse_config(path: str | None, text: str | None = None) -> SystemConfig:
    """Read an INI config file and return a validated SystemConfig.

    An empty file yields the all-defaults desk-scale config. Unknown
    sections or keys raise ConfigError naming every offender; each key
    left at its default is logged.
    """
    parser = configparser.ConfigParser(interpolation=None)
    if text is None:
        if path is None:
            text = ""
        else:
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    unknown = []
    top: dict[str, object] = {}
    solver_kw: dict[str, object] = {}
    sweep_kw: dict[str, object] = {}
    seen: set[tuple[str, str]] = set()

    for section in parser.sections():
        if section not in _SCHEMA:
            unknown.append(section)
            continue
        for key, raw in parser.items(section):
            ent = _SCHEMA[section].get(key)
            if ent is None:
                unknown.append(f"{section}.{key}")
                continue
            name, dec = ent
            try:
                val = dec(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc
            seen.add((section, key))
            if name in _SOLVER_FIELDS and section == "solver":
                solver_kw[name] = val
            elif name in _SWEEP_FIELDS and section == "sweep":
                sweep_kw[name] = val
            else:
                top[name] = val

    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(sorted(unknown)))

    # sweep values default depends on the family
    if "values" not in sweep_kw:
        fam = sweep_kw.get("family", SweepSpec.family)
        if fam in FAMILY_DEFAULT_VALUES:
            sweep_kw["values"] = FAMILY_DEFAULT_VALUES[fam]

    for section, ents in _SCHEMA.items():
        for key in ents:
            if (section, key) not in seen:
                log.debug("config default applied: %s.%s", section, key)

    cfg = SystemConfig(
        solver=SolverConfig(**solver_kw), sweep=SweepSpec(**sweep_kw), **top
    )
    validate_config(cfg)
    n_def = sum(len(v) for v in _SCHEMA.values()) - len(seen)
    log.info("config parsed: %d keys set, %d defaults applied", len(seen), n_def)
    return cfg


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def validate_config(cfg: SystemConfig) -> None:
    """Check every invariant; raise ConfigError naming the offending field."""
    _check(cfg.carrier_hz > 0, "carrier_hz must be > 0")
    _check(math.isfinite(cfg.noise_dbm), "noise_dbm must be finite")
    _check(
        cfg.snr_db is None or cfg.p_tx_w is None,
        "snr_db and p_tx_w are mutually exclusive; set only one",
    )
    if cfg.p_tx_w is not None:
        _check(cfg.p_tx_w > 0, "p_tx_w must be > 0")

    for name in ("n_tx", "n_rx", "n_ry", "n_rz"):
        _check(getattr(cfg, name) >= 1, f"{name} must be a positive integer")
    _check(cfg.n_streams >= 0, "n_streams must be 'auto' or a positive integer")
    _check(cfg.n_s <= cfg.n_tx, "n_streams must not exceed n_tx")
    _check(cfg.spacing_wavelengths > 0, "spacing_wavelengths must be > 0")

    _check(cfg.model in MODELS, f"model must be one of {MODELS}")
    _check(cfg.k >= 1, "k must be >= 1")
    if cfg.model == "piecewise":
        _check(cfg.n_ry % cfg.k == 0, f"n_ry={cfg.n_ry} not divisible by k={cfg.k}")
        _check(cfg.n_rz % cfg.k == 0, f"n_rz={cfg.n_rz} not divisible by k={cfg.k}")
    _check(cfg.l_rx >= 1, "l_rx must be >= 1")
    _check(0.0 <= cfg.tau_g < 1.0, "tau_g: tau must be in [0,1)")
    if cfg.tau_r is not None:
        _check(0.0 <= cfg.tau_r < 1.0, "tau_r: tau must be in [0,1)")

    s = cfg.solver
    _check(s.eps_outer > 0, "eps_outer must be > 0")
    _check(s.r_max >= 1, "r_max must be >= 1")
    _check(s.adpm_eps > 0, "adpm_eps must be > 0")
    _check(0.0 < s.adpm_delta1 < 1.0, "adpm_delta1 must be in (0,1)")
    _check(s.adpm_delta2 > 1.0, "adpm_delta2 must be > 1")
    _check(s.adpm_kappa > 0, "adpm_kappa must be > 0")
    _check(s.adpm_max_iters >= 1, "adpm_max_iters must be >= 1")
    _check(s.eta_tol > 0, "eta_tol must be > 0")
    _check(s.eta_max_doublings >= 1, "eta_max_doublings must be >= 1")

    sw = cfg.sweep
    _check(sw.family in FAMILIES, f"sweep family must be one of {FAMILIES}")
    _check(len(sw.values) > 0, "sweep values must be nonempty")
    _check(sw.trials >= 1, "sweep trials must be >= 1")
    _check(len(sw.models) > 0, "sweep models must be nonempty")
    for m in sw.models:
        _check(m in MODELS, f"unknown sweep model {m!r}")
    for kv in sw.k_values:
        _check(kv >= 1, "k_values entries must be >= 1")

    if sw.family == "se_vs_ntx":
        for v in sw.values:
            _check(v == int(v) and v >= 1, f"se_vs_ntx value {v} must be a positive integer")
    if sw.family == "se_vs_nris":
        for v in sw.values:
            _check(v == int(v) and v >= 1, f"se_vs_nris value {v} must be a positive integer")
            side = math.isqrt(int(v))
            _check(side * side == int(v), f"se_vs_nris value {int(v)} must be a perfect square")

    # every piecewise run in the sweep must partition its RIS
    if "piecewise" in sw.models:
        if sw.family == "se_vs_nris":
            sides = [math.isqrt(int(v)) for v in sw.values]
        else:
            sides = [cfg.n_ry, cfg.n_rz]
        for kv in sw.k_values:
            for side in sides:
                _check(side % kv == 0, f"RIS side {side} not divisible by k={kv}")

    for name in ("tx_pos", "ris_pos", "rx_pos"):
        _check(
            all(math.isfinite(v) for v in getattr(cfg, name)),
            f"{name} must be finite",
        )
    for a, b, names in (
        (cfg.tx_pos, cfg.ris_pos, "tx_pos/ris_pos"),
        (cfg.ris_pos, cfg.rx_pos, "ris_pos/rx_pos"),
    ):
        d2 = sum((x - y) ** 2 for x, y in zip(a, b))
        _check(d2 > 0, f"{names} must be distinct")

    _check(cfg.sweep.trials >= 1, "trials must be >= 1")
    _check(cfg.threads >= 0, "threads must be >= 0")


def to_ini(cfg: SystemConfig) -> str:
    """Echo the full effective config as canonical INI text.

    parse_config(text=to_ini(cfg)) reproduces cfg exactly.
    """
    buf = io.StringIO()
    for section, ents in _SCHEMA.items():
        buf.write(f"[{section}]\n")
        for key, (name, _dec) in ents.items():
            if name in _SOLVER_FIELDS and section == "solver":
                val = getattr(cfg.solver, name)
            elif name in _SWEEP_FIELDS and section == "sweep":
                val = getattr(cfg.sweep, name)
            else:
                val = getattr(cfg, name)
            if name == "n_streams" and val == 0:
                buf.write(f"{key} = auto\n")
            elif val is None:
                buf.write(f"{key} = none\n")
            else:
                buf.write(f"{key} = {_enc(val)}\n")
        buf.write("\n")
    return buf.getvalue()


def apply_paper_scale(cfg: SystemConfig) -> SystemConfig:
    """Switch to the full-scale scenario (64 Tx / 8 Rx / 16x16 RIS, 50 trials).

    Costs grow cubically with the array sizes; expect long runtimes.
    """
    log.warning(
        "paper-scale mode: 64 Tx antennas, 16x16 RIS, 50 trials; "
        "runtime grows by roughly two orders of magnitude over desk scale"
    )
    sweep = cfg.sweep
    if sweep.family == "convergence" and sweep.values == FAMILY_DEFAULT_VALUES["convergence"]:
        sweep = dataclasses.replace(sweep, values=(20.0,))
    new = dataclasses.replace(
        cfg,
        n_tx=64,
        n_rx=8,
        n_ry=16,
        n_rz=16,
        n_streams=64,
        tx_pos=(10.0, -20.0, 5.0),
        ris_pos=(0.0, 0.0, 10.0),
        rx_pos=(100.0, 50.0, 5.0),
        sweep=dataclasses.replace(sweep, trials=50),
    )
    validate_config(new)
    return new
