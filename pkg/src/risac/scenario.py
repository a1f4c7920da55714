"""Experiment configuration: file parsing, unit conversion, validation, and
derivation of distances / 2D departure angles from node positions.

Angle convention (used consistently across the package): theta is measured in
the horizontal plane from the array broadside (x axis), phi is elevation above
the horizontal.  File-boundary units are degrees, dBW/dB, and meters; all
stored quantities are radians, linear scale, and meters.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "GeometrySpec",
    "Geometry",
    "load_config",
    "derive_geometry",
    "db_to_linear",
    "linear_to_db",
    "angles_from_offset",
    "offset_from_angles",
]


class ConfigError(ValueError):
    """Configuration schema or invariant violation; names the offending field."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise ValueError("dB conversion needs a positive value")
    return 10.0 * math.log10(value)


def angles_from_offset(offset) -> tuple[float, float]:
    """(theta, phi) of a 3D offset vector; theta in (-pi, pi], phi in [-pi/2, pi/2]."""
    dx, dy, dz = offset
    horiz = math.hypot(dx, dy)
    return math.atan2(dy, dx), math.atan2(dz, horiz)


def offset_from_angles(d: float, theta: float, phi: float) -> np.ndarray:
    """Inverse of angles_from_offset for a given range d."""
    return np.array([
        d * math.cos(phi) * math.cos(theta),
        d * math.cos(phi) * math.sin(theta),
        d * math.sin(phi),
    ])


@dataclass(frozen=True)
class GeometrySpec:
    """Raw geometry input: either node positions, or distances plus departure
    angles straight from a parameter table.  Positions take precedence."""

    # position mode (meters)
    bs_position: tuple | None = None
    luav_position: tuple | None = None
    euav_position: tuple | None = None
    user_positions: tuple | None = None          # K entries of (x, y, z)

    # distance/angle mode (meters / radians)
    d_bs_luav: float | None = None
    d_bs_euav: float | None = None
    aod_bs_luav: tuple | None = None             # (theta, phi)
    aod_bs_euav: tuple | None = None
    aod_lris_bs: tuple | None = None
    aod_mris_bs: tuple | None = None
    d_lris_users: tuple | None = None
    d_mris_users: tuple | None = None
    aod_lris_users: tuple | None = None          # K entries of (theta, phi)
    aod_mris_users: tuple | None = None

    @property
    def has_positions(self) -> bool:
        return self.bs_position is not None


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical and system parameters, in linear scale / SI units."""

    carrier_frequency_hz: float
    tx_antennas: int
    num_users: int
    lris_nx: int
    lris_nz: int
    mris_nx: int
    mris_nz: int
    coherent_block_length: int
    rician_factor: float                 # linear
    pathloss_exp_bs_ris: float
    pathloss_exp_ris_user: float
    rcs_m2: float
    reference_loss: float                # linear
    noise_power_w: float
    total_power_w: float
    sensing_sinr_cap: float              # linear
    geometry: GeometrySpec
    element_spacing_tx_m: float | None = None    # default lambda/2
    element_spacing_ris_m: float | None = None

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency_hz

    @property
    def spacing_tx_m(self) -> float:
        return self.element_spacing_tx_m if self.element_spacing_tx_m else 0.5 * self.wavelength_m

    @property
    def spacing_ris_m(self) -> float:
        return self.element_spacing_ris_m if self.element_spacing_ris_m else 0.5 * self.wavelength_m

    @property
    def nu_t(self) -> float:
        return 2.0 * math.pi * self.spacing_tx_m / self.wavelength_m

    @property
    def nu_r(self) -> float:
        return 2.0 * math.pi * self.spacing_ris_m / self.wavelength_m

    @property
    def n_lris(self) -> int:
        return self.lris_nx * self.lris_nz

    @property
    def n_mris(self) -> int:
        return self.mris_nx * self.mris_nz

    def replace(self, **kwargs) -> "ScenarioConfig":
        return dataclasses.replace(self, **kwargs)

    def validate(self) -> "ScenarioConfig":
        def positive(name, value):
            if not (np.isfinite(value) and value > 0):
                raise ConfigError(f"{name}: must be strictly positive, got {value}")

        if self.tx_antennas < 2:
            raise ConfigError("tx_antennas: need at least 2 (the angle block of the "
                              "Fisher information is identically zero for a single antenna)")
        if self.num_users < 1:
            raise ConfigError("num_users: must be at least 1")
        if self.num_users > self.tx_antennas:
            raise ConfigError(f"num_users: at most tx_antennas={self.tx_antennas} "
                              "communication beams are available")
        for name in ("lris_nx", "lris_nz", "mris_nx", "mris_nz"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name}: must be a positive integer")
        if self.coherent_block_length < 1:
            raise ConfigError("coherent_block_length: must be a positive integer")
        positive("carrier_frequency_hz", self.carrier_frequency_hz)
        positive("rician_factor", self.rician_factor)
        positive("rcs_m2", self.rcs_m2)
        positive("reference_loss", self.reference_loss)
        positive("noise_power_w", self.noise_power_w)
        if not (np.isfinite(self.total_power_w) and self.total_power_w >= 0):
            raise ConfigError("total_power_w: must be non-negative")
        positive("sensing_sinr_cap", self.sensing_sinr_cap)
        for name in ("pathloss_exp_bs_ris", "pathloss_exp_ris_user"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be positive")
        derive_geometry(self)   # surfaces geometry errors at validation time
        return self


@dataclass(frozen=True)
class Geometry:
    """Derived deterministic geometry: distances (m) and 2D AoD pairs (rad)."""

    d_bs_luav: float
    d_bs_euav: float
    aod_bs_luav: tuple
    aod_bs_euav: tuple
    aod_lris_bs: tuple
    aod_mris_bs: tuple
    d_lris_users: np.ndarray
    d_mris_users: np.ndarray
    aod_lris_users: np.ndarray       # (K, 2)
    aod_mris_users: np.ndarray

    # the RISs ride on the UAVs, so the BS-side departure angles coincide
    @property
    def aod_bs_lris(self) -> tuple:
        return self.aod_bs_luav

    @property
    def aod_bs_mris(self) -> tuple:
        return self.aod_bs_euav

    @property
    def d_bs_lris(self) -> float:
        return self.d_bs_luav

    @property
    def d_bs_mris(self) -> float:
        return self.d_bs_euav


def _check_angle_pair(name, pair):
    theta, phi = pair
    if not (-math.pi < theta <= math.pi):
        raise ConfigError(f"{name}: horizontal angle {theta} rad outside (-pi, pi]")
    if not (-math.pi / 2 <= phi <= math.pi / 2):
        raise ConfigError(f"{name}: vertical angle {phi} rad outside [-pi/2, pi/2]")
    return float(theta), float(phi)


def derive_geometry(cfg: ScenarioConfig) -> Geometry:
    """Distances and AoD pairs from positions; table-mode values pass through."""
    spec = cfg.geometry
    K = cfg.num_users

    if spec.has_positions:
        for name in ("luav_position", "euav_position", "user_positions"):
            if getattr(spec, name) is None:
                raise ConfigError(f"geometry.{name}: required in position mode")
        bs = np.asarray(spec.bs_position, dtype=float)
        luav = np.asarray(spec.luav_position, dtype=float)
        euav = np.asarray(spec.euav_position, dtype=float)
        users = np.asarray(spec.user_positions, dtype=float).reshape(-1, 3)
        if users.shape[0] != K:
            raise ConfigError(f"geometry.user_positions: expected {K} entries, "
                              f"got {users.shape[0]}")

        def link(src, dst, name):
            off = dst - src
            d = float(np.linalg.norm(off))
            if d < 1e-9:
                raise ConfigError(f"geometry.{name}: coincident nodes")
            return d, angles_from_offset(off)

        d_l, aod_l = link(bs, luav, "bs->luav")
        d_e, aod_e = link(bs, euav, "bs->euav")
        _, aod_lris_bs = link(luav, bs, "lris->bs")
        _, aod_mris_bs = link(euav, bs, "mris->bs")
        d_lu = np.empty(K)
        d_mu = np.empty(K)
        aod_lu = np.empty((K, 2))
        aod_mu = np.empty((K, 2))
        for k in range(K):
            d_lu[k], aod_lu[k] = link(luav, users[k], f"lris->user{k + 1}")
            d_mu[k], aod_mu[k] = link(euav, users[k], f"mris->user{k + 1}")
        return Geometry(d_l, d_e, aod_l, aod_e, aod_lris_bs, aod_mris_bs,
                        d_lu, d_mu, aod_lu, aod_mu)

    required = ("d_bs_luav", "d_bs_euav", "aod_bs_luav", "aod_bs_euav",
                "aod_lris_bs", "aod_mris_bs", "d_lris_users", "d_mris_users",
                "aod_lris_users", "aod_mris_users")
    for name in required:
        if getattr(spec, name) is None:
            raise ConfigError(f"geometry.{name}: required in distance/angle mode")
    for name in ("d_bs_luav", "d_bs_euav"):
        if getattr(spec, name) <= 0:
            raise ConfigError(f"geometry.{name}: distance must be positive")
    d_lu = np.asarray(spec.d_lris_users, dtype=float)
    d_mu = np.asarray(spec.d_mris_users, dtype=float)
    if d_lu.shape != (K,) or d_mu.shape != (K,):
        raise ConfigError(f"geometry.d_*_users: expected {K} distances per RIS")
    if np.any(d_lu <= 0) or np.any(d_mu <= 0):
        raise ConfigError("geometry.d_*_users: distances must be positive")
    aod_lu = np.asarray(spec.aod_lris_users, dtype=float).reshape(K, 2)
    aod_mu = np.asarray(spec.aod_mris_users, dtype=float).reshape(K, 2)
    for k in range(K):
        _check_angle_pair(f"aod_lris_users[{k}]", aod_lu[k])
        _check_angle_pair(f"aod_mris_users[{k}]", aod_mu[k])
    return Geometry(
        float(spec.d_bs_luav), float(spec.d_bs_euav),
        _check_angle_pair("aod_bs_luav", spec.aod_bs_luav),
        _check_angle_pair("aod_bs_euav", spec.aod_bs_euav),
        _check_angle_pair("aod_lris_bs", spec.aod_lris_bs),
        _check_angle_pair("aod_mris_bs", spec.aod_mris_bs),
        d_lu, d_mu, aod_lu, aod_mu,
    )


# ---------------------------------------------------------------------------
# Config file parsing
# ---------------------------------------------------------------------------

_SECTIONS = {
    "system": {"tx_antennas", "num_users", "lris_nx", "lris_nz", "mris_nx",
               "mris_nz", "coherent_block_length"},
    "rf": {"carrier_frequency_hz", "rician_factor_db", "pathloss_exp_bs_ris",
           "pathloss_exp_ris_user", "rcs_m2", "reference_loss_db",
           "noise_power_dbw", "total_power_dbw", "sensing_sinr_cap_db",
           "element_spacing_tx_m", "element_spacing_ris_m"},
    "geometry": {"bs_position", "luav_position", "euav_position", "user_positions",
                 "d_bs_luav", "d_bs_euav", "aod_bs_luav_deg", "aod_bs_euav_deg",
                 "aod_lris_bs_deg", "aod_mris_bs_deg", "d_lris_users",
                 "d_mris_users", "aod_lris_users_deg", "aod_mris_users_deg"},
    "experiment": {"preset", "trials", "master_seed", "output_dir"},
}


def _floats(text: str) -> tuple:
    parts = text.replace(",", " ").split()
    try:
        return tuple(float(v) for v in parts)
    except ValueError as exc:
        raise ConfigError(f"could not parse numbers from {text!r}") from exc


def _pairs_deg(text: str) -> tuple:
    """Semicolon-separated 'theta phi' pairs in degrees -> radians tuples."""
    out = []
    for chunk in text.split(";"):
        vals = _floats(chunk)
        if len(vals) != 2:
            raise ConfigError(f"expected 'theta phi' pair, got {chunk!r}")
        out.append((math.radians(vals[0]), math.radians(vals[1])))
    return tuple(out)


def load_config(path) -> ScenarioConfig:
    """Parse and validate an INI scenario file (see configs/table1.ini)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SECTIONS[section]:
                raise ConfigError(f"[{section}] {key}: unknown field")
    for section in ("system", "rf", "geometry"):
        if section not in parser:
            raise ConfigError(f"missing section [{section}]")

    def get(section, key, cast=float, default=None):
        if key not in parser[section]:
            if default is not None:
                return default
            raise ConfigError(f"[{section}] {key}: missing required field")
        raw = parser[section][key]
        try:
            return cast(raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from exc

    def get_opt(section, key, cast=float):
        if key not in parser[section]:
            return None
        return get(section, key, cast)

    sys_s, rf, geo = parser["system"], parser["rf"], parser["geometry"]  # noqa: F841

    def angle_pair(key):
        pairs = get_opt("geometry", key, _pairs_deg)
        if pairs is None:
            return None
        if len(pairs) != 1:
            raise ConfigError(f"[geometry] {key}: expected one 'theta phi' pair")
        return pairs[0]

    def position(key):
        vals = get_opt("geometry", key, _floats)
        if vals is None:
            return None
        if len(vals) != 3:
            raise ConfigError(f"[geometry] {key}: expected 'x y z'")
        return vals

    def user_positions(key):
        raw = get_opt("geometry", key, str)
        if raw is None:
            return None
        out = []
        for chunk in raw.split(";"):
            vals = _floats(chunk)
            if len(vals) != 3:
                raise ConfigError(f"[geometry] {key}: expected 'x y z' per user")
            out.append(vals)
        return tuple(out)

    geometry = GeometrySpec(
        bs_position=position("bs_position"),
        luav_position=position("luav_position"),
        euav_position=position("euav_position"),
        user_positions=user_positions("user_positions"),
        d_bs_luav=get_opt("geometry", "d_bs_luav"),
        d_bs_euav=get_opt("geometry", "d_bs_euav"),
        aod_bs_luav=angle_pair("aod_bs_luav_deg"),
        aod_bs_euav=angle_pair("aod_bs_euav_deg"),
        aod_lris_bs=angle_pair("aod_lris_bs_deg"),
        aod_mris_bs=angle_pair("aod_mris_bs_deg"),
        d_lris_users=get_opt("geometry", "d_lris_users", _floats),
        d_mris_users=get_opt("geometry", "d_mris_users", _floats),
        aod_lris_users=get_opt("geometry", "aod_lris_users_deg", _pairs_deg),
        aod_mris_users=get_opt("geometry", "aod_mris_users_deg", _pairs_deg),
    )

    cfg = ScenarioConfig(
        carrier_frequency_hz=get("rf", "carrier_frequency_hz"),
        tx_antennas=get("system", "tx_antennas", int),
        num_users=get("system", "num_users", int),
        lris_nx=get("system", "lris_nx", int),
        lris_nz=get("system", "lris_nz", int),
        mris_nx=get("system", "mris_nx", int),
        mris_nz=get("system", "mris_nz", int),
        coherent_block_length=get("system", "coherent_block_length", int),
        rician_factor=db_to_linear(get("rf", "rician_factor_db")),
        pathloss_exp_bs_ris=get("rf", "pathloss_exp_bs_ris"),
        pathloss_exp_ris_user=get("rf", "pathloss_exp_ris_user"),
        rcs_m2=get("rf", "rcs_m2"),
        reference_loss=db_to_linear(get("rf", "reference_loss_db")),
        noise_power_w=db_to_linear(get("rf", "noise_power_dbw")),
        total_power_w=db_to_linear(get("rf", "total_power_dbw")),
        sensing_sinr_cap=db_to_linear(get("rf", "sensing_sinr_cap_db", float, 20.0)),
        element_spacing_tx_m=get_opt("rf", "element_spacing_tx_m"),
        element_spacing_ris_m=get_opt("rf", "element_spacing_ris_m"),
        geometry=geometry,
    )
    return cfg.validate()
