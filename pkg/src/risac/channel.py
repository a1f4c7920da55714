"""Channel synthesis: steering vectors, Rician fading links, round-trip radar
responses, random malicious-surface phases, and analytic angle derivatives.

All randomness flows through counter-based Philox substreams keyed by
(master_seed, trial_index, channel_tag), so any trial can be regenerated
independently of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risac.scenario import Geometry, ScenarioConfig

__all__ = [
    "SteeringVector",
    "ChannelSet",
    "RisPhases",
    "ula_steering",
    "upa_steering",
    "rician_channel",
    "round_trip_gain",
    "sensing_matrix",
    "steering_derivatives",
    "malicious_phases",
    "trial_rng",
    "synthesize_channels",
]

# substream tags; values are part of the reproducibility contract
_TAGS = {"h_l": 0, "h_m": 1, "g_l": 2, "g_m": 3, "beta": 4, "z_m": 5, "recovery": 6}


@dataclass(frozen=True)
class SteeringVector:
    """Array response, entries unit-modulus with the first entry exactly 1."""

    entries: np.ndarray
    kind: str            # 'ULA' | 'UPA-x' | 'UPA-z' | 'UPA-full'

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class RisPhases:
    """Unit-modulus reflection vectors of the two surfaces."""

    z_l: np.ndarray
    z_m: np.ndarray

    def validate(self) -> "RisPhases":
        for name, z in (("z_l", self.z_l), ("z_m", self.z_m)):
            if np.abs(np.abs(z) - 1.0).max() > 1e-9:
                raise ValueError(f"RisPhases.{name}: entries must be unit modulus")
        return self


@dataclass(frozen=True)
class ChannelSet:
    """One realization of every channel object consumed downstream."""

    h_l: np.ndarray          # (N_L, T_x) BS -> legitimate RIS
    h_m: np.ndarray          # (N_M, T_x) BS -> malicious RIS
    g_l: np.ndarray          # (K, N_L)  legitimate RIS -> users
    g_m: np.ndarray          # (K, N_M)  malicious RIS -> users
    a_l: np.ndarray          # (T_x, T_x) round-trip sensing matrix, L target
    a_e: np.ndarray          # (T_x, T_x) round-trip sensing matrix, E target
    beta_l: complex
    beta_e: complex
    rng_seed: tuple          # (master_seed, trial_index) provenance


def trial_rng(master_seed: int, trial: int, tag: str) -> np.random.Generator:
    """Independent counter-based substream for one channel object of one trial."""
    seq = np.random.SeedSequence(entropy=int(master_seed),
                                 spawn_key=(int(trial), _TAGS[tag]))
    return np.random.Generator(np.random.Philox(seq))


def ula_steering(theta: float, phi: float, count: int, nu: float) -> SteeringVector:
    """Uniform linear array response for departure angles (theta, phi)."""
    if count < 1:
        raise ValueError("ula_steering: count must be >= 1")
    ramp = nu * np.arange(count) * math.cos(theta) * math.cos(phi)
    return SteeringVector(np.exp(1j * ramp), "ULA")


def upa_steering(theta: float, phi: float, nx: int, nz: int, nu: float) -> SteeringVector:
    """Uniform planar array response b_x kron b_z (x then z axis)."""
    if nx < 1 or nz < 1:
        raise ValueError("upa_steering: element counts must be >= 1")
    bx = np.exp(1j * nu * np.arange(nx) * math.cos(theta) * math.cos(phi))
    bz = np.exp(1j * nu * np.arange(nz) * math.sin(phi))
    return SteeringVector(np.kron(bx, bz), "UPA-full")


def rician_channel(los: np.ndarray, kappa: float, l0: float, d: float,
                   alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Rician-faded link with large-scale gain l0 / d^alpha."""
    los = np.asarray(los, dtype=complex)
    if d <= 0:
        raise ValueError("rician_channel: distance must be positive")
    nlos = (rng.standard_normal(los.shape) + 1j * rng.standard_normal(los.shape)) \
        / math.sqrt(2.0)
    mix = math.sqrt(kappa / (1.0 + kappa)) * los + math.sqrt(1.0 / (1.0 + kappa)) * nlos
    return math.sqrt(l0 / d ** alpha) * mix


def round_trip_gain(wavelength: float, rcs: float, d: float) -> float:
    """Magnitude of the two-way path attenuation for a point target."""
    if d <= 0:
        raise ValueError("round_trip_gain: distance must be positive")
    return math.sqrt(wavelength ** 2 * rcs / (64.0 * math.pi ** 3 * d ** 4))


def sensing_matrix(beta: complex, steer: SteeringVector) -> np.ndarray:
    """Round-trip response beta * a^H a (rank one, trace beta * count)."""
    a = steer.entries
    return beta * np.outer(a.conj(), a)


def steering_derivatives(theta: float, phi: float, count: int, nu: float):
    """Analytic d(a^H a)/dtheta and d(a^H a)/dphi (attenuation excluded)."""
    if count < 1:
        raise ValueError("steering_derivatives: count must be >= 1")
    a = ula_steering(theta, phi, count, nu).entries
    t = np.arange(count)
    da_dtheta = 1j * nu * t * (-math.sin(theta) * math.cos(phi)) * a
    da_dphi = 1j * nu * t * (-math.cos(theta) * math.sin(phi)) * a
    d_theta = np.outer(da_dtheta.conj(), a) + np.outer(a.conj(), da_dtheta)
    d_phi = np.outer(da_dphi.conj(), a) + np.outer(a.conj(), da_dphi)
    return d_theta, d_phi


def malicious_phases(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random-attack reflection vector: i.i.d. phases uniform on [0, 2pi)."""
    if n < 1:
        raise ValueError("malicious_phases: need at least one element")
    return np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=n))


def _los_bs_to_ris(geom_angles_ris, geom_angles_bs, nx, nz, tx, nu_r, nu_t):
    b_ris = upa_steering(*geom_angles_ris, nx, nz, nu_r).entries
    b_bs = ula_steering(*geom_angles_bs, tx, nu_t).entries
    return np.outer(b_ris.conj(), b_bs)


def synthesize_channels(cfg: ScenarioConfig, geom: Geometry,
                        master_seed: int, trial: int) -> ChannelSet:
    """Draw one full channel realization for a trial.

    The BS-UAV sensing links are pure line of sight; the complex round-trip
    gains carry an independent uniform phase per trial so that the path-gain
    block of the Fisher information is exercised nontrivially.
    """
    K, tx = cfg.num_users, cfg.tx_antennas
    lam, nu_t, nu_r = cfg.wavelength_m, cfg.nu_t, cfg.nu_r
    kappa, l0 = cfg.rician_factor, cfg.reference_loss

    h_los_l = _los_bs_to_ris(geom.aod_lris_bs, geom.aod_bs_lris,
                             cfg.lris_nx, cfg.lris_nz, tx, nu_r, nu_t)
    h_los_m = _los_bs_to_ris(geom.aod_mris_bs, geom.aod_bs_mris,
                             cfg.mris_nx, cfg.mris_nz, tx, nu_r, nu_t)
    h_l = rician_channel(h_los_l, kappa, l0, geom.d_bs_lris,
                         cfg.pathloss_exp_bs_ris, trial_rng(master_seed, trial, "h_l"))
    h_m = rician_channel(h_los_m, kappa, l0, geom.d_bs_mris,
                         cfg.pathloss_exp_bs_ris, trial_rng(master_seed, trial, "h_m"))

    rng_gl = trial_rng(master_seed, trial, "g_l")
    rng_gm = trial_rng(master_seed, trial, "g_m")
    g_l = np.empty((K, cfg.n_lris), dtype=complex)
    g_m = np.empty((K, cfg.n_mris), dtype=complex)
    for k in range(K):
        los = upa_steering(*geom.aod_lris_users[k], cfg.lris_nx, cfg.lris_nz, nu_r).entries
        g_l[k] = rician_channel(los, kappa, l0, geom.d_lris_users[k],
                                cfg.pathloss_exp_ris_user, rng_gl)
        los = upa_steering(*geom.aod_mris_users[k], cfg.mris_nx, cfg.mris_nz, nu_r).entries
        g_m[k] = rician_channel(los, kappa, l0, geom.d_mris_users[k],
                                cfg.pathloss_exp_ris_user, rng_gm)

    rng_beta = trial_rng(master_seed, trial, "beta")
    chi = rng_beta.uniform(0.0, 2.0 * math.pi, size=2)
    beta_l = round_trip_gain(lam, cfg.rcs_m2, geom.d_bs_luav) * np.exp(1j * chi[0])
    beta_e = round_trip_gain(lam, cfg.rcs_m2, geom.d_bs_euav) * np.exp(1j * chi[1])
    a_l = sensing_matrix(beta_l, ula_steering(*geom.aod_bs_luav, tx, nu_t))
    a_e = sensing_matrix(beta_e, ula_steering(*geom.aod_bs_euav, tx, nu_t))

    return ChannelSet(h_l=h_l, h_m=h_m, g_l=g_l, g_m=g_m, a_l=a_l, a_e=a_e,
                      beta_l=complex(beta_l), beta_e=complex(beta_e),
                      rng_seed=(int(master_seed), int(trial)))
