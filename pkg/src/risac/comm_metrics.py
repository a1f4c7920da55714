"""Communication-side metrics: user SINR in both its direct and lifted
quadratic forms, eavesdropper SINR, and per-user secrecy rates.

The lifted form rewrites |g diag(z) H w|^2 as tr(C Z) with
C = (H w)(H w)^H  Hadamard  g^T g^*  and Z = z^H z; both evaluation paths are
kept so each validates the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LiftedChannels",
    "MetricsReport",
    "build_lifted_channels",
    "user_sinr_direct",
    "user_sinr_lifted",
    "eavesdropper_sinr",
    "secrecy_rates",
]


@dataclass(frozen=True)
class LiftedChannels:
    """Per-user Hadamard lifts of the reflected links for a fixed beam matrix.

    eff_l[k, c] is the effective reflect-path vector (H_L w_c) * g_k, so the
    signal lift of user k is the rank-one outer product of eff_l[k, k] and the
    interference lift sums the remaining beam columns.
    """

    eff_l: np.ndarray        # (K, n_cols, N_L)
    eff_m: np.ndarray        # (K, n_cols, N_M)
    num_users: int
    num_cols: int

    def signal(self, k: int) -> np.ndarray:
        v = self.eff_l[k, k]
        return np.outer(v, v.conj())

    def pair(self, k: int, khat: int) -> np.ndarray:
        """Interference lift of beam khat seen by user k (khat != k)."""
        v = self.eff_l[k, khat]
        return np.outer(v, v.conj())

    def interference_sum(self, k: int) -> np.ndarray:
        e = self.eff_l[k]
        full = e.conj().T @ e
        v = self.eff_l[k, k]
        return full.T - np.outer(v, v.conj())

    def malicious(self, k: int) -> np.ndarray:
        e = self.eff_m[k]
        return (e.conj().T @ e).T

    def malicious_power(self, k: int, z_m: np.ndarray) -> float:
        """tr(C_M Z_M) for Z_M = z_m^H z_m, i.e. the attack power at user k."""
        return float(max(np.sum(np.abs(self.eff_m[k] @ z_m) ** 2), 0.0))


def build_lifted_channels(h_l: np.ndarray, g_l: np.ndarray, h_m: np.ndarray,
                          g_m: np.ndarray, w: np.ndarray) -> LiftedChannels:
    K = g_l.shape[0]
    f_l = (h_l @ w).T            # (n_cols, N_L)
    f_m = (h_m @ w).T
    eff_l = g_l[:, None, :] * f_l[None, :, :]
    eff_m = g_m[:, None, :] * f_m[None, :, :]
    return LiftedChannels(eff_l=eff_l, eff_m=eff_m, num_users=K,
                          num_cols=w.shape[1])


def user_sinr_direct(g_lk: np.ndarray, g_mk: np.ndarray, z_l: np.ndarray,
                     z_m: np.ndarray, h_l: np.ndarray, h_m: np.ndarray,
                     w: np.ndarray, k: int, noise_power: float) -> float:
    """User-k SINR straight from the received-signal model: desired beam over
    interference from every other beam, the full malicious reflection, and
    noise."""
    n_cols = w.shape[1]
    if not 0 <= k < n_cols:
        raise IndexError(f"user index {k} out of range for {n_cols} beams")
    lit = (g_lk * z_l) @ (h_l @ w)          # (n_cols,) legitimate path per beam
    mal = (g_mk * z_m) @ (h_m @ w)
    powers = np.abs(lit) ** 2
    num = float(powers[k])
    den = float(powers.sum() - powers[k]) + float(np.sum(np.abs(mal) ** 2)) \
        + noise_power
    return num / den


def user_sinr_lifted(c_signal: np.ndarray, c_pairs, c_malicious: np.ndarray,
                     big_z_l: np.ndarray, big_z_m: np.ndarray,
                     noise_power: float) -> float:
    """User SINR from the trace form tr(C Z) over the lifted variables."""
    for name, mat in (("Z_L", big_z_l), ("Z_M", big_z_m)):
        if np.abs(mat - mat.conj().T).max() > 1e-8 * max(1.0, np.abs(mat).max()):
            raise ValueError(f"user_sinr_lifted: {name} is not Hermitian")
    # tr(C Z) = <Z, C> for Hermitian C, Z
    num = float(np.real(np.vdot(big_z_l, c_signal)))
    interf = sum(float(np.real(np.vdot(big_z_l, c))) for c in c_pairs)
    mal = float(np.real(np.vdot(big_z_m, c_malicious)))
    return num / (interf + mal + noise_power)


def eavesdropper_sinr(a_e: np.ndarray, beta_e: float, w: np.ndarray, k: int,
                      noise_power: float) -> float:
    """Interception SINR of the E-UAV on beam k: the eavesdropper hears the
    sqrt(beta)-attenuated direct BS signal, no reflected component."""
    n_cols = w.shape[1]
    if not 0 <= k < n_cols:
        raise IndexError(f"user index {k} out of range for {n_cols} beams")
    powers = beta_e * np.abs(a_e @ w) ** 2
    num = float(powers[k])
    den = float(powers.sum() - powers[k]) + noise_power
    return num / den


def secrecy_rates(eta: np.ndarray, eta_e: np.ndarray):
    """Per-user rates, eavesdropping rates, clamped secrecy rates, and sum."""
    eta = np.asarray(eta, dtype=float)
    eta_e = np.asarray(eta_e, dtype=float)
    if np.any(eta < 0) or np.any(eta_e < 0):
        raise ValueError("secrecy_rates: SINRs must be non-negative")
    rate = np.log2(1.0 + eta)
    rate_e = np.log2(1.0 + eta_e)
    secrecy = np.maximum(rate - rate_e, 0.0)
    return rate, rate_e, secrecy, float(secrecy.sum())


@dataclass(frozen=True)
class MetricsReport:
    """Per-trial metric bundle for one solved scenario."""

    eta: np.ndarray              # (K,) user SINRs, linear
    eta_e: np.ndarray            # (K,) eavesdropper SINRs, linear
    rate: np.ndarray             # (K,) bits/s/Hz
    rate_e: np.ndarray
    secrecy: np.ndarray          # (K,) clamped secrecy rates
    secrecy_sum: float
    gamma_l: float               # sensing SINRs, linear
    gamma_e: float
    crb_l: object                # CrbResult per target
    crb_e: object
