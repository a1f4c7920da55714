"""Sensing-side metrics: echo SINR, the 4x4 Fisher information of
(theta, phi, Re beta, Im beta), and the Cramer-Rao bound on the 2D departure
angles via the Schur complement of the path-gain block."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FisherBlocks",
    "CrbResult",
    "UnidentifiableGeometryError",
    "sensing_sinr",
    "sensing_sinr_trace",
    "fisher_information",
    "crb_aod",
    "crb_aod_per_angle",
]


class UnidentifiableGeometryError(RuntimeError):
    """The angle information matrix is singular; no finite CRB exists."""


@dataclass(frozen=True)
class FisherBlocks:
    """Blocks of the Fisher information, ordered (theta, phi, Re b, Im b)."""

    angle_block: np.ndarray      # 2x2
    cross_block: np.ndarray      # 2x2, rows angles / cols gain components
    gain_block: np.ndarray       # 2x2

    @property
    def full(self) -> np.ndarray:
        top = np.hstack([self.angle_block, self.cross_block])
        bot = np.hstack([self.cross_block.T, self.gain_block])
        return np.vstack([top, bot])


@dataclass(frozen=True)
class CrbResult:
    crb_matrix: np.ndarray       # 2x2, rad^2
    root_crb_theta_deg: float
    root_crb_phi_deg: float
    root_crb_combined_deg: float


def sensing_sinr(a_i: np.ndarray, a_j: np.ndarray, w: np.ndarray,
                 noise_power: float) -> float:
    """Echo SINR of target i against the competing echo of target j,
    ||A_i W||_F^2 / (||A_j W||_F^2 + sigma^2)."""
    num = float(np.linalg.norm(a_i @ w) ** 2)
    den = float(np.linalg.norm(a_j @ w) ** 2) + noise_power
    return num / den


def sensing_sinr_trace(a_i: np.ndarray, a_j: np.ndarray, r_x: np.ndarray,
                       noise_power: float) -> float:
    """Covariance form tr(A_i^H A_i R_x) / (tr(A_j^H A_j R_x) + sigma^2)."""
    num = float(np.real(np.trace(a_i.conj().T @ a_i @ r_x)))
    den = float(np.real(np.trace(a_j.conj().T @ a_j @ r_x))) + noise_power
    return num / den


def _re_tr(m) -> float:
    return float(np.real(np.trace(m)))


def fisher_information(a_bare: np.ndarray, d_theta: np.ndarray, d_phi: np.ndarray,
                       beta: complex, r_x: np.ndarray, block_len: int,
                       noise_power: float) -> FisherBlocks:
    """Fisher information of (theta, phi, Re beta, Im beta) at covariance level.

    a_bare and the derivative matrices exclude the path gain; beta enters the
    angle block through |beta|^2 and the cross block through beta^*.
    """
    r_x = np.asarray(r_x, dtype=complex)
    lam_min = float(np.linalg.eigvalsh(0.5 * (r_x + r_x.conj().T))[0])
    if lam_min < -1e-9 * max(1.0, float(np.linalg.norm(r_x))):
        raise ValueError(f"fisher_information: R_x not PSD (min eig {lam_min:.3e})")

    c = 2.0 * block_len / noise_power
    angle = c * abs(beta) ** 2 * np.real(np.array([
        [_c_tr(d_theta, r_x, d_theta), _c_tr(d_theta, r_x, d_phi)],
        [_c_tr(d_phi, r_x, d_theta), _c_tr(d_phi, r_x, d_phi)],
    ]))
    angle = 0.5 * (angle + angle.T)

    col = np.array([_c_tr(a_bare, r_x, d_theta), _c_tr(a_bare, r_x, d_phi)])
    cross = c * np.real(np.conj(beta) * np.outer(col, np.array([1.0, 1.0j])))

    gain = c * _re_tr(a_bare @ r_x @ a_bare.conj().T) * np.eye(2)
    return FisherBlocks(angle_block=angle, cross_block=cross, gain_block=gain)


def _c_tr(m1, r, m2):
    # tr(M1 R M2^H)
    return complex(np.trace(m1 @ r @ m2.conj().T))


def crb_aod(fisher: FisherBlocks) -> CrbResult:
    """Joint angle-pair CRB as the inverse Schur complement of the path-gain
    block.

    Note a single linear array only resolves the cone angle, so its two angle
    partials are collinear and this joint bound is singular for every
    geometry; it exists for information matrices with a full-rank angle block
    (e.g. planar apertures).  The per-angle variant below is what the
    simulation reports.
    """
    gain = fisher.gain_block
    if np.linalg.cond(gain) > 1e12:
        raise UnidentifiableGeometryError("path-gain information block is singular")
    schur = fisher.angle_block - fisher.cross_block @ np.linalg.solve(
        gain, fisher.cross_block.T)
    if np.linalg.cond(schur) > 1e12:
        raise UnidentifiableGeometryError("angle information is singular after "
                                          "profiling out the path gain")
    crb = np.linalg.inv(schur)
    crb = 0.5 * (crb + crb.T)
    deg = 180.0 / math.pi
    var_theta = max(crb[0, 0], 0.0)
    var_phi = max(crb[1, 1], 0.0)
    return CrbResult(
        crb_matrix=crb,
        root_crb_theta_deg=deg * math.sqrt(var_theta),
        root_crb_phi_deg=deg * math.sqrt(var_phi),
        root_crb_combined_deg=deg * math.sqrt(var_theta + var_phi),
    )


def crb_aod_per_angle(fisher: FisherBlocks) -> CrbResult:
    """Per-angle CRBs: each angle is bounded with the other angle held known,
    profiling out only the unknown complex path gain (3x3 sub-information).

    Both variances scale exactly as 1/c when the transmit covariance is
    scaled by c, since every information block is trace-linear in it.
    """
    gain = fisher.gain_block
    if np.linalg.cond(gain) > 1e12:
        raise UnidentifiableGeometryError("path-gain information block is singular")
    variances = []
    for i in range(2):
        cross = fisher.cross_block[i]
        schur = fisher.angle_block[i, i] - cross @ np.linalg.solve(gain, cross)
        if schur <= 0:
            raise UnidentifiableGeometryError(
                f"angle component {i} carries no information beyond the path gain")
        variances.append(1.0 / schur)
    deg = 180.0 / math.pi
    return CrbResult(
        crb_matrix=np.diag(variances),
        root_crb_theta_deg=deg * math.sqrt(variances[0]),
        root_crb_phi_deg=deg * math.sqrt(variances[1]),
        root_crb_combined_deg=deg * math.sqrt(variances[0] + variances[1]),
    )
