"""Two-stage secure-ISAC design: transmit-covariance optimization with
eigen-beam extraction, then legitimate-surface phase optimization, composed
into a single per-realization pipeline.

Stage 1 balances the beam-domain echo powers of the two targets (max-min over
the steering-product ratio), which is independent of every reflected channel;
the attenuation-weighted sensing SINRs are reported from the resulting
covariance.  Stage 2 lifts the user-SINR quadratic forms and solves the
max-min phase problem by bisection over feasibility SDPs with unit diagonal,
followed by Gaussian randomization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from risac import comm_metrics, sensing_metrics
from risac.channel import (ChannelSet, SteeringVector,
                           steering_derivatives, trial_rng, ula_steering)
from risac.comm_metrics import LiftedChannels, MetricsReport, build_lifted_channels
from risac.scenario import Geometry, ScenarioConfig, derive_geometry
from risac.sdr_core import (TraceLpSdp, bisect_maxmin, psd_factorize,
                            rank_one_recover, solve_sdp)

__all__ = ["TransmitDesign", "PhaseDesign", "solve_p2", "extract_w",
           "solve_p3", "solve_p1"]

DEFAULT_RANDOMIZATION_SAMPLES = 1000


@dataclass(frozen=True)
class TransmitDesign:
    """Stage-1 output: covariance, beams, and bookkeeping."""

    r_x: np.ndarray                 # (T_x, T_x) Hermitian PSD, tr <= P_T
    w: np.ndarray                   # (T_x, K + T_x) = [user beams | sensing beams]
    user_assignment: dict           # user k -> eigen-column index of the factor
    achieved_min_sensing_sinr: float    # over the matrices given to the SDP
    sdr_bound: float
    cap_bound: bool                 # the SINR ceiling was the binding limit
    num_solves: int


@dataclass(frozen=True)
class PhaseDesign:
    """Stage-2 output: lifted solution, recovered phases, and the gap."""

    big_z: np.ndarray               # (N_L, N_L) PSD, unit diagonal
    z_l: np.ndarray                 # (N_L,) unit-modulus reflection vector
    sdr_bound: float                # certified relaxation bound on min SINR
    achieved_min_user_sinr: float
    randomization_gap: float        # achieved / bound
    num_solves: int


def _echo_matrix(a: np.ndarray) -> np.ndarray:
    """A^H A, the quadratic form behind ||A W||_F^2 = tr(A^H A R)."""
    return a.conj().T @ a


def solve_p2(a_l: np.ndarray, a_e: np.ndarray, total_power: float,
             sinr_cap: float, noise_power: float, tol_t: float = 1e-3,
             *, num_users: int = 0, assignment_rows: np.ndarray | None = None,
             solve_tol: float = 1e-7) -> TransmitDesign:
    """Max-min echo-ratio covariance design plus beam extraction.

    a_l / a_e are the targets' response matrices; a target with zero response
    drops out of the objective (single-target reduction).  The ratio caps and
    the power budget are enforced as stated; the returned covariance is
    PSD-projected and power-clipped so downstream feasibility is exact.
    """
    a_l = np.asarray(a_l, dtype=complex)
    a_e = np.asarray(a_e, dtype=complex)
    tx = a_l.shape[0]
    if total_power < 0:
        raise ValueError("solve_p2: total power must be non-negative")

    mats = [_echo_matrix(a_l), _echo_matrix(a_e)]
    active = [i for i, m in enumerate(mats) if np.linalg.norm(m) > 0]
    if not active:
        raise ValueError("solve_p2: both targets have zero response")

    eye = np.eye(tx)

    def builder(t):
        cons = [(eye, "<=", float(total_power))]
        for i in active:
            j = 1 - i
            cons.append((mats[i] - t * mats[j], ">=", t * noise_power))
            if np.isfinite(sinr_cap):
                cons.append((mats[i] - sinr_cap * mats[j], "<=",
                             sinr_cap * noise_power))
        return TraceLpSdp(dim=tx, objective=None, constraints=cons)

    if total_power == 0.0:
        r_x = np.zeros((tx, tx), dtype=complex)
        w, assignment = extract_w(r_x, num_users, assignment_rows)
        return TransmitDesign(r_x=r_x, w=w, user_assignment=assignment,
                              achieved_min_sensing_sinr=0.0, sdr_bound=0.0,
                              cap_bound=False, num_solves=0)

    if len(active) == 2:
        # two mutually interfering echoes can never both exceed 0 dB
        ratio_bound = 1.0
    else:
        i = active[0]
        ratio_bound = total_power * float(np.linalg.eigvalsh(mats[i])[-1]) \
            / noise_power
    t_hi = min(sinr_cap, ratio_bound) * (1.0 + 1e-3) + 10.0 * tol_t

    res = bisect_maxmin(builder, 0.0, t_hi, tol_t, solve_tol=solve_tol,
                        probe_tol=max(1e-6, solve_tol))

    # The max-min level set at t* is attained on a large face (the echo
    # floors fix ratios, not directions).  Re-solving for maximum radiated
    # power at the certified level lands on the interior-point center of
    # that face: a full-rank covariance that keeps every eigen-beam usable
    # downstream instead of the rank-deficient extreme point of the
    # feasibility probe.
    extract_cons = [(eye, "<=", float(total_power))]
    for i in active:
        j = 1 - i
        extract_cons.append((mats[i] - res.t_star * mats[j], ">=",
                             res.t_star * noise_power))
        if np.isfinite(sinr_cap):
            extract_cons.append((mats[i] - sinr_cap * mats[j], "<=",
                                 sinr_cap * noise_power))
    final = solve_sdp(TraceLpSdp(dim=tx, objective=eye,
                                 constraints=extract_cons), tol=solve_tol)
    x_out = final.X if final.status == "optimal" else res.solution.X

    # r_x is fixed before beam assignment, so it cannot depend on any
    # reflected-channel input; W is a column permutation of its factor
    r_x = _clip_covariance(x_out, total_power)
    w, assignment = extract_w(r_x, num_users, assignment_rows)

    def ratio(i):
        j = 1 - i
        num = float(np.real(np.vdot(mats[i], r_x)))
        den = float(np.real(np.vdot(mats[j], r_x))) + noise_power
        return num / den

    achieved = min(ratio(i) for i in active)
    cap_bound = np.isfinite(sinr_cap) and res.t_star >= sinr_cap * (1.0 - 1e-2)
    return TransmitDesign(r_x=r_x, w=w, user_assignment=assignment,
                          achieved_min_sensing_sinr=achieved,
                          sdr_bound=res.t_upper, cap_bound=bool(cap_bound),
                          num_solves=res.num_solves)


def _clip_covariance(x: np.ndarray, total_power: float) -> np.ndarray:
    """Project onto the PSD cone and rescale so tr(X) <= total_power exactly."""
    x = 0.5 * (x + x.conj().T)
    lam, u = np.linalg.eigh(x)
    lam = np.clip(lam, 0.0, None)
    x = (u * lam) @ u.conj().T
    tr = float(np.real(np.trace(x)))
    if tr > total_power > 0:
        x = x * (total_power / tr)
    return 0.5 * (x + x.conj().T)


def extract_w(r_x: np.ndarray, num_users: int,
              assignment_rows: np.ndarray | None = None):
    """Eigen-factorize the covariance and assign beams to users.

    Users are greedily matched to distinct factor columns by descending
    effective gain |row_k . v_c| (ties break toward the lower column index);
    unmatched columns become sensing beams.  If the factor has fewer nonzero
    columns than users, the surplus users get zero beams with a warning.
    Always returns a (T_x, num_users + T_x) matrix with W W^H = R_x.
    """
    r_x = np.asarray(r_x, dtype=complex)
    tx = r_x.shape[0]
    v = psd_factorize(r_x)
    col_power = np.linalg.norm(v, axis=0) ** 2
    nonzero = [c for c in range(tx) if col_power[c] > 0]

    assignment = {}
    if num_users > 0 and nonzero:
        if assignment_rows is not None:
            gains = np.abs(np.asarray(assignment_rows, dtype=complex) @ v)
        else:
            # no channel knowledge: prefer stronger columns in order
            gains = np.tile(col_power, (num_users, 1))
        free_users = set(range(num_users))
        free_cols = set(nonzero)
        while free_users and free_cols:
            best = None
            for k in sorted(free_users):
                for c in sorted(free_cols):
                    key = (gains[k, c], -k, -c)
                    if best is None or key > best[0]:
                        best = (key, k, c)
            _, k, c = best
            assignment[k] = c
            free_users.remove(k)
            free_cols.remove(c)
    if num_users > 0 and len(assignment) < num_users:
        warnings.warn(f"extract_w: covariance rank {len(nonzero)} below "
                      f"{num_users} users; surplus users get zero beams")

    w = np.zeros((tx, num_users + tx), dtype=complex)
    for k, c in assignment.items():
        w[:, k] = v[:, c]
    leftovers = [c for c in range(tx) if c not in assignment.values()
                 and col_power[c] > 0]
    for slot, c in enumerate(leftovers):
        w[:, num_users + slot] = v[:, c]
    return w, assignment


def solve_p3(lifted: LiftedChannels, malicious_power: np.ndarray,
             noise_power: float, tol_t: float = 1e-3,
             num_samples: int = DEFAULT_RANDOMIZATION_SAMPLES,
             rng: np.random.Generator | None = None,
             *, solve_tol: float = 1e-7) -> PhaseDesign:
    """Legitimate-surface phase design by lifted bisection plus randomization.

    The optimizer sees the malicious surface only through the per-user
    aggregate interference powers (measurable at the users), never through
    its reflection coefficients.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    K = lifted.num_users
    n = lifted.eff_l.shape[2]
    malicious_power = np.asarray(malicious_power, dtype=float)
    if malicious_power.shape != (K,):
        raise ValueError(f"solve_p3: need {K} malicious interference powers")
    if np.any(malicious_power < 0):
        raise ValueError("solve_p3: malicious interference powers must be >= 0")

    sig_vecs = [lifted.eff_l[k, k] for k in range(K)]
    c_sig = [np.outer(v, v.conj()) for v in sig_vecs]
    d_int = [lifted.interference_sum(k) for k in range(K)]
    floor = malicious_power + noise_power

    def objective(z):
        worst = np.inf
        for k in range(K):
            num = abs(np.dot(z, sig_vecs[k])) ** 2
            den = float(np.real(np.dot(np.dot(z, d_int[k]), z.conj()))) + floor[k]
            worst = min(worst, num / den)
        return worst

    bound_each = [n * float(np.linalg.norm(sig_vecs[k]) ** 2) / floor[k]
                  for k in range(K)]
    t_hi = min(bound_each) * (1.0 + 1e-2) + 10.0 * tol_t
    if min(bound_each) <= tol_t:   # some user has no usable beam at all
        z = np.ones(n, dtype=complex)
        val = objective(z)
        return PhaseDesign(big_z=np.outer(z.conj(), z), z_l=z, sdr_bound=t_hi,
                           achieved_min_user_sinr=val,
                           randomization_gap=val / t_hi if t_hi > 0 else 0.0,
                           num_solves=0)

    def builder(t):
        cons = [(c_sig[k] - t * d_int[k], ">=", t * floor[k]) for k in range(K)]
        return TraceLpSdp(dim=n, objective=None, constraints=cons,
                          unit_diagonal=True)

    res = bisect_maxmin(builder, 0.0, t_hi, tol_t, solve_tol=solve_tol,
                        probe_tol=max(1e-6, solve_tol))
    big_z = res.solution.X
    # unit diagonal exactly, preserving positive semidefiniteness
    d = np.clip(np.real(np.diagonal(big_z)), 1e-12, None)
    big_z = big_z / np.sqrt(np.outer(d, d))
    big_z = 0.5 * (big_z + big_z.conj().T)

    # sampling alone leaves a large worst-user gap on max-min instances;
    # element-wise ascent from the sampled winner plus deterministic starts
    # (lifted leading eigenvector, single-user alignments) closes most of it
    # while staying unit-modulus, so the certified bound still dominates
    lam, vecs = np.linalg.eigh(big_z)
    starts = [rank_one_recover(big_z, objective, num_samples, rng),
              _unit_phases(np.conj(vecs[:, -1]))]
    starts += [_unit_phases(np.conj(v)) for v in sig_vecs]
    z_l, achieved = None, -np.inf
    for z0 in starts:
        z_p = _polish_phases(z0, sig_vecs, d_int, floor)
        val = objective(z_p)
        if val > achieved:
            z_l, achieved = z_p, val
    bound = max(res.t_upper, 0.0)
    return PhaseDesign(big_z=big_z, z_l=z_l, sdr_bound=bound,
                       achieved_min_user_sinr=achieved,
                       randomization_gap=achieved / bound if bound > 0 else 0.0,
                       num_solves=res.num_solves)


def _unit_phases(v: np.ndarray) -> np.ndarray:
    mag = np.abs(v)
    out = np.ones(len(v), dtype=complex)
    nz = mag > 0
    out[nz] = v[nz] / mag[nz]
    return out


_POLISH_GRID = np.exp(2j * math.pi * np.arange(32) / 32)


def _polish_phases(z: np.ndarray, sig_vecs, d_int, floor, max_sweeps: int = 12,
                   rel_tol: float = 1e-4) -> np.ndarray:
    """Cyclic single-element phase ascent on the worst-user SINR.

    Each element's phase is optimized over a fixed grid given all others;
    the sweep repeats until the worst-user objective stalls.  Deterministic,
    monotone, and unit-modulus by construction.
    """
    z = z.astype(complex).copy()
    K = len(sig_vecs)
    n = len(z)
    sig = np.array([z @ v for v in sig_vecs])                  # running z.v_k
    quad = np.array([float(np.real(z @ d_int[k] @ z.conj())) for k in range(K)])

    def worst(sig_v, quad_v):
        return float(np.min(np.abs(sig_v) ** 2 / (quad_v + floor)))

    best = worst(sig, quad)
    for _ in range(max_sweeps):
        start = best
        for l in range(n):
            v_l = np.array([v[l] for v in sig_vecs])
            w_l = np.array([(d_int[k][l] @ z.conj())
                            - d_int[k][l, l] * np.conj(z[l]) for k in range(K)])
            d_ll = np.array([float(np.real(d_int[k][l, l])) for k in range(K)])
            base_sig = sig - z[l] * v_l
            base_quad = quad - 2.0 * np.real(z[l] * w_l) - d_ll
            cand = np.concatenate([_POLISH_GRID, [z[l]]])
            num = np.abs(base_sig[None, :] + cand[:, None] * v_l[None, :]) ** 2
            den = (base_quad[None, :] + 2.0 * np.real(cand[:, None] * w_l[None, :])
                   + d_ll[None, :] + floor[None, :])
            vals = np.min(num / den, axis=1)
            j = int(np.argmax(vals))
            if vals[j] > best:
                best = float(vals[j])
                z[l] = cand[j]
                sig = base_sig + z[l] * v_l
                quad = base_quad + 2.0 * np.real(z[l] * w_l) + d_ll
        if best <= start * (1.0 + rel_tol):
            break
    return z


def solve_p1(channels: ChannelSet, z_m: np.ndarray, cfg: ScenarioConfig,
             geom: Geometry | None = None,
             num_samples: int = DEFAULT_RANDOMIZATION_SAMPLES,
             rng: np.random.Generator | None = None,
             tol_t: float = 1e-3, solve_tol: float = 1e-7):
    """Full per-realization pipeline: covariance design, beam extraction,
    phase design, and the metric report.

    Returns (TransmitDesign, PhaseDesign, MetricsReport).  The transmit stage
    consumes only the two steering products (the common attenuations scale
    both echoes and cancel from the power split), so its output is invariant
    to every reflected channel; the reported sensing SINRs use the full
    attenuation-weighted responses.
    """
    if geom is None:
        geom = derive_geometry(cfg)
    if rng is None:
        rng = trial_rng(channels.rng_seed[0], channels.rng_seed[1], "recovery")
    tx, K = cfg.tx_antennas, cfg.num_users
    sigma2 = cfg.noise_power_w

    steer_l = ula_steering(*geom.aod_bs_luav, tx, cfg.nu_t)
    steer_e = ula_steering(*geom.aod_bs_euav, tx, cfg.nu_t)
    beam_l = np.outer(steer_l.entries.conj(), steer_l.entries)
    beam_e = np.outer(steer_e.entries.conj(), steer_e.entries)

    assignment_rows = channels.g_l @ channels.h_l
    design = solve_p2(beam_l, beam_e, cfg.total_power_w, cfg.sensing_sinr_cap,
                      sigma2, tol_t, num_users=K,
                      assignment_rows=assignment_rows, solve_tol=solve_tol)

    lifted = build_lifted_channels(channels.h_l, channels.g_l, channels.h_m,
                                   channels.g_m, design.w)
    i_mal = np.array([lifted.malicious_power(k, z_m) for k in range(K)])
    phase = solve_p3(lifted, i_mal, sigma2, tol_t, num_samples, rng,
                     solve_tol=solve_tol)

    report = _metrics_report(channels, z_m, phase.z_l, design, cfg, geom,
                             steer_l, steer_e, beam_l, beam_e)
    return design, phase, report


def _metrics_report(channels: ChannelSet, z_m, z_l, design: TransmitDesign,
                    cfg: ScenarioConfig, geom: Geometry,
                    steer_l: SteeringVector, steer_e: SteeringVector,
                    beam_l: np.ndarray, beam_e: np.ndarray) -> MetricsReport:
    K = cfg.num_users
    sigma2 = cfg.noise_power_w
    w = design.w

    eta = np.array([
        comm_metrics.user_sinr_direct(channels.g_l[k], channels.g_m[k], z_l, z_m,
                                      channels.h_l, channels.h_m, w, k, sigma2)
        for k in range(K)])
    eta_e = np.array([
        comm_metrics.eavesdropper_sinr(steer_e.entries, abs(channels.beta_e),
                                       w, k, sigma2)
        for k in range(K)])
    rate, rate_e, secrecy, total = comm_metrics.secrecy_rates(eta, eta_e)

    gamma_l = sensing_metrics.sensing_sinr(channels.a_l, channels.a_e, w, sigma2)
    gamma_e = sensing_metrics.sensing_sinr(channels.a_e, channels.a_l, w, sigma2)

    crbs = {}
    for tag, steer, beam, beta, aod in (
            ("l", steer_l, beam_l, channels.beta_l, geom.aod_bs_luav),
            ("e", steer_e, beam_e, channels.beta_e, geom.aod_bs_euav)):
        d_theta, d_phi = steering_derivatives(*aod, cfg.tx_antennas, cfg.nu_t)
        fisher = sensing_metrics.fisher_information(
            beam, d_theta, d_phi, beta, design.r_x,
            cfg.coherent_block_length, sigma2)
        try:
            crbs[tag] = sensing_metrics.crb_aod_per_angle(fisher)
        except sensing_metrics.UnidentifiableGeometryError:
            # no probing power toward this target: the bound is infinite
            crbs[tag] = sensing_metrics.CrbResult(
                crb_matrix=np.full((2, 2), np.inf),
                root_crb_theta_deg=np.inf, root_crb_phi_deg=np.inf,
                root_crb_combined_deg=np.inf)

    return MetricsReport(eta=eta, eta_e=eta_e, rate=rate, rate_e=rate_e,
                         secrecy=secrecy, secrecy_sum=total,
                         gamma_l=gamma_l, gamma_e=gamma_e,
                         crb_l=crbs["l"], crb_e=crbs["e"])
