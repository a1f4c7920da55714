"""Trace-linear semidefinite programming over the complex Hermitian PSD cone.

Problems of the form

    max  <C, X>   (or pure feasibility)
    s.t. <B_i, X> {<=, >=, =} r_i,   optionally diag(X) = 1,   X >= 0,

with <A, B> = Re tr(A^H B), are solved by a primal-dual predictor-corrector
interior-point method working directly on Hermitian matrices (no real
embedding).  On top of the solver sit a guarded bisection for max-min
linear-fractional objectives, an eigenvalue factorization helper, and
Gaussian randomization for rank-one recovery.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

__all__ = [
    "TraceLpSdp",
    "SdpSolution",
    "SdrError",
    "InfeasibleScenarioError",
    "solve_sdp",
    "bisect_maxmin",
    "MaxMinResult",
    "psd_factorize",
    "rank_one_recover",
]

MAX_DIM = 512          # desk-scale guard on the matrix variable
_SLACK_PAD = 2.0       # head-room added to the feasibility slack shift


class SdrError(RuntimeError):
    """Raised for malformed problems or unrecoverable solver failures."""


class InfeasibleScenarioError(SdrError):
    """Raised when even the lower bisection endpoint is infeasible."""


@dataclass
class TraceLpSdp:
    """A trace-linear SDP instance.

    constraints holds (matrix, sense, rhs) triples with sense one of
    '<=', '>=', '='.  objective is a Hermitian matrix C for max <C, X>,
    or None for a pure feasibility problem.  unit_diagonal adds the
    diag(X) = 1 equality rows.
    """

    dim: int
    objective: np.ndarray | None = None
    constraints: list = field(default_factory=list)
    unit_diagonal: bool = False

    def validate(self):
        n = self.dim
        if not (1 <= n <= MAX_DIM):
            raise SdrError(f"matrix dimension {n} outside [1, {MAX_DIM}]")
        if self.objective is not None:
            _check_hermitian(self.objective, n, "objective")
        for i, (mat, sense, rhs) in enumerate(self.constraints):
            if sense not in ("<=", ">=", "="):
                raise SdrError(f"constraint {i}: unknown sense {sense!r}")
            _check_hermitian(mat, n, f"constraint {i}")
            if not np.isfinite(rhs):
                raise SdrError(f"constraint {i}: non-finite rhs")


@dataclass
class SdpSolution:
    """Solver output: the matrix iterate plus accuracy bookkeeping."""

    X: np.ndarray
    status: str                 # 'optimal' | 'infeasible' | 'inaccurate'
    objective_value: float
    slack: float | None = None  # feasibility margin (feasibility mode only)
    gap: float = np.inf
    max_violation: float = np.inf
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "optimal" and (self.slack is None or self.slack >= 0.0)


def _check_hermitian(mat, n, label, tol=1e-10):
    mat = np.asarray(mat)
    if mat.shape != (n, n):
        raise SdrError(f"{label}: expected shape ({n}, {n}), got {mat.shape}")
    scale = max(np.abs(mat).max(), 1e-300)
    if np.abs(mat - mat.conj().T).max() > tol * scale:
        raise SdrError(f"{label}: matrix is not Hermitian")


# ---------------------------------------------------------------------------
# Internal standard form
#
#   min <C, X> + q.u   s.t.  <A_i, X> + G[i].u = b_i,  X >= 0,  u >= 0
#
# Rows are stored in a split representation: unit-diagonal rows are
# (index, coefficient) pairs, everything else is a dense Hermitian matrix.
# ---------------------------------------------------------------------------

class _StandardForm:
    def __init__(self, n, p):
        self.n = n
        self.p = p
        self.C = np.zeros((n, n), dtype=complex)
        self.q = np.zeros(p)
        self.b = []
        self.G_rows = []
        self.diag_rows = []    # (row_index, matrix_index, coeff)
        self.dense_rows = []   # (row_index, matrix)

    def add_row(self, rhs, g_row, *, diag=None, dense=None):
        idx = len(self.b)
        self.b.append(rhs)
        self.G_rows.append(g_row)
        if diag is not None:
            self.diag_rows.append((idx, diag[0], diag[1]))
        elif dense is not None:
            self.dense_rows.append((idx, np.asarray(dense, dtype=complex)))
        return idx

    def finalize(self):
        self.b = np.asarray(self.b, dtype=float)
        self.m = len(self.b)
        self.G = np.asarray(self.G_rows, dtype=float).reshape(self.m, self.p)
        self.di = np.array([d[0] for d in self.diag_rows], dtype=int)
        self.dj = np.array([d[1] for d in self.diag_rows], dtype=int)
        self.dc = np.array([d[2] for d in self.diag_rows], dtype=float)
        self.dense_idx = np.array([d[0] for d in self.dense_rows], dtype=int)
        if self.dense_rows:
            self.dense_mats = np.stack([d[1] for d in self.dense_rows])
        else:
            self.dense_mats = np.zeros((0, self.n, self.n), dtype=complex)
        self.dense_flat = self.dense_mats.reshape(len(self.dense_rows), -1)
        return self


def _re_inner(a, b):
    return float(np.real(np.vdot(a, b)))


def _apply_rows(sf, X):
    """Vector of <A_i, X> for all rows."""
    out = np.zeros(sf.m)
    if len(sf.di):
        out[sf.di] = sf.dc * np.real(X[sf.dj, sf.dj])
    if len(sf.dense_idx):
        out[sf.dense_idx] = np.real(sf.dense_flat.conj() @ X.ravel())
    return out


def _adjoint(sf, y):
    """Sum_i y_i A_i as a Hermitian matrix."""
    if len(sf.dense_idx):
        out = (y[sf.dense_idx] @ sf.dense_flat).reshape(sf.n, sf.n).copy()
    else:
        out = np.zeros((sf.n, sf.n), dtype=complex)
    if len(sf.di):
        out[sf.dj, sf.dj] += y[sf.di] * sf.dc
    return out


def _chol(mat):
    c, info = lapack.zpotrf(mat, lower=1, clean=0, overwrite_a=0)
    if info != 0:
        return None
    return c


def _tri_inv(L):
    li, info = lapack.ztrtri(L, lower=1)
    if info != 0:
        return None
    return np.tril(li)


def _max_step_exact(Linv, dmat):
    """Largest alpha with mat + alpha*dmat > 0, given inv(chol(mat))."""
    w = Linv @ dmat @ Linv.conj().T
    lam = np.linalg.eigvalsh(w)
    lo = lam[0]
    if lo >= -1e-14:
        return np.inf
    return -1.0 / lo


def _lp_step(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


def _ipm(sf, tol, max_iter=100, sign_exit=None):
    """Mehrotra-style predictor-corrector on the standard form problem.

    sign_exit = (lp_index, shift) enables certificate-based early exit for
    feasibility probes: once the shifted slack variable is certified positive
    (primal-feasible iterate) or its dual upper bound certified negative, the
    sign of the optimal margin is decided and full convergence is skipped.
    """
    n, p, m = sf.n, sf.p, sf.m
    dense_A = sf.dense_mats
    k_dense = len(sf.dense_idx)
    I = np.eye(n, dtype=complex)

    norm_b = max(1.0, np.linalg.norm(sf.b))
    norm_c = max(1.0, np.linalg.norm(sf.C), np.linalg.norm(sf.q))
    row_norms = np.ones(m)
    if len(sf.di):
        row_norms[sf.di] = np.abs(sf.dc)
    if k_dense:
        row_norms[sf.dense_idx] = np.linalg.norm(sf.dense_flat, axis=1)
    xi = max(10.0, math.sqrt(n), float(np.max((1.0 + np.abs(sf.b)) / (1.0 + row_norms))))
    eta = max(10.0, math.sqrt(n + p), np.linalg.norm(sf.C), float(np.max(row_norms)))

    X = xi * np.eye(n, dtype=complex)
    S = eta * np.eye(n, dtype=complex)
    y = np.zeros(m)
    u = xi * np.ones(p) if p else np.zeros(0)
    z = eta * np.ones(p) if p else np.zeros(0)

    best = None
    status = "inaccurate"
    nu = n + max(p, 0)
    it = 0

    for it in range(1, max_iter + 1):
        rp = sf.b - _apply_rows(sf, X) - (sf.G @ u if p else 0.0)
        Rd = sf.C - S - _adjoint(sf, y)
        rz = (sf.q - z - sf.G.T @ y) if p else np.zeros(0)

        gap = _re_inner(X, S) + (float(u @ z) if p else 0.0)
        mu = gap / nu
        pobj = _re_inner(sf.C, X) + (float(sf.q @ u) if p else 0.0)
        dobj = float(sf.b @ y)
        scale = 1.0 + abs(pobj) + abs(dobj)
        err_p = np.linalg.norm(rp) / norm_b
        err_d = (np.linalg.norm(Rd) + (np.linalg.norm(rz) if p else 0.0)) / norm_c
        err_g = gap / scale
        merit = max(err_p, err_d, err_g)
        if best is None or merit < best[0]:
            best = (merit, X.copy(), u.copy())
        if merit < tol:
            status = "optimal"
            break
        if sign_exit is not None:
            s_idx, shift = sign_exit
            guard = 50.0 * (1.0 + abs(shift))
            s_val = u[s_idx] - shift
            if err_p < 1e-6 and s_val > guard * err_p:
                status = "optimal"           # feasible: constructive certificate
                best = (merit, X.copy(), u.copy())
                break
            s_ub = -dobj - shift             # weak duality on the max-slack value
            if err_d < 1e-6 and s_ub < -guard * err_d:
                status = "optimal"           # infeasible: dual certificate
                u = u.copy()
                u[s_idx] = shift + s_ub      # report the certified bound
                best = (merit, X.copy(), u.copy())
                break

        Lx = _chol(X)
        Ls = _chol(S)
        if Lx is None or Ls is None:
            break
        Ls_inv = _tri_inv(Ls)
        Lx_inv = _tri_inv(Lx)
        if Ls_inv is None or Lx_inv is None:
            break
        Sinv = Ls_inv.conj().T @ Ls_inv

        # Schur complement M[i,j] = Re tr(A_i X A_j Sinv) + LP scaling
        M = np.zeros((m, m))
        if len(sf.di):
            DD = np.real(X[np.ix_(sf.dj, sf.dj)] * np.conj(Sinv[np.ix_(sf.dj, sf.dj)]))
            M[np.ix_(sf.di, sf.di)] = (sf.dc[:, None] * sf.dc[None, :]) * DD
        if k_dense:
            P = np.empty((k_dense, n, n), dtype=complex)
            for j in range(k_dense):
                P[j] = X @ dense_A[j] @ Sinv
            P_flatT = P.transpose(0, 2, 1).reshape(k_dense, -1)
            if len(sf.di):
                diag_P = np.real(P[:, np.arange(n), np.arange(n)])    # (k, n)
                blk = sf.dc[:, None] * diag_P[:, sf.dj].T
                M[np.ix_(sf.di, sf.dense_idx)] = blk
                M[np.ix_(sf.dense_idx, sf.di)] = blk.T
            M[np.ix_(sf.dense_idx, sf.dense_idx)] = np.real(
                sf.dense_flat @ P_flatT.T)
        if p:
            d_lp = u / z
            M += (sf.G * d_lp) @ sf.G.T
        M = 0.5 * (M + M.T)
        jitter = 1e-13 * (np.trace(M) / m + 1.0)
        Mf = None
        for attempt in range(3):
            try:
                Mf = sla.cho_factor(M + jitter * (10.0 ** attempt) * np.eye(m),
                                    lower=True, check_finite=False)
                break
            except np.linalg.LinAlgError:
                Mf = None
        if Mf is None:
            break

        XS = X @ S
        XRd = X @ Rd

        def direction(sigma_mu, Xi, xi_lp):
            Rc = sigma_mu * I - XS
            if Xi is not None:
                Rc = Rc - Xi
            Q = (Rc - XRd) @ Sinv
            h = np.zeros(m)
            if len(sf.di):
                h[sf.di] = sf.dc * np.real(Q[sf.dj, sf.dj])
            if k_dense:
                h[sf.dense_idx] = np.real(sf.dense_flat @ Q.T.ravel())
            rhs = rp - h
            if p:
                w = (sigma_mu - u * z - xi_lp - u * rz) / z
                rhs = rhs - sf.G @ w
            dy = sla.cho_solve(Mf, rhs, check_finite=False)
            dS = Rd - _adjoint(sf, dy)
            dX = (Rc - X @ dS) @ Sinv
            dX = 0.5 * (dX + dX.conj().T)
            if p:
                dz = rz - sf.G.T @ dy
                du = (sigma_mu - u * z - xi_lp - u * dz) / z
            else:
                dz = np.zeros(0)
                du = np.zeros(0)
            return dy, dX, dS, du, dz

        # predictor
        dy_a, dX_a, dS_a, du_a, dz_a = direction(0.0, None, 0.0)
        ap = min(1.0, 0.99 * _max_step_exact(Lx_inv, dX_a),
                 0.99 * (_lp_step(u, du_a) if p else np.inf))
        ad = min(1.0, 0.99 * _max_step_exact(Ls_inv, dS_a),
                 0.99 * (_lp_step(z, dz_a) if p else np.inf))
        gap_aff = (_re_inner(X + ap * dX_a, S + ad * dS_a)
                   + (float((u + ap * du_a) @ (z + ad * dz_a)) if p else 0.0))
        sigma = min(0.999, max(1e-8, (max(gap_aff, 0.0) / gap) ** 3))

        # corrector; the second-order term is scaled by the affine step
        # lengths so a blocked predictor cannot poison the direction
        corr = ap * ad
        dy, dX, dS, du, dz = direction(sigma * mu, corr * (dX_a @ dS_a),
                                       corr * du_a * dz_a if p else 0.0)
        step = 0.99 if mu < 1e-4 else 0.95
        ap = min(1.0, step * _max_step_exact(Lx_inv, dX),
                 step * (_lp_step(u, du) if p else np.inf))
        ad = min(1.0, step * _max_step_exact(Ls_inv, dS),
                 step * (_lp_step(z, dz) if p else np.inf))
        if not (np.isfinite(ap) and np.isfinite(ad)) or ap <= 1e-12 or ad <= 1e-12:
            break
        X = X + ap * dX
        u = u + ap * du
        y = y + ad * dy
        S = S + ad * dS
        z = z + ad * dz

    merit, Xb, ub = best
    if status != "optimal":
        X, u = Xb, ub
    return X, u, status, it, merit


# ---------------------------------------------------------------------------
# Public solver
# ---------------------------------------------------------------------------

def solve_sdp(problem: TraceLpSdp, tol: float = 1e-7,
              early_sign_exit: bool = False) -> SdpSolution:
    """Solve a TraceLpSdp.

    Objective problems return the maximizing X.  Feasibility problems are
    solved through an internal max-slack reformulation: the returned
    solution carries the optimal uniform constraint margin in .slack, and
    status 'infeasible' means that margin is provably negative.  With
    early_sign_exit a feasibility solve may stop as soon as the margin's
    sign is certified (bisection probes need nothing more).  Numerical
    failure yields status 'inaccurate' with the best iterate, never a
    silent wrong answer.
    """
    problem.validate()
    n = problem.dim
    feasibility = problem.objective is None

    rows = []   # (matrix_or_none, diag_pair_or_none, sense, rhs, scale)
    for mat, sense, rhs in problem.constraints:
        mat = np.asarray(mat, dtype=complex)
        scale = max(np.linalg.norm(mat), abs(rhs), 1e-12)
        rows.append((mat / scale, None, sense, rhs / scale, scale))
    if problem.unit_diagonal:
        for j in range(n):
            rows.append((None, (j, 1.0), "=", 1.0, 1.0))

    n_ineq = sum(1 for r in rows if r[2] != "=")
    n_eq_soft = sum(1 for r in rows if r[2] == "=" and r[0] is not None) if feasibility else 0

    if feasibility:
        # shift chosen so X = I, u_slack = margin(I) is strictly feasible
        shift = _SLACK_PAD
        for mat, diag, sense, rhs, _ in rows:
            if sense == "=" and mat is None:
                continue
            val = float(np.real(np.trace(mat))) if mat is not None else 1.0
            shift = max(shift, _SLACK_PAD + abs(val - rhs))
        p = n_ineq + 2 * n_eq_soft + 2   # row slacks + s + s_cap
        s_idx, cap_idx = p - 2, p - 1
    else:
        p = n_ineq
        s_idx = cap_idx = None

    sf = _StandardForm(n, p)
    if not feasibility:
        sf.C = -np.asarray(problem.objective, dtype=complex)
    else:
        sf.q[s_idx] = -1.0   # min -s  ==  max slack

    k = 0
    for mat, diag, sense, rhs, _ in rows:
        g = np.zeros(p)
        if feasibility and sense == "=" and mat is not None:
            # soft equality: both one-sided margins must beat the slack
            g1 = np.zeros(p); g1[k] = 1.0; g1[s_idx] = 1.0
            sf.add_row(rhs + shift, g1, dense=mat)
            g2 = np.zeros(p); g2[k + 1] = -1.0; g2[s_idx] = -1.0
            sf.add_row(rhs - shift, g2, dense=mat)
            k += 2
            continue
        if sense == "<=":
            g[k] = 1.0
            if feasibility:
                g[s_idx] = 1.0
                rhs = rhs + shift
            k += 1
        elif sense == ">=":
            g[k] = -1.0
            if feasibility:
                g[s_idx] = -1.0
                rhs = rhs - shift
            k += 1
        if mat is not None:
            sf.add_row(rhs, g, dense=mat)
        else:
            sf.add_row(rhs, g, diag=diag)
    if feasibility:
        g = np.zeros(p)
        g[s_idx] = 1.0
        g[cap_idx] = 1.0
        sf.add_row(2.0 * shift, g)
    sf.finalize()

    sign_exit = (s_idx, shift) if (feasibility and early_sign_exit) else None
    X, u, status, iters, merit = _ipm(sf, tol, sign_exit=sign_exit)
    X = 0.5 * (X + X.conj().T)

    slack = None
    if feasibility:
        slack = float(u[s_idx] - shift)
        if status == "optimal" and slack < 0.0:
            status = "infeasible"

    # violations measured against the original (unscaled) constraints
    vio = 0.0
    for mat, sense, rhs in problem.constraints:
        val = _re_inner(np.asarray(mat, dtype=complex), X)
        ref = max(1.0, abs(rhs))
        if sense == "<=":
            vio = max(vio, (val - rhs) / ref)
        elif sense == ">=":
            vio = max(vio, (rhs - val) / ref)
        else:
            vio = max(vio, abs(val - rhs) / ref)
    if problem.unit_diagonal:
        vio = max(vio, float(np.abs(np.real(np.diagonal(X)) - 1.0).max()))

    obj = _re_inner(np.asarray(problem.objective, dtype=complex), X) \
        if problem.objective is not None else 0.0
    return SdpSolution(X=X, status=status, objective_value=obj, slack=slack,
                       gap=merit, max_violation=vio, iterations=iters)


# ---------------------------------------------------------------------------
# Max-min bisection
# ---------------------------------------------------------------------------

@dataclass
class MaxMinResult:
    t_star: float
    solution: SdpSolution
    t_upper: float        # certified infeasible level (true relaxation bound)
    num_solves: int


def bisect_maxmin(feasibility_builder, t_lo: float, t_hi: float, tol_t: float,
                  *, solve_tol: float = 1e-7, probe_tol: float = 1e-6,
                  rel_tol: float = 1e-3, max_widen: int = 4) -> MaxMinResult:
    """Largest t for which feasibility_builder(t) is a feasible TraceLpSdp.

    The feasible set must shrink as t grows.  Interval halving stops at
    tol_t plus a relative term (tol_t alone is meaninglessly fine for the
    large SINR levels met here), so the solve count never exceeds the
    pure-bisection budget ceil(log2((t_hi - t_lo)/tol_t)).  The returned
    t_upper is the smallest level with a certified negative margin, hence
    a true upper bound on the max-min optimum.
    """
    if t_hi <= t_lo:
        raise SdrError("bisect_maxmin: need t_hi > t_lo")
    n_solves = 0

    def probe(t, tol, sign_only=True):
        nonlocal n_solves
        n_solves += 1
        return solve_sdp(feasibility_builder(t), tol=tol,
                         early_sign_exit=sign_only)

    sol_lo = probe(t_lo, probe_tol)
    if not sol_lo.feasible:
        # zero-margin lower endpoints (all constraints exactly tight) are
        # feasible up to solver accuracy
        if sol_lo.slack is None or sol_lo.slack < -100.0 * probe_tol:
            raise InfeasibleScenarioError(
                f"lower endpoint t={t_lo} infeasible (slack={sol_lo.slack})")

    sol_hi = probe(t_hi, probe_tol)
    widened = 0
    while sol_hi.feasible and widened < max_widen:
        widened += 1
        span = t_hi - t_lo
        warnings.warn(f"bisect_maxmin: t_hi={t_hi} feasible, widening bracket")
        sol_lo, t_lo = sol_hi, t_hi
        t_hi = t_hi + 2.0 * span
        sol_hi = probe(t_hi, probe_tol)
    if sol_hi.feasible:
        raise SdrError("bisect_maxmin: upper endpoint still feasible after widening")
    t_upper = t_hi

    budget = max(4, math.ceil(math.log2(max((t_hi - t_lo) / tol_t, 2.0))))
    while (t_hi - t_lo) > tol_t + rel_tol * max(t_lo, 0.0) and n_solves < budget + 2:
        t_mid = 0.5 * (t_lo + t_hi)
        sol = probe(t_mid, probe_tol)
        if sol.feasible:
            sol_lo, t_lo = sol, t_mid
        else:
            t_hi = t_mid
            s = sol.slack if sol.slack is not None else -1.0
            if sol.status == "infeasible" and s < -10 * probe_tol:
                t_upper = min(t_upper, t_mid)

    # the accepted level is re-solved to optimality: its solution matrix is
    # what downstream consumers factorize and randomize over
    final = probe(t_lo, solve_tol, sign_only=False)
    if final.feasible:
        sol_lo = final
    return MaxMinResult(t_star=t_lo, solution=sol_lo,
                        t_upper=float(max(t_upper, t_hi)), num_solves=n_solves)


# ---------------------------------------------------------------------------
# Factorization and rank-one recovery
# ---------------------------------------------------------------------------

def psd_factorize(X: np.ndarray, rank_tol: float = 1e-9) -> np.ndarray:
    """Factor a Hermitian PSD matrix as X = V V^H.

    Columns of V are eigenvector * sqrt(eigenvalue), sorted by descending
    eigenvalue; columns below rank_tol * lambda_max are dropped and the
    matrix is zero-padded back to n columns.  Column phases are fixed so
    the largest-magnitude entry is real positive.
    """
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    _check_hermitian(X, n, "psd_factorize input", tol=1e-8)
    lam, U = np.linalg.eigh(0.5 * (X + X.conj().T))
    lam_max = max(lam[-1], 0.0)
    if lam[0] < -max(rank_tol * max(lam_max, 1.0), 1e-12):
        raise SdrError(f"psd_factorize: matrix indefinite (min eig {lam[0]:.3e})")
    order = np.argsort(lam)[::-1]
    lam, U = lam[order], U[:, order]
    keep = lam > rank_tol * max(lam_max, 1e-300)
    V = np.zeros((n, n), dtype=complex)
    if np.any(keep):
        cols = U[:, keep] * np.sqrt(lam[keep])
        for j in range(cols.shape[1]):
            i = int(np.argmax(np.abs(cols[:, j])))
            ph = cols[i, j]
            if abs(ph) > 0:
                cols[:, j] *= np.conj(ph) / abs(ph)
        V[:, : cols.shape[1]] = cols
    return V


def rank_one_recover(Z: np.ndarray, objective, num_samples: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Recover a unit-modulus vector from a lifted solution Z.

    Draws num_samples circular Gaussian vectors with covariance Z, projects
    every entry onto the unit circle, adds the phase-projected leading
    eigenvector as a candidate, and returns the candidate with the largest
    objective value.
    """
    Z = np.asarray(Z, dtype=complex)
    n = Z.shape[0]
    d = np.real(np.diagonal(Z))
    if np.abs(d - 1.0).max() > 1e-6:
        raise SdrError("rank_one_recover: diag(Z) must be 1 within 1e-6")

    lam, U = np.linalg.eigh(0.5 * (Z + Z.conj().T))
    lam = np.clip(lam, 0.0, None)
    L = U * np.sqrt(lam)

    def project(v):
        mag = np.abs(v)
        out = np.ones(n, dtype=complex)
        nz = mag > 0
        out[nz] = v[nz] / mag[nz]
        return out

    # Z lifts the row vector as z^H z, so a lift-consistent draw is the
    # conjugate of L xi: E[(conj(L xi))^H (conj(L xi))] = L L^H = Z, and for
    # rank-one Z the conjugated leading eigenvector recovers z exactly
    best_z = project(np.conj(U[:, -1]))
    best_val = objective(best_z)
    if num_samples > 0:
        xi = (rng.standard_normal((n, num_samples))
              + 1j * rng.standard_normal((n, num_samples))) / np.sqrt(2.0)
        cand = np.conj(L @ xi)
        for j in range(num_samples):
            zj = project(cand[:, j])
            val = objective(zj)
            if val > best_val:
                best_val = val
                best_z = zj
    return best_z
