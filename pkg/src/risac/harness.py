"""Monte Carlo experiment runner: figure presets, per-trial seed management,
parallel execution, CSV/manifest emission, and the command-line entry point.

Every trial draws its channels from substreams keyed by (master_seed, trial)
only, never by grid point, so sweep points share common random numbers and
paired comparisons across a sweep are low-variance by construction.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import ctypes
import dataclasses
import hashlib
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from risac.channel import malicious_phases, synthesize_channels, trial_rng
from risac.optimizer import solve_p1
from risac.scenario import (ConfigError, ScenarioConfig, db_to_linear,
                            derive_geometry, linear_to_db, load_config)

__all__ = ["ExperimentPlan", "GridPoint", "PRESETS", "build_plan",
           "apply_overrides", "run_experiment", "write_outputs",
           "bootstrap_mean_quantile", "configure_numerics", "cli_main"]

DEFAULT_TRIALS = 100
MAX_CSV_USERS = 4
FAILURE_EXIT_FRACTION = 0.10


# ---------------------------------------------------------------------------
# Runtime tuning: single-threaded BLAS (the solver is called from parallel
# workers on small matrices, where thread handoff costs far more than it
# saves) and heap-backed large allocations.
# ---------------------------------------------------------------------------

def configure_numerics():
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(limits=1)
    except Exception:
        pass
    try:
        libc = ctypes.CDLL("libc.so.6")
        libc.mallopt(-3, 1 << 26)    # M_MMAP_THRESHOLD
        libc.mallopt(-1, 1 << 26)    # M_TRIM_THRESHOLD
    except Exception:
        pass


# ---------------------------------------------------------------------------
# Plans and presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridPoint:
    grid_value: float
    overrides: tuple                 # sorted (key, value) pairs


@dataclass(frozen=True)
class ExperimentPlan:
    preset: str
    grid_var: str                    # 'P_T_dBW' | 'N_M' | 'N_L' | 'd_E_x'
    points: tuple                    # GridPoint entries
    trials: int
    master_seed: int

    def validate(self):
        if not self.points:
            raise ValueError("experiment plan: grid must be nonempty")
        if self.trials < 1:
            raise ValueError("experiment plan: trials must be >= 1")
        return self

    def restrict(self, **fixed) -> "ExperimentPlan":
        """Keep only grid points whose overrides match the given values."""
        kept = tuple(p for p in self.points
                     if all(dict(p.overrides).get(k) == v for k, v in fixed.items()))
        return dataclasses.replace(self, points=kept).validate()


def _square_side(n_elements: int, name: str) -> int:
    side = int(round(math.sqrt(n_elements)))
    if side * side != n_elements:
        raise ConfigError(f"{name}: sweep sizes must be perfect squares "
                          f"(uniform planar array), got {n_elements}")
    return side


def _euav_layout(d_e_x: float):
    """E-UAV placement for the horizontal-distance sweeps.

    The parameter table's distances and departure angles are consistent with
    the BS at (0, 0, 5) and both UAVs on the line y = -20 at 10 m height; the
    E-UAV sits at x = -d_e_x, which reproduces d_E = 32.4 m at 25 m and
    58.7 m at the default 55 m.  Surface-to-user distances stay at their
    table values (user positions are not recoverable from the table).
    """
    e_pos = np.array([-d_e_x, -20.0, 10.0])
    bs = np.array([0.0, 0.0, 5.0])
    off = e_pos - bs
    d = float(np.linalg.norm(off))
    theta = math.atan2(off[1], off[0])
    phi = math.atan2(off[2], math.hypot(off[0], off[1]))
    back = bs - e_pos
    theta_b = math.atan2(back[1], back[0])
    phi_b = math.atan2(back[2], math.hypot(back[0], back[1]))
    return d, (theta, -abs(phi)), (theta_b, phi_b)


def apply_overrides(cfg: ScenarioConfig, overrides) -> ScenarioConfig:
    """Apply sweep overrides (power, surface sizes, E-UAV distance) to a config."""
    changes = {}
    geo_changes = {}
    for key, value in dict(overrides).items():
        if key == "P_T_dBW":
            changes["total_power_w"] = db_to_linear(value)
        elif key == "N_M":
            side = _square_side(int(value), "N_M")
            changes["mris_nx"] = side
            changes["mris_nz"] = side
        elif key == "N_L":
            side = _square_side(int(value), "N_L")
            changes["lris_nx"] = side
            changes["lris_nz"] = side
        elif key == "d_E_x":
            d, aod_bs_euav, aod_mris_bs = _euav_layout(float(value))
            geo_changes.update(d_bs_euav=d, aod_bs_euav=aod_bs_euav,
                               aod_mris_bs=aod_mris_bs)
        else:
            raise ConfigError(f"unknown sweep variable {key!r}")
    if geo_changes:
        changes["geometry"] = dataclasses.replace(cfg.geometry, **geo_changes)
    return cfg.replace(**changes).validate()


def _product_points(grid_var, grid_values, curve_var=None, curve_values=(None,),
                    fixed=()):
    points = []
    for gv in grid_values:
        for cv in curve_values:
            over = dict(fixed)
            over[grid_var] = gv
            if curve_var is not None:
                over[curve_var] = cv
            points.append(GridPoint(grid_value=float(gv),
                                    overrides=tuple(sorted(over.items()))))
    return tuple(points)


_PT_GRID = (-6.0, -3.0, 0.0, 3.0, 6.0, 9.0, 12.0)

PRESETS = {
    # sum secrecy rate vs transmit power, one curve per malicious-surface size
    "fig3": dict(grid_var="P_T_dBW",
                 points=_product_points("P_T_dBW", _PT_GRID, "N_M",
                                        (49, 144, 256), (("N_L", 144),)),
                 note="S_R vs P_T for N_M in {49,144,256}, N_L=144"),
    # sum secrecy rate vs transmit power, one curve per legitimate-surface size
    "fig4": dict(grid_var="P_T_dBW",
                 points=_product_points("P_T_dBW", _PT_GRID, "N_L",
                                        (36, 100, 121, 144), (("N_M", 36),)),
                 note="S_R vs P_T for N_L in {36,100,121,144}, N_M=36"),
    # sum secrecy rate vs legitimate-surface size at fixed power
    "fig5": dict(grid_var="N_L",
                 points=_product_points("N_L", (36, 100, 121, 144),
                                        fixed=(("N_M", 36), ("P_T_dBW", 6.0))),
                 note="S_R vs N_L at P_T=6 dBW, N_M=36"),
    # sum secrecy rate vs malicious-surface size, one curve per power level
    "fig6": dict(grid_var="N_M",
                 points=_product_points("N_M", (25, 121, 225), "P_T_dBW",
                                        (-3.0, 0.0, 3.0, 6.0), (("N_L", 100),)),
                 note="S_R vs N_M in 25..225 for P_T in {-3,0,3,6} dBW, N_L=100"),
    # sensing SINRs vs E-UAV horizontal distance (sensing metrics do not
    # depend on the surface sizes, so a small N_L keeps the sweep fast)
    "fig7": dict(grid_var="d_E_x",
                 points=_product_points("d_E_x", (25.0, 30.0, 35.0, 40.0,
                                                  45.0, 50.0),
                                        fixed=(("N_L", 36), ("N_M", 36),
                                               ("P_T_dBW", 6.0))),
                 note="gamma_L / gamma_E vs d_E_x in 25..50 m at P_T=6 dBW"),
    # root CRB of the eavesdropper target vs its horizontal distance
    "fig8": dict(grid_var="d_E_x",
                 points=_product_points("d_E_x", (25.0, 35.0, 45.0, 55.0),
                                        "P_T_dBW", (0.0, 6.0),
                                        (("N_L", 36), ("N_M", 36))),
                 note="root CRB of E-UAV vs d_E_x in 25..55 m, P_T in {0,6} dBW"),
}


def build_plan(preset: str, trials: int = DEFAULT_TRIALS,
               master_seed: int = 0) -> ExperimentPlan:
    if preset == "custom":
        points = (GridPoint(grid_value=0.0, overrides=()),)
        return ExperimentPlan("custom", "P_T_dBW", points, trials,
                              master_seed).validate()
    if preset not in PRESETS:
        raise KeyError(preset)
    spec = PRESETS[preset]
    return ExperimentPlan(preset, spec["grid_var"], spec["points"], trials,
                          master_seed).validate()


# ---------------------------------------------------------------------------
# Trial execution
# ---------------------------------------------------------------------------

def _user_cols(prefix):
    return [f"{prefix}{k + 1}" for k in range(MAX_CSV_USERS)]


CSV_COLUMNS = (["preset", "grid_var", "grid_value", "trial", "seed",
                "P_T_dBW", "N_L", "N_M", "S_R_sum"]
               + _user_cols("S_R_k") + _user_cols("eta_k") + _user_cols("etaE_k")
               + ["gamma_L_dB", "gamma_E_dB", "rootCRB_theta_deg",
                  "rootCRB_phi_deg", "rootCRB_comb_deg", "sdr_bound",
                  "rand_gap", "status"])

_METRIC_COLUMNS = CSV_COLUMNS[8:-1]          # numeric block, S_R_sum .. rand_gap


def trial_seed(master_seed: int, trial: int) -> int:
    """Published per-trial seed label, reproducible from (master, trial)."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trial),))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def run_trial(cfg: ScenarioConfig, master_seed: int, trial: int) -> dict:
    """One grid-point trial: fresh channels and attack, full pipeline, metrics.

    Root-CRB columns report the eavesdropper target (the tracked threat)."""
    geom = derive_geometry(cfg)
    channels = synthesize_channels(cfg, geom, master_seed, trial)
    z_m = malicious_phases(cfg.n_mris, trial_rng(master_seed, trial, "z_m"))
    design, phase, report = solve_p1(channels, z_m, cfg, geom=geom)

    row = {
        "P_T_dBW": linear_to_db(cfg.total_power_w),
        "N_L": cfg.n_lris,
        "N_M": cfg.n_mris,
        "S_R_sum": report.secrecy_sum,
        "gamma_L_dB": linear_to_db(report.gamma_l),
        "gamma_E_dB": linear_to_db(report.gamma_e),
        "rootCRB_theta_deg": report.crb_e.root_crb_theta_deg,
        "rootCRB_phi_deg": report.crb_e.root_crb_phi_deg,
        "rootCRB_comb_deg": report.crb_e.root_crb_combined_deg,
        "sdr_bound": phase.sdr_bound,
        "rand_gap": phase.randomization_gap,
        "status": "ok",
    }
    for k in range(MAX_CSV_USERS):
        have = k < cfg.num_users
        row[f"S_R_k{k + 1}"] = report.secrecy[k] if have else ""
        row[f"eta_k{k + 1}"] = report.eta[k] if have else ""
        row[f"etaE_k{k + 1}"] = report.eta_e[k] if have else ""
    return row


def _trial_task(payload):
    point_idx, trial, cfg, preset, grid_var, grid_value, master_seed = payload
    base = {
        "preset": preset, "grid_var": grid_var, "grid_value": grid_value,
        "trial": trial, "seed": trial_seed(master_seed, trial),
        "P_T_dBW": linear_to_db(cfg.total_power_w),
        "N_L": cfg.n_lris, "N_M": cfg.n_mris,
    }
    try:
        row = run_trial(cfg, master_seed, trial)
    except Exception as exc:    # noqa: BLE001 - flagged, never silently dropped
        row = {c: "" for c in _METRIC_COLUMNS}
        row["status"] = f"failed:{type(exc).__name__}"
        row.update({k: base[k] for k in ("P_T_dBW", "N_L", "N_M")})
    row.update(base)
    return point_idx, trial, row


@dataclass
class ResultTable:
    columns: list
    rows: list                   # detail rows, ordered by (point, trial)
    aggregate_columns: list
    aggregates: list             # one row per grid point
    flagged_fraction: float


def run_experiment(plan: ExperimentPlan, cfg: ScenarioConfig,
                   workers: int | None = None) -> ResultTable:
    """Run the plan: every grid point x trial, then per-point aggregates.

    Deterministic for a fixed master seed regardless of the parallel
    schedule: results are keyed by (grid point, trial) and aggregated in
    index order.
    """
    plan.validate()
    if cfg.num_users > MAX_CSV_USERS:
        raise ConfigError(f"CSV schema carries at most {MAX_CSV_USERS} users")
    point_cfgs = [apply_overrides(cfg, p.overrides) for p in plan.points]
    tasks = [(i, t, point_cfgs[i], plan.preset, plan.grid_var,
              plan.points[i].grid_value, plan.master_seed)
             for i in range(len(plan.points)) for t in range(plan.trials)]

    if workers is None:
        workers = os.cpu_count() or 1
    results = {}
    if workers > 1 and len(tasks) > 1:
        ctx = concurrent.futures.ProcessPoolExecutor(
            max_workers=workers, initializer=configure_numerics)
        with ctx as pool:
            for point_idx, trial, row in pool.map(_trial_task, tasks,
                                                  chunksize=1):
                results[(point_idx, trial)] = row
    else:
        configure_numerics()
        for payload in tasks:
            point_idx, trial, row = _trial_task(payload)
            results[(point_idx, trial)] = row

    rows = [results[key] for key in sorted(results)]
    flagged = sum(1 for r in rows if r["status"] != "ok")

    agg_cols = (["preset", "grid_var", "grid_value", "P_T_dBW", "N_L", "N_M",
                 "n_trials", "n_ok"]
                + [f"{stat}_{c}" for c in _METRIC_COLUMNS
                   for stat in ("mean", "se")])
    aggregates = []
    for i, point in enumerate(plan.points):
        block = [results[(i, t)] for t in range(plan.trials)]
        ok = [r for r in block if r["status"] == "ok"]
        agg = {
            "preset": plan.preset, "grid_var": plan.grid_var,
            "grid_value": point.grid_value,
            "P_T_dBW": block[0]["P_T_dBW"], "N_L": block[0]["N_L"],
            "N_M": block[0]["N_M"], "n_trials": len(block), "n_ok": len(ok),
        }
        for col in _METRIC_COLUMNS:
            vals = np.array([r[col] for r in ok if r[col] != ""], dtype=float)
            if len(vals):
                agg[f"mean_{col}"] = float(vals.mean())
                agg[f"se_{col}"] = (float(vals.std(ddof=1) / math.sqrt(len(vals)))
                                    if len(vals) > 1 else 0.0)
            else:
                agg[f"mean_{col}"] = ""
                agg[f"se_{col}"] = ""
        aggregates.append(agg)

    return ResultTable(columns=list(CSV_COLUMNS), rows=rows,
                       aggregate_columns=agg_cols, aggregates=aggregates,
                       flagged_fraction=flagged / max(len(rows), 1))


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def write_outputs(table: ResultTable, plan: ExperimentPlan,
                  cfg: ScenarioConfig, out_dir, wall_clock_s: float) -> str:
    """Write results.csv, aggregates.csv, and manifest.json; returns the
    content hash (volatile fields like wall clock excluded from the hash)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results_text = _csv_text(table.columns, table.rows)
    agg_text = _csv_text(table.aggregate_columns, table.aggregates)
    (out / "results.csv").write_text(results_text)
    (out / "aggregates.csv").write_text(agg_text)

    resolved = dataclasses.asdict(cfg)
    plan_dict = {"preset": plan.preset, "grid_var": plan.grid_var,
                 "trials": plan.trials, "master_seed": plan.master_seed,
                 "points": [{"grid_value": p.grid_value,
                             "overrides": dict(p.overrides)}
                            for p in plan.points]}
    hasher = hashlib.sha256()
    hasher.update(results_text.encode())
    hasher.update(agg_text.encode())
    hasher.update(json.dumps(resolved, sort_keys=True, default=str).encode())
    hasher.update(json.dumps(plan_dict, sort_keys=True).encode())
    content_hash = hasher.hexdigest()

    manifest = {
        "content_hash": content_hash,
        "plan": plan_dict,
        "resolved_config": resolved,
        "flagged_fraction": table.flagged_fraction,
        "versions": {"package": "0.1.0", "python": platform.python_version(),
                     "numpy": np.__version__},
        "wall_clock_s": wall_clock_s,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2,
                                                  sort_keys=True, default=str))
    return content_hash


# ---------------------------------------------------------------------------
# Analysis helper
# ---------------------------------------------------------------------------

def bootstrap_mean_quantile(values, quantile: float, n_boot: int = 4000,
                            seed: int = 0) -> float:
    """Bootstrap quantile of the mean of a sample (used for trend checks:
    a one-sided 95% claim 'mean(a - b) > 0' holds when the 5% quantile of
    the paired differences' bootstrap mean is positive)."""
    values = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(values), size=(n_boot, len(values)))
    means = values[idx].mean(axis=1)
    return float(np.quantile(means, quantile))


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="risac",
        description="Monte Carlo harness for the dual surface-assisted "
                    "secure ISAC simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment preset")
    run.add_argument("--config", required=True, help="scenario INI file")
    run.add_argument("--preset", required=True,
                     help="preset name (see `risac presets`) or 'custom'")
    run.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="results")
    run.add_argument("--workers", type=int, default=None)

    val = sub.add_parser("validate", help="validate a scenario file")
    val.add_argument("--config", required=True)

    sub.add_parser("presets", help="list experiment presets")
    return parser


def cli_main(argv=None) -> int:
    configure_numerics()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "presets":
        print(f"{'name':8s} trials  description")
        for name, spec in PRESETS.items():
            print(f"{name:8s} {DEFAULT_TRIALS:6d}  {spec['note']}")
        print(f"{'custom':8s} {DEFAULT_TRIALS:6d}  single point straight from "
              "the config file")
        return 0

    if args.command == "validate":
        try:
            load_config(args.config)
        except ConfigError as exc:
            print(f"invalid config: {exc}", file=sys.stderr)
            return 1
        print("config ok")
        return 0

    # run
    if args.preset != "custom" and args.preset not in PRESETS:
        known = ", ".join(list(PRESETS) + ["custom"])
        print(f"unknown preset {args.preset!r}; available: {known}",
              file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        plan = build_plan(args.preset, trials=args.trials,
                          master_seed=args.seed)
        t0 = time.time()
        table = run_experiment(plan, cfg, workers=args.workers)
        content_hash = write_outputs(table, plan, cfg, args.out,
                                     wall_clock_s=time.time() - t0)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}/results.csv ({len(table.rows)} rows), "
          f"aggregates.csv ({len(table.aggregates)} points)")
    print(f"content hash {content_hash}")
    if table.flagged_fraction > FAILURE_EXIT_FRACTION:
        print(f"{table.flagged_fraction:.0%} of trials flagged", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(cli_main())
