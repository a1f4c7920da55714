import json
import math
import subprocess
import sys

import numpy as np
import pytest

from risac.harness import (CSV_COLUMNS, ExperimentPlan, GridPoint, PRESETS,
                           apply_overrides, bootstrap_mean_quantile, build_plan,
                           run_experiment, trial_seed, write_outputs)
from risac.scenario import ConfigError


def _tiny_plan(trials=2, values=(0.0, 3.0, 6.0)):
    points = tuple(GridPoint(grid_value=v,
                             overrides=(("N_L", 4), ("N_M", 4), ("P_T_dBW", v)))
                   for v in values)
    return ExperimentPlan(preset="custom", grid_var="P_T_dBW", points=points,
                          trials=trials, master_seed=3).validate()


def test_row_and_aggregate_counts(table1_cfg):
    table = run_experiment(_tiny_plan(), table1_cfg, workers=2)
    assert len(table.rows) == 6
    assert len(table.aggregates) == 3
    assert table.flagged_fraction == 0.0
    assert all(r["status"] == "ok" for r in table.rows)


def test_csv_schema_is_stable(table1_cfg):
    golden = ("preset,grid_var,grid_value,trial,seed,P_T_dBW,N_L,N_M,S_R_sum,"
              "S_R_k1,S_R_k2,S_R_k3,S_R_k4,eta_k1,eta_k2,eta_k3,eta_k4,"
              "etaE_k1,etaE_k2,etaE_k3,etaE_k4,gamma_L_dB,gamma_E_dB,"
              "rootCRB_theta_deg,rootCRB_phi_deg,rootCRB_comb_deg,sdr_bound,"
              "rand_gap,status")
    assert ",".join(CSV_COLUMNS) == golden


def test_outputs_deterministic(table1_cfg, tmp_path):
    hashes, texts = [], []
    for rep in range(2):
        plan = _tiny_plan()
        table = run_experiment(plan, table1_cfg, workers=2)
        out = tmp_path / f"rep{rep}"
        h = write_outputs(table, plan, table1_cfg, out, wall_clock_s=rep * 3.0)
        hashes.append(h)
        texts.append((out / "results.csv").read_bytes())
    assert hashes[0] == hashes[1]
    assert texts[0] == texts[1]


def test_worker_count_does_not_change_results(table1_cfg, tmp_path):
    plan = _tiny_plan(trials=2, values=(6.0,))
    t1 = run_experiment(plan, table1_cfg, workers=1)
    t2 = run_experiment(plan, table1_cfg, workers=2)
    assert t1.rows == t2.rows
    assert t1.aggregates == t2.aggregates


def test_aggregates_mean_and_se(table1_cfg):
    plan = _tiny_plan(trials=3, values=(6.0,))
    table = run_experiment(plan, table1_cfg, workers=2)
    vals = np.array([r["S_R_sum"] for r in table.rows])
    agg = table.aggregates[0]
    assert agg["mean_S_R_sum"] == pytest.approx(vals.mean())
    assert agg["se_S_R_sum"] == pytest.approx(vals.std(ddof=1) / math.sqrt(3))
    assert agg["n_ok"] == 3


def test_failed_trials_flagged_not_dropped(table1_cfg, monkeypatch):
    import risac.harness as hmod

    real = hmod.run_trial

    def flaky(cfg, master_seed, trial):
        if trial == 1:
            raise RuntimeError("synthetic failure")
        return real(cfg, master_seed, trial)

    monkeypatch.setattr(hmod, "run_trial", flaky)
    plan = _tiny_plan(trials=3, values=(6.0,))
    table = run_experiment(plan, table1_cfg, workers=1)
    statuses = [r["status"] for r in table.rows]
    assert statuses.count("ok") == 2
    assert any(s.startswith("failed:RuntimeError") for s in statuses)
    assert table.aggregates[0]["n_ok"] == 2
    assert table.flagged_fraction == pytest.approx(1 / 3)


def test_trial_seed_reproducible():
    assert trial_seed(7, 3) == trial_seed(7, 3)
    assert trial_seed(7, 3) != trial_seed(7, 4)
    assert trial_seed(8, 3) != trial_seed(7, 3)


def test_apply_overrides(table1_cfg):
    cfg = apply_overrides(table1_cfg, (("N_M", 49), ("P_T_dBW", 9.0)))
    assert cfg.n_mris == 49 and cfg.mris_nx == 7
    assert cfg.total_power_w == pytest.approx(10 ** 0.9)
    with pytest.raises(ConfigError, match="square"):
        apply_overrides(table1_cfg, (("N_M", 50),))


def test_euav_distance_override_matches_table(table1_cfg):
    from risac.scenario import derive_geometry
    cfg = apply_overrides(table1_cfg, (("d_E_x", 55.0),))
    geom = derive_geometry(cfg)
    # x = 55 m reproduces the table's 58.7 m range and -160 deg azimuth
    assert geom.d_bs_euav == pytest.approx(58.7, abs=0.1)
    assert math.degrees(geom.aod_bs_euav[0]) == pytest.approx(-160.0, abs=0.1)
    cfg25 = apply_overrides(table1_cfg, (("d_E_x", 25.0),))
    geom25 = derive_geometry(cfg25)
    assert geom25.d_bs_euav == pytest.approx(geom25.d_bs_luav, abs=0.01)


def test_presets_well_formed():
    for name in PRESETS:
        plan = build_plan(name, trials=7, master_seed=1)
        assert plan.points and plan.trials == 7
        for p in plan.points:
            assert plan.grid_var in dict(p.overrides)
    with pytest.raises(KeyError):
        build_plan("fig999")


def test_plan_restrict():
    plan = build_plan("fig3").restrict(P_T_dBW=6.0)
    assert len(plan.points) == 3
    assert {dict(p.overrides)["N_M"] for p in plan.points} == {49, 144, 256}


def test_bootstrap_quantile_behaviour():
    rng = np.random.default_rng(0)
    clear = rng.normal(1.0, 0.1, size=60)
    assert bootstrap_mean_quantile(clear, 0.05, seed=1) > 0
    noisy = rng.normal(0.0, 1.0, size=60)
    lo = bootstrap_mean_quantile(noisy, 0.05, seed=1)
    hi = bootstrap_mean_quantile(noisy, 0.95, seed=1)
    assert lo < hi


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "risac.harness", *args],
                          capture_output=True, text=True)
    return proc


def test_cli_validate_ok(table1_path):
    proc = _cli("validate", "--config", str(table1_path))
    assert proc.returncode == 0


def test_cli_validate_bad_config(tmp_path):
    bad = tmp_path / "broken.ini"
    bad.write_text("[system]\ntx_antennas = 1\n")
    proc = _cli("validate", "--config", str(bad))
    assert proc.returncode == 1


def test_cli_presets_listing():
    proc = _cli("presets")
    assert proc.returncode == 0
    for name in ("fig3", "fig7", "custom"):
        assert name in proc.stdout


def test_cli_unknown_preset(table1_path):
    proc = _cli("run", "--config", str(table1_path), "--preset", "fig99")
    assert proc.returncode == 2
    assert "fig3" in proc.stderr


def test_cli_bad_flags():
    proc = _cli("run", "--bogus")
    assert proc.returncode == 2


def test_cli_run_writes_outputs(table1_path, tmp_path, table1_cfg):
    small = tmp_path / "small.ini"
    text = table1_path.read_text()
    text = text.replace("lris_nx = 12", "lris_nx = 2")
    text = text.replace("lris_nz = 12", "lris_nz = 2")
    text = text.replace("mris_nx = 6", "mris_nx = 2")
    text = text.replace("mris_nz = 6", "mris_nz = 2")
    small.write_text(text)
    out = tmp_path / "out"
    proc = _cli("run", "--config", str(small), "--preset", "custom",
                "--trials", "2", "--seed", "5", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert (out / "results.csv").exists()
    assert (out / "aggregates.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["plan"]["master_seed"] == 5
    assert len(manifest["content_hash"]) == 64
    header = (out / "results.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)


def test_cli_exit_on_excess_failures(table1_path, tmp_path, monkeypatch):
    import risac.harness as hmod

    def boom(cfg, master_seed, trial):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(hmod, "run_trial", boom)
    code = hmod.cli_main(["run", "--config", str(table1_path),
                          "--preset", "custom", "--trials", "2",
                          "--workers", "1", "--out", str(tmp_path / "o")])
    assert code == 1
