import math

import numpy as np
import pytest

from risac.channel import (malicious_phases, rician_channel, round_trip_gain,
                           sensing_matrix, steering_derivatives,
                           synthesize_channels, trial_rng, ula_steering,
                           upa_steering)
from risac.scenario import derive_geometry


def test_ula_vertical_look_is_flat():
    v = ula_steering(0.0, math.pi / 2, 4, math.pi)
    assert np.allclose(v.entries, np.ones(4), atol=1e-12)


def test_ula_broadside_half_wavelength():
    v = ula_steering(0.0, 0.0, 2, math.pi)
    assert np.allclose(v.entries, [1.0, -1.0], atol=1e-12)


def test_ula_phase_ramp_table_angles():
    v = ula_steering(math.radians(-141), math.radians(-9), 8, math.pi)
    want = 7 * math.pi * math.cos(math.radians(-141)) * math.cos(math.radians(-9))
    assert np.angle(v.entries[7]) == pytest.approx(
        math.atan2(math.sin(want), math.cos(want)), abs=1e-12)


def test_steering_unit_modulus_and_leading_one():
    rng = np.random.default_rng(0)
    for _ in range(20):
        th, ph = rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi / 2, math.pi / 2)
        for v in (ula_steering(th, ph, 8, math.pi),
                  upa_steering(th, ph, 4, 3, math.pi)):
            assert np.abs(np.abs(v.entries) - 1.0).max() < 1e-12
            assert v.entries[0] == 1.0 + 0.0j


def test_upa_singleton():
    assert np.allclose(upa_steering(0.3, -0.2, 1, 1, math.pi).entries, [1.0])


def test_upa_flat_elevation_z_axis():
    v = upa_steering(1.1, 0.0, 1, 3, math.pi)
    assert np.allclose(v.entries, np.ones(3), atol=1e-12)


def test_upa_kronecker_order():
    th, ph = 0.0, math.radians(30)
    v = upa_steering(th, ph, 2, 2, math.pi)
    bx = np.array([1, np.exp(1j * math.pi * math.cos(ph))])
    bz = np.array([1, np.exp(1j * math.pi * math.sin(ph))])
    assert np.allclose(v.entries, np.kron(bx, bz), atol=1e-12)
    assert v.entries[3] == pytest.approx(
        np.exp(1j * math.pi * (math.cos(ph) + math.sin(ph))), abs=1e-12)


def test_rician_los_limit():
    rng = np.random.default_rng(1)
    los = upa_steering(0.4, 0.1, 4, 4, math.pi).entries
    h = rician_channel(los, 1e12, 1e-3, 10.0, 2.2, rng)
    scale = math.sqrt(1e-3 / 10 ** 2.2)
    assert np.abs(h - scale * los).max() < 1e-5 * scale


def test_rician_scale_factor():
    assert math.sqrt(1e-3 / 10 ** 2.2) == pytest.approx(2.512e-3, rel=1e-3)


def test_rician_mean_power():
    rng = np.random.default_rng(2)
    n = 16
    los = np.ones((100_000 // n, n))
    h = rician_channel(los, 0.0, 1e-3, 10.0, 2.2, rng)
    per_entry = np.mean(np.abs(h) ** 2)
    assert per_entry == pytest.approx(1e-3 / 10 ** 2.2, rel=0.02)


def test_channel_power_scaling():
    # E||g||^2 = N * L0 / d^alpha regardless of the Rician factor
    rng = np.random.default_rng(3)
    n, reps = 16, 10_000
    los = np.tile(upa_steering(0.2, -0.5, 4, 4, math.pi).entries, (reps, 1))
    g = rician_channel(los, 10 ** 0.4, 1e-3, 11.3, 2.2, rng)
    mean_norm2 = np.mean(np.sum(np.abs(g) ** 2, axis=1))
    assert mean_norm2 == pytest.approx(n * 1e-3 / 11.3 ** 2.2, rel=0.02)


def test_round_trip_gain_values():
    lam = 0.08566
    assert round_trip_gain(lam, 1.0, 32.4) == pytest.approx(1.83e-6, rel=2e-3)
    assert round_trip_gain(lam, 1.0, 58.7) == pytest.approx(5.6e-7, rel=5e-3)


def test_round_trip_gain_distance_scaling():
    g1 = round_trip_gain(0.0857, 1.0, 20.0)
    g2 = round_trip_gain(0.0857, 1.0, 40.0)
    assert g1 / g2 == pytest.approx(4.0, rel=1e-12)


def test_sensing_matrix_all_ones():
    v = ula_steering(0.0, math.pi / 2, 2, math.pi)
    assert np.allclose(sensing_matrix(1.0, v), np.ones((2, 2)), atol=1e-12)


def test_sensing_matrix_trace_and_norm():
    rng = np.random.default_rng(4)
    for _ in range(10):
        th, ph = rng.uniform(-3, 3), rng.uniform(-1.5, 1.5)
        beta = rng.standard_normal() + 1j * rng.standard_normal()
        tx = 8
        a = sensing_matrix(beta, ula_steering(th, ph, tx, math.pi))
        assert np.trace(a) == pytest.approx(beta * tx, abs=1e-10)
        assert np.linalg.norm(a) == pytest.approx(abs(beta) * tx, rel=1e-12)
        hermit = a / beta
        assert np.abs(hermit - hermit.conj().T).max() < 1e-12


def test_steering_derivatives_match_finite_difference():
    rng = np.random.default_rng(5)
    h = 1e-6
    for _ in range(10):
        th = rng.uniform(-math.pi + 0.1, math.pi - 0.1)
        ph = rng.uniform(-math.pi / 2 + 0.1, math.pi / 2 - 0.1)
        d_th, d_ph = steering_derivatives(th, ph, 8, math.pi)

        def bare(t, p):
            a = ula_steering(t, p, 8, math.pi).entries
            return np.outer(a.conj(), a)

        fd_th = (bare(th + h, ph) - bare(th - h, ph)) / (2 * h)
        fd_ph = (bare(th, ph + h) - bare(th, ph - h)) / (2 * h)
        assert np.abs(d_th - fd_th).max() < 1e-6
        assert np.abs(d_ph - fd_ph).max() < 1e-6


def test_steering_derivative_vanishes_at_zero_azimuth():
    d_th, _ = steering_derivatives(0.0, 0.3, 8, math.pi)
    assert np.abs(d_th).max() < 1e-14


def test_steering_derivative_single_element():
    d_th, d_ph = steering_derivatives(0.7, 0.3, 1, math.pi)
    assert d_th.shape == (1, 1) and np.abs(d_th).max() == 0.0
    assert np.abs(d_ph).max() == 0.0


def test_malicious_phases_properties():
    rng = np.random.default_rng(6)
    z = malicious_phases(100_000, rng)
    assert np.abs(np.abs(z) - 1.0).max() < 1e-12
    assert abs(z.real.mean()) < 0.01 and abs(z.imag.mean()) < 0.01
    z1 = malicious_phases(64, trial_rng(9, 3, "z_m"))
    z2 = malicious_phases(64, trial_rng(9, 3, "z_m"))
    assert np.array_equal(z1, z2)


def test_trial_rng_streams_are_independent_and_reproducible():
    a = trial_rng(1, 0, "h_l").standard_normal(8)
    b = trial_rng(1, 0, "h_m").standard_normal(8)
    c = trial_rng(1, 1, "h_l").standard_normal(8)
    assert not np.allclose(a, b) and not np.allclose(a, c)
    assert np.array_equal(a, trial_rng(1, 0, "h_l").standard_normal(8))


def test_los_product_structure(table1_cfg):
    geom = derive_geometry(table1_cfg)
    ch = synthesize_channels(table1_cfg.replace(rician_factor=1e12), geom, 0, 0)
    h = ch.h_l / math.sqrt(table1_cfg.reference_loss / geom.d_bs_luav ** 2.2)
    s = np.linalg.svd(h, compute_uv=False)
    assert s[1] / s[0] < 1e-5
    assert np.abs(np.abs(h) - 1.0).max() < 1e-4


def test_synthesized_sensing_matrices(table1_cfg):
    geom = derive_geometry(table1_cfg)
    ch = synthesize_channels(table1_cfg, geom, 0, 0)
    lam_m = table1_cfg.wavelength_m
    assert abs(ch.beta_l) == pytest.approx(
        round_trip_gain(lam_m, 1.0, geom.d_bs_luav), rel=1e-12)
    assert abs(ch.beta_e) == pytest.approx(
        round_trip_gain(lam_m, 1.0, geom.d_bs_euav), rel=1e-12)
    for a, beta in ((ch.a_l, ch.beta_l), (ch.a_e, ch.beta_e)):
        assert np.linalg.matrix_rank(a, tol=1e-12) == 1
        bare = a / beta
        assert np.abs(bare - bare.conj().T).max() < 1e-12
        lam = np.linalg.eigvalsh(bare)
        assert lam[0] > -1e-12
    assert ch.h_l.shape == (144, 8) and ch.g_m.shape == (4, 36)


def test_ris_phases_container():
    from risac.channel import RisPhases
    rng = np.random.default_rng(11)
    good = RisPhases(z_l=np.exp(1j * rng.uniform(0, 6.28, 9)),
                     z_m=malicious_phases(4, rng)).validate()
    assert len(good.z_l) == 9
    with pytest.raises(ValueError, match="unit modulus"):
        RisPhases(z_l=np.array([0.5 + 0j]), z_m=np.ones(1)).validate()
