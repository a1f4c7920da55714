import numpy as np
import pytest

from risac.comm_metrics import (build_lifted_channels, eavesdropper_sinr,
                                secrecy_rates, user_sinr_direct,
                                user_sinr_lifted)


def _random_instance(rng, n_l=12, n_m=10, tx=4, users=3):
    h_l = rng.standard_normal((n_l, tx)) + 1j * rng.standard_normal((n_l, tx))
    h_m = rng.standard_normal((n_m, tx)) + 1j * rng.standard_normal((n_m, tx))
    g_l = rng.standard_normal((users, n_l)) + 1j * rng.standard_normal((users, n_l))
    g_m = rng.standard_normal((users, n_m)) + 1j * rng.standard_normal((users, n_m))
    w = rng.standard_normal((tx, users + tx)) + 1j * rng.standard_normal((tx, users + tx))
    z_l = np.exp(1j * rng.uniform(0, 2 * np.pi, n_l))
    z_m = np.exp(1j * rng.uniform(0, 2 * np.pi, n_m))
    return h_l, h_m, g_l, g_m, w, z_l, z_m


def test_direct_equals_lifted():
    rng = np.random.default_rng(0)
    for _ in range(25):
        h_l, h_m, g_l, g_m, w, z_l, z_m = _random_instance(rng)
        lifted = build_lifted_channels(h_l, g_l, h_m, g_m, w)
        big_zl = np.outer(z_l.conj(), z_l)
        big_zm = np.outer(z_m.conj(), z_m)
        for k in range(g_l.shape[0]):
            direct = user_sinr_direct(g_l[k], g_m[k], z_l, z_m, h_l, h_m, w,
                                      k, 1e-3)
            pairs = [lifted.pair(k, kh) for kh in range(w.shape[1]) if kh != k]
            via_trace = user_sinr_lifted(lifted.signal(k), pairs,
                                         lifted.malicious(k), big_zl, big_zm,
                                         1e-3)
            assert via_trace == pytest.approx(direct, rel=1e-10)


def test_lifted_interference_sum_matches_pairs():
    rng = np.random.default_rng(1)
    h_l, h_m, g_l, g_m, w, *_ = _random_instance(rng)
    lifted = build_lifted_channels(h_l, g_l, h_m, g_m, w)
    for k in range(g_l.shape[0]):
        total = sum(lifted.pair(k, kh) for kh in range(w.shape[1]) if kh != k)
        assert np.allclose(lifted.interference_sum(k), total, rtol=1e-12)


def test_lift_matrices_hermitian_psd():
    rng = np.random.default_rng(2)
    h_l, h_m, g_l, g_m, w, *_ = _random_instance(rng)
    lifted = build_lifted_channels(h_l, g_l, h_m, g_m, w)
    for k in range(g_l.shape[0]):
        for c in (lifted.signal(k), lifted.interference_sum(k), lifted.malicious(k)):
            assert np.abs(c - c.conj().T).max() <= 1e-10 * np.abs(c).max()
            assert np.linalg.eigvalsh(c)[0] >= -1e-10 * np.linalg.norm(c)


def test_lifted_identity_surface_traces_diagonal():
    rng = np.random.default_rng(3)
    h_l, h_m, g_l, g_m, w, _, z_m = _random_instance(rng)
    lifted = build_lifted_channels(h_l, g_l, h_m, g_m, w)
    c = lifted.signal(0)
    big_i = np.eye(c.shape[0], dtype=complex)
    num = float(np.real(np.vdot(big_i, c)))
    assert num == pytest.approx(float(np.real(np.trace(c))), rel=1e-12)


def test_zero_lift_gives_zero_sinr():
    n = 6
    zeros = np.zeros((n, n), dtype=complex)
    got = user_sinr_lifted(zeros, [zeros], zeros, np.eye(n), np.eye(n), 1e-3)
    assert got == 0.0


def test_single_user_no_malicious():
    rng = np.random.default_rng(4)
    n_l, tx = 8, 4
    h_l = rng.standard_normal((n_l, tx)) + 1j * rng.standard_normal((n_l, tx))
    h_m = np.zeros((5, tx))
    g_l = rng.standard_normal((1, n_l)) + 1j * rng.standard_normal((1, n_l))
    g_m = np.ones((1, 5))
    z_l = np.exp(1j * rng.uniform(0, 2 * np.pi, n_l))
    z_m = np.exp(1j * rng.uniform(0, 2 * np.pi, 5))
    w = np.zeros((tx, 1 + tx), dtype=complex)
    w[:, 0] = rng.standard_normal(tx) + 1j * rng.standard_normal(tx)
    got = user_sinr_direct(g_l[0], g_m[0], z_l, z_m, h_l, h_m, w, 0, 1e-3)
    want = abs((g_l[0] * z_l) @ (h_l @ w[:, 0])) ** 2 / 1e-3
    assert got == pytest.approx(want, rel=1e-12)


def test_noise_scaling_without_interference():
    rng = np.random.default_rng(5)
    n_l, tx = 8, 4
    h_l = rng.standard_normal((n_l, tx)) + 1j * rng.standard_normal((n_l, tx))
    g = rng.standard_normal(n_l) + 1j * rng.standard_normal(n_l)
    z_l = np.exp(1j * rng.uniform(0, 2 * np.pi, n_l))
    w = np.zeros((tx, 1 + tx), dtype=complex)
    w[:, 0] = rng.standard_normal(tx)
    h_m = np.zeros((4, tx))
    eta1 = user_sinr_direct(g, np.ones(4), z_l, np.ones(4), h_l, h_m, w, 0, 1e-3)
    eta2 = user_sinr_direct(g, np.ones(4), z_l, np.ones(4), h_l, h_m, w, 0, 2e-3)
    assert eta1 == pytest.approx(2.0 * eta2, rel=1e-12)


def test_common_phase_invariance():
    rng = np.random.default_rng(6)
    h_l, h_m, g_l, g_m, w, z_l, z_m = _random_instance(rng)
    base = [user_sinr_direct(g_l[k], g_m[k], z_l, z_m, h_l, h_m, w, k, 1e-3)
            for k in range(3)]
    rot = np.exp(1j * 1.234) * z_l
    spun = [user_sinr_direct(g_l[k], g_m[k], rot, z_m, h_l, h_m, w, k, 1e-3)
            for k in range(3)]
    assert np.allclose(base, spun, rtol=1e-10)


def test_eavesdropper_orthogonal_beam():
    tx = 4
    a = np.array([1.0, 1.0, 1.0, 1.0], dtype=complex)
    w = np.zeros((tx, 2), dtype=complex)
    w[:, 0] = [1, -1, 1, -1]
    w[:, 1] = [1, 1, 1, 1]
    assert eavesdropper_sinr(a, 1e-6, w, 0, 1e-9) == 0.0


def test_eavesdropper_single_beam():
    rng = np.random.default_rng(7)
    a = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    w = (rng.standard_normal((4, 1)) + 1j * rng.standard_normal((4, 1)))
    beta = 3.7e-7
    got = eavesdropper_sinr(a, beta, w, 0, 1e-12)
    assert got == pytest.approx(beta * abs(a @ w[:, 0]) ** 2 / 1e-12, rel=1e-12)


def test_eavesdropper_transcription_oracle():
    # re-derive from the received-signal model: y = sqrt(beta) a x + n with
    # x = sum_c w_c s_c, unit-power streams
    rng = np.random.default_rng(8)
    tx, cols = 6, 9
    a = np.exp(1j * rng.uniform(0, 2 * np.pi, tx))
    w = rng.standard_normal((tx, cols)) + 1j * rng.standard_normal((tx, cols))
    beta, noise = 5.6e-7, 1e-12
    amp = np.sqrt(beta) * (a @ w)
    for k in range(cols):
        want = abs(amp[k]) ** 2 / (np.sum(np.abs(amp) ** 2) - abs(amp[k]) ** 2
                                   + noise)
        assert eavesdropper_sinr(a, beta, w, k, noise) == pytest.approx(
            want, rel=1e-12)


def test_secrecy_rate_examples():
    rate, rate_e, s, total = secrecy_rates([3.0], [1.0])
    assert s[0] == pytest.approx(1.0) and total == pytest.approx(1.0)
    _, _, s, _ = secrecy_rates([1.0], [3.0])
    assert s[0] == 0.0
    _, _, s, _ = secrecy_rates([2.5], [2.5])
    assert s[0] == 0.0


def test_secrecy_rate_monotonicity():
    etas = np.linspace(0.0, 20.0, 21)
    s_up = [secrecy_rates([e], [1.0])[2][0] for e in etas]
    assert np.all(np.diff(s_up) >= 0)
    s_down = [secrecy_rates([5.0], [e])[2][0] for e in etas]
    assert np.all(np.diff(s_down) <= 0)
    with pytest.raises(ValueError):
        secrecy_rates([-0.1], [0.0])


def test_user_index_out_of_range():
    rng = np.random.default_rng(9)
    h_l, h_m, g_l, g_m, w, z_l, z_m = _random_instance(rng)
    with pytest.raises(IndexError):
        user_sinr_direct(g_l[0], g_m[0], z_l, z_m, h_l, h_m, w, w.shape[1], 1e-3)
    with pytest.raises(IndexError):
        eavesdropper_sinr(np.ones(4), 1e-6, w[:4, :], -1, 1e-3)
