"""Sensing metrics on a fixed covariance: echo SINRs and how the root CRB of
the eavesdropper target degrades with its distance."""

import numpy as np

from risac.channel import (round_trip_gain, steering_derivatives, ula_steering)
from risac.harness import configure_numerics
from risac.scenario import db_to_linear, derive_geometry, load_config
from risac.sensing_metrics import (crb_aod_per_angle, fisher_information,
                                   sensing_sinr_trace)

configure_numerics()
cfg = load_config("configs/table1.ini")
geom = derive_geometry(cfg)
tx = cfg.tx_antennas
sigma2 = cfg.noise_power_w

# isotropic transmission at 6 dBW as the reference design
r_x = db_to_linear(6.0) / tx * np.eye(tx)

a_l = ula_steering(*geom.aod_bs_luav, tx, cfg.nu_t).entries
a_e = ula_steering(*geom.aod_bs_euav, tx, cfg.nu_t).entries
beta_l = round_trip_gain(cfg.wavelength_m, cfg.rcs_m2, geom.d_bs_luav)
beta_e = round_trip_gain(cfg.wavelength_m, cfg.rcs_m2, geom.d_bs_euav)
mat_l = beta_l * np.outer(a_l.conj(), a_l)
mat_e = beta_e * np.outer(a_e.conj(), a_e)

print("echo SINRs under isotropic transmission:")
print("  gamma_L = %6.2f dB" % (10 * np.log10(
    sensing_sinr_trace(mat_l, mat_e, r_x, sigma2))))
print("  gamma_E = %6.2f dB" % (10 * np.log10(
    sensing_sinr_trace(mat_e, mat_l, r_x, sigma2))))

print("\nroot CRB of the E-UAV departure angles vs distance (deg):")
bare = np.outer(a_e.conj(), a_e)
d_th, d_ph = steering_derivatives(*geom.aod_bs_euav, tx, cfg.nu_t)
for d in (32.4, 40.0, 50.0, 58.7):
    beta = round_trip_gain(cfg.wavelength_m, cfg.rcs_m2, d)
    fisher = fisher_information(bare, d_th, d_ph, beta, r_x,
                                cfg.coherent_block_length, sigma2)
    crb = crb_aod_per_angle(fisher)
    print("  d = %5.1f m: theta %.4f, phi %.4f, combined %.4f"
          % (d, crb.root_crb_theta_deg, crb.root_crb_phi_deg,
             crb.root_crb_combined_deg))
