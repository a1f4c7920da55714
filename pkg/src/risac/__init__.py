"""Simulation and optimization library for a dual target-mounted RIS-assisted
secure ISAC system: channel synthesis, sensing/communication/secrecy metrics,
a two-stage SDR optimizer, and a Monte Carlo experiment harness."""

from risac.scenario import ScenarioConfig, Geometry, load_config, derive_geometry
from risac.channel import ChannelSet, RisPhases
from risac.sensing_metrics import sensing_sinr, fisher_information, crb_aod
from risac.comm_metrics import secrecy_rates, user_sinr_direct, user_sinr_lifted
from risac.sdr_core import TraceLpSdp, SdpSolution, solve_sdp, bisect_maxmin
from risac.optimizer import solve_p1, solve_p2, solve_p3, extract_w
from risac.harness import ExperimentPlan, run_experiment, cli_main

__version__ = "0.1.0"
