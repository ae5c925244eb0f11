"""Shared fixtures.

The three campaign fixtures below back the statistical acceptance tests and
take a few minutes each at full scale; they are session-scoped and only run
when a test actually requests them.
"""

import numpy as np
import pytest

from duplexsim import (
    Deployment,
    DuplexMode,
    link_samples,
    paired_variants,
    percentile,
    preset_uma200,
    preset_uma500,
    run_campaign,
)

ACCEPT_DROPS = 200
ACCEPT_SLOTS = 50
SWEEP_LOADS = (0.2, 0.4, 0.6, 0.8)
SWEEP_DROPS = 60
SWEEP_SLOTS = 30


@pytest.fixture(scope="session")
def medium_paired():
    """Preset B, 50% utilization, all 7 variants on shared randomness."""
    cfg = preset_uma200()
    return cfg, run_campaign(cfg, ACCEPT_DROPS, ACCEPT_SLOTS,
                             variants=paired_variants())


@pytest.fixture(scope="session")
def low_paired():
    """Preset B, 10% utilization, all 7 variants on shared randomness."""
    cfg = preset_uma200().replace(utilization=0.1)
    return cfg, run_campaign(cfg, ACCEPT_DROPS, ACCEPT_SLOTS,
                             variants=paired_variants())


SWEEP_CONFIGS = {
    "hd": dict(duplex_mode=DuplexMode.HD_FDD),
    "dtdd0": dict(duplex_mode=DuplexMode.DTDD, cli_suppression_db=0.0),
    "dtdd70": dict(duplex_mode=DuplexMode.DTDD, cli_suppression_db=70.0),
    "fd_0_0": dict(duplex_mode=DuplexMode.FD, cli_suppression_db=0.0,
                   si_cancellation_db=0.0),
    "fd_0_140": dict(duplex_mode=DuplexMode.FD, cli_suppression_db=0.0,
                     si_cancellation_db=140.0),
    "fd_70_140": dict(duplex_mode=DuplexMode.FD, cli_suppression_db=70.0,
                      si_cancellation_db=140.0),
}


@pytest.fixture(scope="session")
def suppression_sweep():
    """Preset A 5%-point UL link throughput across load and suppression."""
    p5 = {}
    for name, over in SWEEP_CONFIGS.items():
        for load in SWEEP_LOADS:
            cfg = preset_uma500(**over).replace(utilization=load)
            res = run_campaign(cfg, SWEEP_DROPS, SWEEP_SLOTS)
            rep = res.reports[next(iter(res.reports))]
            ul = link_samples(rep, "UL")
            p5[name, load] = percentile(ul, 0.05) if ul.size else 0.0
    return p5


def make_two_cell_deployment(cfg) -> Deployment:
    """Hand-built two-cell, four-user deployment with fixed couplings."""
    site_positions = np.array([[0.0, 0.0], [300.0, 0.0]])
    user_pos = np.array([[50.0, 10.0], [-40.0, 30.0],
                         [280.0, -20.0], [340.0, 40.0]])
    coupling_db = np.array([
        [-80.0, -110.0],
        [-85.0, -118.0],
        [-112.0, -82.0],
        [-120.0, -79.0],
    ])
    return Deployment(
        config=cfg, drop=0,
        site_positions=site_positions,
        cell_site=np.array([0, 1]),
        cell_bearing=np.array([0.0, 0.0]),
        user_pos=user_pos,
        user_site_los=np.zeros((4, 2), dtype=bool),
        coupling_db=coupling_db,
        serving_cell=np.array([0, 0, 1, 1]),
        cell_gain_db=np.array([[0.0, -70.0], [-70.0, 0.0]]),
        attached=[np.array([0, 1]), np.array([2, 3])],
    )


@pytest.fixture
def two_cell():
    cfg = preset_uma200(
        n_sites=1, sectors_per_site=1, n_users=4, bs_antennas=2,
        utilization=0.9, si_cancellation_db=60.0, si_channel_loss_db=5.0,
        cli_suppression_db=7.0, seed=42)
    return cfg, make_two_cell_deployment(cfg)
