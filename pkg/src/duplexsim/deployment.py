"""Network geometry: hexagonal site layout, user drop, cell association.

Site 0 sits at the origin; 7-site layouts add one ring at the inter-site
distance, 19-site layouts a second ring.  Tri-sector sites carry three cells
with boresights at 30/150/270 degrees from east.  Users drop uniformly over
the union of per-site coverage discs of radius ISD/sqrt(3), at least 35 m
from every site, and attach to the cell with the strongest coupling gain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import randstream
from .channel import (
    DomainError,
    free_space_pathloss,
    los_probability,
    pathloss_uma,
    sector_gain,
    ue_to_ue_pathloss,
)
from .config import (
    ArrayModel,
    ConfigurationError,
    ScenarioConfig,
    VALID_SITE_COUNTS,
)

MIN_DROP_DISTANCE_M = 35.0
TRI_SECTOR_BEARINGS_DEG = (30.0, 150.0, 270.0)


def build_hex_layout(isd_m: float, n_sites: int, sectors_per_site: int):
    """Return (site_positions, cell_site, cell_bearing_rad).

    ``site_positions``: (n_sites, 2) with site 0 at the origin;
    ``cell_site``: site index of each cell; ``cell_bearing_rad``: boresight.
    """
    if isd_m <= 0:
        raise ConfigurationError(f"isd_m must be positive, got {isd_m}")
    if n_sites not in VALID_SITE_COUNTS:
        raise ConfigurationError(
            f"n_sites must be one of {VALID_SITE_COUNTS}, got {n_sites}")
    if sectors_per_site not in (1, 3):
        raise ConfigurationError(
            f"sectors_per_site must be 1 or 3, got {sectors_per_site}")

    pos = [(0.0, 0.0)]
    if n_sites >= 7:
        ring1 = np.radians(np.arange(6) * 60.0)
        pos += [(isd_m * np.cos(a), isd_m * np.sin(a)) for a in ring1]
    if n_sites == 19:
        # second ring: 6 sites at 2*ISD plus 6 at sqrt(3)*ISD on the bisectors
        ring2a = np.radians(np.arange(6) * 60.0)
        pos += [(2.0 * isd_m * np.cos(a), 2.0 * isd_m * np.sin(a)) for a in ring2a]
        ring2b = np.radians(30.0 + np.arange(6) * 60.0)
        r = np.sqrt(3.0) * isd_m
        pos += [(r * np.cos(a), r * np.sin(a)) for a in ring2b]
    site_positions = np.array(pos, dtype=float)

    if sectors_per_site == 1:
        bearings = np.zeros(1)
    else:
        bearings = np.radians(TRI_SECTOR_BEARINGS_DEG)
    cell_site = np.repeat(np.arange(n_sites), sectors_per_site)
    cell_bearing = np.tile(bearings, n_sites)
    return site_positions, cell_site, cell_bearing


def drop_users(site_positions: np.ndarray, isd_m: float, n_users: int,
               rng: np.random.Generator, max_batches: int = 1000) -> np.ndarray:
    """Sample user positions uniformly over the union of coverage discs.

    Rejection sampling from the bounding box; points closer than 35 m to any
    site are rejected.  Deterministic given the generator state.
    """
    if n_users == 0:
        return np.zeros((0, 2))
    radius = isd_m / np.sqrt(3.0)
    lo = site_positions.min(axis=0) - radius
    hi = site_positions.max(axis=0) + radius
    accepted = []
    remaining = n_users
    for _ in range(max_batches):
        batch = max(2 * remaining, 256)
        pts = rng.uniform(lo, hi, size=(batch, 2))
        d = np.linalg.norm(pts[:, None, :] - site_positions[None, :, :], axis=2)
        dmin = d.min(axis=1)
        ok = (dmin <= radius) & (dmin >= MIN_DROP_DISTANCE_M)
        good = pts[ok]
        if len(good):
            accepted.append(good[:remaining])
            remaining -= len(accepted[-1])
        if remaining == 0:
            return np.concatenate(accepted, axis=0)
    raise RuntimeError("user drop did not converge; degenerate geometry?")


def user_cell_coupling_db(cfg: ScenarioConfig, site_positions, cell_site,
                          cell_bearing, user_pos, user_site_los):
    """Large-scale coupling gain (dB) of every user to every cell.

    Pathloss per (user, site) with the drawn LOS state; in the effective
    array model the sector pattern and the array-gain offset are added on
    the BS side, in the element model antennas are isotropic.
    """
    vec = user_pos[:, None, :] - site_positions[None, :, :]   # (nu, ns, 2)
    dist = np.linalg.norm(vec, axis=2)
    pl_site = pathloss_uma(dist, cfg.carrier_hz, cfg.bs_height_m,
                           cfg.ue_height_m, user_site_los)     # (nu, ns)
    gain = -pl_site[:, cell_site]                              # (nu, nc)
    if cfg.bs_array_model is ArrayModel.EFFECTIVE:
        az = np.arctan2(vec[..., 1], vec[..., 0])              # site -> user
        gain = gain + sector_gain(cell_bearing[None, :], az[:, cell_site])
        gain = gain + cfg.array_gain_offset_db
    return gain


def cell_to_cell_coupling_db(cfg: ScenarioConfig, site_positions, cell_site,
                             cell_bearing) -> np.ndarray:
    """Symmetric BS-to-BS coupling gain (dB) between every cell pair.

    Co-sited sectors couple through side lobes only: a flat
    ``intra_site_cli_loss_db``.  Distinct sites couple through free-space
    LOS plus (effective model) the sector patterns and array offsets of
    both ends.  The diagonal is 0 (self coupling handled by the SI model).
    """
    nc = len(cell_site)
    gain = np.zeros((nc, nc))
    pos = site_positions[cell_site]
    vec = pos[None, :, :] - pos[:, None, :]
    dist = np.linalg.norm(vec, axis=2)
    same_site = cell_site[:, None] == cell_site[None, :]
    off = ~same_site
    if np.any(off):
        gain[off] = -free_space_pathloss(dist[off], cfg.carrier_hz)
        if cfg.bs_array_model is ArrayModel.EFFECTIVE:
            az = np.arctan2(vec[..., 1], vec[..., 0])
            g_rx = sector_gain(cell_bearing[:, None], az)      # at the victim
            g_tx = sector_gain(cell_bearing[None, :], np.transpose(az))
            gain[off] += (g_rx + g_tx + 2.0 * cfg.array_gain_offset_db)[off]
    gain[same_site] = -cfg.intra_site_cli_loss_db
    np.fill_diagonal(gain, 0.0)
    return gain


@dataclass
class Deployment:
    """One drop: geometry, LOS states, association and coupling tables."""
    config: ScenarioConfig
    drop: int
    site_positions: np.ndarray          # (n_sites, 2)
    cell_site: np.ndarray               # (n_cells,)
    cell_bearing: np.ndarray            # (n_cells,)
    user_pos: np.ndarray                # (n_users, 2)
    user_site_los: np.ndarray           # (n_users, n_sites) bool
    coupling_db: np.ndarray             # (n_users, n_cells)
    serving_cell: np.ndarray            # (n_users,)
    cell_gain_db: np.ndarray            # (n_cells, n_cells) BS-to-BS
    attached: list = field(default_factory=list)  # per cell, sorted user ids

    @property
    def n_cells(self) -> int:
        return len(self.cell_site)

    def ue_ue_gain_db(self, users_a, users_b) -> np.ndarray:
        """Street-level coupling (dB) between two user index vectors."""
        pa = self.user_pos[np.asarray(users_a)]
        pb = self.user_pos[np.asarray(users_b)]
        d = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
        return -ue_to_ue_pathloss(d, self.config.carrier_hz,
                                  self.config.ue_height_m)


def deploy_drop(cfg: ScenarioConfig, drop: int) -> Deployment:
    """Build the complete deployment for one Monte-Carlo drop."""
    site_positions, cell_site, cell_bearing = build_hex_layout(
        cfg.isd_m, cfg.n_sites, cfg.sectors_per_site)

    rng_pos = randstream.stream(cfg.seed, randstream.USER_DROP, drop)
    user_pos = drop_users(site_positions, cfg.isd_m, cfg.n_users, rng_pos)

    dist = np.linalg.norm(user_pos[:, None, :] - site_positions[None, :, :], axis=2)
    rng_los = randstream.stream(cfg.seed, randstream.LOS_STATE, drop)
    user_site_los = rng_los.uniform(size=dist.shape) < los_probability(dist)

    coupling = user_cell_coupling_db(cfg, site_positions, cell_site,
                                     cell_bearing, user_pos, user_site_los)
    serving = np.argmax(coupling, axis=1) if len(user_pos) else np.zeros(0, dtype=int)
    attached = [np.flatnonzero(serving == c) for c in range(len(cell_site))]
    cell_gain = cell_to_cell_coupling_db(cfg, site_positions, cell_site, cell_bearing)
    return Deployment(config=cfg, drop=drop, site_positions=site_positions,
                      cell_site=cell_site, cell_bearing=cell_bearing,
                      user_pos=user_pos, user_site_los=user_site_los,
                      coupling_db=coupling, serving_cell=serving,
                      cell_gain_db=cell_gain, attached=attached)
