"""Propagation and small-scale fading models.

Large-scale:

* BS <-> UE links use the ITU-R urban-macro pathloss (LOS + NLOS branches,
  street width 20 m, mean building height 20 m) with the LOS state drawn
  once per link per drop from the urban-macro LOS-probability curve.
* BS <-> BS links are above-rooftop and modeled as free-space LOS.
* UE <-> UE links use the NLOS branch evaluated at UE heights plus an extra
  clutter loss (deep isolation: these links sit at street level on both ends).
* No shadow fading; all slot-to-slot variability comes from block fading.

Small-scale: i.i.d. Rayleigh block fading per entry, redrawn every slot,
except that the self-interference channel is Rician with a strong
deterministic line-of-sight component.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .randstream import complex_normal

BOLTZMANN = 1.380649e-23
REF_TEMPERATURE_K = 290.0

# ITU urban-macro environment constants
STREET_WIDTH_M = 20.0
BUILDING_HEIGHT_M = 20.0
EFFECTIVE_ENV_HEIGHT_M = 1.0   # subtracted from antenna heights at the breakpoint
MIN_LINK_DISTANCE_M = 35.0     # validity floor of the pathloss formula

# 3GPP-style sector pattern
SECTOR_HPBW_DEG = 65.0
SECTOR_FLOOR_DB = 30.0

SPEED_OF_LIGHT = 299792458.0


class DomainError(ValueError):
    """Input outside the validity range of a propagation formula."""


class FadingKind(enum.Enum):
    RAYLEIGH = "rayleigh"
    RICIAN = "rician"


@dataclass(frozen=True)
class FadingSpec:
    kind: FadingKind = FadingKind.RAYLEIGH
    rician_k_db: float = 0.0


@dataclass(frozen=True)
class LinkGain:
    """Large-scale coupling of one link: pathloss and deterministic antenna gain."""
    pathloss_db: float
    antenna_gain_db: float = 0.0
    los: bool = False

    @property
    def gain_db(self) -> float:
        return self.antenna_gain_db - self.pathloss_db

    @property
    def linear(self) -> float:
        return 10.0 ** (self.gain_db / 10.0)


def noise_power_w(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise power k*T0*B raised by the receiver noise figure."""
    return BOLTZMANN * REF_TEMPERATURE_K * bandwidth_hz * 10.0 ** (noise_figure_db / 10.0)


def los_probability(d_2d_m):
    """Urban-macro LOS probability as a function of 2-D distance.

    Equals 1 up to 18 m and decays as min(18/d, 1)*(1 - exp(-d/63)) + exp(-d/63).
    """
    d = np.asarray(d_2d_m, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be non-negative")
    with np.errstate(divide="ignore"):
        p = np.minimum(18.0 / np.maximum(d, 1e-12), 1.0)
    out = p * (1.0 - np.exp(-d / 63.0)) + np.exp(-d / 63.0)
    out = np.where(d <= 18.0, 1.0, out)
    return out if out.ndim else float(out)


def pathloss_uma(d_2d_m, carrier_hz, h_bs_m, h_ue_m, los):
    """Urban-macro pathloss in dB (dual-slope LOS and the NLOS curve).

    ``los`` may be a bool or bool array broadcastable against ``d_2d_m``.
    Distances below the 35 m validity floor raise :class:`DomainError`.
    """
    d = np.asarray(d_2d_m, dtype=float)
    if np.any(d < MIN_LINK_DISTANCE_M):
        raise DomainError(
            f"pathloss_uma is valid for d >= {MIN_LINK_DISTANCE_M} m "
            f"(got min {np.min(d):.2f} m)")
    fc_ghz = carrier_hz / 1e9
    logd = np.log10(d)
    logf = np.log10(fc_ghz)

    # LOS, dual slope around the breakpoint distance
    h_bs_eff = h_bs_m - EFFECTIVE_ENV_HEIGHT_M
    h_ue_eff = h_ue_m - EFFECTIVE_ENV_HEIGHT_M
    d_bp = 4.0 * h_bs_eff * h_ue_eff * carrier_hz / SPEED_OF_LIGHT
    pl_los_near = 22.0 * logd + 28.0 + 20.0 * logf
    pl_los_far = (40.0 * logd + 7.8 - 18.0 * np.log10(h_bs_eff)
                  - 18.0 * np.log10(h_ue_eff) + 2.0 * logf)
    pl_los = np.where(d <= d_bp, pl_los_near, pl_los_far)

    # NLOS
    w, h = STREET_WIDTH_M, BUILDING_HEIGHT_M
    pl_nlos = (161.04 - 7.1 * np.log10(w) + 7.5 * np.log10(h)
               - (24.37 - 3.7 * (h / h_bs_m) ** 2) * np.log10(h_bs_m)
               + (43.42 - 3.1 * np.log10(h_bs_m)) * (logd - 3.0)
               + 20.0 * logf
               - (3.2 * np.log10(11.75 * h_ue_m) ** 2 - 4.97))

    out = np.where(np.asarray(los, dtype=bool), pl_los, pl_nlos)
    return out if out.ndim else float(out)


def free_space_pathloss(d_m, carrier_hz):
    """Free-space pathloss 20*log10(4*pi*d*f/c) in dB."""
    d = np.asarray(d_m, dtype=float)
    if np.any(d <= 0):
        raise DomainError("free-space pathloss needs a positive distance")
    out = 20.0 * np.log10(4.0 * np.pi * d * carrier_hz / SPEED_OF_LIGHT)
    return out if out.ndim else float(out)


def sector_gain(bearing_rad, azimuth_rad):
    """Relative sector-antenna gain in dB for a ray leaving at ``azimuth_rad``.

    Parabolic roll-off: 0 dB at boresight, -3 dB at +-HPBW/2, floored at
    -SECTOR_FLOOR_DB everywhere behind.
    """
    delta = np.asarray(azimuth_rad, dtype=float) - np.asarray(bearing_rad, dtype=float)
    delta = np.mod(delta + np.pi, 2.0 * np.pi) - np.pi
    delta_deg = np.degrees(delta)
    att = np.minimum(12.0 * (delta_deg / SECTOR_HPBW_DEG) ** 2, SECTOR_FLOOR_DB)
    out = -att
    return out if out.ndim else float(out)


def bs_to_bs_gain(pos_i, pos_j, carrier_hz) -> LinkGain:
    """Large-scale gain between two above-rooftop BS sites (free-space LOS)."""
    pos_i = np.asarray(pos_i, dtype=float)
    pos_j = np.asarray(pos_j, dtype=float)
    d = float(np.hypot(*(pos_i - pos_j)))
    if d <= 0.0:
        raise DomainError("bs_to_bs_gain needs two distinct sites")
    return LinkGain(pathloss_db=free_space_pathloss(d, carrier_hz), los=True)


def ue_to_ue_pathloss(d_2d_m, carrier_hz, ue_height_m, extra_loss_db=6.0):
    """Street-level UE-to-UE pathloss: NLOS curve at UE heights + extra loss.

    The NLOS formula is evaluated outside its nominal height range, which
    yields very deep isolation -- intentionally pessimistic for UE pairs.
    Distances are clamped up to the formula's 35 m floor because two UEs may
    drop arbitrarily close to each other.
    """
    d = np.maximum(np.asarray(d_2d_m, dtype=float), MIN_LINK_DISTANCE_M)
    out = pathloss_uma(d, carrier_hz, ue_height_m, ue_height_m, los=False) + extra_loss_db
    return out if np.ndim(out) else float(out)


def draw_fading(n_rx: int, n_tx: int, spec: FadingSpec,
                rng: np.random.Generator, size=()) -> np.ndarray:
    """Draw one (or ``size`` stacked) fading matrix with unit power per entry.

    RAYLEIGH: i.i.d. CN(0,1).  RICIAN: deterministic rank-one all-ones LOS
    component carrying K/(K+1) of the power plus a scattered CN part.
    """
    shape = tuple(size) + (n_rx, n_tx)
    if spec.kind is FadingKind.RAYLEIGH:
        return complex_normal(rng, shape)
    if spec.kind is FadingKind.RICIAN:
        k_lin = 10.0 ** (spec.rician_k_db / 10.0)
        los = np.ones(shape, dtype=complex)
        scat = complex_normal(rng, shape)
        return np.sqrt(k_lin / (k_lin + 1.0)) * los + np.sqrt(1.0 / (k_lin + 1.0)) * scat
    raise ValueError(f"unknown fading kind {spec.kind}")
