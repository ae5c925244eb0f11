"""Traffic activity and per-slot scheduling.

Queueing is reduced to calibrated Bernoulli activity: each cell is busy in a
slot with probability equal to the target utilization, with independent UL
and DL demand whose rates keep the DL:UL activity ratio at the configured
load ratio.  One UL and one DL user are picked round-robin per cell; the
duplexing mode then decides who actually transmits and on how much spectrum:

* HD-FDD serves UL and DL on separate half bands,
* dynamic TDD picks a single direction for the whole band (DL-biased coin
  when both have traffic),
* full duplex serves one UL and one DL user on the full band at once
  (users themselves stay half duplex).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .config import ConfigurationError, DuplexMode, ScenarioConfig


class Direction(enum.IntEnum):
    IDLE = 0
    UL = 1
    DL = 2
    BOTH = 3


def activity_probabilities(utilization: float, dl_to_ul_ratio: float):
    """Per-slot Bernoulli rates (p_ul, p_dl) hitting the busy-probability target.

    Solves r*p^2 - (1+r)*p + U = 0 so that 1-(1-p_ul)(1-p_dl) = U with
    p_dl = r * p_ul.  Full load is the corner case where both directions are
    always active.
    """
    u, r = float(utilization), float(dl_to_ul_ratio)
    if not 0.0 <= u <= 1.0:
        raise ConfigurationError(f"utilization must be in [0, 1], got {u}")
    if r <= 0.0:
        raise ConfigurationError(f"dl_to_ul_ratio must be positive, got {r}")
    if u == 0.0:
        return 0.0, 0.0
    if u >= 1.0:
        return 1.0, 1.0
    disc = (1.0 + r) ** 2 - 4.0 * r * u
    p_ul = ((1.0 + r) - np.sqrt(disc)) / (2.0 * r)
    return float(p_ul), float(r * p_ul)


def sample_activity(n_cells: int, p_ul: float, p_dl: float,
                    rng: np.random.Generator):
    """Draw independent UL/DL pending flags for every cell."""
    u = rng.uniform(size=(n_cells, 2))
    return u[:, 0] < p_ul, u[:, 1] < p_dl


def dtdd_direction(ul_pending: bool, dl_pending: bool, dl_to_ul_ratio: float,
                   coin: float) -> Direction:
    """Direction of a dynamic-TDD cell for one slot.

    With traffic in both directions the cell goes DL with probability
    ratio/(ratio+1); ``coin`` is a uniform draw from the direction stream.
    """
    if ul_pending and dl_pending:
        return Direction.DL if coin < dl_to_ul_ratio / (dl_to_ul_ratio + 1.0) else Direction.UL
    if dl_pending:
        return Direction.DL
    if ul_pending:
        return Direction.UL
    return Direction.IDLE


def round_robin_candidates(attached, slot: int):
    """Round-robin (ul_user, dl_user) candidate per cell; -1 when unavailable.

    The two candidates are distinct whenever the cell holds >= 2 users.
    """
    n_cells = len(attached)
    ul = np.full(n_cells, -1, dtype=int)
    dl = np.full(n_cells, -1, dtype=int)
    for c, users in enumerate(attached):
        n = len(users)
        if n == 0:
            continue
        ul[c] = users[slot % n]
        dl[c] = users[(slot + n // 2) % n]
    return ul, dl


@dataclass
class SlotAssignment:
    """Who transmits where in one slot, for one duplexing variant."""
    direction: np.ndarray       # (n_cells,) Direction codes
    ul_user: np.ndarray         # (n_cells,) user id or -1
    dl_user: np.ndarray         # (n_cells,) user id or -1
    ul_bandwidth_hz: np.ndarray  # (n_cells,) 0 where UL idle
    dl_bandwidth_hz: np.ndarray

    @property
    def ul_active(self) -> np.ndarray:
        return (self.direction == Direction.UL) | (self.direction == Direction.BOTH)

    @property
    def dl_active(self) -> np.ndarray:
        return (self.direction == Direction.DL) | (self.direction == Direction.BOTH)


def schedule_slot(cfg: ScenarioConfig, mode: DuplexMode, slot: int, attached,
                  ul_pending: np.ndarray, dl_pending: np.ndarray,
                  dtdd_coins: np.ndarray) -> SlotAssignment:
    """Map pending traffic onto served links for one duplexing mode.

    ``dtdd_coins`` comes from the dedicated direction stream so that every
    dynamic-TDD variant of a paired run takes identical decisions.
    """
    n_cells = len(attached)
    bw = cfg.system_bandwidth_hz
    direction = np.full(n_cells, Direction.IDLE, dtype=np.int8)
    ul_user, dl_user = round_robin_candidates(attached, slot)
    ul_bw = np.zeros(n_cells)
    dl_bw = np.zeros(n_cells)

    for c in range(n_cells):
        has_user = ul_user[c] >= 0
        want_ul = bool(ul_pending[c]) and has_user
        want_dl = bool(dl_pending[c]) and has_user
        if not (want_ul or want_dl):
            ul_user[c] = dl_user[c] = -1
            continue
        if mode is DuplexMode.HD_FDD:
            # UL and DL ride separate half bands; a lone user may do both
            # at once (frequency-division duplexing at the terminal).
            if want_ul and want_dl:
                direction[c] = Direction.BOTH
            elif want_ul:
                direction[c] = Direction.UL
            else:
                direction[c] = Direction.DL
            ul_bw[c] = bw / 2.0 if want_ul else 0.0
            dl_bw[c] = bw / 2.0 if want_dl else 0.0
        elif mode is DuplexMode.DTDD:
            d = dtdd_direction(want_ul, want_dl, cfg.dl_to_ul_load_ratio,
                               float(dtdd_coins[c]))
            direction[c] = d
            ul_bw[c] = bw if d == Direction.UL else 0.0
            dl_bw[c] = bw if d == Direction.DL else 0.0
        elif mode is DuplexMode.FD:
            if want_ul and want_dl and ul_user[c] != dl_user[c]:
                direction[c] = Direction.BOTH
                ul_bw[c] = dl_bw[c] = bw
            elif want_dl:
                # covers the single-user cell with two-way traffic: the
                # terminal is half duplex, DL wins
                direction[c] = Direction.DL
                dl_bw[c] = bw
            else:
                direction[c] = Direction.UL
                ul_bw[c] = bw
        else:
            raise ConfigurationError(f"unknown duplex mode {mode}")
        if direction[c] in (Direction.UL, Direction.IDLE):
            dl_user[c] = -1
        if direction[c] in (Direction.DL, Direction.IDLE):
            ul_user[c] = -1
    return SlotAssignment(direction=direction, ul_user=ul_user, dl_user=dl_user,
                          ul_bandwidth_hz=ul_bw, dl_bandwidth_hz=dl_bw)
