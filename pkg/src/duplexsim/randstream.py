"""Counter-based random streams.

Every stochastic quantity in the simulator is drawn from its own Philox
stream keyed by ``(seed, stream_id, drop[, slot])``.  Streams are therefore
independent of each other and of evaluation order: a run that never touches
the BS-to-BS fading (e.g. half-duplex) consumes nothing from the streams the
other duplexing variants use, which is what makes paired common-random-number
runs and worker-count-independent results possible.
"""

from __future__ import annotations

import numpy as np

# Stream identifiers.  Values are part of the reproducibility contract:
# changing them changes every result.
TRAFFIC = 1          # per-slot UL/DL activity flags
DTDD_DIRECTION = 2   # per-slot direction coin for dynamic TDD
FADING_BS_UE = 3     # BS <-> UE small-scale fading
FADING_BS_BS = 4     # BS <-> BS small-scale fading
FADING_SI = 5        # self-interference channel
FADING_UE_UE = 6     # UE <-> UE small-scale fading
USER_DROP = 7        # user positions (per drop)
LOS_STATE = 8        # per-link LOS coin (per drop)
CSI_ERROR = 9        # channel-estimation error (optional knob)


def stream(seed: int, stream_id: int, *counters: int) -> np.random.Generator:
    """Return the Generator for one keyed stream.

    ``counters`` is typically ``(drop,)`` or ``(drop, slot)``.  The same key
    always yields the same draws, no matter how many other streams were used
    before it.
    """
    ss = np.random.SeedSequence(entropy=int(seed),
                                spawn_key=(int(stream_id),) + tuple(int(c) for c in counters))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. CN(0, 1) samples (unit power per complex entry)."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)
