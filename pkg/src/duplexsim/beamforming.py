"""Transmit precoding and receive combining.

The interference-nulling receive combiner is deliberately cheap: the victim
BS projects its matched-filter direction onto the orthogonal complement of
the span of the effective interfering directions (each one is the BS-to-BS
channel times the interferer's own transmit precoder) and renormalizes.
With M antennas at most M-1 directions can be nulled while leaving a
dimension for the desired signal.
"""

from __future__ import annotations

import numpy as np

from .config import ConfigurationError

RANK_TOL = 1e-10


class DegenerateChannelError(RuntimeError):
    """Effective channel is rank deficient; the slot is treated as outage."""


class DesiredNulledError(RuntimeError):
    """Desired direction lies (numerically) inside the nulled subspace."""


def zf_precoder(h_effective: np.ndarray) -> np.ndarray:
    """Zero-forcing precoder: normalized columns of the right pseudo-inverse.

    ``h_effective`` has one row per stream and one column per TX antenna.
    Returns a (n_tx, n_streams) matrix with unit-norm columns such that
    ``h_effective @ W`` is diagonal with positive-real diagonal.
    """
    h = np.asarray(h_effective, dtype=complex)
    if h.ndim != 2:
        raise ValueError("h_effective must be a 2-D (streams x antennas) array")
    s = np.linalg.svd(h, compute_uv=False)
    if s[0] == 0.0 or s[-1] < RANK_TOL * s[0]:
        raise DegenerateChannelError(
            f"effective channel is rank deficient (sv ratio "
            f"{0.0 if s[0] == 0.0 else s[-1] / s[0]:.2e})")
    w = np.linalg.pinv(h)
    norms = np.linalg.norm(w, axis=0)
    w = w / norms
    # pinv makes h @ w_raw the identity, so the diagonal of h @ w is
    # 1/norm > 0: the positive-real phase convention holds by construction.
    return w


def orthonormal_basis(dirs: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``dirs`` (SVD, rank-safe)."""
    if dirs.size == 0:
        return np.zeros((dirs.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(dirs, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((dirs.shape[0], 0), dtype=complex)
    return u[:, s > tol * s[0]]


def bsint_combiner(h_desired: np.ndarray, interferer_dirs) -> np.ndarray:
    """Receive combiner that nulls the given directions.

    Projects the desired (matched-filter) direction onto the orthogonal
    complement of span(interferer_dirs) and normalizes.  ``interferer_dirs``
    is an (M, K) array or a list of M-vectors; K may be 0, in which case the
    plain matched filter is returned.
    """
    h = np.asarray(h_desired, dtype=complex).ravel()
    m = h.size
    if isinstance(interferer_dirs, (list, tuple)):
        dirs = (np.stack([np.asarray(d, dtype=complex).ravel() for d in interferer_dirs],
                         axis=1) if interferer_dirs else np.zeros((m, 0), dtype=complex))
    else:
        dirs = np.asarray(interferer_dirs, dtype=complex)
        if dirs.ndim == 1:
            dirs = dirs[:, None]
    if dirs.shape[0] != m:
        raise ValueError("interferer_dirs rows must match the antenna count")
    if dirs.shape[1] > m - 1:
        raise ConfigurationError(
            f"cannot null {dirs.shape[1]} directions with {m} antennas "
            f"(at most {m - 1})")
    hnorm = np.linalg.norm(h)
    if hnorm == 0.0:
        raise DegenerateChannelError("desired direction has zero norm")
    if dirs.shape[1] == 0:
        return h / hnorm
    q = orthonormal_basis(dirs)
    v = h - q @ (q.conj().T @ h)
    vnorm = np.linalg.norm(v)
    if vnorm <= RANK_TOL * hnorm:
        raise DesiredNulledError(
            "desired direction lies in the nulled subspace")
    return v / vnorm


def select_null_targets(candidate_cells, candidate_powers, n_nulls: int):
    """Pick the cells to null: strongest matched-filter interference first.

    Ties break toward the lower cell index.  Returns at most ``n_nulls``
    cell indices, in selection order.
    """
    if n_nulls < 0:
        raise ValueError("n_nulls must be non-negative")
    order = sorted(range(len(candidate_cells)),
                   key=lambda i: (-candidate_powers[i], candidate_cells[i]))
    return [candidate_cells[i] for i in order[:n_nulls]]


def equal_power_allocation(total_power_w: float, n_streams: int) -> np.ndarray:
    """Split a power budget equally across streams."""
    if n_streams <= 0:
        raise ValueError("n_streams must be positive")
    if total_power_w < 0:
        raise ValueError("total_power_w must be non-negative")
    return np.full(n_streams, total_power_w / n_streams)
