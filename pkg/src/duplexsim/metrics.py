"""Aggregation of report streams into CDFs, percentiles and relative gains.

All aggregations first sort the report stream by its (drop, slot, cell,
link direction, stream) key, so results are bit-identical no matter how the
rows were produced or merged (single worker, many workers, shuffled).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

UL = "UL"
DL = "DL"


class EmpiricalCdf:
    """Empirical distribution of a sample set.

    ``quantile`` uses linear interpolation between order statistics (the
    type-7 convention), which makes every reported percentile reproducible
    from the raw samples alone.
    """

    def __init__(self, samples):
        arr = np.asarray(samples, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("EmpiricalCdf needs at least one sample")
        self._samples = np.sort(arr)

    @property
    def samples(self) -> np.ndarray:
        return self._samples

    def __len__(self):
        return self._samples.size

    def quantile(self, p):
        return np.quantile(self._samples, p)

    def evaluate(self, x):
        """P(X <= x), evaluated against the stored samples."""
        ranks = np.searchsorted(self._samples, np.asarray(x, dtype=float),
                                side="right")
        return ranks / self._samples.size

    def table(self) -> np.ndarray:
        """(n, 2) plot-ready array: sorted value, cumulative probability."""
        n = self._samples.size
        return np.column_stack([self._samples, np.arange(1, n + 1) / n])

    def write(self, path, header: str | None = None):
        """Two-column text file (value, cumulative probability)."""
        with open(path, "w") as fh:
            if header:
                for line in header.splitlines():
                    fh.write(f"# {line}\n")
            fh.write("# value cumulative_probability\n")
            for v, p in self.table():
                fh.write(f"{float(v)!r} {float(p)!r}\n")


def percentile(cdf, p):
    """Type-7 quantile of a CDF or raw sample array; ``p`` is a fraction."""
    if isinstance(cdf, EmpiricalCdf):
        return cdf.quantile(p)
    return np.quantile(np.sort(np.asarray(cdf, dtype=float).ravel()), p)


def relative_gain(cdf_a, cdf_b, p) -> float:
    """Percent gain of a over b at quantile p: (q_a - q_b) / q_b * 100."""
    qa = percentile(cdf_a, p)
    qb = percentile(cdf_b, p)
    if qb == 0.0:
        raise ZeroDivisionError("baseline quantile is zero")
    return (qa - qb) / qb * 100.0


@dataclass
class GainTable:
    """Relative gains between algorithm variants at chosen percentiles."""
    rows: list = field(default_factory=list)

    @classmethod
    def from_cdfs(cls, metric: str, cdfs: dict, percentiles=(0.05, 0.5, 0.95),
                  pairs=None) -> "GainTable":
        """Tabulate gains for variant pairs (default: all ordered pairs)."""
        labels = list(cdfs)
        if pairs is None:
            pairs = [(a, b) for a in labels for b in labels if a != b]
        table = cls()
        for a, b in pairs:
            for p in percentiles:
                try:
                    gain = float(relative_gain(cdfs[a], cdfs[b], p))
                except ZeroDivisionError:
                    gain = None          # undefined: baseline quantile is zero
                table.rows.append({
                    "metric": metric, "mode_a": a, "mode_b": b,
                    "percentile": float(p), "relative_gain_percent": gain,
                })
        return table

    def lookup(self, metric: str, mode_a: str, mode_b: str, p: float) -> float:
        for r in self.rows:
            if (r["metric"] == metric and r["mode_a"] == mode_a
                    and r["mode_b"] == mode_b and r["percentile"] == p):
                return r["relative_gain_percent"]
        raise KeyError((metric, mode_a, mode_b, p))

    def to_json(self, metadata: dict | None = None) -> str:
        doc = {"gains": self.rows}
        if metadata:
            doc["metadata"] = metadata
        return json.dumps(doc, indent=2, sort_keys=True)

    def write(self, path, metadata: dict | None = None):
        with open(path, "w") as fh:
            fh.write(self.to_json(metadata) + "\n")


# ---------------------------------------------------------------------------
# sample constructors over report streams

_DIR_ORDER = {UL: 0, DL: 1}


def sort_reports(reports: np.ndarray) -> np.ndarray:
    """Canonical report order; makes every aggregate permutation-invariant."""
    dir_code = np.array([_DIR_ORDER[d] for d in reports["link_dir"]], dtype=np.int8)
    order = np.lexsort((reports["stream"], dir_code, reports["cell"],
                        reports["slot"], reports["drop"]))
    return reports[order]


def _direction_mask(reports, direction):
    if direction is None:
        return np.ones(len(reports), dtype=bool)
    return reports["link_dir"] == direction


def slot_sum_samples(reports: np.ndarray, n_drops: int, n_slots: int,
                     direction: str | None = None) -> np.ndarray:
    """Network throughput summed per slot; slots with no service count as 0."""
    reports = sort_reports(reports)
    keep = _direction_mask(reports, direction)
    sums = np.zeros(n_drops * n_slots)
    idx = reports["drop"][keep] * n_slots + reports["slot"][keep]
    np.add.at(sums, idx, reports["throughput_bps"][keep])
    return sums


def link_samples(reports: np.ndarray, direction: str | None = None) -> np.ndarray:
    """Throughput of each scheduled link in each slot (streams summed)."""
    reports = sort_reports(reports)
    reports = reports[_direction_mask(reports, direction)]
    if len(reports) == 0:
        return np.zeros(0)
    dir_code = np.array([_DIR_ORDER[d] for d in reports["link_dir"]], dtype=np.int64)
    key = ((reports["drop"].astype(np.int64) * 2 + dir_code)
           * (reports["slot"].max() + 1) + reports["slot"]) \
        * (reports["cell"].max() + 1) + reports["cell"]
    _, inverse = np.unique(key, return_inverse=True)
    out = np.zeros(inverse.max() + 1)
    np.add.at(out, inverse, reports["throughput_bps"])
    return out


def user_average_samples(reports: np.ndarray,
                         direction: str | None = None) -> np.ndarray:
    """Long-run average throughput per (drop, user, direction).

    The average is over the slots in which the user was actually scheduled,
    with that link's streams summed first.
    """
    reports = sort_reports(reports)
    reports = reports[_direction_mask(reports, direction)]
    reports = reports[reports["user"] >= 0]
    if len(reports) == 0:
        return np.zeros(0)
    dir_code = np.array([_DIR_ORDER[d] for d in reports["link_dir"]], dtype=np.int64)
    n_users = reports["user"].max() + 1
    n_slots = reports["slot"].max() + 1
    user_key = (reports["drop"].astype(np.int64) * 2 + dir_code) * n_users \
        + reports["user"]
    slot_key = user_key * n_slots + reports["slot"]
    _, inv_user = np.unique(user_key, return_inverse=True)
    totals = np.zeros(inv_user.max() + 1)
    np.add.at(totals, inv_user, reports["throughput_bps"])
    # scheduled-slot counts: distinct slot keys per user key
    uniq_slots, first = np.unique(slot_key, return_index=True)
    counts = np.zeros_like(totals)
    np.add.at(counts, inv_user[first], 1.0)
    return totals / counts


def interference_medians(reports: np.ndarray, direction: str = UL) -> dict:
    """Median received power of each ledger class at the given receivers."""
    rows = sort_reports(reports)
    rows = rows[_direction_mask(rows, direction)]
    out = {}
    for name in ("desired_w", "noise_w", "si_w", "bs2bs_w", "ue2ue_intra_w",
                 "ue2ue_inter_w", "codir_w"):
        out[name] = float(np.median(rows[name])) if len(rows) else float("nan")
    return out
