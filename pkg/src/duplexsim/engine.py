"""Monte-Carlo engine: per-slot interference ledger and campaign driver.

For every scheduled receiver the engine accounts each received power class
separately -- desired signal, thermal noise, residual self-interference,
BS-to-BS cross-link interference, intra- and inter-cell UE-to-UE cross-link
interference and same-direction interference -- and reports the SINR as
desired over the sum of everything else.  Keeping the classes apart is what
makes the interference-breakdown experiments possible.

Evaluation is organized so that several duplexing variants can share one
slot's channel realizations (common random numbers): all randomness is keyed
by (seed, stream, drop, slot), every channel class is drawn as one canonical
block per slot, and variants only differ in which entries they read.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import randstream
from .beamforming import (
    DegenerateChannelError,
    DesiredNulledError,
    bsint_combiner,
    equal_power_allocation,
    select_null_targets,
    zf_precoder,
)
from .channel import FadingKind, FadingSpec, draw_fading, noise_power_w
from .config import ConfigurationError, DuplexMode, ScenarioConfig
from .deployment import Deployment, deploy_drop
from .randstream import complex_normal
from .scheduler import (
    Direction,
    SlotAssignment,
    activity_probabilities,
    sample_activity,
    schedule_slot,
)

REPORT_DTYPE = np.dtype([
    ("drop", np.int32), ("slot", np.int32), ("cell", np.int32),
    ("link_dir", "U2"), ("stream", np.int16), ("user", np.int32),
    ("sinr_db", np.float64), ("throughput_bps", np.float64),
    ("desired_w", np.float64), ("noise_w", np.float64), ("si_w", np.float64),
    ("bs2bs_w", np.float64), ("ue2ue_intra_w", np.float64),
    ("ue2ue_inter_w", np.float64), ("codir_w", np.float64),
])

CSV_COLUMNS = ["drop", "slot", "cell", "link_dir", "mode", "sinr_db",
               "throughput_bps", "desired_w", "noise_w", "si_w", "bs2bs_w",
               "ue2ue_intra_w", "ue2ue_inter_w", "codir_w"]


@dataclass(frozen=True)
class Variant:
    """One algorithm under comparison: a duplexing mode + receive nulling."""
    mode: DuplexMode
    bsint_nulls: int = 0

    @property
    def label(self) -> str:
        base = {DuplexMode.HD_FDD: "hd", DuplexMode.DTDD: "dtdd",
                DuplexMode.FD: "fd"}[self.mode]
        return base if self.bsint_nulls == 0 else f"{base}-{self.bsint_nulls}bsint"


def variant_from_config(cfg: ScenarioConfig) -> Variant:
    return Variant(cfg.duplex_mode, cfg.bsint_nulls)


def paired_variants(bsint_levels=(4, 6)):
    """The standard seven-algorithm comparison set."""
    out = [Variant(DuplexMode.HD_FDD)]
    out.append(Variant(DuplexMode.DTDD))
    out += [Variant(DuplexMode.DTDD, n) for n in bsint_levels]
    out.append(Variant(DuplexMode.FD))
    out += [Variant(DuplexMode.FD, n) for n in bsint_levels]
    return out


# ---------------------------------------------------------------------------
# elementary maps

def ul_power_control(coupling_gain_linear: float, noise_w: float,
                     snr_target_db: float, p_max_w: float) -> float:
    """Open-loop UL power: hit the SNR target, saturate at the power cap."""
    if coupling_gain_linear <= 0.0 or noise_w <= 0.0:
        raise ValueError("gain and noise must be positive")
    wanted = noise_w * 10.0 ** (snr_target_db / 10.0) / coupling_gain_linear
    return min(p_max_w, wanted)


def si_residual(tx_power_w: float, si_channel: np.ndarray,
                cancellation_db: float, combiner: np.ndarray,
                precoder: np.ndarray) -> float:
    """Residual self-interference power after analog/digital cancellation."""
    coupled = abs(np.vdot(combiner, si_channel @ precoder)) ** 2
    return coupled * tx_power_w * 10.0 ** (-cancellation_db / 10.0)


def throughput(sinr_linear: float, bandwidth_hz: float,
               sinr_cap_db: float | None = None) -> float:
    """Shannon rate with an optional SINR cap at the rate map."""
    if bandwidth_hz <= 0.0:
        return 0.0
    s = sinr_linear
    if sinr_cap_db is not None:
        s = min(s, 10.0 ** (sinr_cap_db / 10.0))
    return bandwidth_hz * np.log2(1.0 + s)


def _to_db(linear: float) -> float:
    return 10.0 * np.log10(linear) if linear > 0.0 else float("-inf")


# ---------------------------------------------------------------------------
# per-slot shared state

# channel classes each mode family draws every slot (flag-independent, so
# that paired and solo runs consume identical streams)
_MODE_CLASSES = {
    DuplexMode.HD_FDD: ("bs_ue",),
    DuplexMode.DTDD: ("bs_ue", "bs_bs", "ue_ue"),
    DuplexMode.FD: ("bs_ue", "bs_bs", "ue_ue", "si"),
}

_RAYLEIGH = FadingSpec(FadingKind.RAYLEIGH)


class SlotContext:
    """Everything variants share inside one slot.

    Channel blocks are drawn lazily, one keyed stream per class, in a single
    canonical shape per slot; serving-link precoders and all effective
    interference directions are pure algebra on top and are computed once.
    """

    def __init__(self, cfg: ScenarioConfig, dep: Deployment, drop: int,
                 slot: int, collect_checksums: bool = False):
        self.cfg = cfg
        self.dep = dep
        self.drop = int(drop)
        self.slot = int(slot)
        self.nc = dep.n_cells
        self.m = cfg.bs_matrix_dim           # BS-side matrix dimension
        self.u = cfg.ue_antennas
        self.s = cfg.streams_per_ue
        self.checksums: dict | None = {} if collect_checksums else None
        self._cache: dict = {}

        p_ul, p_dl = activity_probabilities(cfg.utilization, cfg.dl_to_ul_load_ratio)
        rng = randstream.stream(cfg.seed, randstream.TRAFFIC, drop, slot)
        self.ul_pending, self.dl_pending = sample_activity(self.nc, p_ul, p_dl, rng)
        self._note("traffic", (self.ul_pending.astype(np.uint8)
                               + 2 * self.dl_pending.astype(np.uint8)))

        from .scheduler import round_robin_candidates
        self.ul_cand, self.dl_cand = round_robin_candidates(dep.attached, slot)

        # DL power split is common to every DL transmitter
        self.p_dl = equal_power_allocation(cfg.bs_tx_power_w, self.s)

    # -- bookkeeping -------------------------------------------------------

    def _note(self, name: str, arr: np.ndarray):
        if self.checksums is not None:
            prev = self.checksums.get(name, 0)
            self.checksums[name] = zlib.crc32(np.ascontiguousarray(arr).tobytes(), prev)

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def _rng(self, stream_id):
        return randstream.stream(self.cfg.seed, stream_id, self.drop, self.slot)

    # -- random draws ------------------------------------------------------

    def dtdd_coins(self) -> np.ndarray:
        def draw():
            coins = self._rng(randstream.DTDD_DIRECTION).uniform(size=self.nc)
            self._note("dtdd", coins)
            return coins
        return self._memo("dtdd", draw)

    def ensure_classes(self, mode: DuplexMode):
        for name in _MODE_CLASSES[mode]:
            getattr(self, "fading_" + name)()

    def fading_bs_ue(self) -> np.ndarray:
        """(2*nc, nc, M, U): rows 0..nc-1 UL candidates, nc..2nc-1 DL candidates."""
        def draw():
            f = draw_fading(self.m, self.u, _RAYLEIGH,
                            self._rng(randstream.FADING_BS_UE),
                            size=(2 * self.nc, self.nc))
            self._note("bs_ue", f)
            return f
        return self._memo("bs_ue", draw)

    def fading_bs_bs(self) -> np.ndarray:
        """(nc, nc, M, M): entry [i, j] is the rx-i/tx-j matrix, transpose-reciprocal."""
        def draw():
            iu = np.triu_indices(self.nc, k=1)
            blocks = draw_fading(self.m, self.m, _RAYLEIGH,
                                 self._rng(randstream.FADING_BS_BS),
                                 size=(len(iu[0]),))
            self._note("bs_bs", blocks)
            full = np.zeros((self.nc, self.nc, self.m, self.m), dtype=complex)
            full[iu] = blocks
            lo = (iu[1], iu[0])
            full[lo] = np.transpose(blocks, (0, 2, 1))
            return full
        return self._memo("bs_bs", draw)

    def fading_si(self) -> np.ndarray:
        """(nc, M, M) Rician self-interference channels."""
        def draw():
            spec = FadingSpec(FadingKind.RICIAN, self.cfg.si_rician_k_db)
            f = draw_fading(self.m, self.m, spec, self._rng(randstream.FADING_SI),
                            size=(self.nc,))
            self._note("si", f)
            return f
        return self._memo("si", draw)

    def fading_ue_ue(self) -> np.ndarray:
        """(nc, nc, U, U): [i, j] couples cell j's UL candidate into cell i's DL candidate."""
        def draw():
            f = draw_fading(self.u, self.u, _RAYLEIGH,
                            self._rng(randstream.FADING_UE_UE),
                            size=(self.nc, self.nc))
            self._note("ue_ue", f)
            return f
        return self._memo("ue_ue", draw)

    # -- amplitude (sqrt linear gain) lookups ------------------------------

    def _amp_user_cell(self, users: np.ndarray) -> np.ndarray:
        """(nc_users, nc) amplitude of each candidate-user -> cell coupling."""
        amp = np.zeros((len(users), self.nc))
        ok = users >= 0
        if np.any(ok):
            amp[ok] = 10.0 ** (self.dep.coupling_db[users[ok]] / 20.0)
        return amp

    def amp_ul(self) -> np.ndarray:
        return self._memo("amp_ul", lambda: self._amp_user_cell(self.ul_cand))

    def amp_dl(self) -> np.ndarray:
        return self._memo("amp_dl", lambda: self._amp_user_cell(self.dl_cand))

    def amp_bs_bs(self) -> np.ndarray:
        return self._memo(
            "amp_bsbs", lambda: 10.0 ** (self.dep.cell_gain_db / 20.0))

    def amp_ue_ue(self) -> np.ndarray:
        """(nc, nc): [i, j] amplitude from cell j's UL candidate to cell i's DL candidate."""
        def build():
            amp = np.zeros((self.nc, self.nc))
            rx_ok = self.dl_cand >= 0
            tx_ok = self.ul_cand >= 0
            if np.any(rx_ok) and np.any(tx_ok):
                g = self.dep.ue_ue_gain_db(self.dl_cand[rx_ok], self.ul_cand[tx_ok])
                amp[np.ix_(rx_ok, tx_ok)] = 10.0 ** (g / 20.0)
            return amp
        return self._memo("amp_ueue", build)

    # -- serving-link beamforming (shared by all variants) -----------------

    def serving(self):
        """Per-cell serving precoders/combiners.

        Returns dict with arrays (zero rows for cells without users):
          w_ue (nc, U, S)  UE transmit precoder,
          w_dl (nc, M, S)  BS transmit precoder,
          u_dl (nc, U, S)  UE receive combiner,
          outage (nc,) bool.
        Square effective links (S == U == M) use plain zero forcing at the
        transmitter; tall arrays use the dominant singular modes with a
        zero-forcing precoder on the combined effective row.
        """
        def build():
            nc, m, u, s = self.nc, self.m, self.u, self.s
            f = self.fading_bs_ue()
            w_ue = np.zeros((nc, u, s), dtype=complex)
            w_dl = np.zeros((nc, m, s), dtype=complex)
            u_dl = np.zeros((nc, u, s), dtype=complex)
            outage = np.zeros(nc, dtype=bool)
            a_ul, a_dl = self.amp_ul(), self.amp_dl()
            for c in range(nc):
                try:
                    if self.ul_cand[c] >= 0:
                        h_ul = a_ul[c, c] * f[c, c]              # (M, U)
                        if s == u and u == m:
                            w_ue[c] = zf_precoder(h_ul)
                        else:
                            _, sv, vh = np.linalg.svd(h_ul, full_matrices=False)
                            if sv[0] <= 0.0:
                                raise DegenerateChannelError("zero UL channel")
                            w_ue[c] = vh.conj().T[:, :s]
                    if self.dl_cand[c] >= 0:
                        h_dl = (a_dl[c, c] * f[nc + c, c]).T     # (U, M)
                        if s == u and u == m:
                            w_dl[c] = zf_precoder(h_dl)
                            u_dl[c] = np.eye(u, s, dtype=complex)
                        else:
                            uu, sv, _ = np.linalg.svd(h_dl, full_matrices=False)
                            if sv[0] <= 0.0:
                                raise DegenerateChannelError("zero DL channel")
                            u_dl[c] = uu[:, :s]
                            w_dl[c] = zf_precoder(u_dl[c].conj().T @ h_dl)
                except DegenerateChannelError:
                    outage[c] = True
                    w_ue[c] = 0.0
                    w_dl[c] = 0.0
                    u_dl[c] = 0.0
            return {"w_ue": w_ue, "w_dl": w_dl, "u_dl": u_dl, "outage": outage}
        return self._memo("serving", build)

    # -- effective interference directions (shared) ------------------------

    def ul_dirs(self) -> np.ndarray:
        """(nc victim, nc tx, M, S): cell j's UL user as seen by BS i.

        The diagonal [c, c] is the desired matched-filter direction of cell c.
        """
        def build():
            f = self.fading_bs_ue()[:self.nc]                    # (nc, nc, M, U)
            amped = f * self.amp_ul()[:, :, None, None]
            return np.einsum("jimu,jus->ijms", amped, self.serving()["w_ue"],
                             optimize=True)
        return self._memo("ul_dirs", build)

    def bs_bs_dirs(self) -> np.ndarray:
        """(nc victim, nc tx, M, S): DL precoder of cell j through the BS-BS channel."""
        def build():
            h = self.fading_bs_bs() * self.amp_bs_bs()[:, :, None, None]
            d = np.einsum("ijmn,jns->ijms", h, self.serving()["w_dl"],
                          optimize=True)
            idx = np.arange(self.nc)
            d[idx, idx] = 0.0
            return d
        return self._memo("bsbs_dirs", build)

    def bs_bs_dirs_estimated(self) -> np.ndarray:
        """Null-target directions: true dirs plus optional estimation error."""
        def build():
            d = self.bs_bs_dirs()
            if self.cfg.csi_error_db is None:
                return d
            eps = 10.0 ** (self.cfg.csi_error_db / 10.0)
            rng = self._rng(randstream.CSI_ERROR)
            noise = complex_normal(rng, d.shape)
            self._note("csi", noise)
            scale = np.sqrt(eps * np.mean(np.abs(d) ** 2, axis=2, keepdims=True))
            return d + noise * scale
        return self._memo("bsbs_dirs_est", build)

    def si_dirs(self) -> np.ndarray:
        """(nc, M, S): own DL precoder through the (lossy) SI channel."""
        def build():
            amp = 10.0 ** (-self.cfg.si_channel_loss_db / 20.0)
            return np.einsum("cmn,cns->cms", self.fading_si() * amp,
                             self.serving()["w_dl"], optimize=True)
        return self._memo("si_dirs", build)

    def dl_dirs(self) -> np.ndarray:
        """(nc victim, nc tx, U, S): BS j's DL beam at cell i's DL candidate.

        Diagonal = desired DL direction.  Uses the transpose of the uplink
        orientation (large-scale reciprocity extended to fading).
        """
        def build():
            f = self.fading_bs_ue()[self.nc:]                    # (nc, nc, M, U)
            amped = f * self.amp_dl()[:, :, None, None]
            # channel BS j -> DL user of cell i is amped[i, j].T: (U, M)
            d = np.einsum("ijmu,jms->ijus", amped, self.serving()["w_dl"],
                          optimize=True)
            return d
        return self._memo("dl_dirs", build)

    def ue_ue_dirs(self) -> np.ndarray:
        """(nc victim, nc tx, U, S): UL precoder of cell j's user at cell i's DL user."""
        def build():
            h = self.fading_ue_ue() * self.amp_ue_ue()[:, :, None, None]
            return np.einsum("ijuv,jvs->ijus", h, self.serving()["w_ue"],
                             optimize=True)
        return self._memo("ueue_dirs", build)

    def mf_rank_power(self) -> np.ndarray:
        """(nc victim, nc tx): matched-filter received power of each DL interferer."""
        def build():
            des = self.ul_dirs()[np.arange(self.nc), np.arange(self.nc)]  # (nc, M, S)
            norms = np.linalg.norm(des, axis=1, keepdims=True)
            mf = np.divide(des, norms, out=np.zeros_like(des), where=norms > 0)
            d_est = self.bs_bs_dirs_estimated()
            t = np.einsum("imk,ijms->ijks", mf.conj(), d_est, optimize=True)
            return np.einsum("ijks,s->ij", np.abs(t) ** 2, self.p_dl,
                             optimize=True)
        return self._memo("mf_rank", build)


# ---------------------------------------------------------------------------
# per-variant evaluation

@dataclass
class VariantSlotState:
    """Combiners and transmit powers of one variant in one slot."""
    assignment: SlotAssignment
    v_ul: np.ndarray            # (nc, M, S) UL combiners (zero when idle)
    p_ul: np.ndarray            # (nc, S) UL stream powers
    null_targets: list          # per cell: tuple of nulled cell indices
    ul_outage: np.ndarray       # (nc,) bool
    cross_direction: bool = True  # False on HD-FDD: UL/DL bands are disjoint


def _variant_assignment(ctx: SlotContext, variant: Variant) -> SlotAssignment:
    coins = ctx.dtdd_coins() if variant.mode is DuplexMode.DTDD else np.zeros(ctx.nc)
    assign = schedule_slot(ctx.cfg, variant.mode, ctx.slot, ctx.dep.attached,
                           ctx.ul_pending, ctx.dl_pending, coins)
    # cells whose serving beamforming degenerated are dropped from service
    out = ctx.serving()["outage"]
    if np.any(out):
        for c in np.flatnonzero(out):
            assign.direction[c] = Direction.IDLE
            assign.ul_user[c] = assign.dl_user[c] = -1
            assign.ul_bandwidth_hz[c] = assign.dl_bandwidth_hz[c] = 0.0
    return assign


def _uplink_state(ctx: SlotContext, variant: Variant,
                  assign: SlotAssignment) -> VariantSlotState:
    """Build UL combiners and run power control for every UL-active cell."""
    cfg = ctx.cfg
    nc, m, s = ctx.nc, ctx.m, ctx.s
    v_ul = np.zeros((nc, m, s), dtype=complex)
    p_ul = np.zeros((nc, s))
    null_targets = [()] * nc
    ul_outage = np.zeros(nc, dtype=bool)
    ul_active = assign.ul_active
    dl_active = assign.dl_active
    des_all = ctx.ul_dirs()
    # on HD-FDD the DL band cannot leak into the UL receiver, so there is
    # nothing to null regardless of the configured level
    n_nulls = 0 if variant.mode is DuplexMode.HD_FDD else variant.bsint_nulls
    d_est = ctx.bs_bs_dirs_estimated() if n_nulls > 0 else None
    rank = ctx.mf_rank_power() if n_nulls > 0 else None

    for c in np.flatnonzero(ul_active):
        des = des_all[c, c]                                     # (M, S)
        sel: tuple = ()
        if n_nulls > 0:
            cands = [j for j in np.flatnonzero(dl_active) if j != c]
            if cands:
                sel = tuple(select_null_targets(
                    cands, [rank[c, j] for j in cands], n_nulls))
        null_targets[c] = sel
        noise = noise_power_w(assign.ul_bandwidth_hz[c], cfg.noise_figure_db)
        try:
            for k in range(s):
                dirs = [des[:, mm] for mm in range(s) if mm != k]
                for j in sel:
                    dirs.extend(d_est[c, j, :, mm] for mm in range(s))
                if len(dirs) > m - 1:
                    raise ConfigurationError(
                        f"nulling {len(dirs)} directions needs more than "
                        f"{m} antennas")
                v = bsint_combiner(des[:, k], dirs)
                v_ul[c, :, k] = v
                g_eff = abs(np.vdot(v, des[:, k])) ** 2
                p_ul[c, k] = ul_power_control(g_eff, noise, cfg.ul_snr_target_db,
                                              cfg.ue_max_power_w)
            total = p_ul[c].sum()
            if total > cfg.ue_max_power_w:
                p_ul[c] *= cfg.ue_max_power_w / total
        except (DegenerateChannelError, DesiredNulledError):
            ul_outage[c] = True
            v_ul[c] = 0.0
            p_ul[c] = 0.0
    return VariantSlotState(assignment=assign, v_ul=v_ul, p_ul=p_ul,
                            null_targets=null_targets, ul_outage=ul_outage,
                            cross_direction=variant.mode is not DuplexMode.HD_FDD)


def receiver_report_ul(ctx: SlotContext, state: VariantSlotState, c: int):
    """Ledger rows for the UL receiver of cell ``c`` (one per stream)."""
    cfg = ctx.cfg
    assign = state.assignment
    noise = noise_power_w(assign.ul_bandwidth_hz[c], cfg.noise_figure_db)
    rows = []
    if state.ul_outage[c]:
        for k in range(ctx.s):
            rows.append((ctx.drop, ctx.slot, c, "UL", k, assign.ul_user[c],
                         float("-inf"), 0.0, 0.0, noise, 0.0, 0.0, 0.0, 0.0, 0.0))
        return rows

    dl_active = assign.dl_active
    ul_active = assign.ul_active
    cli_att = 10.0 ** (-cfg.cli_suppression_db / 10.0)
    si_att = 10.0 ** (-cfg.si_cancellation_db / 10.0)
    des = ctx.ul_dirs()[c, c]
    v = state.v_ul[c]                                           # (M, S)

    others_ul = [j for j in np.flatnonzero(ul_active) if j != c]
    if state.cross_direction:
        others_dl = [j for j in np.flatnonzero(dl_active) if j != c]
        own_dl = bool(dl_active[c])
    else:
        others_dl, own_dl = [], False

    for k in range(ctx.s):
        vk = v[:, k]
        desired = abs(np.vdot(vk, des[:, k])) ** 2 * state.p_ul[c, k]

        codir = 0.0
        for j in others_ul:
            contrib = np.abs(vk.conj() @ ctx.ul_dirs()[c, j]) ** 2   # (S,)
            codir += float(contrib @ state.p_ul[j])

        bs2bs = 0.0
        if others_dl:
            d = ctx.bs_bs_dirs()[c, others_dl]                  # (n, M, S)
            contrib = np.abs(np.einsum("m,jms->js", vk.conj(), d)) ** 2
            bs2bs = float((contrib @ ctx.p_dl).sum()) * cli_att

        si_w = 0.0
        if own_dl:
            sd = ctx.si_dirs()[c]                               # (M, S)
            si_w = float((np.abs(vk.conj() @ sd) ** 2 @ ctx.p_dl)) * si_att

        total_int = noise + si_w + bs2bs + codir
        sinr = desired / total_int if total_int > 0 else 0.0
        thr = throughput(sinr, assign.ul_bandwidth_hz[c], sinr_cap_db=None)
        rows.append((ctx.drop, ctx.slot, c, "UL", k, assign.ul_user[c],
                     _to_db(sinr), thr, desired, noise, si_w, bs2bs, 0.0, 0.0,
                     codir))
    return rows


def receiver_report_dl(ctx: SlotContext, state: VariantSlotState, c: int):
    """Ledger rows for the DL receiver (served UE) of cell ``c``."""
    cfg = ctx.cfg
    assign = state.assignment
    noise = noise_power_w(assign.dl_bandwidth_hz[c], cfg.ue_noise_figure_db)
    dl_active = assign.dl_active
    ul_active = assign.ul_active
    u_dl = ctx.serving()["u_dl"][c]                             # (U, S)
    des_dir = ctx.dl_dirs()[c, c]                               # (U, S)

    others_dl = [j for j in np.flatnonzero(dl_active) if j != c]
    if state.cross_direction:
        others_ul = [j for j in np.flatnonzero(ul_active) if j != c]
        own_ul = bool(ul_active[c])
    else:
        others_ul, own_ul = [], False

    rows = []
    for k in range(ctx.s):
        uk = u_dl[:, k]
        desired = abs(np.vdot(uk, des_dir[:, k])) ** 2 * ctx.p_dl[k]

        codir = 0.0
        if others_dl:
            d = ctx.dl_dirs()[c, others_dl]
            contrib = np.abs(np.einsum("u,jus->js", uk.conj(), d)) ** 2
            codir = float((contrib @ ctx.p_dl).sum())
        # streams of the own BS other than k also land here (non-ZF residue)
        own = np.abs(uk.conj() @ des_dir) ** 2
        codir += float(sum(own[mm] * ctx.p_dl[mm] for mm in range(ctx.s) if mm != k))

        ue_intra = 0.0
        if own_ul:
            g = ctx.ue_ue_dirs()[c, c]
            ue_intra = float((np.abs(uk.conj() @ g) ** 2) @ state.p_ul[c])

        ue_inter = 0.0
        for j in others_ul:
            g = ctx.ue_ue_dirs()[c, j]
            ue_inter += float((np.abs(uk.conj() @ g) ** 2) @ state.p_ul[j])

        total_int = noise + codir + ue_intra + ue_inter
        sinr = desired / total_int if total_int > 0 else 0.0
        thr = throughput(sinr, assign.dl_bandwidth_hz[c], cfg.dl_sinr_cap_db)
        rows.append((ctx.drop, ctx.slot, c, "DL", k, assign.dl_user[c],
                     _to_db(sinr), thr, desired, noise, 0.0, 0.0, ue_intra,
                     ue_inter, codir))
    return rows


def evaluate_variant(ctx: SlotContext, variant: Variant):
    """All report rows of one variant for the context's slot."""
    ctx.ensure_classes(variant.mode)
    if variant.mode is DuplexMode.DTDD:
        ctx.dtdd_coins()
    assign = _variant_assignment(ctx, variant)
    state = _uplink_state(ctx, variant, assign)
    rows = []
    for c in range(ctx.nc):
        if assign.ul_active[c]:
            rows.extend(receiver_report_ul(ctx, state, c))
    for c in range(ctx.nc):
        if assign.dl_active[c]:
            rows.extend(receiver_report_dl(ctx, state, c))
    return rows, state


def simulate_slot(cfg: ScenarioConfig, dep: Deployment, drop: int, slot: int,
                  variants, collect_checksums: bool = False,
                  return_context: bool = False):
    """Evaluate every variant on one slot under shared channel realizations."""
    ctx = SlotContext(cfg, dep, drop, slot, collect_checksums=collect_checksums)
    out = {}
    for variant in variants:
        rows, _ = evaluate_variant(ctx, variant)
        out[variant.label] = rows
    return (out, ctx) if return_context else out


# ---------------------------------------------------------------------------
# campaign driver

@dataclass
class CampaignResult:
    config: ScenarioConfig
    n_drops: int
    n_slots: int
    reports: dict                        # label -> structured array
    stream_checksums: dict = field(default_factory=dict)

    def labels(self):
        return list(self.reports)


def _simulate_drop(cfg: ScenarioConfig, drop: int, n_slots: int, variants,
                   collect_checksums: bool):
    dep = deploy_drop(cfg, drop)
    rows = {v.label: [] for v in variants}
    checks: dict = {}
    for slot in range(n_slots):
        ctx = SlotContext(cfg, dep, drop, slot, collect_checksums=collect_checksums)
        for v in variants:
            r, _ = evaluate_variant(ctx, v)
            rows[v.label].extend(r)
        if collect_checksums:
            for name, crc in ctx.checksums.items():
                checks[name] = zlib.crc32(crc.to_bytes(8, "big"),
                                          checks.get(name, 0))
    arrays = {label: np.array(r, dtype=REPORT_DTYPE) for label, r in rows.items()}
    return drop, arrays, checks


def run_campaign(cfg: ScenarioConfig, n_drops: int, n_slots: int,
                 variants=None, workers: int = 1,
                 collect_checksums: bool = False) -> CampaignResult:
    """Run drops x slots for one or more variants under common randomness.

    Results are bit-identical for any ``workers`` because all randomness is
    keyed, not sequential; drops are merged in index order.
    """
    if n_drops <= 0 or n_slots <= 0:
        raise ConfigurationError("n_drops and n_slots must be positive")
    if variants is None:
        variants = [variant_from_config(cfg)]
    variants = list(variants)
    labels = [v.label for v in variants]
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"duplicate variant labels: {labels}")
    for v in variants:
        if v.mode is not DuplexMode.HD_FDD and v.bsint_nulls > 0:
            need = v.bsint_nulls * cfg.streams_per_ue + cfg.streams_per_ue - 1
            if need > cfg.bs_matrix_dim - 1:
                raise ConfigurationError(
                    f"variant {v.label!r} needs {need} nulled directions but "
                    f"the receive combiner has only {cfg.bs_matrix_dim} "
                    f"dimensions")

    per_drop: dict = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_simulate_drop, cfg, d, n_slots, variants,
                                collect_checksums) for d in range(n_drops)]
            for f in futs:
                drop, arrays, checks = f.result()
                per_drop[drop] = (arrays, checks)
    else:
        for d in range(n_drops):
            drop, arrays, checks = _simulate_drop(cfg, d, n_slots, variants,
                                                  collect_checksums)
            per_drop[drop] = (arrays, checks)

    reports = {}
    for label in labels:
        parts = [per_drop[d][0][label] for d in range(n_drops)]
        reports[label] = (np.concatenate(parts) if parts
                          else np.zeros(0, dtype=REPORT_DTYPE))
    checksums: dict = {}
    if collect_checksums:
        merged: dict = {}
        for d in range(n_drops):
            for name, crc in per_drop[d][1].items():
                merged[name] = zlib.crc32(crc.to_bytes(8, "big"),
                                          merged.get(name, 0))
        checksums = merged
    return CampaignResult(config=cfg, n_drops=n_drops, n_slots=n_slots,
                          reports=reports, stream_checksums=checksums)


# ---------------------------------------------------------------------------
# serialization

def format_float(x: float) -> str:
    return repr(float(x))


def write_reports_csv(path, reports: np.ndarray, mode_label: str,
                      cfg: ScenarioConfig):
    """Write one variant's reports with the resolved config as a header comment."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# config: {cfg.to_json()}\n")
        fh.write(f"# mode: {mode_label}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in reports:
            fh.write(",".join((
                str(int(r["drop"])), str(int(r["slot"])), str(int(r["cell"])),
                str(r["link_dir"]), mode_label,
                format_float(r["sinr_db"]), format_float(r["throughput_bps"]),
                format_float(r["desired_w"]), format_float(r["noise_w"]),
                format_float(r["si_w"]), format_float(r["bs2bs_w"]),
                format_float(r["ue2ue_intra_w"]), format_float(r["ue2ue_inter_w"]),
                format_float(r["codir_w"]))) + "\n")
