import numpy as np
import pytest

from duplexsim import (
    ConfigurationError,
    DuplexMode,
    Variant,
    paired_variants,
    preset_uma200,
    preset_uma500,
    run_campaign,
    si_residual,
    simulate_slot,
    throughput,
    ul_power_control,
    write_reports_csv,
)
from duplexsim.engine import REPORT_DTYPE, format_float


def test_ul_power_control_examples():
    assert ul_power_control(1e-11, 1e-13, 10.0, 0.2) == pytest.approx(0.1, rel=1e-12)
    # cap binds when the channel is too weak
    assert ul_power_control(1e-14, 1e-13, 10.0, 0.2) == 0.2
    with pytest.raises(ValueError):
        ul_power_control(0.0, 1e-13, 10.0, 0.2)


def test_throughput_map():
    assert throughput(10.0, 20e6) == pytest.approx(69188632.37274595, rel=1e-12)
    # cap active: SINR above 30 dB is clipped before the rate map
    assert throughput(1e6, 40e6, sinr_cap_db=30.0) == \
        pytest.approx(398689050.3534397, rel=1e-12)
    assert throughput(999.0, 40e6, sinr_cap_db=30.0) < \
        throughput(1001.0, 40e6, sinr_cap_db=30.0)
    assert throughput(5.0, 0.0) == 0.0


def test_si_residual_formula():
    rng = np.random.default_rng(0)
    m = 8
    h = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    v = np.zeros(m, dtype=complex); v[0] = 1.0
    w = np.zeros(m, dtype=complex); w[1] = 1.0
    got = si_residual(2.0, h, 20.0, v, w)
    assert got == pytest.approx(abs(h[0, 1]) ** 2 * 2.0 * 1e-2, rel=1e-12)


def test_paired_variant_labels():
    labels = [v.label for v in paired_variants()]
    assert labels == ["hd", "dtdd", "dtdd-4bsint", "dtdd-6bsint",
                      "fd", "fd-4bsint", "fd-6bsint"]


def _small_cfg(**kw):
    base = dict(n_users=40, seed=6)
    base.update(kw)
    return preset_uma200(**base)


def test_hd_has_no_cross_direction_terms():
    res = run_campaign(_small_cfg(duplex_mode=DuplexMode.HD_FDD), 2, 15)
    rep = res.reports["hd"]
    assert len(rep) > 0
    for col in ("si_w", "bs2bs_w", "ue2ue_intra_w", "ue2ue_inter_w"):
        assert np.all(rep[col] == 0.0), col
    ul = rep[rep["link_dir"] == "UL"]
    assert np.all(ul["sinr_db"] <= 10.0 + 1e-9)      # never above the target
    assert np.max(ul["sinr_db"]) == pytest.approx(10.0, abs=1e-9)


def test_dtdd_directions_are_exclusive():
    res = run_campaign(_small_cfg(duplex_mode=DuplexMode.DTDD), 2, 15)
    rep = res.reports["dtdd"]
    keys = set()
    for r in rep:
        keys.add((int(r["drop"]), int(r["slot"]), int(r["cell"]), str(r["link_dir"])))
    for d, s, c, _ in keys:
        assert not ((d, s, c, "UL") in keys and (d, s, c, "DL") in keys)
    assert np.all(rep["si_w"] == 0.0)
    assert np.all(rep["ue2ue_intra_w"] == 0.0)
    # cross-link classes do appear across cells
    assert np.any(rep["bs2bs_w"] > 0.0)
    assert np.any(rep["ue2ue_inter_w"] > 0.0)


def test_fd_runs_both_directions_with_si():
    res = run_campaign(_small_cfg(duplex_mode=DuplexMode.FD), 2, 15)
    rep = res.reports["fd"]
    ul = rep[rep["link_dir"] == "UL"]
    dl = rep[rep["link_dir"] == "DL"]
    dl_keys = {(int(r["drop"]), int(r["slot"]), int(r["cell"])) for r in dl}
    both = np.array([(int(r["drop"]), int(r["slot"]), int(r["cell"])) in dl_keys
                     for r in ul])
    assert np.any(both)
    # residual self-interference exactly when the own cell also sends DL
    assert np.all(ul["si_w"][both] > 0.0)
    assert np.all(ul["si_w"][~both] == 0.0)


def test_bsint_reduces_bs2bs():
    cfg = _small_cfg(duplex_mode=DuplexMode.FD, utilization=0.9)
    res = run_campaign(cfg, 2, 10,
                       variants=[Variant(DuplexMode.FD), Variant(DuplexMode.FD, 6)])
    plain = res.reports["fd"]
    nulled = res.reports["fd-6bsint"]
    p = plain[plain["link_dir"] == "UL"]["bs2bs_w"]
    n = nulled[nulled["link_dir"] == "UL"]["bs2bs_w"]
    assert np.median(n[p > 0]) < 1e-12 * np.median(p[p > 0])


def test_monotone_in_suppression_knobs():
    cfg = _small_cfg(utilization=0.8, seed=5)
    lo = run_campaign(cfg.replace(duplex_mode=DuplexMode.FD,
                                  si_cancellation_db=100.0), 2, 10)
    hi = run_campaign(cfg.replace(duplex_mode=DuplexMode.FD,
                                  si_cancellation_db=120.0), 2, 10)
    assert np.all(hi.reports["fd"]["sinr_db"] >= lo.reports["fd"]["sinr_db"] - 1e-12)
    lo = run_campaign(cfg.replace(duplex_mode=DuplexMode.DTDD,
                                  cli_suppression_db=0.0), 2, 10)
    hi = run_campaign(cfg.replace(duplex_mode=DuplexMode.DTDD,
                                  cli_suppression_db=40.0), 2, 10)
    assert np.all(hi.reports["dtdd"]["sinr_db"] >= lo.reports["dtdd"]["sinr_db"] - 1e-12)


def test_repeat_run_is_bit_identical():
    cfg = _small_cfg()
    a = run_campaign(cfg, 2, 8, variants=paired_variants())
    b = run_campaign(cfg, 2, 8, variants=paired_variants())
    for label in a.reports:
        assert np.array_equal(a.reports[label], b.reports[label])


def test_solo_equals_paired():
    """Common random numbers: a variant alone reproduces its paired rows."""
    cfg = _small_cfg()
    paired = run_campaign(cfg, 2, 8, variants=paired_variants())
    for v in paired_variants():
        solo = run_campaign(cfg, 2, 8, variants=[v])
        assert np.array_equal(solo.reports[v.label], paired.reports[v.label]), v.label


def test_report_order_is_drop_slot_major():
    res = run_campaign(_small_cfg(), 3, 5)
    rep = res.reports["fd"]
    key = rep["drop"].astype(np.int64) * 10**6 + rep["slot"]
    assert np.all(np.diff(key) >= 0)


def test_rejects_infeasible_nulling():
    cfg = preset_uma500()                  # effective model: 2-dim combiner
    with pytest.raises(ConfigurationError):
        run_campaign(cfg, 1, 1, variants=[Variant(DuplexMode.DTDD, 4)])


def test_rejects_bad_campaign_shapes():
    cfg = _small_cfg()
    with pytest.raises(ConfigurationError):
        run_campaign(cfg, 0, 5)
    with pytest.raises(ConfigurationError):
        run_campaign(cfg, 1, 1, variants=[Variant(DuplexMode.FD),
                                          Variant(DuplexMode.FD)])


def test_simulate_slot_exposes_context():
    cfg = _small_cfg()
    from duplexsim import deploy_drop
    dep = deploy_drop(cfg, 0)
    out, ctx = simulate_slot(cfg, dep, 0, 0, paired_variants(),
                             return_context=True)
    assert set(out) == {v.label for v in paired_variants()}
    assert ctx.fading_bs_ue().shape == (14, 7, 128, 2)
    assert ctx.fading_bs_bs().shape == (7, 7, 128, 128)
    # transpose reciprocity of the BS-BS blocks
    f = ctx.fading_bs_bs()
    assert np.array_equal(f[0, 1], f[1, 0].T)
    assert np.all(f[0, 0] == 0.0)


def test_csv_round_trip(tmp_path):
    cfg = _small_cfg()
    res = run_campaign(cfg, 1, 5)
    path = tmp_path / "rep.csv"
    write_reports_csv(path, res.reports["fd"], "fd", cfg)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    import json
    echoed = json.loads(lines[0].split("# config: ", 1)[1])
    assert echoed["seed"] == cfg.seed
    header = lines[2].split(",")
    assert header[:5] == ["drop", "slot", "cell", "link_dir", "mode"]
    body = [ln.split(",") for ln in lines[3:]]
    assert len(body) == len(res.reports["fd"])
    # repr round-trip: the parsed float is exactly the stored value
    i = header.index("throughput_bps")
    assert float(body[0][i]) == res.reports["fd"]["throughput_bps"][0]


def test_format_float_repr():
    assert format_float(0.1) == "0.1"
    assert float(format_float(1.2345678912345e-13)) == 1.2345678912345e-13


def test_report_dtype_fields():
    names = REPORT_DTYPE.names
    for col in ("drop", "slot", "cell", "link_dir", "sinr_db", "throughput_bps",
                "desired_w", "noise_w", "si_w", "bs2bs_w", "ue2ue_intra_w",
                "ue2ue_inter_w", "codir_w"):
        assert col in names
