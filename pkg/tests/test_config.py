import json
import math

import pytest

from duplexsim import (
    ArrayModel,
    ConfigurationError,
    DuplexMode,
    PRESETS,
    ScenarioConfig,
    load_scenario,
    preset_uma200,
    preset_uma500,
)


def test_preset_uma500_values():
    cfg = preset_uma500()
    assert cfg.isd_m == 500.0 and cfg.n_sites == 7 and cfg.sectors_per_site == 3
    assert cfg.n_cells == 21
    assert cfg.bs_antennas == 64 and cfg.streams_per_ue == 2
    assert cfg.bs_array_model is ArrayModel.EFFECTIVE
    assert cfg.bs_matrix_dim == cfg.ue_antennas == 2
    assert math.isclose(cfg.array_gain_offset_db, 10.0 * math.log10(64.0))
    assert cfg.system_bandwidth_hz == 40e6 and cfg.dl_sinr_cap_db == 30.0
    assert cfg.intra_site_cli_loss_db == 60.0
    assert cfg.utilization == 0.5 and cfg.dl_to_ul_load_ratio == 2.0


def test_preset_uma200_values():
    cfg = preset_uma200()
    assert cfg.isd_m == 200.0 and cfg.sectors_per_site == 1
    assert cfg.n_cells == 7
    assert cfg.bs_array_model is ArrayModel.ELEMENT
    assert cfg.bs_matrix_dim == cfg.bs_antennas == 128
    assert cfg.array_gain_offset_db == 0.0
    assert cfg.si_cancellation_db == 110.0
    assert cfg.duplex_mode is DuplexMode.FD
    assert "uma500" in PRESETS and "uma200" in PRESETS


@pytest.mark.parametrize("bad", [
    dict(n_sites=5),
    dict(sectors_per_site=2),
    dict(utilization=1.5),
    dict(utilization=-0.1),
    dict(bs_tx_power_w=0.0),
    dict(system_bandwidth_hz=-1.0),
    dict(bsint_nulls=-1),
    dict(bsint_nulls=128),          # needs <= bs_antennas - 1
    dict(streams_per_ue=0),
    dict(dl_to_ul_load_ratio=-2.0),
])
def test_validation_rejects(bad):
    with pytest.raises(ConfigurationError):
        preset_uma200(**bad)


def test_enum_coercion_from_strings():
    cfg = preset_uma200(duplex_mode="dtdd", bs_array_model="effective")
    assert cfg.duplex_mode is DuplexMode.DTDD
    assert cfg.bs_array_model is ArrayModel.EFFECTIVE
    with pytest.raises(ConfigurationError):
        preset_uma200(duplex_mode="simplex")


def test_replace_revalidates():
    cfg = preset_uma500()
    assert cfg.replace(utilization=0.7).utilization == 0.7
    with pytest.raises(ConfigurationError):
        cfg.replace(utilization=2.0)


def test_round_trip_dict_and_json():
    cfg = preset_uma500(seed=13)
    again = ScenarioConfig.from_dict(cfg.to_dict())
    assert again == cfg
    parsed = json.loads(cfg.to_json())
    assert parsed["duplex_mode"] == "hd_fdd"
    assert ScenarioConfig.from_dict(parsed) == cfg


def test_from_dict_rejects_unknown_keys():
    d = preset_uma200().to_dict()
    d["bandwidth"] = 1.0
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_dict(d)


def test_load_scenario_file_and_overrides(tmp_path):
    cfg = preset_uma200(seed=3)
    path = tmp_path / "scenario.yaml"
    path.write_text(cfg.to_json())        # JSON is a YAML subset
    assert load_scenario(str(path)) == cfg
    tweaked = load_scenario("uma200", utilization=0.25, seed=9)
    assert tweaked.utilization == 0.25 and tweaked.seed == 9
    with pytest.raises((ConfigurationError, FileNotFoundError)):
        load_scenario("no_such_preset")
