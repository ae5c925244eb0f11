"""Scenario configuration and presets.

A :class:`ScenarioConfig` fully describes one simulated network.  The two
built-in presets are the urban-macro layouts used throughout the experiments:

* ``uma500`` -- 7 tri-sector sites 500 m apart, 25 m masts, 40 W, the 8x8
  array folded into an effective 2x2 MIMO link with an array-gain offset.
  Cross-link interference is unsuppressed by default; the 70 dB CLI /
  140 dB SI knobs are what the suppression sweep varies.
* ``uma200`` -- 7 single-sector sites 200 m apart, 10 m masts, 1 W,
  element-level 128-antenna arrays serving 2-antenna single-stream UEs,
  110 dB self-interference cancellation and a 30 dB DL SINR cap.

Config files are YAML (JSON is accepted too) whose keys are exactly the
dataclass field names.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import yaml


class ConfigurationError(ValueError):
    """Raised for out-of-domain or inconsistent configuration values."""


class DuplexMode(enum.Enum):
    HD_FDD = "hd_fdd"
    DTDD = "dtdd"
    FD = "fd"


class ArrayModel(enum.Enum):
    # "effective": BS array folded into a ue_antennas x ue_antennas MIMO link
    # with a 10*log10(bs_antennas) dB array-gain offset plus the sector
    # element pattern.  "element": isotropic per-element array, directivity
    # emerges from precoding over the full bs_antennas dimensions.
    EFFECTIVE = "effective"
    ELEMENT = "element"


VALID_SITE_COUNTS = (1, 7, 19)


@dataclass
class ScenarioConfig:
    # geometry
    isd_m: float = 500.0              # inter-site distance
    n_sites: int = 7                  # 1, 7 (one ring) or 19 (two rings)
    sectors_per_site: int = 3
    bs_height_m: float = 25.0
    ue_height_m: float = 1.5
    n_users: int = 3000
    # radio
    bs_tx_power_w: float = 40.0
    carrier_hz: float = 3.5e9
    system_bandwidth_hz: float = 40e6  # full band; HD-FDD splits it in half
    bs_antennas: int = 64
    ue_antennas: int = 2
    streams_per_ue: int = 2
    ue_max_power_w: float = 0.2
    ul_snr_target_db: float = 10.0
    noise_figure_db: float = 5.0       # BS receiver
    ue_noise_figure_db: float = 9.0
    # self-interference / cross-link interference
    si_cancellation_db: float = 0.0
    si_channel_loss_db: float = 0.0    # antenna isolation ahead of cancellation
    si_rician_k_db: float = 15.0
    intra_site_cli_loss_db: float = 60.0
    cli_suppression_db: float = 0.0    # artificial BS-to-BS attenuation knob
    dl_sinr_cap_db: float = 30.0
    # traffic
    utilization: float = 0.5
    dl_to_ul_load_ratio: float = 2.0
    # operating mode
    duplex_mode: DuplexMode = DuplexMode.HD_FDD
    bsint_nulls: int = 0
    bs_array_model: ArrayModel = ArrayModel.EFFECTIVE
    csi_error_db: float | None = None  # error-to-channel power ratio; None = perfect
    seed: int = 1

    def __post_init__(self):
        try:
            self.duplex_mode = DuplexMode(self.duplex_mode) if not isinstance(
                self.duplex_mode, DuplexMode) else self.duplex_mode
            self.bs_array_model = ArrayModel(self.bs_array_model) if not isinstance(
                self.bs_array_model, ArrayModel) else self.bs_array_model
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        self.validate()

    def validate(self):
        if self.isd_m <= 0:
            raise ConfigurationError(f"isd_m must be positive, got {self.isd_m}")
        if self.n_sites not in VALID_SITE_COUNTS:
            raise ConfigurationError(
                f"n_sites must be one of {VALID_SITE_COUNTS}, got {self.n_sites}")
        if self.sectors_per_site not in (1, 3):
            raise ConfigurationError(
                f"sectors_per_site must be 1 or 3, got {self.sectors_per_site}")
        if not 0.0 <= self.utilization <= 1.0:
            raise ConfigurationError(
                f"utilization must be in [0, 1], got {self.utilization}")
        if self.dl_to_ul_load_ratio <= 0:
            raise ConfigurationError("dl_to_ul_load_ratio must be positive")
        if self.bsint_nulls < 0 or self.bsint_nulls > self.bs_antennas - 1:
            raise ConfigurationError(
                f"bsint_nulls must lie in [0, bs_antennas-1]={self.bs_antennas - 1}, "
                f"got {self.bsint_nulls}")
        for name in ("bs_tx_power_w", "ue_max_power_w", "carrier_hz",
                     "system_bandwidth_hz", "bs_height_m", "ue_height_m"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.n_users < 0:
            raise ConfigurationError("n_users must be non-negative")
        if self.streams_per_ue < 1 or self.streams_per_ue > self.ue_antennas:
            raise ConfigurationError(
                "streams_per_ue must lie in [1, ue_antennas]")

    # -- derived quantities ------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self.n_sites * self.sectors_per_site

    @property
    def bs_matrix_dim(self) -> int:
        """Row dimension of BS-side channel matrices."""
        if self.bs_array_model is ArrayModel.ELEMENT:
            return self.bs_antennas
        return self.ue_antennas  # effective MIMO link

    @property
    def array_gain_offset_db(self) -> float:
        """Link-budget array gain applied at the BS in the effective model."""
        if self.bs_array_model is ArrayModel.ELEMENT:
            return 0.0
        return 10.0 * math.log10(self.bs_antennas)

    def replace(self, **kw) -> "ScenarioConfig":
        return dataclasses.replace(self, **kw)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["duplex_mode"] = self.duplex_mode.value
        d["bs_array_model"] = self.bs_array_model.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        valid = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - valid
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(data)
        if "duplex_mode" in kw and isinstance(kw["duplex_mode"], str):
            try:
                kw["duplex_mode"] = DuplexMode(kw["duplex_mode"].lower())
            except ValueError:
                raise ConfigurationError(
                    f"duplex_mode must be one of "
                    f"{[m.value for m in DuplexMode]}, got {kw['duplex_mode']!r}")
        if "bs_array_model" in kw and isinstance(kw["bs_array_model"], str):
            try:
                kw["bs_array_model"] = ArrayModel(kw["bs_array_model"].lower())
            except ValueError:
                raise ConfigurationError(
                    f"bs_array_model must be 'effective' or 'element', "
                    f"got {kw['bs_array_model']!r}")
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        text = Path(path).read_text()
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"cannot parse config file {path}: {exc}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"config file {path} must hold a mapping")
        return cls.from_dict(data)


def preset_uma500(**overrides) -> ScenarioConfig:
    """Macro layout: ISD 500 m, tri-sector, 40 W, effective 2x2 MIMO."""
    base = dict(
        isd_m=500.0, n_sites=7, sectors_per_site=3,
        bs_height_m=25.0, ue_height_m=1.5, n_users=3000,
        bs_tx_power_w=40.0, carrier_hz=3.5e9, system_bandwidth_hz=40e6,
        bs_antennas=64, ue_antennas=2, streams_per_ue=2,
        ue_max_power_w=0.2, ul_snr_target_db=10.0,
        noise_figure_db=5.0, ue_noise_figure_db=9.0,
        si_cancellation_db=0.0, si_channel_loss_db=10.0, si_rician_k_db=15.0,
        intra_site_cli_loss_db=60.0, cli_suppression_db=0.0,
        dl_sinr_cap_db=30.0, utilization=0.5, dl_to_ul_load_ratio=2.0,
        duplex_mode=DuplexMode.HD_FDD, bsint_nulls=0,
        bs_array_model=ArrayModel.EFFECTIVE, seed=1,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


def preset_uma200(**overrides) -> ScenarioConfig:
    """Dense layout: ISD 200 m, single sector, 1 W, 128-antenna arrays."""
    base = dict(
        isd_m=200.0, n_sites=7, sectors_per_site=1,
        bs_height_m=10.0, ue_height_m=1.5, n_users=3000,
        bs_tx_power_w=1.0, carrier_hz=3.5e9, system_bandwidth_hz=40e6,
        bs_antennas=128, ue_antennas=2, streams_per_ue=1,
        ue_max_power_w=0.2, ul_snr_target_db=10.0,
        noise_figure_db=5.0, ue_noise_figure_db=9.0,
        si_cancellation_db=110.0, si_channel_loss_db=25.0, si_rician_k_db=15.0,
        intra_site_cli_loss_db=60.0, cli_suppression_db=0.0,
        dl_sinr_cap_db=30.0, utilization=0.5, dl_to_ul_load_ratio=2.0,
        duplex_mode=DuplexMode.FD, bsint_nulls=0,
        bs_array_model=ArrayModel.ELEMENT, seed=1,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


PRESETS = {"uma500": preset_uma500, "uma200": preset_uma200}


def load_scenario(name_or_path, **overrides) -> ScenarioConfig:
    """Resolve a preset name or a config-file path into a ScenarioConfig."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path](**overrides)
    path = Path(name_or_path)
    if not path.exists():
        raise ConfigurationError(
            f"scenario {name_or_path!r} is neither a preset "
            f"({sorted(PRESETS)}) nor an existing config file")
    cfg = ScenarioConfig.from_file(path)
    return cfg.replace(**overrides) if overrides else cfg
