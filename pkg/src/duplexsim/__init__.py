"""Multi-cell duplexing simulator.

Compares half-duplex FDD, dynamic TDD and full-duplex operation of a
hexagonal cellular network under a complete cross-link-interference model
(BS-to-BS, UE-to-UE, residual self-interference, same-direction), including
a low-complexity BS-interference-nulling receive combiner.
"""

__version__ = "0.1.0"

from .beamforming import (
    DegenerateChannelError,
    DesiredNulledError,
    bsint_combiner,
    orthonormal_basis,
    select_null_targets,
    zf_precoder,
)
from .channel import (
    DomainError,
    FadingKind,
    FadingSpec,
    LinkGain,
    bs_to_bs_gain,
    draw_fading,
    free_space_pathloss,
    los_probability,
    noise_power_w,
    pathloss_uma,
    sector_gain,
    ue_to_ue_pathloss,
)
from .config import (
    ArrayModel,
    ConfigurationError,
    DuplexMode,
    PRESETS,
    ScenarioConfig,
    load_scenario,
    preset_uma200,
    preset_uma500,
)
from .deployment import Deployment, build_hex_layout, deploy_drop, drop_users
from .engine import (
    CampaignResult,
    REPORT_DTYPE,
    Variant,
    paired_variants,
    run_campaign,
    simulate_slot,
    si_residual,
    throughput,
    ul_power_control,
    write_reports_csv,
)
from .metrics import (
    EmpiricalCdf,
    GainTable,
    interference_medians,
    link_samples,
    percentile,
    relative_gain,
    slot_sum_samples,
    sort_reports,
    user_average_samples,
)
from .scheduler import (
    Direction,
    SlotAssignment,
    activity_probabilities,
    dtdd_direction,
    round_robin_candidates,
    sample_activity,
    schedule_slot,
)

__all__ = [
    "ArrayModel", "CampaignResult", "ConfigurationError", "Deployment",
    "DegenerateChannelError", "DesiredNulledError", "Direction", "DomainError",
    "DuplexMode", "EmpiricalCdf", "FadingKind", "FadingSpec", "GainTable",
    "LinkGain", "PRESETS", "REPORT_DTYPE", "ScenarioConfig", "SlotAssignment",
    "Variant", "activity_probabilities", "bs_to_bs_gain", "bsint_combiner",
    "build_hex_layout", "deploy_drop", "draw_fading", "drop_users",
    "dtdd_direction", "free_space_pathloss", "interference_medians",
    "link_samples", "load_scenario", "los_probability", "noise_power_w",
    "orthonormal_basis", "paired_variants", "pathloss_uma", "percentile",
    "preset_uma200", "preset_uma500", "relative_gain", "round_robin_candidates",
    "run_campaign", "sample_activity", "schedule_slot", "sector_gain",
    "select_null_targets", "si_residual", "simulate_slot", "slot_sum_samples",
    "sort_reports", "throughput", "ue_to_ue_pathloss", "ul_power_control",
    "user_average_samples", "write_reports_csv", "zf_precoder",
]
