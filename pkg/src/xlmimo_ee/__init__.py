"""Near-field XL-MIMO throughput and energy-efficiency modeling toolkit."""

__version__ = "0.1.0"

from .channel import (
    ChannelRealization,
    PropagationProfile,
    channel_correlation,
    correlation_factor,
    large_scale_gains,
    sample_channel,
    sample_channel_mmwave,
    sample_channel_sub6,
    steering_vector,
)
from .ee import (
    AntennaScalingReport,
    EePoint,
    compare_setups,
    ee_antenna_limit_check,
    ee_argmax_on_grid,
    ee_bandwidth_limit,
    energy_efficiency,
    knee_point,
)
from .errors import (
    ApertureError,
    ConfigError,
    NotPsdError,
    NumericDomainError,
    OverheadError,
    RankDeficientError,
    VacuousBoundError,
)
from .geometry import ArrayGeometry, CellGeometry, UserLocation, element_distances, sample_user_location
from .power import (
    CoefficientSet,
    HardwareProfile,
    PowerBreakdown,
    coefficients,
    component_powers,
    total_power,
)
from .scenario import (
    Scenario,
    default_setups,
    load_scenario,
    load_setups,
    ring_interferer_gains,
)
from .special import exp_integral_e1, exp_scaled_e1
from .throughput import (
    ErgodicEstimate,
    ProtocolConfig,
    chi_and_interference_sums,
    chi_bar,
    chi_scaling,
    i_bar,
    mc_ergodic_se,
    mmwave_se_approx,
    se_approx,
    se_upper_bound,
    sub6_se_lower_bound,
    throughput_asymptote,
    wrap_throughput,
)
from .transceiver import (
    LinkBudget,
    SinrReport,
    downlink_sinr,
    hybrid_chain,
    multicell_uplink_sinr,
    uplink_sinr,
    zf_downlink_precoder,
    zf_uplink_combiner,
)
from .runner import RunManifest, SweepSpec, grid_values, run_compare, run_sweep
