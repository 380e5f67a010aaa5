"""Route analysis for amplify-and-forward two-way relay networks.

Computes optimal per-node power allocations for routes with 0..6
equispaced relays, the resulting bandwidth efficiency, energy efficiency
and latency, and ranks candidate routes by the combined objective
EE * BE / latency.  Every closed form is cross-checked by brute-force
oracles and a slot-level schedule simulator.
"""

from .errors import (
    DomainError,
    InfeasibleRateError,
    RateVerificationError,
    TwrcError,
    UnsupportedKError,
    ZeroRateError,
)
from .radio import (
    CIRCUIT_MULTIPLIERS,
    PhyConfig,
    ProcessingEnergy,
    RouteSpec,
    circuit_power,
    load_config,
    noise_from_dbm_per_hz,
    path_gain_sq,
    processing_energy,
)
from .twrc3 import (
    DirectVsTwrc,
    PlacementResult,
    classify_midpoint,
    direct_vs_twrc,
    energy_function,
    midpoint_threshold,
    optimal_amplification,
    placement_energy,
)
from .power_alloc import (
    PowerAllocation,
    SegmentAllocation,
    is_rate_feasible,
    rate_upper_limit,
    route_allocation,
)
from .metrics import (
    ComparisonTable,
    RouteMetrics,
    bandwidth_efficiency,
    compare_routes,
    energy_efficiency,
    latency,
    objective,
    route_metrics,
)
from .slot_sim import (
    LinkBudget,
    SlotSchedule,
    build_schedule,
    end_to_end_noise,
    simulate_hop_by_hop,
    snr_vs_sinr_error,
    verify_rates,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
