"""Entanglement distribution with separable carriers, compared against direct
Bell-pair distribution, under Kraus noise on memories and carrier."""

from .channels import ChannelKind, KrausChannel, NoiseScenario, make_channel
from .correlations import Bipartition, DiscordResult, check_distribution_bound, discord, entropy, negativity
from .protocols import (
    ProtocolOutcome,
    ZalmMapReport,
    adversary_scan,
    build_alpha_initial,
    build_beta_initial,
    run_alpha,
    run_beta,
    run_ded,
    run_edss_via_zalm,
    zalm_map,
)
from .qstate import (
    BlochProjector,
    DensityMatrix,
    InvariantViolation,
    OutcomeUnobservable,
    UnitaryGate,
    apply_channel,
    apply_unitary,
    partial_trace,
    partial_transpose,
    postselect,
    tensor,
)
from .sweeps import (
    optimize_measurement,
    probability_curves,
    sweep_grid_delta,
    sweep_multichannel_uniform,
    sweep_single_channel,
)

__version__ = "0.1.0"
