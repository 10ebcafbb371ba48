"""Secrecy-capacity laboratory for Gaussian wiretap channels with
rate-limited helper links: closed-form capacity reports, flash-signaling
simulation, plug-in leakage estimation, and a discrete converse oracle."""

from .capacity import (
    CapacityReport,
    FLAG_SIGMA_DW_ZERO_NONSECURE,
    FLAG_SIGMA_V_ZERO_NONSECURE,
    HelpSpec,
    Placement,
    awgn_capacity,
    dependent_composite_report,
    feedback_comparison,
    output_entropy_gap_bound,
    no_help_secrecy_capacity,
    phase2_leakage_bound,
    secrecy_capacity_with_help,
)
from .channel import ChannelParams, NoiseDraw, Structure, sample_noise, transmit
from .codec import (
    Codebook,
    PhaseSpec,
    SimOutcome,
    TimeSharingOutcome,
    generate_codebook,
    run_time_sharing,
    simulate_phase2_rx,
    simulate_phase2_tx,
    wilson_interval,
)
from .config import RunConfig, load_config, parse_config
from .errors import (
    CodebookSizeError,
    ConfigError,
    GridResolutionError,
    InfiniteCapacityError,
    PowerViolationError,
    SingularCovarianceError,
    UnsupportedHelpError,
    WiretapHelpError,
)
from .leakage import (
    ChainReport,
    ChainStep,
    LeakageEstimate,
    composite_leakage,
    epi_cell_slacks,
    estimate_leakage_discrete,
    gaussian_cond_entropy_quadrature,
    gaussian_cond_entropy_sum,
    output_entropy_gap_quadrature,
    verify_leakage_chain,
)
from .oracle import (
    CHAIN_IDS,
    JointTable,
    Step,
    StepReport,
    check_converse_chain,
    discretize_gaussian_case,
    discretized_secrecy_capacity,
    random_consistent_table,
)
from .quantizer import (
    FlashSchedule,
    HelpMessage,
    Quantizer,
    RatePrediction,
    build_quantizer,
    phase2_rate_rx,
    phase2_rate_tx,
    quantize_noise,
)
from .timesharing import ConvergencePoint, two_phase_convergence

__version__ = "0.1.0"

__all__ = [
    "CapacityReport",
    "ChannelParams",
    "ChainReport",
    "ChainStep",
    "CHAIN_IDS",
    "Codebook",
    "CodebookSizeError",
    "ConfigError",
    "ConvergencePoint",
    "FLAG_SIGMA_DW_ZERO_NONSECURE",
    "FLAG_SIGMA_V_ZERO_NONSECURE",
    "FlashSchedule",
    "GridResolutionError",
    "HelpMessage",
    "HelpSpec",
    "InfiniteCapacityError",
    "JointTable",
    "LeakageEstimate",
    "NoiseDraw",
    "PhaseSpec",
    "Placement",
    "PowerViolationError",
    "Quantizer",
    "RatePrediction",
    "RunConfig",
    "SimOutcome",
    "SingularCovarianceError",
    "Step",
    "StepReport",
    "Structure",
    "TimeSharingOutcome",
    "UnsupportedHelpError",
    "WiretapHelpError",
    "awgn_capacity",
    "build_quantizer",
    "check_converse_chain",
    "composite_leakage",
    "dependent_composite_report",
    "discretize_gaussian_case",
    "discretized_secrecy_capacity",
    "epi_cell_slacks",
    "estimate_leakage_discrete",
    "feedback_comparison",
    "gaussian_cond_entropy_quadrature",
    "gaussian_cond_entropy_sum",
    "generate_codebook",
    "output_entropy_gap_bound",
    "output_entropy_gap_quadrature",
    "load_config",
    "no_help_secrecy_capacity",
    "parse_config",
    "phase2_leakage_bound",
    "phase2_rate_rx",
    "phase2_rate_tx",
    "quantize_noise",
    "random_consistent_table",
    "run_time_sharing",
    "sample_noise",
    "secrecy_capacity_with_help",
    "simulate_phase2_rx",
    "simulate_phase2_tx",
    "transmit",
    "two_phase_convergence",
    "verify_leakage_chain",
    "wilson_interval",
]
