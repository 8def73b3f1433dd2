"""Simulation of PBS-based optical entanglement purification with loss,
finite detector bandwidth and temporal mode-mismatch."""

from .mismatch import (
    AcceptancePolicy,
    MismatchResult,
    SearchConfig,
    fig4_curve,
    purified_pair,
    worst_case_fidelity,
)
from .sector_model import (
    CascadeConfig,
    DetectorModel,
    LossChannel,
    LossPlacement,
    NoiseModel,
    PairEnsemble,
    SectorDistribution,
    apply_loss,
    bandwidth_to_efficiency,
    cascade,
    closed_form_p2,
    effective_fidelity,
    efficiency_to_bandwidth,
    iterate_fidelity,
    merge_round,
    normalized_two_photon_prob,
    purify_fidelity,
    resource_count,
)
from .temporal import WavePacketConvention, calibrate_sigma, default_convention, hom_visibility

__version__ = "0.1.0"
