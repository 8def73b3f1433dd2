"""Gaussian wave-packet overlaps and orthonormal temporal bases."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "RANK_TOL",
    "DEFAULT_ANCHOR_TAU",
    "DEFAULT_ANCHOR_VISIBILITY",
    "WavePacketConvention",
    "TemporalBasis",
    "overlap",
    "hom_visibility",
    "calibrate_sigma",
    "build_temporal_basis",
    "default_convention",
]

RANK_TOL = 1e-9

# Calibration anchor: HOM visibility 0.74 at a displacement of 0.4.
DEFAULT_ANCHOR_TAU = 0.4
DEFAULT_ANCHOR_VISIBILITY = 0.74


@dataclass(frozen=True)
class WavePacketConvention:
    """Gaussian temporal amplitude of width ``sigma`` (photon-bandwidth units)."""

    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


def calibrate_sigma(anchor_tau: float, anchor_visibility: float) -> WavePacketConvention:
    """Pick ``sigma`` so that ``hom_visibility(anchor_tau)`` hits the anchor.

    Solves ``exp(-tau^2 / (4 sigma^2)) = V`` in closed form.
    """
    if not 0.0 < anchor_visibility < 1.0:
        raise ValueError(f"anchor_visibility must be in (0, 1), got {anchor_visibility!r}")
    if anchor_tau == 0:
        raise ValueError("anchor_tau must be non-zero")
    sigma2 = anchor_tau * anchor_tau / (-4.0 * math.log(anchor_visibility))
    return WavePacketConvention(math.sqrt(sigma2))


def default_convention() -> WavePacketConvention:
    return calibrate_sigma(DEFAULT_ANCHOR_TAU, DEFAULT_ANCHOR_VISIBILITY)


def overlap(tau_a: float, tau_b: float, conv: WavePacketConvention) -> float:
    """Inner product of two Gaussian wave-packets centred at ``tau_a`` and ``tau_b``."""
    d = tau_a - tau_b
    return math.exp(-d * d / (8.0 * conv.sigma * conv.sigma))


def hom_visibility(tau: float, conv: WavePacketConvention) -> float:
    """Two-photon interference visibility for a relative delay ``tau``."""
    return overlap(0.0, tau, conv) ** 2


@dataclass(frozen=True)
class TemporalBasis:
    """Orthonormal expansion of a set of delayed wave-packets.

    ``coeffs[i, j]`` is the component of packet ``i`` along basis vector ``j``;
    the matrix is lower triangular and has ``rank`` columns.
    """

    delays: tuple[float, ...]
    gram: np.ndarray
    coeffs: np.ndarray
    rank: int


def build_temporal_basis(
    delays: Sequence[float], conv: WavePacketConvention, tol: float = RANK_TOL
) -> TemporalBasis:
    """Gram-Schmidt the packets at ``delays``, keeping the first one as-is.

    A packet whose residual after projecting out the earlier basis vectors has
    norm below ``tol`` adds no new basis vector.
    """
    delays = tuple(float(d) for d in delays)
    if not delays:
        raise ValueError("need at least one delay")
    n = len(delays)
    gram = np.array([[overlap(a, b, conv) for b in delays] for a in delays])

    columns: list[np.ndarray] = []  # coefficient columns of the orthonormal basis
    coeffs = np.zeros((n, n))
    for i in range(n):
        for j, col in enumerate(columns):
            coeffs[i, j] = gram[i] @ col  # <e_j|phi_i>, gram is real symmetric
        residual2 = gram[i, i] - coeffs[i, : len(columns)] @ coeffs[i, : len(columns)]
        residual = math.sqrt(max(residual2, 0.0))
        if residual > tol:
            coeffs[i, len(columns)] = residual
            # e_new = (phi_i - sum_j c_ij e_j) / residual, as packet coefficients.
            col = np.zeros(n)
            col[i] = 1.0
            for j, prev in enumerate(columns):
                col -= coeffs[i, j] * prev
            columns.append(col / residual)
    rank = len(columns)
    return TemporalBasis(delays, gram, coeffs[:, :rank].copy(), rank)
