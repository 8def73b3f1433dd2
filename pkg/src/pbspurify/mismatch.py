"""One purification round under temporal mode-mismatch, and worst-case search.

The two input pairs are each a classical mixture of Bell states, so the
round is simulated branch by branch as pure Fock states and the heralded
outputs are mixed with weights ``F^2``, ``F(1-F)``, ``F(1-F)``, ``(1-F)^2``.
"""

from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .fock import (
    OUTCOMES,
    BranchLabel,
    apply_correction,
    apply_pbs,
    bell_projector,
    prepare_branch_state,
    project_detection,
)
from .temporal import WavePacketConvention, default_convention

__all__ = [
    "AcceptancePolicy",
    "MismatchResult",
    "SearchConfig",
    "WorstCase",
    "Fig4Row",
    "branch_outputs",
    "purified_pair",
    "sample_points",
    "worst_case_fidelity",
    "fig4_curve",
]

_PHI_PLUS = bell_projector("phi+")
_BRANCHES = tuple(
    (b1, b2) for b1 in BranchLabel for b2 in BranchLabel
)


class AcceptancePolicy(enum.Enum):
    """Which heralded outcomes are kept.

    ``STRICT`` keeps only (+,+) and (-,-); ``FEED_FORWARD`` keeps all four and
    phase-corrects the mixed ones.
    """

    STRICT = "strict"
    FEED_FORWARD = "feedforward"

    def accepts(self, outcome: tuple[str, str]) -> bool:
        return self is AcceptancePolicy.FEED_FORWARD or outcome[0] == outcome[1]


@dataclass(frozen=True)
class MismatchResult:
    f_prime: float
    p_success: float


@dataclass(frozen=True)
class SearchConfig:
    """Search over ``(tau1, tau2)`` in ``[-tau_bound, tau_bound]^2``.

    With ``grid=None`` ``samples`` points are drawn uniformly from a Philox
    counter stream keyed by ``seed``; with ``grid=k`` a ``k x k`` lattice
    including the corners is used instead.
    """

    tau_bound: float
    samples: int = 1000
    seed: int = 0
    grid: int | None = None

    def __post_init__(self) -> None:
        if not self.tau_bound >= 0:
            raise ValueError(f"tau_bound must be >= 0, got {self.tau_bound!r}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.grid is not None and self.grid < 1:
            raise ValueError(f"grid must be >= 1, got {self.grid!r}")


@dataclass(frozen=True)
class WorstCase:
    min_f_prime: float
    tau1: float
    tau2: float
    skipped: int = 0


@dataclass(frozen=True)
class Fig4Row:
    tau_bound: float
    f: float
    min_f_prime: float
    argmin_tau1: float
    argmin_tau2: float


@functools.lru_cache(maxsize=4096)
def _branch_table(tau1: float, tau2: float, sigma: float, reflection_phase: complex):
    conv = WavePacketConvention(sigma)
    table = {}
    for b1, b2 in _BRANCHES:
        state = prepare_branch_state(b1, b2, tau1, tau2, conv)
        state = apply_pbs(state, "A", reflection_phase)
        state = apply_pbs(state, "B", reflection_phase)
        for outcome in OUTCOMES:
            rho, prob = project_detection(state, outcome)
            rho.setflags(write=False)
            table[b1, b2, outcome] = (rho, prob)
    return table


def branch_outputs(
    tau1: float,
    tau2: float,
    conv: WavePacketConvention | None = None,
    reflection_phase: complex = 1j,
) -> dict:
    """Heralded ``(rho, prob)`` for every branch pair and detector outcome.

    Keys are ``(b1, b2, outcome)``.  Results are cached per argument set.
    """
    conv = conv or default_convention()
    return _branch_table(float(tau1), float(tau2), conv.sigma, complex(reflection_phase))


def _mix(table, f: float, policy: AcceptancePolicy) -> np.ndarray:
    weights = {BranchLabel.PHI_PLUS: f, BranchLabel.PSI_PLUS: 1.0 - f}
    rho = np.zeros((4, 4), dtype=complex)
    for (b1, b2, outcome), (branch_rho, _) in table.items():
        if not policy.accepts(outcome):
            continue
        w = weights[b1] * weights[b2]
        if w:
            rho += w * apply_correction(branch_rho, outcome)
    return rho


def purified_pair(
    f: float,
    tau1: float,
    tau2: float,
    policy: AcceptancePolicy | str = AcceptancePolicy.STRICT,
    conv: WavePacketConvention | None = None,
    reflection_phase: complex = 1j,
) -> MismatchResult:
    """Output fidelity and success probability of one mismatched round.

    Raises
    ------
    ZeroDivisionError
        If no accepted outcome has non-zero probability.
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {f!r}")
    policy = AcceptancePolicy(policy)
    rho = _mix(branch_outputs(tau1, tau2, conv, reflection_phase), f, policy)
    p_success = float(np.trace(rho).real)
    if p_success <= 0.0:
        raise ZeroDivisionError("no accepted detection outcome has non-zero probability")
    f_prime = float(np.trace(_PHI_PLUS @ rho).real) / p_success
    return MismatchResult(min(max(f_prime, 0.0), 1.0), min(p_success, 1.0))


def sample_points(search: SearchConfig) -> np.ndarray:
    """Candidate ``(tau1, tau2)`` rows; ``(0, 0)`` is always appended last."""
    t = search.tau_bound
    if search.grid is not None:
        axis = np.linspace(-t, t, search.grid)
        pts = np.array([(a, b) for a in axis for b in axis])
    else:
        rng = np.random.Generator(np.random.Philox(key=search.seed))
        pts = rng.uniform(-t, t, size=(search.samples, 2))
    return np.vstack([pts, [[0.0, 0.0]]])


def _eval_point(args) -> list[float]:
    tau1, tau2, fs, policy, sigma, phase = args
    conv = WavePacketConvention(sigma)
    table = branch_outputs(tau1, tau2, conv, phase)
    out = []
    for f in fs:
        rho = _mix(table, f, policy)
        p = float(np.trace(rho).real)
        out.append(float(np.trace(_PHI_PLUS @ rho).real) / p if p > 0 else math.nan)
    return out


def _evaluate(points, fs, policy, conv, reflection_phase, workers):
    jobs = [(float(a), float(b), tuple(fs), policy, conv.sigma, reflection_phase) for a, b in points]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_eval_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_eval_point(j) for j in jobs]


def _reduce(points, values) -> WorstCase:
    best = None
    skipped = 0
    for (t1, t2), v in zip(points, values):
        if math.isnan(v):
            skipped += 1
            continue
        key = (v, float(t1), float(t2))
        if best is None or key < best:
            best = key
    if best is None:
        raise ZeroDivisionError("every sample had zero success probability")
    return WorstCase(best[0], best[1], best[2], skipped)


def worst_case_fidelity(
    f: float,
    search: SearchConfig,
    policy: AcceptancePolicy | str = AcceptancePolicy.STRICT,
    conv: WavePacketConvention | None = None,
    *,
    reflection_phase: complex = 1j,
    workers: int | None = None,
) -> WorstCase:
    """Minimum output fidelity over the mismatch search domain.

    Ties are broken lexicographically on ``(f_prime, tau1, tau2)`` so the
    result does not depend on evaluation order or ``workers``.
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {f!r}")
    conv = conv or default_convention()
    points = sample_points(search)
    values = _evaluate(points, [f], AcceptancePolicy(policy), conv, reflection_phase, workers)
    return _reduce(points, [v[0] for v in values])


def fig4_curve(
    f_grid: Sequence[float],
    tau_bounds: Sequence[float],
    search: SearchConfig,
    policy: AcceptancePolicy | str = AcceptancePolicy.STRICT,
    conv: WavePacketConvention | None = None,
    *,
    workers: int | None = None,
) -> list[Fig4Row]:
    """Worst-case output fidelity for every ``(tau_bound, f)`` cell.

    ``search.tau_bound`` is overridden by each entry of ``tau_bounds``.  Rows
    come out in ``tau_bounds``-major, ``f_grid``-minor order.
    """
    for f in f_grid:
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"fidelity must lie in [0, 1], got {f!r}")
    conv = conv or default_convention()
    policy = AcceptancePolicy(policy)
    rows = []
    for tau_bound in tau_bounds:
        points = sample_points(replace(search, tau_bound=tau_bound))
        values = _evaluate(points, list(f_grid), policy, conv, 1j, workers)
        for j, f in enumerate(f_grid):
            worst = _reduce(points, [v[j] for v in values])
            rows.append(Fig4Row(float(tau_bound), float(f), worst.min_f_prime, worst.tau1, worst.tau2))
    return rows
