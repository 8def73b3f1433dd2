"""Photon-number sector model of PBS entanglement purification.

A pair is described by the (unnormalized) probabilities that it still holds
0, 1 or 2 photons, together with the Bell-diagonal fidelity of its two-photon
part.  Purification rounds and lossy channels act on these three numbers
independently of the fidelity, which evolves through the ideal map
``F -> F^2 / (F^2 + (1 - F)^2)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from scipy import special

__all__ = [
    "UNDERFLOW_FLOOR",
    "SectorDistribution",
    "PairEnsemble",
    "LossChannel",
    "LossPlacement",
    "CascadeConfig",
    "RoundRecord",
    "CascadeTrace",
    "DetectorModel",
    "NoiseModel",
    "purify_fidelity",
    "iterate_fidelity",
    "merge_round",
    "apply_loss",
    "cascade",
    "closed_form_p2",
    "normalized_two_photon_prob",
    "effective_fidelity",
    "bandwidth_to_efficiency",
    "efficiency_to_bandwidth",
    "resource_count",
]

# Sector masses below this are flushed to zero; denormals would poison ratios.
UNDERFLOW_FLOOR = 1e-300

_MASS_SLACK = 1e-12


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class SectorDistribution:
    """Probabilities that a pair contains 0, 1 or 2 photons.

    The triple is allowed to be unnormalized: after heralded rounds its sum is
    the cumulative success probability.
    """

    p0: float
    p1: float
    p2: float

    def __post_init__(self) -> None:
        for name in ("p0", "p1", "p2"):
            v = float(getattr(self, name))
            if not v >= 0.0:
                raise ValueError(f"{name} must be non-negative, got {v!r}")
            object.__setattr__(self, name, v)
        if self.total > 1.0 + _MASS_SLACK:
            raise ValueError(f"sector masses sum to {self.total!r} > 1")

    @property
    def total(self) -> float:
        return self.p0 + self.p1 + self.p2

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p0, self.p1, self.p2)

    def to_dict(self) -> dict[str, float]:
        return {"p0": self.p0, "p1": self.p1, "p2": self.p2}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SectorDistribution":
        _reject_unknown(data, {"p0", "p1", "p2"})
        return cls(float(data["p0"]), float(data["p1"]), float(data["p2"]))

    @classmethod
    def two_photon(cls) -> "SectorDistribution":
        return cls(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class PairEnsemble:
    """Sector distribution plus the fidelity of the two-photon sector."""

    sectors: SectorDistribution
    fidelity: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "fidelity", _check_unit("fidelity", self.fidelity))

    def to_dict(self) -> dict[str, float]:
        return {**self.sectors.to_dict(), "fidelity": self.fidelity}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PairEnsemble":
        _reject_unknown(data, {"p0", "p1", "p2", "fidelity"})
        sectors = SectorDistribution(
            float(data.get("p0", 0.0)), float(data.get("p1", 0.0)), float(data.get("p2", 1.0))
        )
        return cls(sectors, float(data["fidelity"]))


@dataclass(frozen=True)
class LossChannel:
    """Independent intensity loss ``eta`` on each arm of a pair."""

    eta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", _check_unit("eta", self.eta))

    def apply(self, sectors: SectorDistribution) -> SectorDistribution:
        return apply_loss(sectors, self.eta)

    def to_dict(self) -> dict[str, float]:
        return {"eta": self.eta}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "LossChannel":
        _reject_unknown(data, {"eta"})
        return cls(float(data["eta"]))


class LossPlacement(enum.Enum):
    """Where the lossy channel sits relative to each purification round."""

    BEFORE_ROUND = "before"
    AFTER_ROUND = "after"


class NoiseModel(enum.Enum):
    BIT_FLIP_ONLY = "bitflip"
    DEPOLARIZING = "depolarizing"


@dataclass(frozen=True)
class CascadeConfig:
    rounds: int
    eta: float
    loss_placement: LossPlacement = LossPlacement.BEFORE_ROUND
    initial: PairEnsemble = field(
        default_factory=lambda: PairEnsemble(SectorDistribution.two_photon(), 1.0)
    )

    def __post_init__(self) -> None:
        if isinstance(self.rounds, bool) or int(self.rounds) != self.rounds or self.rounds < 1:
            raise ValueError(f"rounds must be a positive integer, got {self.rounds!r}")
        object.__setattr__(self, "rounds", int(self.rounds))
        object.__setattr__(self, "eta", _check_unit("eta", self.eta))
        object.__setattr__(self, "loss_placement", LossPlacement(self.loss_placement))

    def to_dict(self) -> dict[str, Any]:
        return {
            "rounds": self.rounds,
            "eta": self.eta,
            "loss_placement": self.loss_placement.value,
            "initial": self.initial.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CascadeConfig":
        _reject_unknown(data, {"rounds", "eta", "loss_placement", "initial"})
        kwargs: dict[str, Any] = {
            "rounds": data["rounds"],
            "eta": data["eta"],
            "loss_placement": LossPlacement(data.get("loss_placement", "before")),
        }
        if "initial" in data:
            kwargs["initial"] = PairEnsemble.from_dict(data["initial"])
        return cls(**kwargs)


@dataclass(frozen=True)
class RoundRecord:
    sectors: SectorDistribution
    fidelity: float
    p2_norm: float


@dataclass(frozen=True)
class CascadeTrace:
    """Per-round output of :func:`cascade`.

    ``underflow`` is set when any sector mass was flushed to zero because it
    fell below :data:`UNDERFLOW_FLOOR`.
    """

    config: CascadeConfig
    records: tuple[RoundRecord, ...]
    underflow: bool = False

    def __len__(self) -> int:
        return len(self.records)

    @property
    def final(self) -> RoundRecord:
        return self.records[-1]


@dataclass(frozen=True)
class DetectorModel:
    """Detector with finite spectral bandwidth or, equivalently, an efficiency.

    Exactly one of ``omega`` (bandwidth in units of the photon bandwidth) and
    ``effective_eta`` is given; the other is derived on demand.
    """

    omega: float | None = None
    effective_eta: float | None = None

    def __post_init__(self) -> None:
        if (self.omega is None) == (self.effective_eta is None):
            raise ValueError("give exactly one of omega or effective_eta")
        if self.omega is not None and not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if self.effective_eta is not None:
            _check_unit("effective_eta", self.effective_eta)

    @property
    def eta(self) -> float:
        if self.effective_eta is not None:
            return self.effective_eta
        return bandwidth_to_efficiency(self.omega)

    @property
    def bandwidth(self) -> float:
        if self.omega is not None:
            return self.omega
        return efficiency_to_bandwidth(self.effective_eta)

    @property
    def efficiency(self) -> float:
        """Detection efficiency ``1 - eta``."""
        return 1.0 - self.eta


def _reject_unknown(data: Mapping[str, Any], allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown keys: {sorted(unknown)}")


def purify_fidelity(f: float) -> float:
    """Output fidelity of one ideal purification round with input fidelity ``f``.

    >>> purify_fidelity(0.75)
    0.9
    """
    f = _check_unit("fidelity", f)
    good = f * f
    bad = (1.0 - f) * (1.0 - f)
    return good / (good + bad)


def iterate_fidelity(f: float, n: int) -> float:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n!r}")
    f = _check_unit("fidelity", f)
    for _ in range(n):
        f = purify_fidelity(f)
    return f


def merge_round(pair: PairEnsemble) -> PairEnsemble:
    """Combine two identical copies of ``pair`` in one heralded round.

    Two-photon pairs succeed with probability 1/4, a two-photon pair with a
    one-photon pair with 1/2 (leaving one photon), two one-photon pairs with
    1/8 and a two-photon pair with an empty one with 1/2 (both leaving none).
    The returned sectors are unnormalized; their sum is this round's success
    probability.
    """
    p0, p1, p2 = pair.sectors.as_tuple()
    sectors = SectorDistribution(
        p0=p1 * p1 / 8.0 + p2 * p0 / 2.0,
        p1=p1 * p2 / 2.0,
        p2=p2 * p2 / 4.0,
    )
    return PairEnsemble(sectors, purify_fidelity(pair.fidelity))


def apply_loss(sectors: SectorDistribution, eta: float) -> SectorDistribution:
    """Send both photons of a pair through arms with intensity loss ``eta``."""
    eta = _check_unit("eta", eta)
    p0, p1, p2 = sectors.as_tuple()
    if eta == 0.0:
        return sectors
    if eta == 1.0:
        return SectorDistribution(p0 + p1 + p2, 0.0, 0.0)
    keep = 1.0 - eta
    return SectorDistribution(
        p0=p0 + p1 * eta + p2 * eta * eta,
        p1=p2 * 2.0 * eta * keep + p1 * keep,
        p2=p2 * keep * keep,
    )


def _flush(sectors: SectorDistribution) -> tuple[SectorDistribution, bool]:
    vals = sectors.as_tuple()
    if all(v == 0.0 or v >= UNDERFLOW_FLOOR for v in vals):
        return sectors, False
    return SectorDistribution(*(v if v >= UNDERFLOW_FLOOR else 0.0 for v in vals)), True


def _p2_norm(sectors: SectorDistribution) -> float:
    total = sectors.total
    if total == 0.0:
        return math.nan
    if sectors.p0 == 0.0 and sectors.p1 == 0.0:
        return 1.0
    return sectors.p2 / total


def cascade(config: CascadeConfig) -> CascadeTrace:
    """Run ``config.rounds`` purification rounds with loss between them.

    With ``BEFORE_ROUND`` placement every pair crosses the lossy channel before
    it is merged; with ``AFTER_ROUND`` the merged output crosses it.
    """
    pair = config.initial
    records = []
    underflow = False
    for _ in range(config.rounds):
        if config.loss_placement is LossPlacement.BEFORE_ROUND:
            pair = PairEnsemble(apply_loss(pair.sectors, config.eta), pair.fidelity)
            pair = merge_round(pair)
        else:
            pair = merge_round(pair)
            pair = PairEnsemble(apply_loss(pair.sectors, config.eta), pair.fidelity)
        sectors, flushed = _flush(pair.sectors)
        underflow |= flushed
        pair = PairEnsemble(sectors, pair.fidelity)
        records.append(RoundRecord(sectors, pair.fidelity, _p2_norm(sectors)))
    return CascadeTrace(config, tuple(records), underflow)


def closed_form_p2(n: int, eta: float) -> float:
    """Two-photon probability ``[(1 - eta)^2 / 4]^(2^n - 1)`` after ``n`` rounds."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    eta = _check_unit("eta", eta)
    base = 0.25 * (1.0 - eta) ** 2
    return base ** (2 ** int(n) - 1)


def normalized_two_photon_prob(trace: CascadeTrace) -> float:
    """Probability that a heralded output really holds two photons."""
    if not trace.records:
        raise ValueError("empty cascade trace")
    sectors = trace.final.sectors
    if sectors.total == 0.0:
        raise ZeroDivisionError("success probability vanished (total sector mass is 0)")
    return _p2_norm(sectors)


def effective_fidelity(trace: CascadeTrace) -> float:
    """Ideal-chain fidelity discounted by the normalized two-photon probability."""
    f = iterate_fidelity(trace.config.initial.fidelity, len(trace.records))
    return f * normalized_two_photon_prob(trace)


def bandwidth_to_efficiency(omega: float) -> float:
    """Loss ``eta`` equivalent to a detector of spectral half-width ``omega``.

    The detector sees the Gaussian photon spectrum only inside
    ``[-omega, omega]``, so ``1 - eta = erf(omega / sqrt(2))``.  The
    complementary function keeps ``eta`` accurate deep in the tail.
    """
    omega = float(omega)
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    return math.erfc(omega / math.sqrt(2.0))


def efficiency_to_bandwidth(eta: float) -> float:
    eta = float(eta)
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta!r}")
    return math.sqrt(2.0) * float(special.erfcinv(eta))


def resource_count(n: int, noise: NoiseModel | str = NoiseModel.DEPOLARIZING) -> int:
    """Number of raw pairs consumed by ``n`` cascaded rounds.

    Each bit-flip round halves the number of pairs; a depolarizing round needs
    a second pass in the Hadamard-rotated basis, so it quarters them.  The
    result is an exact Python integer and never wraps.
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    noise = NoiseModel(noise)
    base = 2 if noise is NoiseModel.BIT_FLIP_ONLY else 4
    return base ** int(n)
