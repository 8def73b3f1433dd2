"""Sparse Fock-state engine for the two-party PBS parity check.

Every photon lives in a mode labelled by party (A/B), path, polarization and
an index into that party's orthonormal temporal basis.  States are sparse
maps from occupation tuples over the fixed mode list to complex amplitudes.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import defaultdict
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .temporal import WavePacketConvention, build_temporal_basis

__all__ = [
    "PARTIES",
    "PATHS",
    "POLARIZATIONS",
    "TEMPORAL_DIM",
    "OUTCOMES",
    "ModeIndex",
    "FockVector",
    "BranchLabel",
    "transform",
    "prepare_branch_state",
    "apply_pbs",
    "project_detection",
    "rejected_mass",
    "apply_correction",
    "bell_projector",
]

PARTIES = ("A", "B")
PATHS = ("in1", "in2", "out_keep", "out_detect")
POLARIZATIONS = ("H", "V")
TEMPORAL_DIM = 2

OUTCOMES = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))


class ModeIndex(NamedTuple):
    party: str
    path: str
    polarization: str
    temporal: int = 0


MODES: tuple[ModeIndex, ...] = tuple(
    ModeIndex(*m)
    for m in itertools.product(PARTIES, PATHS, POLARIZATIONS, range(TEMPORAL_DIM))
)
_MODE_POS = {m: i for i, m in enumerate(MODES)}


def _occupation(modes: Iterable[ModeIndex]) -> tuple[int, ...]:
    occ = [0] * len(MODES)
    for m in modes:
        occ[_MODE_POS[m]] += 1
    return tuple(occ)


def _creations(occ: Sequence[int]) -> list[ModeIndex]:
    return [MODES[i] for i, n in enumerate(occ) for _ in range(n)]


def _fact_sqrt(occ: Sequence[int]) -> float:
    return math.sqrt(math.prod(math.factorial(n) for n in occ if n > 1))


class FockVector:
    """Sparse superposition of Fock basis states.

    Parameters
    ----------
    amplitudes : mapping
        Occupation tuple (over :data:`MODES`) -> complex amplitude.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes: Mapping[tuple[int, ...], complex] | None = None):
        self._amps: dict[tuple[int, ...], complex] = {}
        for occ, amp in (amplitudes or {}).items():
            if amp != 0:
                self._amps[tuple(occ)] = complex(amp)

    @classmethod
    def from_creations(
        cls, terms: Iterable[tuple[complex, Sequence[ModeIndex]]], tol: float = 0.0
    ) -> "FockVector":
        """Build ``sum_t amp_t * prod(a_dag[m] for m in modes_t) |0>``."""
        acc: dict[tuple[int, ...], complex] = defaultdict(complex)
        for amp, modes in terms:
            occ = _occupation(modes)
            acc[occ] += amp * _fact_sqrt(occ)
        return cls({k: v for k, v in acc.items() if abs(v) > tol})

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], complex]]:
        return iter(self._amps.items())

    def __len__(self) -> int:
        return len(self._amps)

    def __getitem__(self, modes: Sequence[ModeIndex]) -> complex:
        return self._amps.get(_occupation(modes), 0j)

    def terms(self) -> list[tuple[complex, list[ModeIndex]]]:
        """Amplitudes paired with the occupied modes (repeated per photon)."""
        return [(amp, _creations(occ)) for occ, amp in self._amps.items()]

    def norm2(self) -> float:
        return float(sum(abs(a) ** 2 for a in self._amps.values()))

    def photon_number(self) -> int:
        numbers = {sum(occ) for occ in self._amps}
        if len(numbers) > 1:
            raise ValueError(f"state is not photon-number homogeneous: {sorted(numbers)}")
        return numbers.pop() if numbers else 0

    def __repr__(self) -> str:
        return f"FockVector({len(self)} terms, norm2={self.norm2():.6g})"


def transform(
    state: FockVector, mapping: Mapping[ModeIndex, Sequence[tuple[ModeIndex, complex]]]
) -> FockVector:
    """Apply a linear map on creation operators; unlisted modes are untouched."""
    terms = []
    for occ, amp in state:
        base = amp / _fact_sqrt(occ)
        choices = [mapping.get(m, ((m, 1.0),)) for m in _creations(occ)]
        for combo in itertools.product(*choices):
            coeff = base
            for _, c in combo:
                coeff *= c
            terms.append((coeff, [m for m, _ in combo]))
    return FockVector.from_creations(terms)


class BranchLabel(enum.Enum):
    PHI_PLUS = "phi+"
    PSI_PLUS = "psi+"

    def polarization_terms(self) -> tuple[tuple[str, str, float], ...]:
        s = 1.0 / math.sqrt(2.0)
        if self is BranchLabel.PHI_PLUS:
            return (("H", "H", s), ("V", "V", s))
        return (("H", "V", s), ("V", "H", s))


def prepare_branch_state(
    b1: BranchLabel,
    b2: BranchLabel,
    tau1: float,
    tau2: float,
    conv: WavePacketConvention,
) -> FockVector:
    """Two Bell pairs entering the parity check.

    Pair 1 feeds ``in1`` of both parties at delay 0; pair 2 feeds ``in2`` with
    party A's photon delayed by ``tau1`` and party B's by ``tau2``.  Each
    photon's wave-packet is expanded in its party's orthonormal basis.
    """
    packets = {}
    for party, tau in (("A", tau1), ("B", tau2)):
        basis = build_temporal_basis([0.0, tau], conv)
        packets[party, "in1"] = basis.coeffs[0]
        packets[party, "in2"] = basis.coeffs[1]

    def photon(party: str, path: str, pol: str) -> list[tuple[ModeIndex, float]]:
        return [
            (ModeIndex(party, path, pol, k), c)
            for k, c in enumerate(packets[party, path])
            if c != 0.0
        ]

    terms = []
    for pa1, pb1, c1 in BranchLabel(b1).polarization_terms():
        for pa2, pb2, c2 in BranchLabel(b2).polarization_terms():
            factors = [
                photon("A", "in1", pa1),
                photon("B", "in1", pb1),
                photon("A", "in2", pa2),
                photon("B", "in2", pb2),
            ]
            for combo in itertools.product(*factors):
                amp = c1 * c2 * math.prod(c for _, c in combo)
                terms.append((amp, [m for m, _ in combo]))
    return FockVector.from_creations(terms)


def apply_pbs(state: FockVector, party: str, reflection_phase: complex = 1j) -> FockVector:
    """Polarizing beamsplitter of ``party``: H transmitted, V reflected.

    ``in1`` H -> ``out_keep``, ``in2`` H -> ``out_detect``, ``in1`` V ->
    ``out_detect`` and ``in2`` V -> ``out_keep``; reflections pick up
    ``reflection_phase``.
    """
    if party not in PARTIES:
        raise ValueError(f"unknown party {party!r}")
    state.photon_number()
    mapping = {}
    for k in range(TEMPORAL_DIM):
        mapping[ModeIndex(party, "in1", "H", k)] = ((ModeIndex(party, "out_keep", "H", k), 1.0),)
        mapping[ModeIndex(party, "in2", "H", k)] = ((ModeIndex(party, "out_detect", "H", k), 1.0),)
        mapping[ModeIndex(party, "in1", "V", k)] = (
            (ModeIndex(party, "out_detect", "V", k), reflection_phase),
        )
        mapping[ModeIndex(party, "in2", "V", k)] = (
            (ModeIndex(party, "out_keep", "V", k), reflection_phase),
        )
    return transform(state, mapping)


_DIAG = {"+": {"H": 1 / math.sqrt(2.0), "V": 1 / math.sqrt(2.0)},
         "-": {"H": 1 / math.sqrt(2.0), "V": -1 / math.sqrt(2.0)}}
_POL = {"H": 0, "V": 1}


def _split_ports(modes: Sequence[ModeIndex]):
    detect = {p: [m for m in modes if m.party == p and m.path == "out_detect"] for p in PARTIES}
    keep = {p: [m for m in modes if m.party == p and m.path == "out_keep"] for p in PARTIES}
    return detect, keep


def project_detection(state: FockVector, outcome: tuple[str, str]) -> tuple[np.ndarray, float]:
    """Herald one photon per detector in the diagonal basis.

    Detectors resolve photon number but not arrival time, so temporal indices
    of detected and kept photons are traced out.

    Returns
    -------
    rho : ndarray, shape (4, 4)
        Unnormalized polarization state of the kept photons in the basis
        HH, HV, VH, VV (party A first).
    prob : float
        Probability of ``outcome``; equals ``trace(rho)``.
    """
    if state.photon_number() != 4:
        raise ValueError("detection projection expects a 4-photon state")
    s_a, s_b = outcome
    vectors: dict[tuple[int, int, int, int], np.ndarray] = defaultdict(
        lambda: np.zeros(4, dtype=complex)
    )
    for amp, modes in state.terms():
        detect, keep = _split_ports(modes)
        if len(detect["A"]) != 1 or len(detect["B"]) != 1:
            continue
        (da,), (db,) = detect["A"], detect["B"]
        (ka,), (kb,) = keep["A"], keep["B"]
        coeff = amp * _DIAG[s_a][da.polarization] * _DIAG[s_b][db.polarization]
        key = (da.temporal, db.temporal, ka.temporal, kb.temporal)
        vectors[key][2 * _POL[ka.polarization] + _POL[kb.polarization]] += coeff
    rho = np.zeros((4, 4), dtype=complex)
    for v in vectors.values():
        rho += np.outer(v, v.conj())
    return rho, float(np.trace(rho).real)


def rejected_mass(state: FockVector) -> float:
    """Probability of anything other than one photon at each detector."""
    total = 0.0
    for amp, modes in state.terms():
        detect, _ = _split_ports(modes)
        if len(detect["A"]) != 1 or len(detect["B"]) != 1:
            total += abs(amp) ** 2
    return total


_Z_A = np.diag([1.0, 1.0, -1.0, -1.0])


def apply_correction(rho: np.ndarray, outcome: tuple[str, str]) -> np.ndarray:
    """Phase-flip party A's kept photon when the two detectors disagree."""
    if outcome[0] == outcome[1]:
        return rho
    return _Z_A @ rho @ _Z_A


def bell_projector(label: str = "phi+") -> np.ndarray:
    """Projector onto a Bell state in the HH, HV, VH, VV basis."""
    s = 1 / math.sqrt(2.0)
    vecs = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    v = np.array(vecs[label], dtype=complex)
    return np.outer(v, v.conj())
