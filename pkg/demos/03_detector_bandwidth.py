"""Finite detector bandwidth as an effective loss.

A detector that only sees the central +-omega of a Gaussian photon spectrum
behaves like one with efficiency erf(omega / sqrt(2)).  Turning a loss budget
into a bandwidth requirement is the inverse map.
"""
from pbspurify.sector_model import (
    CascadeConfig,
    DetectorModel,
    cascade,
    normalized_two_photon_prob,
)

for omega in (0.5, 1.0, 2.0, 3.0, 4.0):
    det = DetectorModel(omega=omega)
    trace = cascade(CascadeConfig(3, det.eta))
    print(f"omega={omega:.1f}: eta={det.eta:.3e}, "
          f"three-round P2/Psuccess={normalized_two_photon_prob(trace):.4f}")

# Bandwidth needed for at most 1% effective loss.
print("omega for eta = 0.01:", DetectorModel(effective_eta=0.01).bandwidth)
