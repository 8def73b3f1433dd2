"""Loss in a cascade of purification rounds.

Heralding does not filter photon loss, so the probability that a heralded pair
really holds two photons drops round after round.  Where the channel sits
matters: losing photons before each merge is worse than losing them after.
"""
import numpy as np

from pbspurify.sector_model import (
    CascadeConfig,
    cascade,
    closed_form_p2,
    normalized_two_photon_prob,
)

# Three rounds at 1% loss per arm.
for placement in ("before", "after"):
    trace = cascade(CascadeConfig(3, 0.01, placement))
    print(f"loss {placement} each round: P2/Psuccess = {normalized_two_photon_prob(trace):.4f}")

# The after-round recursion reproduces the closed form exactly.
for n in range(1, 5):
    p2 = cascade(CascadeConfig(n, 0.1, "after")).final.sectors.p2
    print(f"n={n}: cascade P2 = {p2:.6e}, closed form = {closed_form_p2(n, 0.1):.6e}")

etas = np.linspace(0, 0.1, 21)
table = np.array([[normalized_two_photon_prob(cascade(CascadeConfig(n, e))) for e in etas]
                  for n in (1, 2, 3, 4)])

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    for n, row in zip((1, 2, 3, 4), table):
        plt.plot(etas, row, label=f"{n} rounds")
    plt.xlabel("loss per arm")
    plt.ylabel("P2 / P_success")
    plt.legend()
    plt.savefig("loss_cascade.png")
