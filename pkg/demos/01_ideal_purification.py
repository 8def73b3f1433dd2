"""Ideal purification: output fidelity against input fidelity.

A round only helps when the input fidelity is above one half; iterating it
drives the fidelity to one, while the number of raw pairs consumed grows
geometrically.
"""
import numpy as np

from pbspurify.sector_model import iterate_fidelity, purify_fidelity, resource_count

f = np.linspace(0.5, 1.0, 11)
print(" F      F'")
for x in f:
    print(f"{x:.2f}  {purify_fidelity(x):.4f}")

# Three rounds from F = 0.7, and the pairs they cost.
for n in range(4):
    print(f"round {n}: F = {iterate_fidelity(0.7, n):.6f}, "
          f"pairs (bit-flip) = {resource_count(n, 'bitflip')}, "
          f"pairs (depolarizing) = {resource_count(n, 'depolarizing')}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    grid = np.linspace(0, 1, 201)
    plt.plot(grid, [purify_fidelity(x) for x in grid], label="F'")
    plt.plot(grid, grid, "--", label="F' = F")
    plt.xlabel("F")
    plt.ylabel("F'")
    plt.legend()
    plt.savefig("ideal_purification.png")
