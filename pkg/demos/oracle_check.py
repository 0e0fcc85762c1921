# # Closed form versus brute force

# The closed-form output waveform can be checked against a direct
# simulation: sample the input pair and the escort on a grid, then sum the
# interaction series order by order.

import math

import numpy as np

from sfg import analytic, oracle, reduce
from sfg.model import realize

# An entangled, chirped and delayed configuration.

photon, escort, gamma = realize(2.0, 1.0, 0.5, A1=0.5, A2=-0.3, S=1.0)
print(photon)
print(escort)

axes = oracle.default_axes(photon, escort, gamma, n=1024, n_h=512)
f0 = oracle.sample_input(photon, *axes)
g = oracle.sample_escort(escort, axes[0])
f1, f3 = oracle.recursion_upconvert(f0, g, gamma)

closed = oracle.sample_function(lambda t, th: analytic.f3f(photon, escort, gamma, t, th), *axes)
rel = math.sqrt(np.sum(np.abs(f3.data - closed.data) ** 2) / np.sum(np.abs(closed.data) ** 2))
print(f"relative L2 difference: {rel:.2e}")

# Photon number is shared between the two modes and nothing is lost.

print("upconverted:", oracle.grid_efficiency(f3))
print("remaining:  ", oracle.grid_efficiency(f1))
print("series:     ", analytic.efficiency(reduce(photon, escort, gamma)).value)
