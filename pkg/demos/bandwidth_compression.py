# # Bandwidth compression

# Opposite chirps on photon and escort (A1 = -A2 = A) narrow the spectrum of
# the upconverted photon. Chirping also changes the effective pulse-length
# ratio q, starting from q0 = sigma2^2 / sigma1^2.

import math

from sfg import DimensionlessParams, design, efficiency
from sfg.analytic import optimal_p_refined

q0 = 0.005
for q in (0.005, 0.01, 0.05, 0.1):
    A = design.compression_chirp(q0, q)
    ratio = design.compression_width_ratio(1.0, math.sqrt(q0), A)
    print(f"q={q:6g}  A={A:8.4f}  full/first-order width {ratio:.5f}")

# Equal bandwidths keep q = 1 for every chirp, so the best efficiency does
# not depend on how strongly the photon is compressed.

p, eff = optimal_p_refined(1.0)
print(f"best efficiency at q=1: {eff:.5f} (p={p:.4f})")
print("first-order bandwidth at A=5:", design.compressed_bandwidth_first_order(1.0, 1.0, 5.0))
print("width ratio at A=5:", design.compression_width_ratio(1.0, 1.0, 5.0))
