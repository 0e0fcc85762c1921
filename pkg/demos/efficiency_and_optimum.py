# # Upconversion efficiency

# The probability that a single photon is upconverted depends on three
# dimensionless numbers: the scaled coupling p, the scaled delay T between
# photon and escort, and the pulse-length ratio q.

import math

import numpy as np

from sfg import DimensionlessParams, efficiency, efficiency_lowq
from sfg.analytic import optimal_p_paper, optimal_p_refined

# With a much longer escort (small q) the photon sees an almost constant
# field and the efficiency oscillates like sin^2 in p.

for p in np.linspace(0, 2 * math.pi, 9):
    val = efficiency(DimensionlessParams(p=p, q=1e-4)).value
    print(f"p={p:5.3f}  series={val:.6f}  lowq={efficiency_lowq(p, 0.0):.6f}")

# For comparable pulse lengths the oscillation washes out. The series result
# carries its own bookkeeping.

res = efficiency(DimensionlessParams(p=2.0, q=1.0))
print(res)

# A quick estimate of the best coupling comes from truncating the series at
# four terms. Refining on the full series gives the true maximum.

for q in (1e-3, 0.1, 1.0, 10.0, 100.0):
    p_est = optimal_p_paper(q)
    eff_est = efficiency(DimensionlessParams(p=p_est, q=q)).value
    p_best, eff_best = optimal_p_refined(q)
    print(f"q={q:7g}  estimate p={p_est:.4f} ({eff_est:.5f})  best p={p_best:.4f} ({eff_best:.5f})")
