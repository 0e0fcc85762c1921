# # Entanglement after upconversion

# A narrow pump correlates signal and herald. The Renyi-2 entropy of either
# photon measures that entanglement; upconversion can only lower it.

import numpy as np

from sfg.analytic import input_purity, optimal_p_paper, upconverted_purity

for q in (1e-3, 1.0, 10.0):
    p = optimal_p_paper(q)
    print(f"q = {q}")
    for S in np.logspace(-1, 2, 4):
        r_in = input_purity(S, 1.0, 1.0).renyi2
        r_out = upconverted_purity(S, 1.0, 1.0, p, q).renyi2
        print(f"  S={S:7.2f}  in {r_in:.5f}  out {r_out:.5f}")
