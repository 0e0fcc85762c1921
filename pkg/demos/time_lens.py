# # A time lens

# A chirped escort writes a quadratic temporal phase onto the upconverted
# photon. Combined with chirps before and after the interaction it images
# the photon's temporal waveform.

import math

from sfg import design

lens = design.solve_time_lens(A1=150.0, A2=-100.0, sigma2=1.0)
print(lens)
print("imaging residual:", lens.residual())

# Simulating the lens on a grid shows the image width scales with the ratio
# of output to input chirp.

check = design.simulate_time_lens(lens, sigma1=1 / (2 * math.sqrt(150.0)), gamma=0.5)
print(f"width in {check.width_in:.4f} ps, width out {check.width_out:.4f} ps")
print(f"ratio {check.ratio:.5f}, -A3/A1 = {-lens.A3 / lens.A1:.5f}")

# With equal input and output chirps the same optics map arrival time onto
# frequency.

for A2 in (-1.0, -25.0, -100.0):
    print(f"A2={A2}: A1 = A3 = {design.time_to_frequency_chirp(A2, 1.0):.6f}")
