"""Discord is the resource, and an eavesdropper measuring K can spend it.

Eve intercepts the carrier after encoding and keeps outcome Pi(theta, phi).
We print the discord left between A and B over a coarse (theta, phi) grid.
"""

import numpy as np

from edss import adversary_scan, discord, partial_trace
from edss.protocols import build_alpha_initial, build_beta_resource

print(f"initial D_A|B, alpha resource: {discord(partial_trace(build_alpha_initial(), ['A', 'B']), 'B').value:.4f}")
print(f"initial D_A|B, beta resource:  {discord(build_beta_resource(), 'B').value:.4f}")

thetas = np.linspace(0, np.pi, 5)
phis = np.linspace(0, 2 * np.pi, 4, endpoint=False)
for protocol in ("alpha", "beta"):
    grid = adversary_scan(protocol, thetas, phis)
    print(f"\n{protocol}: rows theta = {np.round(thetas, 2).tolist()}, columns phi = {np.round(phis, 2).tolist()}")
    print(np.array2string(grid, precision=4, suppress_small=True))
