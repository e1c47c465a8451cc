"""Memories dephased at p1, p2 and a depolarized carrier at p3.

delta_alpha_beta = N_beta - N_alpha; the DED deltas are clipped at zero so
only the EDSS deficit relative to a directly shared Bell pair shows up.
"""

import numpy as np

from edss import sweep_grid_delta

grid = np.linspace(0, 1, 5)
for p3 in (0.1, 0.4):
    recs = sweep_grid_delta("dephasing", "depolarizing", grid, grid, p3=p3)
    table = np.array([r.delta_alpha_ded for r in recs]).reshape(len(grid), len(grid))
    print(f"\np3 = {p3}: delta_alpha_DED (rows p1, columns p2 = {grid.tolist()})")
    print(np.array2string(table, precision=3, suppress_small=True))
