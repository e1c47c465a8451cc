"""Noise on the transmitted system only: EDSS carrier versus a DED Bell pair.

A short version of the single-channel study.  The full 101-point curves
come from ``edss sweep --model single --carrier-noise <kind> --out file.csv``.
"""

import numpy as np

from edss import sweep_single_channel

grid = np.round(np.linspace(0, 1, 6), 2)
protocols = ("alpha", "beta-1", "beta-4", "ded")
for kind in ("depolarizing", "dephasing", "amplitude-damping"):
    rows = sweep_single_channel(kind, grid, protocols)
    print(f"\n{kind}")
    print("   p   " + "".join(f"{name:>10s}" for name in protocols))
    for i, p in enumerate(grid):
        vals = rows[i * len(protocols) : (i + 1) * len(protocols)]
        print(f"{p:5.2f}  " + "".join(f"{r.negativity:10.4f}" for r in vals))
