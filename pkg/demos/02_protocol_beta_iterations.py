"""Protocol beta: iterating a CPHASE carrier on a discordant Bell-diagonal pair.

Each round uses a fresh carrier (I - sigma_x / 2) / 2 and keeps the |x_1>
outcome.  The entanglement grows towards 1/6 while each round succeeds with
a probability that also grows.
"""

from edss import negativity, run_beta
from edss.protocols import CUT_A_BK

out = run_beta(iterations=4)
print(f"N_A:BK after the first encoding: {negativity(out.transmissions[0].encoded, CUT_A_BK):.6f}")
print("\nround   N_A:B     P(round)   P(all rounds so far)")
cumulative = 1.0
for i, (n, p) in enumerate(zip(out.iteration_negativities, out.iteration_probabilities), 1):
    cumulative *= p
    print(f"{i:5d}   {n:.6f}  {p:.6f}   {cumulative:.6f}")
print(f"\nlargest K:AB negativity seen in any round: {out.max_carrier_negativity():.1e}")
