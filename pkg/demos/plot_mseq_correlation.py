"""
M-sequence correlation
======================

A length-63 M-sequence correlates to 63 with itself and to -1 with every
cyclic shift. That two-level profile is what lets a receiver pick out
delayed copies of the pilot row.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ddpilot import LfsrSpec, generate_mseq, periodic_correlation, primitive_polynomials
from ddpilot.pilots import sequence_pilot_row
from ddpilot.frame import FrameConfig

##############################################################################
# Generate the degree-6 sequence (polynomial x^6 + x + 1) and correlate it
# against itself.

s = generate_mseq(LfsrSpec(6, (6, 1)))
acf = periodic_correlation(s, s)
print("length", s.size, "lag 0:", acf[0], "other lags:", set(acf[1:].tolist()))

##############################################################################
# Every primitive polynomial of a given degree gives the same profile.

for degree in (3, 4, 5, 6):
    polys = primitive_polynomials(degree)
    print(f"degree {degree}: {len(polys)} primitive polynomials")

##############################################################################
# The frame has 64 delay taps, so the pilot row carries one extra entry.
# The padded row loses the ideal profile; its worst sidelobe is what the
# detector's floor has to clear.

cfg = FrameConfig()
row = sequence_pilot_row(cfg) / np.sqrt(21)
padded = periodic_correlation(row, row).real

fig, ax = plt.subplots(1, 2, figsize=(9, 3.2), sharey=True)
ax[0].stem(acf)
ax[0].set_title("63-chip M-sequence")
ax[1].stem(padded)
ax[1].set_title("64-entry pilot row")
for a in ax:
    a.set_xlabel("lag")
ax[0].set_ylabel("periodic correlation")
fig.tight_layout()
fig.savefig("mseq_correlation.png", dpi=120)
print("worst sidelobe of padded row:", np.max(np.abs(padded[1:])))
