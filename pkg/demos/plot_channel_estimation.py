"""
Channel estimation walk-through
===============================

One frame through a three-path channel: correlate the received pilot region
against every shift of the pilot row, keep the peaks, then solve for the
gains row by row.
"""

import matplotlib

matplotlib.use("Agg")
from dataclasses import replace

import matplotlib.pyplot as plt
import numpy as np

from ddpilot import ChannelRealization, ExperimentConfig, EXAMPLE_CHANNEL, add_awgn, apply_channel, sigma_sq_for_snr
from ddpilot.estimator import build_detection_matrix
from ddpilot.pilots import build_sequence_pilot_frame
from ddpilot.simctl import format_demo, run_detect_demo, run_nmse

##############################################################################
# The demo configuration widens the guard to 14 rows so the path at Doppler
# tap 14 stays inside the search window.

cfg = replace(ExperimentConfig.defaults("detect-demo"), demo_snr_db=10.0)
result = run_detect_demo(cfg, np.random.default_rng(0))
print(format_demo(result))

##############################################################################
# Correlation map over the pilot region. Peaks sit at (Doppler, delay) of
# each path.

frame = cfg.frame
rng = np.random.default_rng(1)
bundle = build_sequence_pilot_frame(frame, rng=rng)
ch = ChannelRealization.from_triples(EXAMPLE_CHANNEL)
rx = add_awgn(apply_channel(bundle.grid, ch), sigma_sq_for_snr(10.0), rng)
region = rx[frame.pilot_doppler:frame.pilot_doppler + frame.doppler_search_max + 1]
score = np.abs(region @ build_detection_matrix(bundle.pilot_reference).conj().T)

fig, ax = plt.subplots(figsize=(7, 3.5))
im = ax.imshow(score, aspect="auto", origin="lower")
ax.set_xlabel("delay shift")
ax.set_ylabel("Doppler offset")
fig.colorbar(im)
fig.savefig("correlation_map.png", dpi=120)

##############################################################################
# Mean NMSE against SNR for both pilots, 200 trials per point.

rows = run_nmse(replace(ExperimentConfig.defaults("nmse"), trials=200))
fig, ax = plt.subplots(figsize=(6, 4))
for scheme in ("sequence", "pulse"):
    pts = [(r.snr_db, r.nmse_mean) for r in rows if r.scheme == scheme]
    ax.semilogy(*zip(*pts), marker="o", label=scheme)
ax.set_xlabel("SNR (dB)")
ax.set_ylabel("NMSE")
ax.legend()
fig.savefig("nmse_vs_snr.png", dpi=120)
