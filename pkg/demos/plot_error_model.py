"""
Least-squares error model
=========================

With P paths sharing a Doppler row, the gains come from a least-squares
solve over P shifted copies of the sequence. The error power follows from
the Gram matrix, whose spectrum is known exactly.
"""

import matplotlib

matplotlib.use("Agg")
from dataclasses import replace

import matplotlib.pyplot as plt
import numpy as np

from ddpilot import ExperimentConfig, generate_mseq
from ddpilot.metrics import ErrorModelInputs, exact_epsilon_sq, gram_matrix, prop1_epsilon_sq, snr_comparison
from ddpilot.simctl import run_prop1

##############################################################################
# Any set of distinct shifts gives diagonal 63 and off-diagonal -1.

G = gram_matrix([0, 11, 40], generate_mseq())
print(G)
print("eigenvalues", np.linalg.eigvalsh(G))

##############################################################################
# Closed form, exact trace value and a Monte Carlo estimate.

for r in run_prop1(replace(ExperimentConfig.defaults("prop1"), trials=20_000)):
    print(f"P={r.P}: closed form {r.eq13_value:.6f}  exact {r.exact_value:.6f}  "
          f"monte carlo {r.monte_carlo_value:.6f}")

P = np.arange(1, 33)
fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
ax[0].plot(P, [prop1_epsilon_sq(ErrorModelInputs(63, p)) for p in P], label="closed form")
ax[0].plot(P, [exact_epsilon_sq(ErrorModelInputs(63, p)) for p in P], label="exact")
ax[0].set_xlabel("P")
ax[0].set_ylabel("error power per coefficient")
ax[0].legend()

##############################################################################
# The SNR loss relative to a pulse pilot grows with P and shrinks with M.

for p in (2, 4, 6):
    M = np.arange(16, 129)
    ax[1].plot(M, [snr_comparison(m, p, 1.0)[1] for m in M], label=f"P={p}")
ax[1].set_xlabel("M")
ax[1].set_ylabel("deviation d")
ax[1].legend()
fig.tight_layout()
fig.savefig("error_model.png", dpi=120)
