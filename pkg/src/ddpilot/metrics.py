"""PAPR/CCDF, channel NMSE, and the least-squares error model.

The error model compares the closed form for the mean per-coefficient
error power of the least-squares gain estimate against an exact value
computed from the true spectrum of the M-sequence Gram matrix.  The Gram
matrix of P distinct shifts is ``(M + 1) I - J``, whose spectrum is
``{M + 1 - P, M + 1, ..., M + 1}``; the closed form uses ``M`` for the
repeated eigenvalue, which overstates the error by up to ~1.3% for M = 63
and P <= 6.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedPaprError
from .estimator import shift_matrix

__all__ = [
    "CcdfCurve",
    "ErrorModelInputs",
    "ccdf",
    "exact_epsilon_sq",
    "gram_eigenvalues",
    "gram_matrix",
    "nmse",
    "papr_db",
    "prop1_epsilon_sq",
    "snr_comparison",
]


def papr_db(samples) -> np.ndarray | float:
    """Peak-to-average power ratio in dB over the last axis.

    Raises
    ------
    UndefinedPaprError
        If any stream is entirely zero.
    """
    s = np.asarray(samples)
    p = s.real**2 + s.imag**2
    mean = p.mean(axis=-1)
    if np.any(mean == 0):
        raise UndefinedPaprError("PAPR of an all-zero sample stream is undefined")
    out = 10 * np.log10(p.max(axis=-1) / mean)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CcdfCurve:
    thresholds_db: np.ndarray
    exceed_prob: np.ndarray

    def crossing_db(self, level: float) -> float:
        """Smallest threshold at which the exceedance probability is <= ``level``."""
        ok = np.flatnonzero(self.exceed_prob <= level)
        return float(self.thresholds_db[ok[0]]) if ok.size else float("inf")


def ccdf(values_db, thresholds_db) -> CcdfCurve:
    """Empirical ``P(value > threshold)`` on each threshold."""
    v = np.sort(np.asarray(values_db, dtype=float).ravel())
    if v.size == 0:
        raise ValueError("ccdf of an empty sample")
    t = np.asarray(thresholds_db, dtype=float)
    above = v.size - np.searchsorted(v, t, side="right")
    return CcdfCurve(t, above / v.size)


def nmse(true_ch, estimates, frame_shape) -> float:
    """Grid-level NMSE; missed paths and false alarms both count as error."""
    N, M = frame_shape
    H = true_ch.response(N, M)
    H_hat = np.zeros_like(H)
    for e in estimates:
        H_hat[e.doppler_tap % N, e.delay_tap % M] += e.gain_hat
    ref = np.sum(np.abs(H) ** 2)
    if ref == 0:
        raise ValueError("true channel has zero energy")
    return float(np.sum(np.abs(H_hat - H) ** 2) / ref)


@dataclass(frozen=True)
class ErrorModelInputs:
    m_len: int
    p_paths: int
    sigma_sq: float = 1.0

    def __post_init__(self):
        if not 1 <= self.p_paths <= self.m_len:
            raise ValueError(f"need 1 <= P <= M, got P={self.p_paths}, M={self.m_len}")
        if self.sigma_sq < 0:
            raise ValueError("sigma_sq must be non-negative")


def gram_matrix(shifts, pilot_row) -> np.ndarray:
    """``X^H X`` for the pilot row shifted by each of ``shifts``."""
    shifts = list(shifts)
    if len(set(shifts)) != len(shifts):
        raise ValueError(f"shifts must be distinct: {shifts}")
    X = shift_matrix(pilot_row, shifts)
    return X.conj().T @ X


def gram_eigenvalues(P: int, M: int) -> np.ndarray:
    """Exact ascending spectrum of the diag-M / off-diag-(-1) ``P x P`` matrix."""
    if not 1 <= P <= M:
        raise ValueError(f"need 1 <= P <= M, got P={P}, M={M}")
    return np.array([M + 1 - P] + [M + 1] * (P - 1), dtype=float)


def prop1_epsilon_sq(inputs: ErrorModelInputs) -> float:
    """Closed form ``(MP - (P-1)^2) / (MP (M - P + 1)) * sigma^2``."""
    M, P = inputs.m_len, inputs.p_paths
    return (M * P - (P - 1) ** 2) / (M * P * (M - P + 1)) * inputs.sigma_sq


def exact_epsilon_sq(inputs: ErrorModelInputs) -> float:
    """``(sigma^2 / P) * trace(G^-1)`` from the exact Gram spectrum."""
    M, P = inputs.m_len, inputs.p_paths
    return inputs.sigma_sq / P * float(np.sum(1.0 / gram_eigenvalues(P, M)))


def snr_comparison(M: int, P: int, snr_pulse: float) -> tuple[float, float]:
    """Equivalent sequence-pilot SNR and its deviation term.

    Returns ``(snr_seq, d)`` with ``d = (P - 1) / (P (M - P + 1))`` and
    ``snr_seq = snr_pulse / (1 + d)``; linear SNR in and out.
    """
    if not 1 <= P <= M:
        raise ValueError(f"need 1 <= P <= M, got P={P}, M={M}")
    if snr_pulse <= 0:
        raise ValueError("snr_pulse must be positive")
    d = (P - 1) / (P * (M - P + 1))
    return snr_pulse / (1 + d), d
