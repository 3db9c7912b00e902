"""Delay-Doppler <-> time-domain conversion.

Each delay tap is taken through a unitary inverse DFT along the Doppler
axis to the delay-time domain, then the delay-time block is read out row by
row, so sample ``n*M + l`` is delay tap ``l`` of time slot ``n``.
"""

import numpy as np

__all__ = ["dd_to_time", "time_to_dd"]


def dd_to_time(grid) -> np.ndarray:
    """Delay-Doppler grid(s) of shape ``(..., N, M)`` to samples ``(..., N*M)``.

    The transform is unitary, so total power is preserved.
    """
    g = np.asarray(grid)
    x_dt = np.fft.ifft(g, axis=-2, norm="ortho")
    return x_dt.reshape(g.shape[:-2] + (-1,))


def time_to_dd(samples, shape) -> np.ndarray:
    """Exact inverse of :func:`dd_to_time` for frame ``shape = (N, M)``."""
    s = np.asarray(samples)
    N, M = shape
    if s.shape[-1] != N * M:
        raise ValueError(f"{s.shape[-1]} samples do not match an {N}x{M} frame")
    x_dt = s.reshape(s.shape[:-1] + (N, M))
    return np.fft.fft(x_dt, axis=-2, norm="ortho")
