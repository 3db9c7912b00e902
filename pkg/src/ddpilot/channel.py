"""Integer-tap delay-Doppler channel: random draws, coupling, and AWGN."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidProfileError
from .frame import ChannelRealization, Path

__all__ = ["ChannelProfile", "add_awgn", "apply_channel", "awgn", "draw_channel", "sigma_sq_for_snr"]


@dataclass(frozen=True)
class ChannelProfile:
    """Delay/Doppler tap profile of the limited Doppler-shift channel.

    ``pairing="paired"`` couples ``delay_taps[i]`` with ``doppler_taps[i]``;
    ``"random-doppler"`` draws each path's Doppler uniformly from the profile,
    redrawing on a tap collision.  Gains are i.i.d. CN(0, 1/P).
    """

    delay_taps: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    doppler_taps: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    pairing: str = "paired"

    def __post_init__(self):
        object.__setattr__(self, "delay_taps", tuple(int(t) for t in self.delay_taps))
        object.__setattr__(self, "doppler_taps", tuple(int(t) for t in self.doppler_taps))
        if not self.delay_taps or not self.doppler_taps:
            raise InvalidProfileError("profile needs at least one delay and one Doppler tap")
        if self.pairing not in ("paired", "random-doppler"):
            raise InvalidProfileError(f"unknown pairing {self.pairing!r}")
        if self.pairing == "paired":
            if len(self.delay_taps) != len(self.doppler_taps):
                raise InvalidProfileError("paired profile needs equal-length tap lists")
            pairs = list(zip(self.delay_taps, self.doppler_taps))
            if len(set(pairs)) != len(pairs):
                raise InvalidProfileError(f"duplicate (delay, Doppler) pairs in {pairs}")
        elif len(set(self.doppler_taps)) < max(
            self.delay_taps.count(t) for t in set(self.delay_taps)
        ):
            raise InvalidProfileError("not enough Doppler taps to separate repeated delays")

    @property
    def n_paths(self) -> int:
        return len(self.delay_taps)

    def check_frame(self, n_doppler: int, m_delay: int) -> None:
        if any(not 0 <= t < m_delay for t in self.delay_taps):
            raise InvalidProfileError(f"delay taps {self.delay_taps} exceed M={m_delay}")
        if any(not 0 <= v < n_doppler for v in self.doppler_taps):
            raise InvalidProfileError(f"Doppler taps {self.doppler_taps} exceed N={n_doppler}")


def draw_channel(profile: ChannelProfile, rng: np.random.Generator) -> ChannelRealization:
    """Draw one channel, one path per delay tap in ``profile``."""
    P = profile.n_paths
    gains = (rng.standard_normal(P) + 1j * rng.standard_normal(P)) * np.sqrt(0.5 / P)
    if profile.pairing == "paired":
        dopplers = list(profile.doppler_taps)
    else:
        dopplers = []
        used = set()
        choices = np.asarray(profile.doppler_taps)
        for tau in profile.delay_taps:
            nu = int(rng.choice(choices))
            while (tau, nu) in used:
                nu = int(rng.choice(choices))
            used.add((tau, nu))
            dopplers.append(nu)
    return ChannelRealization(
        tuple(Path(complex(h), t, v) for h, t, v in zip(gains, profile.delay_taps, dopplers))
    )


def apply_channel(grid, channel: ChannelRealization) -> np.ndarray:
    """Doubly-cyclic coupling ``Y[k, l] = sum_p h_p X[k - nu_p, l - tau_p]``.

    Works on a single grid or a batch ``(..., N, M)``.
    """
    x = np.asarray(grid)
    N, M = x.shape[-2:]
    y = np.zeros(x.shape, dtype=np.result_type(x, np.complex128))
    for p in channel.paths:
        p.check_bounds(N, M)
        y += p.gain * np.roll(x, (p.doppler_tap, p.delay_tap), axis=(-2, -1))
    return y


def awgn(shape, sigma_sq: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples of variance ``sigma_sq``."""
    if sigma_sq < 0:
        raise ValueError(f"noise variance must be non-negative, got {sigma_sq}")
    scale = np.sqrt(sigma_sq / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def add_awgn(grid, sigma_sq: float, rng: np.random.Generator) -> np.ndarray:
    """Add CN(0, ``sigma_sq``) noise to every cell; zero variance is a copy."""
    g = np.asarray(grid, dtype=np.complex128)
    if sigma_sq == 0:
        return g.copy()
    return g + awgn(g.shape, sigma_sq, rng)


def sigma_sq_for_snr(snr_db: float, data_symbol_energy: float = 1.0) -> float:
    """Noise variance for ``SNR = E_d / sigma^2`` given in dB."""
    return data_symbol_energy / 10 ** (snr_db / 10)
