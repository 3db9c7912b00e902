"""Transmit frame builders: sequence pilot, pulse pilot, and data only.

Both pilot designs reserve the same ``(2G + 1) x M`` region around the
pilot row and spend the same power budget on it, ``(2G + 1) * M * E_d``.
The sequence design spreads the budget evenly over the M cells of the pilot
row; the pulse design puts all of it in one cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame import FrameConfig, new_grid, total_power
from .mseq import generate_mseq

__all__ = [
    "FrameBundle",
    "PilotLayout",
    "boost_factor",
    "build_data_only_frame",
    "build_pulse_pilot_frame",
    "build_sequence_pilot_frame",
    "generate_qpsk_data",
    "pilot_power_ratio_db",
    "pilot_region_budget",
    "sequence_pilot_row",
]


@dataclass(frozen=True)
class PilotLayout:
    kind: str  # "sequence", "pulse" or "none"
    pilot_doppler: int
    guard_half_width: int
    pulse_delay: int
    boost_factor: float


@dataclass
class FrameBundle:
    """A transmit grid together with what the receiver is allowed to know.

    ``pilot_reference`` is the transmitted pilot row for the sequence design
    and the complex pulse amplitude for the pulse design.  ``pilot_mask``,
    ``guard_mask`` and ``data_mask`` partition the grid.
    """

    grid: np.ndarray
    layout: PilotLayout
    pilot_reference: np.ndarray | complex | None
    pilot_mask: np.ndarray
    guard_mask: np.ndarray
    data_mask: np.ndarray

    def pilot_region_power(self) -> float:
        return total_power(self.grid[self.pilot_mask | self.guard_mask])


def pilot_region_budget(config: FrameConfig) -> float:
    """Total power available to the pilot and its guard rows."""
    return (2 * config.guard_half_width + 1) * config.m_delay * config.data_symbol_energy


def boost_factor(config: FrameConfig) -> float:
    """Amplitude scale of each sequence-pilot entry, ``sqrt((2G + 1) E_d)``."""
    if config.guard_half_width < 0:
        raise ValueError("guard_half_width must be non-negative")
    return float(np.sqrt((2 * config.guard_half_width + 1) * config.data_symbol_energy))


def pilot_power_ratio_db(config: FrameConfig) -> float:
    """Total sequence-pilot power over one data symbol's energy, in dB."""
    total = config.m_delay * boost_factor(config) ** 2
    return float(10 * np.log10(total / config.data_symbol_energy))


def generate_qpsk_data(count: int, energy: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform i.i.d. QPSK symbols with per-symbol energy ``energy``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    bits = rng.integers(0, 2, size=(2, count))
    return np.sqrt(energy / 2) * ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1]))


def _masks(config: FrameConfig):
    N, M = config.shape
    region = np.zeros((N, M), dtype=bool)
    region[config.guard_rows] = True
    return region, ~region


def _fill_data(grid, config, data, rng):
    if data is None:
        data = generate_qpsk_data(config.n_data, config.data_symbol_energy, rng)
    data = np.asarray(data)
    if data.shape != (config.n_data,):
        raise ValueError(f"expected {config.n_data} data symbols, got {data.shape}")
    grid[config.data_rows] = data.reshape(-1, config.m_delay)


def sequence_pilot_row(config: FrameConfig, seq=None) -> np.ndarray:
    """Boosted pilot row; a length ``M - 1`` sequence gets a ``+boost`` dummy."""
    M = config.m_delay
    seq = generate_mseq(config.sequence) if seq is None else np.asarray(seq)
    if seq.ndim != 1 or seq.size > M:
        raise ValueError(f"sequence of length {seq.size} does not fit {M} delay taps")
    if seq.size < M - 1:
        raise ValueError(f"sequence length must be M or M - 1, got {seq.size}")
    if seq.size == M - 1:
        seq = np.append(seq, 1)
    return boost_factor(config) * seq.astype(np.complex128)


def build_sequence_pilot_frame(
    config: FrameConfig,
    seq=None,
    data=None,
    rng: np.random.Generator | None = None,
) -> FrameBundle:
    """Pilot row at ``k0``, zero guard rows on both sides, data elsewhere.

    Parameters
    ----------
    config : FrameConfig
    seq : array_like, optional
        Bipolar sequence of length M or M - 1; generated from
        ``config.sequence`` when omitted.
    data : array_like, optional
        ``config.n_data`` symbols, placed row-major into the data rows.  Drawn
        as QPSK from ``rng`` when omitted.
    rng : numpy.random.Generator, optional
    """
    row = sequence_pilot_row(config, seq)
    grid = new_grid(*config.shape)
    region, data_mask = _masks(config)
    _fill_data(grid, config, data, rng)
    k0 = config.pilot_doppler
    grid[k0] = row
    pilot_mask = np.zeros_like(region)
    pilot_mask[k0] = True
    layout = PilotLayout("sequence", k0, config.guard_half_width, config.pulse_delay, boost_factor(config))
    return FrameBundle(grid, layout, row, pilot_mask, region & ~pilot_mask, data_mask)


def build_pulse_pilot_frame(
    config: FrameConfig,
    data=None,
    rng: np.random.Generator | None = None,
) -> FrameBundle:
    """Single pulse at ``(k0, l0)`` carrying the whole pilot-region budget."""
    grid = new_grid(*config.shape)
    region, data_mask = _masks(config)
    _fill_data(grid, config, data, rng)
    k0, l0 = config.pilot_doppler, config.pulse_delay
    amp = complex(np.sqrt(pilot_region_budget(config)))
    grid[k0, l0] = amp
    pilot_mask = np.zeros_like(region)
    pilot_mask[k0, l0] = True
    layout = PilotLayout("pulse", k0, config.guard_half_width, l0, abs(amp))
    return FrameBundle(grid, layout, amp, pilot_mask, region & ~pilot_mask, data_mask)


def build_data_only_frame(
    config: FrameConfig,
    data=None,
    rng: np.random.Generator | None = None,
) -> FrameBundle:
    """Data rows as in the pilot frames, pilot region left empty."""
    grid = new_grid(*config.shape)
    region, data_mask = _masks(config)
    _fill_data(grid, config, data, rng)
    layout = PilotLayout("none", config.pilot_doppler, config.guard_half_width, config.pulse_delay, 0.0)
    return FrameBundle(grid, layout, None, np.zeros_like(region), region, data_mask)
