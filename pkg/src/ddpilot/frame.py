"""Delay-Doppler grid conventions and shared frame/channel types.

A grid is a complex ``numpy`` array of shape ``(N, M)``: row ``k`` is the
Doppler tap, column ``l`` the delay tap, both zero-based.  Leading batch
dimensions are allowed wherever an operation is elementwise over frames.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .mseq import LfsrSpec

__all__ = [
    "EXAMPLE_CHANNEL",
    "ChannelRealization",
    "FrameConfig",
    "Path",
    "dump_grid",
    "load_grid",
    "new_grid",
    "total_power",
]


def new_grid(n_doppler: int, m_delay: int) -> np.ndarray:
    """All-zero ``n_doppler x m_delay`` complex grid."""
    if n_doppler < 1 or m_delay < 1:
        raise ValueError(f"grid dimensions must be positive, got ({n_doppler}, {m_delay})")
    return np.zeros((n_doppler, m_delay), dtype=np.complex128)


def total_power(grid) -> float:
    """Sum of squared magnitudes over all cells."""
    g = np.asarray(grid)
    return float(np.sum(g.real**2 + g.imag**2))


@dataclass(frozen=True)
class Path:
    """One propagation path: complex gain, delay tap, Doppler tap."""

    gain: complex
    delay_tap: int
    doppler_tap: int

    def check_bounds(self, n_doppler: int, m_delay: int) -> None:
        if not (0 <= self.delay_tap < m_delay and 0 <= self.doppler_tap < n_doppler):
            raise ValueError(
                f"path ({self.delay_tap}, {self.doppler_tap}) outside {n_doppler}x{m_delay} grid"
            )


@dataclass(frozen=True)
class ChannelRealization:
    paths: tuple[Path, ...]

    def __post_init__(self):
        paths = tuple(self.paths)
        object.__setattr__(self, "paths", paths)
        if not paths:
            raise ValueError("a channel needs at least one path")
        taps = [(p.delay_tap, p.doppler_tap) for p in paths]
        if len(set(taps)) != len(taps):
            raise ValueError(f"paths are not resolvable, duplicate taps in {taps}")

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @classmethod
    def from_triples(cls, triples) -> "ChannelRealization":
        """Build from ``(gain, delay, doppler)`` triples."""
        return cls(tuple(Path(complex(h), int(t), int(v)) for h, t, v in triples))

    def response(self, n_doppler: int, m_delay: int) -> np.ndarray:
        """Channel gains placed on an ``N x M`` grid at ``[doppler, delay]``."""
        h = new_grid(n_doppler, m_delay)
        for p in self.paths:
            p.check_bounds(n_doppler, m_delay)
            h[p.doppler_tap, p.delay_tap] = p.gain
        return h

    def dumps(self) -> str:
        """Text dump, one ``p, re(h), im(h), tau, nu`` line per path."""
        lines = ["# p, re(h), im(h), tau, nu"]
        for i, p in enumerate(self.paths):
            h = complex(p.gain)
            lines.append(f"{i}, {h.real!r}, {h.imag!r}, {p.delay_tap}, {p.doppler_tap}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ChannelRealization":
        triples = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            _, re_, im_, tau, nu = (s.strip() for s in line.split(","))
            triples.append((complex(float(re_), float(im_)), int(tau), int(nu)))
        return cls.from_triples(triples)


# Illustrative three-path channel: <gain, delay, Doppler>.
EXAMPLE_CHANNEL = ((0.8, 1, 1), (0.6, 3, 14), (0.5, 5, 7))


@dataclass(frozen=True)
class FrameConfig:
    """Frame geometry, pilot placement and guard/boost parameters.

    Attributes
    ----------
    n_doppler, m_delay : int
        Grid size N x M.
    pilot_doppler : int
        Pilot row k0.
    guard_half_width : int
        Zeroed rows on each side of the pilot row.
    data_symbol_energy : float
        Reference per-symbol energy E_d.
    sequence : LfsrSpec
        Generator of the pilot sequence.
    doppler_search_max : int or None
        Largest Doppler offset scanned by the estimators; ``None`` means
        ``guard_half_width``.
    pulse_delay : int or None
        Pulse-pilot delay tap, ``M // 2`` when ``None``.
    """

    n_doppler: int = 32
    m_delay: int = 64
    pilot_doppler: int = 1
    guard_half_width: int = 10
    data_symbol_energy: float = 1.0
    sequence: LfsrSpec = field(default_factory=LfsrSpec)
    doppler_search_max: int | None = None
    pulse_delay: int | None = None

    def __post_init__(self):
        N, M, G = self.n_doppler, self.m_delay, self.guard_half_width
        if N < 1 or M < 1:
            raise ValueError(f"grid dimensions must be positive, got ({N}, {M})")
        if not 0 <= self.pilot_doppler < N:
            raise ValueError(f"pilot_doppler {self.pilot_doppler} outside [0, {N})")
        if G < 0 or 2 * G + 1 > N:
            raise ValueError(f"guard_half_width {G} does not fit {N} Doppler rows")
        if self.data_symbol_energy <= 0:
            raise ValueError("data_symbol_energy must be positive")
        if self.doppler_search_max is None:
            object.__setattr__(self, "doppler_search_max", G)
        if not 0 <= self.doppler_search_max <= G:
            raise ValueError(
                f"doppler_search_max {self.doppler_search_max} must lie in [0, {G}]"
            )
        if self.pulse_delay is None:
            object.__setattr__(self, "pulse_delay", M // 2)
        if not 0 <= self.pulse_delay < M:
            raise ValueError(f"pulse_delay {self.pulse_delay} outside [0, {M})")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_doppler, self.m_delay)

    @property
    def guard_rows(self) -> np.ndarray:
        """Pilot row plus guard rows, ascending offset from ``-G`` to ``G``."""
        G = self.guard_half_width
        return (self.pilot_doppler + np.arange(-G, G + 1)) % self.n_doppler

    @property
    def data_rows(self) -> np.ndarray:
        G = self.guard_half_width
        n_data = self.n_doppler - (2 * G + 1)
        return (self.pilot_doppler + G + 1 + np.arange(n_data)) % self.n_doppler

    @property
    def n_data(self) -> int:
        return (self.n_doppler - (2 * self.guard_half_width + 1)) * self.m_delay

    @property
    def search_rows(self) -> np.ndarray:
        """Rows scanned for shifted pilots, Doppler offsets 0..search max."""
        return (self.pilot_doppler + np.arange(self.doppler_search_max + 1)) % self.n_doppler


def dump_grid(grid) -> str:
    """Plain-text grid dump: ``N=<n> M=<m>`` header, one line per Doppler row."""
    g = np.asarray(grid, dtype=np.complex128)
    if g.ndim != 2:
        raise ValueError("dump_grid expects a single 2-D grid")
    out = io.StringIO()
    out.write(f"N={g.shape[0]} M={g.shape[1]}\n")
    for row in g:
        out.write(",".join(f"{c.real!r}{c.imag:+}j" for c in row.tolist()))
        out.write("\n")
    return out.getvalue()


def load_grid(text: str) -> np.ndarray:
    lines = text.strip().splitlines()
    header = dict(item.split("=") for item in lines[0].split())
    n, m = int(header["N"]), int(header["M"])
    grid = new_grid(n, m)
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} rows, found {len(lines) - 1}")
    for k, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != m:
            raise ValueError(f"row {k}: expected {m} cells, found {len(cells)}")
        grid[k] = [complex(c) for c in cells]
    return grid
