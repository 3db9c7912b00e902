"""Two-stage channel estimation for the sequence pilot, plus the pulse baseline.

Stage 1 correlates every scanned Doppler row against all cyclic shifts of
the transmitted pilot row and keeps the delay shifts whose correlation
magnitude clears a threshold.  Stage 2 turns the detected shifts of a row
into gains, by point-wise division when the row holds one path and by least
squares on the stacked shifted pilots when it holds several.
"""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import DivisionDegenerateError, SingularSystemError
from .frame import FrameConfig

__all__ = [
    "EstimationReport",
    "PathEstimate",
    "build_detection_matrix",
    "default_threshold",
    "estimate_joint",
    "estimate_pulse_channel",
    "estimate_sequence_channel",
    "estimate_single",
    "identify_paths",
    "pulse_power_detector",
    "shift_matrix",
    "sidelobe_floor",
]


@dataclass(frozen=True)
class PathEstimate:
    delay_tap: int
    doppler_tap: int
    gain_hat: complex
    correlation_score: float


@dataclass
class EstimationReport:
    estimates: list[PathEstimate]
    detected_doppler_rows: list[int] = field(default_factory=list)
    threshold_used: float = 0.0

    def __post_init__(self):
        taps = [(e.delay_tap, e.doppler_tap) for e in self.estimates]
        if len(set(taps)) != len(taps):
            raise ValueError(f"duplicate estimates at {taps}")

    def taps(self) -> set[tuple[int, int]]:
        """Detected ``(delay, Doppler)`` pairs."""
        return {(e.delay_tap, e.doppler_tap) for e in self.estimates}

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("k,l,re_h_hat,im_h_hat,score\n")
        for e in sorted(self.estimates, key=lambda e: (e.doppler_tap, e.delay_tap)):
            h = complex(e.gain_hat)
            out.write(f"{e.doppler_tap},{e.delay_tap},{h.real!r},{h.imag!r},{e.correlation_score!r}\n")
        return out.getvalue()


def shift_matrix(pilot_row, shifts) -> np.ndarray:
    """``M x P`` matrix whose columns are the pilot row shifted by ``shifts``."""
    x = np.asarray(pilot_row)
    return np.stack([np.roll(x, int(s)) for s in shifts], axis=1)


def build_detection_matrix(pilot_row) -> np.ndarray:
    """``M x M`` matrix, row ``i`` is the pilot row cyclically shifted by ``i``."""
    x = np.asarray(pilot_row)
    return shift_matrix(x, range(x.size)).T


def sidelobe_floor(pilot_row, margin: float = 2.0) -> float:
    """``margin`` times the pilot's worst periodic sidelobe, relative to its peak.

    For a bare M-sequence of length L this is ``2 / L``; the dummy-extended
    length-64 pilot from x^6 + x + 1 has a worst sidelobe of 12/64.
    """
    x = np.asarray(pilot_row)
    corr = np.abs(build_detection_matrix(x).conj() @ x)
    return float(margin * corr[1:].max() / corr[0]) if x.size > 1 else 0.0


def default_threshold(sigma_sq: float, pilot_row_energy: float, eta: float = 4.0) -> float:
    """``eta`` standard deviations of the noise-only correlation magnitude."""
    if sigma_sq < 0 or pilot_row_energy < 0 or eta < 0:
        raise ValueError("threshold inputs must be non-negative")
    return float(eta * np.sqrt(pilot_row_energy * sigma_sq))


def identify_paths(region_rows, pd, beta: float, pilot_doppler: int = 0,
                   n_doppler: int | None = None, sidelobe_ratio: float = 0.0):
    """Correlation-based path identification over the scanned Doppler rows.

    Parameters
    ----------
    region_rows : iterable of (int, array_like)
        ``(k, r_k)`` pairs, ``r_k`` the received row at Doppler tap ``k``.
    pd : np.ndarray
        Detection matrix from :func:`build_detection_matrix`.
    beta : float
        Absolute threshold on the correlation magnitude.
    pilot_doppler : int
        Pilot row ``k0``; reported Doppler is ``k - k0`` (mod ``n_doppler``).
    n_doppler : int, optional
    sidelobe_ratio : float
        Additionally require a score above this fraction of the row's
        strongest correlation, which rejects the deterministic sidelobes of
        strong paths.  Zero keeps the plain threshold test.

    Returns
    -------
    list of (int, int, float)
        ``(delay, doppler, score)`` for every correlation above threshold.
    """
    rows = list(region_rows)
    if not rows:
        raise ValueError("detection region is empty")
    pd = np.asarray(pd)
    found = []
    for k, r in rows:
        r = np.asarray(r)
        if r.shape != (pd.shape[1],):
            raise ValueError(f"row {k} has length {r.shape}, expected {pd.shape[1]}")
        scores = np.abs(np.conj(pd) @ r)
        cut = max(beta, sidelobe_ratio * scores.max())
        nu = k - pilot_doppler
        if n_doppler is not None:
            nu %= n_doppler
        for l in np.flatnonzero(scores > cut):
            found.append((int(l), int(nu), float(scores[l])))
    return found


def estimate_single(y_row, pilot_shifted) -> complex:
    """Average of the point-wise ratios ``y[m] / pilot_shifted[m]``."""
    y = np.asarray(y_row)
    p = np.asarray(pilot_shifted)
    if y.shape != p.shape:
        raise ValueError(f"shape mismatch {y.shape} vs {p.shape}")
    if np.any(p == 0):
        raise DivisionDegenerateError("pilot has a zero entry")
    return complex(np.mean(y / p))


def estimate_joint(y_row, shifts, pilot_row) -> np.ndarray:
    """Least-squares gains ``X^+ y`` for the pilot shifted by each of ``shifts``."""
    shifts = [int(s) for s in shifts]
    M = np.asarray(pilot_row).size
    if len(set(s % M for s in shifts)) != len(shifts):
        raise ValueError(f"shifts must be distinct mod {M}: {shifts}")
    if not 0 < len(shifts) <= M:
        raise ValueError(f"need 1..{M} shifts, got {len(shifts)}")
    X = shift_matrix(pilot_row, shifts)
    h, _, rank, _ = np.linalg.lstsq(X, np.asarray(y_row), rcond=None)
    if rank < len(shifts):
        raise SingularSystemError(f"shifted pilots {shifts} are linearly dependent")
    return h


def pulse_power_detector(grid, pulse_amplitude: complex, pulse_pos, beta_power: float,
                         rows=None) -> list[PathEstimate]:
    """Threshold ``|y|^2`` cell by cell around an embedded pulse pilot.

    ``rows`` restricts the scan to the given Doppler rows (all rows by
    default).  Each detection is reported relative to ``pulse_pos``.
    """
    y = np.asarray(grid)
    N, M = y.shape
    k0, l0 = pulse_pos
    rows = range(N) if rows is None else rows
    out = []
    for k in rows:
        power = np.abs(y[k]) ** 2
        for l in np.flatnonzero(power > beta_power):
            out.append(PathEstimate(int((l - l0) % M), int((k - k0) % N),
                                    complex(y[k, l] / pulse_amplitude), float(power[l])))
    return out


def estimate_sequence_channel(rx_grid, config: FrameConfig, pilot_row, sigma_sq: float,
                              eta: float = 4.0, sidelobe_ratio: float | None = None) -> EstimationReport:
    """Run both stages on a received sequence-pilot frame.

    ``sidelobe_ratio`` defaults to :func:`sidelobe_floor` of the pilot row.
    """
    rx = np.asarray(rx_grid)
    pilot_row = np.asarray(pilot_row)
    pd = build_detection_matrix(pilot_row)
    if sidelobe_ratio is None:
        sidelobe_ratio = sidelobe_floor(pilot_row)
    beta = default_threshold(sigma_sq, float(np.vdot(pilot_row, pilot_row).real), eta)
    rows = [int(k) for k in config.search_rows]
    hits = identify_paths(((k, rx[k]) for k in rows), pd, beta, config.pilot_doppler,
                          config.n_doppler, sidelobe_ratio)
    by_row = defaultdict(list)
    for l, nu, score in hits:
        by_row[nu].append((l, score))
    estimates = []
    for nu, found in by_row.items():
        y = rx[(config.pilot_doppler + nu) % config.n_doppler]
        shifts = [l for l, _ in found]
        if len(shifts) == 1:
            gains = [estimate_single(y, np.roll(pilot_row, shifts[0]))]
        else:
            gains = estimate_joint(y, shifts, pilot_row)
        estimates += [PathEstimate(l, nu, complex(h), s) for (l, s), h in zip(found, gains)]
    return EstimationReport(estimates, rows, beta)


def estimate_pulse_channel(rx_grid, config: FrameConfig, pulse_amplitude: complex,
                           sigma_sq: float, kappa: float = 9.0) -> EstimationReport:
    """Power detector on the scanned rows with threshold ``kappa * sigma^2``."""
    beta = kappa * sigma_sq
    rows = [int(k) for k in config.search_rows]
    est = pulse_power_detector(rx_grid, pulse_amplitude,
                               (config.pilot_doppler, config.pulse_delay), beta, rows)
    return EstimationReport(est, rows, beta)
