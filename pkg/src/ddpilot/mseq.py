"""Maximal-length (M-)sequences from a Fibonacci LFSR.

Sequences are returned in bipolar form as integer arrays so that periodic
correlations are computed in exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonPrimitivePolynomialError

__all__ = [
    "DEFAULT_TAPS",
    "LfsrSpec",
    "cyclic_shift",
    "generate_mseq",
    "lfsr_period",
    "periodic_correlation",
    "primitive_polynomials",
]

# One primitive polynomial per degree, given as the exponents of its
# non-constant terms (the constant term is always present).
DEFAULT_TAPS = {
    2: (2, 1),
    3: (3, 1),
    4: (4, 1),
    5: (5, 2),
    6: (6, 1),
    7: (7, 1),
    8: (8, 4, 3, 2),
    9: (9, 4),
    10: (10, 3),
}


@dataclass(frozen=True)
class LfsrSpec:
    """Shift-register description of a generator polynomial.

    ``taps=(6, 1)`` encodes x^6 + x + 1.  The leading exponent must equal
    ``degree``; the constant term is implied.
    """

    degree: int = 6
    taps: tuple[int, ...] = (6, 1)
    initial_state: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        taps = tuple(sorted({int(t) for t in self.taps}, reverse=True))
        object.__setattr__(self, "taps", taps)
        if self.degree < 2:
            raise ValueError(f"LFSR degree must be >= 2, got {self.degree}")
        if not taps or taps[0] != self.degree:
            raise ValueError(f"taps {taps} must include the degree {self.degree}")
        if any(t <= 0 for t in taps):
            raise ValueError("tap exponents must be positive")
        if self.initial_state is not None:
            state = tuple(int(b) & 1 for b in self.initial_state)
            if len(state) != self.degree:
                raise ValueError("initial_state length must equal degree")
            if not any(state):
                raise ValueError("initial_state must be nonzero")
            object.__setattr__(self, "initial_state", state)

    @classmethod
    def default(cls, degree: int) -> "LfsrSpec":
        return cls(degree=degree, taps=DEFAULT_TAPS[degree])

    @property
    def period(self) -> int:
        return 2**self.degree - 1

    def state0(self) -> tuple[int, ...]:
        return self.initial_state or (1,) * self.degree


def _step(state: tuple[int, ...], feedback: tuple[int, ...]) -> tuple[int, ...]:
    # state holds a_n .. a_{n+d-1}; a_{n+d} = xor of a_{n+i} over feedback i
    new = 0
    for i in feedback:
        new ^= state[i]
    return state[1:] + (new,)


def _feedback(spec: LfsrSpec) -> tuple[int, ...]:
    return (0,) + tuple(t for t in spec.taps if t != spec.degree)


def lfsr_period(spec: LfsrSpec) -> int:
    """Length of the state cycle that contains ``spec``'s initial state."""
    fb = _feedback(spec)
    start = spec.state0()
    state = _step(start, fb)
    n = 1
    # the constant term makes the state map invertible, so the start recurs
    while state != start:
        state = _step(state, fb)
        n += 1
    return n


def generate_mseq(spec: LfsrSpec | None = None) -> np.ndarray:
    """Generate one period of the M-sequence for ``spec`` in bipolar form.

    Bit 0 maps to +1 and bit 1 maps to -1.

    Parameters
    ----------
    spec : LfsrSpec, optional
        Generator description, x^6 + x + 1 with all-ones seed by default.

    Returns
    -------
    np.ndarray
        Integer array of length ``2**degree - 1`` with entries in {+1, -1}.

    Raises
    ------
    NonPrimitivePolynomialError
        If the measured state-cycle period is shorter than ``2**degree - 1``.
    """
    spec = spec or LfsrSpec()
    period = lfsr_period(spec)
    if period != spec.period:
        raise NonPrimitivePolynomialError(
            f"taps {spec.taps} give period {period}, expected {spec.period}"
        )
    fb = _feedback(spec)
    state = spec.state0()
    bits = np.empty(spec.period, dtype=np.int64)
    for n in range(spec.period):
        bits[n] = state[0]
        state = _step(state, fb)
    return 1 - 2 * bits


def primitive_polynomials(degree: int) -> list[tuple[int, ...]]:
    """All tap tuples of the given degree whose LFSR reaches full period."""
    found = []
    for mask in range(2 ** (degree - 1)):
        middle = tuple(i for i in range(1, degree) if mask >> (i - 1) & 1)
        spec = LfsrSpec(degree=degree, taps=(degree,) + middle)
        if lfsr_period(spec) == spec.period:
            found.append(spec.taps)
    return found


def cyclic_shift(seq, i: int) -> np.ndarray:
    """Rotate ``seq`` right by ``i``: ``out[j] = seq[(j - i) % L]``."""
    return np.roll(np.asarray(seq), int(i))


def periodic_correlation(a, b) -> np.ndarray:
    """Periodic cross-correlation ``out[i] = sum_j a[j] * b[(j + i) % L]``.

    Real inputs give real (integer, for bipolar input) output; complex
    inputs are conjugated on ``a``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    L = a.size
    idx = (np.arange(L)[:, None] + np.arange(L)[None, :]) % L
    return b[idx] @ np.conj(a)
