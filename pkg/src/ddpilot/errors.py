"""Exception types raised by ddpilot."""


class NonPrimitivePolynomialError(ValueError):
    """LFSR feedback polynomial does not produce a maximal-length sequence."""


class InvalidProfileError(ValueError):
    """Channel profile cannot produce resolvable paths."""


class DivisionDegenerateError(ZeroDivisionError):
    """Point-wise gain estimate requested against a zero pilot entry."""


class SingularSystemError(ValueError):
    """Least-squares system built from pilot shifts is rank deficient."""


class UndefinedPaprError(ValueError):
    """PAPR requested for an all-zero sample stream."""


class ConfigError(ValueError):
    """Experiment configuration is malformed or inconsistent."""
