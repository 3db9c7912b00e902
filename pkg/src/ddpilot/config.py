"""Experiment configuration: INI-style sections, unknown keys rejected.

Example::

    [run]
    trials = 1000
    seed = 7
    snr_list_db = 0, 5, 10, 15, 20
    schemes = sequence, pulse

    [frame]
    n_doppler = 32
    m_delay = 64
    guard_half_width = 10
    degree = 6
    taps = [6, 1]

    [channel]
    delay_taps = 0, 1, 2, 3, 4, 5
    doppler_taps = 0, 1, 2, 3, 4, 5
    pairing = paired
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace

from .channel import ChannelProfile
from .errors import ConfigError
from .frame import FrameConfig
from .mseq import LfsrSpec

EXPERIMENTS = ("papr", "nmse", "prop1", "detect-demo")
SCHEMES = ("sequence", "pulse", "data-only")

DEFAULT_TRIALS = {"papr": 10_000, "nmse": 1_000, "prop1": 100_000, "detect-demo": 1}
DEFAULT_SCHEMES = {
    "papr": ("sequence", "pulse", "data-only"),
    "nmse": ("sequence", "pulse"),
    "prop1": ("sequence",),
    "detect-demo": ("sequence",),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    frame: FrameConfig = field(default_factory=FrameConfig)
    channel: ChannelProfile = field(default_factory=ChannelProfile)
    snr_list_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 1
    seed: int = 0
    output_dir: str = "results"
    schemes: tuple[str, ...] = ("sequence",)
    # estimator knobs
    eta: float = 4.0
    kappa: float = 9.0
    sidelobe_ratio: float | None = None
    # prop1
    prop1_pairs: tuple[tuple[int, int], ...] = ((63, 1), (63, 2), (63, 3), (63, 6))
    sigma_sq: float = 1.0
    # detect-demo; None means noiseless
    demo_snr_db: float | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        bad = set(self.schemes) - set(SCHEMES)
        if bad or not self.schemes:
            raise ConfigError(f"schemes must be a non-empty subset of {SCHEMES}, got {self.schemes}")
        if self.experiment == "nmse":
            if not self.snr_list_db:
                raise ConfigError("snr_list_db must be non-empty for nmse")
            if "data-only" in self.schemes:
                raise ConfigError("data-only frames carry no pilot to estimate from")
        for M, P in self.prop1_pairs:
            if not 1 <= P <= M:
                raise ConfigError(f"prop1 pair (M={M}, P={P}) needs 1 <= P <= M")
        try:
            self.channel.check_frame(self.frame.n_doppler, self.frame.m_delay)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def defaults(cls, experiment: str) -> "ExperimentConfig":
        frame = FrameConfig()
        if experiment == "detect-demo":
            # the illustrative channel has a Doppler-14 path; widen the guard
            frame = FrameConfig(guard_half_width=14, doppler_search_max=14)
        return cls(
            experiment=experiment,
            frame=frame,
            trials=DEFAULT_TRIALS.get(experiment, 1),
            schemes=DEFAULT_SCHEMES.get(experiment, ("sequence",)),
        )

    def to_dict(self) -> dict:
        return asdict(self)


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.strip().strip("[]").split(",") if x.strip())


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.strip().strip("[]").split(",") if x.strip())


def _words(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(",") if x.strip())


def _pairs(s: str) -> tuple[tuple[int, int], ...]:
    # "63:1, 63:2"
    out = []
    for item in _words(s):
        m, p = item.split(":")
        out.append((int(m), int(p)))
    return tuple(out)


def _opt_int(s: str):
    return None if s.strip().lower() in ("", "none", "auto") else int(s)


def _opt_float(s: str):
    return None if s.strip().lower() in ("", "none", "auto", "noiseless") else float(s)


_RUN_KEYS = {
    "trials": ("trials", int),
    "seed": ("seed", int),
    "snr_list_db": ("snr_list_db", _floats),
    "schemes": ("schemes", _words),
    "output_dir": ("output_dir", str),
}
_FRAME_KEYS = {
    "n_doppler": int,
    "m_delay": int,
    "pilot_doppler": int,
    "guard_half_width": int,
    "data_symbol_energy": float,
    "doppler_search_max": _opt_int,
    "pulse_delay": _opt_int,
    "degree": int,
    "taps": _ints,
}
_CHANNEL_KEYS = {"delay_taps": _ints, "doppler_taps": _ints, "pairing": str}
_ESTIMATOR_KEYS = {
    "eta": ("eta", float),
    "kappa": ("kappa", float),
    "sidelobe_ratio": ("sidelobe_ratio", _opt_float),
}
_PROP1_KEYS = {"pairs": ("prop1_pairs", _pairs), "sigma_sq": ("sigma_sq", float)}
_DEMO_KEYS = {"snr_db": ("demo_snr_db", _opt_float)}


def _parse(section, table, name):
    out = {}
    for key, raw in section.items():
        if key not in table:
            raise ConfigError(f"unknown key {key!r} in [{name}]")
        conv = table[key]
        if isinstance(conv, tuple):
            conv = conv[1]
        try:
            out[key] = conv(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {name}.{key}: {raw!r} ({exc})") from None
    return out


def _remap(parsed, table):
    return {table[k][0]: v for k, v in parsed.items()}


def parse_config(text: str, experiment: str) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from INI text over the experiment defaults."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unparseable config: {exc}".splitlines()[0]) from None
    base = ExperimentConfig.defaults(experiment)
    updates = {}
    for name in cp.sections():
        if name not in ("run", "frame", "channel", "estimator", "prop1", "demo"):
            raise ConfigError(f"unknown section [{name}]")
    try:
        if cp.has_section("frame"):
            f = _parse(cp["frame"], _FRAME_KEYS, "frame")
            seq = base.frame.sequence
            if "degree" in f or "taps" in f:
                degree = f.pop("degree", seq.degree)
                taps = f.pop("taps", None) or LfsrSpec.default(degree).taps
                seq = LfsrSpec(degree=degree, taps=taps)
            fields = asdict(base.frame)
            fields.pop("sequence")
            # derived defaults follow the new guard/size unless set explicitly
            if "guard_half_width" in f and "doppler_search_max" not in f:
                fields["doppler_search_max"] = None
            if "m_delay" in f and "pulse_delay" not in f:
                fields["pulse_delay"] = None
            fields.update(f)
            updates["frame"] = FrameConfig(sequence=seq, **fields)
        if cp.has_section("channel"):
            c = _parse(cp["channel"], _CHANNEL_KEYS, "channel")
            updates["channel"] = replace(base.channel, **c)
        for name, table in (("run", _RUN_KEYS), ("estimator", _ESTIMATOR_KEYS),
                            ("prop1", _PROP1_KEYS), ("demo", _DEMO_KEYS)):
            if cp.has_section(name):
                updates.update(_remap(_parse(cp[name], table, name), table))
        if "schemes" in updates:
            updates["schemes"] = tuple(updates["schemes"])
        return replace(base, **updates)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
