"""Seeded Monte Carlo campaigns and the ``simctl`` command line.

Trials are grouped into fixed-size blocks.  Each block draws from its own
generator, seeded from ``(seed, point, block)``, so results do not depend on
how many worker processes run the blocks; partial results are merged in
block order.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path as FsPath

import numpy as np

from . import __version__
from .channel import add_awgn, apply_channel, awgn, draw_channel, sigma_sq_for_snr
from .config import EXPERIMENTS, ExperimentConfig, parse_config
from .errors import ConfigError
from .estimator import estimate_pulse_channel, estimate_sequence_channel, shift_matrix
from .frame import EXAMPLE_CHANNEL, ChannelRealization
from .metrics import CcdfCurve, ErrorModelInputs, ccdf, exact_epsilon_sq, nmse, papr_db, prop1_epsilon_sq
from .modem import dd_to_time
from .mseq import LfsrSpec, generate_mseq
from .pilots import (
    boost_factor,
    build_data_only_frame,
    build_pulse_pilot_frame,
    build_sequence_pilot_frame,
    generate_qpsk_data,
    pilot_power_ratio_db,
    pilot_region_budget,
)

BLOCK_SIZE = 250
CCDF_THRESHOLDS_DB = np.linspace(0.0, 20.0, 81)


def block_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _blocks(trials: int):
    return [(b, min(BLOCK_SIZE, trials - b * BLOCK_SIZE)) for b in range(-(-trials // BLOCK_SIZE))]


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _build(scheme, cfg, data):
    if scheme == "sequence":
        bundle = build_sequence_pilot_frame(cfg, data=data)
    elif scheme == "pulse":
        bundle = build_pulse_pilot_frame(cfg, data=data)
    else:
        return build_data_only_frame(cfg, data=data)
    assert np.isclose(bundle.pilot_region_power(), pilot_region_budget(cfg)), "power parity"
    return bundle


# -- PAPR --------------------------------------------------------------------

def _papr_block(task):
    config, block, n = task
    cfg = config.frame
    rng = block_rng(config.seed, 0, block)
    grids = {s: np.empty((n,) + cfg.shape, dtype=np.complex128) for s in config.schemes}
    for t in range(n):
        data = generate_qpsk_data(cfg.n_data, cfg.data_symbol_energy, rng)
        for s in config.schemes:
            grids[s][t] = _build(s, cfg, data).grid
    return {s: papr_db(dd_to_time(g)) for s, g in grids.items()}


def papr_values(config: ExperimentConfig, workers: int = 1) -> dict[str, np.ndarray]:
    """Per-frame PAPR (dB) for each scheme, in trial order."""
    parts = _map(_papr_block, [(config, b, n) for b, n in _blocks(config.trials)], workers)
    return {s: np.concatenate([p[s] for p in parts]) for s in config.schemes}


def run_papr(config: ExperimentConfig, workers: int = 1) -> dict[str, CcdfCurve]:
    """PAPR CCDF per scheme on a 0..20 dB grid with 0.25 dB steps."""
    return {s: ccdf(v, CCDF_THRESHOLDS_DB) for s, v in papr_values(config, workers).items()}


def ccdf_csv(curves: dict[str, CcdfCurve]) -> str:
    lines = ["scheme,threshold_db,exceed_prob"]
    for scheme, c in curves.items():
        for t, p in zip(c.thresholds_db, c.exceed_prob):
            lines.append(f"{scheme},{float(t)!r},{float(p)!r}")
    return "\n".join(lines) + "\n"


# -- NMSE --------------------------------------------------------------------

@dataclass(frozen=True)
class NmseRow:
    scheme: str
    snr_db: float
    nmse_mean: float
    trials: int


def _nmse_block(task):
    config, point, block, n = task
    cfg = config.frame
    snr_db = config.snr_list_db[point]
    sigma_sq = sigma_sq_for_snr(snr_db, cfg.data_symbol_energy)
    rng = block_rng(config.seed, 1, point, block)
    out = {s: np.empty(n) for s in config.schemes}
    # schemes share channel, data and noise within a trial
    for t in range(n):
        ch = draw_channel(config.channel, rng)
        data = generate_qpsk_data(cfg.n_data, cfg.data_symbol_energy, rng)
        noise = awgn(cfg.shape, sigma_sq, rng)
        for s in config.schemes:
            bundle = _build(s, cfg, data)
            rx = apply_channel(bundle.grid, ch) + noise
            if s == "sequence":
                rep = estimate_sequence_channel(rx, cfg, bundle.pilot_reference, sigma_sq,
                                                config.eta, config.sidelobe_ratio)
            else:
                rep = estimate_pulse_channel(rx, cfg, bundle.pilot_reference, sigma_sq, config.kappa)
            out[s][t] = nmse(ch, rep.estimates, cfg.shape)
    return out


def nmse_values(config: ExperimentConfig, workers: int = 1) -> dict[tuple[str, float], np.ndarray]:
    """Per-trial NMSE keyed by ``(scheme, snr_db)``."""
    tasks = [(config, i, b, n) for i in range(len(config.snr_list_db)) for b, n in _blocks(config.trials)]
    parts = _map(_nmse_block, tasks, workers)
    out = {}
    for s in config.schemes:
        for i, snr in enumerate(config.snr_list_db):
            out[(s, snr)] = np.concatenate([p[s] for (_, j, _, _), p in zip(tasks, parts) if j == i])
    return out


def run_nmse(config: ExperimentConfig, workers: int = 1) -> list[NmseRow]:
    vals = nmse_values(config, workers)
    return [NmseRow(s, snr, float(np.mean(v)), v.size) for (s, snr), v in vals.items()]


def nmse_csv(rows) -> str:
    lines = ["scheme,snr_db,nmse_mean,trials"]
    lines += [f"{r.scheme},{float(r.snr_db)!r},{r.nmse_mean!r},{r.trials}" for r in rows]
    return "\n".join(lines) + "\n"


# -- error model ---------------------------------------------------------------

@dataclass(frozen=True)
class Prop1Row:
    M: int
    P: int
    sigma_sq: float
    eq13_value: float
    exact_value: float
    monte_carlo_value: float
    rel_err: float  # closed form vs. exact

    @property
    def mc_rel_err(self) -> float:
        return abs(self.monte_carlo_value - self.exact_value) / self.exact_value


def _mseq_of_length(M: int) -> np.ndarray:
    degree = int(round(np.log2(M + 1)))
    if 2**degree - 1 != M:
        raise ConfigError(f"M={M} is not an M-sequence length 2^d - 1")
    return generate_mseq(LfsrSpec.default(degree))


def prop1_shifts(config: ExperimentConfig, pair_index: int) -> list[int]:
    M, P = config.prop1_pairs[pair_index]
    rng = block_rng(config.seed, 2, pair_index)
    return sorted(int(s) for s in rng.choice(M, size=P, replace=False))


def _prop1_block(task):
    config, i, block, n = task
    M, P = config.prop1_pairs[i]
    X = shift_matrix(_mseq_of_length(M).astype(float), prop1_shifts(config, i))
    pinv = np.linalg.pinv(X)
    w = awgn((n, M), config.sigma_sq, block_rng(config.seed, 3, i, block))
    e = w @ pinv.T
    return float(np.sum(e.real**2 + e.imag**2))


def run_prop1(config: ExperimentConfig, workers: int = 1) -> list[Prop1Row]:
    """Monte Carlo mean per-coefficient power of ``X^+ w`` against both formulas."""
    tasks = [(config, i, b, n) for i in range(len(config.prop1_pairs)) for b, n in _blocks(config.trials)]
    sums = _map(_prop1_block, tasks, workers)
    rows = []
    for i, (M, P) in enumerate(config.prop1_pairs):
        total = sum(s for (_, j, _, _), s in zip(tasks, sums) if j == i)
        inputs = ErrorModelInputs(M, P, config.sigma_sq)
        closed, exact = prop1_epsilon_sq(inputs), exact_epsilon_sq(inputs)
        rows.append(Prop1Row(M, P, config.sigma_sq, closed, exact,
                             total / (config.trials * P), abs(closed - exact) / exact))
    return rows


def prop1_csv(rows) -> str:
    lines = ["M,P,sigma_sq,eq13_value,exact_value,monte_carlo_value,rel_err"]
    lines += [f"{r.M},{r.P},{r.sigma_sq!r},{r.eq13_value!r},{r.exact_value!r},"
              f"{r.monte_carlo_value!r},{r.rel_err!r}" for r in rows]
    return "\n".join(lines) + "\n"


# -- single-frame walk-through ------------------------------------------------

def run_detect_demo(config: ExperimentConfig, rng: np.random.Generator | None = None,
                    channel: ChannelRealization | None = None) -> dict:
    """Push one sequence-pilot frame through the illustrative three-path channel."""
    cfg = config.frame
    rng = rng or block_rng(config.seed, 4)
    channel = channel or ChannelRealization.from_triples(EXAMPLE_CHANNEL)
    bundle = build_sequence_pilot_frame(cfg, rng=rng)
    sigma_sq = 0.0 if config.demo_snr_db is None else sigma_sq_for_snr(config.demo_snr_db, cfg.data_symbol_energy)
    rx = add_awgn(apply_channel(bundle.grid, channel), sigma_sq, rng)
    report = estimate_sequence_channel(rx, cfg, bundle.pilot_reference, sigma_sq,
                                       config.eta, config.sidelobe_ratio)
    truth = {(p.delay_tap, p.doppler_tap): p.gain for p in channel}
    found = {(e.delay_tap, e.doppler_tap): e for e in report.estimates}
    warnings = [
        f"path (delay={t}, doppler={v}) lies outside the Doppler search range 0..{cfg.doppler_search_max}"
        for (t, v) in truth if v > cfg.doppler_search_max
    ]
    row_power = np.sum(np.abs(rx) ** 2, axis=1)
    return {
        "frame": {
            "shape": list(cfg.shape),
            "pilot_doppler": cfg.pilot_doppler,
            "pilot_cells": int(bundle.pilot_mask.sum()),
            "guard_cells": int(bundle.guard_mask.sum()),
            "data_cells": int(bundle.data_mask.sum()),
            "boost_db": 20 * np.log10(boost_factor(cfg)),
            "pilot_to_symbol_db": pilot_power_ratio_db(cfg),
            "tx_power": float(np.sum(np.abs(bundle.grid) ** 2)),
            "tx_papr_db": papr_db(dd_to_time(bundle.grid)),
        },
        "received": {
            "sigma_sq": sigma_sq,
            "rx_power": float(row_power.sum()),
            "search_row_power": {int(k): float(row_power[k]) for k in cfg.search_rows},
        },
        "threshold": report.threshold_used,
        "truth": [{"delay": t, "doppler": v, "gain": [h.real, h.imag]} for (t, v), h in truth.items()],
        "detected": [
            {"delay": t, "doppler": v, "gain": [e.gain_hat.real, e.gain_hat.imag],
             "score": e.correlation_score,
             "true_gain": None if (t, v) not in truth else [truth[t, v].real, truth[t, v].imag]}
            for (t, v), e in sorted(found.items())
        ],
        "missed": [[t, v] for (t, v) in truth if (t, v) not in found],
        "false_alarms": [[t, v] for (t, v) in found if (t, v) not in truth],
        "nmse": nmse(channel, report.estimates, cfg.shape),
        "warnings": warnings,
    }


def format_demo(result: dict) -> str:
    f, r = result["frame"], result["received"]
    lines = [
        f"transmit: {f['shape'][0]}x{f['shape'][1]} grid, pilot row {f['pilot_doppler']}, "
        f"{f['pilot_cells']} pilot / {f['guard_cells']} guard / {f['data_cells']} data cells",
        f"  boost {f['boost_db']:.2f} dB per entry, pilot {f['pilot_to_symbol_db']:.2f} dB over one symbol, "
        f"PAPR {f['tx_papr_db']:.2f} dB",
        f"receive: sigma^2 = {r['sigma_sq']:.4g}, threshold {result['threshold']:.4g}",
        "detected paths (delay, doppler): estimate vs truth",
    ]
    for d in result["detected"]:
        est = complex(*d["gain"])
        true = "false alarm" if d["true_gain"] is None else f"{complex(*d['true_gain']):.4f}"
        lines.append(f"  ({d['delay']:2d}, {d['doppler']:2d})  {est:.4f}  vs  {true}")
    for t, v in result["missed"]:
        lines.append(f"  ({t:2d}, {v:2d})  missed")
    lines.append(f"NMSE {result['nmse']:.3e}")
    lines += [f"warning: {w}" for w in result["warnings"]]
    return "\n".join(lines)


# -- CLI ---------------------------------------------------------------------

def _layout_echo(config: ExperimentConfig) -> str:
    cfg = config.frame
    G, M = cfg.guard_half_width, cfg.m_delay
    return (f"frame {cfg.n_doppler}x{M}: pilot row {cfg.pilot_doppler}, {M} pilot cells, "
            f"{2 * G * M} guard cells, {cfg.n_data} data cells; "
            f"boost {20 * np.log10(boost_factor(cfg)):.2f} dB per entry")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simctl", description="Delay-Doppler pilot experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="INI-style experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(experiment: str, path=None, seed=None, trials=None, out=None) -> ExperimentConfig:
    text = FsPath(path).read_text() if path else ""
    config = parse_config(text, experiment)
    overrides = {k: v for k, v in (("seed", seed), ("trials", trials), ("output_dir", out)) if v is not None}
    return replace(config, **overrides) if overrides else config


def run_experiment(config: ExperimentConfig, workers: int = 1) -> dict[str, str]:
    """Run ``config.experiment`` and return ``{filename: contents}``."""
    if config.experiment == "papr":
        return {"ccdf.csv": ccdf_csv(run_papr(config, workers))}
    if config.experiment == "nmse":
        return {"nmse.csv": nmse_csv(run_nmse(config, workers))}
    if config.experiment == "prop1":
        return {"prop1.csv": prop1_csv(run_prop1(config, workers))}
    result = run_detect_demo(config)
    return {"detect_demo.json": json.dumps(result, indent=2) + "\n", "detect_demo.txt": format_demo(result) + "\n"}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args.experiment, args.config, args.seed, args.trials, args.out)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.verbose:
            print(_layout_echo(config))
        start = time.perf_counter()
        outputs = run_experiment(config, args.workers)
        wall = time.perf_counter() - start
        out = FsPath(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in outputs.items():
            (out / name).write_text(text)
        manifest = {
            "experiment": config.experiment,
            "seed": config.seed,
            "trials": config.trials,
            "workers": args.workers,
            "config": config.to_dict(),
            "versions": {"ddpilot": __version__, "numpy": np.__version__, "python": platform.python_version()},
            "wall_time_s": wall,
            "outputs": sorted(outputs),
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except (ConfigError, ValueError, OSError) as exc:
        print(f"simctl: error: {exc}", file=sys.stderr)
        return 2
    if config.experiment == "detect-demo":
        print(outputs["detect_demo.txt"], end="")
    else:
        print(f"wrote {', '.join(sorted(outputs))} to {out} in {wall:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
