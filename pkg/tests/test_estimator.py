import itertools

import numpy as np
import pytest

from ddpilot.channel import apply_channel, awgn
from ddpilot.errors import DivisionDegenerateError, SingularSystemError
from ddpilot.estimator import (
    EstimationReport,
    PathEstimate,
    build_detection_matrix,
    default_threshold,
    estimate_joint,
    estimate_pulse_channel,
    estimate_sequence_channel,
    estimate_single,
    identify_paths,
    pulse_power_detector,
    shift_matrix,
    sidelobe_floor,
)
from ddpilot.frame import EXAMPLE_CHANNEL, ChannelRealization, FrameConfig, new_grid
from ddpilot.mseq import LfsrSpec, generate_mseq
from ddpilot.pilots import build_pulse_pilot_frame, build_sequence_pilot_frame

DEMO_CFG = FrameConfig(guard_half_width=14, doppler_search_max=14)


def pilot_only(cfg):
    return build_sequence_pilot_frame(cfg, data=np.zeros(cfg.n_data))


class TestDetectionMatrix:
    def test_rows_are_shifts(self):
        pd = build_detection_matrix(np.array(["a", "b", "c"]))
        assert pd.tolist() == [["a", "b", "c"], ["c", "a", "b"], ["b", "c", "a"]]

    def test_gram_of_bare_sequence(self):
        rho = 21.0
        pd = build_detection_matrix(np.sqrt(rho) * generate_mseq())
        G = pd @ pd.T
        np.testing.assert_allclose(np.diag(G), 63 * rho)
        np.testing.assert_allclose(G[~np.eye(63, dtype=bool)], -rho)

    def test_gram_with_dummy(self):
        row = pilot_only(FrameConfig()).pilot_reference
        rho = abs(row[0]) ** 2
        G = build_detection_matrix(row) @ build_detection_matrix(row).conj().T
        # brute-force periodic correlation of the 64-length sequence
        p = [int(v) for v in generate_mseq()] + [1]
        brute = [sum(p[j] * p[(j + i) % 64] for j in range(64)) for i in range(64)]
        assert brute[0] == 64 and max(abs(c) for c in brute[1:]) == 12
        off = G[~np.eye(64, dtype=bool)]
        assert np.max(np.abs(off)) == pytest.approx(12 * rho)
        assert not np.allclose(off, -rho)
        assert sidelobe_floor(row) == pytest.approx(2 * 12 / 64)

    def test_sidelobe_floor_bare(self):
        assert sidelobe_floor(generate_mseq()) == pytest.approx(2 / 63)


class TestThreshold:
    def test_noiseless(self):
        assert default_threshold(0.0, 1344) == 0

    def test_value(self):
        assert default_threshold(1.0, 1344, 4.0) == pytest.approx(4 * np.sqrt(1344))
        assert default_threshold(1.0, 1344) == pytest.approx(146.64, abs=0.01)

    def test_false_alarm_rate(self):
        row = pilot_only(FrameConfig()).pilot_reference
        pd = build_detection_matrix(row)
        E = np.vdot(row, row).real
        w = awgn((10**5, 64), 1.0, np.random.default_rng(0))
        scores = np.abs(w @ pd.conj().T)
        assert np.mean(scores > default_threshold(1.0, E)) < 1e-4

    def test_negative_inputs(self):
        with pytest.raises(ValueError):
            default_threshold(-1.0, 1.0)


class TestIdentify:
    def test_single_path(self):
        cfg = FrameConfig(m_delay=63)
        b = pilot_only(cfg)
        rx = apply_channel(b.grid, ChannelRealization.from_triples([(1.0, 3, 2)]))
        pd = build_detection_matrix(b.pilot_reference)
        E = np.vdot(b.pilot_reference, b.pilot_reference).real
        rows = [(k, rx[k]) for k in cfg.search_rows]
        hits = identify_paths(rows, pd, beta=E / 2, pilot_doppler=cfg.pilot_doppler)
        assert len(hits) == 1
        l, nu, score = hits[0]
        assert (l, nu) == (3, 2) and score == pytest.approx(E)

    def test_noise_only_region(self):
        cfg = FrameConfig()
        row = pilot_only(cfg).pilot_reference
        pd = build_detection_matrix(row)
        beta = default_threshold(1.0, np.vdot(row, row).real)
        rng = np.random.default_rng(11)
        frames_with_alarm = 0
        for _ in range(200):
            noise = awgn(cfg.shape, 1.0, rng)
            frames_with_alarm += bool(identify_paths([(k, noise[k]) for k in cfg.search_rows], pd, beta, 1))
        assert frames_with_alarm <= 2

    def test_example_channel_channel(self):
        b = build_sequence_pilot_frame(DEMO_CFG, rng=np.random.default_rng(0))
        rx = apply_channel(b.grid, ChannelRealization.from_triples(EXAMPLE_CHANNEL))
        rep = estimate_sequence_channel(rx, DEMO_CFG, b.pilot_reference, 0.0)
        assert rep.taps() == {(1, 1), (3, 14), (5, 7)}
        gains = {(e.delay_tap, e.doppler_tap): e.gain_hat for e in rep.estimates}
        assert gains[1, 1] == pytest.approx(0.8, abs=1e-12)
        assert gains[3, 14] == pytest.approx(0.6, abs=1e-12)
        assert gains[5, 7] == pytest.approx(0.5, abs=1e-12)

    def test_empty_region(self):
        with pytest.raises(ValueError):
            identify_paths([], np.eye(3), 1.0)

    def test_exhaustive_small_frames(self):
        # M = 7 bare sequence, N = 8, every channel of one or two paths
        cfg = FrameConfig(n_doppler=8, m_delay=7, pilot_doppler=0, guard_half_width=3,
                          sequence=LfsrSpec(3, (3, 1)))
        b = build_sequence_pilot_frame(cfg, data=np.zeros(cfg.n_data))
        assert b.pilot_reference.size == 7
        pd = build_detection_matrix(b.pilot_reference)
        rho = abs(b.pilot_reference[0]) ** 2
        cells = [(t, v) for t in range(7) for v in range(cfg.doppler_search_max + 1)]
        channels = [[c] for c in cells] + [list(pair) for pair in itertools.combinations(cells, 2)]
        for taps in channels:
            gains = [1.0, 0.7j][: len(taps)]
            ch = ChannelRealization.from_triples([(h, t, v) for h, (t, v) in zip(gains, taps)])
            rx = apply_channel(b.grid, ch)
            hits = identify_paths([(k, rx[k]) for k in cfg.search_rows], pd, beta=3.0 * rho)
            assert {(l, nu) for l, nu, _ in hits} == set(taps), taps


class TestEstimateSingle:
    def test_noiseless(self):
        p = np.roll(generate_mseq(), 4) * 2.0
        assert estimate_single(0.37 * p, p) == pytest.approx(0.37, abs=1e-15)

    def test_zero_entry(self):
        with pytest.raises(DivisionDegenerateError):
            estimate_single(np.ones(3), np.array([1.0, 0.0, 1.0]))

    def test_unbiased_with_predicted_variance(self):
        rng = np.random.default_rng(5)
        rho, M, h, trials = 21.0, 64, 0.4 - 0.2j, 20000
        p = np.sqrt(rho) * np.append(generate_mseq(), 1)
        w = awgn((trials, M), 1.0, rng)
        est = np.array([estimate_single(h * p + wi, p) for wi in w])
        err = est - h
        var = 1.0 / (M * rho)
        assert abs(err.mean()) < 3 * np.sqrt(var / trials)
        assert np.mean(np.abs(err) ** 2) == pytest.approx(var, rel=0.05)


class TestEstimateJoint:
    def test_single_column_equals_single(self):
        rng = np.random.default_rng(0)
        p = 3.0 * np.append(generate_mseq(), 1)
        y = 0.2j * np.roll(p, 7) + awgn(64, 0.1, rng)
        assert estimate_joint(y, [7], p)[0] == pytest.approx(estimate_single(y, np.roll(p, 7)), abs=1e-12)

    def test_example_channel_gains(self):
        x = generate_mseq().astype(float)
        y = 0.8 * np.roll(x, 1) + 0.5 * np.roll(x, 5)
        np.testing.assert_allclose(estimate_joint(y, [1, 5], x), [0.8, 0.5], atol=1e-10)

    @pytest.mark.parametrize("P", range(1, 7))
    def test_exact_recovery(self, P):
        rng = np.random.default_rng(P)
        x = generate_mseq().astype(float)
        shifts = rng.choice(63, P, replace=False)
        h = rng.standard_normal(P) + 1j * rng.standard_normal(P)
        y = shift_matrix(x, shifts) @ h
        np.testing.assert_allclose(estimate_joint(y, shifts, x), h, atol=1e-10)

    def test_singular(self):
        with pytest.raises(SingularSystemError):
            estimate_joint(np.ones(4), [0, 1], np.ones(4))

    def test_duplicate_shifts(self):
        with pytest.raises(ValueError):
            estimate_joint(np.ones(7), [1, 8], generate_mseq(LfsrSpec(3, (3, 1))))

    def test_error_covariance_and_bias(self):
        rng = np.random.default_rng(8)
        x = generate_mseq().astype(float)
        shifts = [2, 17, 40]
        X = shift_matrix(x, shifts)
        h = np.array([0.5, -0.3j, 0.1 + 0.1j])
        trials = 10**5
        Y = X @ h + awgn((trials, 63), 1.0, rng)
        H = np.linalg.lstsq(X, Y.T, rcond=None)[0].T
        # the loop path and the batched path agree
        np.testing.assert_allclose(estimate_joint(Y[0], shifts, x), H[0], atol=1e-12)
        E = H - h
        se = np.sqrt(np.diag(np.linalg.inv(X.T @ X)) / trials)
        assert np.all(np.abs(E.mean(axis=0)) < 3 * se)
        C_emp = E.T @ E.conj() / trials
        C = np.linalg.inv(X.T @ X)
        np.testing.assert_allclose(np.diag(C_emp).real, np.diag(C), rtol=0.05)
        assert np.max(np.abs(C_emp - C)) < 0.05 * np.max(np.diag(C))


class TestPulseDetector:
    def test_example_channel_noiseless(self):
        cfg = DEMO_CFG
        b = build_pulse_pilot_frame(cfg, data=np.zeros(cfg.n_data))
        rx = apply_channel(b.grid, ChannelRealization.from_triples(EXAMPLE_CHANNEL))
        est = pulse_power_detector(rx, b.pilot_reference, (cfg.pilot_doppler, cfg.pulse_delay), 0.0)
        got = {(e.delay_tap, e.doppler_tap): e.gain_hat for e in est}
        assert got.keys() == {(1, 1), (3, 14), (5, 7)}
        assert got[1, 1] == pytest.approx(0.8) and got[3, 14] == pytest.approx(0.6) and got[5, 7] == pytest.approx(0.5)

    def test_false_alarm_tail(self):
        cells = 10**6
        noise = awgn((1000, 1000), 1.0, np.random.default_rng(3))
        n_fa = len(pulse_power_detector(noise, 1.0, (0, 0), 9.0))
        expect = cells * np.exp(-9)
        assert abs(n_fa - expect) < 5 * np.sqrt(expect)

    def test_zero_grid(self):
        assert pulse_power_detector(new_grid(8, 8), 1.0, (0, 0), 0.0) == []

    def test_pipeline_row_restriction(self):
        cfg = FrameConfig()
        b = build_pulse_pilot_frame(cfg, rng=np.random.default_rng(0))
        rx = apply_channel(b.grid, ChannelRealization.from_triples([(1.0, 2, 3)]))
        rep = estimate_pulse_channel(rx, cfg, b.pilot_reference, 0.0)
        assert rep.taps() == {(2, 3)}


def test_report_rejects_duplicates():
    e = PathEstimate(1, 1, 0.5, 1.0)
    with pytest.raises(ValueError):
        EstimationReport([e, e])


def test_report_csv():
    rep = EstimationReport([PathEstimate(3, 14, 0.6 + 0.1j, 800.0)])
    assert rep.to_csv().splitlines() == ["k,l,re_h_hat,im_h_hat,score", "14,3,0.6,0.1,800.0"]


def test_joint_stage_used_for_shared_doppler_row():
    cfg = FrameConfig()
    b = build_sequence_pilot_frame(cfg, rng=np.random.default_rng(2))
    ch = ChannelRealization.from_triples([(0.8, 1, 4), (0.5, 5, 4), (0.3j, 0, 0)])
    rep = estimate_sequence_channel(apply_channel(b.grid, ch), cfg, b.pilot_reference, 0.0)
    got = {(e.delay_tap, e.doppler_tap): e.gain_hat for e in rep.estimates}
    assert got.keys() == {(1, 4), (5, 4), (0, 0)}
    assert got[1, 4] == pytest.approx(0.8, abs=1e-10) and got[5, 4] == pytest.approx(0.5, abs=1e-10)
