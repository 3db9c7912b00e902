import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddpilot.frame import (
    EXAMPLE_CHANNEL,
    ChannelRealization,
    FrameConfig,
    Path,
    dump_grid,
    load_grid,
    new_grid,
    total_power,
)


class TestGrid:
    def test_default_size_is_zero(self):
        g = new_grid(32, 64)
        assert g.shape == (32, 64)
        assert g.size == 2048
        assert total_power(g) == 0

    def test_minimal(self):
        g = new_grid(1, 1)
        assert g.shape == (1, 1) and g[0, 0] == 0

    def test_unit_cell(self):
        g = new_grid(4, 4)
        g[0, 0] = 1
        assert total_power(g) == 1

    @pytest.mark.parametrize("shape", [(0, 4), (4, 0), (-1, 3)])
    def test_rejects_non_positive(self, shape):
        with pytest.raises(ValueError):
            new_grid(*shape)

    def test_single_cell_amplitude_three(self):
        g = new_grid(3, 5)
        g[2, 4] = 3
        assert total_power(g) == 9

    def test_pilot_region_budget_cells(self):
        g = new_grid(32, 64)
        g[:21] = 1
        assert total_power(g) == 1344

    @given(st.integers(0, 7), st.integers(0, 5), st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e6))
    def test_index_round_trip(self, k, l, a):
        g = new_grid(8, 6)
        g[k, l] = a
        assert g[k, l] == a

    @given(st.integers(0, 2**32 - 1))
    def test_power_permutation_invariant(self, seed):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((5, 7)) + 1j * rng.standard_normal((5, 7))
        shuffled = rng.permutation(g.ravel()).reshape(5, 7)
        assert total_power(shuffled) == pytest.approx(total_power(g), rel=1e-12)


class TestDump:
    def test_header_and_rows(self):
        g = new_grid(2, 3)
        g[1, 2] = 0.5 - 2j
        text = dump_grid(g)
        lines = text.splitlines()
        assert lines[0] == "N=2 M=3"
        assert len(lines) == 3
        assert lines[2].split(",")[2] == "0.5-2.0j"

    def test_round_trip_exact(self):
        rng = np.random.default_rng(3)
        g = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
        np.testing.assert_array_equal(load_grid(dump_grid(g)), g)

    def test_row_count_checked(self):
        with pytest.raises(ValueError):
            load_grid("N=3 M=1\n0j\n0j\n")


class TestChannelRealization:
    def test_example_channel_triples(self):
        ch = ChannelRealization.from_triples(EXAMPLE_CHANNEL)
        assert [(p.gain, p.delay_tap, p.doppler_tap) for p in ch] == [(0.8, 1, 1), (0.6, 3, 14), (0.5, 5, 7)]

    def test_duplicate_taps_rejected(self):
        with pytest.raises(ValueError, match="resolvable"):
            ChannelRealization((Path(1, 0, 0), Path(0.5, 0, 0)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ChannelRealization(())

    def test_dump_round_trip(self):
        ch = ChannelRealization.from_triples([(0.3 - 0.1j, 2, 4), (1j, 0, 0)])
        text = ch.dumps()
        assert text.splitlines()[1] == "0, 0.3, -0.1, 2, 4"
        assert ChannelRealization.loads(text) == ch

    def test_response_grid(self):
        H = ChannelRealization.from_triples(EXAMPLE_CHANNEL).response(32, 64)
        assert H[14, 3] == 0.6 and H[7, 5] == 0.5 and total_power(H) == pytest.approx(1.25)

    def test_response_bounds(self):
        with pytest.raises(ValueError):
            ChannelRealization.from_triples(EXAMPLE_CHANNEL).response(8, 64)


class TestFrameConfig:
    def test_defaults(self):
        cfg = FrameConfig()
        assert cfg.shape == (32, 64)
        assert cfg.doppler_search_max == cfg.guard_half_width == 10
        assert cfg.pulse_delay == 32
        assert cfg.n_data == 11 * 64

    def test_rows_partition(self):
        cfg = FrameConfig(pilot_doppler=28)
        rows = np.concatenate([cfg.guard_rows, cfg.data_rows])
        assert sorted(rows) == list(range(32))
        assert cfg.guard_rows[10] == 28

    def test_guard_must_fit(self):
        with pytest.raises(ValueError):
            FrameConfig(n_doppler=20, guard_half_width=10)

    def test_search_bounded_by_guard(self):
        with pytest.raises(ValueError):
            FrameConfig(guard_half_width=4, doppler_search_max=5)

    def test_search_rows_wrap(self):
        cfg = FrameConfig(n_doppler=8, m_delay=7, pilot_doppler=6, guard_half_width=3)
        assert list(cfg.search_rows) == [6, 7, 0, 1]
