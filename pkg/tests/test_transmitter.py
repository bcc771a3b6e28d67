import numpy as np
import pytest

from otfs_rach.channel import matched_filter_and_sample
from otfs_rach.sequences import ZcRoot, zc_sequence
from otfs_rach.transmitter import (PreambleConfig, add_cp, build_dd_frame,
                                   critical_rate_burst, dual_dd_frame,
                                   synthesize_waveform)
from otfs_rach.zak import idzt

from conftest import make_cfg


class TestConfig:
    def test_defaults(self, cfg):
        assert (cfg.M, cfg.N, cfg.delta_f) == (139, 4, 60e3)
        assert cfg.burst_samples == (0 + 20 + 4 * 139) * 8
        assert cfg.symbol_period == pytest.approx(1 / (139 * 60e3))

    def test_root_length_mismatch(self):
        with pytest.raises(ValueError):
            PreambleConfig(M=139, root=ZcRoot(u=1, M=127))

    def test_negative_cp_rejected(self):
        with pytest.raises(ValueError):
            make_cfg(L_cp=-1)


class TestDdFrame:
    def test_columns_repeat_sequence(self, cfg):
        frame = build_dd_frame(cfg)
        x = zc_sequence(cfg.root)
        assert frame.shape == (139, 4)
        for k in range(4):
            assert np.allclose(frame[:, k], x)

    def test_time_domain_closed_form(self, cfg):
        # IDZT of the repeated frame: sqrt(N)*x_u on [0, M), zeros after
        x_c = idzt(build_dd_frame(cfg))
        x = zc_sequence(cfg.root)
        assert np.max(np.abs(x_c[:139] - 2.0 * x)) < 1e-12
        assert np.max(np.abs(x_c[139:])) < 1e-12

    def test_dual_frame_identity_at_zero(self, cfg):
        frame = build_dd_frame(cfg)
        assert np.allclose(dual_dd_frame(frame, 0), frame)

    def test_dual_frame_shifts_time_signal(self, cfg):
        frame = build_dd_frame(cfg)
        for q in [1, 2]:
            shifted = idzt(dual_dd_frame(frame, q))
            assert np.max(np.abs(shifted - np.roll(idzt(frame), q * 139))) \
                < 1e-12

    def test_dual_frame_range(self, cfg):
        frame = build_dd_frame(cfg)
        with pytest.raises(ValueError):
            dual_dd_frame(frame, 3)
        with pytest.raises(ValueError):
            dual_dd_frame(frame, -1)


class TestCyclicPrefix:
    def test_zero_length_is_copy(self):
        x = np.arange(5, dtype=complex)
        out = add_cp(x, 0)
        assert np.array_equal(out, x)
        assert out is not x

    def test_prepends_tail(self):
        x = np.arange(8, dtype=complex)
        out = add_cp(x, 3)
        assert np.array_equal(out, np.r_[x[5:], x])

    def test_preamble_cp_is_zero(self):
        c = make_cfg(L_cp=12)
        burst = critical_rate_burst(c)
        assert len(burst) == 12 + 556
        assert np.max(np.abs(burst[:12])) < 1e-12

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            add_cp(np.ones(4), -1)


class TestWaveform:
    def test_length_and_origin(self, cfg, pulse):
        s = synthesize_waveform(critical_rate_burst(cfg), pulse, cfg)
        assert len(s.samples) == cfg.burst_samples
        assert s.origin_index == pulse.center
        assert s.sample_rate_hz == pytest.approx(8 * 139 * 60e3)

    def test_single_impulse_reproduces_pulse(self, cfg, pulse):
        x_c = np.zeros(556, dtype=complex)
        x_c[0] = 1.0
        s = synthesize_waveform(x_c, pulse, cfg).samples
        n_taps = len(pulse.taps)
        assert np.max(np.abs(s[:n_taps] - pulse.taps)) < 1e-12
        assert np.max(np.abs(s[n_taps:])) < 1e-12

    def test_energy_preserved(self, cfg, pulse):
        x_c = critical_rate_burst(cfg)
        s = synthesize_waveform(x_c, pulse, cfg)
        e_wave = np.sum(np.abs(s.samples) ** 2) / cfg.F
        e_seq = np.sum(np.abs(x_c) ** 2)
        assert e_wave == pytest.approx(e_seq, rel=0.01)

    def test_pulse_rate_mismatch_rejected(self, cfg):
        from otfs_rach.numerics import srrc_pulse
        with pytest.raises(ValueError):
            synthesize_waveform(critical_rate_burst(cfg),
                                srrc_pulse(0.1, 10, 4), cfg)

    def test_matched_filter_round_trip(self, cfg, pulse):
        # synthesize -> matched filter -> critical-rate samples recovers the
        # burst up to the coherent sum of pulse-truncation sidelobes
        from otfs_rach.transmitter import TimeSignal
        x_c = critical_rate_burst(cfg)
        s = synthesize_waveform(x_c, pulse, cfg)
        y = matched_filter_and_sample(s, pulse, cfg)
        err = np.max(np.abs(y - x_c))
        assert err < 4e-2  # frozen: truncation-leakage limited

    def test_matched_filter_round_trip_random_payload(self, cfg, pulse):
        rng = np.random.default_rng(3)
        x_c = (rng.standard_normal(556) + 1j * rng.standard_normal(556)) \
            / np.sqrt(2)
        s = synthesize_waveform(x_c, pulse, cfg)
        y = matched_filter_and_sample(s, pulse, cfg)
        assert np.max(np.abs(y - x_c)) < 4e-2
