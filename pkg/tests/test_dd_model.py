import numpy as np
import pytest

from otfs_rach.channel import ChannelParams, apply_discrete_channel
from otfs_rach.dd_model import (DualChannelView, dd_output_oracle,
                                dd_system_equation, spreading_nu,
                                spreading_tau)
from otfs_rach.sequences import zc_sequence
from otfs_rach.transmitter import critical_rate_burst
from otfs_rach.zak import dzt

from conftest import make_cfg

M, N, DF = 139, 4, 60e3
BIN = 1.0 / (M * DF)


class TestDualView:
    def test_split_and_phase(self, cfg):
        p = ChannelParams.from_offsets(1.0, (2 * M + 17) * BIN, 18e3, cfg)
        d = DualChannelView.from_params(p)
        assert (d.r_M, d.q_M) == (17, 2)
        b = p.doppler_bins
        assert d.h0_dual == pytest.approx(np.exp(-2j * np.pi * b * 2 / N))

    def test_delay_range_checks(self, cfg):
        with pytest.raises(ValueError, match="negative"):
            DualChannelView.from_params(
                ChannelParams.from_offsets(1.0, -1.0 * BIN, 0.0, cfg))
        with pytest.raises(ValueError, match="N-1"):
            DualChannelView.from_params(
                ChannelParams.from_offsets(1.0, 3 * M * BIN, 0.0, cfg))


class TestSpreadingGrids:
    def test_delay_grid_in_band(self):
        g = spreading_tau(5, M, N)
        assert np.allclose(g[5, :], 1 / np.sqrt(N))
        mask = np.ones(M, dtype=bool)
        mask[5] = False
        assert np.max(np.abs(g[mask, :])) == 0.0

    def test_delay_grid_wrapped(self):
        g = spreading_tau(M + 3, M, N)
        k = np.arange(N)
        assert np.allclose(g[3, :], np.exp(-2j * np.pi * k / N) / np.sqrt(N))

    def test_doppler_grid_integer_is_delta(self):
        g = spreading_nu(0.0, M, N)
        assert np.allclose(g[:, 0], np.sqrt(N))
        assert np.max(np.abs(g[:, 1:])) < 1e-12

    def test_doppler_grid_fractional_energy(self):
        # each delay row of the Doppler kernel carries total energy N
        g = spreading_nu(0.5, M, N)
        row_energy = np.sum(np.abs(g) ** 2, axis=1)
        assert np.allclose(row_energy, N, rtol=1e-9)

    def test_doppler_grid_delay_phase_ramp(self):
        b = 0.73
        g = spreading_nu(b, M, N)
        l = np.arange(M)
        ramp = np.exp(2j * np.pi * b * l / (M * N))
        assert np.allclose(g, ramp[:, None] * g[0, None, :], atol=1e-12)


class TestCoherentCollapse:
    def test_interference_sums_collapse(self, rng):
        # sum_q x[q] D(l - q) e^{...} telescopes to a single x term: the
        # two oracle routes must agree for arbitrary fractional offsets
        for _ in range(25):
            cfg = make_cfg(u=int(rng.integers(1, 139)))
            pulse = cfg.make_pulse()
            tau0 = rng.uniform(0.0, (3 * M - 1) * BIN)
            nu0 = rng.uniform(-0.49, 0.49) * DF
            p = ChannelParams.from_offsets(1.0, tau0, nu0, cfg)
            a = dd_output_oracle(cfg, p, pulse)
            b = dd_system_equation(cfg, p, pulse)
            assert np.max(np.abs(a - b)) < 1e-9


class TestSystemEquation:
    def test_integer_delay_zero_cfo_closed_form(self, cfg, pulse):
        # single tap: z_y[l,k] = h0 x_u[(l-a0)_M] e^{-j2pi k q/N} with the
        # wrap branch advancing q at the delay boundary
        h0, a0 = 0.6 - 0.3j, M + 11  # r_M=11, q_M=1
        p = ChannelParams.from_offsets(h0, a0 * BIN, 0.0, cfg)
        z = dd_system_equation(cfg, p, pulse, L=0)
        x = zc_sequence(cfg.root)
        l = np.arange(M)[:, None]
        k = np.arange(N)[None, :]
        q_of_l = np.where(l >= 11, 1, 2)  # wrapped delays advance one block
        expect = h0 * x[(l - 11) % M] * np.exp(-2j * np.pi * k * q_of_l / N)
        assert np.max(np.abs(z - expect)) < 1e-12

    def test_matches_simulated_channel_integer(self, cfg, pulse, rng):
        for _ in range(10):
            a0 = int(rng.integers(0, 3 * M))
            nu0 = rng.uniform(-0.49, 0.49) * DF
            p = ChannelParams.from_offsets(0.8 + 0.2j, a0 * BIN, nu0, cfg)
            y = apply_discrete_channel(critical_rate_burst(cfg), p, pulse)
            err = np.max(np.abs(dd_system_equation(cfg, p, pulse)
                                - dzt(y, M, N)))
            assert err < 1e-9

    def test_matches_simulated_channel_fractional(self, cfg, pulse, rng):
        for _ in range(10):
            tau0 = rng.uniform(0.0, (3 * M - 1) * BIN)
            nu0 = rng.uniform(-0.49, 0.49) * DF
            p = ChannelParams.from_offsets(1.0, tau0, nu0, cfg)
            y = apply_discrete_channel(critical_rate_burst(cfg), p, pulse)
            err = np.max(np.abs(dd_system_equation(cfg, p, pulse)
                                - dzt(y, M, N)))
            assert err < 1e-9

    def test_energy_conservation_integer_delay(self, cfg, pulse):
        # unit-modulus tap magnitudes: ||Z_y||^2 = |h0|^2 * MN at integer
        # delay and zero CFO with the ideal (single-tap) channel
        p = ChannelParams.from_offsets(0.5, 7 * BIN, 0.0, cfg)
        z = dd_system_equation(cfg, p, pulse, L=0)
        assert np.sum(np.abs(z) ** 2) == pytest.approx(0.25 * M * N, rel=1e-9)

    def test_doppler_block_phase_ratio(self, cfg, pulse):
        # shifting the delay by one full block multiplies row k by
        # exp(-j2pi k/N) at zero CFO
        p0 = ChannelParams.from_offsets(1.0, 23 * BIN, 0.0, cfg)
        p1 = ChannelParams.from_offsets(1.0, (M + 23) * BIN, 0.0, cfg)
        z0 = dd_system_equation(cfg, p0, pulse, L=0)
        z1 = dd_system_equation(cfg, p1, pulse, L=0)
        k = np.arange(N)
        assert np.max(np.abs(z1 - z0 * np.exp(-2j * np.pi * k / N))) < 1e-12
