import numpy as np
import pytest

from otfs_rach.zak import dzt, idzt

M, N = 139, 4


def _random_grid(rng, m=M, n=N):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


class TestZakTransform:
    def test_round_trip(self, rng):
        for _ in range(20):
            grid = _random_grid(rng)
            back = dzt(idzt(grid), M, N)
            assert np.max(np.abs(back - grid)) < 1e-12

    def test_round_trip_time_first(self, rng):
        x = rng.standard_normal(M * N) + 1j * rng.standard_normal(M * N)
        assert np.max(np.abs(idzt(dzt(x, M, N)) - x)) < 1e-12

    def test_unitary_energy(self, rng):
        grid = _random_grid(rng)
        x = idzt(grid)
        assert np.sum(np.abs(x) ** 2) == pytest.approx(
            np.sum(np.abs(grid) ** 2), rel=1e-12)

    def test_linearity(self, rng):
        g1, g2 = _random_grid(rng), _random_grid(rng)
        a, b = 2.0 - 1j, 0.3 + 0.7j
        lhs = idzt(a * g1 + b * g2)
        rhs = a * idzt(g1) + b * idzt(g2)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_single_dd_entry_closed_form(self):
        # Z = delta at (l0, k0) -> x[l0 + mM] = exp(j2pi k0 m/N)/sqrt(N)
        l0, k0 = 7, 3
        grid = np.zeros((M, N), dtype=complex)
        grid[l0, k0] = 1.0
        x = idzt(grid)
        m = np.arange(N)
        expect = np.zeros(M * N, dtype=complex)
        expect[l0 + m * M] = np.exp(2j * np.pi * k0 * m / N) / np.sqrt(N)
        assert np.max(np.abs(x - expect)) < 1e-12

    def test_constant_doppler_row_gives_repetition(self, rng):
        # Z[l,k] = c[l] for all k -> x = sqrt(N) * [c, 0, 0, 0] pattern
        c = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        grid = np.tile(c[:, None], (1, N))
        x = idzt(grid)
        assert np.max(np.abs(x[:M] - np.sqrt(N) * c)) < 1e-12
        assert np.max(np.abs(x[M:])) < 1e-12

    def test_time_shift_by_M_is_doppler_ramp(self, rng):
        # x[n - M] (circular) <-> Z[l,k] * exp(-j2pi k/N)
        x = rng.standard_normal(M * N) + 1j * rng.standard_normal(M * N)
        lhs = dzt(np.roll(x, M), M, N)
        k = np.arange(N)
        rhs = dzt(x, M, N) * np.exp(-2j * np.pi * k / N)[None, :]
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_white_noise_stays_white(self):
        # unitarity: complex white noise maps to the same per-cell variance
        rng = np.random.default_rng(7)
        n_grids = 200
        samples = np.empty((n_grids, M, N), dtype=complex)
        for t in range(n_grids):
            x = (rng.standard_normal(M * N)
                 + 1j * rng.standard_normal(M * N)) / np.sqrt(2.0)
            samples[t] = dzt(x, M, N)
        var = np.mean(np.abs(samples) ** 2)
        assert var == pytest.approx(1.0, rel=0.02)
        # adjacent-cell correlation should vanish
        corr = np.mean(samples[:, :-1, :] * np.conj(samples[:, 1:, :]))
        assert abs(corr) < 0.01

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            idzt(np.ones(10))
        with pytest.raises(ValueError):
            dzt(np.ones(10), M, N)
