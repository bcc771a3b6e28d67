"""Discrete Zak transform pair between length-MN time sequences and the
M x N delay-Doppler grid (critical sampling, delta_f * T = 1)."""

import numpy as np

__all__ = ["idzt", "dzt"]


def idzt(grid: np.ndarray) -> np.ndarray:
    """Inverse DZT: x[l + M*m] = (1/sqrt(N)) sum_k Z[l,k] exp(j*2*pi*k*m/N).

    grid is M x N indexed [delay l, Doppler k]; returns a length-MN vector.
    """
    grid = np.asarray(grid)
    if grid.ndim != 2:
        raise ValueError(f"DD grid must be 2-D, got shape {grid.shape}")
    M, N = grid.shape
    # IFFT over the Doppler axis gives (1/N) sum_k Z[l,k] exp(j2pi km/N)
    blocks = np.fft.ifft(grid, axis=1) * np.sqrt(N)
    # blocks[l, m] -> x[l + M*m]
    return blocks.T.reshape(M * N)


def dzt(x: np.ndarray, M: int, N: int) -> np.ndarray:
    """DZT: Z[l,k] = (1/sqrt(N)) sum_m x[l + m*M] exp(-j*2*pi*m*k/N).

    Exact inverse of idzt; unitary, so energy and noise statistics carry
    over to the DD grid unchanged.
    """
    x = np.asarray(x)
    if x.ndim != 1 or len(x) != M * N:
        raise ValueError(f"expected length {M * N} vector, got shape {x.shape}")
    blocks = x.reshape(N, M).T  # blocks[l, m] = x[l + m*M]
    return np.fft.fft(blocks, axis=1) / np.sqrt(N)
