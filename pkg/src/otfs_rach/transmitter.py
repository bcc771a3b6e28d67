"""Preamble construction: DD frame, dual-system variant, CP extension and
the oversampled transmit waveform."""

from dataclasses import dataclass, field

import numpy as np

from .numerics import Pulse, srrc_pulse
from .sequences import ZcRoot, zc_sequence
from .zak import idzt

__all__ = ["PreambleConfig", "TimeSignal", "build_dd_frame", "dual_dd_frame",
           "add_cp", "synthesize_waveform"]


@dataclass(frozen=True)
class PreambleConfig:
    """Burst parameters. Defaults: M=139, N=4, delta_f=60 kHz, SRRC with
    10% roll-off spanning 2Q=20 symbol intervals, zero-length CP, F=8."""

    M: int = 139
    N: int = 4
    delta_f: float = 60e3
    root: ZcRoot = field(default_factory=lambda: ZcRoot(u=1, M=139))
    Q: int = 10
    rolloff: float = 0.1
    L_cp: int = 0
    F: int = 8

    def __post_init__(self):
        if self.root.M != self.M:
            raise ValueError(f"root length {self.root.M} != M={self.M}")
        if self.L_cp < 0:
            raise ValueError("L_cp must be >= 0")
        if self.N < 2:
            raise ValueError("N must be >= 2")

    @property
    def T(self) -> float:
        return 1.0 / self.delta_f

    @property
    def symbol_period(self) -> float:
        """Critical-rate sample period T/M."""
        return self.T / self.M

    @property
    def burst_samples(self) -> int:
        """Oversampled burst length (L_cp + 2Q + N*M) * F."""
        return (self.L_cp + 2 * self.Q + self.N * self.M) * self.F

    @property
    def burst_duration(self) -> float:
        return (self.L_cp + 2 * self.Q + self.N * self.M) * self.symbol_period

    def make_pulse(self) -> Pulse:
        return srrc_pulse(self.rolloff, self.Q, self.F)


@dataclass(frozen=True)
class TimeSignal:
    """Complex baseband samples on the F-times-oversampled grid.

    samples[j] corresponds to t = (j - origin_index) * T/(M*F), so the
    transmit filter delay is tracked rather than searched at the receiver.
    """

    samples: np.ndarray
    sample_rate_hz: float
    oversample_factor: int
    origin_index: int = 0


def build_dd_frame(cfg: PreambleConfig) -> np.ndarray:
    """DD preamble frame: the ZC sequence in delay, repeated across all
    Doppler columns. Returns an M x N grid."""
    x = zc_sequence(cfg.root)
    return np.tile(x[:, None], (1, cfg.N))


def dual_dd_frame(grid: np.ndarray, q_M: int) -> np.ndarray:
    """Doppler phase ramp exp(-j*2*pi*k*q_M/N) embedding an integer
    delay of q_M*M critical-rate samples at the transmitter."""
    grid = np.asarray(grid)
    M, N = grid.shape
    if not 0 <= q_M <= N - 2:
        raise ValueError(f"q_M={q_M} outside [0, {N - 2}]: the dual view "
                         f"only covers delays below (N-1)*T")
    k = np.arange(N)
    return grid * np.exp(-2j * np.pi * k * q_M / N)[None, :]


def add_cp(x: np.ndarray, L_cp: int) -> np.ndarray:
    """Prepend the cyclic prefix x[(n)_MN] for n in [-L_cp, 0).

    For the preamble of this design the tail of x is zero, so the CP
    degenerates to zero padding.
    """
    if L_cp < 0:
        raise ValueError("L_cp must be >= 0")
    if L_cp == 0:
        return np.asarray(x).copy()
    x = np.asarray(x)
    return np.concatenate([x[len(x) - L_cp:], x])


def critical_rate_burst(cfg: PreambleConfig) -> np.ndarray:
    """CP-extended critical-rate sequence x_c (length L_cp + M*N)."""
    return add_cp(idzt(build_dd_frame(cfg)), cfg.L_cp)


def synthesize_waveform(x_c: np.ndarray, pulse: Pulse, cfg: PreambleConfig) -> TimeSignal:
    """Pulse-shaped transmit waveform on the F*M*delta_f grid.

    x_c[0] (the CP start) is placed at t = 0; output spans exactly
    cfg.burst_samples samples starting at t = -Q*T/M.
    """
    F = pulse.oversample_factor
    if F != cfg.F:
        raise ValueError(f"pulse oversample factor {F} != config F={cfg.F}")
    x_c = np.asarray(x_c)
    up = np.zeros((len(x_c) - 1) * F + 1, dtype=complex)
    up[::F] = x_c
    s = np.convolve(up, pulse.taps.astype(complex))
    total = cfg.burst_samples
    if len(s) < total:
        s = np.concatenate([s, np.zeros(total - len(s), dtype=complex)])
    else:
        s = s[:total]
    return TimeSignal(samples=s,
                      sample_rate_hz=cfg.F * cfg.M * cfg.delta_f,
                      oversample_factor=cfg.F,
                      origin_index=pulse.center)
