"""Signal-processing primitives: DFT/IDFT, SRRC pulse, pulse autocorrelation."""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Pulse", "dft", "idft", "srrc_pulse", "pulse_autocorr"]


def dft(x: np.ndarray, size: int | None = None) -> np.ndarray:
    """P-point DFT of x, zero-padded with trailing zeros to P samples."""
    x = np.asarray(x)
    p = len(x) if size is None else int(size)
    if p <= 0:
        raise ValueError(f"DFT size must be positive, got {p}")
    if p < len(x):
        raise ValueError(f"DFT size {p} smaller than input length {len(x)}")
    return np.fft.fft(x, n=p)


def idft(x: np.ndarray, size: int | None = None) -> np.ndarray:
    """Inverse of dft; idft(dft(x, P), P)[:len(x)] == x."""
    x = np.asarray(x)
    p = len(x) if size is None else int(size)
    if p <= 0:
        raise ValueError(f"IDFT size must be positive, got {p}")
    if p < len(x):
        raise ValueError(f"IDFT size {p} smaller than input length {len(x)}")
    return np.fft.ifft(x, n=p)


@dataclass(frozen=True)
class Pulse:
    """Oversampled FIR pulse, symmetric and unit-energy.

    taps sample the impulse response at T/(M*F) spacing, spanning
    [-Q, +Q] symbol intervals (2*Q*F + 1 taps).
    """

    taps: np.ndarray
    oversample_factor: int
    half_support_symbols: int
    rolloff: float

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=float)
        object.__setattr__(self, "taps", taps)
        expected = 2 * self.half_support_symbols * self.oversample_factor + 1
        if len(taps) != expected:
            raise ValueError(
                f"expected {expected} taps for Q={self.half_support_symbols}, "
                f"F={self.oversample_factor}, got {len(taps)}"
            )
        if np.max(np.abs(taps - taps[::-1])) > 1e-12:
            raise ValueError("pulse taps must be symmetric")
        energy = np.sum(taps**2) / self.oversample_factor
        if abs(energy - 1.0) > 1e-9:
            raise ValueError(f"pulse energy {energy} != 1")

    @property
    def center(self) -> int:
        return self.half_support_symbols * self.oversample_factor


def srrc_pulse(rolloff: float, Q: int, F: int) -> Pulse:
    """Truncated square-root raised cosine pulse on the F-oversampled grid.

    The pulse is hard-truncated to +/- Q symbol intervals and renormalized
    to unit energy (sum taps^2 / F == 1).
    """
    if not 0.0 <= rolloff <= 1.0:
        raise ValueError(f"rolloff must be in [0,1], got {rolloff}")
    if Q < 1 or F < 1:
        raise ValueError("Q and F must be >= 1")
    # time axis in symbol intervals
    t = np.arange(-Q * F, Q * F + 1) / F
    taps = _srrc_response(t, rolloff)
    taps /= np.sqrt(np.sum(taps**2) / F)
    return Pulse(taps=taps, oversample_factor=F, half_support_symbols=Q,
                 rolloff=rolloff)


def _srrc_response(t: np.ndarray, a: float) -> np.ndarray:
    """SRRC impulse response at times t (symbol units), analytic limits at
    the singular points t=0 and |t| = 1/(4a)."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    if a == 0.0:
        return np.sinc(t)
    eps = 1e-10
    sing0 = np.abs(t) < eps
    sing1 = np.abs(np.abs(t) - 1.0 / (4.0 * a)) < eps
    regular = ~(sing0 | sing1)
    tr = t[regular]
    num = np.sin(np.pi * tr * (1 - a)) + 4 * a * tr * np.cos(np.pi * tr * (1 + a))
    den = np.pi * tr * (1 - (4 * a * tr) ** 2)
    out[regular] = num / den
    out[sing0] = 1.0 - a + 4.0 * a / np.pi
    out[sing1] = (a / np.sqrt(2.0)) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * a))
        + (1 - 2 / np.pi) * np.cos(np.pi / (4 * a))
    )
    return out


def pulse_autocorr(pulse: Pulse, lag_symbols: float) -> float:
    """Autocorrelation R_p at a (possibly fractional) symbol lag.

    Computed once on the oversampled grid via full correlation of the taps,
    then evaluated by linear interpolation. Returns 0 beyond +/- 2Q.
    """
    table = _autocorr_table(pulse)
    F = pulse.oversample_factor
    Q = pulse.half_support_symbols
    if abs(lag_symbols) >= 2 * Q:
        return 0.0
    pos = lag_symbols * F + 2 * Q * F  # index into table, center at 2QF
    i = int(np.floor(pos))
    frac = pos - i
    if i + 1 >= len(table):
        return float(table[-1])
    return float((1 - frac) * table[i] + frac * table[i + 1])


def _autocorr_table(pulse: Pulse) -> np.ndarray:
    # lazily cached on the instance; lag index spans [-2QF, +2QF]
    table = getattr(pulse, "_autocorr", None)
    if table is None:
        table = np.correlate(pulse.taps, pulse.taps, mode="full")
        table = table / pulse.oversample_factor
        object.__setattr__(pulse, "_autocorr", table)
    return table
