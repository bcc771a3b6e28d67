"""Joint delay detector: DD-domain decision variable with coherent
Doppler accumulation, false-alarm threshold, peak search and fractional
delay refinement."""

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np

from .channel import ChannelParams
from .sequences import ZcRoot, extended_sequence
from .transmitter import PreambleConfig

__all__ = ["DecisionGrid", "DetectionDecision", "TrialOutcome",
           "threshold_from_pfa", "decision_grid", "detect",
           "refine_fractional", "classify_trial"]

NATIVE_FFT = 512          # power-of-two padding of 2M = 278
INTERPOLATED_FFT = 1024   # lag spacing 2M/1024 samples = 1/(512*delta_f)


def threshold_from_pfa(p_fa: float, M: int, N: int) -> float:
    """Detection threshold for a target false-alarm probability,
    r_th = -(2/(MN)) * ln(1 - (1 - p_fa)^(1/M))."""
    if not 0.0 < p_fa < 1.0:
        raise ValueError(f"p_fa must be in (0,1), got {p_fa}")
    return -2.0 / (M * N) * np.log(1.0 - (1.0 - p_fa) ** (1.0 / M))


def pfa_from_threshold(r_th: float, M: int, N: int) -> float:
    """Inverse of threshold_from_pfa."""
    return 1.0 - (1.0 - np.exp(-r_th * M * N / 2.0)) ** M


@dataclass(frozen=True)
class DecisionGrid:
    """Decision variable rho[candidate, mu, gamma] (non-negative, scaled
    by 1/(MN)^2). mu steps by lag_step critical-rate samples."""

    rho: np.ndarray
    candidates: tuple[ZcRoot, ...]
    M: int
    N: int
    delta_f: float
    lag_step: float
    mode: str


class TrialOutcome(str, Enum):
    CORRECT = "correct"
    MISS_NO_PEAK = "miss_no_peak"
    MISS_WRONG_PREAMBLE = "miss_wrong_preamble"
    MISS_TIMING = "miss_timing"


@dataclass(frozen=True)
class DetectionDecision:
    detected: bool
    u_hat: int = 0
    r_m_hat: float = 0.0
    q_m_hat: int = 0
    peak: float = 0.0
    tau_hat: float = 0.0


@lru_cache(maxsize=16)
def _reference_spectra(roots: tuple[tuple[int, int], ...], N: int,
                       fft_size: int) -> np.ndarray:
    """DFTs of the time-reversed conjugate extended sequences,
    shape [V, N, fft_size]."""
    V = len(roots)
    M = roots[0][1]
    out = np.empty((V, N, fft_size), dtype=complex)
    idx = (-np.arange(2 * M)) % (2 * M)
    for v, (u, m_len) in enumerate(roots):
        root = ZcRoot(u=u, M=m_len)
        for k in range(N):
            g = np.conj(extended_sequence(root, k, N))[idx]
            out[v, k] = np.fft.fft(g, n=fft_size)
    return out


def decision_grid(z_y: np.ndarray, candidates: list[ZcRoot],
                  cfg: PreambleConfig, resolution_mode: str = "native") -> DecisionGrid:
    """Compute rho over all candidates, delay lags in [0, M) and Doppler
    hypotheses, via FFT circular correlation against the extended
    reference sequences and a coherent N-point accumulation across
    Doppler columns.

    "native" keeps the integer critical-rate lag grid; "interpolated"
    zero-pads the spectral product to a 1024-point IDFT for half-sample
    lag spacing.
    """
    if not candidates:
        raise ValueError("candidate list is empty")
    if resolution_mode not in ("native", "interpolated"):
        raise ValueError(f"unknown resolution mode {resolution_mode!r}")
    z_y = np.asarray(z_y)
    M, N = cfg.M, cfg.N
    if z_y.shape != (M, N):
        raise ValueError(f"expected {M}x{N} DD grid, got {z_y.shape}")
    key = tuple((r.u, r.M) for r in candidates)
    if resolution_mode == "native":
        P = NATIVE_FFT
        ref = _reference_spectra(key, N, P)
        zf = np.fft.fft(z_y, n=P, axis=0).T          # [N, P]
        prod = zf[None, :, :] * ref                  # [V, N, P]
        lin = np.fft.ifft(prod, axis=2)
        # fold the linear correlation back to the 2M-circular one
        corr = lin[:, :, :M].copy()
        tail = lin[:, :, 2 * M:3 * M]
        corr[:, :, :tail.shape[2]] += tail
        lag_step = 1.0
    else:
        ref = _reference_spectra(key, N, 2 * M)
        zf = np.fft.fft(z_y, n=2 * M, axis=0).T
        prod = zf[None, :, :] * ref                  # [V, N, 2M]
        P = INTERPOLATED_FFT
        padded = np.zeros(prod.shape[:2] + (P,), dtype=complex)
        padded[:, :, :M] = prod[:, :, :M]
        padded[:, :, P - M + 1:] = prod[:, :, M + 1:]
        padded[:, :, M] = prod[:, :, M] / 2.0
        padded[:, :, P - M] = prod[:, :, M] / 2.0
        up = np.fft.ifft(padded, axis=2) * (P / (2 * M))
        corr = up[:, :, :P // 2]                     # lags < M samples
        lag_step = 2 * M / P
    # coherent accumulation: sum_k exp(+j2pi k gamma/N) corr[v,k,mu]
    acc = np.fft.ifft(corr, axis=1) * N              # [V, N(gamma), n_mu]
    rho = np.abs(np.transpose(acc, (0, 2, 1))) ** 2 / (M * N) ** 2
    return DecisionGrid(rho=rho, candidates=tuple(candidates), M=M, N=N,
                        delta_f=cfg.delta_f, lag_step=lag_step,
                        mode=resolution_mode)


def detect(grid: DecisionGrid, r_th: float) -> DetectionDecision:
    """Argmax over entries >= r_th, searched over gamma in [0, N-2];
    ties resolved to the lowest candidate, then lag, then Doppler index."""
    if r_th < 0:
        raise ValueError("threshold must be >= 0")
    rho = grid.rho[:, :, :grid.N - 1]
    peak = float(rho.max()) if rho.size else 0.0
    if peak < r_th or peak <= 0.0:
        return DetectionDecision(detected=False)
    v, mu, gamma = np.unravel_index(int(np.argmax(rho)), rho.shape)
    r_m = mu * grid.lag_step
    tau = (r_m + gamma * grid.M) / (grid.M * grid.delta_f)
    return DetectionDecision(detected=True, u_hat=grid.candidates[v].u,
                             r_m_hat=r_m, q_m_hat=int(gamma), peak=peak,
                             tau_hat=tau)


def refine_fractional(grid: DecisionGrid,
                      decision: DetectionDecision) -> DetectionDecision:
    """Half-sample refinement: if a cyclic lag neighbor holds at least
    1/1.25 of the peak power, shift the lag estimate 0.5 samples toward
    it (toward the larger neighbor, +1 on an exact tie)."""
    if not decision.detected:
        return decision
    if grid.mode != "native":
        raise ValueError("refinement applies to the native lag grid only")
    v = next(i for i, r in enumerate(grid.candidates)
             if r.u == decision.u_hat)
    mu = int(round(decision.r_m_hat))
    gamma = decision.q_m_hat
    peak = grid.rho[v, mu, gamma]
    n_mu = grid.rho.shape[1]
    up = grid.rho[v, (mu + 1) % n_mu, gamma]
    down = grid.rho[v, (mu - 1) % n_mu, gamma]
    cand_up = up > 0 and peak / up < 1.25
    cand_down = down > 0 and peak / down < 1.25
    if not (cand_up or cand_down):
        return decision
    if cand_up and cand_down:
        step = 0.5 if up >= down else -0.5
    else:
        step = 0.5 if cand_up else -0.5
    r_m = decision.r_m_hat + step
    tau = (r_m + gamma * grid.M) / (grid.M * grid.delta_f)
    return replace(decision, r_m_hat=r_m, tau_hat=tau)


def classify_trial(decision: DetectionDecision, truth: ChannelParams,
                   true_root: ZcRoot) -> TrialOutcome:
    """Per-trial outcome against the transmitted root and true delay.
    A timing error beyond one delay bin (1/(M*delta_f)) counts as a miss."""
    if not decision.detected:
        return TrialOutcome.MISS_NO_PEAK
    if decision.u_hat != true_root.u:
        return TrialOutcome.MISS_WRONG_PREAMBLE
    bin_s = 1.0 / (truth.M * truth.delta_f)
    if abs(decision.tau_hat - truth.tau0) > bin_s:
        return TrialOutcome.MISS_TIMING
    return TrialOutcome.CORRECT
