"""Analytic delay-Doppler oracle: DD spreading functions, the full
double-sum input-output relation, and its coherently collapsed system
equation. Used to validate the simulation chain and the detector; not a
fast path."""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, beta_taps
from .numerics import Pulse
from .sequences import zc_sequence
from .transmitter import PreambleConfig, build_dd_frame, dual_dd_frame

__all__ = ["DualChannelView", "spreading_tau", "spreading_nu",
           "dd_output_oracle", "dd_system_equation"]


@dataclass(frozen=True)
class DualChannelView:
    """Channel re-parameterization that moves the q_M*M delay component
    into a transmit-side Doppler phase ramp."""

    h0_dual: complex
    r_M: int
    q_M: int
    alpha0: float
    k0: int
    kappa0: float

    @classmethod
    def from_params(cls, params: ChannelParams) -> "DualChannelView":
        a0, alpha0, k0, kappa0 = params.decomposition
        if a0 < 0:
            raise ValueError(f"a0={a0} negative: delay outside dual range")
        q_M, r_M = divmod(a0, params.M)
        if q_M >= params.N - 1:
            raise ValueError(f"q_M={q_M} >= N-1: delay exceeds (N-1)*T")
        b = k0 + kappa0
        h0_dual = params.h0 * np.exp(-2j * np.pi * b * q_M / params.N)
        return cls(h0_dual=h0_dual, r_M=r_M, q_M=q_M, alpha0=alpha0,
                   k0=k0, kappa0=kappa0)


def spreading_tau(a: int, M: int, N: int) -> np.ndarray:
    """Delay spreading grid: (1/sqrt(N)) sum_m delta[l-a+M*m] e^{-j2pi mk/N},
    evaluated on l in [0, M), k in [0, N)."""
    grid = np.zeros((M, N), dtype=complex)
    for l in range(M):
        m = (a - l) // M if (a - l) % M == 0 else None
        if m is not None and 0 <= m < N:
            k = np.arange(N)
            grid[l, :] = np.exp(-2j * np.pi * m * k / N) / np.sqrt(N)
    return grid


def spreading_nu(b: float, M: int, N: int) -> np.ndarray:
    """Doppler spreading grid (Dirichlet kernel), l in [0, M), k in [0, N).

    Periodic in k with period N, so out-of-range Doppler arguments may be
    reduced modulo N.
    """
    l = np.arange(M)[:, None]
    k = np.arange(N)[None, :]
    x = b - k  # broadcasting over k
    ratio = _dirichlet_ratio(np.broadcast_to(x, (1, N)).astype(float), N)
    return (np.exp(2j * np.pi * b * l / (M * N))
            * np.exp(1j * np.pi * (N - 1) * x / N)
            * ratio / np.sqrt(N))


def _dirichlet_ratio(x: np.ndarray, N: int) -> np.ndarray:
    """sin(pi*x)/sin(pi*x/N) with the removable singularity at x = p*N
    evaluated by its limit N*(-1)^(p*(N-1))."""
    out = np.empty_like(x)
    near = np.abs(x / N - np.round(x / N)) < 1e-12
    reg = ~near
    out[reg] = np.sin(np.pi * x[reg]) / np.sin(np.pi * x[reg] / N)
    p = np.round(x[near] / N).astype(int)
    out[near] = N * (-1.0) ** (p * (N - 1))
    return out


def _spreading_nu_ratio_phase(b: float, N: int) -> np.ndarray:
    """Per-Doppler factor of the Doppler spreading grid (no delay phase)."""
    k = np.arange(N)
    x = (b - k).astype(float)
    return (np.exp(1j * np.pi * (N - 1) * x / N)
            * _dirichlet_ratio(x, N) / np.sqrt(N))


def _shift_grid(grid: np.ndarray, s: int) -> np.ndarray:
    """DD-domain circular time shift by s critical-rate samples:
    Z[(l-s)_M, m] with the Doppler phase exp(-j2pi m w/N) for each delay
    wrap w crossed at the M boundary."""
    M, N = grid.shape
    l = np.arange(M)
    q_star = (l - s) % M
    w = (s + q_star - l) // M
    m = np.arange(N)[None, :]
    return grid[q_star, :] * np.exp(-2j * np.pi * m * w[:, None] / N)


def dd_output_oracle(cfg: PreambleConfig, params: ChannelParams,
                     pulse: Pulse, L: int | None = None) -> np.ndarray:
    """Noiseless DD output via the dual system's per-tap double sum:
    delay spreading (gather over input delay bins q) followed by the
    Doppler spreading convolution over m, then the global phase from the
    embedded q_M*M delay."""
    if L is None:
        L = 2 * cfg.Q
    M, N = cfg.M, cfg.N
    dual = DualChannelView.from_params(params)
    b = dual.k0 + dual.kappa0
    zdx = dual_dd_frame(build_dd_frame(cfg), dual.q_M)
    beta = beta_taps(params, pulse, L, cfg.L_cp)
    znu = spreading_nu(b, M, N)
    znu_f = np.fft.fft(znu, axis=1)
    z_y = np.zeros((M, N), dtype=complex)
    for idx, i in enumerate(range(-L, L + 1)):
        s = i + dual.r_M
        shifted = _shift_grid(zdx, s)
        # twisted Doppler convolution: (1/sqrt(N)) sum_m Z1[l,m] Znu[l,(k-m)_N]
        conv = np.fft.ifft(np.fft.fft(shifted, axis=1) * znu_f, axis=1)
        z_y += (beta[idx] * np.exp(-2j * np.pi * b * s / (M * N))
                * conv / np.sqrt(N))
    return np.exp(-2j * np.pi * b * dual.q_M / N) * z_y


def dd_system_equation(cfg: PreambleConfig, params: ChannelParams,
                       pulse: Pulse, L: int | None = None) -> np.ndarray:
    """Noiseless DD output via the coherently collapsed per-tap closed
    form: the Doppler interference sums collapse (constructive
    accumulation), leaving one ZC term per channel tap.

    Each tap shift s = i + r_M contributes
    x_u[(l-s)_M] * exp(j*2*pi*b*(l-s)_M/(MN)) * exp(-j*2*pi*k*(q_M+w)/N)
    with w the delay-wrap count; for in-band taps (0 <= s < M) the k
    phases are exactly the length-2M extended-sequence periodization.
    """
    if L is None:
        L = 2 * cfg.Q
    M, N = cfg.M, cfg.N
    dual = DualChannelView.from_params(params)
    b = dual.k0 + dual.kappa0
    beta = beta_taps(params, pulse, L, cfg.L_cp)
    x_u = zc_sequence(cfg.root)
    l = np.arange(M)
    k = np.arange(N)[None, :]
    z_y = np.zeros((M, N), dtype=complex)
    for idx, i in enumerate(range(-L, L + 1)):
        s = i + dual.r_M
        lm = (l - s) % M
        w = (s + lm - l) // M
        m_star = (dual.q_M + w) % N
        t = (m_star - dual.q_M - w) // N  # whole-frame wrap count
        term = (x_u[lm] * np.exp(2j * np.pi * b * (lm / (M * N)
                                                   + t)))[:, None] \
            * np.exp(-2j * np.pi * k * m_star[:, None] / N)
        z_y += beta[idx] * term
    return z_y
