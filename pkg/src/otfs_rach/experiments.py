"""Monte Carlo harness and metrics: PAPR CCDF, Welch PSD, MDP-vs-SNR
curves and empirical false-alarm calibration."""

import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy import signal as sp_signal

from .channel import ChannelParams, apply_discrete_channel
from .detector import (DetectionDecision, TrialOutcome, classify_trial,
                       decision_grid, detect, refine_fractional,
                       threshold_from_pfa)
from .sequences import ZcRoot, preamble_root_set
from .transmitter import PreambleConfig, critical_rate_burst, synthesize_waveform
from .zak import dzt

__all__ = ["MdpConfig", "Curve", "papr_ccdf", "psd", "mdp_curve",
           "false_alarm_rate", "cp_energy_overhead_db", "wilson_interval"]


def wilson_interval(successes: int, trials: int,
                    z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class Curve:
    """x/y series with per-point confidence bounds, trial counts and a
    config-snapshot metadata dict. Serializes to CSV + JSON sidecar."""

    x: np.ndarray
    y: np.ndarray
    ci_low: np.ndarray | None = None
    ci_high: np.ndarray | None = None
    n_trials: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if len(self.x) != len(self.y):
            raise ValueError("x and y lengths differ")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("x must be strictly increasing")
        n = len(self.x)
        if self.ci_low is None:
            self.ci_low = np.full(n, np.nan)
        if self.ci_high is None:
            self.ci_high = np.full(n, np.nan)
        if self.n_trials is None:
            self.n_trials = np.zeros(n, dtype=int)

    def write(self, csv_path: str | Path) -> None:
        csv_path = Path(csv_path)
        lines = ["x,y,ci_low,ci_high,n_trials"]
        for i in range(len(self.x)):
            lines.append(f"{float(self.x[i])!r},{float(self.y[i])!r},"
                         f"{float(self.ci_low[i])!r},"
                         f"{float(self.ci_high[i])!r},{int(self.n_trials[i])}")
        csv_path.write_text("\n".join(lines) + "\n")
        meta_path = csv_path.with_suffix(".meta.json")
        meta_path.write_text(json.dumps(self.metadata, indent=2,
                                        default=str) + "\n")


def cp_energy_overhead_db(N: int) -> float:
    """Energy penalty of an equal-peak CP-based burst with CP length
    (N-1)T relative to the zero-padded design: 10*log10(1 + (N-1)/N)."""
    return 10.0 * np.log10(1.0 + (N - 1) / N)


def _config_snapshot(cfg: PreambleConfig) -> dict:
    return {"M": cfg.M, "N": cfg.N, "delta_f": cfg.delta_f,
            "root_u": cfg.root.u, "Q": cfg.Q, "rolloff": cfg.rolloff,
            "L_cp": cfg.L_cp, "F": cfg.F}


def _burst_papr_db(cfg: PreambleConfig) -> float:
    pulse = cfg.make_pulse()
    s = synthesize_waveform(critical_rate_burst(cfg), pulse, cfg).samples
    # PAPR over the occupied part of the burst; the guard tail carries no
    # transmission and would otherwise dilute the mean
    active = (cfg.L_cp + cfg.M + 2 * cfg.Q) * cfg.F
    p = np.abs(s[:active]) ** 2
    return 10.0 * np.log10(np.max(p) / np.mean(p))


def papr_ccdf(cfg: PreambleConfig, papr_grid_db: np.ndarray) -> Curve:
    """CCDF of the burst PAPR over every ZC root index of length M."""
    if cfg.F < 4:
        raise ValueError("F >= 4 required for envelope fidelity")
    values = []
    for u in range(1, cfg.M):
        c = PreambleConfig(M=cfg.M, N=cfg.N, delta_f=cfg.delta_f,
                           root=ZcRoot(u=u, M=cfg.M), Q=cfg.Q,
                           rolloff=cfg.rolloff, L_cp=cfg.L_cp, F=cfg.F)
        values.append(_burst_papr_db(c))
    values = np.array(values)
    grid = np.asarray(papr_grid_db, dtype=float)
    ccdf = np.array([np.mean(values > g) for g in grid])
    meta = {"experiment": "papr", "config": _config_snapshot(cfg),
            "papr_min_db": float(values.min()),
            "papr_max_db": float(values.max()),
            "n_roots": len(values)}
    return Curve(x=grid, y=ccdf, n_trials=np.full(len(grid), len(values)),
                 metadata=meta)


def psd(cfg: PreambleConfig, span_hz: float,
        nperseg: int = 1024) -> Curve:
    """Welch PSD of the oversampled burst, averaged over all roots:
    Hann window, 50% overlap, peak-normalized to 0 dB."""
    fs = cfg.F * cfg.M * cfg.delta_f
    if span_hz > fs:
        raise ValueError(f"span {span_hz} Hz exceeds simulated rate {fs} Hz")
    acc = None
    freqs = None
    for u in range(1, cfg.M):
        c = PreambleConfig(M=cfg.M, N=cfg.N, delta_f=cfg.delta_f,
                           root=ZcRoot(u=u, M=cfg.M), Q=cfg.Q,
                           rolloff=cfg.rolloff, L_cp=cfg.L_cp, F=cfg.F)
        s = synthesize_waveform(critical_rate_burst(c), c.make_pulse(), c)
        f, pxx = sp_signal.welch(s.samples, fs=fs, window="hann",
                                 nperseg=nperseg, noverlap=nperseg // 2,
                                 return_onesided=False, detrend=False)
        acc = pxx if acc is None else acc + pxx
        freqs = f
    acc /= (cfg.M - 1)
    freqs = np.fft.fftshift(freqs)
    acc = np.fft.fftshift(acc)
    keep = np.abs(freqs) <= span_hz / 2
    freqs, acc = freqs[keep], acc[keep]
    peak = np.max(acc)
    y_db = 10.0 * np.log10(np.maximum(acc / peak, 1e-30))
    meta = {"experiment": "psd", "config": _config_snapshot(cfg),
            "welch": {"nperseg": nperseg, "window": "hann",
                      "overlap": 0.5},
            "peak_density_w_per_hz": float(peak),
            "span_hz": span_hz}
    return Curve(x=freqs, y=y_db, metadata=meta)


@dataclass(frozen=True)
class MdpConfig:
    """Missed-detection sweep settings."""

    snr_grid_db: tuple = tuple(range(-14, 4, 2))
    cfo_hz: float = 0.0
    to_max_s: float = 50e-6
    n_users: int = 1
    trials_per_point: int = 2000
    p_fa: float = 1e-3
    base_seed: int = 0
    n_candidates: int = 64

    def __post_init__(self):
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")


def _mdp_trial(args) -> int:
    """Run one trial; returns the number of missed users."""
    mdp, cfg, snr_idx, trial_idx, snr_db, roots, r_th = args
    rng = np.random.default_rng((mdp.base_seed, snr_idx, trial_idx))
    pulse = cfg.make_pulse()
    snr = 10.0 ** (snr_db / 10.0)
    M, N = cfg.M, cfg.N
    picks = rng.choice(len(roots), size=mdp.n_users, replace=False)
    truths = []
    y = np.zeros(M * N, dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for user in range(mdp.n_users):
            user_rng = np.random.default_rng(
                (mdp.base_seed, snr_idx, trial_idx, user))
            root = roots[picks[user]]
            tau0 = user_rng.uniform(0.0, mdp.to_max_s)
            phase = user_rng.uniform(0.0, 2 * np.pi)
            # noise is unit-variance per real dimension (power 2 per
            # complex sample), so |h0|^2 = 2*snr keeps SNR = |h0|^2/E|w|^2
            h0 = np.sqrt(2.0 * snr) * np.exp(1j * phase)
            c = PreambleConfig(M=M, N=N, delta_f=cfg.delta_f, root=root,
                               Q=cfg.Q, rolloff=cfg.rolloff, L_cp=cfg.L_cp,
                               F=cfg.F)
            params = ChannelParams.from_offsets(h0, tau0, mdp.cfo_hz, c)
            y += apply_discrete_channel(critical_rate_burst(c), params,
                                        pulse, L_cp=cfg.L_cp)
            truths.append((root, params))
    y += rng.standard_normal(M * N) + 1j * rng.standard_normal(M * N)
    z_y = dzt(y, M, N)
    grid = decision_grid(z_y, roots, cfg)
    misses = 0
    if mdp.n_users == 1:
        root, params = truths[0]
        dec = detect(grid, r_th)
        if dec.detected:
            dec = refine_fractional(grid, dec)
        misses += classify_trial(dec, params, root) is not TrialOutcome.CORRECT
    else:
        for root, params in truths:
            misses += not _user_detected(grid, r_th, root, params)
    return misses


def _user_detected(grid, r_th, root, params) -> bool:
    """Multi-user outcome: a user is detected if its own root's decision
    sub-grid peaks above threshold at the correct delay."""
    v = next(i for i, r in enumerate(grid.candidates) if r.u == root.u)
    sub = grid.rho[v, :, :grid.N - 1]
    peak = float(sub.max())
    if peak < r_th:
        return False
    mu, gamma = np.unravel_index(int(np.argmax(sub)), sub.shape)
    r_m = mu * grid.lag_step
    tau = (r_m + gamma * grid.M) / (grid.M * grid.delta_f)
    dec = DetectionDecision(detected=True, u_hat=root.u, r_m_hat=r_m,
                            q_m_hat=int(gamma), peak=peak, tau_hat=tau)
    dec = refine_fractional(grid, dec)
    return classify_trial(dec, params, root) is TrialOutcome.CORRECT


def mdp_curve(mdp: MdpConfig, cfg: PreambleConfig,
              workers: int = 1) -> Curve:
    """MDP versus SNR. Deterministic for a fixed base_seed regardless of
    worker count (per-trial counter-based RNG streams)."""
    roots = preamble_root_set(cfg.M, mdp.n_candidates)
    r_th = threshold_from_pfa(mdp.p_fa, cfg.M, cfg.N)
    snrs = np.asarray(mdp.snr_grid_db, dtype=float)
    y = np.empty(len(snrs))
    lo = np.empty(len(snrs))
    hi = np.empty(len(snrs))
    trials = np.full(len(snrs), mdp.trials_per_point, dtype=int)
    for si, snr_db in enumerate(snrs):
        jobs = [(mdp, cfg, si, ti, snr_db, roots, r_th)
                for ti in range(mdp.trials_per_point)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                miss_counts = list(pool.map(_mdp_trial, jobs,
                                            chunksize=64))
        else:
            miss_counts = [_mdp_trial(j) for j in jobs]
        total_misses = int(sum(miss_counts))
        denom = mdp.trials_per_point * mdp.n_users
        y[si] = total_misses / denom
        lo[si], hi[si] = wilson_interval(total_misses, denom)
    low_conf = [bool((hi[i] - lo[i]) / 2 > y[i] / 2) if y[i] > 0 else False
                for i in range(len(snrs))]
    meta = {"experiment": "mdp", "config": _config_snapshot(cfg),
            "mdp": asdict(mdp), "low_confidence_points": low_conf,
            "threshold": float(r_th)}
    return Curve(x=snrs, y=y, ci_low=lo, ci_high=hi, n_trials=trials,
                 metadata=meta)


def false_alarm_rate(cfg: PreambleConfig, p_fa_target: float, trials: int,
                     seed: int = 0, n_candidates: int = 64) -> dict:
    """Noise-only calibration of the closed-form threshold.

    The false-alarm event matches the closed form's scope: the maximum of
    the lag statistic for one candidate and one Doppler hypothesis
    exceeding the threshold. Each noise-only trial therefore yields one
    event per (candidate, Doppler hypothesis) pair. Returns the empirical
    rate at the closed-form threshold (with its Wilson interval) and an
    empirically calibrated threshold that achieves the target rate.
    """
    if trials < 10 / p_fa_target:
        raise ValueError(f"need at least {int(10 / p_fa_target)} trials "
                         f"for p_fa={p_fa_target}")
    roots = preamble_root_set(cfg.M, n_candidates)
    r_th = threshold_from_pfa(p_fa_target, cfg.M, cfg.N)
    maxima = np.empty((trials, n_candidates * (cfg.N - 1)))
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        z_w = (rng.standard_normal((cfg.M, cfg.N))
               + 1j * rng.standard_normal((cfg.M, cfg.N)))
        grid = decision_grid(z_w, roots, cfg)
        maxima[t] = grid.rho[:, :, :cfg.N - 1].max(axis=1).reshape(-1)
    maxima = maxima.reshape(-1)
    events = len(maxima)
    alarms = int(np.sum(maxima >= r_th))
    lo, hi = wilson_interval(alarms, events)
    # quantile of the noise-only max statistic hits the target by design
    calibrated = float(np.quantile(maxima, 1.0 - p_fa_target))
    cal_alarms = int(np.sum(maxima >= calibrated))
    cal_lo, cal_hi = wilson_interval(cal_alarms, events)
    return {"p_fa_target": p_fa_target,
            "closed_form_threshold": float(r_th),
            "empirical_rate": alarms / events,
            "wilson_low": lo, "wilson_high": hi,
            "calibrated_threshold": calibrated,
            "calibrated_rate": cal_alarms / events,
            "calibrated_wilson": (cal_lo, cal_hi),
            "trials": trials, "events": events}
