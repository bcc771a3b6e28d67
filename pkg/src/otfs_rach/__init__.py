"""OTFS-based random access preamble simulator: Zadoff-Chu preambles on
the delay-Doppler grid, LEO link impairments, joint delay detection and
Monte Carlo evaluation."""

from .channel import (ChannelParams, GeometryConfig, apply_discrete_channel,
                      apply_waveform_channel, beta_taps, decompose_offsets,
                      link_budget_snr, matched_filter_and_sample,
                      uncertainty_offsets)
from .detector import (DecisionGrid, DetectionDecision, TrialOutcome,
                       classify_trial, decision_grid, detect,
                       refine_fractional, threshold_from_pfa)
from .experiments import (Curve, MdpConfig, cp_energy_overhead_db,
                          false_alarm_rate, mdp_curve, papr_ccdf, psd)
from .numerics import Pulse, dft, idft, pulse_autocorr, srrc_pulse
from .sequences import (ZcRoot, extended_sequence, preamble_root_set,
                        zc_sequence)
from .transmitter import (PreambleConfig, TimeSignal, add_cp, build_dd_frame,
                          critical_rate_burst, dual_dd_frame,
                          synthesize_waveform)
from .zak import dzt, idzt

__version__ = "0.1.0"
