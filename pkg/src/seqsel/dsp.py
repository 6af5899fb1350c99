"""Receiver-side processing: dispersion compensation, digital
backpropagation, matched filtering with symbol-rate sampling, and mean
phase rotation removal.

All operations honor SampledField.center_frequency_offset, so they stay
exact for channels demultiplexed away from the grid center.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .fiber import LinkConfig, SsfmConfig, _linear_factor, _propagate_segment
from .signal import SampledField, SymbolSequence, WdmConfig, demultiplex
from .utils import dbm_to_w, signed_bins


@dataclass(frozen=True)
class ReceiverConfig:
    equalization: str = "cdc"            # "cdc" | "dbp"
    dbp_steps_per_span: int | None = None  # None: match the forward step count
    channel_index: int | None = None       # None: center channel
    demux_sps: int = 4

    def __post_init__(self):
        if self.equalization not in ("cdc", "dbp"):
            raise ConfigurationError(f"unknown equalization {self.equalization!r}")
        if self.demux_sps < 2:
            raise ConfigurationError("demux_sps must keep the field oversampled")


def cdc(field: SampledField, link: LinkConfig) -> SampledField:
    """Exact inverse of the link's accumulated dispersion (all-pass)."""
    op = _linear_factor(field.n, field.sample_rate,
                        2 * np.pi * field.center_frequency_offset,
                        -link.fiber.beta2, 0.0, link.total_length_m, False)
    out = np.fft.ifft(np.fft.fft(field.samples, axis=-1) * op, axis=-1)
    return SampledField(out, field.sample_rate, field.center_frequency_offset)


def dbp(field: SampledField, link: LinkConfig, steps_per_span: int) -> SampledField:
    """Reverse split-step propagation of the demultiplexed channel.

    Spans are undone in reverse order with negated beta2, gamma and
    gain/loss profile; at a step count matching the forward simulation this
    inverts noiseless single-channel propagation to numerical accuracy.
    """
    if steps_per_span < 1:
        raise ConfigurationError("steps_per_span must be >= 1")
    fiber = link.fiber
    w0 = 2 * np.pi * field.center_frequency_offset
    alpha = -fiber.alpha_si if link.amplification == "edfa" else 0.0
    root_gain = np.sqrt(link.span_gain) if link.amplification == "edfa" else 1.0
    u = field.samples
    step0 = 0
    for _ in range(link.num_spans):
        u = _propagate_segment(u / root_gain, field.sample_rate, w0,
                               -fiber.beta2, -fiber.gamma_si, alpha,
                               fiber.span_length * 1e3, steps_per_span, step0)
        step0 += steps_per_span
    return SampledField(u, field.sample_rate, field.center_frequency_offset)


def matched_filter_sample(field: SampledField, cfg: WdmConfig) -> SymbolSequence:
    """Brick-wall filter of width symbol_rate, then sample at the symbol rate.

    Scaled so a back-to-back chain returns the transmitted symbols exactly
    (inverse of the launch-power scaling of modulate).
    """
    sps_f = field.sample_rate / cfg.symbol_rate
    sps = int(round(sps_f))
    if abs(sps_f - sps) > 1e-9 or sps < 1:
        raise ConfigurationError(
            f"sample rate {field.sample_rate:g} is not an integer multiple "
            f"of the symbol rate {cfg.symbol_rate:g}")
    n = field.n
    if n % sps:
        raise ConfigurationError("field does not hold a whole number of symbols")
    n_sym = n // sps
    bins = signed_bins(n_sym)
    spec = np.fft.fft(field.samples, axis=-1)
    kept = spec[:, bins % n]
    scale = (n_sym / n) / np.sqrt(dbm_to_w(cfg.launch_power_dbm) / 2.0)
    return SymbolSequence(np.fft.ifft(kept, axis=-1) * scale)


def phase_compensate_blocks(x_blocks: np.ndarray, y_blocks: np.ndarray) -> np.ndarray:
    """Per-block common phase removal, vectorized over (B, 2, N) stacks.

    Returns y rotated so each block's cross-correlation with x is real
    positive. Blocks with zero cross-correlation are returned unchanged.
    """
    if x_blocks.shape != y_blocks.shape:
        raise ConfigurationError("block stacks must have equal shapes")
    corr = np.sum(np.conj(x_blocks) * y_blocks, axis=(-2, -1))
    dead = corr == 0
    if np.any(dead):
        warnings.warn("zero cross-correlation, phase left untouched", stacklevel=2)
        corr = np.where(dead, 1.0, corr)
    rot = np.conj(corr) / np.abs(corr)
    return y_blocks * rot[..., None, None]


def mean_phase_compensate(x, y) -> SymbolSequence:
    """Remove the mean phase rotation of y relative to the reference x."""
    xa = np.asarray(x)
    ya = np.asarray(y)
    if xa.shape != ya.shape:
        raise ConfigurationError("sequence lengths differ")
    return SymbolSequence(phase_compensate_blocks(xa[None], ya[None])[0])


def receive(field: SampledField, wdm: WdmConfig, link: LinkConfig,
            rcfg: ReceiverConfig, forward_ssfm: SsfmConfig | None = None) -> SymbolSequence:
    """Demultiplex one channel, equalize, matched-filter and sample."""
    base = demultiplex(field, wdm, rcfg.channel_index, rcfg.demux_sps)
    if rcfg.equalization == "dbp":
        steps = rcfg.dbp_steps_per_span
        if steps is None:
            if forward_ssfm is None:
                raise ConfigurationError("dbp step count unknown: pass it or the forward config")
            steps = forward_ssfm.steps_for(link.fiber, float(
                np.max(np.abs(base.samples[0]) ** 2 + np.abs(base.samples[1]) ** 2,
                       initial=0.0)))
        eq = dbp(base, link, steps)
    else:
        eq = cdc(base, link)
    return matched_filter_sample(eq, wdm)
