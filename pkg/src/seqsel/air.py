"""Achievable-information-rate estimation with a Gaussian decoding metric.

The receiver is modeled by the scalar auxiliary channel y = h x + n,
n circular Gaussian of variance sigma2, fitted to transmitted/received
symbol pairs. AIRs computed against this (generally mismatched) metric
are valid lower bounds for the true channel. Symbol-wise rates assume the
Gaussian codebook; bit-wise rates take a labeled discrete constellation
with point probabilities. The selection penalty of the biased source is
log2(eta) / (2N) bits per symbol per polarization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigurationError, DegenerateChannelError
from .signal import Constellation

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class AuxChannel:
    h: complex
    sigma2: float    # noise variance per complex dimension


@dataclass(frozen=True)
class AirEstimate:
    air_unbiased: float        # bits/symbol/pol before the selection penalty
    selection_penalty: float   # log2(eta)/(2N), <= 0
    air_bound: float           # their sum
    mc_stderr: float
    n_symbols_used: int


def fit_aux_channel(x, y) -> AuxChannel:
    """Least-squares scalar gain and residual variance, pooled over pols."""
    xa = np.asarray(x).ravel()
    ya = np.asarray(y).ravel()
    if xa.shape != ya.shape or len(xa) < 2:
        raise ConfigurationError("need two equal-length symbol vectors")
    sxx = np.sum(np.abs(xa) ** 2)
    if sxx == 0:
        raise DegenerateChannelError("reference symbols are all zero, gain undefined")
    h = np.sum(np.conj(xa) * ya) / sxx
    sigma2 = float(np.mean(np.abs(ya - h * xa) ** 2))
    if sigma2 == 0:
        raise DegenerateChannelError("zero residual variance, channel is noiseless")
    return AuxChannel(complex(h), sigma2)


def air_symbolwise(x, y, aux: AuxChannel) -> float:
    """log2(1 + SNR) under the auxiliary channel, averaged over pols.

    x must come from the circular Gaussian source for this to be an AIR.
    """
    if aux.sigma2 <= 0:
        raise DegenerateChannelError("auxiliary channel has no noise")
    xa = np.atleast_2d(np.asarray(x))
    g2 = np.abs(aux.h) ** 2
    snr = g2 * np.mean(np.abs(xa) ** 2, axis=1) / aux.sigma2
    return float(np.mean(np.log2(1.0 + snr)))


def _bit_terms(labels, y, aux, constellation, chunk=8192):
    """Per-symbol sum over bit positions of log2(num/denominator), natural units."""
    lab = np.asarray(labels).ravel()
    ya = np.asarray(y).ravel()
    if lab.shape != ya.shape:
        raise ConfigurationError("labels and received symbols differ in length")
    p = constellation.probabilities
    pts = constellation.points
    m = constellation.bits_per_symbol
    label_of_point = constellation.labels
    point_of_label = np.empty(constellation.size, dtype=np.int64)
    point_of_label[label_of_point] = np.arange(constellation.size)
    used = point_of_label[lab]
    if np.any(p[used] == 0):
        raise ConfigurationError("a transmitted label has probability zero")
    with np.errstate(divide="ignore"):
        logp = np.log(p)
    bit_of_point = (label_of_point[None, :] >> np.arange(m)[:, None]) & 1  # (m, M)
    terms = np.empty(len(ya))
    for lo in range(0, len(ya), chunk):
        yy = ya[lo:lo + chunk, None]
        lw = logp[None, :] - np.abs(yy - aux.h * pts[None, :]) ** 2 / aux.sigma2
        num = logsumexp(lw, axis=1)
        t = np.zeros(len(yy))
        for i in range(m):
            den0 = logsumexp(lw[:, bit_of_point[i] == 0], axis=1)
            den1 = logsumexp(lw[:, bit_of_point[i] == 1], axis=1)
            bx = (lab[lo:lo + chunk] >> i) & 1
            t += num - np.where(bx == 0, den0, den1)
        terms[lo:lo + chunk] = t / _LN2
    return terms


def air_bitwise(labels, y, aux: AuxChannel, constellation: Constellation,
                return_terms: bool = False):
    """Bit-wise decoding AIR of a shaped, labeled constellation.

    H(X) minus the mean per-symbol bit-metric information loss, the usual
    Monte-Carlo estimator; negative contributions at low SNR are kept
    unclamped. With return_terms the per-symbol losses come back too, in
    transmission order, for block-resampled error bars.
    """
    if aux.sigma2 <= 0:
        raise DegenerateChannelError("auxiliary channel has no noise")
    terms = _bit_terms(labels, y, aux, constellation)
    air = constellation.entropy() - float(np.mean(terms))
    return (air, terms) if return_terms else air


def selection_bound(air_unbiased: float, eta: float, n_block: int,
                    mc_stderr: float = 0.0, n_symbols: int = 0) -> AirEstimate:
    """Apply the biased-source rate-loss term to an unbiased AIR estimate."""
    if not 0 < eta <= 1:
        raise ConfigurationError("eta must be in (0, 1]")
    if n_block < 1:
        raise ConfigurationError("block length must be >= 1")
    penalty = np.log2(eta) / (2 * n_block)
    return AirEstimate(air_unbiased, float(penalty), float(air_unbiased + penalty),
                       mc_stderr, n_symbols)


def _block_stats(x_blocks, y_blocks):
    sxx = np.sum(np.abs(x_blocks) ** 2, axis=2)          # (B, 2)
    syy = np.sum(np.abs(y_blocks) ** 2, axis=2)
    sxy = np.sum(np.conj(x_blocks) * y_blocks, axis=2)
    return sxx, syy, sxy


def symbolwise_stderr(x_blocks, y_blocks, rng: np.random.Generator,
                      n_boot: int = 200) -> float:
    """Block-bootstrap standard error of the symbol-wise AIR.

    Resamples whole blocks (the correlation unit after selection) and
    refits the auxiliary channel on each resample.
    """
    x_blocks = np.asarray(x_blocks)
    y_blocks = np.asarray(y_blocks)
    b, _, n = x_blocks.shape
    sxx, syy, sxy = _block_stats(x_blocks, y_blocks)
    vals = np.empty(n_boot)
    for t in range(n_boot):
        idx = rng.integers(0, b, b)
        rxx = sxx[idx].sum(axis=0)                       # per pol
        ryy = syy[idx].sum(axis=0)
        rxy = sxy[idx].sum(axis=0)
        h = rxy.sum() / rxx.sum()
        resid = (ryy.sum() - 2 * np.real(np.conj(h) * rxy.sum())
                 + np.abs(h) ** 2 * rxx.sum())
        sigma2 = resid / (2 * b * n)
        snr = np.abs(h) ** 2 * (rxx / (b * n)) / sigma2
        vals[t] = np.mean(np.log2(1.0 + snr))
    return float(np.std(vals, ddof=1))


def bitwise_stderr(terms, block_length: int, rng: np.random.Generator,
                   n_boot: int = 200) -> float:
    """Block-bootstrap standard error of the bit-wise AIR at fixed (h, sigma2).

    terms are the per-symbol losses in transmission order (x pol first),
    grouped into selection blocks before resampling.
    """
    t = np.asarray(terms).reshape(2, -1, block_length)
    block_means = t.mean(axis=(0, 2))
    b = len(block_means)
    vals = np.empty(n_boot)
    for i in range(n_boot):
        vals[i] = block_means[rng.integers(0, b, b)].mean()
    return float(np.std(vals, ddof=1))
