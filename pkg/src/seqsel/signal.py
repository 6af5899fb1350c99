"""Constellations, symbol sources, Nyquist-sinc shaping and WDM (de)multiplexing.

Array conventions used throughout the package:

* symbol blocks are complex arrays of shape (2, N): row 0 x polarization,
  row 1 y polarization;
* sampled fields are complex arrays of shape (2, n) at a common sample rate,
  amplitudes in sqrt(W).

Pulse shaping is an ideal rectangular spectral mask on the FFT grid
(periodic sinc), so the Nyquist property holds bit-exactly on the grid and
the simulated waveform is cyclic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .utils import dbm_to_w, is_power_of_two, signed_bins


@dataclass(frozen=True, eq=False)
class Constellation:
    """Discrete complex alphabet with point probabilities and bit labels.

    points are normalized to unit mean energy under `probabilities`.
    labels[i] is the integer whose binary digits are the bit label of
    points[i]; for square QAM the default labeling is per-axis
    binary-reflected Gray.
    """

    points: np.ndarray
    probabilities: np.ndarray
    labels: np.ndarray
    bits_per_symbol: int

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if abs(p.sum() - 1.0) > 1e-12:
            raise ConfigurationError("point probabilities must sum to 1")
        if np.any(p < 0):
            raise ConfigurationError("negative point probability")
        energy = float(np.sum(p * np.abs(self.points) ** 2))
        if abs(energy - 1.0) > 1e-9:
            raise ConfigurationError(
                f"constellation mean energy {energy!r} != 1 under its probabilities"
            )
        m = self.bits_per_symbol
        if sorted(self.labels.tolist()) != list(range(2**m)):
            raise ConfigurationError("labels must enumerate all m-bit words exactly once")

    @property
    def size(self) -> int:
        return len(self.points)

    def entropy(self) -> float:
        """Source entropy in bits per symbol (per polarization)."""
        p = self.probabilities[self.probabilities > 0]
        return float(-np.sum(p * np.log2(p)))

    def reweighted(self, probabilities) -> "Constellation":
        """Same geometry and labels, new probabilities, renormalized to unit energy."""
        p = np.asarray(probabilities, dtype=float)
        scale = 1.0 / np.sqrt(np.sum(p * np.abs(self.points) ** 2))
        return Constellation(self.points * scale, p, self.labels, self.bits_per_symbol)


def _gray(n: int) -> int:
    return n ^ (n >> 1)


def square_qam(order: int, probabilities=None) -> Constellation:
    """Square QAM on the odd-integer grid with per-axis Gray labeling.

    The high m/2 label bits Gray-encode the in-phase level index, the low
    bits the quadrature index, so adjacent points differ in one bit.
    """
    m = int(round(np.log2(order)))
    if 2**m != order or m % 2 or m < 2:
        raise ConfigurationError(f"square QAM order must be an even power of two, got {order}")
    side = 2 ** (m // 2)
    levels = 2 * np.arange(side) - (side - 1)
    ii, qq = np.meshgrid(levels, levels, indexing="ij")
    points = (ii + 1j * qq).ravel()
    gray = np.array([_gray(i) for i in range(side)])
    labels = ((gray[:, None] << (m // 2)) | gray[None, :]).ravel()
    if probabilities is None:
        probabilities = np.full(order, 1.0 / order)
    p = np.asarray(probabilities, dtype=float)
    scale = 1.0 / np.sqrt(np.sum(p * np.abs(points) ** 2))
    return Constellation(points * scale, p, labels, m)


@dataclass(eq=False)
class SymbolSequence:
    """Block of dual-polarization complex symbols, shape (2, N)."""

    symbols: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.symbols)
        if s.ndim != 2 or s.shape[0] != 2 or s.shape[1] < 1:
            raise ConfigurationError(f"symbol block must be (2, N), got {s.shape}")
        self.symbols = s.astype(np.complex128, copy=False)

    @property
    def n(self) -> int:
        return self.symbols.shape[1]

    def __len__(self) -> int:
        return self.n

    def __array__(self, dtype=None):
        return self.symbols if dtype is None else self.symbols.astype(dtype)


@dataclass(eq=False)
class SampledField:
    """Dual-polarization baseband waveform at a given sample rate.

    center_frequency_offset records the absolute center frequency (Hz,
    relative to the WDM grid center) of a field that has been shifted to
    baseband, so dispersion filters can evaluate the true frequencies.
    """

    samples: np.ndarray
    sample_rate: float
    center_frequency_offset: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2 or s.shape[0] != 2:
            raise ConfigurationError(f"field must be (2, n), got {s.shape}")
        if not is_power_of_two(s.shape[1]):
            raise ConfigurationError(f"sample count {s.shape[1]} is not a power of two")
        self.samples = s.astype(np.complex128, copy=False)

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    @property
    def average_power(self) -> float:
        """Mean total power over both polarizations, W."""
        return float(np.mean(np.abs(self.samples) ** 2) * 2)


@dataclass(frozen=True)
class WdmConfig:
    num_channels: int = 1
    symbol_rate: float = 50e9          # Bd
    channel_spacing: float = 50e9      # Hz
    samples_per_symbol: int = 16
    launch_power_dbm: float = 0.0      # per channel, both polarizations together

    def __post_init__(self):
        # simulation bandwidth must cover the WDM spectrum plus a guard band
        needed = self.num_channels * self.channel_spacing + 2 * self.symbol_rate
        if self.samples_per_symbol * self.symbol_rate < needed:
            raise ConfigurationError(
                f"{self.samples_per_symbol} samples/symbol gives "
                f"{self.samples_per_symbol * self.symbol_rate / 1e9:.0f} GHz, "
                f"need >= {needed / 1e9:.0f} GHz for {self.num_channels} channels"
            )

    @property
    def sample_rate(self) -> float:
        return self.samples_per_symbol * self.symbol_rate

    @property
    def center_channel(self) -> int:
        return self.num_channels // 2

    def channel_offset(self, index: int) -> float:
        """Center frequency of channel `index` relative to the grid center, Hz."""
        if not 0 <= index < self.num_channels:
            raise ConfigurationError(f"channel index {index} outside grid")
        return (index - (self.num_channels - 1) / 2) * self.channel_spacing


def gaussian_source(rng: np.random.Generator, n: int) -> SymbolSequence:
    """n i.i.d. circular Gaussian 2-pol symbols, unit mean energy per pol."""
    if n < 1:
        raise ConfigurationError("need at least one symbol")
    z = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
    return SymbolSequence(z / np.sqrt(2.0))


def _offset_bins(offset_hz: float, df: float, what: str) -> int:
    b = offset_hz / df
    bi = int(round(b))
    if abs(b - bi) > 1e-6:
        raise ConfigurationError(
            f"{what} of {offset_hz / 1e9:g} GHz does not fall on the "
            f"{df / 1e6:g} MHz FFT grid"
        )
    return bi


def modulate(seq_per_channel, cfg: WdmConfig) -> SampledField:
    """Sinc-shape each channel, shift to its grid slot, sum.

    Every channel carries the configured launch power (unit-energy symbols
    assumed, power split equally between polarizations). The field is built
    directly in the frequency domain: the N-point symbol spectrum of each
    channel is placed on the fine grid, which is both the zero-padding
    interpolation and the rectangular spectral mask at once.
    """
    syms = np.stack([np.asarray(s) for s in seq_per_channel])
    if syms.ndim != 3 or syms.shape[0] != cfg.num_channels:
        raise ConfigurationError(
            f"expected {cfg.num_channels} channel sequences, got shape {syms.shape}"
        )
    _, _, n_sym = syms.shape
    sps = cfg.samples_per_symbol
    n = n_sym * sps
    df = cfg.sample_rate / n                     # = symbol_rate / n_sym
    scale = sps * np.sqrt(dbm_to_w(cfg.launch_power_dbm) / 2.0)
    bins = signed_bins(n_sym)                    # half-open band [-Rs/2, Rs/2)
    spectrum = np.zeros((2, n), dtype=np.complex128)
    for c in range(cfg.num_channels):
        off = _offset_bins(cfg.channel_offset(c), df, f"channel {c} offset")
        x = np.fft.fft(syms[c], axis=-1)
        spectrum[:, (bins + off) % n] += scale * x[:, bins % n_sym]
    return SampledField(np.fft.ifft(spectrum, axis=-1), cfg.sample_rate)


def demultiplex(
    field: SampledField,
    cfg: WdmConfig,
    channel_index: int | None = None,
    out_sps: int = 4,
) -> SampledField:
    """Shift one channel to baseband, brick-wall to the symbol rate, decimate.

    The retained band is the channel's half-open Nyquist band; out_sps sets
    the output oversampling (must keep the rate at least 2x the symbol rate,
    decimation happens on the FFT grid so no aliasing is introduced).
    """
    if channel_index is None:
        channel_index = cfg.center_channel
    if out_sps < 2:
        raise ConfigurationError("output must stay oversampled (out_sps >= 2)")
    n = field.n
    df = field.sample_rate / n
    off = _offset_bins(cfg.channel_offset(channel_index), df, "channel offset")
    n_sym = _offset_bins(cfg.symbol_rate, df, "symbol rate")  # bins across Rs
    n_out = n_sym * out_sps
    spec = np.fft.fft(field.samples, axis=-1)
    spec = np.roll(spec, -off, axis=-1)
    keep = signed_bins(n_sym)
    out_spec = np.zeros((2, n_out), dtype=np.complex128)
    out_spec[:, keep % n_out] = spec[:, keep % n]
    out = np.fft.ifft(out_spec, axis=-1) * (n_out / n)
    return SampledField(out, out_sps * cfg.symbol_rate,
                        center_frequency_offset=cfg.channel_offset(channel_index))
