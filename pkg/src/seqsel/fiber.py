"""Split-step integration of dual-polarization fiber propagation.

The propagation model is the Manakov equation (8/9-averaged Kerr
coefficient), solved with the symmetrized split-step scheme: half linear
step, nonlinear phase rotation at the step midpoint, half linear step.
Attenuation lives inside the linear steps; the nonlinear phase uses the
effective length referenced to the midpoint power, which keeps the scheme
second order in the step size also for lossy fiber.

Internally everything is SI (meters, s^2/m, 1/(W m)); the parameter
dataclasses carry the usual engineering units and convert once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import h as H_PLANCK

from .errors import ConfigurationError, NumericalOverflowError
from .signal import SampledField


def photon_energy(wavelength_nm: float = 1550.0) -> float:
    """h * nu in joules at the given vacuum wavelength."""
    return H_PLANCK * C_LIGHT / (wavelength_nm * 1e-9)


@dataclass(frozen=True)
class FiberParams:
    dispersion_D: float = 17.0           # ps/(nm km)
    gamma: float = 1.3                   # 1/(W km)
    alpha_dB: float = 0.2                # dB/km
    span_length: float = 100.0           # km
    reference_wavelength: float = 1550.0  # nm

    @property
    def beta2(self) -> float:
        """Group-velocity dispersion, s^2/m (negative for anomalous D>0)."""
        lam = self.reference_wavelength * 1e-9
        return -(self.dispersion_D * 1e-6) * lam**2 / (2 * np.pi * C_LIGHT)

    @property
    def alpha_linear(self) -> float:
        """Power attenuation, 1/km."""
        return self.alpha_dB * np.log(10.0) / 10.0

    @property
    def gamma_si(self) -> float:
        return self.gamma * 1e-3         # 1/(W m)

    @property
    def alpha_si(self) -> float:
        return self.alpha_linear * 1e-3  # 1/m


@dataclass(frozen=True)
class LinkConfig:
    fiber: FiberParams = FiberParams()
    num_spans: int = 10
    amplification: str = "edfa"          # "edfa" | "idra"
    n_sp: float = 1.0
    noise_enabled: bool = True

    def __post_init__(self):
        if self.amplification not in ("edfa", "idra"):
            raise ConfigurationError(f"unknown amplification {self.amplification!r}")
        if self.num_spans < 0 or self.n_sp < 0:
            raise ConfigurationError("num_spans and n_sp must be non-negative")

    @property
    def span_gain(self) -> float:
        """EDFA gain exactly compensating the span loss."""
        return float(np.exp(self.fiber.alpha_linear * self.fiber.span_length))

    @property
    def total_length_m(self) -> float:
        return self.num_spans * self.fiber.span_length * 1e3


@dataclass(frozen=True)
class SsfmConfig:
    """Fixed step size in km, or adaptive via a nonlinear phase budget."""

    step_size_km: float | None = 0.1
    max_phase_rad: float | None = None

    def __post_init__(self):
        if (self.step_size_km is None) == (self.max_phase_rad is None):
            raise ConfigurationError("set exactly one of step_size_km, max_phase_rad")
        if self.step_size_km is not None and self.step_size_km <= 0:
            raise ConfigurationError("step size must be positive")
        if self.max_phase_rad is not None and self.max_phase_rad <= 0:
            raise ConfigurationError("phase budget must be positive")

    def steps_for(self, fiber: FiberParams, peak_power_w: float = 0.0) -> int:
        span_m = fiber.span_length * 1e3
        if self.step_size_km is not None:
            steps = round(fiber.span_length / self.step_size_km)
            if abs(steps * self.step_size_km - fiber.span_length) > 1e-9 * fiber.span_length:
                raise ConfigurationError(
                    f"span of {fiber.span_length} km is not a whole number of "
                    f"{self.step_size_km} km steps"
                )
            return max(1, steps)
        a = fiber.alpha_si
        l_eff = span_m if a == 0 else (1.0 - np.exp(-a * span_m)) / a
        phi = (8.0 / 9.0) * fiber.gamma_si * peak_power_w * l_eff
        return max(1, int(np.ceil(phi / self.max_phase_rad)))


@lru_cache(maxsize=8)
def _linear_factor(n: int, sample_rate: float, w0: float, beta2: float,
                   alpha_per_m: float, dz_m: float, half: bool) -> np.ndarray:
    w = 2 * np.pi * np.fft.fftfreq(n, 1.0 / sample_rate) + w0
    seg = dz_m / 2 if half else dz_m
    out = np.exp((0.5j * beta2 * seg) * w**2 - 0.5 * alpha_per_m * seg)
    out.setflags(write=False)
    return out


def _propagate_segment(u: np.ndarray, sample_rate: float, w0: float,
                       beta2: float, gamma_per_m: float, alpha_per_m: float,
                       length_m: float, n_steps: int, first_step: int = 0) -> np.ndarray:
    """Symmetrized split-step solution over one uniform-step segment.

    Signs of beta2/gamma/alpha may all be flipped, which solves the
    backward equation (used for digital backpropagation).
    """
    n = u.shape[-1]
    if gamma_per_m == 0.0:
        # pure linear segment, one exact step
        op = _linear_factor(n, sample_rate, w0, beta2, alpha_per_m, length_m, False)
        return np.fft.ifft(np.fft.fft(u, axis=-1) * op, axis=-1)
    dz = length_m / n_steps
    if alpha_per_m == 0.0:
        dz_eff = dz
    else:
        dz_eff = 2.0 * np.sinh(0.5 * alpha_per_m * dz) / alpha_per_m
    k_nl = (8.0 / 9.0) * gamma_per_m * dz_eff
    half = _linear_factor(n, sample_rate, w0, beta2, alpha_per_m, dz, True)
    full = _linear_factor(n, sample_rate, w0, beta2, alpha_per_m, dz, False)
    u = np.fft.ifft(np.fft.fft(u, axis=-1) * half, axis=-1)
    for step in range(n_steps):
        p = u.real**2 + u.imag**2
        p = p[0] + p[1]
        if not np.all(np.isfinite(p)):
            raise NumericalOverflowError(first_step + step)
        u = u * np.exp(-1j * k_nl * p)[None, :]
        op = full if step < n_steps - 1 else half
        u = np.fft.ifft(np.fft.fft(u, axis=-1) * op, axis=-1)
    return u


def propagate_span(field: SampledField, fiber: FiberParams, ssfm: SsfmConfig,
                   amplification: str = "edfa", first_step: int = 0) -> SampledField:
    """One span of fiber, no amplifier. IDRA mode propagates lossless."""
    alpha = fiber.alpha_si if amplification == "edfa" else 0.0
    peak = float(np.max(np.abs(field.samples[0]) ** 2 + np.abs(field.samples[1]) ** 2,
                        initial=0.0))
    n_steps = ssfm.steps_for(fiber, peak)
    out = _propagate_segment(field.samples, field.sample_rate,
                             2 * np.pi * field.center_frequency_offset,
                             fiber.beta2, fiber.gamma_si, alpha,
                             fiber.span_length * 1e3, n_steps, first_step)
    return SampledField(out, field.sample_rate, field.center_frequency_offset)


def amplify_edfa(field: SampledField, gain_linear: float, n_sp: float,
                 rng: np.random.Generator | None,
                 photon_energy_j: float = photon_energy()) -> SampledField:
    """Flat gain plus ASE of PSD n_sp (G-1) h nu per polarization."""
    if gain_linear < 1:
        raise ConfigurationError("EDFA gain must be >= 1")
    out = field.samples * np.sqrt(gain_linear)
    noise_power = n_sp * (gain_linear - 1.0) * photon_energy_j * field.sample_rate
    if noise_power > 0:
        if rng is None:
            raise ConfigurationError("rng required when ASE is generated")
        shape = field.samples.shape
        out = out + np.sqrt(noise_power / 2) * (
            rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return SampledField(out, field.sample_rate, field.center_frequency_offset)


def add_idra_noise(field: SampledField, fiber: FiberParams, span_length_km: float,
                   n_sp: float, rng: np.random.Generator | None,
                   photon_energy_j: float = photon_energy()) -> SampledField:
    """Lumped equivalent of ideal distributed-Raman ASE over one span.

    PSD per polarization is n_sp * alpha * L * h nu; the signal itself is
    propagated without loss in IDRA mode, so no gain is applied here.
    """
    noise_power = (n_sp * fiber.alpha_linear * span_length_km
                   * photon_energy_j * field.sample_rate)
    if noise_power <= 0:
        return field
    if rng is None:
        raise ConfigurationError("rng required when ASE is generated")
    shape = field.samples.shape
    out = field.samples + np.sqrt(noise_power / 2) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return SampledField(out, field.sample_rate, field.center_frequency_offset)


def propagate_link(field: SampledField, link: LinkConfig, ssfm: SsfmConfig,
                   rng: np.random.Generator | None = None) -> SampledField:
    """num_spans repetitions of span propagation plus amplification/noise."""
    hv = photon_energy(link.fiber.reference_wavelength)
    out = field
    step0 = 0
    for _ in range(link.num_spans):
        before = out
        out = propagate_span(before, link.fiber, ssfm, link.amplification, step0)
        step0 += ssfm.steps_for(link.fiber,
                                float(np.max(np.abs(before.samples[0]) ** 2
                                             + np.abs(before.samples[1]) ** 2,
                                             initial=0.0)))
        if link.amplification == "edfa":
            n_sp = link.n_sp if link.noise_enabled else 0.0
            out = amplify_edfa(out, link.span_gain, n_sp, rng, hv)
        elif link.noise_enabled:
            out = add_idra_noise(out, link.fiber, link.fiber.span_length,
                                 link.n_sp, rng, hv)
    return out
