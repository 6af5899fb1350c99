import math

import numpy as np
import pytest
import scipy.constants as const
from hypothesis import given, settings
from hypothesis import strategies as st

from seqsel.errors import ConfigurationError, NumericalOverflowError
from seqsel.fiber import (
    FiberParams,
    LinkConfig,
    SsfmConfig,
    add_idra_noise,
    amplify_edfa,
    photon_energy,
    propagate_link,
    propagate_span,
)
from seqsel.signal import SampledField, WdmConfig, gaussian_source, modulate


def field_of(samples, fs=200e9):
    return SampledField(np.asarray(samples, complex), fs)


def test_photon_energy_is_hc_over_lambda():
    assert photon_energy(1550.0) == const.h * const.c / 1550e-9
    assert photon_energy(1310.0) == const.h * const.c / (1310 * 1e-9)


class TestFiberParams:
    def test_beta2_from_dispersion(self):
        f = FiberParams()
        # D=17 ps/nm/km at 1550 nm -> about -21.7 ps^2/km
        assert abs(f.beta2 * 1e27 - (-21.7)) < 0.1
        expect = -17e-6 * (1550e-9) ** 2 / (2 * math.pi * const.c)
        assert abs(f.beta2 / expect - 1.0) < 1e-12

    def test_alpha_linear(self):
        f = FiberParams(alpha_dB=0.2)
        assert abs(f.alpha_linear - 0.2 * math.log(10) / 10) < 1e-15

    def test_span_gain_compensates_loss_exactly(self):
        lk = LinkConfig(fiber=FiberParams(alpha_dB=0.2, span_length=100.0))
        assert abs(lk.span_gain - 100.0) < 1e-10 * 100.0  # 20 dB


class TestSsfmConfig:
    def test_exactly_one_stepping_rule(self):
        with pytest.raises(ConfigurationError):
            SsfmConfig(step_size_km=None, max_phase_rad=None)
        with pytest.raises(ConfigurationError):
            SsfmConfig(step_size_km=0.1, max_phase_rad=0.01)

    def test_fixed_step_must_divide_span(self):
        cfg = SsfmConfig(step_size_km=0.3)
        with pytest.raises(ConfigurationError):
            cfg.steps_for(FiberParams(span_length=100.0))
        assert SsfmConfig(step_size_km=0.25).steps_for(FiberParams(span_length=100.0)) == 400

    def test_adaptive_step_count(self):
        cfg = SsfmConfig(step_size_km=None, max_phase_rad=1e-3)
        fiber = FiberParams()
        peak = 5e-3
        l_eff = (1 - math.exp(-fiber.alpha_linear * fiber.span_length)) / fiber.alpha_linear
        expect = math.ceil((8 / 9) * fiber.gamma * peak * l_eff / 1e-3)
        assert cfg.steps_for(fiber, peak) == expect


class TestPropagation:
    def test_cw_kerr_phase(self):
        # beta2 = 0, alpha = 0: exact solution is a pure phase rotation
        fiber = FiberParams(dispersion_D=0.0, alpha_dB=0.0, span_length=25.0)
        link = LinkConfig(fiber=fiber, num_spans=1, noise_enabled=False)
        p_tot = 2.4e-3
        u = np.full((2, 32), math.sqrt(p_tot / 2), complex)
        out = propagate_link(field_of(u), link, SsfmConfig(step_size_km=5.0)).samples
        expect = -(8 / 9) * fiber.gamma * p_tot * fiber.span_length
        got = float(np.angle(out[0, 0] / u[0, 0]))
        assert abs(got - expect) <= 1e-9 * abs(expect)

    def test_attenuation_only(self):
        fiber = FiberParams(dispersion_D=0.0, gamma=0.0, alpha_dB=0.2, span_length=50.0)
        u = np.ones((2, 16), complex) * 1e-2
        out = propagate_span(field_of(u), fiber, SsfmConfig(step_size_km=10.0)).samples
        decay = math.exp(-fiber.alpha_linear * 50.0)
        np.testing.assert_allclose(np.abs(out) ** 2, 1e-4 * decay, rtol=1e-12)

    def test_dispersion_preserves_spectrum_magnitude(self):
        rng = np.random.default_rng(8)
        fiber = FiberParams(gamma=0.0, alpha_dB=0.0, span_length=80.0)
        u = rng.standard_normal((2, 256)) + 1j * rng.standard_normal((2, 256))
        out = propagate_span(field_of(u), fiber, SsfmConfig(step_size_km=80.0)).samples
        np.testing.assert_allclose(np.abs(np.fft.fft(out, axis=1)),
                                   np.abs(np.fft.fft(u, axis=1)), rtol=1e-10)

    def test_single_tone_quadratic_phase(self):
        # one FFT bin picks up exp(+j beta2/2 w^2 L)
        fiber = FiberParams(gamma=0.0, alpha_dB=0.0, span_length=10.0)
        n, fs = 64, 100e9
        k = 5
        t = np.arange(n) / fs
        tone = np.exp(2j * math.pi * (k * fs / n) * t)
        u = np.stack([tone, np.zeros(n, complex)])
        out = propagate_span(SampledField(u, fs), fiber, SsfmConfig(step_size_km=10.0)).samples
        w = 2 * math.pi * k * fs / n
        expect = 0.5 * fiber.beta2 * w**2 * 10e3
        got = float(np.angle(out[0, 0] / u[0, 0]))
        assert abs((got - expect + math.pi) % (2 * math.pi) - math.pi) < 1e-9

    @settings(max_examples=20, deadline=None)
    @given(gamma=st.floats(0.0, 5.0), seed=st.integers(0, 2**16))
    def test_lossless_propagation_preserves_energy(self, gamma, seed):
        # dispersion is unitary and the Kerr operator is a pure phase
        rng = np.random.default_rng(seed)
        fiber = FiberParams(gamma=gamma, alpha_dB=0.0, span_length=4.0)
        u = (rng.standard_normal((2, 64)) + 1j * rng.standard_normal((2, 64))) * 1e-2
        out = propagate_span(field_of(u), fiber, SsfmConfig(step_size_km=1.0)).samples
        assert abs(np.sum(np.abs(out) ** 2) / np.sum(np.abs(u) ** 2) - 1.0) < 1e-12

    def test_overflow_reports_step(self):
        # squared power of 1e200 overflows to inf and then to nan in the phase
        fiber = FiberParams(gamma=1.3, alpha_dB=0.0, span_length=10.0)
        u = np.full((2, 16), 1e200, complex)
        with np.errstate(over="ignore"), pytest.raises(NumericalOverflowError):
            propagate_span(field_of(u), fiber, SsfmConfig(step_size_km=1.0))

    def test_noise_requires_rng(self):
        link = LinkConfig(num_spans=1, noise_enabled=True)
        u = np.ones((2, 16), complex)
        with pytest.raises(ConfigurationError):
            propagate_link(field_of(u), link, SsfmConfig(step_size_km=10.0))


class TestAmplifiers:
    def test_edfa_gain_below_one_rejected(self):
        with pytest.raises(ConfigurationError):
            amplify_edfa(field_of(np.ones((2, 8))), 0.5, 1.0, np.random.default_rng(0))

    def test_edfa_noiseless_at_nsp_zero(self):
        f = field_of(np.ones((2, 8)))
        out = amplify_edfa(f, 4.0, 0.0, None)
        np.testing.assert_allclose(out.samples, 2.0 * f.samples)

    def test_edfa_ase_psd(self):
        rng = np.random.default_rng(9)
        fs = 200e9
        g = 100.0
        hv = photon_energy()
        f = SampledField(np.zeros((2, 2048), complex), fs)
        acc = 0.0
        trials = 500
        for _ in range(trials):
            acc += float(np.mean(np.abs(amplify_edfa(f, g, 1.0, rng, hv).samples) ** 2))
        expect = (g - 1) * hv * fs  # per polarization
        assert abs(acc / trials / expect - 1.0) < 0.02

    def test_idra_noise_psd_and_flat_propagation(self):
        fiber = FiberParams(gamma=0.0)
        rng = np.random.default_rng(10)
        fs = 200e9
        f = SampledField(np.zeros((2, 2048), complex), fs)
        acc = 0.0
        trials = 500
        for _ in range(trials):
            got = add_idra_noise(f, fiber, fiber.span_length, 1.0, rng)
            acc += float(np.mean(np.abs(got.samples) ** 2))
        hv = photon_energy()
        expect = fiber.alpha_linear * fiber.span_length * hv * fs
        assert abs(acc / trials / expect - 1.0) < 0.02
        # despite alpha_dB > 0 the idra span is effectively lossless
        u = np.ones((2, 16), complex)
        out = propagate_span(field_of(u), fiber, SsfmConfig(step_size_km=10.0),
                             amplification="idra").samples
        np.testing.assert_allclose(np.abs(out), np.abs(u), rtol=1e-12)

    def test_idra_noise_grows_with_spans(self):
        wdm = WdmConfig(num_channels=1, samples_per_symbol=4, launch_power_dbm=-10.0)
        x = gaussian_source(np.random.default_rng(11), 256)
        f = modulate([x], wdm)
        # no dispersion or Kerr: the residual against the input is pure ASE
        fiber = FiberParams(gamma=0.0, dispersion_D=0.0)
        out = {}
        for spans in (2, 4):
            link = LinkConfig(fiber=fiber, num_spans=spans, amplification="idra")
            got = propagate_link(f, link, SsfmConfig(step_size_km=10.0),
                                 np.random.default_rng(12))
            out[spans] = float(np.mean(np.abs(got.samples - f.samples) ** 2))
        # distortion badly dominated by accumulated ASE here; roughly doubles
        assert 1.5 < out[4] / out[2] < 2.5


class TestLinkConfig:
    def test_amplification_validated(self):
        with pytest.raises(ConfigurationError):
            LinkConfig(amplification="raman")

    def test_total_length(self):
        lk = LinkConfig(fiber=FiberParams(span_length=80.0), num_spans=4)
        assert lk.total_length_m == 320e3
