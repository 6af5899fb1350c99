import numpy as np
import pytest

from conftest import awgn_pair
from seqsel.air import (
    air_bitwise,
    air_symbolwise,
    bitwise_stderr,
    fit_aux_channel,
    selection_bound,
    symbolwise_stderr,
)
from seqsel.errors import ConfigurationError, DegenerateChannelError
from seqsel.shaping import mb_fit, pas_source
from seqsel.signal import square_qam


class TestFit:
    def test_recovers_gain_and_variance(self, rng):
        h = 0.8 * np.exp(0.3j)
        x, y = awgn_pair(rng, 200_000, 10 ** 1.5, h=h)
        aux = fit_aux_channel(x, y)
        assert abs(aux.h - h) < 3e-3
        assert abs(aux.sigma2 - abs(h) ** 2 / 10 ** 1.5) / aux.sigma2 < 0.02

    def test_zero_input_degenerate(self):
        with pytest.raises(DegenerateChannelError):
            fit_aux_channel(np.zeros((2, 8), complex), np.ones((2, 8), complex))

    def test_noiseless_degenerate(self):
        x = (np.arange(8) + 1.0).reshape(2, 4).astype(complex)
        with pytest.raises(DegenerateChannelError):
            fit_aux_channel(x, 2 * x)

    def test_length_guard(self):
        with pytest.raises(ConfigurationError):
            fit_aux_channel(np.ones(4, complex), np.ones(5, complex))


class TestSymbolwise:
    @pytest.mark.parametrize("snr_db", [10.0, 15.0, 20.0])
    def test_matches_shannon_on_awgn(self, rng, snr_db):
        snr = 10 ** (snr_db / 10)
        x, y = awgn_pair(rng, 400_000, snr, h=1.2 * np.exp(-0.7j))
        air = air_symbolwise(x, y, fit_aux_channel(x, y))
        assert abs(air - np.log2(1 + snr)) < 0.015

    def test_error_shrinks_with_sample_size(self):
        # pooled over seeds the RMS error at n=1e6 sits far below n=1e4
        snr = 10 ** 1.5
        expect = np.log2(1 + snr)
        rms = {}
        for n in (10_000, 1_000_000):
            errs = []
            for seed in range(4):
                r = np.random.default_rng(100 + seed)
                x, y = awgn_pair(r, n, snr)
                errs.append(air_symbolwise(x, y, fit_aux_channel(x, y)) - expect)
            rms[n] = float(np.sqrt(np.mean(np.square(errs))))
        assert rms[1_000_000] < rms[10_000] / 3

    def test_degenerate_sigma_guard(self):
        from seqsel.air import AuxChannel
        with pytest.raises(DegenerateChannelError):
            air_symbolwise(np.ones((2, 4), complex), np.ones((2, 4), complex),
                           AuxChannel(1.0 + 0j, 0.0))


class TestBitwise:
    def test_saturates_at_entropy(self, rng):
        qam = square_qam(16)
        idx = rng.integers(0, 16, (2, 100_000))
        x, labels = qam.points[idx], qam.labels[idx]
        y = x + np.sqrt(0.5 / 10 ** 2.5) * (rng.standard_normal(x.shape)
                                            + 1j * rng.standard_normal(x.shape))
        air = air_bitwise(labels, y, fit_aux_channel(x, y), qam)
        assert 3.98 < air <= 4.0 + 1e-9

    def test_never_exceeds_entropy(self, rng):
        qam = square_qam(256)
        mb = mb_fit(qam, 6.4)
        seq = pas_source(mb, qam, 30_000, rng)
        y = seq.symbols + 0.1 * (rng.standard_normal(seq.symbols.shape)
                                 + 1j * rng.standard_normal(seq.symbols.shape))
        aux = fit_aux_channel(seq.symbols, y)
        air, terms = air_bitwise(seq.labels, y, aux, seq.constellation,
                                 return_terms=True)
        assert air <= seq.constellation.entropy() + 3 * terms.std() / np.sqrt(terms.size)
        assert 0 < air < 6.4

    def test_scale_mismatch_absorbed_by_gain(self, rng):
        # the estimator must not care about a common complex scale on y
        qam = square_qam(64)
        idx = rng.integers(0, 64, (2, 50_000))
        x, labels = qam.points[idx], qam.labels[idx]
        y = x + 0.05 * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
        y2 = 3.7 * np.exp(1.1j) * y
        a1 = air_bitwise(labels, y, fit_aux_channel(x, y), qam)
        a2 = air_bitwise(labels, y2, fit_aux_channel(x, y2), qam)
        assert abs(a1 - a2) < 1e-9

    def test_zero_probability_label_rejected(self, rng):
        qam = square_qam(16)
        p = qam.probabilities.copy()
        p[0], p[1] = 0.0, p[0] + p[1]
        shaped = qam.reweighted(p)
        dead_label = shaped.labels[0]
        labels = np.full((2, 16), dead_label)
        y = np.ones((2, 16), complex)
        from seqsel.air import AuxChannel
        with pytest.raises(ConfigurationError):
            air_bitwise(labels, y, AuxChannel(1 + 0j, 0.1), shaped)


class TestSelectionBound:
    def test_eta_one_no_penalty(self):
        est = selection_bound(5.0, 1.0, 256)
        assert est.selection_penalty == 0.0
        assert est.air_bound == 5.0

    def test_exact_one_bit(self):
        est = selection_bound(5.0, 2.0 ** (-2 * 256), 256)
        assert est.selection_penalty == -1.0
        assert est.air_bound == 4.0

    def test_monotone_in_eta(self):
        bounds = [selection_bound(5.0, eta, 64).air_bound
                  for eta in (0.01, 0.1, 0.5, 1.0)]
        assert bounds == sorted(bounds)

    def test_vacuous_as_eta_vanishes(self):
        # with air_unbiased bounded the bound drops below zero eventually
        assert selection_bound(5.0, 2.0 ** (-2 * 64 * 6), 64).air_bound < 0

    def test_domain_checks(self):
        with pytest.raises(ConfigurationError):
            selection_bound(5.0, 0.0, 64)
        with pytest.raises(ConfigurationError):
            selection_bound(5.0, 0.5, 0)


class TestBootstrap:
    def test_symbolwise_magnitude(self, rng):
        b, n = 128, 256
        x = (rng.standard_normal((b, 2, n)) + 1j * rng.standard_normal((b, 2, n))) / np.sqrt(2)
        y = x + 0.1 * (rng.standard_normal((b, 2, n)) + 1j * rng.standard_normal((b, 2, n)))
        se = symbolwise_stderr(x, y, np.random.default_rng(5), 200)
        assert 0 < se < 0.02

    def test_symbolwise_shrinks_with_blocks(self, rng):
        ses = {}
        for b in (32, 512):
            x = (rng.standard_normal((b, 2, 64))
                 + 1j * rng.standard_normal((b, 2, 64))) / np.sqrt(2)
            y = x + 0.2 * (rng.standard_normal((b, 2, 64))
                           + 1j * rng.standard_normal((b, 2, 64)))
            ses[b] = symbolwise_stderr(x, y, np.random.default_rng(6), 200)
        # 16x the blocks: roughly 4x smaller error bar
        assert ses[512] < ses[32] / 2

    def test_bitwise_positive_and_deterministic(self, rng):
        terms = rng.standard_normal(2 * 64 * 32) * 0.2 + 0.5
        a = bitwise_stderr(terms, 32, np.random.default_rng(7), 100)
        b = bitwise_stderr(terms, 32, np.random.default_rng(7), 100)
        assert a == b > 0
