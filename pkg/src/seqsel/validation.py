"""Fast self-check battery behind the `validate` CLI subcommand.

Each check is small enough to run in seconds and pins a closed-form or
exhaustively enumerable result. The full physics and statistics suite
lives in the test tree; this battery is a field diagnostic for installs.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.constants as const

from .air import air_symbolwise, fit_aux_channel, selection_bound
from .dsp import ReceiverConfig, receive
from .fiber import FiberParams, LinkConfig, SsfmConfig, photon_energy, propagate_link
from .selection import threshold_for_rate
from .shaping import ess_build, ess_encode, mb_fit
from .signal import SymbolSequence, WdmConfig, gaussian_source, modulate, square_qam
from .utils import evm_db


def _chain_identity():
    """Modulator, demux and matched filter invert each other without fiber."""
    rng = np.random.default_rng(0)
    wdm = WdmConfig(num_channels=1, samples_per_symbol=4, launch_power_dbm=0.0)
    x = gaussian_source(rng, 512)
    field = modulate([x], wdm)
    link = LinkConfig(num_spans=0, noise_enabled=False)
    y = receive(field, wdm, link, ReceiverConfig("cdc", demux_sps=4)).symbols
    e = evm_db(y, x.symbols)
    return e < -200, f"back-to-back EVM {e:.0f} dB"


def _cw_phase():
    """Dispersionless CW picks up the 8/9-weighted dual-pol Kerr phase."""
    fiber = FiberParams(dispersion_D=0.0, alpha_dB=0.0, span_length=10.0)
    link = LinkConfig(fiber=fiber, num_spans=1, noise_enabled=False)
    p = 1.5e-3
    u = np.full((2, 64), math.sqrt(p / 2), complex)
    from .signal import SampledField
    f = SampledField(u, 1e9)
    out = propagate_link(f, link, SsfmConfig(step_size_km=1.0)).samples
    expect = -(8 / 9) * fiber.gamma * p * 10.0
    got = float(np.angle(out[0, 0] / u[0, 0]))
    return abs(got - expect) < 1e-9 * abs(expect), f"CW phase {got:.6e} vs {expect:.6e} rad"


def _linear_round_trip():
    rng = np.random.default_rng(1)
    fiber = FiberParams(gamma=0.0, span_length=80.0)
    link = LinkConfig(fiber=fiber, num_spans=2, noise_enabled=False)
    wdm = WdmConfig(num_channels=1, samples_per_symbol=4, launch_power_dbm=0.0)
    x = gaussian_source(rng, 1024)
    field = modulate([x], wdm)
    out = propagate_link(field, link, SsfmConfig(step_size_km=10.0))
    y = receive(out, wdm, link, ReceiverConfig("cdc", demux_sps=4)).symbols
    e = evm_db(y, x.symbols)
    return e < -80, f"linear CDC round trip EVM {e:.0f} dB"


def _ase_psd():
    from .fiber import amplify_edfa
    from .signal import SampledField
    rng = np.random.default_rng(2)
    fiber = FiberParams(alpha_dB=0.2, span_length=100.0)
    link = LinkConfig(fiber=fiber, num_spans=1, n_sp=1.0)
    fs = 200e9
    trials = 200
    f = SampledField(np.zeros((2, 1024), complex), fs)
    hv = photon_energy(fiber.reference_wavelength)
    acc = 0.0
    for _ in range(trials):
        out = amplify_edfa(f, link.span_gain, link.n_sp, rng, hv)
        acc += float(np.mean(np.abs(out.samples) ** 2))
    expect = (link.span_gain - 1.0) * hv * fs
    rel = acc / trials / expect - 1.0
    return abs(rel) < 0.05, f"ASE power off by {100 * rel:+.2f}%"


def _photon_energy():
    got = photon_energy(1550.0)
    expect = const.h * const.c / 1550e-9
    return got == expect, f"h*nu(1550 nm) = {got:.6e} J"


def _ess_tiny():
    code = ess_build((1, 3), 2, 10)
    w0, w1 = tuple(map(int, ess_encode(code, 0))), tuple(map(int, ess_encode(code, 1)))
    ok = code.k == 1 and code.num_codewords >= 2 and w0 == (1, 1) and w1 == (1, 3)
    return ok, f"2-letter code: k={code.k}, first words {w0}, {w1}"


def _mb_uniform():
    qam = square_qam(16)
    mb = mb_fit(qam, 4.0)
    return abs(mb.lam) < 1e-12 and abs(mb.entropy() - 4.0) < 1e-12, \
        f"lambda {mb.lam:.2e} at full entropy"


def _threshold_median():
    m = np.array([3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.0, 6.0])
    g = threshold_for_rate(m, 0.5)
    return g == float(np.median(m)), f"eta=0.5 threshold {g} vs median {np.median(m)}"


def _penalty():
    est = selection_bound(1.0, 2.0 ** (-2 * 256), 256)
    return est.selection_penalty == -1.0, f"penalty at eta=2^-512: {est.selection_penalty}"


def _awgn_air():
    rng = np.random.default_rng(3)
    n = 100_000
    snr = 10 ** 1.5
    x = (rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))) / np.sqrt(2)
    y = x + np.sqrt(0.5 / snr) * (rng.standard_normal((2, n))
                                  + 1j * rng.standard_normal((2, n)))
    air = air_symbolwise(x, y, fit_aux_channel(x, y))
    expect = math.log2(1 + snr)
    return abs(air - expect) < 0.03, f"AWGN 15 dB AIR {air:.4f} vs {expect:.4f}"


CHECKS = (
    ("chain identity", _chain_identity),
    ("CW nonlinear phase", _cw_phase),
    ("linear round trip", _linear_round_trip),
    ("ASE calibration", _ase_psd),
    ("photon energy", _photon_energy),
    ("sphere code oracle", _ess_tiny),
    ("MB uniform limit", _mb_uniform),
    ("threshold quantile", _threshold_median),
    ("selection penalty", _penalty),
    ("AWGN AIR", _awgn_air),
)


def run_validation(out=print) -> bool:
    """Run every check, print one line each, return overall pass."""
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:      # a crash is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    out(f"validation {'passed' if all_ok else 'FAILED'}")
    return all_ok
