"""Experiment orchestration: reproducible screening runs, power and
acceptance-rate sweeps, CSV output.

Every stochastic ingredient draws from a generator derived as
(master_seed, domain, indices...), so results are independent of
execution order and sweep composition. Noise streams are derived from
the power index and realization index only, never from the acceptance
rate: working points at the same power share noise, which pairs the
comparison across acceptance rates and makes the no-selection row of a
sweep bit-identical to a run with the selection stage bypassed.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .air import (
    AirEstimate,
    air_bitwise,
    air_symbolwise,
    bitwise_stderr,
    fit_aux_channel,
    selection_bound,
    symbolwise_stderr,
)
from .dsp import ReceiverConfig, phase_compensate_blocks, receive
from .errors import ConfigurationError, EmptySelectionError
from .fiber import FiberParams, LinkConfig, SsfmConfig, propagate_link
from .selection import SelectionConfig, SelectionResult, screen
from .shaping import ess_code_for_rate, mb_fit, pas_source
from .signal import SymbolSequence, WdmConfig, gaussian_source, modulate, square_qam

CSV_COLUMNS = ("power_dBm", "eta", "equalization", "air_unbiased", "penalty",
               "air_bound", "mc_stderr", "n_symbols", "seed")

# seed-derivation domains
_SCREEN, _NOISE, _BOOT = 101, 202, 404


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((master_seed, *key)))


@dataclass(frozen=True)
class ExperimentConfig:
    link: LinkConfig = LinkConfig()
    wdm: WdmConfig = WdmConfig()
    ssfm: SsfmConfig = SsfmConfig()
    equalizations: tuple = ("cdc",)
    dbp_steps_per_span: int | None = None    # None: match the forward stepping
    demux_sps: int = 4
    source_kind: str = "gaussian"            # gaussian | pas-mb | pas-ess
    qam_order: int = 256
    rate_bits: float = 6.4                   # PAS rate, bits/symbol/pol
    ess_block_length: int = 256
    num_test_sequences: int = 2**16
    block_length: int = 256
    eta_list: tuple = (1.0,)
    screening_power_dbm: float | None = None  # None: optimal unselected power
    screening_sps: int = 4
    screening_step_km: float | None = None    # None: same as ssfm
    power_sweep_dbm: tuple = (0.0,)
    master_seed: int = 1
    eval_blocks: int = 128
    noise_realizations: int = 4
    n_bootstrap: int = 200
    output_csv: str = "sweep.csv"
    screening_file: str = "screening.npz"

    def __post_init__(self):
        for eq in self.equalizations:
            if eq not in ("cdc", "dbp"):
                raise ConfigurationError(f"unknown equalization {eq!r}")
        if self.source_kind not in ("gaussian", "pas-mb", "pas-ess"):
            raise ConfigurationError(f"unknown source {self.source_kind!r}")
        for eta in self.eta_list:
            if not 0 < eta <= 1:
                raise ConfigurationError("acceptance rates must be in (0, 1]")

    def echo_lines(self) -> list:
        """Flat key = value lines for the CSV header, full provenance."""
        f, lk, w = self.link.fiber, self.link, self.wdm
        items = [
            ("version", __version__),
            ("fiber.dispersion_D_ps_nm_km", f.dispersion_D),
            ("fiber.gamma_per_W_km", f.gamma),
            ("fiber.alpha_dB_km", f.alpha_dB),
            ("fiber.span_length_km", f.span_length),
            ("fiber.reference_wavelength_nm", f.reference_wavelength),
            ("link.num_spans", lk.num_spans),
            ("link.amplification", lk.amplification),
            ("link.n_sp", lk.n_sp),
            ("link.noise_enabled", lk.noise_enabled),
            ("wdm.num_channels", w.num_channels),
            ("wdm.symbol_rate_GBd", w.symbol_rate / 1e9),
            ("wdm.channel_spacing_GHz", w.channel_spacing / 1e9),
            ("wdm.samples_per_symbol", w.samples_per_symbol),
            ("ssfm.step_size_km", self.ssfm.step_size_km),
            ("ssfm.max_phase_rad", self.ssfm.max_phase_rad),
            ("receiver.equalizations", ",".join(self.equalizations)),
            ("receiver.dbp_steps_per_span", self.dbp_steps_per_span),
            ("receiver.demux_sps", self.demux_sps),
            ("source.kind", self.source_kind),
            ("source.qam_order", self.qam_order),
            ("source.rate_bits", self.rate_bits),
            ("source.ess_block_length", self.ess_block_length),
            ("selection.num_test_sequences", self.num_test_sequences),
            ("selection.block_length", self.block_length),
            ("selection.eta_list", ",".join(f"{e:g}" for e in self.eta_list)),
            ("selection.screening_power_dbm", self.screening_power_dbm),
            ("selection.screening_sps", self.screening_sps),
            ("selection.screening_step_km", self.screening_step_km),
            ("run.power_sweep_dbm", ",".join(f"{p:g}" for p in self.power_sweep_dbm)),
            ("run.master_seed", self.master_seed),
            ("run.eval_blocks", self.eval_blocks),
            ("run.noise_realizations", self.noise_realizations),
            ("run.n_bootstrap", self.n_bootstrap),
        ]
        return [f"# {k} = {v}" for k, v in items]


def _floats(text: str) -> tuple:
    return tuple(float(t) for t in text.replace(",", " ").split())


def config_from_ini(path) -> ExperimentConfig:
    """Parse a sectioned key = value file with the usual engineering units."""
    ini = configparser.ConfigParser()
    if not ini.read(path):
        raise ConfigurationError(f"cannot read config file {path}")

    def get(section, key, cast, default):
        if not ini.has_option(section, key):
            return default
        raw = ini.get(section, key).strip()
        if raw.lower() in ("", "none", "auto"):
            return None
        return cast(raw)

    fiber = FiberParams(
        dispersion_D=get("fiber", "dispersion_D", float, 17.0),
        gamma=get("fiber", "gamma", float, 1.3),
        alpha_dB=get("fiber", "alpha_dB", float, 0.2),
        span_length=get("fiber", "span_length_km", float, 100.0),
        reference_wavelength=get("fiber", "reference_wavelength_nm", float, 1550.0),
    )
    link = LinkConfig(
        fiber=fiber,
        num_spans=get("link", "num_spans", int, 10),
        amplification=get("link", "amplification", str, "edfa"),
        n_sp=get("link", "n_sp", float, 1.0),
        noise_enabled=get("link", "noise_enabled", lambda s: s.lower() == "true", True),
    )
    wdm = WdmConfig(
        num_channels=get("wdm", "num_channels", int, 1),
        symbol_rate=get("wdm", "symbol_rate_GBd", float, 50.0) * 1e9,
        channel_spacing=get("wdm", "channel_spacing_GHz", float, 50.0) * 1e9,
        samples_per_symbol=get("wdm", "samples_per_symbol", int, 16),
    )
    step = get("ssfm", "step_size_km", float, 0.1)
    max_phase = get("ssfm", "max_phase_rad", float, None)
    ssfm = (SsfmConfig(step_size_km=None, max_phase_rad=max_phase)
            if max_phase is not None else SsfmConfig(step_size_km=step))
    eq = get("receiver", "equalization", str, "cdc")
    return ExperimentConfig(
        link=link, wdm=wdm, ssfm=ssfm,
        equalizations=tuple(e.strip() for e in eq.split(",") if e.strip()),
        dbp_steps_per_span=get("receiver", "dbp_steps_per_span", int, None),
        demux_sps=get("receiver", "demux_sps", int, 4),
        source_kind=get("source", "kind", str, "gaussian"),
        qam_order=get("source", "qam_order", int, 256),
        rate_bits=get("source", "rate_bits", float, 6.4),
        ess_block_length=get("source", "ess_block_length", int, 256),
        num_test_sequences=get("selection", "num_test_sequences", int, 2**16),
        block_length=get("selection", "block_length", int, 256),
        eta_list=tuple(get("selection", "eta_list", _floats, (1.0,))),
        screening_power_dbm=get("selection", "screening_power_dbm", float, None),
        screening_sps=get("selection", "screening_sps", int, 4),
        screening_step_km=get("selection", "screening_step_km", float, None),
        power_sweep_dbm=tuple(get("run", "power_sweep_dbm", _floats, (0.0,))),
        master_seed=get("run", "master_seed", int, 1),
        eval_blocks=get("run", "eval_blocks", int, 128),
        noise_realizations=get("run", "noise_realizations", int, 4),
        n_bootstrap=get("run", "n_bootstrap", int, 200),
        output_csv=get("run", "output_csv", str, "sweep.csv"),
        screening_file=get("run", "screening_file", str, "screening.npz"),
    )


def make_source(cfg: ExperimentConfig):
    """Callable (rng, n) -> SymbolSequence for the configured source kind."""
    if cfg.source_kind == "gaussian":
        return gaussian_source
    qam = square_qam(cfg.qam_order)
    if cfg.source_kind == "pas-mb":
        mb = mb_fit(qam, cfg.rate_bits)
        return lambda rng, n: pas_source(mb, qam, n, rng)
    side = int(round(math.sqrt(cfg.qam_order)))
    k_bits = math.ceil(cfg.ess_block_length * (cfg.rate_bits - 2.0) / 2.0)
    code = ess_code_for_rate(tuple(range(1, side, 2)), cfg.ess_block_length, k_bits)
    return lambda rng, n: pas_source(code, qam, n, rng)


def _screening_wdm(cfg: ExperimentConfig, power_dbm: float) -> WdmConfig:
    return WdmConfig(num_channels=1, symbol_rate=cfg.wdm.symbol_rate,
                     channel_spacing=cfg.wdm.channel_spacing,
                     samples_per_symbol=cfg.screening_sps,
                     launch_power_dbm=power_dbm)


def make_screening_channel(cfg: ExperimentConfig, power_dbm: float):
    """Single-channel, noiseless, dispersion-compensated screening simulator."""
    wdm = _screening_wdm(cfg, power_dbm)
    link = replace(cfg.link, noise_enabled=False)
    step = cfg.screening_step_km
    ssfm = cfg.ssfm if step is None else SsfmConfig(step_size_km=step)
    rcfg = ReceiverConfig("cdc", channel_index=0, demux_sps=cfg.screening_sps)

    def channel(burst: np.ndarray) -> np.ndarray:
        f = modulate([SymbolSequence(burst)], wdm)
        out = propagate_link(f, link, ssfm)
        return receive(out, wdm, link, rcfg).symbols

    return channel


def run_screening(cfg: ExperimentConfig, power_dbm: float) -> SelectionResult:
    """One full screening burst; every working point re-thresholds this."""
    sel_cfg = SelectionConfig(num_test_sequences=cfg.num_test_sequences,
                              block_length=cfg.block_length,
                              target_rate=1.0, screening_power_dbm=power_dbm)
    rng = derive_rng(cfg.master_seed, _SCREEN)
    meta = {"master_seed": cfg.master_seed, "screening_power_dbm": power_dbm,
            "source_kind": cfg.source_kind, "block_length": cfg.block_length,
            "num_test_sequences": cfg.num_test_sequences}
    return screen(make_source(cfg), sel_cfg,
                  make_screening_channel(cfg, power_dbm), rng, meta)


def _drawn_blocks(cfg: ExperimentConfig):
    """The full test-sequence pool exactly as the screening run draws it."""
    rng = derive_rng(cfg.master_seed, _SCREEN)
    drawn = make_source(cfg)(rng, cfg.num_test_sequences * cfg.block_length)
    x = np.moveaxis(np.asarray(drawn).reshape(2, -1, cfg.block_length), 0, 1)
    labels = getattr(drawn, "labels", None)
    if labels is not None:
        labels = np.moveaxis(labels.reshape(2, -1, cfg.block_length), 0, 1)
    constellation = getattr(drawn, "constellation", None)
    return x, labels, constellation


def source_constellation(cfg: ExperimentConfig):
    """Shaped constellation of the configured source; None for Gaussian.

    Draw-independent, so a minimal draw suffices to obtain it.
    """
    if cfg.source_kind == "gaussian":
        return None
    n_min = cfg.ess_block_length // 4 if cfg.source_kind == "pas-ess" else 4
    probe = make_source(cfg)(np.random.default_rng(0), n_min)
    return probe.constellation


def _cycle(pool: np.ndarray, count: int, offset: int) -> np.ndarray:
    return pool[(np.arange(count) + offset) % len(pool)]


def _pol_major(blocks: np.ndarray) -> np.ndarray:
    """(B, 2, N) block stack -> (2, B*N) burst, block order preserved."""
    return np.moveaxis(blocks, 1, 0).reshape(2, -1)


def evaluate_air(cfg: ExperimentConfig, pool_idx: np.ndarray, x_pool: np.ndarray,
                 label_pool, constellation, power_dbm: float, power_index: int,
                 eta_hat: float) -> dict:
    """Transmit cycled pool blocks over the noisy link, estimate the AIR.

    Returns {equalization: AirEstimate}. All equalizations share the same
    propagated fields; noise depends on (power_index, realization) only.
    """
    n = cfg.block_length
    b = cfg.eval_blocks
    center = cfg.wdm.center_channel
    idx = {c: _cycle(pool_idx, b, ((c - center) % cfg.wdm.num_channels) * b)
           for c in range(cfg.wdm.num_channels)}
    x_blocks = x_pool[idx[center]]
    wdm = replace(cfg.wdm, launch_power_dbm=power_dbm)
    tx = modulate([SymbolSequence(_pol_major(x_pool[idx[c]]))
                   for c in range(cfg.wdm.num_channels)], wdm)
    steps = cfg.dbp_steps_per_span
    if steps is None and cfg.ssfm.step_size_km is not None:
        steps = cfg.ssfm.steps_for(cfg.link.fiber)
    received = {eq: [] for eq in cfg.equalizations}
    for r in range(cfg.noise_realizations):
        rng = derive_rng(cfg.master_seed, _NOISE, power_index, r)
        prop = propagate_link(tx, cfg.link, cfg.ssfm, rng)
        for eq in cfg.equalizations:
            rcfg = ReceiverConfig(eq, dbp_steps_per_span=steps,
                                  channel_index=center, demux_sps=cfg.demux_sps)
            y = receive(prop, wdm, cfg.link, rcfg, cfg.ssfm).symbols
            y_blocks = np.moveaxis(y.reshape(2, b, n), 0, 1)
            received[eq].append(phase_compensate_blocks(x_blocks, y_blocks))
    reps = cfg.noise_realizations
    x_all = np.tile(x_blocks, (reps, 1, 1))
    out = {}
    for eq in cfg.equalizations:
        y_all = np.concatenate(received[eq])
        aux = fit_aux_channel(_pol_major(x_all), _pol_major(y_all))
        boot_rng = derive_rng(cfg.master_seed, _BOOT, power_index,
                              round(eta_hat * cfg.num_test_sequences))
        if cfg.source_kind == "gaussian":
            air = air_symbolwise(_pol_major(x_all), _pol_major(y_all), aux)
            se = symbolwise_stderr(x_all, y_all, boot_rng, cfg.n_bootstrap)
        else:
            lab_all = np.tile(label_pool[idx[center]], (reps, 1, 1))
            air, terms = air_bitwise(_pol_major(lab_all), _pol_major(y_all), aux,
                                     constellation, return_terms=True)
            se = bitwise_stderr(terms, n, boot_rng, cfg.n_bootstrap)
        out[eq] = selection_bound(air, eta_hat, n, se, b * n * reps)
    return out


def find_optimal_power(cfg: ExperimentConfig) -> float:
    """Unselected-system power with the highest AIR; ties go to lower power.

    The sweep is evaluated in ascending power order on the first
    configured equalization.
    """
    if not cfg.power_sweep_dbm:
        raise ConfigurationError("power sweep is empty")
    x_pool, label_pool, constellation = _drawn_blocks(cfg)
    order = np.argsort(cfg.power_sweep_dbm, kind="stable")
    best_power, best_air = None, -np.inf
    for oi in order:
        p = cfg.power_sweep_dbm[oi]
        est = evaluate_air(cfg, np.arange(len(x_pool)), x_pool, label_pool,
                           constellation, p, int(oi), 1.0)
        air = est[cfg.equalizations[0]].air_unbiased
        if air > best_air:
            best_power, best_air = p, air
    return float(best_power)


def _nan_estimate() -> AirEstimate:
    return AirEstimate(np.nan, np.nan, np.nan, np.nan, 0)


def run_sweep(cfg: ExperimentConfig, selres: SelectionResult | None = None,
              csv_path=None) -> list:
    """Full (power, eta, equalization) sweep; returns and writes CSV rows.

    Empty selections are recorded with NaN rate fields and the run
    continues. The screening artifact is produced here (at the configured
    or optimal screening power) unless one is passed in.
    """
    if selres is None:
        power = cfg.screening_power_dbm
        if power is None:
            power = find_optimal_power(cfg)
        selres = run_screening(cfg, power)
    x_pool = selres.symbols
    label_pool = selres.labels
    constellation = source_constellation(cfg)
    rows = []
    for pi, power in enumerate(cfg.power_sweep_dbm):
        for eta in cfg.eta_list:
            try:
                sub = selres.rethreshold(target_rate=eta)
                ests = evaluate_air(cfg, sub.accepted_indices, x_pool, label_pool,
                                    constellation, power, pi, sub.eta_hat)
                eta_used = sub.eta_hat
            except EmptySelectionError:
                ests = {eq: _nan_estimate() for eq in cfg.equalizations}
                eta_used = eta
            for eq in cfg.equalizations:
                e = ests[eq]
                rows.append({
                    "power_dBm": power, "eta": eta_used, "equalization": eq,
                    "air_unbiased": e.air_unbiased, "penalty": e.selection_penalty,
                    "air_bound": e.air_bound, "mc_stderr": e.mc_stderr,
                    "n_symbols": e.n_symbols_used, "seed": cfg.master_seed,
                })
    if csv_path is None:
        csv_path = cfg.output_csv
    write_csv(rows, cfg, csv_path)
    return rows


def write_csv(rows, cfg: ExperimentConfig, path) -> None:
    with open(path, "w", newline="") as fh:
        for line in cfg.echo_lines():
            fh.write(line + "\n")
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row[k]) for k in CSV_COLUMNS})


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return v
