"""Rejection-sampling sequence selection.

Candidate blocks are drawn i.i.d., concatenated into one long burst,
pushed through a single-channel noiseless screening simulation, and
scored by the Euclidean distance between transmitted and received blocks
after per-block mean-phase removal. Blocks whose score stays below the
threshold form the biased source; keeping the whole score vector lets one
expensive screening run serve every acceptance-rate working point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dsp import phase_compensate_blocks
from .errors import ConfigurationError, EmptySelectionError
from .signal import SymbolSequence

_FORMAT = "seqsel-selection-v1"


@dataclass(frozen=True)
class SelectionConfig:
    num_test_sequences: int = 2**16
    block_length: int = 256
    gamma_e: float | None = None      # metric threshold, sqrt(W) x symbols
    target_rate: float | None = None  # acceptance rate eta in (0, 1]
    screening_power_dbm: float = 0.0

    def __post_init__(self):
        if (self.gamma_e is None) == (self.target_rate is None):
            raise ConfigurationError("set exactly one of gamma_e, target_rate")
        if self.gamma_e is not None and self.gamma_e <= 0:
            raise ConfigurationError("gamma_e must be positive")
        if self.target_rate is not None and not 0 < self.target_rate <= 1:
            raise ConfigurationError("target rate must be in (0, 1]")
        if self.num_test_sequences < 1 or self.block_length < 1:
            raise ConfigurationError("need at least one sequence and one symbol")


def sequence_metric(x, y) -> float:
    """Euclidean norm of x - y over all 4N real components."""
    xa, ya = np.asarray(x), np.asarray(y)
    if xa.shape != ya.shape:
        raise ConfigurationError(f"shape mismatch {xa.shape} vs {ya.shape}")
    return float(np.linalg.norm(xa - ya))


def threshold_for_rate(metrics: np.ndarray, eta: float) -> float:
    """Threshold accepting exactly ceil(eta * N_t) of the given metrics.

    Placed midway between the two straddling order statistics, so for
    eta = 0.5 it is the sample median. eta = 1 maps to +inf.
    """
    if not 0 < eta <= 1:
        raise ConfigurationError("eta must be in (0, 1]")
    n = len(metrics)
    count = int(np.ceil(eta * n))
    if count >= n:
        return np.inf
    s = np.partition(metrics, [count - 1, count])
    return 0.5 * (s[count - 1] + s[count])


def biased_probability_factor(eta: float) -> float:
    """Likelihood-ratio ceiling of the biased source, 1/eta."""
    if not 0 < eta <= 1:
        raise ConfigurationError("eta must be in (0, 1]")
    return 1.0 / eta


@dataclass(eq=False)
class SelectionResult:
    """Outcome of a screening run, re-thresholdable without re-simulation.

    symbols holds every tested block (accepted or not) so the threshold
    can be tightened later; accepted_indices point into it in draw order.
    """

    symbols: np.ndarray                 # (N_t, 2, N)
    all_metrics: np.ndarray             # (N_t,)
    gamma_e: float
    accepted_indices: np.ndarray
    labels: np.ndarray | None = None    # (N_t, 2, N) ints for discrete sources
    metadata: dict = field(default_factory=dict)

    @property
    def num_tested(self) -> int:
        return self.symbols.shape[0]

    @property
    def eta_hat(self) -> float:
        return len(self.accepted_indices) / self.num_tested

    @property
    def accepted_symbols(self) -> np.ndarray:
        return self.symbols[self.accepted_indices]

    @property
    def accepted_metrics(self) -> np.ndarray:
        return self.all_metrics[self.accepted_indices]

    def rethreshold(self, gamma_e: float | None = None,
                    target_rate: float | None = None) -> "SelectionResult":
        """Same screening data under a new threshold (shares the arrays)."""
        if (gamma_e is None) == (target_rate is None):
            raise ConfigurationError("set exactly one of gamma_e, target_rate")
        if gamma_e is None:
            gamma_e = threshold_for_rate(self.all_metrics, target_rate)
        accepted = np.flatnonzero(self.all_metrics < gamma_e)
        if len(accepted) == 0:
            raise EmptySelectionError(
                f"threshold {gamma_e:g} rejects all {self.num_tested} sequences")
        return SelectionResult(self.symbols, self.all_metrics, float(gamma_e),
                               accepted, self.labels, dict(self.metadata))

    def save(self, path) -> None:
        extra = {} if self.labels is None else {"labels": self.labels}
        np.savez(path, format=_FORMAT, symbols=self.symbols,
                 all_metrics=self.all_metrics, gamma_e=self.gamma_e,
                 accepted_indices=self.accepted_indices,
                 metadata=json.dumps(self.metadata), **extra)

    @classmethod
    def load(cls, path) -> "SelectionResult":
        with np.load(path, allow_pickle=False) as z:
            if str(z["format"]) != _FORMAT:
                raise ConfigurationError(f"unknown screening file format {z['format']!r}")
            return cls(z["symbols"], z["all_metrics"], float(z["gamma_e"]),
                       z["accepted_indices"],
                       z["labels"] if "labels" in z.files else None,
                       json.loads(str(z["metadata"])))


def screen(source, cfg: SelectionConfig, channel, rng: np.random.Generator,
           metadata: dict | None = None) -> SelectionResult:
    """Draw, transmit once as one concatenated burst, score, threshold.

    source(rng, n) must yield n 2-pol symbols (optionally with labels);
    channel maps the transmitted (2, M) burst to the received, equalized
    and sampled (2, M) burst of the single-channel noiseless screening
    scenario.
    """
    n_t, n = cfg.num_test_sequences, cfg.block_length
    drawn = source(rng, n_t * n)
    x_burst = np.asarray(drawn)
    labels = getattr(drawn, "labels", None)
    y_burst = np.asarray(channel(x_burst))
    if y_burst.shape != x_burst.shape:
        raise ConfigurationError("screening channel changed the burst shape")
    x_blocks = np.moveaxis(x_burst.reshape(2, n_t, n), 0, 1)
    y_blocks = np.moveaxis(y_burst.reshape(2, n_t, n), 0, 1)
    y_blocks = phase_compensate_blocks(x_blocks, y_blocks)
    metrics = np.sqrt(np.sum(np.abs(x_blocks - y_blocks) ** 2, axis=(1, 2)))
    if cfg.gamma_e is not None:
        gamma = cfg.gamma_e
    else:
        gamma = threshold_for_rate(metrics, cfg.target_rate)
    accepted = np.flatnonzero(metrics < gamma)
    if len(accepted) == 0:
        raise EmptySelectionError(
            f"gamma_E = {gamma:g} rejects all {n_t} test sequences "
            f"(smallest metric {metrics.min():g})")
    label_blocks = None
    if labels is not None:
        label_blocks = np.moveaxis(np.asarray(labels).reshape(2, n_t, n), 0, 1)
    return SelectionResult(x_blocks, metrics, float(gamma), accepted,
                           label_blocks, dict(metadata or {}))
