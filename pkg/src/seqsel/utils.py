"""Small unit-conversion and measurement helpers."""

import numpy as np


def dbm_to_w(p_dbm: float) -> float:
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def w_to_dbm(p_w: float) -> float:
    return 10.0 * np.log10(p_w / 1e-3)


def db_to_lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def signed_bins(n: int) -> np.ndarray:
    """FFT bin numbers in fftfreq order: 0, 1, ..., -n//2, ..., -1."""
    return (np.arange(n) + n // 2) % n - n // 2


def evm_db(reference: np.ndarray, received: np.ndarray) -> float:
    """Error vector magnitude in dB: rms error relative to rms reference."""
    err = np.mean(np.abs(received - reference) ** 2)
    ref = np.mean(np.abs(reference) ** 2)
    return 10.0 * np.log10(err / ref)


def entropy_bits(probabilities: np.ndarray) -> float:
    """Shannon entropy in bits; zero-probability entries contribute nothing."""
    p = np.asarray(probabilities, dtype=float)
    nz = p > 0
    return float(-np.sum(p[nz] * np.log2(p[nz])))
