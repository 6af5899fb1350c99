"""Shaped symbol sources.

Two shaping routes, composed into PAS-QAM sources:

* Maxwell-Boltzmann: i.i.d. points with P(c) proportional to exp(-lam |c|^2),
  the rate parameter fitted to a target entropy;
* enumerative sphere shaping: a bit-exact distribution matcher mapping k-bit
  words onto amplitude blocks of bounded energy, lexicographically indexed.

The sphere-shaping trellis stores suffix counts as Python integers (they
overflow 64 bits already for moderate block lengths) on an energy grid
compressed by the gcd of the amplitude-energy differences, so block length
256 with an 8-ary alphabet stays comfortably in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    InfeasibleShapingError,
    InvalidCodewordError,
)
from .signal import Constellation, SymbolSequence
from .utils import entropy_bits


@dataclass(frozen=True, eq=False)
class MBDistribution:
    """P(c) proportional to exp(-lam |c|^2) over a fixed constellation."""

    lam: float
    probabilities: np.ndarray

    def entropy(self) -> float:
        return entropy_bits(self.probabilities)


def _mb_probabilities(energies: np.ndarray, lam: float) -> np.ndarray:
    w = np.exp(-lam * (energies - energies.min()))
    return w / w.sum()


def mb_fit(constellation: Constellation, target_entropy: float) -> MBDistribution:
    """Rate parameter whose entropy hits the target, by bisection.

    Entropy is strictly decreasing in lam, from log2(M) at lam=0 down to
    log2(#minimum-energy points) in the limit; targets at or below that
    limit return the limiting distribution concentrated on the innermost
    points.
    """
    m_bits = np.log2(constellation.size)
    if target_entropy < 0:
        raise ConfigurationError("entropy target must be non-negative")
    if target_entropy > m_bits + 1e-12:
        raise InfeasibleShapingError(
            f"target {target_entropy} bits exceeds log2(M) = {m_bits:g}")
    e = np.abs(constellation.points) ** 2
    if abs(target_entropy - m_bits) <= 1e-12:
        return MBDistribution(0.0, np.full(constellation.size, 1.0 / constellation.size))
    ring = np.isclose(e, e.min(), rtol=1e-9)
    floor_bits = np.log2(np.count_nonzero(ring))
    if target_entropy <= floor_bits + 1e-12:
        p = ring / np.count_nonzero(ring)
        return MBDistribution(np.inf, p.astype(float))
    lo, hi = 0.0, 1.0
    while entropy_bits(_mb_probabilities(e, hi)) > target_entropy:
        hi *= 2.0
        if hi > 2.0**120:  # cannot happen for targets above the floor
            raise InfeasibleShapingError("entropy target not reachable")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if entropy_bits(_mb_probabilities(e, mid)) > target_entropy:
            lo = mid
        else:
            hi = mid
    p = _mb_probabilities(e, hi)
    return MBDistribution(hi, p)


@dataclass(eq=False)
class EssCode:
    """Enumerative sphere-shaping codebook.

    Admissible codewords are the amplitude sequences of length
    block_length with total energy (sum of squares) at most max_energy;
    the first 2**k of them in lexicographic order carry k-bit words. The
    internal trellis is indexed on the compressed energy grid: suffix
    counts at budget j mean budget max_energy-ish, see suffix_count().
    """

    alphabet: tuple
    block_length: int
    max_energy: int
    k: int
    num_codewords: int
    mean_amplitude_energy: float
    _counts: list          # _counts[l][j]: suffixes of length L-l within budget j
    _granule: int
    _j_root: int
    _marginal: np.ndarray | None = None

    @property
    def rate(self) -> float:
        """Shaping rate in bits per amplitude."""
        return self.k / self.block_length

    def suffix_count(self, level: int, energy_budget: int) -> int:
        """Count of length (block_length - level) suffixes with energy <= budget."""
        e_min = self.alphabet[0] ** 2
        e_max = self.alphabet[-1] ** 2
        r = self.block_length - level
        j = (energy_budget - r * e_min) // self._granule
        if j < 0:
            return 0
        saturation = r * (e_max - e_min) // self._granule
        if j >= saturation:
            return len(self.alphabet) ** r
        if j > self._j_root:
            raise ConfigurationError("budget outside the stored trellis")
        return self._counts[level][j]

    def amplitude_marginal(self) -> np.ndarray:
        """Exact time-averaged amplitude distribution over the 2**k used codewords."""
        if self._marginal is None:
            size = len(self.alphabet)
            occurrences = [_walk_additive(self, [int(i == a) for i in range(size)])
                           for a in range(size)]
            total = (1 << self.k) * self.block_length
            self._marginal = np.array([c / total for c in occurrences])
        return self._marginal


def _letter_weights(alphabet) -> tuple:
    """(sorted alphabet, energies, compressed increments, granule)."""
    alph = tuple(sorted(int(a) for a in alphabet))
    if len(alph) != len(set(alph)) or alph[0] < 1:
        raise ConfigurationError("alphabet must be distinct positive integers")
    energies = [a * a for a in alph]
    g = 0
    for e in energies[1:]:
        g = math.gcd(g, e - energies[0])
    g = g or 1
    increments = [(e - energies[0]) // g for e in energies]
    return alph, energies, increments, g


def ess_build(alphabet, block_length: int, max_energy: int) -> EssCode:
    """Build the suffix-count trellis and size the codebook.

    Counts are exact arbitrary-precision integers. max_energy below the
    all-minimum-amplitude energy is infeasible; budgets above the
    all-maximum energy are clamped (the sphere already holds everything).
    """
    if block_length < 1:
        raise ConfigurationError("block length must be >= 1")
    alph, energies, inc, g = _letter_weights(alphabet)
    ll = block_length
    floor_e = ll * energies[0]
    if max_energy < floor_e:
        raise InfeasibleShapingError(
            f"max energy {max_energy} below the minimum feasible {floor_e}")
    j_root = (min(max_energy, ll * energies[-1]) - floor_e) // g
    counts = [[0] * (j_root + 1) for _ in range(ll)]
    counts.append([1] * (j_root + 1))
    for l in range(ll - 1, -1, -1):
        row = counts[l]
        nxt = counts[l + 1]
        for j in range(j_root + 1):
            t = 0
            for mi in inc:
                if mi > j:
                    break
                t += nxt[j - mi]
            row[j] = t
    total = counts[0][j_root]
    k = total.bit_length() - 1
    code = EssCode(alph, ll, int(max_energy), k, total, 0.0, counts, g, j_root)
    energy_sum = _walk_additive(code, energies)
    code.mean_amplitude_energy = energy_sum / ((1 << k) * ll)
    return code


def _walk_additive(code: EssCode, letter_values) -> int:
    """Sum of per-letter values over the first 2**k codewords.

    letter_values[i] is added once for each occurrence of alphabet[i];
    computed exactly from an auxiliary sum-trellis plus a boundary walk
    along the codeword with index 2**k.
    """
    _, _, inc, _ = _letter_weights(code.alphabet)
    counts = code._counts
    ll = code.block_length
    j_root = code._j_root
    sums = [[0] * (j_root + 1) for _ in range(ll)]
    sums.append([0] * (j_root + 1))
    for l in range(ll - 1, -1, -1):
        row = sums[l]
        nxt = sums[l + 1]
        cnxt = counts[l + 1]
        for j in range(j_root + 1):
            t = 0
            for mi, v in zip(inc, letter_values):
                if mi > j:
                    break
                t += v * cnxt[j - mi] + nxt[j - mi]
            row[j] = t
    total = 0
    remaining = 1 << code.k
    j = j_root
    level = 0
    while remaining > 0 and level < ll:
        descended = False
        for mi, v in zip(inc, letter_values):
            if mi > j:
                break
            c = counts[level + 1][j - mi]
            if remaining >= c:
                total += v * c + sums[level + 1][j - mi]
                remaining -= c
            else:
                total += v * remaining
                j -= mi
                descended = True
                break
        if not descended:
            break
        level += 1
    return total


def ess_encode(code: EssCode, index: int) -> np.ndarray:
    """index-th admissible amplitude sequence in lexicographic order."""
    if not 0 <= index < (1 << code.k):
        raise ConfigurationError(f"index must be a {code.k}-bit word")
    _, _, inc, _ = _letter_weights(code.alphabet)
    counts = code._counts
    j = code._j_root
    out = np.empty(code.block_length, dtype=np.int64)
    for level in range(code.block_length):
        for a, mi in zip(code.alphabet, inc):
            if mi > j:
                break
            c = counts[level + 1][j - mi]
            if index < c:
                out[level] = a
                j -= mi
                break
            index -= c
    return out


def ess_decode(code: EssCode, amplitudes) -> int:
    """Lexicographic rank of an admissible sequence; inverse of ess_encode."""
    amps = np.asarray(amplitudes)
    if amps.shape != (code.block_length,):
        raise InvalidCodewordError(f"expected {code.block_length} amplitudes")
    pos = {a: i for i, a in enumerate(code.alphabet)}
    _, _, inc, _ = _letter_weights(code.alphabet)
    counts = code._counts
    j = code._j_root
    index = 0
    for level, a in enumerate(amps):
        ai = pos.get(int(a))
        if ai is None:
            raise InvalidCodewordError(f"amplitude {a} not in the alphabet")
        if inc[ai] > j:
            raise InvalidCodewordError("sequence energy exceeds the sphere")
        for mi in inc[:ai]:
            index += counts[level + 1][j - mi]
        j -= inc[ai]
    if index >= (1 << code.k):
        raise InvalidCodewordError(
            "sequence is in the sphere but beyond the 2^k addressable codewords")
    return index


def ess_code_for_rate(alphabet, block_length: int, k_bits: int) -> EssCode:
    """Smallest max_energy whose codebook carries at least k_bits per block."""
    alph, energies, inc, g = _letter_weights(alphabet)
    probe = ess_build(alph, block_length, block_length * energies[-1])
    if probe.k < k_bits:
        raise InfeasibleShapingError(
            f"alphabet supports at most {probe.k} bits per block of {block_length}")
    floor_e = block_length * energies[0]
    # the full-budget trellis already counts every smaller sphere
    root = probe._counts[0]
    lo, hi = 0, probe._j_root
    while lo < hi:
        mid = (lo + hi) // 2
        if root[mid].bit_length() - 1 >= k_bits:
            hi = mid
        else:
            lo = mid + 1
    return ess_build(alph, block_length, floor_e + g * lo)


@dataclass(eq=False)
class PasSymbols(SymbolSequence):
    """Shaped 2-pol symbols with their bit labels and source constellation."""

    labels: np.ndarray | None = None
    constellation: Constellation | None = None


def _random_word(rng: np.random.Generator, k: int) -> int:
    if k <= 60:
        return int(rng.integers(0, 1 << k))
    nbytes = (k + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - k)


def _bits_to_word(bits: np.ndarray) -> int:
    w = 0
    for b in bits:
        w = (w << 1) | int(b)
    return w


def _axis_label_grid(constellation: Constellation):
    """Map (I level index, Q level index) -> point index, for any square grid."""
    side = int(round(np.sqrt(constellation.size)))
    if side * side != constellation.size:
        raise ConfigurationError("PAS needs a square constellation")
    levels = np.unique(np.round(constellation.points.real, 12))
    if len(levels) != side:
        raise ConfigurationError("constellation is not a square grid")
    ii = np.searchsorted(levels, np.round(constellation.points.real, 12))
    qq = np.searchsorted(levels, np.round(constellation.points.imag, 12))
    grid = np.full((side, side), -1, dtype=np.int64)
    grid[ii, qq] = np.arange(constellation.size)
    if np.any(grid < 0):
        raise ConfigurationError("constellation does not fill the square grid")
    return grid, side


def pas_source(shaper, constellation: Constellation, n: int, entropy) -> PasSymbols:
    """Probabilistic-amplitude-shaped QAM source of n 2-pol symbols.

    shaper is an MBDistribution (i.i.d. points) or an EssCode (block
    amplitudes, round-robin over the four real dimensions, uniform signs).
    entropy is a Generator, or for the ESS route an array of data bits
    laid out as all amplitude words followed by all sign bits (0 -> +).
    Output has unit mean ensemble energy per polarization.
    """
    if isinstance(shaper, MBDistribution):
        if not isinstance(entropy, np.random.Generator):
            raise ConfigurationError("the MB route needs an rng, not a bitstream")
        shaped = constellation.reweighted(shaper.probabilities)
        idx = entropy.choice(shaped.size, size=(2, n), p=shaper.probabilities)
        return PasSymbols(shaped.points[idx], labels=shaped.labels[idx],
                          constellation=shaped)
    if not isinstance(shaper, EssCode):
        raise ConfigurationError(f"unknown shaper {type(shaper).__name__}")
    code = shaper
    ll = code.block_length
    if (4 * n) % ll:
        raise ConfigurationError(
            f"{n} symbols need {4 * n} amplitudes, not a whole number of "
            f"length-{ll} blocks")
    grid, side = _axis_label_grid(constellation)
    if code.alphabet != tuple(range(1, side, 2)):
        raise ConfigurationError(
            f"alphabet {code.alphabet} does not match the {side}x{side} grid levels")
    blocks = 4 * n // ll
    if isinstance(entropy, np.random.Generator):
        words = [_random_word(entropy, code.k) for _ in range(blocks)]
        sign_bits = entropy.integers(0, 2, size=4 * n)
    else:
        bits = np.asarray(entropy).ravel()
        need = blocks * code.k + 4 * n
        if len(bits) < need:
            raise ConfigurationError(f"bitstream too short: need {need} bits")
        words = [_bits_to_word(bits[i * code.k:(i + 1) * code.k])
                 for i in range(blocks)]
        sign_bits = bits[blocks * code.k:need]
    amps = np.concatenate([ess_encode(code, w) for w in words]).reshape(n, 4)
    signs = (1 - 2 * sign_bits).reshape(n, 4)
    scale = 1.0 / np.sqrt(2.0 * code.mean_amplitude_energy)
    x = scale * (signs[:, 0] * amps[:, 0] + 1j * signs[:, 1] * amps[:, 1])
    y = scale * (signs[:, 2] * amps[:, 2] + 1j * signs[:, 3] * amps[:, 3])
    symbols = np.stack([x, y])
    # exact marginal of the used codebook, as an i.i.d. reference distribution
    marg = code.amplitude_marginal()
    amp_index = {a: i for i, a in enumerate(code.alphabet)}
    axis_p = np.array([marg[amp_index[abs(2 * l - side + 1)]] / 2
                       for l in range(side)])
    point_p = axis_p[:, None] * axis_p[None, :]
    probs = np.empty(constellation.size)
    probs[grid.ravel()] = point_p.ravel()
    ref = constellation.reweighted(probs)
    lvl_i = ((signs[:, [0, 2]] * amps[:, [0, 2]]).T + side - 1) // 2
    lvl_q = ((signs[:, [1, 3]] * amps[:, [1, 3]]).T + side - 1) // 2
    labels = ref.labels[grid[lvl_i, lvl_q]]
    return PasSymbols(symbols, labels=labels, constellation=ref)
