"""
Envelope-domain simulation of binary load modulation.

The tag switches between an absorbing and a reflecting load; the reader sees
the carrier plus the reflected wave and recovers bits with an envelope
averager, a threshold at the long-term mean and a comparator. No RF carrier
oscillation is simulated and the noise is Gaussian on the envelope.
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.ndimage import uniform_filter1d

from scenario_error import DemodulationError, ScenarioValidationError

MIN_BER_BITS = 1000
DEFAULT_SNR_DB = tuple(float(s) for s in range(-10, 21, 2))

RandomSource = Union[None, int, np.random.SeedSequence, np.random.Generator]


@dataclass(frozen=True)
class PhyLink:
    """
    Reflection levels and gains are engineering defaults, not measured
    hardware values.
    """
    samples_per_bit: int = 16
    carrier_amplitude: float = 1.0
    reflect_coeff_on: float = 0.7
    reflect_coeff_off: float = 0.2
    backscatter_path_gain: float = 0.5
    noise_sigma: float = 0.0
    avg_window: int = 4

    def __post_init__(self):
        if not 0.0 <= self.reflect_coeff_off < self.reflect_coeff_on <= 1.0:
            raise ScenarioValidationError("reflect_coeff_on", "need 0 <= reflect_coeff_off < reflect_coeff_on <= 1")
        if not 1 <= self.avg_window <= self.samples_per_bit:
            raise ScenarioValidationError("avg_window", "need 1 <= avg_window <= samples_per_bit")
        if not self.carrier_amplitude > 0.0:
            raise ScenarioValidationError("carrier_amplitude", "must be positive")
        if self.backscatter_path_gain < 0.0:
            raise ScenarioValidationError("backscatter_path_gain", "must be non-negative")
        if self.noise_sigma < 0.0:
            raise ScenarioValidationError("noise_sigma", "must be non-negative")

    def with_snr(self, snr_db: float) -> "PhyLink":
        """Copy whose noise gives carrier_amplitude² / noise_sigma² = snr_db per sample."""
        return replace(self, noise_sigma=self.carrier_amplitude * 10.0 ** (-snr_db / 20.0))


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    ber: float
    errors: int
    n_bits: int

    def as_row(self):
        return self.snr_db, self.ber, self.errors, self.n_bits


def _as_bits(bits) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size == 0:
        raise DemodulationError("Bit stream must be a non-empty sequence")
    if not np.isin(bits, (0, 1)).all():
        raise DemodulationError("Bit stream may only contain 0 and 1")
    return bits.astype(np.int8)


def modulate(bits: Sequence[int], link: PhyLink) -> np.ndarray:
    """Per-sample reflection coefficient: on-level for a 1, off-level for a 0."""
    bits = _as_bits(bits)
    levels = np.where(bits == 1, link.reflect_coeff_on, link.reflect_coeff_off)
    return np.repeat(levels, link.samples_per_bit)


def received_signal(bits: Sequence[int], link: PhyLink, rng_seed: RandomSource = None) -> np.ndarray:
    """Envelope at the reader: |A (1 + g Γ) + n| with n ~ N(0, noise_sigma²)."""
    reflection = modulate(bits, link)
    clean = link.carrier_amplitude * (1.0 + link.backscatter_path_gain * reflection)
    if link.noise_sigma == 0.0:
        return np.abs(clean)
    rng = np.random.default_rng(rng_seed)
    return np.abs(clean + rng.normal(0.0, link.noise_sigma, size=clean.size))


def envelope(samples: np.ndarray, link: PhyLink) -> np.ndarray:
    return uniform_filter1d(np.asarray(samples, dtype=float), size=link.avg_window, mode="nearest")


def demodulate(samples: Sequence[float], link: PhyLink) -> np.ndarray:
    """
    Averager, threshold and comparator. The threshold is the mean of the
    averaged envelope, so it only separates the levels on balanced streams;
    a flat envelope decodes as all zeros.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size == 0 or samples.size % link.samples_per_bit:
        raise DemodulationError(f"Expected a multiple of {link.samples_per_bit} samples, got {samples.size}")
    averaged = envelope(samples, link)
    per_bit = averaged.reshape(-1, link.samples_per_bit).mean(axis=1)
    threshold = averaged.mean()
    if np.ptp(averaged) <= 1e-12 * max(1.0, abs(threshold)):
        logging.warning("[phy] Flat envelope: threshold equals the signal level, bits are ambiguous")
        return np.zeros(per_bit.size, dtype=np.int8)
    return (per_bit > threshold).astype(np.int8)


def balanced_bits(n_bits: int, rng: RandomSource = None) -> np.ndarray:
    """Random stream with n_bits // 2 ones."""
    if n_bits < 1:
        raise ScenarioValidationError("n_bits", "must be positive")
    ones = n_bits // 2
    stream = np.concatenate((np.zeros(n_bits - ones, dtype=np.int8), np.ones(ones, dtype=np.int8)))
    return np.random.default_rng(rng).permutation(stream)


def ber_curve(link: PhyLink, snr_list_db: Sequence[float] = DEFAULT_SNR_DB, n_bits: int = 100_000,
              seed: Optional[int] = 0) -> List[BerPoint]:
    """Monte-Carlo BER per SNR; each SNR point draws from its own child of the seed."""
    if n_bits < MIN_BER_BITS:
        raise ScenarioValidationError("n_bits", f"must be at least {MIN_BER_BITS}")
    children = np.random.SeedSequence(seed).spawn(len(snr_list_db))
    points = []
    for snr_db, child in zip(snr_list_db, children):
        rng = np.random.default_rng(child)
        bits = balanced_bits(n_bits, rng)
        noisy = link.with_snr(float(snr_db))
        decoded = demodulate(received_signal(bits, noisy, rng), noisy)
        errors = int(np.count_nonzero(decoded != bits))
        points.append(BerPoint(float(snr_db), errors / n_bits, errors, n_bits))
        logging.debug(f"[phy] SNR {snr_db:g} dB: {errors} errors over {n_bits} bits")
    logging.info(f"[phy] BER curve over {len(points)} SNR points, {n_bits} bits each")
    return points
