"""Gray-mapped QPSK over complex AWGN, with exact-LLR demodulation.

Symbols carry two code bits (even index on I, odd on Q) at unit energy.
Eb/N0 is normalized by the payload rate: ``rate`` = information bits
(excluding CRC) per transmitted code bit, so the per-dimension noise
variance is 1 / (2 * rate * 2 * 10^(EbN0/10)).
"""

from __future__ import annotations

import numpy as np

from .core import InvalidLengthError

__all__ = ["noise_variance", "qpsk_modulate", "awgn", "llr_demod"]

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_SIGMA2_FLOOR = 1e-30


def noise_variance(eb_n0_db: float, rate: float) -> float:
    """Per-dimension noise variance for unit-energy QPSK at this Eb/N0.

    Floored at 1e-30 so that arbitrarily high SNR stays finite.
    """
    if rate <= 0.0:
        raise ValueError(f"rate must be positive, got {rate}")
    sigma2 = 1.0 / (2.0 * rate * 2.0 * 10.0 ** (eb_n0_db / 10.0))
    return max(sigma2, _SIGMA2_FLOOR)


def qpsk_modulate(bits) -> np.ndarray:
    """Map bit pairs (b_I, b_Q) to ((1 - 2 b_I) + j (1 - 2 b_Q)) / sqrt(2)."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 2:
        raise InvalidLengthError("QPSK needs an even number of bits")
    i = 1.0 - 2.0 * bits[0::2].astype(np.float64)
    q = 1.0 - 2.0 * bits[1::2].astype(np.float64)
    return (i + 1j * q) * _SQRT_HALF


def awgn(symbols: np.ndarray, eb_n0_db: float, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular Gaussian noise with noise_variance per dimension."""
    sigma = np.sqrt(noise_variance(eb_n0_db, rate))
    noise = rng.standard_normal(symbols.size) + 1j * rng.standard_normal(symbols.size)
    return symbols + sigma * noise


def llr_demod(symbols: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-bit LLRs 2 y / sigma^2 from the I/Q components (positive -> 0)."""
    llrs = np.empty(2 * symbols.size, dtype=np.float64)
    llrs[0::2] = 2.0 * symbols.real / sigma2
    llrs[1::2] = 2.0 * symbols.imag / sigma2
    return llrs
