"""Additive-distortion model of a finite-resolution ADC.

A quantized sample is modeled as ``(1 - gamma) * y + v`` with ``v`` Gaussian and
uncorrelated with ``y``; ``gamma`` is the normalized MSE of the quantizer. For a
Gaussian input and an MMSE (Lloyd-Max) scalar quantizer per I/Q rail, gamma is
tabulated per resolution in ``data/gamma_table.json``; see
``scripts/gen_gamma_table.py``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.special import ndtr

MIN_BITS, MAX_BITS = 1, 12


@dataclass(frozen=True)
class QuantizerModel:
    bits: int
    gamma: float

    def __post_init__(self):
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")

    @classmethod
    def for_bits(cls, bits: int) -> "QuantizerModel":
        return cls(bits, gamma_for_bits(bits))


@lru_cache(maxsize=1)
def _gamma_table() -> dict[int, float]:
    raw = json.loads(resources.files("mmwave_ia").joinpath("data/gamma_table.json").read_text())
    return {int(k): float(v) for k, v in raw["gamma"].items()}


def gamma_for_bits(bits: int) -> float:
    table = _gamma_table()
    if bits not in table:
        raise ValueError(f"no distortion factor for {bits} bits; table covers {MIN_BITS}..{MAX_BITS}")
    return table[bits]


def effective_snr(snr_linear, gamma: float):
    """SNR after quantization: ``(1 - gamma) snr / (1 + gamma snr)``."""
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    snr = np.asarray(snr_linear, dtype=float)
    if np.any(snr < 0):
        raise ValueError("SNR must be >= 0")
    out = (1.0 - gamma) * snr / (1.0 + gamma * snr)
    return float(out) if out.ndim == 0 else out


def effective_snr_db(snr_db, gamma: float):
    snr = 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)
    out = 10.0 * np.log10(effective_snr(snr, gamma))
    return float(out) if np.ndim(out) == 0 else out


def quantize_samples(y: np.ndarray, gamma: float, rng: np.random.Generator) -> np.ndarray:
    """Apply the distortion model to the last axis of ``y``.

    The distortion variance ``gamma (1 - gamma) E|y|^2`` uses the empirical power
    of each vector.
    """
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    y = np.asarray(y)
    if gamma == 0:
        return y.copy()
    power = np.mean(np.abs(y) ** 2, axis=-1, keepdims=True)
    std = np.sqrt(gamma * (1.0 - gamma) * power / 2.0)
    v = std * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return (1.0 - gamma) * y + v


# --------------------------------------------------------------------------
# Lloyd-Max design for a unit-variance Gaussian (used to build the shipped table)

def _norm_prob(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # P(a < X < b), computed on the tail side that avoids cancellation
    return np.where(a >= 0, ndtr(-a) - ndtr(-b), ndtr(b) - ndtr(a))


def _norm_pdf(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def lloyd_max_quantizer(bits: int, tol: float = 1e-13, max_iter: int = 200_000):
    """Optimal ``2**bits``-level quantizer for N(0, 1).

    Returns ``(thresholds, levels, mse)``; ``thresholds`` includes the +-inf ends.
    Initialized from the high-resolution companding solution so large tables
    converge quickly.
    """
    from scipy.stats import norm

    n = 2**bits
    levels = np.sqrt(3.0) * norm.ppf((np.arange(n) + 0.5) / n)
    for _ in range(max_iter):
        t = np.concatenate(([-np.inf], 0.5 * (levels[1:] + levels[:-1]), [np.inf]))
        p = _norm_prob(t[:-1], t[1:])
        new = (_norm_pdf(t[:-1]) - _norm_pdf(t[1:])) / p
        if np.max(np.abs(new - levels)) < tol:
            levels = new
            break
        levels = new
    t = np.concatenate(([-np.inf], 0.5 * (levels[1:] + levels[:-1]), [np.inf]))
    p = _norm_prob(t[:-1], t[1:])
    # centroid condition makes E[X Q(X)] = E[Q(X)^2]
    mse = 1.0 - float(np.sum(p * levels**2))
    return t, levels, mse
