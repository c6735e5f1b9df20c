"""GLRT detection of the primary synchronization signal during a beam sweep.

For each probed beam pair the receiver correlates the received vector with the
known unit-norm PSS ``x``::

    rho = |x^H y|^2 / (||x||^2 ||y||^2)

and accumulates ``-D ln(1 - rho)`` over sweeps. The direction with the largest
accumulated statistic is declared if it clears a threshold set from the
false-alarm budget.

Under noise only, ``rho ~ Beta(1, D - 1)``, so ``-D ln(1 - rho)`` is exponential
with mean ``D / (D - 1)`` and the K-sweep statistic is Gamma(K). Thresholds
are exact inverse survival functions of those laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from . import streams
from .beamspace import BeamspaceLayout, aligned_bf_gain_db, effective_beamspace
from .quantization import effective_snr, gamma_for_bits, quantize_samples
from .scenario import ArchitectureSpec, ArrayGeometry, ScenarioConfig
from .units import SPEED_OF_LIGHT_M_S, Db, kmh_to_ms

NR_PSS_LENGTH = 127
NOT_REACHED = math.inf
TRIAL_BLOCK = 500


class SaturatedStatistic(ValueError):
    """A correlation of exactly 1 makes the log-likelihood ratio infinite."""


# --------------------------------------------------------------------------
# signal and statistics

def _nr_m_sequence() -> np.ndarray:
    x = [0, 1, 1, 0, 1, 1, 1]
    while len(x) < NR_PSS_LENGTH:
        i = len(x) - 7
        x.append((x[i + 4] + x[i]) % 2)
    return np.array(x)


def make_pss(d: int = NR_PSS_LENGTH, sequence_id: int = 0) -> np.ndarray:
    """Unit-norm BPSK PSS of length ``d`` for ``sequence_id`` in {0, 1, 2}.

    Uses the NR construction (length-127 m-sequence cyclically shifted by
    ``43 * sequence_id``), repeated or truncated to ``d`` samples.
    """
    if sequence_id not in (0, 1, 2):
        raise ValueError(f"sequence_id must be 0, 1 or 2, got {sequence_id}")
    if d < 2:
        raise ValueError("PSS dimension must be >= 2")
    m = _nr_m_sequence()
    idx = (np.arange(d) + 43 * sequence_id) % NR_PSS_LENGTH
    x = (1.0 - 2.0 * m[idx]).astype(complex)
    return x / np.linalg.norm(x)


def correlation_stat(x: np.ndarray, y: np.ndarray) -> np.ndarray | float:
    """Normalized correlation energy; ``y`` may be a batch along leading axes."""
    y = np.asarray(y)
    if y.shape[-1] != x.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    y_energy = np.sum(np.abs(y) ** 2, axis=-1)
    if np.any(y_energy == 0):
        raise ValueError("received vector is all zeros")
    rho = np.abs(y @ np.conj(x)) ** 2 / (np.vdot(x, x).real * y_energy)
    # rounding can push exactly colinear inputs a hair above 1
    rho = np.minimum(rho, 1.0)
    return float(rho) if np.ndim(rho) == 0 else rho


def glrt_statistic(rho, d: int, axis: int = -1):
    """Sum of ``-d ln(1 - rho)`` along ``axis`` (the sweep cycles)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho >= 1):
        raise SaturatedStatistic("correlation of 1 gives an infinite statistic")
    if np.any(rho < 0):
        raise ValueError("correlation must be >= 0")
    lam = np.sum(-d * np.log1p(-rho), axis=axis) if rho.ndim else -d * math.log1p(-float(rho))
    return float(lam) if np.ndim(lam) == 0 else lam


def estimate_alpha(x: np.ndarray, y: np.ndarray) -> complex:
    """Least-squares channel coefficient ``x^H y / ||x||^2``."""
    if x.shape != y.shape:
        raise ValueError("dimension mismatch")
    return complex(np.vdot(x, y) / np.vdot(x, x).real)


def estimate_sigma2(x: np.ndarray, y: np.ndarray, hypothesis: str) -> float:
    """ML noise variance under ``"H0"`` (noise only) or ``"H1"`` (signal present)."""
    if x.shape != y.shape:
        raise ValueError("dimension mismatch")
    d = y.shape[-1]
    y_energy = float(np.vdot(y, y).real)
    if hypothesis == "H0":
        return y_energy / d
    if hypothesis == "H1":
        proj = abs(np.vdot(x, y)) ** 2 / np.vdot(x, x).real
        return max(y_energy - proj, 0.0) / d
    raise ValueError(f"hypothesis must be 'H0' or 'H1', got {hypothesis!r}")


def neg_log_likelihood(y: np.ndarray, x: np.ndarray, alpha: complex, sigma2: float) -> float:
    """``-ln p(y | alpha, sigma2)`` for ``y = alpha x + CN(0, sigma2 I)``."""
    d = y.shape[-1]
    r = y - alpha * x
    return float(np.vdot(r, r).real / sigma2 + d * math.log(math.pi * sigma2))


def _null_block(seed: int, block: int, n: int, d: int) -> np.ndarray:
    rng = streams.substream(seed, streams.TAG_NULL, block)
    return correlation_stat(make_pss(d, 0), _cn(rng, (n, d)))


def null_correlations(n: int, d: int = NR_PSS_LENGTH, seed: int = 0, workers: int = 1) -> np.ndarray:
    """Correlations of the PSS with ``n`` complex white-noise vectors."""
    jobs = [(seed, b, stop - start, d) for b, start, stop in streams.blocks(n, 20_000)]
    return np.concatenate(streams.map_blocks(_null_block, jobs, workers))


# --------------------------------------------------------------------------
# false-alarm budget and threshold

def n_delay_hypotheses(cfg: ScenarioConfig | None = None, *, period_s: float | None = None,
                       sampling_rate_hz: float | None = None) -> int:
    """Sample offsets within one burst period (the PSS repeats every period)."""
    t = period_s if period_s is not None else cfg.ss_burst_period_s
    fs = sampling_rate_hz if sampling_rate_hz is not None else cfg.sampling_rate_hz
    # guard against products like 0.02 * 1e9 = 20000000.000000004
    return max(1, math.ceil(round(t * fs, 6)))


def n_freq_offset_hypotheses(ppm: float, speed_kmh: float, fc_hz: float, symbol_duration_s: float) -> int:
    """Frequency bins covering +-(LO error + Doppler), each rotating at most pi/4 per symbol."""
    if min(ppm, speed_kmh) < 0 or fc_hz <= 0 or symbol_duration_s <= 0:
        raise ValueError("inputs must be positive")
    f_max = ppm * 1e-6 * fc_hz + kmh_to_ms(speed_kmh) / SPEED_OF_LIGHT_M_S * fc_hz
    bin_width = 1.0 / (8.0 * symbol_duration_s)
    return max(1, math.ceil(2.0 * f_max / bin_width))


def null_scale(d: int) -> float:
    """Mean of ``-d ln(1 - rho)`` under noise only."""
    return d / (d - 1.0)


@dataclass(frozen=True)
class DetectorCalibration:
    r_fa: float
    n_pss: int
    n_dly: int
    n_fo: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("PSS dimension must be >= 2")
        if not 0 < self.p_fa <= 1:
            raise ValueError(f"per-test false-alarm probability {self.p_fa} outside (0, 1]")

    @property
    def p_fa(self) -> float:
        return self.r_fa / (self.n_pss * self.n_dly * self.n_fo)

    @property
    def threshold(self) -> float:
        """Single-observation threshold on the correlation ``rho``."""
        return -math.expm1(math.log(self.p_fa) / (self.d - 1))

    def lambda_threshold(self, k: int) -> float:
        """Threshold on the K-sweep statistic with noise-only tail ``p_fa``."""
        if k < 1:
            raise ValueError("K must be >= 1")
        if self.p_fa >= 1:
            return 0.0
        return float(stats.gamma.isf(self.p_fa, k, scale=null_scale(self.d)))

    @classmethod
    def for_p_fa(cls, p_fa: float, d: int) -> "DetectorCalibration":
        """Calibration with the budget collapsed to a single per-test probability."""
        return cls(r_fa=p_fa, n_pss=1, n_dly=1, n_fo=1, d=d)


def calibrate_threshold(cfg: ScenarioConfig, d: int | None = None) -> DetectorCalibration:
    return DetectorCalibration(
        r_fa=cfg.fa_rate_per_cycle,
        n_pss=cfg.n_pss_sequences,
        n_dly=n_delay_hypotheses(cfg),
        n_fo=cfg.n_freq_offset_hyp,
        d=cfg.pss_dimension if d is None else d,
    )


# --------------------------------------------------------------------------
# operating point

def detector_snr_db(omni_snr_db: float, cfg: ScenarioConfig, ue: ArrayGeometry,
                    arch: ArchitectureSpec | None = None) -> Db:
    """Per-sample SNR seen by the correlator on the aligned beam pair.

    Omni SNR plus both aligned array gains, minus the gNB power split across
    its simultaneous beams, optionally plus the PSS-band noise reduction, then
    the quantization penalty of ``arch``'s ADC resolution.
    """
    snr = (omni_snr_db + aligned_bf_gain_db(cfg.gnb_array, ue)
           - 10.0 * math.log10(cfg.gnb_rf_chains))
    if cfg.pss_band_snr_gain:
        snr += 10.0 * math.log10(cfg.system_bandwidth_hz / cfg.pss_bandwidth_hz)
    if arch is not None:
        snr = 10.0 * math.log10(effective_snr(10.0 ** (snr / 10.0), gamma_for_bits(arch.adc_bits)))
    return Db(snr)


# --------------------------------------------------------------------------
# Monte Carlo beam sweep

@dataclass(frozen=True)
class MisdetectionEstimate:
    snr_db: float
    k: int
    n_trials: int
    failures: int
    threshold: float

    @property
    def pmd(self) -> float:
        return self.failures / self.n_trials

    @property
    def stderr(self) -> float:
        p = self.pmd
        return math.sqrt(p * (1.0 - p) / self.n_trials)


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def _true_rho_snr_domain(rng, n: int, snr: float, d: int) -> np.ndarray:
    # exact law of rho for y = a x + CN(0, I): split the noise into its
    # component along x and the (d-1)-dimensional orthogonal energy
    h, n_par = _cn(rng, n), _cn(rng, n)
    a = np.abs(math.sqrt(d * snr) * h + n_par) ** 2
    return a / (a + rng.standard_gamma(d - 1, n))


def _true_rho_sample_domain(rng, n: int, snr: float, d: int, x: np.ndarray, gamma: float) -> np.ndarray:
    h = _cn(rng, n)
    y = math.sqrt(d * snr) * h[:, None] * x[None, :] + _cn(rng, (n, d))
    if gamma:
        y = quantize_samples(y, gamma, rng)
    return correlation_stat(x, y)


def _noise_rho_snr_domain(rng, shape, d: int) -> np.ndarray:
    # 1 - rho = U^(1/(d-1)) under noise only
    return -np.expm1(-rng.standard_exponential(shape) / (d - 1))


def _noise_rho_sample_domain(rng, shape, d: int, x: np.ndarray, gamma: float) -> np.ndarray:
    out = np.empty(shape)
    for i in range(shape[0]):
        y = _cn(rng, (shape[1], d))
        if gamma:
            y = quantize_samples(y, gamma, rng)
        out[i] = correlation_stat(x, y)
    return out


def _sweep_block(seed: int, block: int, n: int, snr: float, d: int, n_dirs: int,
                 thresholds: tuple[float, ...], mode: str, gamma: float) -> np.ndarray:
    """Failure counts after 1..K sweeps for one block of trials."""
    samples = mode == "samples"
    tag = streams.TAG_PMD_SAMPLES if samples else streams.TAG_PMD
    x = make_pss(d, 0) if samples else None
    lam_true = np.zeros(n)
    lam_noise = np.zeros((n_dirs - 1, n))
    failures = np.zeros(len(thresholds), dtype=np.int64)
    for k, thr in enumerate(thresholds):
        # one stream per (block, role, cycle): the first m noise directions are
        # shared by any beamspace with at least m directions
        g_sig = streams.substream(seed, tag, block, 0, k)
        g_noise = streams.substream(seed, tag, block, 1, k)
        if samples:
            rho_t = _true_rho_sample_domain(g_sig, n, snr, d, x, gamma)
            rho_n = _noise_rho_sample_domain(g_noise, lam_noise.shape, d, x, gamma) if n_dirs > 1 else None
        else:
            rho_t = _true_rho_snr_domain(g_sig, n, snr, d)
            rho_n = _noise_rho_snr_domain(g_noise, lam_noise.shape, d) if n_dirs > 1 else None
        lam_true += -d * np.log1p(-rho_t)
        if rho_n is not None:
            lam_noise += -d * np.log1p(-rho_n)
            best_noise = lam_noise.max(axis=0)
        else:
            best_noise = np.full(n, -np.inf)
        detected = (lam_true > best_noise) & (lam_true >= thr)
        failures[k] = n - int(detected.sum())
    return failures


def misdetection_counts(post_bf_snr_db: float, k_max: int, calibration: DetectorCalibration,
                        n_dirs: int, n_trials: int, seed: int, *, gamma: float = 0.0,
                        mode: str = "snr", workers: int = 1) -> np.ndarray:
    """Failure counts after 1..k_max sweeps, shape ``(k_max,)``.

    ``mode="snr"`` draws the correlation statistics from their exact laws and
    applies quantization as an effective-SNR penalty; ``mode="samples"`` builds
    the received vectors, quantizes them and correlates.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if k_max < 1 or n_dirs < 1:
        raise ValueError("k_max and n_dirs must be >= 1")
    if mode not in ("snr", "samples"):
        raise ValueError(f"mode must be 'snr' or 'samples', got {mode!r}")
    d = calibration.d
    snr = 10.0 ** (post_bf_snr_db / 10.0)
    if mode == "snr" and gamma:
        snr = effective_snr(snr, gamma)
    thresholds = tuple(calibration.lambda_threshold(k) for k in range(1, k_max + 1))
    jobs = [(seed, b, stop - start, snr, d, n_dirs, thresholds, mode, gamma)
            for b, start, stop in streams.blocks(n_trials, TRIAL_BLOCK)]
    return np.sum(streams.map_blocks(_sweep_block, jobs, workers), axis=0)


def simulate_misdetection(post_bf_snr_db: float, k: int, calibration: DetectorCalibration,
                          n_dirs: int, n_trials: int, seed: int, **kwargs) -> MisdetectionEstimate:
    """Probability the K-sweep detector misses the true beam pair.

    ``n_dirs`` is the effective beamspace size; the true pair is one of them.
    Small-scale fading is CN(0, 1), redrawn every sweep.
    """
    counts = misdetection_counts(post_bf_snr_db, k, calibration, n_dirs, n_trials, seed, **kwargs)
    return MisdetectionEstimate(post_bf_snr_db, k, n_trials, int(counts[-1]),
                                calibration.lambda_threshold(k))


def misdetection_curve(snr_grid_db: Sequence[float], k_values: Sequence[int],
                       calibration: DetectorCalibration, n_dirs: int, n_trials: int, seed: int,
                       **kwargs) -> list[MisdetectionEstimate]:
    k_max = max(k_values)
    out = []
    for snr_db in snr_grid_db:
        counts = misdetection_counts(snr_db, k_max, calibration, n_dirs, n_trials, seed, **kwargs)
        out += [MisdetectionEstimate(float(snr_db), k, n_trials, int(counts[k - 1]),
                                     calibration.lambda_threshold(k)) for k in k_values]
    return out


def sweeps_required(pmd_by_k: Mapping[int, float] | Sequence[float], pmd_target: float) -> int | float:
    """Smallest K whose mis-detection estimate meets the target, else ``NOT_REACHED``.

    A sequence is read as Pmd for K = 1, 2, ...
    """
    if not 0 < pmd_target < 1:
        raise ValueError("pmd_target must be in (0, 1)")
    items = sorted(pmd_by_k.items()) if isinstance(pmd_by_k, Mapping) else enumerate(pmd_by_k, start=1)
    for k, pmd in items:
        if pmd <= pmd_target:
            return k
    return NOT_REACHED


def required_sweeps(post_bf_snr_db: float, calibration: DetectorCalibration, n_dirs: int,
                    pmd_target: float, n_trials: int, seed: int, k_max: int = 8,
                    workers: int = 1) -> int | float:
    counts = misdetection_counts(post_bf_snr_db, k_max, calibration, n_dirs, n_trials, seed,
                                 workers=workers)
    return sweeps_required(list(counts / n_trials), pmd_target)


def effective_directions(cfg: ScenarioConfig, arch: ArchitectureSpec, ue: ArrayGeometry) -> int:
    layout = BeamspaceLayout(cfg.gnb_array.n_directions, ue.n_directions)
    return effective_beamspace(arch, layout)
