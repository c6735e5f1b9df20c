"""Statistical 28 GHz pathloss with LOS/NLOS states and the omni SNR of random drops."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import streams
from .scenario import ScenarioConfig
from .units import Db, Dbm, Hz, Meters

LOS_DECAY_M = 67.1
MIN_DROP_DISTANCE_M = 1.0
DROP_BLOCK = 4096


class LinkState(enum.Enum):
    LOS = "LOS"
    NLOS = "NLOS"


@dataclass(frozen=True)
class PathlossParams:
    mu_db: float
    nu: float
    shadow_var_db2: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be > 0, got {self.nu}")
        if self.shadow_var_db2 < 0:
            raise ValueError(f"shadow variance must be >= 0, got {self.shadow_var_db2}")

    @property
    def shadow_std_db(self) -> float:
        return math.sqrt(self.shadow_var_db2)


PATHLOSS = {
    LinkState.LOS: PathlossParams(mu_db=61.4, nu=2.0, shadow_var_db2=5.8),
    LinkState.NLOS: PathlossParams(mu_db=72.0, nu=2.92, shadow_var_db2=8.7),
}


@dataclass(frozen=True)
class UserDrop:
    distance_m: Meters
    link_state: LinkState
    shadowing_db: Db
    pathloss_db: Db
    omni_snr_db: Db


def los_probability(d):
    """Probability that a link of length ``d`` metres is line-of-sight."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    p = np.exp(-d / LOS_DECAY_M)
    return float(p) if p.ndim == 0 else p


def pathloss_db(d, state: LinkState, shadowing_db=0.0, params: dict | None = None):
    """Omni pathloss ``mu + 10 nu log10(d) + zeta`` in dB."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    p = (params or PATHLOSS)[state]
    pl = p.mu_db + 10.0 * p.nu * np.log10(d) + np.asarray(shadowing_db, dtype=float)
    return float(pl) if pl.ndim == 0 else pl


def noise_power_dbm(nf_db: Db, bandwidth_hz: Hz, kt_dbm_per_hz: float = -174.0) -> Dbm:
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be > 0")
    return Dbm(kt_dbm_per_hz + nf_db + 10.0 * math.log10(bandwidth_hz))


def omni_snr_db(p_tx_dbm, pathloss, nf_db: Db, bandwidth_hz: Hz, kt_dbm_per_hz: float = -174.0):
    return p_tx_dbm - pathloss - noise_power_dbm(nf_db, bandwidth_hz, kt_dbm_per_hz)


def received_power_dbm(p_tx_dbm: Dbm, pathloss: Db) -> Dbm:
    return Dbm(p_tx_dbm - pathloss)


def cell_edge_rx_power_dbm(cfg: ScenarioConfig) -> Dbm:
    """Received power at the cell radius on an unshadowed NLOS link, from the EIRP."""
    eirp = cfg.eirp_dbm if cfg.eirp_dbm is not None else cfg.tx_power_dbm
    return received_power_dbm(eirp, pathloss_db(cfg.cell_radius_m, LinkState.NLOS))


@dataclass(frozen=True)
class SnrDistribution:
    """Drops of one Monte Carlo run, in drop order, plus sorted SNRs."""

    distance_m: np.ndarray
    is_los: np.ndarray
    shadowing_db: np.ndarray
    pathloss_db: np.ndarray
    snr_db: np.ndarray

    @property
    def n(self) -> int:
        return len(self.snr_db)

    @property
    def sorted_snr_db(self) -> np.ndarray:
        return np.sort(self.snr_db)

    def percentile(self, pct: float) -> float:
        """Nearest-rank percentile of the omni SNR, ``0 < pct <= 100``."""
        if not 0 < pct <= 100:
            raise ValueError("percentile must be in (0, 100]")
        rank = max(1, math.ceil(pct / 100.0 * self.n))
        return float(self.sorted_snr_db[rank - 1])

    @property
    def cell_edge_snr_db(self) -> float:
        return self.percentile(1.0)

    @property
    def median_snr_db(self) -> float:
        return self.percentile(50.0)

    def drop(self, i: int) -> UserDrop:
        return UserDrop(
            distance_m=Meters(float(self.distance_m[i])),
            link_state=LinkState.LOS if self.is_los[i] else LinkState.NLOS,
            shadowing_db=Db(float(self.shadowing_db[i])),
            pathloss_db=Db(float(self.pathloss_db[i])),
            omni_snr_db=Db(float(self.snr_db[i])),
        )

    def empirical_cdf(self, x) -> np.ndarray:
        return np.searchsorted(self.sorted_snr_db, np.asarray(x, dtype=float), side="right") / self.n


def _drop_block(seed: int, block: int, n: int, radius: float, params: dict) -> tuple[np.ndarray, ...]:
    rng = streams.substream(seed, streams.TAG_CHANNEL, block)
    u_r, u_los, z = rng.random(n), rng.random(n), rng.standard_normal(n)
    d = np.maximum(radius * np.sqrt(u_r), MIN_DROP_DISTANCE_M)
    is_los = u_los < np.exp(-d / LOS_DECAY_M)
    los, nlos = params[LinkState.LOS], params[LinkState.NLOS]
    mu = np.where(is_los, los.mu_db, nlos.mu_db)
    nu = np.where(is_los, los.nu, nlos.nu)
    zeta = z * np.where(is_los, los.shadow_std_db, nlos.shadow_std_db)
    return d, is_los, zeta, mu + 10.0 * nu * np.log10(d) + zeta


def snr_distribution(cfg: ScenarioConfig, seed: int | None = None, *, n_drops: int | None = None,
                     params: dict | None = None, workers: int = 1) -> SnrDistribution:
    """Drop users uniformly over the cell disk and compute their omni SNR."""
    seed = cfg.rng_seed if seed is None else seed
    n = cfg.n_drops if n_drops is None else n_drops
    if n < 1:
        raise ValueError("n_drops must be >= 1")
    params = params or PATHLOSS
    jobs = [(seed, b, stop - start, cfg.cell_radius_m, params) for b, start, stop in streams.blocks(n, DROP_BLOCK)]
    parts = streams.map_blocks(_drop_block, jobs, workers)
    d, is_los, zeta, pl = (np.concatenate(x) for x in zip(*parts))
    snr = omni_snr_db(cfg.tx_power_dbm, pl, cfg.ue_noise_figure_db, cfg.system_bandwidth_hz,
                      cfg.thermal_noise_dbm_per_hz)
    return SnrDistribution(d, is_los, zeta, pl, snr)
