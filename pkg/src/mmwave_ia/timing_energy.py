"""SS-burst timing, discovery-delay bounds and discovery energy."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import detector as det
from .beamspace import BeamspaceLayout, effective_beamspace
from .channel import SnrDistribution, cell_edge_rx_power_dbm, snr_distribution
from .rfpower import PowerBreakdown, frontend_power
from .scenario import (
    ArchitectureKind, ArchitectureSpec, ConfigError, ScenarioConfig, reference_architectures, ue_geometry,
)
from .units import Mj, Seconds

ARRAY_SIZES = (4, 8, 16)
ENERGY_ARCHITECTURES = ("analog", "digital-high", "digital-low")


class DutyModel(enum.Enum):
    ALWAYS_ON = "always-on"
    BURST_ONLY = "burst-only"


@dataclass(frozen=True)
class SweepSchedule:
    burst_period_s: Seconds
    burst_duration_s: Seconds
    blocks_per_burst: int
    n_dir_tx: int
    periods_per_pass: int

    def __post_init__(self):
        if self.periods_per_pass < 1:
            raise ValueError("periods_per_pass must be a positive integer")
        if self.burst_duration_s > self.burst_period_s:
            raise ValueError("burst duration exceeds burst period")


@dataclass(frozen=True)
class DelayBounds:
    lower_s: Seconds
    upper_s: Seconds
    k: int
    pmd_target: float | None = None

    @property
    def lower_ms(self) -> float:
        return self.lower_s * 1e3

    @property
    def upper_ms(self) -> float:
        return self.upper_s * 1e3


@dataclass(frozen=True)
class EnergyReport:
    architecture: str
    n_rx: int
    adc_bits: int
    k: int
    delay: DelayBounds
    power_mw: float
    energy_lo_mj: Mj
    energy_hi_mj: Mj
    operating_point: str = ""
    duty_model: DutyModel = DutyModel.ALWAYS_ON


def scan_periods_per_pass(rx_arch: ArchitectureSpec | ArchitectureKind, n_dir_rx: int,
                          n_rf_chains: int | None = None) -> int:
    """Burst periods needed for the receiver to see every beam pair once."""
    kind = rx_arch.kind if isinstance(rx_arch, ArchitectureSpec) else rx_arch
    if kind is ArchitectureKind.ANALOG:
        return n_dir_rx
    if kind.is_digital:
        return 1
    m = n_rf_chains if n_rf_chains is not None else rx_arch.n_rf_chains
    if m < 1 or n_dir_rx % m:
        raise ConfigError("n_rf_chains", m, f"must divide the {n_dir_rx} receiver directions")
    return n_dir_rx // m


def sweep_schedule(cfg: ScenarioConfig, rx_arch: ArchitectureSpec, n_dir_rx: int) -> SweepSchedule:
    n_dir_tx = cfg.gnb_array.n_directions
    l_eff = effective_beamspace(rx_arch, BeamspaceLayout(n_dir_tx, n_dir_rx))
    return SweepSchedule(
        cfg.ss_burst_period_s, cfg.ss_burst_duration_s, cfg.ss_blocks_per_burst,
        n_dir_tx, l_eff // n_dir_tx,
    )


def discovery_delay_bounds(k: int, periods: int, period_s: float, burst_s: float,
                           pmd_target: float | None = None) -> DelayBounds:
    """Delay to find the true pair when K full passes are needed.

    The pair is seen in the first burst of the K-th pass at best and in its
    last period at worst.
    """
    if k < 1:
        raise ValueError("K must be >= 1")
    return DelayBounds(
        lower_s=Seconds((k - 1) * periods * period_s + burst_s),
        upper_s=Seconds(k * periods * period_s),
        k=k,
        pmd_target=pmd_target,
    )


def on_time_s(delay: DelayBounds, periods: int, period_s: float, burst_s: float,
              duty: DutyModel) -> tuple[float, float]:
    """Front-end on-time for the lower and upper delay bounds."""
    if duty is DutyModel.ALWAYS_ON:
        return delay.lower_s, delay.upper_s
    # awake only while a burst is on air
    bursts_lo = (delay.k - 1) * periods + 1
    bursts_hi = delay.k * periods
    return bursts_lo * burst_s, bursts_hi * burst_s


def discovery_energy(power: PowerBreakdown, delay: DelayBounds, *, periods: int | None = None,
                     period_s: float | None = None, burst_s: float | None = None,
                     duty: DutyModel = DutyModel.ALWAYS_ON, operating_point: str = "") -> EnergyReport:
    """Energy in mJ (mW x s) spent while discovering, for both delay bounds."""
    if duty is DutyModel.ALWAYS_ON:
        t_lo, t_hi = delay.lower_s, delay.upper_s
    else:
        if None in (periods, period_s, burst_s):
            raise ValueError("burst-only duty model needs periods, period_s and burst_s")
        t_lo, t_hi = on_time_s(delay, periods, period_s, burst_s, duty)
    p = power.total_mw
    return EnergyReport(
        architecture=power.architecture, n_rx=power.n_rx, adc_bits=power.adc_bits, k=delay.k,
        delay=delay, power_mw=p, energy_lo_mj=Mj(p * t_lo), energy_hi_mj=Mj(p * t_hi),
        operating_point=operating_point, duty_model=duty,
    )


@dataclass(frozen=True)
class OperatingPoints:
    cell_edge_snr_db: float
    median_snr_db: float

    @classmethod
    def from_distribution(cls, dist: SnrDistribution) -> "OperatingPoints":
        return cls(dist.cell_edge_snr_db, dist.median_snr_db)

    def items(self) -> list[tuple[str, float]]:
        return [("cell-edge", self.cell_edge_snr_db), ("median", self.median_snr_db)]


def operating_points(cfg: ScenarioConfig, workers: int = 1) -> OperatingPoints:
    return OperatingPoints.from_distribution(snr_distribution(cfg, workers=workers))


def computed_sweeps(cfg: ScenarioConfig, arch: ArchitectureSpec, n_rx: int, omni_snr_db: float,
                    n_trials: int, seed: int | None = None, k_max: int = 8, workers: int = 1) -> int:
    """Sweeps needed at an omni SNR, from the Monte Carlo detector."""
    ue = ue_geometry(n_rx, cfg.ue_array.spacing_wavelengths)
    k = det.required_sweeps(
        det.detector_snr_db(omni_snr_db, cfg, ue, arch),
        det.calibrate_threshold(cfg),
        det.effective_directions(cfg, arch, ue),
        cfg.pmd_target, n_trials, cfg.rng_seed if seed is None else seed, k_max, workers,
    )
    if k == det.NOT_REACHED:
        raise RuntimeError(f"{arch.label} at N={n_rx}: mis-detection target not met within {k_max} sweeps")
    return int(k)


def energy_report(cfg: ScenarioConfig, arch: ArchitectureSpec, n_rx: int, k: int,
                  duty: DutyModel = DutyModel.ALWAYS_ON, operating_point: str = "") -> EnergyReport:
    periods = scan_periods_per_pass(arch, n_rx)
    delay = discovery_delay_bounds(k, periods, cfg.ss_burst_period_s, cfg.ss_burst_duration_s, cfg.pmd_target)
    power = frontend_power(arch, n_rx, cell_edge_rx_power_dbm(cfg))
    return discovery_energy(power, delay, periods=periods, period_s=cfg.ss_burst_period_s,
                            burst_s=cfg.ss_burst_duration_s, duty=duty, operating_point=operating_point)


def energy_vs_array_size(cfg: ScenarioConfig, sizes: Iterable[int] = ARRAY_SIZES,
                         architectures: dict[str, ArchitectureSpec] | None = None, *,
                         points: OperatingPoints | None = None, n_trials: int = 10_000,
                         duty: DutyModel = DutyModel.ALWAYS_ON, k_max: int = 8,
                         workers: int = 1) -> list[EnergyReport]:
    """Energy for every (operating point, architecture, array size), K computed per case."""
    if architectures is None:
        every = reference_architectures(cfg.sampling_rate_hz)
        architectures = {k: every[k] for k in ENERGY_ARCHITECTURES}
    points = points or operating_points(cfg, workers)
    out = []
    for name, omni in points.items():
        for arch in architectures.values():
            for n_rx in sizes:
                k = computed_sweeps(cfg, arch, n_rx, omni, n_trials, k_max=k_max, workers=workers)
                out.append(energy_report(cfg, arch, n_rx, k, duty, name))
    return out


def delay_table(cfg: ScenarioConfig, architectures: dict[str, ArchitectureSpec],
                k_edge: Sequence[int], k_median: Sequence[int], n_rx: int | None = None
                ) -> list[tuple[str, DelayBounds, DelayBounds]]:
    """Cell-edge and median delay bounds per architecture for given sweep counts."""
    n_rx = n_rx or cfg.ue_array.n_directions
    if not len(architectures) == len(k_edge) == len(k_median):
        raise ValueError("need one cell-edge and one median K per architecture")
    rows = []
    for arch, ke, km in zip(architectures.values(), k_edge, k_median):
        periods = scan_periods_per_pass(arch, n_rx)
        rows.append((
            arch.label,
            discovery_delay_bounds(ke, periods, cfg.ss_burst_period_s, cfg.ss_burst_duration_s, cfg.pmd_target),
            discovery_delay_bounds(km, periods, cfg.ss_burst_period_s, cfg.ss_burst_duration_s, cfg.pmd_target),
        ))
    return rows
