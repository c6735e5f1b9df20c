"""DC power of analog, hybrid and fully digital receiver front-ends.

Component models:

* LNA: ``G / (FoM * (NF - 1))`` with gain and noise figure in linear scale.
* ADC: ``FoM * Fs * 2**q`` per converter, two converters (I and Q) per RF chain.
* VGA: ``G_max[dB] * Fs[GHz] / (FoM * A_chip[mm^2])``, where ``G_max`` is the
  gain needed to bring the weakest (cell-edge) signal up to the baseband level.

The VGA expression mixes a dB gain with a GHz rate; that is the form the
published power table was computed with, so it is kept as is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import cell_edge_rx_power_dbm
from .scenario import ArchitectureSpec, ScenarioConfig, reference_architectures
from .units import Db, Dbm, Mw, db_to_linear

ADCS_PER_CHAIN = 2
DEFAULT_P_RX_DMAX_DBM = Dbm(-87.4)


@dataclass(frozen=True)
class PowerBreakdown:
    architecture: str
    n_rx: int
    adc_bits: int
    rffe_mw: Mw
    vga_mw: Mw
    adc_mw: Mw

    @property
    def total_mw(self) -> Mw:
        return Mw(self.rffe_mw + self.vga_mw + self.adc_mw)


def lna_power_mw(gain_db: Db, noise_figure_db: Db, fom_per_mw: float) -> Mw:
    if noise_figure_db <= 0:
        raise ValueError("LNA noise figure must be > 0 dB")
    if math.isinf(fom_per_mw):
        return Mw(0.0)
    return Mw(db_to_linear(gain_db) / (fom_per_mw * (db_to_linear(noise_figure_db) - 1.0)))


def adc_power_mw(fom_j_per_step: float, sampling_rate_hz: float, bits: int) -> Mw:
    """Power of a single converter."""
    if bits < 1:
        raise ValueError("ADC resolution must be >= 1 bit")
    return Mw(fom_j_per_step * sampling_rate_hz * 2.0**bits * 1e3)


def lna_gain_db(arch: ArchitectureSpec) -> Db:
    """LNA gain, raised to cover the phase-shifter loss where there are phase shifters."""
    if arch.kind.has_phase_shifters:
        return Db(arch.lna_gain_db + arch.ps_insertion_loss_db)
    return arch.lna_gain_db


def vga_max_gain_db(arch: ArchitectureSpec, n_rx: int, p_rx_at_dmax_dbm: Dbm = DEFAULT_P_RX_DMAX_DBM) -> Db:
    if n_rx < 1:
        raise ValueError("n_rx must be >= 1")
    net_lna = lna_gain_db(arch)
    if arch.kind.has_phase_shifters:
        net_lna -= arch.ps_insertion_loss_db
    return Db(arch.baseband_out_dbm - 10.0 * math.log10(n_rx) + arch.mixer_insertion_loss_db
              - net_lna - p_rx_at_dmax_dbm)


def vga_power_mw(gain_db: Db, sampling_rate_ghz: float, fom: float, area_mm2: float) -> Mw:
    if fom <= 0 or area_mm2 <= 0:
        raise ValueError("VGA FoM and active area must be > 0")
    return Mw(gain_db * sampling_rate_ghz / (fom * area_mm2))


def frontend_power(arch: ArchitectureSpec, n_rx: int,
                   p_rx_at_dmax_dbm: Dbm = DEFAULT_P_RX_DMAX_DBM) -> PowerBreakdown:
    """Per-component DC power of one receiver front-end."""
    chains = arch.rf_chains(n_rx)
    p_lna = lna_power_mw(lna_gain_db(arch), arch.lna_noise_figure_db, arch.lna_fom_per_mw)
    p_adc = ADCS_PER_CHAIN * adc_power_mw(arch.adc_fom_j_per_step, arch.sampling_rate_hz, arch.adc_bits)
    g_vga = vga_max_gain_db(arch, n_rx, p_rx_at_dmax_dbm)
    p_vga = vga_power_mw(g_vga, arch.sampling_rate_hz / 1e9, arch.vga_fom, arch.vga_active_area_mm2)
    return PowerBreakdown(
        architecture=arch.label,
        n_rx=n_rx,
        adc_bits=arch.adc_bits,
        rffe_mw=Mw(n_rx * p_lna + chains * arch.lo_power_mw),
        vga_mw=Mw(chains * p_vga),
        adc_mw=Mw(chains * p_adc),
    )


def power_table(cfg: ScenarioConfig, archs: dict[str, ArchitectureSpec] | None = None,
                n_rx: int | None = None) -> list[PowerBreakdown]:
    """Rows of the reference power table for the configured UE array."""
    archs = archs or reference_architectures(cfg.sampling_rate_hz)
    n_rx = n_rx or cfg.ue_array.n_elements
    p_rx = cell_edge_rx_power_dbm(cfg)
    return [frontend_power(a, n_rx, p_rx) for a in archs.values()]

