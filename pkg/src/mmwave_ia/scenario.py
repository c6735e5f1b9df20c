"""Run configuration: cell, NR timing, detector budget and hardware parameters.

A ``ScenarioConfig`` is the single source of truth for a run. Config files are
flat ``key = value`` text with ``#`` comments; array geometries use dotted keys
(``ue_array.n_az = 4``). Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

from .units import Db, Dbm, Hz, Meters, Mw, Seconds

SEED_ENV_VAR = "MMWAVE_IA_SEED"
MAX_SS_BLOCKS_PER_BURST = 32


class ConfigError(ValueError):
    """Invalid configuration value or malformed config file."""

    def __init__(self, key: str, value: Any, reason: str):
        self.key = key
        self.value = value
        self.reason = reason
        super().__init__(f"{key}={value!r}: {reason}")


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array; one beamspace direction per element."""

    n_az: int
    n_el: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        for name in ("n_az", "n_el"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(name, v, "must be an integer >= 1")
        if not self.spacing_wavelengths > 0:
            raise ConfigError("spacing_wavelengths", self.spacing_wavelengths, "must be > 0")

    @property
    def n_elements(self) -> int:
        return self.n_az * self.n_el

    @property
    def n_directions(self) -> int:
        return self.n_elements

    def __str__(self) -> str:
        return f"{self.n_az}x{self.n_el}"


# Planar layouts used for the UE array-size sweep.
UE_LAYOUTS = {4: (2, 2), 8: (4, 2), 16: (4, 4)}


def ue_geometry(n_rx: int, spacing_wavelengths: float = 0.5) -> ArrayGeometry:
    if n_rx in UE_LAYOUTS:
        n_az, n_el = UE_LAYOUTS[n_rx]
    else:
        n_az, n_el = n_rx, 1
    return ArrayGeometry(n_az, n_el, spacing_wavelengths)


@dataclass(frozen=True)
class ScenarioConfig:
    cell_radius_m: Meters = Meters(100.0)
    tx_power_dbm: Dbm = Dbm(30.0)
    eirp_dbm: Dbm | None = Dbm(43.0)
    ue_noise_figure_db: Db = Db(7.0)
    thermal_noise_dbm_per_hz: float = -174.0
    carrier_freq_hz: Hz = Hz(28e9)
    system_bandwidth_hz: Hz = Hz(400e6)
    pss_duration_s: Seconds = Seconds(8.91e-6)
    pss_bandwidth_hz: Hz = Hz(15.24e6)
    subcarrier_spacing_hz: Hz = Hz(120e3)
    ss_burst_period_s: Seconds = Seconds(0.020)
    ss_burst_duration_s: Seconds = Seconds(0.005)
    ss_blocks_per_burst: int = 32
    fa_rate_per_cycle: float = 0.01
    n_pss_sequences: int = 3
    n_freq_offset_hyp: int = 3
    gnb_array: ArrayGeometry = ArrayGeometry(8, 8)
    ue_array: ArrayGeometry = ArrayGeometry(4, 4)
    gnb_rf_chains: int = 2
    lo_error_ppm: float = 10.0
    max_speed_kmh: float = 30.0
    n_drops: int = 10_000
    rng_seed: int = 2019
    # Detector and pipeline settings.
    sampling_rate_hz: Hz = Hz(1e9)
    pss_dimension: int = 127
    pmd_target: float = 0.01
    pss_band_snr_gain: bool = False
    provenance: Mapping[str, str] = field(
        default_factory=lambda: MappingProxyType({}), compare=False, repr=False
    )

    def __post_init__(self):
        validate(self)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


_POSITIVE = (
    "cell_radius_m", "carrier_freq_hz", "system_bandwidth_hz", "pss_duration_s",
    "pss_bandwidth_hz", "subcarrier_spacing_hz", "ss_burst_period_s",
    "ss_burst_duration_s", "sampling_rate_hz",
)


def validate(cfg: ScenarioConfig) -> None:
    """Raise ``ConfigError`` naming the first offending key."""
    for name in _POSITIVE:
        v = getattr(cfg, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(name, v, "must be finite and > 0")
    if cfg.ue_noise_figure_db < 0:
        raise ConfigError("ue_noise_figure_db", cfg.ue_noise_figure_db, "must be >= 0")
    if cfg.ss_burst_duration_s > cfg.ss_burst_period_s:
        raise ConfigError(
            "ss_burst_duration_s", cfg.ss_burst_duration_s,
            f"exceeds ss_burst_period_s={cfg.ss_burst_period_s}",
        )
    if not 1 <= cfg.ss_blocks_per_burst <= MAX_SS_BLOCKS_PER_BURST:
        raise ConfigError("ss_blocks_per_burst", cfg.ss_blocks_per_burst, "must be in [1, 32]")
    if not 0 < cfg.fa_rate_per_cycle < 1:
        raise ConfigError("fa_rate_per_cycle", cfg.fa_rate_per_cycle, "must be in (0, 1)")
    for name in ("n_pss_sequences", "n_freq_offset_hyp", "gnb_rf_chains", "n_drops"):
        if getattr(cfg, name) < 1:
            raise ConfigError(name, getattr(cfg, name), "must be >= 1")
    n_dir_tx = cfg.gnb_array.n_directions
    if n_dir_tx % cfg.gnb_rf_chains:
        raise ConfigError(
            "gnb_rf_chains", cfg.gnb_rf_chains, f"must divide the {n_dir_tx} gNB directions"
        )
    if n_dir_tx > cfg.gnb_rf_chains * cfg.ss_blocks_per_burst:
        raise ConfigError(
            "gnb_array", str(cfg.gnb_array),
            f"{n_dir_tx} directions do not fit in one burst of "
            f"{cfg.ss_blocks_per_burst} blocks x {cfg.gnb_rf_chains} beams",
        )
    if cfg.lo_error_ppm < 0 or cfg.max_speed_kmh < 0:
        raise ConfigError("lo_error_ppm/max_speed_kmh", (cfg.lo_error_ppm, cfg.max_speed_kmh), "must be >= 0")
    if cfg.pss_dimension < 2:
        raise ConfigError("pss_dimension", cfg.pss_dimension, "must be >= 2")
    if not 0 < cfg.pmd_target < 1:
        raise ConfigError("pmd_target", cfg.pmd_target, "must be in (0, 1)")


def default_config() -> ScenarioConfig:
    return ScenarioConfig()


# --------------------------------------------------------------------------
# flat key = value format

_ARRAY_FIELDS = ("gnb_array", "ue_array")
_GEOMETRY_KEYS = ("n_az", "n_el", "spacing_wavelengths")


def _scalar_fields() -> dict[str, dataclasses.Field]:
    return {
        f.name: f for f in dataclasses.fields(ScenarioConfig)
        if f.name not in _ARRAY_FIELDS and f.name != "provenance"
    }


def config_keys() -> list[str]:
    keys = list(_scalar_fields())
    keys += [f"{a}.{k}" for a in _ARRAY_FIELDS for k in _GEOMETRY_KEYS]
    return keys


def _parse_value(key: str, text: str, kind: type) -> Any:
    low = text.strip().lower()
    try:
        if kind is bool:
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(low.replace("_", ""))
        if low in ("none", "null", ""):
            return None
        return float(low.replace("_", ""))
    except ValueError:
        raise ConfigError(key, text, f"cannot parse as {kind.__name__}") from None


def _field_kind(key: str) -> type:
    if "." in key:
        return float if key.endswith("spacing_wavelengths") else int
    default = _scalar_fields()[key].default
    if isinstance(default, bool):
        return bool
    if isinstance(default, int):
        return int
    return float


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse flat config text into ``{key: value}`` without applying defaults."""
    known = set(config_keys())
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", raw, "expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(key, value, "unknown key")
        if key in out:
            raise ConfigError(key, value, "duplicate key")
        out[key] = _parse_value(key, value, _field_kind(key))
    return out


def config_from_mapping(values: Mapping[str, Any], env: Mapping[str, str] | None = None) -> ScenarioConfig:
    """Build a validated config from parsed values, filling built-in defaults."""
    base = ScenarioConfig()
    provenance = {k: "default" for k in config_keys()}
    kwargs: dict[str, Any] = {}
    for key, value in values.items():
        if "." not in key:
            kwargs[key] = value
        provenance[key] = "file"
    for arr in _ARRAY_FIELDS:
        geom = getattr(base, arr)
        parts = {k: values.get(f"{arr}.{k}", getattr(geom, k)) for k in _GEOMETRY_KEYS}
        try:
            kwargs[arr] = ArrayGeometry(**parts)
        except ConfigError as e:
            raise ConfigError(f"{arr}.{e.key}", e.value, e.reason) from None
    env = os.environ if env is None else env
    if env.get(SEED_ENV_VAR):
        kwargs["rng_seed"] = _parse_value(SEED_ENV_VAR, env[SEED_ENV_VAR], int)
        provenance["rng_seed"] = "env"
    return ScenarioConfig(**kwargs, provenance=MappingProxyType(provenance))


def load_config(path: str | os.PathLike, env: Mapping[str, str] | None = None) -> ScenarioConfig:
    text = Path(path).read_text()
    return config_from_mapping(parse_config_text(text), env=env)


def _format_value(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v)


def dump_config(cfg: ScenarioConfig) -> str:
    """Serialize every key; ``parse_config_text`` reads it back exactly."""
    lines = []
    for key in config_keys():
        if "." in key:
            arr, sub = key.split(".")
            v = getattr(getattr(cfg, arr), sub)
        else:
            v = getattr(cfg, key)
        lines.append(f"{key} = {_format_value(v)}")
    return "\n".join(lines) + "\n"


def config_snapshot(cfg: ScenarioConfig) -> dict[str, Any]:
    return parse_config_text(dump_config(cfg))


# --------------------------------------------------------------------------
# receiver architectures

class ArchitectureKind(enum.Enum):
    ANALOG = "analog"
    HYBRID = "hybrid"
    DIGITAL_HIGH_RES = "digital-high"
    DIGITAL_LOW_RES = "digital-low"

    @property
    def is_digital(self) -> bool:
        return self in (ArchitectureKind.DIGITAL_HIGH_RES, ArchitectureKind.DIGITAL_LOW_RES)

    @property
    def has_phase_shifters(self) -> bool:
        return self in (ArchitectureKind.ANALOG, ArchitectureKind.HYBRID)


# 65 fJ/step reproduces every ADC cell of the reference power table;
# 67.6 fJ/step is the datasheet value of the 4-bit flash ADC it cites.
ADC_FOM_TABLE_J = 65e-15
ADC_FOM_FLASH_4BIT_J = 67.6e-15


@dataclass(frozen=True)
class ArchitectureSpec:
    """Receiver front-end kind plus the component parameters of its power model."""

    kind: ArchitectureKind
    adc_bits: int = 10
    n_rf_chains: int = 1  # only meaningful for HYBRID
    lna_gain_db: Db = Db(10.0)
    lna_noise_figure_db: Db = Db(3.0)
    lna_fom_per_mw: float = 6.5
    ps_insertion_loss_db: Db = Db(10.0)
    mixer_insertion_loss_db: Db = Db(6.0)
    adc_fom_j_per_step: float = ADC_FOM_TABLE_J
    vga_fom: float = 5280.0
    vga_active_area_mm2: float = 0.01
    lo_power_mw: Mw = Mw(10.0)
    baseband_out_dbm: Dbm = Dbm(10.0)
    sampling_rate_hz: Hz = Hz(1e9)

    def __post_init__(self):
        if not isinstance(self.adc_bits, int) or self.adc_bits < 1:
            raise ConfigError("adc_bits", self.adc_bits, "must be an integer >= 1")
        for name in ("lna_fom_per_mw", "adc_fom_j_per_step", "vga_fom", "vga_active_area_mm2",
                     "sampling_rate_hz", "lo_power_mw"):
            if not getattr(self, name) > 0:
                raise ConfigError(name, getattr(self, name), "must be > 0")
        for name in ("ps_insertion_loss_db", "mixer_insertion_loss_db"):
            if getattr(self, name) < 0:
                raise ConfigError(name, getattr(self, name), "must be >= 0")
        if self.kind is ArchitectureKind.HYBRID and self.n_rf_chains < 2:
            raise ConfigError("n_rf_chains", self.n_rf_chains, "hybrid needs M >= 2")

    def rf_chains(self, n_rx: int) -> int:
        """RF chains (LO + VGA + ADC pair) for an ``n_rx``-element array."""
        if self.kind is ArchitectureKind.ANALOG:
            return 1
        if self.kind is ArchitectureKind.HYBRID:
            if not 1 < self.n_rf_chains < n_rx:
                raise ConfigError("n_rf_chains", self.n_rf_chains, f"hybrid needs 1 < M < N_RX={n_rx}")
            return self.n_rf_chains
        return n_rx

    @property
    def label(self) -> str:
        if self.kind is ArchitectureKind.HYBRID:
            return f"hybrid-m{self.n_rf_chains}"
        return self.kind.value


def reference_architectures(sampling_rate_hz: float = 1e9, adc_fom_j_per_step: float = ADC_FOM_TABLE_J
                        ) -> dict[str, ArchitectureSpec]:
    """The four front-ends of the reference power table, keyed by label."""
    common = dict(sampling_rate_hz=Hz(sampling_rate_hz), adc_fom_j_per_step=adc_fom_j_per_step)
    archs = [
        ArchitectureSpec(ArchitectureKind.ANALOG, adc_bits=10, **common),
        ArchitectureSpec(ArchitectureKind.HYBRID, adc_bits=10, n_rf_chains=2, **common),
        ArchitectureSpec(ArchitectureKind.DIGITAL_HIGH_RES, adc_bits=10, **common),
        ArchitectureSpec(ArchitectureKind.DIGITAL_LOW_RES, adc_bits=4, **common),
    ]
    return {a.label: a for a in archs}


def architecture_from_name(name: str, adc_bits: int | None = None, n_rf_chains: int = 2,
                           sampling_rate_hz: float = 1e9) -> ArchitectureSpec:
    """Look up ``analog``, ``hybrid``, ``digital-high`` or ``digital-low``."""
    try:
        kind = ArchitectureKind(name)
    except ValueError:
        choices = ", ".join(k.value for k in ArchitectureKind)
        raise ConfigError("arch", name, f"expected one of {choices}") from None
    if adc_bits is None:
        adc_bits = 4 if kind is ArchitectureKind.DIGITAL_LOW_RES else 10
    return ArchitectureSpec(
        kind, adc_bits=adc_bits,
        n_rf_chains=n_rf_chains if kind is ArchitectureKind.HYBRID else 1,
        sampling_rate_hz=Hz(sampling_rate_hz),
    )
