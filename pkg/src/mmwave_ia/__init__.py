"""Beam-discovery latency and energy of mmWave receiver front-ends during initial access."""

from .scenario import (
    ArchitectureKind,
    ArchitectureSpec,
    ArrayGeometry,
    ConfigError,
    ScenarioConfig,
    default_config,
    load_config,
    reference_architectures,
)

__version__ = "0.1.0"

__all__ = [
    "ArchitectureKind",
    "ArchitectureSpec",
    "ArrayGeometry",
    "ConfigError",
    "ScenarioConfig",
    "default_config",
    "load_config",
    "reference_architectures",
]
