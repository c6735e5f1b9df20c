"""Planar-array steering vectors, aligned beamforming gain and effective beamspace size."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import ArchitectureKind, ArchitectureSpec, ArrayGeometry, ConfigError
from .units import Db


def _axis_response(n: int, spacing: float, cos_angle: float) -> np.ndarray:
    return np.exp(-2j * np.pi * spacing * np.arange(n) * cos_angle)


def steering_vector(geometry: ArrayGeometry, azimuth: float, elevation: float = math.pi / 2) -> np.ndarray:
    """Array response of a UPA: the Kronecker product of the two linear-array responses.

    Each axis contributes ``exp(-j 2 pi spacing n cos(angle))``; element order is
    azimuth-major.
    """
    a_az = _axis_response(geometry.n_az, geometry.spacing_wavelengths, math.cos(azimuth))
    a_el = _axis_response(geometry.n_el, geometry.spacing_wavelengths, math.cos(elevation))
    return np.kron(a_az, a_el)


def grid_cosines(n: int) -> np.ndarray:
    """Direction cosines of the sectorized grid along one axis, uniform over [-1, 1)."""
    return -1.0 + 2.0 * np.arange(n) / n


def beam_grid(geometry: ArrayGeometry) -> np.ndarray:
    """Steering vectors of every grid direction, shape ``(n_directions, n_elements)``.

    At half-wavelength spacing these are the orthogonal DFT beams.
    """
    az = np.arccos(grid_cosines(geometry.n_az))
    el = np.arccos(grid_cosines(geometry.n_el))
    return np.array([steering_vector(geometry, a, e) for a in az for e in el])


def aligned_bf_gain_db(tx: ArrayGeometry, rx: ArrayGeometry) -> Db:
    """SNR gain when both ends steer exactly along the path."""
    return Db(10.0 * math.log10(tx.n_elements) + 10.0 * math.log10(rx.n_elements))


@dataclass(frozen=True)
class BeamspaceLayout:
    n_dir_tx: int
    n_dir_rx: int
    true_direction: int = 1

    def __post_init__(self):
        if not 1 <= self.true_direction <= self.size:
            raise ValueError(f"true direction {self.true_direction} outside 1..{self.size}")

    @property
    def size(self) -> int:
        return self.n_dir_tx * self.n_dir_rx


def effective_beamspace(rx_arch: ArchitectureSpec | ArchitectureKind, layout: BeamspaceLayout,
                        n_rf_chains: int | None = None) -> int:
    """Number of beam pairs the receiver must visit one at a time."""
    kind = rx_arch.kind if isinstance(rx_arch, ArchitectureSpec) else rx_arch
    if kind is ArchitectureKind.ANALOG:
        return layout.size
    if kind.is_digital:
        return layout.n_dir_tx
    m = n_rf_chains if n_rf_chains is not None else rx_arch.n_rf_chains
    if m < 1 or layout.n_dir_rx % m:
        raise ConfigError("n_rf_chains", m, f"must divide the {layout.n_dir_rx} receiver directions")
    return layout.size // m
