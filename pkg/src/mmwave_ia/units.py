"""Unit-tagged scalar types and the conversions between them.

The tags are ``typing.NewType`` aliases over ``float``: free at runtime, but a
type checker flags a dBm value passed where milliwatts are expected.
"""

from __future__ import annotations

import math
from typing import NewType

import numpy as np

Db = NewType("Db", float)
Dbm = NewType("Dbm", float)
Mw = NewType("Mw", float)
Mj = NewType("Mj", float)
Hz = NewType("Hz", float)
Seconds = NewType("Seconds", float)
Meters = NewType("Meters", float)

SPEED_OF_LIGHT_M_S = 299_792_458.0


def db_to_linear(x_db):
    """Power ratio in dB to linear. Scalars stay scalars; arrays stay arrays."""
    if np.ndim(x_db):
        return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    if np.ndim(x):
        return 10.0 * np.log10(np.asarray(x, dtype=float))
    return Db(10.0 * math.log10(x))


def dbm_to_mw(p_dbm: Dbm) -> Mw:
    return Mw(10.0 ** (p_dbm / 10.0))


def mw_to_dbm(p_mw: Mw) -> Dbm:
    return Dbm(10.0 * math.log10(p_mw))


def kmh_to_ms(v_kmh: float) -> float:
    return v_kmh / 3.6


def s_to_ms(t: Seconds) -> float:
    return t * 1e3
