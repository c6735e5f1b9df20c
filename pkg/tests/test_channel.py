import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmwave_ia.channel import (
    DROP_BLOCK,
    PATHLOSS,
    LinkState,
    PathlossParams,
    cell_edge_rx_power_dbm,
    los_probability,
    omni_snr_db,
    pathloss_db,
    snr_distribution,
)
from mmwave_ia.scenario import default_config

# Seed 2019, 10 000 drops. Frozen once; the independent sampler below
# confirms them to within its own Monte Carlo spread.
GOLDEN_CELL_EDGE_DB = -23.59197848668626
GOLDEN_MEDIAN_DB = -9.870311615079132


def test_los_probability():
    assert los_probability(0) == 1.0
    assert los_probability(67.1) == pytest.approx(math.exp(-1), rel=1e-12)
    assert los_probability(200) == pytest.approx(0.0507, abs=1e-4)
    with pytest.raises(ValueError):
        los_probability(-1)


@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_los_probability_monotone(a, b):
    lo, hi = sorted((a, b))
    assert 0 <= los_probability(hi) <= los_probability(lo) <= 1


def test_pathloss_examples():
    assert pathloss_db(100, LinkState.LOS) == pytest.approx(101.4)
    assert pathloss_db(100, LinkState.NLOS) == pytest.approx(130.4)
    assert pathloss_db(100, LinkState.NLOS, shadowing_db=3.0) == pytest.approx(133.4)
    with pytest.raises(ValueError):
        pathloss_db(0, LinkState.LOS)


@given(st.floats(0.1, 1e4), st.floats(0.1, 1e4), st.sampled_from(list(LinkState)))
def test_pathloss_increasing(a, b, state):
    if a == b:
        return
    lo, hi = sorted((a, b))
    assert pathloss_db(hi, state) > pathloss_db(lo, state)


def test_received_power_at_cell_edge():
    assert cell_edge_rx_power_dbm(default_config()) == pytest.approx(-87.4)


def test_omni_snr_examples():
    assert omni_snr_db(30, 130.4, 7, 400e6) == pytest.approx(-19.42, abs=0.01)
    assert omni_snr_db(30, 101.4, 7, 400e6) == pytest.approx(9.58, abs=0.01)
    pl = 30 + 174 - 7 - 10 * math.log10(400e6)
    assert omni_snr_db(30, pl, 7, 400e6) == pytest.approx(0.0, abs=1e-12)


def test_shadowing_std_is_root_of_variance():
    assert PATHLOSS[LinkState.NLOS].shadow_std_db == pytest.approx(math.sqrt(8.7))
    with pytest.raises(ValueError):
        PathlossParams(60, 2, -1)


def test_single_drop_deterministic():
    cfg = default_config().replace(n_drops=1)
    a, b = snr_distribution(cfg), snr_distribution(cfg)
    assert a.n == 1
    assert a.drop(0) == b.drop(0)
    assert 1 <= a.distance_m[0] <= 100


def test_golden_percentiles():
    dist = snr_distribution(default_config())
    assert dist.cell_edge_snr_db == GOLDEN_CELL_EDGE_DB
    assert dist.median_snr_db == GOLDEN_MEDIAN_DB
    assert dist.cell_edge_snr_db < dist.median_snr_db


def test_worker_count_does_not_change_drops():
    cfg = default_config().replace(n_drops=20_000)
    a = snr_distribution(cfg, workers=1)
    b = snr_distribution(cfg, workers=3)
    assert np.array_equal(a.snr_db, b.snr_db)
    assert np.array_equal(a.is_los, b.is_los)


def test_whole_blocks_stable_across_drop_counts():
    cfg = default_config()
    a = snr_distribution(cfg, n_drops=2 * DROP_BLOCK)
    b = snr_distribution(cfg, n_drops=9000)
    assert np.array_equal(a.snr_db, b.snr_db[:2 * DROP_BLOCK])


def test_nearest_rank_percentile():
    dist = snr_distribution(default_config(), n_drops=100)
    s = np.sort(dist.snr_db)
    assert dist.percentile(1) == s[0]
    assert dist.percentile(50) == s[49]
    assert dist.percentile(100) == s[-1]
    assert dist.empirical_cdf(s[-1]) == 1.0
    with pytest.raises(ValueError):
        dist.percentile(0)


def _oracle_snr(n, seed):
    """Independent sampler: stdlib RNG, rejection sampling on the disk."""
    rng = random.Random(seed)
    cfg = default_config()
    noise = -174 + 7 + 10 * math.log10(400e6)
    out = []
    while len(out) < n:
        x, y = rng.uniform(-100, 100), rng.uniform(-100, 100)
        r = math.hypot(x, y)
        if r > 100:
            continue
        r = max(r, 1.0)
        if rng.random() < math.exp(-r / 67.1):
            mu, nu, var = 61.4, 2.0, 5.8
        else:
            mu, nu, var = 72.0, 2.92, 8.7
        pl = mu + 10 * nu * math.log10(r) + rng.gauss(0, math.sqrt(var))
        out.append(cfg.tx_power_dbm - pl - noise)
    out.sort()
    return out[math.ceil(0.01 * n) - 1], out[math.ceil(0.5 * n) - 1]


def test_independent_sampler_agrees():
    n = 100_000
    edge, median = _oracle_snr(n, seed=7)
    dist = snr_distribution(default_config(), n_drops=n)
    assert abs(dist.cell_edge_snr_db - edge) < 0.5
    assert abs(dist.median_snr_db - median) < 0.5
    assert abs(GOLDEN_CELL_EDGE_DB - edge) < 0.5
    assert abs(GOLDEN_MEDIAN_DB - median) < 0.5


def test_shadowing_moments():
    dist = snr_distribution(default_config(), n_drops=200_000, seed=11)
    for state, mask in ((LinkState.LOS, dist.is_los), (LinkState.NLOS, ~dist.is_los)):
        z = dist.shadowing_db[mask]
        var = PATHLOSS[state].shadow_var_db2
        assert abs(z.mean()) < 3 * math.sqrt(var / len(z))
        assert z.var() == pytest.approx(var, rel=0.05)


def test_zero_shadowing_is_function_of_distance():
    params = {s: PathlossParams(p.mu_db, p.nu, 0.0) for s, p in PATHLOSS.items()}
    dist = snr_distribution(default_config(), n_drops=2000, params=params)
    expected = np.where(
        dist.is_los,
        pathloss_db(dist.distance_m, LinkState.LOS),
        pathloss_db(dist.distance_m, LinkState.NLOS),
    )
    assert np.allclose(dist.pathloss_db, expected)


def test_area_uniform_drops():
    dist = snr_distribution(default_config(), n_drops=50_000, seed=3)
    # under area-uniform placement (d/R)^2 is uniform
    u = (dist.distance_m / 100.0) ** 2
    assert abs(np.mean(u < 0.25) - 0.25) < 0.01
    assert abs(np.mean(u < 0.5) - 0.5) < 0.01
