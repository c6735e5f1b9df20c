import pytest
from hypothesis import given, strategies as st

from mmwave_ia import timing_energy as te
from mmwave_ia.rfpower import PowerBreakdown, frontend_power
from mmwave_ia.scenario import (
    ArchitectureKind,
    ConfigError,
    architecture_from_name,
    default_config,
    reference_architectures,
)

T, T_SSB = 0.020, 0.005
CFG = default_config()
ARCHS = reference_architectures()


def test_periods_per_pass():
    assert te.scan_periods_per_pass(ArchitectureKind.ANALOG, 16) == 16
    assert te.scan_periods_per_pass(ArchitectureKind.DIGITAL_HIGH_RES, 16) == 1
    assert te.scan_periods_per_pass(ARCHS["hybrid-m2"], 16) == 8
    with pytest.raises(ConfigError):
        te.scan_periods_per_pass(ArchitectureKind.HYBRID, 16, n_rf_chains=3)


def test_sweep_schedule():
    s = te.sweep_schedule(CFG, ARCHS["analog"], 16)
    assert (s.n_dir_tx, s.periods_per_pass, s.blocks_per_burst) == (64, 16, 32)
    assert te.sweep_schedule(CFG, ARCHS["digital-low"], 16).periods_per_pass == 1
    with pytest.raises(ValueError):
        te.SweepSchedule(T, 0.03, 32, 64, 1)


def test_reference_delay_examples():
    assert te.discovery_delay_bounds(3, 16, T, T_SSB).upper_ms == pytest.approx(960)
    assert te.discovery_delay_bounds(1, 16, T, T_SSB).upper_ms == pytest.approx(320)
    assert te.discovery_delay_bounds(3, 1, T, T_SSB).upper_ms == pytest.approx(60)
    assert te.discovery_delay_bounds(1, 1, T, T_SSB).upper_ms == pytest.approx(20)
    assert te.discovery_delay_bounds(4, 1, T, T_SSB).upper_ms == pytest.approx(80)
    assert te.discovery_delay_bounds(3, 16, T, T_SSB).lower_ms == pytest.approx(645)
    with pytest.raises(ValueError):
        te.discovery_delay_bounds(0, 16, T, T_SSB)


@given(st.integers(1, 20), st.integers(1, 64), st.floats(1e-3, 1.0), st.floats(0.01, 1.0))
def test_delay_bracket(k, periods, period, frac):
    burst = period * frac
    d = te.discovery_delay_bounds(k, periods, period, burst)
    assert 0 < d.lower_s <= d.upper_s
    assert d.upper_s - d.lower_s == pytest.approx(periods * period - burst)


@given(st.integers(1, 10), st.sampled_from([4, 8, 16]))
def test_analog_delay_is_n_times_digital(k, n):
    analog = te.discovery_delay_bounds(k, te.scan_periods_per_pass(ArchitectureKind.ANALOG, n), T, T_SSB)
    digital = te.discovery_delay_bounds(k, te.scan_periods_per_pass(ArchitectureKind.DIGITAL_HIGH_RES, n), T, T_SSB)
    assert analog.upper_s == pytest.approx(n * digital.upper_s)


def test_energy_examples():
    table_row = PowerBreakdown("analog", 16, 10, 257.3, 1.55, 133.12)
    r = te.discovery_energy(table_row, te.discovery_delay_bounds(3, 16, T, T_SSB))
    assert r.energy_hi_mj == pytest.approx(376.3, abs=0.1)
    low = PowerBreakdown("digital-low", 16, 4, 184.7, 24.8, 33.28)
    r = te.discovery_energy(low, te.discovery_delay_bounds(4, 1, T, T_SSB))
    assert r.energy_hi_mj == pytest.approx(19.42, abs=0.01)
    zero = te.DelayBounds(0.0, 0.0, 1)
    assert te.discovery_energy(low, zero).energy_hi_mj == 0.0


@given(st.floats(1, 5000), st.floats(1, 10), st.integers(1, 8))
def test_energy_linear(power, scale, k):
    delay = te.discovery_delay_bounds(k, 16, T, T_SSB)
    p1 = PowerBreakdown("x", 16, 10, power, 0, 0)
    p2 = PowerBreakdown("x", 16, 10, power * scale, 0, 0)
    e1, e2 = te.discovery_energy(p1, delay), te.discovery_energy(p2, delay)
    assert e1.energy_hi_mj == pytest.approx(power * delay.upper_s)
    assert e1.energy_lo_mj == pytest.approx(power * delay.lower_s)
    assert e2.energy_hi_mj == pytest.approx(scale * e1.energy_hi_mj)


def test_burst_only_duty():
    power = frontend_power(ARCHS["analog"], 16)
    delay = te.discovery_delay_bounds(3, 16, T, T_SSB)
    r = te.discovery_energy(power, delay, periods=16, period_s=T, burst_s=T_SSB, duty=te.DutyModel.BURST_ONLY)
    assert r.energy_lo_mj == pytest.approx(power.total_mw * 33 * T_SSB)
    assert r.energy_hi_mj == pytest.approx(power.total_mw * 48 * T_SSB)
    always = te.discovery_energy(power, delay)
    assert r.energy_hi_mj < always.energy_hi_mj
    with pytest.raises(ValueError):
        te.discovery_energy(power, delay, duty=te.DutyModel.BURST_ONLY)


def test_digital_energy_independent_of_direction_count_through_delay():
    for n in (4, 8, 16):
        r = te.energy_report(CFG, ARCHS["digital-high"], n, 2)
        assert r.delay.upper_ms == pytest.approx(40)


def test_delay_table_direct_k():
    archs = {k: ARCHS[k] for k in te.ENERGY_ARCHITECTURES}
    rows = te.delay_table(CFG, archs, (3, 3, 4), (1, 1, 1))
    got = [(label, round(e.upper_ms, 9), round(m.upper_ms, 9)) for label, e, m in rows]
    assert got == [("analog", 960, 320), ("digital-high", 60, 20), ("digital-low", 80, 20)]
    with pytest.raises(ValueError):
        te.delay_table(CFG, archs, (3, 3), (1, 1, 1))


def test_operating_points_use_channel_percentiles():
    pts = te.operating_points(CFG)
    assert pts.cell_edge_snr_db < pts.median_snr_db
    assert [name for name, _ in pts.items()] == ["cell-edge", "median"]


def test_computed_sweeps_at_operating_points():
    pts = te.operating_points(CFG)
    analog = architecture_from_name("analog")
    k_edge = te.computed_sweeps(CFG, analog, 16, pts.cell_edge_snr_db, 4000)
    k_med = te.computed_sweeps(CFG, analog, 16, pts.median_snr_db, 4000)
    assert k_edge > k_med >= 1
    assert te.computed_sweeps(CFG, analog, 16, 30.0, 1000) == 1


def test_computed_sweeps_unreachable():
    with pytest.raises(RuntimeError):
        te.computed_sweeps(CFG, architecture_from_name("analog"), 16, -80.0, 200, k_max=2)


def test_energy_vs_array_size_cross_product():
    pts = te.OperatingPoints(cell_edge_snr_db=-20.0, median_snr_db=0.0)
    reports = te.energy_vs_array_size(CFG, (4, 16), points=pts, n_trials=1000)
    assert len(reports) == 2 * 3 * 2
    by = {(r.operating_point, r.architecture, r.n_rx): r for r in reports}
    assert by[("cell-edge", "analog", 16)].energy_hi_mj > by[("cell-edge", "analog", 4)].energy_hi_mj
