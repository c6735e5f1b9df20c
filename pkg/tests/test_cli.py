import csv
import io
import json

import pytest

from mmwave_ia import __version__
from mmwave_ia.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_USAGE, run


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_power_table_csv():
    code, out, err = invoke("power-table")
    assert code == EXIT_OK
    table = {r["architecture"]: r for r in rows(out)}
    assert list(table) == ["analog", "hybrid-m2", "digital-high", "digital-low"]
    assert float(table["analog"]["total_mw"]) == pytest.approx(391.97, rel=0.01)
    assert float(table["digital-low"]["adc_mw"]) == pytest.approx(33.28)
    assert "\r" not in out
    manifest = json.loads(err)
    assert manifest["subcommand"] == "power-table"
    assert manifest["tool_version"] == __version__
    assert manifest["seed"] == 2019


def test_delay_table_direct_k():
    code, out, _ = invoke("delay-table", "--k-edge", "3,3,4", "--k-median", "1,1,1")
    assert code == EXIT_OK
    got = [(r["architecture"], r["edge_delay_hi_ms"], r["median_delay_hi_ms"], r["edge_delay_lo_ms"]) for r in rows(out)]
    assert got == [("analog", "960", "320", "645"), ("digital-high", "60", "20", "45"), ("digital-low", "80", "20", "65")]


def test_delay_table_k_count_mismatch_is_config_error():
    code, _, err = invoke("delay-table", "--k-edge", "3,3", "--k-median", "1,1,1")
    assert code == EXIT_CONFIG
    assert "--k-edge" in err


@pytest.mark.parametrize("argv", [
    ("pmd-curve", "--trials", "0"),
    ("pmd-curve", "--trials", "many"),
    ("power-table", "--no-such-flag"),
    ("frobnicate",),
    (),
    ("delay-table", "--k-edge", "3,x,4"),
])
def test_usage_errors(argv, capsys):
    code, _, _ = invoke(*argv)
    assert code == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_help_documents_exit_codes(capsys):
    assert run(["--help"]) == EXIT_OK
    text = capsys.readouterr().out
    for code in ("0", "2", "3", "4"):
        assert f"  {code}  " in text


def test_invalid_config(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("ss_burst_duration_s = 0.025\n")
    code, _, err = invoke("validate-config", "--config", str(p))
    assert code == EXIT_CONFIG
    assert "ss_burst_duration_s" in err


def test_missing_config_is_io_error(tmp_path):
    code, _, err = invoke("power-table", "--config", str(tmp_path / "nope.cfg"))
    assert code == EXIT_IO
    assert "I/O" in err


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = invoke("power-table", "--out", str(blocker))
    assert code == EXIT_IO


def test_out_dir_writes_data_and_manifest(tmp_path):
    code, out, _ = invoke("power-table", "--out", str(tmp_path), "--format", "json")
    assert code == EXIT_OK and out == ""
    data = json.loads((tmp_path / "power-table.json").read_text())
    assert len(data) == 4 and data[0]["architecture"] == "analog"
    assert isinstance(data[0]["total_mw"], float)
    manifest = json.loads((tmp_path / "power-table.manifest.json").read_text())
    assert manifest["outputs"] == [str(tmp_path / "power-table.json")]
    assert manifest["config"]["rng_seed"] == 2019
    assert manifest["wall_clock_s"] >= 0


def test_json_mirrors_csv():
    _, out_csv, _ = invoke("delay-table", "--k-edge", "3,3,4", "--k-median", "1,1,1")
    _, out_json, _ = invoke("delay-table", "--k-edge", "3,3,4", "--k-median", "1,1,1", "--format", "json")
    from_csv = rows(out_csv)
    from_json = json.loads(out_json)
    assert [r["architecture"] for r in from_csv] == [r["architecture"] for r in from_json]
    assert [float(r["edge_delay_hi_ms"]) for r in from_csv] == [r["edge_delay_hi_ms"] for r in from_json]


def test_numeric_headers_carry_units():
    # counts, labels and probabilities
    unitless = {"architecture", "link_state", "operating_point", "drop_id", "K", "k_edge", "k_median",
                "n_rx", "n_trials", "key", "value", "pmd", "stderr", "threshold"}
    for argv in (("power-table",), ("snr-cdf", "--drops", "3"),
                 ("pmd-curve", "--trials", "50", "--snr-points", "2"),
                 ("energy-report", "--n-rx", "4", "--k-edge", "3,3,3", "--k-median", "1,1,1")):
        _, out, _ = invoke(*argv)
        header = out.splitlines()[0].split(",")
        for col in header:
            if col in unitless:
                continue
            assert "_" in col, (argv, col)


def test_six_significant_digits():
    _, out, _ = invoke("snr-cdf", "--drops", "20")
    for r in rows(out):
        for col in ("distance_m", "pathloss_db", "snr_db"):
            digits = r[col].lstrip("-").replace(".", "").split("e")[0].lstrip("0")
            assert len(digits) <= 6


def test_seed_flag_and_env(monkeypatch):
    a = invoke("snr-cdf", "--drops", "5")[1]
    b = invoke("snr-cdf", "--drops", "5", "--seed", "2019")[1]
    c = invoke("snr-cdf", "--drops", "5", "--seed", "1")[1]
    assert a == b != c
    monkeypatch.setenv("MMWAVE_IA_SEED", "1")
    assert invoke("snr-cdf", "--drops", "5")[1] == c


@pytest.mark.parametrize("argv", [
    ("snr-cdf", "--drops", "9000"),
    ("pmd-curve", "--trials", "1200", "--snr-points", "3", "--arch", "digital-low", "--k", "1,2"),
])
def test_byte_identical_across_runs_and_workers(argv):
    first = invoke(*argv)[1]
    assert invoke(*argv)[1] == first
    assert invoke(*argv, "--workers", "3")[1] == first


def test_energy_report_columns_and_values():
    code, out, _ = invoke("energy-report", "--n-rx", "16", "--k-edge", "3,3,4", "--k-median", "1,1,1")
    assert code == EXIT_OK
    table = {(r["operating_point"], r["architecture"]): r for r in rows(out)}
    analog = table[("cell-edge", "analog")]
    assert float(analog["delay_hi_ms"]) == 960
    assert float(analog["energy_hi_mj"]) == pytest.approx(376.3, rel=0.01)
    assert float(table[("cell-edge", "digital-low")]["energy_hi_mj"]) == pytest.approx(19.42, rel=0.01)


def test_burst_only_reduces_energy():
    base = ("energy-report", "--n-rx", "16", "--k-edge", "3,3,4", "--k-median", "1,1,1")
    always = rows(invoke(*base)[1])
    burst = rows(invoke(*base, "--duty-model", "burst-only")[1])
    for a, b in zip(always, burst):
        assert float(b["energy_hi_mj"]) < float(a["energy_hi_mj"])


def test_validate_config_round_trip(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("n_drops = 77\nue_array.n_az = 2\n")
    code, out, _ = invoke("validate-config", "--config", str(p))
    assert code == EXIT_OK
    values = {r["key"]: r["value"] for r in rows(out)}
    assert values["n_drops"] == "77"
    assert values["ue_array.n_az"] == "2"


def test_power_table_overrides():
    _, out, _ = invoke("power-table", "--arch", "digital-low", "--adc-bits", "3", "--n-rx", "8")
    (row,) = rows(out)
    assert (row["architecture"], row["n_rx"], row["adc_bits"]) == ("digital-low", "8", "3")
    assert float(row["adc_mw"]) == pytest.approx(8 * 2 * 65e-15 * 1e9 * 8 * 1e3)
