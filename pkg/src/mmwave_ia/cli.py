"""Command-line entry point: reproduce the power, delay and energy tables as CSV or JSON."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import detector as det
from . import timing_energy as te
from .channel import cell_edge_rx_power_dbm, snr_distribution
from .quantization import gamma_for_bits
from .rfpower import frontend_power
from .scenario import (
    ArchitectureKind,
    ConfigError,
    ScenarioConfig,
    architecture_from_name,
    config_from_mapping,
    config_snapshot,
    load_config,
    reference_architectures,
    ue_geometry,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_IO = 4

DEFAULT_TRIALS = 10_000
TABLE_IV_ARCHS = ("analog", "digital-high", "digital-low")

EPILOG = """\
exit codes:
  0  success
  1  runtime failure (e.g. mis-detection target never met)
  2  usage error (unknown flag, bad value)
  3  invalid configuration
  4  I/O failure (unreadable config, unwritable output)
"""


@dataclass
class RunManifest:
    subcommand: str
    config: dict[str, Any]
    seed: int
    tool_version: str = __version__
    outputs: list[str] = field(default_factory=list)
    wall_clock_s: float = 0.0
    argv: list[str] = field(default_factory=list)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("values must be integers >= 1")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    common.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS,
                        help="Monte Carlo trials per point (default %(default)s)")
    common.add_argument("--out", type=Path, help="write <subcommand>.<fmt> and a manifest here")
    common.add_argument("--workers", type=_positive_int, default=1, help="worker processes")
    common.add_argument("--arch", choices=("analog", "hybrid", "digital-high", "digital-low"))
    common.add_argument("--n-rx", type=_positive_int, help="UE array elements (4, 8 or 16 map to planar layouts)")
    common.add_argument("--adc-bits", type=_positive_int)
    common.add_argument("--duty-model", choices=[m.value for m in te.DutyModel], default="always-on")

    p = _Parser(prog="mmwave-ia", description=__doc__, epilog=EPILOG,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("power-table", parents=[common], help="front-end DC power per architecture")
    s = sub.add_parser("snr-cdf", parents=[common], help="omni SNR of random user drops")
    s.add_argument("--drops", type=_positive_int)
    s = sub.add_parser("pmd-curve", parents=[common], help="mis-detection vs detector SNR")
    s.add_argument("--k", type=_int_list, default=[1, 2, 3], help="sweep counts, e.g. 1,2,3")
    s.add_argument("--snr-min", type=float, default=-10.0)
    s.add_argument("--snr-max", type=float, default=8.0)
    s.add_argument("--snr-points", type=_positive_int, default=10)
    s.add_argument("--mode", choices=("snr", "samples"), default="snr")
    for name in ("delay-table", "energy-report"):
        s = sub.add_parser(name, parents=[common], help=(
            "discovery delay bounds" if name == "delay-table" else "discovery energy per architecture and size"))
        s.add_argument("--k-edge", type=_int_list, help="cell-edge sweeps per architecture, e.g. 3,3,4")
        s.add_argument("--k-median", type=_int_list, help="median-user sweeps per architecture")
    sub.add_parser("validate-config", parents=[common], help="print the resolved configuration")
    return p


# --------------------------------------------------------------------------
# formatting

def _fmt(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return v


def render(header: Sequence[str], rows: Sequence[Sequence[Any]], fmt: str) -> str:
    cells = [[_fmt(v) for v in row] for row in rows]
    if fmt == "json":
        objs = []
        for row in cells:
            obj = {}
            for k, v in zip(header, row):
                obj[k] = float(v) if isinstance(v, str) and _is_number(v) else v
            objs.append(json.dumps(obj))
        return "[\n" + ",\n".join(objs) + "\n]\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(cells)
    return buf.getvalue()


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


# --------------------------------------------------------------------------
# subcommands

def _arch_list(args, cfg: ScenarioConfig, default: Sequence[str]) -> dict:
    if args.arch:
        a = architecture_from_name(args.arch, args.adc_bits, sampling_rate_hz=cfg.sampling_rate_hz)
        return {a.label: a}
    every = reference_architectures(cfg.sampling_rate_hz)
    return {k: every[k] for k in default}


def cmd_power_table(args, cfg):
    archs = _arch_list(args, cfg, list(reference_architectures()))
    n_rx = args.n_rx or cfg.ue_array.n_elements
    p_rx = cell_edge_rx_power_dbm(cfg)
    header = ["architecture", "n_rx", "adc_bits", "rffe_mw", "vga_mw", "adc_mw", "total_mw",
              "sampling_rate_hz", "adc_fom_fj_per_step", "p_rx_dmax_dbm"]
    rows = []
    for a in archs.values():
        b = frontend_power(a, n_rx, p_rx)
        rows.append([b.architecture, n_rx, b.adc_bits, b.rffe_mw, b.vga_mw, b.adc_mw, b.total_mw,
                     a.sampling_rate_hz, a.adc_fom_j_per_step * 1e15, p_rx])
    return header, rows


def cmd_snr_cdf(args, cfg):
    dist = snr_distribution(cfg, n_drops=args.drops, workers=args.workers)
    header = ["drop_id", "distance_m", "link_state", "pathloss_db", "snr_db"]
    rows = [[i, dist.distance_m[i], "LOS" if dist.is_los[i] else "NLOS", dist.pathloss_db[i], dist.snr_db[i]]
            for i in range(dist.n)]
    return header, rows


def cmd_pmd_curve(args, cfg):
    arch = architecture_from_name(args.arch or "analog", args.adc_bits, sampling_rate_hz=cfg.sampling_rate_hz)
    ue = ue_geometry(args.n_rx) if args.n_rx else cfg.ue_array
    n_dirs = det.effective_directions(cfg, arch, ue)
    gamma = gamma_for_bits(arch.adc_bits) if arch.kind is ArchitectureKind.DIGITAL_LOW_RES else 0.0
    grid = np.linspace(args.snr_min, args.snr_max, args.snr_points)
    est = det.misdetection_curve(grid, args.k, det.calibrate_threshold(cfg), n_dirs, args.trials,
                                 cfg.rng_seed, gamma=gamma, mode=args.mode, workers=args.workers)
    header = ["snr_db", "K", "n_trials", "pmd", "stderr", "threshold"]
    return header, [[e.snr_db, e.k, e.n_trials, e.pmd, e.stderr, e.threshold] for e in est]


def _sweep_counts(args, cfg, archs, n_rx):
    """K per architecture at the cell edge and median, given or computed."""
    k_edge, k_median = args.k_edge, args.k_median
    for name, ks in (("--k-edge", k_edge), ("--k-median", k_median)):
        if ks is not None and len(ks) != len(archs):
            raise ConfigError(name, ks, f"need {len(archs)} values, one per architecture")
    if k_edge is None or k_median is None:
        points = te.operating_points(cfg, args.workers)
        def compute(omni):
            return [te.computed_sweeps(cfg, a, n_rx, omni, args.trials, workers=args.workers)
                    for a in archs.values()]
        k_edge = k_edge or compute(points.cell_edge_snr_db)
        k_median = k_median or compute(points.median_snr_db)
    return k_edge, k_median


def cmd_delay_table(args, cfg):
    archs = _arch_list(args, cfg, TABLE_IV_ARCHS)
    n_rx = args.n_rx or cfg.ue_array.n_directions
    k_edge, k_median = _sweep_counts(args, cfg, archs, n_rx)
    header = ["architecture", "n_rx", "k_edge", "k_median", "edge_delay_lo_ms", "edge_delay_hi_ms",
              "median_delay_lo_ms", "median_delay_hi_ms"]
    rows = [[label, n_rx, edge.k, med.k, edge.lower_ms, edge.upper_ms, med.lower_ms, med.upper_ms]
            for label, edge, med in te.delay_table(cfg, archs, k_edge, k_median, n_rx)]
    return header, rows


def cmd_energy_report(args, cfg):
    archs = _arch_list(args, cfg, TABLE_IV_ARCHS)
    duty = te.DutyModel(args.duty_model)
    sizes = [args.n_rx] if args.n_rx else list(te.ARRAY_SIZES)
    reports = []
    for n_rx in sizes:
        k_edge, k_median = _sweep_counts(args, cfg, archs, n_rx)
        for point, ks in (("cell-edge", k_edge), ("median", k_median)):
            for a, k in zip(archs.values(), ks):
                reports.append(te.energy_report(cfg, a, n_rx, k, duty, point))
    reports.sort(key=lambda r: (r.operating_point != "cell-edge", list(archs).index(r.architecture), r.n_rx))
    header = ["operating_point", "architecture", "n_rx", "q_bits", "K", "delay_lo_ms", "delay_hi_ms",
              "power_mw", "energy_lo_mj", "energy_hi_mj"]
    rows = [[r.operating_point, r.architecture, r.n_rx, r.adc_bits, r.k, r.delay.lower_ms, r.delay.upper_ms,
             r.power_mw, r.energy_lo_mj, r.energy_hi_mj] for r in reports]
    return header, rows


def cmd_validate_config(args, cfg):
    snap = config_snapshot(cfg)
    return ["key", "value"], [[k, v if v is not None else "none"] for k, v in snap.items()]


COMMANDS = {
    "power-table": cmd_power_table,
    "snr-cdf": cmd_snr_cdf,
    "pmd-curve": cmd_pmd_curve,
    "delay-table": cmd_delay_table,
    "energy-report": cmd_energy_report,
    "validate-config": cmd_validate_config,
}


def resolve_config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else config_from_mapping({})
    if args.seed is not None:
        cfg = cfg.replace(rng_seed=args.seed)
    return cfg


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    t0 = time.perf_counter()
    try:
        cfg = resolve_config(args)
        header, rows = COMMANDS[args.command](args, cfg)
    except OSError as e:
        print(f"mmwave-ia: I/O error: {e}", file=stderr)
        return EXIT_IO
    except ConfigError as e:
        print(f"mmwave-ia: invalid configuration: {e}", file=stderr)
        return EXIT_CONFIG
    except RuntimeError as e:
        print(f"mmwave-ia: {e}", file=stderr)
        return EXIT_RUNTIME
    text = render(header, rows, args.format)
    manifest = RunManifest(args.command, config_snapshot(cfg), cfg.rng_seed, argv=argv)
    try:
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            path = args.out / f"{args.command}.{args.format}"
            path.write_text(text)
            manifest.outputs.append(str(path))
            manifest.wall_clock_s = time.perf_counter() - t0
            (args.out / f"{args.command}.manifest.json").write_text(json.dumps(asdict(manifest), indent=2) + "\n")
        else:
            stdout.write(text)
            manifest.outputs.append("<stdout>")
            manifest.wall_clock_s = time.perf_counter() - t0
            print(json.dumps(asdict(manifest)), file=stderr)
    except OSError as e:
        print(f"mmwave-ia: I/O error: {e}", file=stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
