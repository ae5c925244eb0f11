"""Command-line front end: presets, sweeps, paired runs, file outputs.

Every output file carries the fully resolved scenario as a header comment
(CSV/CDF files) or a metadata block (JSON), so any result can be traced back
to the exact configuration and seed that produced it.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .config import ConfigurationError, DuplexMode, ScenarioConfig, load_scenario
from .engine import (
    CampaignResult,
    Variant,
    paired_variants,
    run_campaign,
    write_reports_csv,
)
from .metrics import (
    DL,
    UL,
    EmpiricalCdf,
    GainTable,
    link_samples,
    slot_sum_samples,
    user_average_samples,
)

TRAFFIC_LEVELS = {"low": 0.1, "medium": 0.5}

_MODE_FLAG = {"hd": DuplexMode.HD_FDD, "dtdd": DuplexMode.DTDD,
              "fd": DuplexMode.FD}


def parse_traffic(text: str) -> float:
    if text in TRAFFIC_LEVELS:
        return TRAFFIC_LEVELS[text]
    try:
        value = float(text.split("=", 1)[1] if text.startswith("custom=")
                      else text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"traffic must be low, medium, a utilization in [0, 1] or "
            f"custom=U, got {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(
            f"utilization must lie in [0, 1], got {value}")
    return value


def parse_sweep(text: str):
    """``key=start:step:stop`` -> (config field, list of values), stop inclusive."""
    try:
        key, rng = text.split("=", 1)
        start, step, stop = (float(x) for x in rng.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"sweep must look like key=start:step:stop, got {text!r}")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("sweep needs step > 0 and stop >= start")
    values = list(np.arange(start, stop + step / 2, step))
    return key, values


def resolve_sweep_field(key: str) -> str:
    """Map a CLI sweep key (dashes allowed, unit suffix optional) to a field."""
    names = {f.name for f in dataclasses.fields(ScenarioConfig)}
    candidate = key.replace("-", "_")
    for name in (candidate, candidate + "_db", candidate + "_hz",
                 candidate + "_m", candidate + "_w"):
        if name in names:
            return name
    raise ConfigurationError(f"unknown sweep key {key!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="duplexsim",
        description="Multi-cell duplexing simulator: HD-FDD vs dynamic TDD "
                    "vs full duplex under cross-link interference.")
    p.add_argument("--scenario", default="uma500",
                   help="preset name (uma500, uma200) or a YAML/JSON file")
    p.add_argument("--mode", default=None, choices=[*_MODE_FLAG, "all"],
                   help="duplexing mode; 'all' runs the 7 paired variants")
    p.add_argument("--bsint", type=int, default=None, metavar="N",
                   help="number of BS-to-BS interference nulls")
    p.add_argument("--traffic", type=parse_traffic, default=None,
                   metavar="{low,medium,U}",
                   help="cell utilization level (low = 0.1, medium = 0.5)")
    p.add_argument("--drops", type=int, default=50, help="user drops")
    p.add_argument("--slots", type=int, default=50, help="slots per drop")
    p.add_argument("--users", type=int, default=None,
                   help="candidate users in the drop pool")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sweep", type=parse_sweep, default=None,
                   metavar="key=start:step:stop",
                   help="repeat the run over a range of one config field")
    p.add_argument("--paired", action="store_true",
                   help="evaluate all 7 algorithm variants on shared randomness")
    p.add_argument("--out", type=Path, required=True, metavar="DIR")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checksums", action="store_true",
                   help="record per-stream checksums in the summary")
    return p


def _apply_flags(cfg: ScenarioConfig, args) -> ScenarioConfig:
    over = {}
    if args.mode and args.mode != "all":
        over["duplex_mode"] = _MODE_FLAG[args.mode]
    if args.bsint is not None:
        over["bsint_nulls"] = args.bsint
    if args.traffic is not None:
        over["utilization"] = args.traffic
    if args.users is not None:
        over["n_users"] = args.users
    if args.seed is not None:
        over["seed"] = args.seed
    return cfg.replace(**over) if over else cfg


def _variants(cfg: ScenarioConfig, args):
    if args.paired or args.mode == "all":
        return paired_variants()
    return [Variant(cfg.duplex_mode, cfg.bsint_nulls)]


def _write_outputs(outdir: Path, cfg: ScenarioConfig, result: CampaignResult,
                   scenario: str | None = None):
    outdir.mkdir(parents=True, exist_ok=True)
    header = f"config: {cfg.to_json()}"
    cdfs_sum, cdfs_ul, cdfs_dl = {}, {}, {}
    for label, reports in result.reports.items():
        write_reports_csv(outdir / f"reports_{label}.csv", reports, label, cfg)
        sums = slot_sum_samples(reports, result.n_drops, result.n_slots)
        cdfs_sum[label] = EmpiricalCdf(sums)
        cdfs_sum[label].write(outdir / f"cdf_sum_{label}.txt", header=header)
        for direction, store in ((UL, cdfs_ul), (DL, cdfs_dl)):
            links = link_samples(reports, direction)
            if links.size:
                store[label] = EmpiricalCdf(links)
                store[label].write(
                    outdir / f"cdf_link_{direction.lower()}_{label}.txt",
                    header=header)
            users = user_average_samples(reports, direction)
            if users.size:
                EmpiricalCdf(users).write(
                    outdir / f"cdf_user_{direction.lower()}_{label}.txt",
                    header=header)

    metadata = {"config": cfg.to_dict(), "seed": cfg.seed,
                "scenario": scenario, "version": _version(),
                "n_drops": result.n_drops, "n_slots": result.n_slots}
    if result.stream_checksums:
        metadata["stream_checksums"] = result.stream_checksums
    rows = GainTable()
    for metric, cdfs in (("sum_throughput", cdfs_sum),
                         ("ul_throughput", cdfs_ul),
                         ("dl_throughput", cdfs_dl)):
        if len(cdfs) >= 2:
            rows.rows.extend(GainTable.from_cdfs(metric, cdfs).rows)
    rows.write(outdir / "gains.json", metadata=metadata)

    for label in result.labels():
        mid = cdfs_sum[label].quantile(0.5) / 1e6
        print(f"{label:12s} median sum throughput {mid:10.2f} Mbit/s")


def run_cli(argv) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_scenario(args.scenario)
        cfg = _apply_flags(cfg, args)
        if args.sweep is None:
            result = run_campaign(cfg, args.drops, args.slots,
                                  variants=_variants(cfg, args),
                                  workers=args.workers,
                                  collect_checksums=args.checksums)
            _write_outputs(args.out, cfg, result, scenario=args.scenario)
        else:
            key, values = args.sweep
            fname = resolve_sweep_field(key)
            for value in values:
                point = cfg.replace(**{fname: value})
                result = run_campaign(point, args.drops, args.slots,
                                      variants=_variants(point, args),
                                      workers=args.workers,
                                      collect_checksums=args.checksums)
                tag = f"{fname}_{value:g}"
                print(f"[sweep {fname} = {value:g}]")
                _write_outputs(args.out / tag, point, result,
                               scenario=args.scenario)
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _version() -> str:
    from . import __version__
    return __version__


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
