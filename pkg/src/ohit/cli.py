"""Command-line interface.

Exit codes: 0 success, 1 data or runtime failure, 2 usage or config failure.
Set ``OHIT_LOG_LEVEL`` (e.g. ``DEBUG``) to change log verbosity.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import math
import os
import shutil
import sys
from pathlib import Path

from .datasets import binarize, format_row, load_series, znormalize_rows
from .drsnn import write_labeling
from .errors import OhitError
from .evaluation import (
    METRICS,
    BenchmarkConfig,
    BenchmarkDataset,
    benchmark,
    write_averages,
    write_wilcoxon_table,
)
from .methods import BASE_METHODS, oversample, parse_method
from .pipeline import BALANCE, MODES, OhitConfig
from .shrinkage import write_estimates

log = logging.getLogger("ohit")


class ConfigError(Exception):
    pass


def _eta(value: str) -> int | str:
    if value == BALANCE:
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a count or {BALANCE!r}, got {value!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("eta must be >= 0")
    return n


def _delimiter(value: str) -> str:
    return {"\\t": "\t", "tab": "\t", "comma": ","}.get(value, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ohit", description="Minority oversampling for imbalanced time series.")
    sub = parser.add_subparsers(dest="command", required=True)

    rs = sub.add_parser("resample", help="oversample the minority class of one dataset file")
    rs.add_argument("--input", required=True)
    rs.add_argument("--output", required=True)
    rs.add_argument("--minority", required=True, help="comma-separated minority class tags")
    rs.add_argument("--method", choices=BASE_METHODS, default="ohit")
    rs.add_argument("--mode", choices=MODES, default="full")
    rs.add_argument("--k", type=int)
    rs.add_argument("--kappa", type=int)
    rs.add_argument("--drt", type=float)
    rs.add_argument("--eta", type=_eta, default=BALANCE)
    rs.add_argument("--seed", type=int, default=0)
    rs.add_argument("--k-smote", type=int, default=5)
    rs.add_argument("--delimiter", type=_delimiter, default=",")
    rs.add_argument("--synthetic-label", help="tag for generated rows (default: first minority tag)")
    rs.add_argument("--znormalize", action="store_true", help="z-normalize every series before resampling")
    rs.add_argument("--dump-clusters", help="write the DRSNN labeling here (ohit only)")
    rs.add_argument("--dump-shrinkage", help="write per-cluster intensities here (ohit only)")

    bm = sub.add_parser("benchmark", help="run every method on every dataset listed in a config file")
    bm.add_argument("--config", required=True)
    bm.add_argument("--out-dir", required=True)
    bm.add_argument("--jobs", type=int, default=1)
    return parser


def cmd_resample(args) -> int:
    try:
        cfg = OhitConfig(k=args.k, kappa=args.kappa, drT=args.drt, mode=args.mode, seed=args.seed)
    except OhitError as exc:
        raise ConfigError(str(exc)) from None
    tags = [t for t in args.minority.split(",") if t.strip()]
    raw = load_series(args.input, args.delimiter)
    data = binarize(raw, tags)
    if args.method == "none" and not args.znormalize:
        shutil.copyfile(args.input, args.output)
        print(f"n_min {data.n_min} -> {data.n_min} (method none)")
        return 0

    series = znormalize_rows(raw.series) if args.znormalize else raw.series
    if args.znormalize:
        data = binarize(type(raw)(series, raw.labels, raw.name), tags)
    method = "ohit:" + args.mode if args.method == "ohit" else args.method
    out = oversample(method, data, seed=args.seed, eta=args.eta, ohit_cfg=cfg, k_smote=args.k_smote)

    label = args.synthetic_label or data.minority_labels[0]
    with open(args.output, "w", encoding="utf-8") as fh:
        for lab, row in zip(raw.labels, series):
            fh.write(format_row(lab, row, args.delimiter) + "\n")
        for row in out.synthetic.samples:
            fh.write(format_row(label, row, args.delimiter) + "\n")

    msg = f"n_min {data.n_min} -> {out.data.n_min} (n_maj {data.n_maj}, method {method})"
    if out.ohit is not None:
        lams = [x for x in out.ohit.lambdas if not math.isnan(x)]
        msg += f", m={out.ohit.labeling.m} clusters"
        if lams:
            msg += f", lambda in [{min(lams):.4g}, {max(lams):.4g}]"
        if args.dump_clusters:
            write_labeling(args.dump_clusters, out.ohit.labeling)
        if args.dump_shrinkage:
            write_estimates(args.dump_shrinkage, sorted(out.ohit.estimates.items()))
    print(msg)
    return 0


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def read_benchmark_config(path: str) -> tuple[list[BenchmarkDataset], list[str], BenchmarkConfig]:
    """Parse the INI-style benchmark config (see README for the layout)."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not cp.has_section("benchmark"):
        raise ConfigError(f"{path}: missing [benchmark] section")
    base = Path(path).resolve().parent
    sec = cp["benchmark"]
    try:
        methods = _split(sec.get("methods", "none, ros, smote, ohit"))
        for m in methods:
            parse_method(m)
        seeds = tuple(int(s) for s in _split(sec.get("seeds", "0")))
        eta = sec.get("eta", BALANCE).strip()
        ohit_cfg = OhitConfig(
            k=sec.getint("k", fallback=None),
            kappa=sec.getint("kappa", fallback=None),
            drT=sec.getfloat("drt", fallback=None),
            mode=sec.get("mode", "full"),
        )
        cfg = BenchmarkConfig(
            seeds=seeds,
            k_cls=sec.getint("k_cls", fallback=5),
            eta=eta if eta == BALANCE else int(eta),
            k_smote=sec.getint("k_smote", fallback=5),
            ohit=ohit_cfg,
            znormalize=sec.getboolean("znormalize", fallback=False),
            reference=sec.get("reference", "ohit").strip(),
        )
        default_delim = _delimiter(sec.get("delimiter", ","))
        datasets = []
        for name in cp.sections():
            if not name.startswith("dataset"):
                continue
            ds = cp[name]
            label = name[len("dataset"):].strip() or name
            datasets.append(
                BenchmarkDataset(
                    name=label,
                    minority_labels=tuple(_split(ds["minority"])),
                    train_path=str(base / ds["train"]),
                    test_path=str(base / ds["test"]),
                    delimiter=_delimiter(ds.get("delimiter", default_delim)),
                )
            )
    except (KeyError, ValueError, OhitError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not datasets:
        raise ConfigError(f"{path}: no [dataset ...] sections")
    return datasets, methods, cfg


def cmd_benchmark(args) -> int:
    datasets, methods, cfg = read_benchmark_config(args.config)
    if args.jobs > 1:
        cfg = BenchmarkConfig(**{**cfg.__dict__, "n_jobs": args.jobs})
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = benchmark(datasets, methods, cfg)
    report.write_csv(out / "report.csv")
    report.write_json(out / "report.json")

    summary = report.summary()
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset", "method"] + list(METRICS))
        for ds, per_method in summary.items():
            for me, vals in per_method.items():
                w.writerow([ds, me] + [repr(vals[m]) for m in METRICS])
    if cfg.reference in report.methods:
        write_wilcoxon_table(out / "wilcoxon.csv", report.wilcoxon_table(cfg.reference), cfg.reference)
    write_averages(out / "averages.csv", report.method_averages())
    n_err = len(report.errors)
    print(f"{len(report.datasets)} datasets x {len(report.methods)} methods x {len(cfg.seeds)} seeds; {n_err} error cells; results in {out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("OHIT_LOG_LEVEL", "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on bad flags
    try:
        if args.command == "resample":
            return cmd_resample(args)
        return cmd_benchmark(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OhitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
