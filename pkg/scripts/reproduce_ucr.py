#!/usr/bin/env python3
"""Run the benchmark on the 24 binarized UCR datasets and compare with published OHIT scores.

Not part of the test suite. Needs network access for the first run (or a
directory that already holds the UCR files):

    python scripts/reproduce_ucr.py --data-dir ~/ucr --download --seeds 0,1,2 --out ucr_results

For every dataset the script looks for ``<Name>_TRAIN.tsv``/``_TEST.tsv``
(UCR 2018 layout) or ``_TRAIN.txt``/``_TEST.txt`` (older layout) below
``--data-dir``. Class tags written as floats (``1.0000000e+00``) are mapped
to integer strings before binarization. The output lists our OHIT F1,
G-mean and AUC next to the published values and their differences.

Classifier settings and DRSNN parameters behind the published numbers are
unknown, so the deltas are for inspection only.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

from ohit.datasets import PUBLISHED_DATASETS, LabeledSeriesSet, binarize, load_series, znormalize_rows
from ohit.evaluation import BenchmarkConfig, BenchmarkDataset, benchmark

URL = "https://www.timeseriesclassification.com/aeon-toolkit/{name}.zip"

# archive file names that differ from the catalog names
ARCHIVE_NAMES = {
    "Two_Patterns": "TwoPatterns",
    "Cricket_Z": "CricketZ",
    "Lighting2": "Lightning2",
    "NonInvasiveFatalECG_Thorax1": "NonInvasiveFetalECGThorax1",
}

# published OHIT scores as (F1, G-mean, AUC)
PUBLISHED_OHIT = {
    "Yg": (0.613, 0.642, 0.682), "Hr": (0.466, 0.558, 0.627), "Sb": (0.951, 0.969, 0.992),
    "POC": (0.550, 0.626, 0.665), "Lt2": (0.654, 0.695, 0.706), "PPOC": (0.750, 0.822, 0.899),
    "E200": (0.765, 0.818, 0.901), "Eq": (0.197, 0.396, 0.534), "TP": (0.649, 0.783, 0.860),
    "Car": (0.827, 0.869, 0.934), "PPOA": (0.510, 0.793, 0.910), "Wf": (0.561, 0.808, 0.871),
    "Ws": (0.505, 0.577, 0.571), "Pl": (0.967, 0.967, 0.999), "Ht": (0.629, 0.684, 0.729),
    "FISH": (0.893, 0.913, 0.951), "UWGLA": (0.741, 0.845, 0.911), "IWS": (0.683, 0.850, 0.901),
    "CZ": (0.515, 0.691, 0.814), "SL": (0.787, 0.907, 0.961), "FA": (0.811, 0.900, 0.954),
    "MI": (0.449, 0.780, 0.877), "SA": (0.687, 0.931, 0.936), "NIFT": (0.693, 0.852, 0.973),
}


def _normalize_tag(tag: str) -> str:
    try:
        value = float(tag)
    except ValueError:
        return tag
    return str(int(value)) if value.is_integer() else tag


def _find(data_dir: Path, archive: str, split: str) -> tuple[Path, str] | None:
    for suffix, delim in ((".tsv", "\t"), (".txt", " ")):
        hits = sorted(data_dir.rglob(f"{archive}_{split}{suffix}"))
        if hits:
            return hits[0], delim
    return None


def _download(data_dir: Path, archive: str) -> None:
    target = data_dir / archive
    target.mkdir(parents=True, exist_ok=True)
    print(f"downloading {archive} ...", file=sys.stderr)
    with urllib.request.urlopen(URL.format(name=archive), timeout=120) as resp:
        payload = resp.read()
    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        for member in zf.namelist():
            if member.endswith((".tsv", ".txt")) and ("_TRAIN" in member or "_TEST" in member):
                (target / Path(member).name).write_bytes(zf.read(member))


def _load(path: Path, delim: str, tags: tuple[str, ...], name: str):
    raw = load_series(path, delim, name)
    fixed = LabeledSeriesSet(raw.series, tuple(_normalize_tag(t) for t in raw.labels), name)
    return binarize(fixed, tags)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data-dir", required=True, type=Path)
    ap.add_argument("--download", action="store_true", help="fetch missing datasets")
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--k-cls", type=int, default=5)
    ap.add_argument("--znormalize", action="store_true")
    ap.add_argument("--only", help="comma-separated abbreviations to run")
    ap.add_argument("--out", type=Path, default=Path("ucr_results"))
    args = ap.parse_args(argv)

    wanted = set(args.only.split(",")) if args.only else None
    entries = []
    for d in PUBLISHED_DATASETS.values():
        if wanted and d.abbrev not in wanted:
            continue
        archive = ARCHIVE_NAMES.get(d.name, d.name)
        if args.download and _find(args.data_dir, archive, "TRAIN") is None:
            try:
                _download(args.data_dir, archive)
            except Exception as exc:  # keep going with the rest
                print(f"{d.name}: download failed: {exc}", file=sys.stderr)
        train, test = _find(args.data_dir, archive, "TRAIN"), _find(args.data_dir, archive, "TEST")
        if train is None or test is None:
            print(f"{d.name}: files not found, skipped", file=sys.stderr)
            continue
        try:
            tr = _load(*train, d.minority_labels, d.abbrev)
            te = _load(*test, d.minority_labels, d.abbrev)
        except Exception as exc:
            print(f"{d.name}: {exc}", file=sys.stderr)
            continue
        if (tr.n_min, tr.n_maj) != d.train_counts or (te.n_min, te.n_maj) != d.test_counts:
            print(f"{d.name}: counts {tr.n_min}/{tr.n_maj}, {te.n_min}/{te.n_maj} differ from "
                  f"{d.train_counts}, {d.test_counts}", file=sys.stderr)
        if args.znormalize:
            tr = type(tr)(znormalize_rows(tr.minority), znormalize_rows(tr.majority), tr.minority_labels, tr.name)
            te = type(te)(znormalize_rows(te.minority), znormalize_rows(te.majority), te.minority_labels, te.name)
        entries.append(BenchmarkDataset(d.abbrev, train=tr, test=te))

    if not entries:
        print("no datasets available", file=sys.stderr)
        return 1
    cfg = BenchmarkConfig(seeds=tuple(int(s) for s in args.seeds.split(",")), k_cls=args.k_cls)
    report = benchmark(entries, ["none", "ros", "smote", "ohit"], cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    report.write_csv(args.out / "report.csv")

    metrics = ("f1", "gmean", "auc")
    with open(args.out / "deltas.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset"] + [f"{m}_{kind}" for m in metrics for kind in ("ours", "published", "delta")])
        print(f"{'dataset':8}" + "".join(f"{m:>24}" for m in metrics))
        for entry in entries:
            row, shown = [entry.name], []
            for m, pub in zip(metrics, PUBLISHED_OHIT[entry.name]):
                ours = report.value(entry.name, "ohit", m)
                delta = ours - pub
                row += [f"{ours:.4f}", f"{pub:.3f}", f"{delta:+.4f}"]
                shown.append(f"{ours:.3f} vs {pub:.3f} ({delta:+.3f})")
            w.writerow(row)
            print(f"{entry.name:8}" + "".join(f"{s:>24}" for s in shown))
    print(f"wrote {args.out / 'report.csv'} and {args.out / 'deltas.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
