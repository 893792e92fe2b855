"""Loading, writing and binarizing fixed-length labeled series.

Files follow the UCR archive layout: one sample per line, the class label
first, then the ``d`` values of the series, all separated by one delimiter.
Labels are kept as opaque strings so that ``'-1'`` and ``'1'`` never get
coerced into each other.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DataFormatError, DegenerateSplitError, EmptyInputError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LabeledSeriesSet:
    """A raw dataset: ``n`` series of common length ``d`` with string labels."""

    series: np.ndarray
    labels: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        series = np.asarray(self.series, dtype=float)
        if series.ndim != 2 or series.shape[0] < 1 or series.shape[1] < 1:
            raise EmptyInputError(f"{self.name or 'dataset'}: need an (n>=1, d>=1) matrix, got shape {series.shape}")
        if len(self.labels) != series.shape[0]:
            raise DataFormatError(f"{len(self.labels)} labels for {series.shape[0]} series")
        if not np.all(np.isfinite(series)):
            raise DataFormatError(f"{self.name or 'dataset'}: non-finite values")
        object.__setattr__(self, "series", _frozen(series))
        object.__setattr__(self, "labels", tuple(str(t) for t in self.labels))

    @property
    def n(self) -> int:
        return self.series.shape[0]

    @property
    def d(self) -> int:
        return self.series.shape[1]


@dataclass(frozen=True)
class BinaryDataset:
    """Minority/majority view of a dataset.

    ``minority_labels`` records which raw tags were merged into the minority
    class; it is also the tag pool used when synthetic rows are written out.
    """

    minority: np.ndarray
    majority: np.ndarray
    minority_labels: tuple[str, ...] = ("1",)
    name: str = ""

    def __post_init__(self):
        mino = np.asarray(self.minority, dtype=float)
        majo = np.asarray(self.majority, dtype=float)
        if mino.ndim != 2 or majo.ndim != 2:
            raise DataFormatError("minority and majority must be 2-D matrices")
        if mino.shape[0] < 1 or majo.shape[0] < 1:
            raise DegenerateSplitError(
                f"{self.name or 'dataset'}: empty side (n_min={mino.shape[0]}, n_maj={majo.shape[0]})"
            )
        if mino.shape[1] != majo.shape[1]:
            raise DataFormatError(f"series length mismatch: {mino.shape[1]} vs {majo.shape[1]}")
        object.__setattr__(self, "minority", _frozen(mino))
        object.__setattr__(self, "majority", _frozen(majo))
        object.__setattr__(self, "minority_labels", tuple(str(t) for t in self.minority_labels))

    @property
    def d(self) -> int:
        return self.minority.shape[1]

    @property
    def n_min(self) -> int:
        return self.minority.shape[0]

    @property
    def n_maj(self) -> int:
        return self.majority.shape[0]

    def with_minority(self, minority: np.ndarray) -> "BinaryDataset":
        return BinaryDataset(minority, self.majority, self.minority_labels, self.name)


class ClassStats(NamedTuple):
    n_min: int
    n_maj: int
    ir: float


def load_series(path: str | os.PathLike, delimiter: str = ",", name: str | None = None) -> LabeledSeriesSet:
    """Read a UCR-style delimited file into a :class:`LabeledSeriesSet`.

    Blank lines are skipped. Errors name the 1-based line number at fault.
    """
    path = os.fspath(path)
    labels: list[str] = []
    rows: list[list[float]] = []
    d = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(delimiter) if delimiter.strip() else line.split()
            if len(parts) < 2:
                raise DataFormatError(f"{path}:{lineno}: expected a label and at least one value")
            if d is None:
                d = len(parts) - 1
            elif len(parts) - 1 != d:
                raise DataFormatError(
                    f"{path}:{lineno}: ragged row with {len(parts) - 1} values, expected {d}"
                )
            try:
                values = [float(v) for v in parts[1:]]
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: non-numeric value ({exc})") from None
            labels.append(parts[0].strip())
            rows.append(values)
    if not rows:
        raise EmptyInputError(f"{path}: no samples")
    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]
    return LabeledSeriesSet(np.array(rows, dtype=float), tuple(labels), name)


def format_row(label: str, values: Iterable[float], delimiter: str = ",") -> str:
    # repr() of a Python float round-trips bit-exactly through float()
    return delimiter.join([label] + [repr(float(v)) for v in values])


def write_series(path: str | os.PathLike, data: LabeledSeriesSet, delimiter: str = ",") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label, row in zip(data.labels, data.series):
            fh.write(format_row(label, row, delimiter) + "\n")


def binarize(data: LabeledSeriesSet, minority_labels: Iterable[str]) -> BinaryDataset:
    """Split ``data`` into minority (any listed tag) and majority (the rest).

    Row order inside each side follows the source order.
    """
    tags = tuple(dict.fromkeys(str(t).strip() for t in minority_labels))
    if not tags:
        raise DegenerateSplitError("minority_labels is empty")
    mask = np.fromiter((lab in tags for lab in data.labels), dtype=bool, count=data.n)
    n_min = int(mask.sum())
    if n_min == 0 or n_min == data.n:
        raise DegenerateSplitError(
            f"{data.name or 'dataset'}: minority tags {list(tags)} match {n_min} of {data.n} samples"
        )
    return BinaryDataset(data.series[mask], data.series[~mask], tags, data.name)


def class_stats(data: BinaryDataset) -> ClassStats:
    return ClassStats(data.n_min, data.n_maj, data.n_maj / data.n_min)


def znormalize_rows(X: np.ndarray) -> np.ndarray:
    """Per-series z-normalization; constant series map to all zeros."""
    X = np.asarray(X, dtype=float)
    sd = X.std(axis=1, keepdims=True)
    return (X - X.mean(axis=1, keepdims=True)) / np.where(sd > 0, sd, 1.0)


def to_labeled(data: BinaryDataset, majority_label: str = "0", minority_label: str | None = None) -> LabeledSeriesSet:
    """Flatten a binary view back to a labeled set (minority rows first)."""
    tag = minority_label if minority_label is not None else data.minority_labels[0]
    labels = (tag,) * data.n_min + (majority_label,) * data.n_maj
    return LabeledSeriesSet(np.vstack([data.minority, data.majority]), labels, data.name)


@dataclass(frozen=True)
class PublishedDataset:
    """A binarized UCR dataset as used in the original OHIT experiments."""

    name: str
    abbrev: str
    minority_labels: tuple[str, ...]
    length: int
    train_counts: tuple[int, int]
    test_counts: tuple[int, int]
    train_ir: float
    test_ir: float
    multimodal: bool = field(default=False)


def _pub(name, abbrev, tags, length, train, tr_ir, test, te_ir, multimodal=False):
    return PublishedDataset(name, abbrev, tuple(tags), length, train, test, tr_ir, te_ir, multimodal)


# minority/majority counts and imbalance ratios as reported for the OHIT benchmark
PUBLISHED_DATASETS: dict[str, PublishedDataset] = {
    d.name: d
    for d in [
        _pub("Yoga", "Yg", ["1"], 426, (137, 163), 1.19, (1393, 1607), 1.15),
        _pub("Herring", "Hr", ["2"], 512, (25, 39), 1.56, (26, 38), 1.46),
        _pub("Strawberry", "Sb", ["1"], 235, (132, 238), 1.8, (219, 394), 1.8),
        _pub("PhalangesOutlinesCorrect", "POC", ["0"], 80, (628, 1172), 1.87, (332, 526), 1.58),
        _pub("Lighting2", "Lt2", ["-1"], 637, (20, 40), 2.0, (28, 33), 1.18),
        _pub("ProximalPhalanxOutlineCorrect", "PPOC", ["0"], 80, (194, 406), 2.09, (92, 199), 2.16),
        _pub("ECG200", "E200", ["-1"], 96, (31, 69), 2.23, (36, 64), 1.78),
        _pub("Earthquakes", "Eq", ["0"], 512, (35, 104), 2.97, (58, 264), 4.55),
        _pub("Two_Patterns", "TP", ["2"], 128, (237, 763), 3.22, (1011, 2989), 2.96),
        _pub("Car", "Car", ["3"], 577, (11, 49), 4.45, (19, 41), 2.16),
        _pub("ProximalPhalanxOutlineAgeGroup", "PPOA", ["1"], 80, (72, 328), 4.56, (17, 188), 11.06),
        _pub("Wafer", "Wf", ["-1"], 152, (97, 903), 9.3, (665, 5499), 8.27),
        _pub("Worms", "Ws", ["5", "2", "3"], 900, (31, 46), 1.48, (73, 108), 1.48, True),
        _pub("Plane", "Pl", ["3", "5"], 144, (36, 69), 1.92, (54, 51), 0.944, True),
        _pub("Haptics", "Ht", ["1", "5"], 1092, (51, 104), 2.04, (127, 181), 1.43, True),
        _pub("FISH", "FISH", ["4", "5"], 463, (43, 132), 3.07, (57, 118), 2.07, True),
        _pub("UWaveGestureLibraryAll", "UWGLA", ["8", "3"], 945, (206, 690), 3.35, (914, 2668), 2.92, True),
        _pub("InsectWingbeatSound", "IWS", ["1", "2"], 256, (40, 180), 4.5, (360, 1620), 4.5, True),
        _pub("Cricket_Z", "CZ", ["3", "5"], 300, (52, 338), 6.5, (78, 312), 4.0, True),
        _pub("SwedishLeaf", "SL", ["10", "7"], 128, (54, 446), 8.26, (96, 529), 5.51, True),
        _pub("FaceAll", "FA", ["1", "2"], 131, (80, 480), 12.0, (210, 1480), 7.05, True),
        _pub("MedicalImages", "MI", ["5", "6", "8"], 99, (23, 358), 15.57, (69, 691), 10.0, True),
        _pub("ShapesAll", "SA", ["1", "2", "3"], 512, (30, 570), 19.0, (30, 570), 19.0, True),
        _pub("NonInvasiveFatalECG_Thorax1", "NIFT", ["1", "23"], 750, (71, 1729), 24.35, (100, 1865), 18.65, True),
    ]
}


def published(name_or_abbrev: str) -> PublishedDataset:
    key = name_or_abbrev.lower()
    for d in PUBLISHED_DATASETS.values():
        if key in (d.name.lower(), d.abbrev.lower()):
            return d
    raise KeyError(name_or_abbrev)


def split_counts(labels: Sequence[str], minority_labels: Iterable[str]) -> tuple[int, int]:
    tags = set(minority_labels)
    n_min = sum(1 for lab in labels if lab in tags)
    return n_min, len(labels) - n_min
