"""Classifier, imbalance-aware metrics, Wilcoxon tests and the benchmark loop.

The minority class is the positive class throughout.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.stats import rankdata

from .datasets import BinaryDataset, binarize, load_series, znormalize_rows
from .drsnn import squared_distances
from .errors import ContractViolation, DegenerateEvaluationError, ParameterClampWarning
from .methods import oversample
from .pipeline import OhitConfig

log = logging.getLogger(__name__)

METRICS = ("recall", "specificity", "precision", "f1", "gmean", "auc")
COUNTS = ("tp", "fp", "tn", "fn")
EXACT_WILCOXON_MAX_N = 20


@dataclass(frozen=True)
class ScoredPredictions:
    scores: np.ndarray  # fraction of minority neighbors
    labels: np.ndarray  # True = minority
    predictions: np.ndarray

    def __post_init__(self):
        if not (len(self.scores) == len(self.labels) == len(self.predictions)):
            raise ContractViolation("scores, labels and predictions differ in length")
        if not np.all(np.isfinite(self.scores)):
            raise ContractViolation("non-finite scores")


class ConfusionCounts(NamedTuple):
    tp: int
    fp: int
    tn: int
    fn: int


class Metrics(NamedTuple):
    recall: float
    specificity: float
    precision: float
    f1: float
    gmean: float


def _stack(data: BinaryDataset) -> tuple[np.ndarray, np.ndarray]:
    X = np.vstack([data.minority, data.majority])
    y = np.zeros(X.shape[0], dtype=bool)
    y[: data.n_min] = True
    return X, y


def knn_scores(X_train: np.ndarray, y_train: np.ndarray, X_test: np.ndarray, k: int, chunk: int = 1024) -> np.ndarray:
    """Fraction of minority samples among the ``k`` nearest training rows.

    Distance ties go to the lower training index.
    """
    X_train = np.asarray(X_train, dtype=float)
    X_test = np.asarray(X_test, dtype=float)
    y_train = np.asarray(y_train, dtype=bool)
    out = np.empty(X_test.shape[0])
    for start in range(0, X_test.shape[0], chunk):
        D = squared_distances(X_test[start : start + chunk], X_train)
        nn = np.argsort(D, axis=1, kind="stable")[:, :k]
        out[start : start + chunk] = y_train[nn].mean(axis=1)
    return out


def knn_classify(train: BinaryDataset, test: BinaryDataset, k_cls: int = 5) -> ScoredPredictions:
    """k-NN scores for the test set (minority rows first, then majority).

    A score of exactly 0.5 is predicted as minority.
    """
    if train.d != test.d:
        raise ContractViolation(f"train has length {train.d}, test has length {test.d}")
    X, y = _stack(train)
    if k_cls < 1:
        raise ContractViolation(f"k_cls must be >= 1, got {k_cls}")
    if k_cls >= X.shape[0]:
        warnings.warn(f"k_cls={k_cls} >= training size {X.shape[0]}; clamped", ParameterClampWarning, stacklevel=2)
        k_cls = X.shape[0]
    Xt, yt = _stack(test)
    scores = knn_scores(X, y, Xt, k_cls)
    return ScoredPredictions(scores, yt, scores >= 0.5)


def confusion(sp: ScoredPredictions) -> ConfusionCounts:
    y, p = np.asarray(sp.labels, bool), np.asarray(sp.predictions, bool)
    return ConfusionCounts(int(np.sum(y & p)), int(np.sum(~y & p)), int(np.sum(~y & ~p)), int(np.sum(y & ~p)))


def f1_score(precision: float, recall: float) -> float:
    if math.isnan(precision) or precision + recall == 0:
        return math.nan
    return 2.0 * precision * recall / (precision + recall)


def gmean_score(recall: float, specificity: float) -> float:
    return math.sqrt(recall * specificity)


def metrics(c: ConfusionCounts) -> Metrics:
    """Recall, specificity, precision, F1 and G-mean.

    Precision (and with it F1) is NaN when nothing is predicted positive.
    """
    tp, fp, tn, fn = c
    if tp + fn == 0 or tn + fp == 0:
        raise DegenerateEvaluationError(f"test set lacks a class: {c}")
    recall = tp / (tp + fn)
    specificity = tn / (tn + fp)
    precision = tp / (tp + fp) if tp + fp else math.nan
    return Metrics(recall, specificity, precision, f1_score(precision, recall), gmean_score(recall, specificity))


def auc(sp: ScoredPredictions) -> float:
    """ROC AUC as the Mann-Whitney statistic with midranks for ties."""
    y = np.asarray(sp.labels, bool)
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateEvaluationError("AUC needs both classes")
    ranks = rankdata(np.asarray(sp.scores, dtype=float))
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _signed_rank_counts(doubled_ranks: Sequence[int]) -> np.ndarray:
    # counts[w] = number of the 2^n sign patterns whose positive doubled-rank sum is w
    counts = np.zeros(int(sum(doubled_ranks)) + 1, dtype=np.int64)
    counts[0] = 1
    top = 0
    for r in doubled_ranks:
        counts[r : top + r + 1] += counts[: top + 1].copy()
        top += r
    return counts


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided Wilcoxon signed-rank p-value for paired samples.

    Zero differences are dropped. Up to 20 remaining pairs the null
    distribution is counted exactly over all sign patterns (midranks for
    tied magnitudes); beyond that a tie-corrected normal approximation is
    used. Returns 1.0 when every difference is zero.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ContractViolation("paired samples must be 1-D and of equal length")
    d = a - b
    if np.any(np.isnan(d)):
        raise ContractViolation("NaN in paired samples; drop incomplete pairs first")
    d = d[d != 0]
    n = d.size
    if n == 0:
        return 1.0
    ranks = rankdata(np.abs(d))
    if n <= EXACT_WILCOXON_MAX_N:
        r2 = np.rint(2 * ranks).astype(np.int64)
        counts = _signed_rank_counts(r2)
        w = int(r2[d > 0].sum())
        total = float(2**n)
        lower = counts[: w + 1].sum() / total
        upper = counts[w:].sum() / total
        return float(min(1.0, 2.0 * min(lower, upper)))
    w = float(ranks[d > 0].sum())
    mean = n * (n + 1) / 4.0
    _, t = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(t**3 - t)) / 48.0
    if var <= 0:
        return 1.0
    z = (w - mean) / math.sqrt(var)
    return float(min(1.0, math.erfc(abs(z) / math.sqrt(2.0))))


def evaluate(train: BinaryDataset, test: BinaryDataset, k_cls: int = 5) -> dict[str, float]:
    """Fit k-NN on ``train``, score ``test`` and return every metric and count."""
    sp = knn_classify(train, test, k_cls)
    c = confusion(sp)
    out: dict[str, float] = dict(c._asdict())
    out.update(metrics(c)._asdict())
    out["auc"] = auc(sp)
    return out


# --------------------------------------------------------------------- benchmark


@dataclass(frozen=True)
class BenchmarkDataset:
    """One train/test pair; either file paths or in-memory binary views."""

    name: str
    minority_labels: tuple[str, ...] = ()
    train_path: str | None = None
    test_path: str | None = None
    delimiter: str = ","
    train: BinaryDataset | None = field(default=None, repr=False)
    test: BinaryDataset | None = field(default=None, repr=False)

    def load(self) -> tuple[BinaryDataset, BinaryDataset]:
        if self.train is not None and self.test is not None:
            return self.train, self.test
        if not self.train_path or not self.test_path:
            raise ContractViolation(f"{self.name}: no train/test data given")
        tr = binarize(load_series(self.train_path, self.delimiter, self.name), self.minority_labels)
        te = binarize(load_series(self.test_path, self.delimiter, self.name), self.minority_labels)
        return tr, te


@dataclass(frozen=True)
class BenchmarkConfig:
    seeds: tuple[int, ...] = (0,)
    k_cls: int = 5
    eta: int | str = "balance"
    k_smote: int = 5
    ohit: OhitConfig = OhitConfig()
    znormalize: bool = False
    n_jobs: int = 1
    reference: str = "ohit"


@dataclass
class CellResult:
    dataset: str
    method: str
    seed: int
    values: dict[str, float] = field(default_factory=dict)
    error: str | None = None


@dataclass
class EvaluationReport:
    """Per (dataset, method, seed) results, keyed so assembly order is irrelevant."""

    cells: dict[tuple[str, str, int], CellResult] = field(default_factory=dict)

    def add(self, cell: CellResult) -> None:
        self.cells[(cell.dataset, cell.method, cell.seed)] = cell

    @property
    def datasets(self) -> list[str]:
        return list(dict.fromkeys(k[0] for k in self.cells))

    @property
    def methods(self) -> list[str]:
        return list(dict.fromkeys(k[1] for k in self.cells))

    @property
    def errors(self) -> list[CellResult]:
        return [c for c in self.cells.values() if c.error is not None]

    def value(self, dataset: str, method: str, metric: str) -> float:
        """Seed-averaged metric; NaN when any seed is NaN or the cell failed."""
        vals = [
            c.values.get(metric, math.nan) if c.error is None else math.nan
            for (ds, me, _), c in self.cells.items()
            if ds == dataset and me == method
        ]
        return float(np.mean(vals)) if vals else math.nan

    def summary(self) -> dict[str, dict[str, dict[str, float]]]:
        return {
            ds: {me: {m: self.value(ds, me, m) for m in METRICS} for me in self.methods}
            for ds in self.datasets
        }

    def wilcoxon_table(self, reference: str, metrics_: Sequence[str] = ("f1", "gmean", "auc")) -> dict[str, dict[str, float]]:
        """p-values of ``reference`` against every other method, per metric.

        Datasets where either side is NaN are dropped from that pairing.
        """
        table: dict[str, dict[str, float]] = {}
        for other in self.methods:
            if other == reference:
                continue
            row = {}
            for metric in metrics_:
                pairs = [(self.value(ds, reference, metric), self.value(ds, other, metric)) for ds in self.datasets]
                pairs = [(a, b) for a, b in pairs if not (math.isnan(a) or math.isnan(b))]
                if pairs:
                    a, b = zip(*pairs)
                    row[metric] = wilcoxon_signed_rank(a, b)
                else:
                    row[metric] = math.nan
            table[other] = row
        return table

    def method_averages(self, datasets: Iterable[str] | None = None) -> dict[str, dict[str, float]]:
        """Mean of each metric over datasets (NaN cells skipped), per method."""
        names = list(datasets) if datasets is not None else self.datasets
        out = {}
        for me in self.methods:
            row = {}
            for metric in METRICS:
                vals = [self.value(ds, me, metric) for ds in names]
                vals = [v for v in vals if not math.isnan(v)]
                row[metric] = float(np.mean(vals)) if vals else math.nan
            out[me] = row
        return out

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "cells": [
                {
                    "dataset": c.dataset,
                    "method": c.method,
                    "seed": c.seed,
                    "values": {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in c.values.items()},
                    "error": c.error,
                }
                for c in self.cells.values()
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EvaluationReport":
        rep = cls()
        for c in doc["cells"]:
            values = {k: (math.nan if v is None else v) for k, v in c["values"].items()}
            rep.add(CellResult(c["dataset"], c["method"], int(c["seed"]), values, c.get("error")))
        return rep

    def write_json(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def read_json(cls, path: str | os.PathLike) -> "EvaluationReport":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def write_csv(self, path: str | os.PathLike) -> None:
        """Long format: one ``dataset, method, seed, metric, value`` row per entry."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["dataset", "method", "seed", "metric", "value"])
            for c in self.cells.values():
                if c.error is not None:
                    w.writerow([c.dataset, c.method, c.seed, "error", c.error])
                for k, v in c.values.items():
                    w.writerow([c.dataset, c.method, c.seed, k, repr(v) if isinstance(v, float) else v])

    @classmethod
    def read_csv(cls, path: str | os.PathLike) -> "EvaluationReport":
        rep = cls()
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                key = (row["dataset"], row["method"], int(row["seed"]))
                cell = rep.cells.get(key)
                if cell is None:
                    cell = CellResult(*key)
                    rep.add(cell)
                if row["metric"] == "error":
                    cell.error = row["value"]
                elif row["metric"] in COUNTS:
                    cell.values[row["metric"]] = int(row["value"])
                else:
                    cell.values[row["metric"]] = float(row["value"])
        return rep


def _run_cell(ds_name: str, train: BinaryDataset, test: BinaryDataset, method: str, seed: int, cfg: BenchmarkConfig) -> CellResult:
    try:
        out = oversample(method, train, seed=seed, eta=cfg.eta, ohit_cfg=cfg.ohit, k_smote=cfg.k_smote)
        return CellResult(ds_name, method, seed, evaluate(out.data, test, cfg.k_cls))
    except Exception as exc:  # recorded per cell, the run goes on
        log.warning("%s/%s/seed=%d failed: %s", ds_name, method, seed, exc)
        return CellResult(ds_name, method, seed, {}, f"{type(exc).__name__}: {exc}")


def benchmark(datasets: Sequence[BenchmarkDataset], methods: Sequence[str], cfg: BenchmarkConfig = BenchmarkConfig()) -> EvaluationReport:
    """Resample each training set with each method and seed, then evaluate on its test set.

    Failures (unreadable files, degenerate splits, ...) become error cells.
    """
    report = EvaluationReport()
    jobs = []
    for entry in datasets:
        try:
            train, test = entry.load()
            if cfg.znormalize:
                train = BinaryDataset(znormalize_rows(train.minority), znormalize_rows(train.majority), train.minority_labels, train.name)
                test = BinaryDataset(znormalize_rows(test.minority), znormalize_rows(test.majority), test.minority_labels, test.name)
        except Exception as exc:
            for method in methods:
                for seed in cfg.seeds:
                    report.add(CellResult(entry.name, method, seed, {}, f"{type(exc).__name__}: {exc}"))
            continue
        for method in methods:
            for seed in cfg.seeds:
                jobs.append((entry.name, train, test, method, seed))
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(cfg.n_jobs) as pool:
            for cell in pool.map(lambda j: _run_cell(*j, cfg), jobs):
                report.add(cell)
    else:
        for j in jobs:
            report.add(_run_cell(*j, cfg))
    return report


def write_wilcoxon_table(path: str | os.PathLike, table: dict[str, dict[str, float]], reference: str) -> None:
    metrics_ = list(next(iter(table.values())).keys()) if table else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"{reference} vs"] + metrics_)
        for other, row in table.items():
            w.writerow([other] + [repr(row[m]) for m in metrics_])


def write_averages(path: str | os.PathLike, averages: dict[str, dict[str, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["method"] + list(METRICS))
        for me, row in averages.items():
            w.writerow([me] + [f"{row[m]:.4f}" for m in METRICS])
