"""Confusion matrices, macro F1, evaluation and development-set grid search."""

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from .classify import (
    BASE_METHODS,
    HIGHER_WINS,
    LOWER_WINS,
    MethodConfig,
    MysteryLine,
    argbest_rows,
    heli_parts,
    order_stats,
    predict,
)
from .corpus import LabeledCorpus
from .errors import EmptyEvaluationSet, LengthMismatch, UnknownPredictedLabel
from .models import FORMAT_VERSION, MAX_ORDER, ModelSet, NGramRange, train

__all__ = [
    "REPORT_VERSION",
    "ConfusionMatrix",
    "ClassMetrics",
    "EvalReport",
    "GridSpec",
    "GridCell",
    "confusion",
    "macro_f1",
    "class_metrics",
    "evaluate",
    "grid_scores",
    "grid_search",
    "select_best",
    "finalize",
]

REPORT_VERSION = 1


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with actual labels on rows and predicted labels on columns."""

    labels: tuple
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64)
        if cells.shape != (len(self.labels), len(self.labels)):
            raise ValueError("matrix shape does not match label count")
        if (cells < 0).any():
            raise ValueError("negative cell count")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "cells", cells)

    def __eq__(self, other):
        return (
            isinstance(other, ConfusionMatrix)
            and self.labels == other.labels
            and np.array_equal(self.cells, other.cells)
        )

    def cell(self, actual, predicted) -> int:
        return int(self.cells[self.labels.index(actual), self.labels.index(predicted)])

    def transpose(self) -> "ConfusionMatrix":
        return ConfusionMatrix(self.labels, self.cells.T)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "cells": self.cells.tolist()}


class ClassMetrics(NamedTuple):
    precision: float
    recall: float
    f1: float
    support: int


def _ratio(num, den):
    return num / den if den else 0.0


def class_metrics(matrix: ConfusionMatrix) -> dict:
    cells = matrix.cells
    diag = np.diag(cells)
    rows = cells.sum(axis=1)
    cols = cells.sum(axis=0)
    out = {}
    for i, label in enumerate(matrix.labels):
        p = _ratio(int(diag[i]), int(cols[i]))
        r = _ratio(int(diag[i]), int(rows[i]))
        f = _ratio(2 * p * r, p + r)
        out[label] = ClassMetrics(p, r, f, int(rows[i]))
    return out


def macro_f1(matrix: ConfusionMatrix) -> float:
    """Unweighted mean of per-class F1 (a class with 0 precision and recall scores 0)."""
    metrics = class_metrics(matrix)
    if not metrics:
        return 0.0
    return sum(m.f1 for m in metrics.values()) / len(metrics)


def confusion(gold, pred, labels=None) -> ConfusionMatrix:
    """Tabulate ``gold`` against ``pred``.

    ``labels`` fixes the label universe and its order; by default it is the
    sorted set of gold labels.
    """
    gold, pred = list(gold), list(pred)
    if len(gold) != len(pred):
        raise LengthMismatch(len(gold), len(pred))
    labels = tuple(labels) if labels is not None else tuple(sorted(set(gold)))
    index = {g: i for i, g in enumerate(labels)}
    cells = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for a, p in zip(gold, pred):
        if p not in index:
            raise UnknownPredictedLabel(p)
        if a not in index:
            raise ValueError(f"gold label {a!r} not in label universe")
        cells[index[a], index[p]] += 1
    return ConfusionMatrix(labels, cells)


@dataclass
class EvalReport:
    matrix: ConfusionMatrix
    per_class: dict
    macro_f1: float
    config: MethodConfig = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_predictions(cls, gold, pred, config=None, meta=None) -> "EvalReport":
        labels = sorted(set(gold) | set(pred))
        matrix = confusion(gold, pred, labels)
        return cls(matrix, class_metrics(matrix), macro_f1(matrix), config, dict(meta or {}))

    def to_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "model_format_version": FORMAT_VERSION,
            "config": self.config.to_dict() if self.config else None,
            "macro_f1": self.macro_f1,
            "per_class": {g: m._asdict() for g, m in self.per_class.items()},
            "confusion": self.matrix.to_dict(),
            **self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def format_table(self) -> str:
        labels = self.matrix.labels
        width = max([5] + [len(g) for g in labels])
        cw = max(5, len(str(int(self.matrix.cells.max(initial=0)))))
        lines = []
        if self.config is not None:
            cfg = self.config
            lines.append(f"method: {cfg.method}  range: {cfg.ngram_range}  penalty: {cfg.penalty}")
        lines.append(f"{'':<{width}}  " + " ".join(f"{g:>{cw}}" for g in labels))
        for g, row in zip(labels, self.matrix.cells):
            lines.append(f"{g:<{width}}  " + " ".join(f"{int(c):>{cw}}" for c in row))
        lines.append("")
        lines.append(f"{'label':<{width}}  {'prec':>7} {'recall':>7} {'f1':>7} {'n':>6}")
        for g, m in self.per_class.items():
            lines.append(
                f"{g:<{width}}  {m.precision:7.4f} {m.recall:7.4f} {m.f1:7.4f} {m.support:6d}"
            )
        lines.append(f"macro F1: {self.macro_f1:.4f}")
        return "\n".join(lines) + "\n"


def _chunks(seq, k):
    k = max(1, min(k, len(seq)))
    size = -(-len(seq) // k)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def predict_lines(lines, models: ModelSet, config: MethodConfig, n_jobs: int = 1) -> list:
    """Predict every line; with ``n_jobs != 1`` contiguous chunks run in worker processes."""
    lines = list(lines)
    if n_jobs == 1 or len(lines) < 2:
        return predict(lines, models, config)
    n = n_jobs if n_jobs > 0 else 1024
    parts = Parallel(n_jobs=n_jobs)(
        delayed(predict)(chunk, models, config) for chunk in _chunks(lines, n)
    )
    return [label for part in parts for label in part]


def evaluate(models: ModelSet, data: LabeledCorpus, config: MethodConfig, n_jobs: int = 1) -> EvalReport:
    if len(data) == 0:
        raise EmptyEvaluationSet()
    pred = predict_lines(data.lines, models, config, n_jobs=n_jobs)
    return EvalReport.from_predictions(data.labels, pred, config)


def finalize(train_set: LabeledCorpus, dev: LabeledCorpus, config: MethodConfig, min_count: int = 1) -> ModelSet:
    """Retrain on train plus dev with the chosen configuration's range."""
    return train(train_set + dev, config.ngram_range, min_count=min_count)


def _frange(start, stop, step, digits):
    n = int(round((stop - start) / step))
    return tuple(round(start + i * step, digits) for i in range(n + 1))


PRODUCT_PENALTIES = _frange(0.5, 7.0, 0.5, 1)
HELI_PENALTIES = _frange(1.0, 2.0, 0.1, 1)


@dataclass(frozen=True)
class GridSpec:
    """Cells to try: every (low, high) in ``orders`` x line option x penalty."""

    orders: tuple
    include_whole_line: tuple = (False,)
    penalties: tuple = (None,)

    def __post_init__(self):
        if not self.orders or not self.include_whole_line or not self.penalties:
            raise ValueError("grid must be non-empty")
        object.__setattr__(self, "orders", tuple(tuple(o) for o in self.orders))

    @classmethod
    def default(cls, method: str, max_order: int = MAX_ORDER, penalties=None) -> "GridSpec":
        orders = tuple((lo, hi) for lo in range(1, max_order + 1) for hi in range(lo, max_order + 1))
        if method == "product":
            return cls(orders, (False,), tuple(penalties or PRODUCT_PENALTIES))
        if method == "heli":
            return cls(orders, (False, True), tuple(penalties or HELI_PENALTIES))
        if method in ("simple", "sum"):
            return cls(orders)
        raise ValueError(f"no default grid for method {method!r}")

    def cells(self, method: str):
        for lo, hi in self.orders:
            for lines in self.include_whole_line:
                for p in self.penalties:
                    yield MethodConfig(method, NGramRange(lo, hi, lines), p)

    def widest(self) -> NGramRange:
        return NGramRange(
            min(lo for lo, _ in self.orders),
            max(hi for _, hi in self.orders),
            any(self.include_whole_line),
        )


class GridCell(NamedTuple):
    config: MethodConfig
    macro_f1: float


def _preference(cell: GridCell):
    cfg = cell.config
    r = cfg.ngram_range
    return (-cell.macro_f1, r.high, r.low, r.include_whole_line, cfg.penalty or 0.0)


def select_best(cells) -> GridCell:
    """Highest macro F1; ties prefer smaller high order, low order, no lines, smaller penalty."""
    return min(cells, key=_preference)


def _f1_of(gold, sorted_labels, winners):
    pred = [sorted_labels[i] for i in winners]
    return EvalReport.from_predictions(gold, pred).macro_f1


def _base_grid(models, dev, method, grid):
    """Score every cell of a simple/sum/product grid from per-order partials.

    Per-order partial scores are computed once per dev line and summed over
    each range in ascending order, matching the scorers' own arithmetic.
    """
    sorted_labels = tuple(sorted(models.labels))
    perm = [models.labels.index(g) for g in sorted_labels]
    orders = list(models.ngram_range.orders)
    n_lines, n_orders, n_labels = len(dev), len(orders), len(perm)
    hits = np.zeros((n_lines, n_orders, n_labels))
    rf = np.zeros((n_lines, n_orders, n_labels))
    neglog = np.zeros((n_lines, n_orders, n_labels))
    misses = np.zeros((n_lines, n_orders, n_labels))
    for i, line in enumerate(dev.lines):
        m = MysteryLine(line)
        for o, n in enumerate(orders):
            s = order_stats(m, models, n)
            hits[i, o] = [s.hits[j] for j in perm]
            rf[i, o] = [s.rel_freq_sum[j] for j in perm]
            neglog[i, o] = [s.neglog_sum[j] for j in perm]
            misses[i, o] = [s.misses[j] for j in perm]

    gold = dev.labels
    cells = []
    for cfg in grid.cells(method):
        lo, hi = cfg.ngram_range.low - orders[0], cfg.ngram_range.high - orders[0]
        total = np.zeros((n_lines, n_labels))
        for o in range(lo, hi + 1):
            if method == "simple":
                total = total + hits[:, o]
            elif method == "sum":
                total = total + rf[:, o]
            else:
                total = total + (neglog[:, o] + cfg.penalty * misses[:, o])
        polarity = LOWER_WINS if method == "product" else HIGHER_WINS
        cells.append(GridCell(cfg, _f1_of(gold, sorted_labels, argbest_rows(total, polarity))))
    return cells


def _heli_range_cells(models, lines, gold, ngram_range, penalties):
    sorted_labels = tuple(sorted(models.labels))
    perm = [models.labels.index(g) for g in sorted_labels]
    n = len(lines)
    seen = np.zeros((n, len(perm)))
    unseen = np.zeros((n, len(perm)))
    k = np.zeros(n)
    for i, line in enumerate(lines):
        s, u, kk = heli_parts(MysteryLine(line), models, ngram_range)
        seen[i] = [s[j] for j in perm]
        unseen[i] = [u[j] for j in perm]
        k[i] = kk
    out = []
    nonzero = k > 0
    for p in penalties:
        scores = np.zeros_like(seen)
        scores[nonzero] = (seen[nonzero] + p * unseen[nonzero]) / k[nonzero, None]
        winners = argbest_rows(scores, LOWER_WINS)
        out.append(GridCell(MethodConfig("heli", ngram_range, p), _f1_of(gold, sorted_labels, winners)))
    return out


def _heli_grid(models, dev, grid, n_jobs):
    ranges = [
        NGramRange(lo, hi, lines) for lo, hi in grid.orders for lines in grid.include_whole_line
    ]
    jobs = (
        delayed(_heli_range_cells)(models, dev.lines, dev.labels, r, grid.penalties)
        for r in ranges
    )
    parts = Parallel(n_jobs=n_jobs)(jobs) if n_jobs != 1 else [
        _heli_range_cells(models, dev.lines, dev.labels, r, grid.penalties) for r in ranges
    ]
    return [cell for part in parts for cell in part]


def grid_scores(
    train_set: LabeledCorpus,
    dev: LabeledCorpus,
    method: str,
    grid: GridSpec = None,
    min_count: int = 1,
    n_jobs: int = 1,
) -> list:
    """Dev macro F1 of every grid cell, in grid enumeration order.

    One model set is trained over the widest range in the grid; narrower
    ranges reuse its count tables.
    """
    if method not in BASE_METHODS + ("heli",):
        raise ValueError(f"cannot grid-search method {method!r}")
    if len(dev) == 0:
        raise EmptyEvaluationSet()
    grid = grid or GridSpec.default(method)
    models = train(train_set, grid.widest(), min_count=min_count)
    if method == "heli":
        return _heli_grid(models, dev, grid, n_jobs)
    return _base_grid(models, dev, method, grid)


def grid_search(
    train_set: LabeledCorpus,
    dev: LabeledCorpus,
    method: str,
    grid: GridSpec = None,
    min_count: int = 1,
    n_jobs: int = 1,
):
    """Best dev configuration and its report.

    Ties on macro F1 prefer the smaller high order, then the smaller low
    order, no whole-line features, then the smaller penalty. For
    ``method="ensemble"`` each member method is tuned on its own default
    grid (or ``grid``) and the combined vote is reported.
    """
    if method == "ensemble":
        members = tuple(
            grid_search(train_set, dev, m, grid, min_count=min_count, n_jobs=n_jobs)[0]
            for m in BASE_METHODS
        )
        best = MethodConfig("ensemble", members=members)
    else:
        cells = grid_scores(train_set, dev, method, grid, min_count=min_count, n_jobs=n_jobs)
        best = select_best(cells).config
    models = train(train_set, best.ngram_range, min_count=min_count)
    return best, evaluate(models, dev, best, n_jobs=n_jobs)
