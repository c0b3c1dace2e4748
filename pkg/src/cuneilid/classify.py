"""Line scoring and prediction.

Four scorers are provided: simple scoring (count of known n-grams), sum of
relative frequencies, product of relative frequencies (as a sum of negative
log10 relative frequencies with a flat penalty for unseen n-grams), and
HeLI with the whole line treated as a single word. A majority vote over the
first three completes the set.

All n-gram features are used with multiplicity, in window order within an
order and in ascending order across orders.
"""

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import RangeMismatch
from .models import ModelSet, NGramRange

__all__ = [
    "HIGHER_WINS",
    "LOWER_WINS",
    "METHODS",
    "BASE_METHODS",
    "DEFAULT_PRODUCT_PENALTY",
    "DEFAULT_HELI_PENALTY",
    "TIE_RTOL",
    "MethodConfig",
    "MysteryLine",
    "ScoreVector",
    "OrderStats",
    "order_stats",
    "score_simple",
    "score_sum",
    "score_product",
    "score_heli",
    "score",
    "identify",
    "ensemble_vote",
    "predict",
    "argbest",
    "default_ensemble",
]

HIGHER_WINS = "higher_wins"
LOWER_WINS = "lower_wins"

BASE_METHODS = ("simple", "sum", "product")
METHODS = BASE_METHODS + ("heli", "ensemble")
POLARITY = {"simple": HIGHER_WINS, "sum": HIGHER_WINS, "product": LOWER_WINS, "heli": LOWER_WINS}

DEFAULT_PRODUCT_PENALTY = 2.0
DEFAULT_HELI_PENALTY = 1.0

# Scores closer than this (relative to the best score) are ties. Mathematically
# equal products can differ in the last bits once summed as logarithms.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class MethodConfig:
    """Scorer choice and its parameters.

    ``penalty`` is the flat unseen-n-gram charge for ``product`` and the
    penalty multiplier for ``heli``; ``simple`` and ``sum`` ignore it. An
    ``ensemble`` config carries its three member configs in ``members``
    (simple, sum, product) and uses the union of their ranges.
    """

    method: str
    ngram_range: NGramRange = NGramRange(1, 1)
    penalty: float = None
    members: tuple = field(default=())

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.penalty is None:
            default = {"product": DEFAULT_PRODUCT_PENALTY, "heli": DEFAULT_HELI_PENALTY}.get(
                self.method
            )
            object.__setattr__(self, "penalty", default)
        if self.method in ("product", "heli") and not self.penalty > 0:
            raise ValueError("penalty must be positive")
        if self.method == "heli" and self.penalty < 1:
            raise ValueError("HeLI penalty multiplier must be >= 1")
        if self.method == "ensemble":
            methods = tuple(m.method for m in self.members)
            if methods != BASE_METHODS:
                raise ValueError("ensemble members must be simple, sum and product configs")
            ranges = [m.ngram_range for m in self.members]
            union = NGramRange(min(r.low for r in ranges), max(r.high for r in ranges))
            object.__setattr__(self, "ngram_range", union)

    @property
    def polarity(self):
        return POLARITY.get(self.method)

    def to_dict(self) -> dict:
        out = {"method": self.method, "range": str(self.ngram_range), "penalty": self.penalty}
        if self.members:
            out["members"] = [m.to_dict() for m in self.members]
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "MethodConfig":
        members = tuple(cls.from_dict(m) for m in doc.get("members", ()))
        return cls(doc["method"], NGramRange.parse(doc["range"]), doc.get("penalty"), members)

    def with_penalty(self, penalty) -> "MethodConfig":
        return replace(self, penalty=penalty)


def default_ensemble(
    simple_range=NGramRange(1, 10),
    sum_range=NGramRange(3, 15),
    product_range=NGramRange(1, 4),
    product_penalty=DEFAULT_PRODUCT_PENALTY,
) -> MethodConfig:
    """Ensemble of the three base methods at their best CLI-2019 settings."""
    return MethodConfig(
        "ensemble",
        members=(
            MethodConfig("simple", simple_range),
            MethodConfig("sum", sum_range),
            MethodConfig("product", product_range, product_penalty),
        ),
    )


class MysteryLine:
    """A line to identify, with n-gram windows cached per order."""

    __slots__ = ("line", "_windows")

    def __init__(self, line: str):
        self.line = line
        self._windows = {}

    def __len__(self):
        return len(self.line)

    def features(self, n: int) -> tuple:
        """Length-``n`` windows in position order, repeats included."""
        w = self._windows.get(n)
        if w is None:
            line = self.line
            w = self._windows[n] = tuple(line[i:i + n] for i in range(len(line) - n + 1))
        return w


def _mystery(line):
    return line if isinstance(line, MysteryLine) else MysteryLine(line)


@dataclass(frozen=True)
class ScoreVector:
    labels: tuple
    scores: tuple
    polarity: str

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.scores))

    def __getitem__(self, label):
        return self.scores[self.labels.index(label)]

    def best(self) -> str:
        return argbest(self.labels, self.scores, self.polarity)


def argbest_rows(scores: np.ndarray, polarity: str) -> np.ndarray:
    """Winning column per row; columns must already be in tie-break order.

    Among columns within ``TIE_RTOL`` of the row's best score the first one
    wins.
    """
    scores = np.asarray(scores, dtype=np.float64)
    best = scores.max(axis=1) if polarity == HIGHER_WINS else scores.min(axis=1)
    tol = TIE_RTOL * np.maximum(1.0, np.abs(best))
    return np.argmax(np.abs(scores - best[:, None]) <= tol[:, None], axis=1)


def argbest(labels, scores, polarity) -> str:
    """Best label under ``polarity``; ties go to the lexicographically smallest label."""
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    row = np.array([[scores[i] for i in order]], dtype=np.float64)
    return labels[order[int(argbest_rows(row, polarity)[0])]]


def _check_range(models: ModelSet, ngram_range: NGramRange):
    if not models.ngram_range.covers(ngram_range):
        raise RangeMismatch(str(ngram_range), str(models.ngram_range))


class OrderStats(NamedTuple):
    """Per-label partial scores of one line at one n-gram order."""

    hits: list
    rel_freq_sum: list
    neglog_sum: list
    misses: list


def order_stats(mystery: MysteryLine, models: ModelSet, n: int) -> OrderStats:
    """Accumulate, per label, the order-``n`` features of ``mystery``.

    ``neglog_sum`` adds ``-log10`` relative frequencies of seen features;
    unseen ones are only counted in ``misses``.
    """
    labels = models.labels
    k = len(labels)
    hits = [0] * k
    rf = [0.0] * k
    neglog = [0.0] * k
    misses = [0] * k
    windows = mystery.features(n)
    for j, g in enumerate(labels):
        model = models[g]
        table = model.tables[n]
        total = model.totals[n]
        for w in windows:
            c = table.get(w)
            if c:
                r = c / total
                hits[j] += 1
                rf[j] += r
                neglog[j] += -math.log10(r)
            else:
                misses[j] += 1
    return OrderStats(hits, rf, neglog, misses)


def _accumulate(mystery, models, ngram_range, term):
    _check_range(models, ngram_range)
    totals = [0] * len(models)
    for n in ngram_range.orders:
        stats = order_stats(mystery, models, n)
        for j in range(len(totals)):
            totals[j] = totals[j] + term(stats, j)
    return totals


def score_simple(line, models: ModelSet, ngram_range: NGramRange = None) -> ScoreVector:
    """Number of feature occurrences found in each language's tables."""
    ngram_range = ngram_range or models.ngram_range
    totals = _accumulate(_mystery(line), models, ngram_range, lambda s, j: s.hits[j])
    return ScoreVector(models.labels, tuple(float(t) for t in totals), HIGHER_WINS)


def score_sum(line, models: ModelSet, ngram_range: NGramRange = None) -> ScoreVector:
    """Sum of per-order relative frequencies of the line's features."""
    ngram_range = ngram_range or models.ngram_range
    totals = _accumulate(_mystery(line), models, ngram_range, lambda s, j: s.rel_freq_sum[j])
    return ScoreVector(models.labels, tuple(float(t) for t in totals), HIGHER_WINS)


def score_product(
    line, models: ModelSet, ngram_range: NGramRange = None, penalty: float = DEFAULT_PRODUCT_PENALTY
) -> ScoreVector:
    """Negative log10 of the product of relative frequencies; lower is better.

    Each unseen feature costs ``penalty`` instead of ``-log10(0)``.
    """
    if not penalty > 0:
        raise ValueError("penalty must be positive")
    ngram_range = ngram_range or models.ngram_range
    totals = _accumulate(
        _mystery(line), models, ngram_range, lambda s, j: s.neglog_sum[j] + penalty * s.misses[j]
    )
    return ScoreVector(models.labels, tuple(float(t) for t in totals), LOWER_WINS)


def _penalty_logs(models: ModelSet, n) -> list:
    """``log10`` of each language's order-``n`` total, the count-one score.

    A language with no order-``n`` data is charged like the largest model.
    """
    totals = [m.totals[n] for m in models]
    fallback = max(max(totals), 1)
    return [math.log10(t if t else fallback) for t in totals]


def _line_penalty_logs(models: ModelSet) -> list:
    totals = [m.line_total for m in models]
    fallback = max(max(totals), 1)
    return [math.log10(t if t else fallback) for t in totals]


def heli_parts(mystery: MysteryLine, models: ModelSet, ngram_range: NGramRange):
    """Multiplier-independent pieces of the HeLI score.

    Returns ``(seen, unseen, k)`` where, per label, ``seen`` sums
    ``-log10`` relative frequencies of found features, ``unseen`` sums the
    count-one scores of missing ones, and ``k`` is the number of scoring
    features. The score is ``(seen + multiplier * unseen) / k``.
    """
    _check_range(models, ngram_range)
    labels = models.labels
    nl = len(labels)
    seen = [0.0] * nl
    unseen = [0.0] * nl
    line = mystery.line
    ms = [models[g] for g in labels]

    if ngram_range.include_whole_line and line:
        counts = [m.lines.get(line, 0) if m.lines else 0 for m in ms]
        if any(counts):
            logs = _line_penalty_logs(models)
            for j, m in enumerate(ms):
                if counts[j]:
                    seen[j] += -math.log10(counts[j] / m.line_total)
                else:
                    unseen[j] += logs[j]
            return seen, unseen, 1

    high = min(ngram_range.high, len(line))
    low = ngram_range.low
    if high < low:
        return seen, unseen, 0

    pen_logs = {}
    k = 0
    for i in range(len(line) - high + 1):
        k += 1
        for n in range(high, low - 1, -1):
            w = line[i:i + n]
            counts = [m.tables[n].get(w, 0) for m in ms]
            if any(counts):
                break
        else:
            n, counts = low, [0] * nl
        if n not in pen_logs:
            pen_logs[n] = _penalty_logs(models, n)
        for j, m in enumerate(ms):
            c = counts[j]
            if c:
                seen[j] += -math.log10(c / m.totals[n])
            else:
                unseen[j] += pen_logs[n][j]
    return seen, unseen, k


def score_heli(
    line, models: ModelSet, ngram_range: NGramRange = None, penalty_multiplier: float = 1.0
) -> ScoreVector:
    """Mean HeLI score of the line's longest available n-grams; lower is better.

    With whole-line features enabled and the line seen verbatim in some
    language, only the whole-line feature is scored. Otherwise each window
    position of the highest usable order backs off to shorter orders until
    some language knows the n-gram. A language missing a scoring feature
    pays the count-one score times ``penalty_multiplier``.
    """
    if penalty_multiplier < 1:
        raise ValueError("penalty multiplier must be >= 1")
    ngram_range = ngram_range or models.ngram_range
    seen, unseen, k = heli_parts(_mystery(line), models, ngram_range)
    if k == 0:
        scores = tuple(0.0 for _ in seen)
    else:
        scores = tuple((s + penalty_multiplier * u) / k for s, u in zip(seen, unseen))
    return ScoreVector(models.labels, scores, LOWER_WINS)


def score(line, models: ModelSet, config: MethodConfig) -> ScoreVector:
    if config.method == "simple":
        return score_simple(line, models, config.ngram_range)
    if config.method == "sum":
        return score_sum(line, models, config.ngram_range)
    if config.method == "product":
        return score_product(line, models, config.ngram_range, config.penalty)
    if config.method == "heli":
        return score_heli(line, models, config.ngram_range, config.penalty)
    raise ValueError("ensemble configs have no single score vector; use ensemble_vote")


def identify(line, models: ModelSet, config: MethodConfig) -> str:
    """Predicted label of ``line`` under a single-method ``config``."""
    if config.method == "ensemble":
        return ensemble_vote(line, models, config)
    return score(line, models, config).best()


def vote(simple_label, sum_label, product_label) -> str:
    """Majority of three votes; the product vote decides a three-way split."""
    if simple_label == sum_label:
        return simple_label
    return product_label


def ensemble_vote(line, models: ModelSet, config: MethodConfig = None) -> str:
    config = config or default_ensemble()
    mystery = _mystery(line)
    simple_cfg, sum_cfg, product_cfg = config.members
    return vote(
        identify(mystery, models, simple_cfg),
        identify(mystery, models, sum_cfg),
        identify(mystery, models, product_cfg),
    )


def predict(lines, models: ModelSet, config: MethodConfig) -> list:
    return [identify(line, models, config) for line in lines]
