"""Sign n-gram count models, one per language, and their JSON serialization."""

import json
import re
from collections import Counter
from dataclasses import dataclass, field

from ._io import atomic_write_text
from .corpus import LabeledCorpus
from .errors import (
    CorruptTable,
    EmptyCorpus,
    FormatVersionMismatch,
    OrderOutOfRange,
    RangeMismatch,
)

__all__ = [
    "FORMAT_VERSION",
    "MAX_ORDER",
    "NGramRange",
    "LanguageModel",
    "ModelSet",
    "extract_ngrams",
    "train",
    "relative_frequency",
    "save_models",
    "load_models",
]

FORMAT_VERSION = 1
MAX_ORDER = 15

_RANGE_RE = re.compile(r"^\s*(\d+)\s*(?:-\s*(\d+))?\s*(\+\s*lines)?\s*$")


@dataclass(frozen=True, order=True)
class NGramRange:
    """Inclusive range of n-gram orders, optionally with whole-line features."""

    low: int = 1
    high: int = 1
    include_whole_line: bool = False

    def __post_init__(self):
        if not (1 <= self.low <= self.high <= MAX_ORDER):
            raise ValueError(
                f"invalid n-gram range {self.low}-{self.high}: need 1 <= low <= high <= {MAX_ORDER}"
            )

    @classmethod
    def parse(cls, text: str) -> "NGramRange":
        """Parse ``"L-H"``, ``"L-H+lines"`` or a single order ``"N"``."""
        m = _RANGE_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse n-gram range {text!r}; expected L-H[+lines]")
        low = int(m.group(1))
        high = int(m.group(2)) if m.group(2) else low
        return cls(low, high, bool(m.group(3)))

    @property
    def orders(self) -> range:
        return range(self.low, self.high + 1)

    def covers(self, other: "NGramRange") -> bool:
        return (
            self.low <= other.low
            and other.high <= self.high
            and (self.include_whole_line or not other.include_whole_line)
        )

    def __str__(self):
        return f"{self.low}-{self.high}" + ("+lines" if self.include_whole_line else "")


def extract_ngrams(line: str, n: int) -> Counter:
    """Multiset of the contiguous length-``n`` windows of ``line`` (no padding)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Counter(line[i:i + n] for i in range(len(line) - n + 1))


@dataclass
class LanguageModel:
    """Count tables of one language.

    ``tables[n]`` maps each n-gram string to its count; ``totals[n]`` is the
    sum of that table. ``lines`` holds whole-line counts, or ``None``.
    """

    language: str
    tables: dict = field(default_factory=dict)
    totals: dict = field(default_factory=dict)
    lines: dict = None

    @property
    def line_total(self) -> int:
        return sum(self.lines.values()) if self.lines else 0

    def count(self, ngram: str) -> int:
        table = self.tables.get(len(ngram))
        return table.get(ngram, 0) if table else 0

    def relative_frequency(self, ngram: str) -> float:
        n = len(ngram)
        if n not in self.tables:
            raise OrderOutOfRange(n, sorted(self.tables))
        c = self.tables[n].get(ngram, 0)
        return c / self.totals[n] if c else 0.0

    def restrict(self, orders, with_lines: bool) -> "LanguageModel":
        return LanguageModel(
            self.language,
            {n: self.tables[n] for n in orders},
            {n: self.totals[n] for n in orders},
            self.lines if with_lines else None,
        )

    def validate(self, orders, with_lines: bool) -> None:
        for n in orders:
            if n not in self.tables or n not in self.totals:
                raise CorruptTable(n, self.language, "order missing")
            table = self.tables[n]
            for gram, c in table.items():
                if len(gram) != n:
                    raise CorruptTable(n, self.language, f"key {gram!r} has wrong length")
                if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                    raise CorruptTable(n, self.language, f"bad count for {gram!r}")
            if self.totals[n] != sum(table.values()):
                raise CorruptTable(n, self.language, "total differs from sum of counts")
        if with_lines != (self.lines is not None):
            raise CorruptTable("lines", self.language, "whole-line table presence mismatch")
        if self.lines:
            for line, c in self.lines.items():
                if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                    raise CorruptTable("lines", self.language, f"bad count for {line!r}")


@dataclass
class ModelSet:
    """Language models sharing one n-gram range, in label order."""

    ngram_range: NGramRange
    models: dict = field(default_factory=dict)

    @property
    def labels(self) -> tuple:
        return tuple(self.models)

    def __getitem__(self, label) -> LanguageModel:
        return self.models[label]

    def __iter__(self):
        return iter(self.models.values())

    def __len__(self):
        return len(self.models)

    def restrict(self, ngram_range: NGramRange) -> "ModelSet":
        """View limited to ``ngram_range``; count tables are shared, not copied."""
        if not self.ngram_range.covers(ngram_range):
            raise RangeMismatch(str(ngram_range), str(self.ngram_range))
        orders = ngram_range.orders
        return ModelSet(
            ngram_range,
            {
                g: m.restrict(orders, ngram_range.include_whole_line)
                for g, m in self.models.items()
            },
        )

    def validate(self) -> None:
        for model in self:
            model.validate(self.ngram_range.orders, self.ngram_range.include_whole_line)


def relative_frequency(model: LanguageModel, ngram: str) -> float:
    return model.relative_frequency(ngram)


def train(corpus: LabeledCorpus, ngram_range: NGramRange, min_count: int = 1) -> ModelSet:
    """Count every n-gram of every order in ``ngram_range`` per label.

    With ``min_count > 1`` rarer n-grams are dropped and totals reflect the
    retained counts only.
    """
    if len(corpus) == 0:
        raise EmptyCorpus()
    orders = ngram_range.orders
    counters = {
        g: ({n: Counter() for n in orders}, Counter() if ngram_range.include_whole_line else None)
        for g in corpus.label_set
    }
    for line, label in corpus:
        tables, line_counts = counters[label]
        for n in orders:
            tables[n].update(line[i:i + n] for i in range(len(line) - n + 1))
        if line_counts is not None and line:
            line_counts[line] += 1

    models = {}
    for g, (tables, line_counts) in counters.items():
        kept = {n: _prune(tables[n], min_count) for n in orders}
        models[g] = LanguageModel(
            g,
            kept,
            {n: sum(t.values()) for n, t in kept.items()},
            _prune(line_counts, min_count) if line_counts is not None else None,
        )
    return ModelSet(ngram_range, models)


def _prune(counter, min_count):
    return {k: v for k, v in counter.items() if v >= min_count}


def models_to_dict(models: ModelSet) -> dict:
    r = models.ngram_range
    out = {
        "format_version": FORMAT_VERSION,
        "range": {"low": r.low, "high": r.high, "include_whole_line": r.include_whole_line},
        "models": {},
    }
    for g, m in models.models.items():
        entry = {
            "totals": {str(n): m.totals[n] for n in r.orders},
            "tables": {str(n): dict(sorted(m.tables[n].items())) for n in r.orders},
        }
        if m.lines is not None:
            entry["lines"] = dict(sorted(m.lines.items()))
        out["models"][g] = entry
    return out


def models_from_dict(doc: dict) -> ModelSet:
    version = doc.get("format_version")
    if not isinstance(version, int) or version > FORMAT_VERSION or version < 1:
        raise FormatVersionMismatch(version, FORMAT_VERSION)
    try:
        r = doc["range"]
        ngram_range = NGramRange(int(r["low"]), int(r["high"]), bool(r["include_whole_line"]))
        raw_models = doc["models"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptTable(None, None, f"bad header: {exc}") from None
    models = {}
    for g, entry in raw_models.items():
        try:
            tables = {int(n): dict(t) for n, t in entry["tables"].items()}
            totals = {int(n): v for n, v in entry["totals"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CorruptTable(None, g, str(exc)) from None
        lines = dict(entry["lines"]) if entry.get("lines") is not None else None
        if set(tables) != set(ngram_range.orders) or set(totals) != set(ngram_range.orders):
            raise CorruptTable(None, g, "orders differ from declared range")
        models[g] = LanguageModel(g, tables, totals, lines)
    model_set = ModelSet(ngram_range, models)
    model_set.validate()
    return model_set


def dumps_models(models: ModelSet) -> str:
    return json.dumps(models_to_dict(models), ensure_ascii=False, indent=1) + "\n"


def save_models(models: ModelSet, path) -> None:
    atomic_write_text(path, dumps_models(models))


def load_models(path) -> ModelSet:
    with open(path, encoding="utf-8") as fh:
        return models_from_dict(json.load(fh))
