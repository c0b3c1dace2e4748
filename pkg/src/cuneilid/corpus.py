"""Labeled line corpora: loading, normalization, filtering, splitting, sampling.

A cuneiform line is represented as a plain :class:`str`; each character is
one Unicode scalar value (one sign), so ``len(line)`` is the sign count.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from ._io import atomic_write_text
from .errors import (
    InsufficientLines,
    InvalidLabel,
    LabelTooSmall,
    MalformedUtf8,
    MissingLabel,
)

__all__ = [
    "RawLine",
    "LabeledCorpus",
    "SplitSpec",
    "SAMPLER_ALGORITHM",
    "normalize_line",
    "load_labeled",
    "save_labeled",
    "dedup",
    "filter_min_length",
    "split_out_of_domain",
    "split_in_domain",
    "balance_sample",
    "export_split",
]

BROKEN_SIGN = "x"
MIN_SPLIT_SIZE = 4
BLOCK_SIZE = 20
SAMPLER_ALGORITHM = "numpy.PCG64/partial-fisher-yates"


class RawLine(NamedTuple):
    text: str
    source_index: int = 0


def normalize_line(raw):
    """Drop whitespace and standalone ``x`` tokens (broken signs).

    ``x`` is only removed when it is a whole whitespace-delimited token; an
    ``x`` glued to other characters survives.
    """
    text = raw.text if isinstance(raw, RawLine) else raw
    return "".join(tok for tok in text.split() if tok != BROKEN_SIGN)


@dataclass(frozen=True)
class LabeledCorpus:
    """Ordered (line, label) pairs. File order is significant for splitting."""

    lines: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.lines) != len(self.labels):
            raise ValueError("lines and labels differ in length")

    @classmethod
    def from_entries(cls, entries: Iterable[tuple]) -> "LabeledCorpus":
        entries = list(entries)
        return cls(tuple(e[0] for e in entries), tuple(e[1] for e in entries))

    @property
    def label_set(self) -> tuple:
        """Distinct labels in order of first appearance."""
        return tuple(dict.fromkeys(self.labels))

    @property
    def entries(self) -> list:
        return list(zip(self.lines, self.labels))

    def __len__(self):
        return len(self.lines)

    def __iter__(self) -> Iterator[tuple]:
        return iter(zip(self.lines, self.labels))

    def __add__(self, other: "LabeledCorpus") -> "LabeledCorpus":
        return LabeledCorpus(self.lines + other.lines, self.labels + other.labels)

    def subset(self, indices: Iterable[int]) -> "LabeledCorpus":
        indices = list(indices)
        return LabeledCorpus(
            tuple(self.lines[i] for i in indices), tuple(self.labels[i] for i in indices)
        )

    def indices_by_label(self) -> dict:
        groups = {label: [] for label in self.label_set}
        for i, label in enumerate(self.labels):
            groups[label].append(i)
        return groups

    def to_tsv(self) -> str:
        return "".join(f"{line}\t{label}\n" for line, label in self)


@dataclass(frozen=True)
class SplitSpec:
    """Disjoint, ascending index tuples into a corpus."""

    train: tuple
    dev: tuple
    test: tuple

    def apply(self, corpus: LabeledCorpus):
        return corpus.subset(self.train), corpus.subset(self.dev), corpus.subset(self.test)

    def sizes(self):
        return len(self.train), len(self.dev), len(self.test)


def load_labeled(path) -> LabeledCorpus:
    """Read a ``<text>\\t<label>`` file; text goes through :func:`normalize_line`.

    Blank lines are skipped. Line numbers in errors are 1-based.
    """
    data = Path(path).read_bytes()
    lines, labels = [], []
    for line_no, raw in enumerate(data.split(b"\n"), start=1):
        try:
            row = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedUtf8(line_no, exc.start) from None
        if not row.strip():
            continue
        text, tab, label = row.rpartition("\t")
        label = label.strip()
        if not tab or not label:
            raise MissingLabel(line_no)
        if any(ch.isspace() for ch in label):
            raise InvalidLabel(line_no, label)
        lines.append(normalize_line(text))
        labels.append(label)
    return LabeledCorpus(tuple(lines), tuple(labels))


def save_labeled(corpus: LabeledCorpus, path) -> None:
    atomic_write_text(path, corpus.to_tsv())


def dedup(corpus: LabeledCorpus) -> LabeledCorpus:
    """Keep the first occurrence of every exact (line, label) pair."""
    seen = set()
    keep = []
    for i, pair in enumerate(corpus):
        if pair not in seen:
            seen.add(pair)
            keep.append(i)
    return corpus.subset(keep)


def filter_min_length(corpus: LabeledCorpus, min_signs: int = 3) -> LabeledCorpus:
    if min_signs < 1:
        raise ValueError("min_signs must be >= 1")
    return corpus.subset(i for i, line in enumerate(corpus.lines) if len(line) >= min_signs)


def _halves(n):
    """Sizes (train, dev, test) for a fallback split of ``n`` items."""
    n_train = math.ceil(n / 2)
    rest = n - n_train
    n_dev = math.ceil(rest / 2)
    return n_train, n_dev, rest - n_dev


def _checked_groups(corpus):
    groups = corpus.indices_by_label()
    for label, idx in groups.items():
        if len(idx) < MIN_SPLIT_SIZE:
            raise LabelTooSmall(label, len(idx), MIN_SPLIT_SIZE)
    return groups


def _assemble(train, dev, test):
    return SplitSpec(tuple(sorted(train)), tuple(sorted(dev)), tuple(sorted(test)))


def split_out_of_domain(corpus: LabeledCorpus) -> SplitSpec:
    """First half of each label's lines to train, the rest halved into dev and test."""
    train, dev, test = [], [], []
    for idx in _checked_groups(corpus).values():
        n_train, n_dev, _ = _halves(len(idx))
        train += idx[:n_train]
        dev += idx[n_train:n_train + n_dev]
        test += idx[n_train + n_dev:]
    return _assemble(train, dev, test)


def split_in_domain(corpus: LabeledCorpus) -> SplitSpec:
    """Blocks of 20 lines per label: 10 train, 5 dev, 5 test.

    A trailing partial block is split like :func:`split_out_of_domain`.
    """
    train, dev, test = [], [], []
    for idx in _checked_groups(corpus).values():
        for start in range(0, len(idx), BLOCK_SIZE):
            block = idx[start:start + BLOCK_SIZE]
            if len(block) == BLOCK_SIZE:
                n_train, n_dev = 10, 5
            else:
                n_train, n_dev, _ = _halves(len(block))
            train += block[:n_train]
            dev += block[n_train:n_train + n_dev]
            test += block[n_train + n_dev:]
    return _assemble(train, dev, test)


def _partial_shuffle(items: list, k: int, rng: np.random.Generator) -> list:
    items = list(items)
    n = len(items)
    for i in range(k):
        j = int(rng.integers(i, n))
        items[i], items[j] = items[j], items[i]
    return items[:k]


def balance_sample(corpus: LabeledCorpus, per_label: int, seed: int = 0) -> LabeledCorpus:
    """Draw exactly ``per_label`` lines of every label.

    One PCG64 stream seeded with ``seed`` drives a partial Fisher-Yates
    shuffle of each label's index list, labels visited in first-appearance
    order. Output is ordered by label, then original position.
    """
    groups = corpus.indices_by_label()
    for label, idx in groups.items():
        if len(idx) < per_label:
            raise InsufficientLines(label, len(idx), per_label)
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = []
    for idx in groups.values():
        chosen += sorted(_partial_shuffle(idx, per_label, rng))
    return corpus.subset(chosen)


def export_split(corpus: LabeledCorpus, split: SplitSpec, stem) -> Sequence[Path]:
    """Write ``<stem>.train.tsv``, ``<stem>.dev.tsv`` and ``<stem>.test.tsv``."""
    paths = []
    for name, part in zip(("train", "dev", "test"), split.apply(corpus)):
        path = Path(f"{stem}.{name}.tsv")
        save_labeled(part, path)
        paths.append(path)
    return paths
