"""ATF transliteration to Unicode cuneiform conversion.

Conversion is a table lookup per sign reading. Before lookup a few notation
rules are applied to each word: parenthesized glosses are removed, determinative
braces become sign boundaries, and damage/collation marks are trimmed off
token edges. Standalone ``x`` (a broken sign) produces no output.
"""

import re
import unicodedata
from pathlib import Path
from typing import Iterable, NamedTuple

from ._io import atomic_write_text
from .errors import (
    DuplicateReading,
    MalformedRecord,
    NonCuneiformCodepoint,
    UnbalancedParenthesis,
    UnknownReading,
)

__all__ = [
    "CUNEIFORM_BLOCKS",
    "SignList",
    "Conversion",
    "is_cuneiform",
    "load_sign_list",
    "strip_annotations",
    "tokenize_atf",
    "to_cuneiform",
    "transliterate",
]

# Cuneiform; Numbers and Punctuation; Early Dynastic Cuneiform
CUNEIFORM_BLOCKS = ((0x12000, 0x123FF), (0x12400, 0x1247F), (0x12480, 0x1254F))

# Damage and collation marks trimmed from token edges: square and half
# brackets, '#', '?', '!', '*' and angle brackets for omitted signs.
EDGE_MARKS = "[]⸢⸣˹˺#?!*<>"

_SIGN_SEPARATORS = re.compile(r"[-.{}]")
BROKEN_SIGN = "x"


def is_cuneiform(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in CUNEIFORM_BLOCKS)


def _key(reading: str) -> str:
    return unicodedata.normalize("NFC", reading).lower()


class SignList:
    """Immutable reading -> sign-sequence table.

    Lookups ignore case; readings that differ only by case count as
    duplicates. Records keep their input order for serialization.
    """

    def __init__(self, records: Iterable[tuple] = ()):
        self._records = []
        self._index = {}
        for line_no, (reading, signs) in enumerate(records, start=1):
            self._add(reading, signs, line_no)

    def _add(self, reading, signs, line_no):
        key = _key(reading)
        if not key or not signs:
            raise MalformedRecord(line_no)
        if key in self._index:
            raise DuplicateReading(reading, line_no)
        if not all(is_cuneiform(ch) for ch in signs):
            raise NonCuneiformCodepoint(reading, line_no)
        self._records.append((reading, signs))
        self._index[key] = signs

    @classmethod
    def _from_numbered(cls, numbered):
        table = cls()
        for line_no, reading, signs in numbered:
            table._add(reading, signs, line_no)
        return table

    def lookup(self, reading: str):
        """Sign string for ``reading``, or ``None`` when unknown."""
        return self._index.get(_key(reading))

    def __contains__(self, reading):
        return _key(reading) in self._index

    def __len__(self):
        return len(self._records)

    @property
    def size(self):
        return len(self._records)

    @property
    def records(self):
        return tuple(self._records)

    def __eq__(self, other):
        return isinstance(other, SignList) and self._records == other._records

    def __repr__(self):
        return f"SignList({len(self)} readings)"

    def to_text(self) -> str:
        return "".join(f"{reading}\t{signs}\n" for reading, signs in self._records)

    def save(self, path) -> None:
        atomic_write_text(path, self.to_text())


def load_sign_list(path) -> SignList:
    """Parse ``<reading>\\t<signs>`` records; ``#`` lines and blank lines are skipped."""
    numbered = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, row in enumerate(text.split("\n"), start=1):
        row = row.rstrip("\r")
        if not row.strip() or row.startswith("#"):
            continue
        reading, tab, signs = row.partition("\t")
        reading, signs = reading.strip(), signs.strip()
        if not tab or not reading or not signs:
            raise MalformedRecord(line_no)
        numbered.append((line_no, reading, signs))
    return SignList._from_numbered(numbered)


def strip_annotations(token: str) -> str:
    """Remove every parenthesized group, nested ones included, then trim.

    >>> strip_annotations("du₃(KAK)")
    'du₃'
    """
    out = []
    depth = 0
    for ch in token:
        if ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                raise UnbalancedParenthesis(token)
            depth -= 1
        elif depth == 0:
            out.append(ch)
    if depth:
        raise UnbalancedParenthesis(token)
    return "".join(out).strip()


def tokenize_atf(line: str) -> list:
    """Split an ATF line into sign readings.

    Words are whitespace-separated; ``-``, ``.`` and determinative braces
    separate signs within a word. Parenthesized glosses are removed at the
    word level so that separators inside them do not split the gloss.
    """
    tokens = []
    for word in line.split():
        word = strip_annotations(word)
        for piece in _SIGN_SEPARATORS.split(word):
            piece = piece.strip(EDGE_MARKS)
            if piece:
                tokens.append(piece)
    return tokens


class Conversion(NamedTuple):
    text: str
    dropped: int = 0


def to_cuneiform(tokens, signs: SignList, strict: bool = True) -> Conversion:
    """Concatenate the sign sequences of ``tokens``.

    Tokens equal to ``x`` are elided. Unknown readings raise
    :class:`UnknownReading` when ``strict``; otherwise they are skipped and
    counted in ``Conversion.dropped``.
    """
    out = []
    dropped = 0
    for position, token in enumerate(tokens):
        if token == BROKEN_SIGN:
            continue
        seq = signs.lookup(token)
        if seq is None:
            if strict:
                raise UnknownReading(token, position)
            dropped += 1
            continue
        out.append(seq)
    return Conversion("".join(out), dropped)


def transliterate(line: str, signs: SignList, strict: bool = True) -> Conversion:
    return to_cuneiform(tokenize_atf(line), signs, strict=strict)
