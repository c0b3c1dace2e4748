"""Exception hierarchy.

Every error raised for bad *data* (as opposed to bad API usage) derives from
:class:`DataError`, which the command line maps to exit status 1.
"""


class CuneiLIDError(Exception):
    """Base class for all package errors."""


class DataError(CuneiLIDError):
    """Input data violates a format or content contract."""


# corpus

class MissingLabel(DataError):
    def __init__(self, line_no):
        self.line_no = line_no
        super().__init__(f"line {line_no}: missing TAB-separated label")


class MalformedUtf8(DataError):
    def __init__(self, line_no, byte_offset):
        self.line_no = line_no
        self.byte_offset = byte_offset
        super().__init__(f"line {line_no}: invalid UTF-8 at byte offset {byte_offset}")


class InvalidLabel(DataError):
    def __init__(self, line_no, label):
        self.line_no = line_no
        self.label = label
        super().__init__(f"line {line_no}: label {label!r} contains whitespace")


class LabelTooSmall(DataError):
    def __init__(self, label, size, need=4):
        self.label = label
        self.size = size
        super().__init__(f"label {label!r} has {size} lines; splitting needs at least {need}")


class InsufficientLines(DataError):
    def __init__(self, label, have, need):
        self.label = label
        self.have = have
        self.need = need
        super().__init__(f"label {label!r} has {have} lines, {need} requested")


# signmap

class DuplicateReading(DataError):
    def __init__(self, reading, line_no):
        self.reading = reading
        self.line_no = line_no
        super().__init__(f"line {line_no}: duplicate reading {reading!r}")


class NonCuneiformCodepoint(DataError):
    def __init__(self, reading, line_no):
        self.reading = reading
        self.line_no = line_no
        super().__init__(f"line {line_no}: reading {reading!r} maps outside the cuneiform blocks")


class MalformedRecord(DataError):
    def __init__(self, line_no, detail="expected <reading>\\t<signs>"):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {detail}")


class UnbalancedParenthesis(DataError):
    def __init__(self, token):
        self.token = token
        super().__init__(f"unbalanced parenthesis in {token!r}")


class UnknownReading(DataError):
    def __init__(self, token, position):
        self.token = token
        self.position = position
        super().__init__(f"unknown reading {token!r} at token {position}")


# models

class EmptyCorpus(DataError):
    def __init__(self):
        super().__init__("cannot train on an empty corpus")


class OrderOutOfRange(CuneiLIDError):
    def __init__(self, order, ngram_range):
        self.order = order
        super().__init__(f"n-gram order {order} outside model range {ngram_range}")


class FormatVersionMismatch(DataError):
    def __init__(self, found, supported):
        self.found = found
        self.supported = supported
        super().__init__(f"model format version {found!r} not supported (max {supported})")


class CorruptTable(DataError):
    def __init__(self, order, language, detail=""):
        self.order = order
        self.language = language
        msg = f"corrupt table for language {language!r}, order {order}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


# classify / eval

class RangeMismatch(CuneiLIDError):
    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super().__init__(f"range {requested} not covered by model range {available}")


class LengthMismatch(CuneiLIDError):
    def __init__(self, n_gold, n_pred):
        super().__init__(f"gold has {n_gold} labels, predictions have {n_pred}")


class UnknownPredictedLabel(CuneiLIDError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"predicted label {label!r} not in the gold label set")


class EmptyEvaluationSet(DataError):
    def __init__(self):
        super().__init__("evaluation set is empty")
