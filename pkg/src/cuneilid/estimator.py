"""scikit-learn compatible wrapper around training and identification."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .classify import MethodConfig, default_ensemble, predict, score
from .corpus import LabeledCorpus, normalize_line
from .evaluation import EvalReport, predict_lines
from .models import NGramRange, train

__all__ = ["CuneiformLanguageIdentifier", "check_lines", "check_labels", "as_range"]


def check_lines(X, normalize=True) -> list:
    """Validate a 1-D collection of text lines and return it as a list of str.

    A bare string is rejected since iterating it would yield characters.
    """
    if isinstance(X, (str, bytes)):
        raise TypeError("expected a sequence of lines, got a single string")
    if isinstance(X, np.ndarray):
        if X.ndim == 2 and X.shape[1] == 1:
            X = X[:, 0]
        elif X.ndim != 1:
            raise ValueError(f"expected 1-D input, got shape {X.shape}")
    lines = list(X)
    for i, line in enumerate(lines):
        if not isinstance(line, str):
            raise TypeError(f"line {i} is {type(line).__name__}, expected str")
    return [normalize_line(line) for line in lines] if normalize else lines


def check_labels(y, n_samples) -> list:
    labels = [str(label) for label in y]
    if len(labels) != n_samples:
        raise ValueError(f"got {n_samples} lines but {len(labels)} labels")
    for label in labels:
        if not label or any(ch.isspace() for ch in label):
            raise ValueError(f"invalid label {label!r}")
    return labels


def as_range(value) -> NGramRange:
    """Accept an NGramRange, ``"L-H[+lines]"`` string, or ``(low, high)`` pair."""
    if isinstance(value, NGramRange):
        return value
    if isinstance(value, str):
        return NGramRange.parse(value)
    low, high = value
    return NGramRange(int(low), int(high))


class CuneiformLanguageIdentifier(ClassifierMixin, BaseEstimator):
    """Character n-gram language identifier for cuneiform lines.

    Parameters
    ----------
    method : {"simple", "sum", "product", "heli", "ensemble"}
    ngram_range : str, tuple or NGramRange
        Orders used for scoring, e.g. ``"1-4"`` or ``"1-3+lines"``. Ignored
        by ``"ensemble"``, which uses the member ranges.
    penalty : float or None
        Unseen n-gram charge (product) or penalty multiplier (HeLI).
        ``None`` picks the method default.
    members : MethodConfig or None
        Ensemble configuration; defaults to the best CLI-2019 base settings.
    min_count : int
        Drop n-grams seen fewer times than this in training.
    n_jobs : int
        Worker processes for prediction.
    """

    def __init__(self, method="product", ngram_range="1-4", penalty=None, members=None,
                 min_count=1, n_jobs=1):
        self.method = method
        self.ngram_range = ngram_range
        self.penalty = penalty
        self.members = members
        self.min_count = min_count
        self.n_jobs = n_jobs

    def _config(self) -> MethodConfig:
        if self.method == "ensemble":
            return self.members or default_ensemble()
        return MethodConfig(self.method, as_range(self.ngram_range), self.penalty)

    def fit(self, X, y):
        lines = check_lines(X)
        labels = check_labels(y, len(lines))
        self.config_ = self._config()
        self.models_ = train(
            LabeledCorpus(lines, labels), self.config_.ngram_range, min_count=self.min_count
        )
        self.classes_ = np.array(sorted(self.models_.labels))
        return self

    def predict(self, X):
        check_is_fitted(self, "models_")
        lines = check_lines(X)
        return np.array(predict_lines(lines, self.models_, self.config_, n_jobs=self.n_jobs),
                        dtype=object)

    def decision_function(self, X):
        """Per-class scores, columns ordered as ``classes_``.

        Product and HeLI scores are negated so that larger is better.
        """
        check_is_fitted(self, "models_")
        if self.config_.method == "ensemble":
            raise AttributeError("the voting ensemble has no decision function")
        sign = -1.0 if self.config_.polarity == "lower_wins" else 1.0
        rows = []
        for line in check_lines(X):
            vec = score(line, self.models_, self.config_).as_dict()
            rows.append([sign * vec[g] for g in self.classes_])
        return np.array(rows)

    def report(self, X, y) -> EvalReport:
        check_is_fitted(self, "models_")
        lines = check_lines(X)
        gold = check_labels(y, len(lines))
        return EvalReport.from_predictions(gold, predict(lines, self.models_, self.config_),
                                           self.config_)

    def score(self, X, y, sample_weight=None):
        """Macro F1 on ``(X, y)``; the measure model selection uses."""
        if sample_weight is not None:
            raise ValueError("sample weights are not supported")
        return self.report(X, y).macro_f1
