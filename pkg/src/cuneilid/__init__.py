"""Language and dialect identification for Unicode cuneiform text lines."""

__version__ = "0.1.0"

from .classify import (
    MethodConfig,
    ScoreVector,
    ensemble_vote,
    identify,
    default_ensemble,
    score_heli,
    score_product,
    score_simple,
    score_sum,
)
from .corpus import (
    LabeledCorpus,
    SplitSpec,
    balance_sample,
    dedup,
    filter_min_length,
    load_labeled,
    normalize_line,
    split_in_domain,
    split_out_of_domain,
)
from .estimator import CuneiformLanguageIdentifier
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    GridSpec,
    confusion,
    evaluate,
    finalize,
    grid_search,
    macro_f1,
)
from .models import LanguageModel, ModelSet, NGramRange, extract_ngrams, load_models, save_models, train
from .signmap import SignList, load_sign_list, strip_annotations, to_cuneiform, tokenize_atf, transliterate

__all__ = [
    "ConfusionMatrix",
    "CuneiformLanguageIdentifier",
    "EvalReport",
    "GridSpec",
    "LabeledCorpus",
    "LanguageModel",
    "MethodConfig",
    "ModelSet",
    "NGramRange",
    "ScoreVector",
    "SignList",
    "SplitSpec",
    "balance_sample",
    "confusion",
    "dedup",
    "default_ensemble",
    "ensemble_vote",
    "evaluate",
    "extract_ngrams",
    "filter_min_length",
    "finalize",
    "grid_search",
    "identify",
    "load_labeled",
    "load_models",
    "load_sign_list",
    "macro_f1",
    "normalize_line",
    "save_models",
    "score_heli",
    "score_product",
    "score_simple",
    "score_sum",
    "split_in_domain",
    "split_out_of_domain",
    "strip_annotations",
    "to_cuneiform",
    "tokenize_atf",
    "train",
    "transliterate",
]
