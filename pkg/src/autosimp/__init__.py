"""Autocomplete workbench for sentence-level medical text simplification.

Given a difficult sentence and a partially typed simplification, rank
candidate next words from pluggable backends, combine them with ensemble
selectors, evaluate on parallel corpora, and serve suggestions to an
interactive editor.
"""

from .corpus import (
    Dictionary,
    SentencePair,
    count_term_matches,
    filter_medical,
    make_pair,
    make_term,
    split_dataset,
    term_similarity,
)
from .ensemble import EnsembleConfig, majority_vote, score_4cc, score_multilabel
from .evaluation import (
    EvalReport,
    PredictionTask,
    accuracy,
    accuracy_at_n,
    bucket_by_length,
    breakdown,
    generate_tasks,
    upper_bound,
    usage_frequency,
)
from .kernel import KERNEL_NAME
from .lm import NGramModel, train_ngram
from .text import tokenize
from .types import PredictionContext, Suggestion, SuggestionList

__version__ = "0.1.0"
