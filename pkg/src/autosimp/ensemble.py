"""Ensemble combination of backend suggestions.

Three strategies over the same per-backend suggestion lists:

- majority vote over the pooled top-5 suggestions of every backend;
- a single-label selector names one backend, and outputs are rescored as
  alpha * P(w|X) + theta * [X == selected];
- a multi-label selector predicts per-backend correctness bits, and outputs
  are rescored as beta * P(w|X) + sigma * (bonus if X is predicted correct).

Plus the feature extraction and training-data generation those selectors
need.
"""

import hashlib
import random
from dataclasses import dataclass
from typing import Sequence

from .evaluation import LENGTH_BUCKETS, PredictionTask, bucket_by_length
from .selector import SelectorExample
from .types import PredictionContext, Suggestion, SuggestionList


class NoSuggestionError(RuntimeError):
    """Every backend came back empty; the ensemble has nothing to choose."""


@dataclass(frozen=True)
class EnsembleConfig:
    alpha: float = 0.5
    theta: float = 0.5
    beta: float = 0.5
    sigma: float = 0.5
    membership_bonus: float = 0.25
    vote_pool_k: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "theta", "beta", "sigma", "membership_bonus"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.vote_pool_k < 1:
            raise ValueError("vote_pool_k must be >= 1")


def derive_rng(seed: int, key: object = None) -> random.Random:
    """A Random whose stream depends only on (seed, key), not call order.

    Keyed derivation keeps tie-breaking reproducible and order-independent,
    so evaluating tasks in parallel or permuted order changes nothing.
    """
    if key is None:
        return random.Random(seed)
    digest = hashlib.blake2b(
        repr((seed, key)).encode("utf-8"), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


# -- selector features -------------------------------------------------------


def feature_length(num_backends: int) -> int:
    return 9 + num_backends


def extract_features(
    ctx: PredictionContext,
    per_backend: Sequence[SuggestionList],
    difficult_len_bucket: str,
) -> tuple[float, ...]:
    """Fixed-layout feature vector for the selector classifiers.

    Layout: prefix length, difficult length, 4 one-hot length-bucket flags,
    fraction of typed tokens present in the difficult sentence, one top-1
    probability slot per backend, the plurality agreement count over backend
    top-1 words, and a constant 1.0 slot.
    """
    typed = ctx.typed
    difficult = ctx.difficult or ()
    features = [float(len(typed)), float(len(difficult))]
    features.extend(
        1.0 if difficult_len_bucket == b else 0.0 for b in LENGTH_BUCKETS
    )
    if typed:
        dset = set(difficult)
        overlap = sum(1 for w in typed if w in dset) / len(typed)
    else:
        overlap = 0.0
    features.append(overlap)
    top_words = []
    for slist in per_backend:
        top = slist.top1()
        features.append(top.prob if top else 0.0)
        if top:
            top_words.append(top.word)
    agreement = 0
    if top_words:
        counts: dict[str, int] = {}
        for w in top_words:
            counts[w] = counts.get(w, 0) + 1
        agreement = max(counts.values())
    features.append(float(agreement))
    features.append(1.0)
    return tuple(features)


def task_features(
    task: PredictionTask, per_backend: Sequence[SuggestionList]
) -> tuple[float, ...]:
    return extract_features(
        task.context(), per_backend, bucket_by_length(task.difficult_length)
    )


# -- majority vote ------------------------------------------------------------


def _vote_counts(
    per_backend: Sequence[SuggestionList], pool_k: int
) -> tuple[dict[str, int], dict[str, float], dict[str, list[str]]]:
    counts: dict[str, int] = {}
    best_prob: dict[str, float] = {}
    listed_by: dict[str, list[str]] = {}
    for slist in per_backend:
        for entry in slist.entries[:pool_k]:
            counts[entry.word] = counts.get(entry.word, 0) + 1
            if entry.prob > best_prob.get(entry.word, 0.0):
                best_prob[entry.word] = entry.prob
            listed_by.setdefault(entry.word, []).append(slist.backend_id)
    return counts, best_prob, listed_by


def majority_vote(
    per_backend: Sequence[SuggestionList],
    cfg: EnsembleConfig,
    tie_key: object = None,
) -> tuple[str, tuple[str, ...]]:
    """Most-listed word across the pooled per-backend top suggestions.

    Each backend contributes one count per word it lists. Count ties prefer
    the word with the best pooled probability (so identical backends elect
    their own top-1); words still tied after that are resolved by a seeded
    uniform choice (keyed by ``tie_key`` when given). Returns the word and
    the ids of the backends that listed it.
    """
    counts, best_prob, listed_by = _vote_counts(per_backend, cfg.vote_pool_k)
    if not counts:
        raise NoSuggestionError("all backends returned empty suggestion lists")
    top_count = max(counts.values())
    by_count = [w for w, c in counts.items() if c == top_count]
    top_prob = max(best_prob[w] for w in by_count)
    tied = sorted(w for w in by_count if best_prob[w] == top_prob)
    if len(tied) == 1:
        word = tied[0]
    else:
        word = derive_rng(cfg.rng_seed, tie_key).choice(tied)
    return word, tuple(listed_by[word])


def majority_vote_ranked(
    per_backend: Sequence[SuggestionList],
    cfg: EnsembleConfig,
    tie_key: object = None,
    k: int | None = None,
) -> tuple[SuggestionList, str, tuple[str, ...]]:
    """Majority vote plus a ranked pooled list for accuracy@N style use.

    Pooled words are ordered by vote count, then best pooled probability,
    then word, except that the seeded vote winner is always ranked first;
    probabilities are vote counts normalized by the pool size.
    """
    word, chosen_ids = majority_vote(per_backend, cfg, tie_key)
    counts, best_prob, _listed_by = _vote_counts(per_backend, cfg.vote_pool_k)
    total = sum(counts.values())
    ordered = sorted(counts, key=lambda w: (-counts[w], -best_prob[w], w))
    ordered.remove(word)
    ordered.insert(0, word)
    limit = cfg.vote_pool_k if k is None else k
    entries = tuple(
        Suggestion(w, counts[w] / total) for w in ordered[:limit]
    )
    return SuggestionList("majority-vote", entries), word, chosen_ids


# -- selector training data ----------------------------------------------------


def _correct_indices(
    per_backend: Sequence[SuggestionList], gold: str
) -> list[int]:
    out = []
    for j, slist in enumerate(per_backend):
        top = slist.top1()
        if top is not None and top.word == gold:
            out.append(j)
    return out


def generate_4cc_data(
    tasks: Sequence[PredictionTask],
    per_backend_lists: Sequence[Sequence[SuggestionList]],
    rng: random.Random,
) -> list[SelectorExample]:
    """Single-label selector rows: one example per task with at least one
    correct backend, labeled with a seeded-uniform choice among the correct
    ones; tasks with no correct backend yield nothing."""
    if len(tasks) != len(per_backend_lists):
        raise ValueError(f"{len(per_backend_lists)} rows for {len(tasks)} tasks")
    examples = []
    for task, lists in zip(tasks, per_backend_lists):
        correct = _correct_indices(lists, task.gold)
        if not correct:
            continue
        label = correct[0] if len(correct) == 1 else rng.choice(correct)
        examples.append(
            SelectorExample(features=task_features(task, lists), label_single=label)
        )
    return examples


def generate_multilabel_data(
    tasks: Sequence[PredictionTask],
    per_backend_lists: Sequence[Sequence[SuggestionList]],
) -> list[SelectorExample]:
    """Multi-label selector rows: one example per task, bit j set when
    backend j's top-1 equals the gold word. All-zero rows are retained."""
    if len(tasks) != len(per_backend_lists):
        raise ValueError(f"{len(per_backend_lists)} rows for {len(tasks)} tasks")
    examples = []
    for task, lists in zip(tasks, per_backend_lists):
        correct = set(_correct_indices(lists, task.gold))
        bits = tuple(1 if j in correct else 0 for j in range(len(lists)))
        examples.append(
            SelectorExample(features=task_features(task, lists), label_multi=bits)
        )
    return examples


# -- output scoring -------------------------------------------------------------


def score_4cc(
    per_backend_top1: Sequence[tuple[str, float] | None],
    selected: int,
    cfg: EnsembleConfig,
) -> tuple[str, int]:
    """Score each backend's top word as alpha*P + theta*[X == selected] and
    return (word, backend index) of the argmax.

    Ties resolve in favor of the selected backend, then the lowest index.
    Backends with no suggestion never win.
    """
    best_j = -1
    best_score = 0.0
    best_rank = (2, 0)
    for j, top in enumerate(per_backend_top1):
        if top is None:
            continue
        _word, prob = top
        score = cfg.alpha * prob + cfg.theta * (1.0 if j == selected else 0.0)
        rank = (0 if j == selected else 1, j)
        if best_j < 0 or score > best_score or (score == best_score and rank < best_rank):
            best_j, best_score, best_rank = j, score, rank
    if best_j < 0:
        raise NoSuggestionError("all backends returned empty suggestion lists")
    return per_backend_top1[best_j][0], best_j


def score_multilabel(
    per_backend_top1: Sequence[tuple[str, float] | None],
    label_bits: Sequence[int],
    cfg: EnsembleConfig,
) -> tuple[str, int]:
    """Score each backend's top word as beta*P + sigma*(bonus if predicted
    correct) and return (word, backend index) of the argmax.

    Ties resolve in favor of predicted-correct backends, then lowest index.
    """
    if len(label_bits) != len(per_backend_top1):
        raise ValueError(
            f"{len(label_bits)} label bits for {len(per_backend_top1)} backends"
        )
    best_j = -1
    best_score = 0.0
    best_rank = (2, 0)
    for j, top in enumerate(per_backend_top1):
        if top is None:
            continue
        _word, prob = top
        member = bool(label_bits[j])
        score = cfg.beta * prob + cfg.sigma * (cfg.membership_bonus if member else 0.0)
        rank = (0 if member else 1, j)
        if best_j < 0 or score > best_score or (score == best_score and rank < best_rank):
            best_j, best_score, best_rank = j, score, rank
    if best_j < 0:
        raise NoSuggestionError("all backends returned empty suggestion lists")
    return per_backend_top1[best_j][0], best_j
