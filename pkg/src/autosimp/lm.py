"""Interpolated n-gram language models with a copy bias.

The predictive distribution linearly interpolates maximum-likelihood
estimates of orders 1..n over the effective history; context-aware models
prepend the difficult sentence (joined by a separator sentinel) to the typed
prefix and additionally mix in a uniform "copy" distribution over the
difficult sentence's distinct tokens. These models stand in for large neural
backends so the ensemble machinery can run anywhere; real neural models
attach through the remote backend protocol instead.
"""

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernel
from .text import BOS, EOS, RESERVED_TOKENS, SEP, UNK
from .types import PredictionContext, SuggestionList, ranked_suggestions

NO_CONTEXT = "no-context"
CONCAT = "concat"
CONTEXT_MODES = (NO_CONTEXT, CONCAT)

_FORMAT = "autosimp-ngram"
_VERSION = 1


class TrainingError(ValueError):
    """Raised when a model cannot be trained from the given corpus."""


class NGramModel:
    """Frozen count tables for orders 1..n plus interpolation parameters.

    ``tables[o]`` maps an (o-1)-token context (as word-id tuples) to a
    triple of aligned arrays (word ids, counts, context total). Instances
    are immutable after construction and safe to share across threads.
    """

    def __init__(
        self,
        order: int,
        interpolation_weights: Sequence[float],
        copy_weight: float,
        context_mode: str,
        vocab: Sequence[str],
        tables: dict[int, dict[tuple[int, ...], tuple[np.ndarray, np.ndarray, float]]],
    ):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        weights = tuple(float(w) for w in interpolation_weights)
        if len(weights) != order:
            raise ValueError(
                f"expected {order} interpolation weights, got {len(weights)}"
            )
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must be non-negative and sum to 1: {weights}")
        # copy_weight 1.0 is degenerate (pure copy) but accepted; it is useful
        # for isolating the copy distribution in tests.
        if not 0.0 <= copy_weight <= 1.0:
            raise ValueError(f"copy_weight must be in [0, 1], got {copy_weight}")
        if context_mode not in CONTEXT_MODES:
            raise ValueError(f"unknown context mode: {context_mode!r}")
        self.order = order
        self.interpolation_weights = weights
        self.copy_weight = float(copy_weight)
        self.context_mode = context_mode
        self.vocab: tuple[str, ...] = tuple(vocab)
        self.tables = tables
        self.word_to_id = {w: i for i, w in enumerate(self.vocab)}
        self._unk_id = self.word_to_id[UNK]
        self._bos_id = self.word_to_id[BOS]

    # -- prediction ---------------------------------------------------------

    def _history_tokens(self, ctx: PredictionContext) -> list[str]:
        if self.context_mode == CONCAT and ctx.difficult:
            return list(ctx.difficult) + [SEP] + list(ctx.typed)
        return list(ctx.typed)

    def _effective_gamma(self, ctx: PredictionContext) -> float:
        if self.context_mode == NO_CONTEXT or not ctx.difficult:
            return 0.0
        return self.copy_weight

    def _scores(self, ctx: PredictionContext) -> tuple[np.ndarray, list[str]]:
        """Full distribution over vocab plus any out-of-vocabulary copy words."""
        hist = [self.word_to_id.get(w, self._unk_id) for w in self._history_tokens(ctx)]
        padded = [self._bos_id] * (self.order - 1) + hist

        layers = []
        raw_lams = []
        for o in range(1, self.order + 1):
            key = tuple(padded[len(padded) - (o - 1) :]) if o > 1 else ()
            entry = self.tables[o].get(key)
            if entry is not None:
                layers.append(entry)
                raw_lams.append(self.interpolation_weights[o - 1])
        # The unigram context is always present (non-empty corpus), so at
        # least one order contributes; unseen higher-order contexts simply
        # hand their weight down.
        lam_total = sum(raw_lams)
        lams = np.array([l / lam_total for l in raw_lams], dtype=np.float64)

        gamma = self._effective_gamma(ctx)
        extra_words: list[str] = []
        if gamma > 0.0:
            copy_words = sorted(set(ctx.difficult))
            copy_ids = []
            for w in copy_words:
                wid = self.word_to_id.get(w)
                if wid is None:
                    wid = len(self.vocab) + len(extra_words)
                    extra_words.append(w)
                copy_ids.append(wid)
            copy_arr = np.array(copy_ids, dtype=np.int32)
        else:
            copy_arr = np.empty(0, dtype=np.int32)

        ext_size = len(self.vocab) + len(extra_words)
        vec = kernel.interpolated_scores(ext_size, layers, lams, copy_arr, gamma)
        return vec, extra_words

    def distribution(self, ctx: PredictionContext) -> dict[str, float]:
        """The full (untruncated) predictive distribution; sums to 1."""
        vec, extra_words = self._scores(ctx)
        words = list(self.vocab) + extra_words
        return {w: float(p) for w, p in zip(words, vec)}

    def predict(
        self, ctx: PredictionContext, k: int, backend_id: str = "ngram"
    ) -> SuggestionList:
        """Top-k suggestions; sentinels and zero-probability words are never
        suggested."""
        vec, extra_words = self._scores(ctx)
        words = list(self.vocab) + extra_words
        pairs = (
            (w, float(p))
            for w, p in zip(words, vec)
            if p > 0.0 and w not in RESERVED_TOKENS
        )
        return ranked_suggestions(backend_id, pairs, k)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        tables_out: dict[str, list] = {}
        for o in range(1, self.order + 1):
            rows = []
            for key in sorted(
                self.tables[o], key=lambda ids: tuple(self.vocab[i] for i in ids)
            ):
                ids, counts, _total = self.tables[o][key]
                rows.append(
                    [
                        [self.vocab[i] for i in key],
                        [[self.vocab[int(w)], int(c)] for w, c in zip(ids, counts)],
                    ]
                )
            tables_out[str(o)] = rows
        return {
            "format": _FORMAT,
            "version": _VERSION,
            "order": self.order,
            "interpolation_weights": list(self.interpolation_weights),
            "copy_weight": self.copy_weight,
            "context_mode": self.context_mode,
            "vocab": list(self.vocab),
            "tables": tables_out,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NGramModel":
        if data.get("format") != _FORMAT:
            raise ValueError(f"not a model file (format={data.get('format')!r})")
        if data.get("version") != _VERSION:
            raise ValueError(f"unsupported model version: {data.get('version')!r}")
        vocab = list(data["vocab"])
        word_to_id = {w: i for i, w in enumerate(vocab)}
        tables: dict[int, dict] = {}
        for o_str, rows in data["tables"].items():
            o = int(o_str)
            tables[o] = {}
            for ctx_words, entries in rows:
                key = tuple(word_to_id[w] for w in ctx_words)
                ids = np.array([word_to_id[w] for w, _c in entries], dtype=np.int32)
                counts = np.array([float(c) for _w, c in entries], dtype=np.float64)
                tables[o][key] = (ids, counts, float(counts.sum()))
        return cls(
            order=int(data["order"]),
            interpolation_weights=data["interpolation_weights"],
            copy_weight=float(data["copy_weight"]),
            context_mode=data["context_mode"],
            vocab=vocab,
            tables=tables,
        )

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "NGramModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train_ngram(
    corpus: Iterable[Sequence[str]],
    order: int,
    interpolation_weights: Sequence[float] | None = None,
    copy_weight: float = 0.0,
    context_mode: str = NO_CONTEXT,
) -> NGramModel:
    """Count n-gram frequencies for all orders 1..``order``.

    Each sequence is wrapped with begin/end sentinels before counting; the
    begin sentinel is context-only and never a prediction target.
    """
    sequences = [list(seq) for seq in corpus]
    if not sequences:
        raise TrainingError("cannot train on an empty corpus")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if interpolation_weights is None:
        interpolation_weights = (1.0 / order,) * order

    raw: dict[int, dict[tuple[str, ...], dict[str, int]]] = {
        o: {} for o in range(1, order + 1)
    }
    target_words: set[str] = set()
    for toks in sequences:
        padded = [BOS] * (order - 1) + toks + [EOS]
        for t in range(order - 1, len(padded)):
            w = padded[t]
            target_words.add(w)
            for o in range(1, order + 1):
                key = tuple(padded[t - o + 1 : t])
                bucket = raw[o].setdefault(key, {})
                bucket[w] = bucket.get(w, 0) + 1

    vocab = tuple(sorted(target_words | {BOS, EOS, UNK, SEP}))
    word_to_id = {w: i for i, w in enumerate(vocab)}
    tables: dict[int, dict[tuple[int, ...], tuple[np.ndarray, np.ndarray, float]]] = {}
    for o, contexts in raw.items():
        tables[o] = {}
        for ctx_words, counter in contexts.items():
            key = tuple(word_to_id[w] for w in ctx_words)
            items = sorted((word_to_id[w], c) for w, c in counter.items())
            ids = np.array([i for i, _c in items], dtype=np.int32)
            counts = np.array([float(c) for _i, c in items], dtype=np.float64)
            tables[o][key] = (ids, counts, float(counts.sum()))

    return NGramModel(
        order=order,
        interpolation_weights=interpolation_weights,
        copy_weight=copy_weight,
        context_mode=context_mode,
        vocab=vocab,
        tables=tables,
    )
