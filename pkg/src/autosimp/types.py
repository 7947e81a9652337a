"""Shared prediction data types."""

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class PredictionContext:
    """What a predictor sees for one query.

    ``typed`` is the simplification typed so far (possibly empty);
    ``difficult`` is the sentence being simplified, or None for predictors
    running without it. No-context predictors ignore ``difficult`` even when
    it is present.
    """

    typed: tuple[str, ...]
    difficult: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Suggestion:
    word: str
    prob: float


@dataclass(frozen=True)
class SuggestionList:
    """Ranked candidates from one backend.

    Entries are sorted by probability descending with lexicographic word
    tie-break, words are distinct and probabilities lie in (0, 1].
    """

    backend_id: str
    entries: tuple[Suggestion, ...]

    def words(self) -> list[str]:
        return [e.word for e in self.entries]

    def top1(self) -> Suggestion | None:
        return self.entries[0] if self.entries else None

    def __len__(self) -> int:
        return len(self.entries)


def ranked_suggestions(
    backend_id: str, pairs: Iterable[tuple[str, float]], k: int
) -> SuggestionList:
    """Normalize raw (word, prob) pairs into a SuggestionList.

    Keeps the best probability per word, drops non-positive entries, sorts by
    probability descending (ties lexicographically by word) and truncates to
    the top ``k``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    best: dict[str, float] = {}
    for word, prob in pairs:
        if prob <= 0.0:
            continue
        if word not in best or prob > best[word]:
            best[word] = prob
    ordered = sorted(best.items(), key=lambda item: (-item[1], item[0]))[:k]
    return SuggestionList(
        backend_id=backend_id,
        entries=tuple(Suggestion(word, prob) for word, prob in ordered),
    )
