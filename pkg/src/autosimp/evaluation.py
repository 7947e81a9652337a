"""Prediction tasks and evaluation metrics.

A simple sentence of length n expands into n-1 next-word prediction tasks
(the first word is never predicted). Accuracy is exact token match under the
canonical tokenizer; no synonym credit. Breakdowns slice the same counts by
difficult-sentence length bucket and by prefix length, and the oracle upper
bound marks a task correct when any backend's top suggestion is correct.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import SentencePair
from .text import tokenize
from .types import PredictionContext, SuggestionList

LENGTH_BUCKETS = ("very-short", "short", "medium", "long")

DEFAULT_POSITION_CAP = 20
DEFAULT_MAX_N = 5


@dataclass(frozen=True)
class PredictionTask:
    """Predict ``gold`` after ``prefix`` while simplifying ``difficult``."""

    pair_id: str
    difficult: tuple[str, ...]
    prefix: tuple[str, ...]
    gold: str
    position: int  # == len(prefix)
    difficult_length: int

    def context(self) -> PredictionContext:
        return PredictionContext(typed=self.prefix, difficult=self.difficult)


def generate_tasks(pair: SentencePair) -> list[PredictionTask]:
    """Expand one pair into its n-1 tasks (empty when the simple side has
    fewer than 2 tokens)."""
    simple = pair.simple
    return [
        PredictionTask(
            pair_id=pair.pair_id,
            difficult=pair.difficult,
            prefix=tuple(simple[:i]),
            gold=simple[i],
            position=i,
            difficult_length=len(pair.difficult),
        )
        for i in range(1, len(simple))
    ]


def generate_all_tasks(pairs: Iterable[SentencePair]) -> list[PredictionTask]:
    return [task for pair in pairs for task in generate_tasks(pair)]


def _matches(prediction: str | None, gold: str) -> bool:
    if prediction is None:
        return False
    return tokenize(prediction) == [gold]


def accuracy(predictions: Sequence[str | None], tasks: Sequence[PredictionTask]) -> float:
    """Exact-match rate of top-1 predictions (case-normalized)."""
    if len(predictions) != len(tasks):
        raise ValueError(f"{len(predictions)} predictions for {len(tasks)} tasks")
    if not tasks:
        return 0.0
    hits = sum(1 for p, t in zip(predictions, tasks) if _matches(p, t.gold))
    return hits / len(tasks)


def accuracy_at_n(
    per_task_topk: Sequence[SuggestionList], tasks: Sequence[PredictionTask], n: int
) -> float:
    """Fraction of tasks whose gold word appears in the first n suggestions."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if len(per_task_topk) != len(tasks):
        raise ValueError(f"{len(per_task_topk)} lists for {len(tasks)} tasks")
    if not tasks:
        return 0.0
    hits = 0
    for slist, task in zip(per_task_topk, tasks):
        if any(_matches(e.word, task.gold) for e in slist.entries[:n]):
            hits += 1
    return hits / len(tasks)


def bucket_by_length(m: int) -> str:
    """Difficult-sentence length bucket: <=5, 6-15, 16-19, >=20 tokens."""
    if m <= 5:
        return "very-short"
    if m <= 15:
        return "short"
    if m <= 19:
        return "medium"
    return "long"


def _position_key(position: int, cap: int) -> str:
    return str(position) if position <= cap else f"{cap + 1}+"


def breakdown(
    predictions: Sequence[str | None],
    tasks: Sequence[PredictionTask],
    key: str,
    position_cap: int = DEFAULT_POSITION_CAP,
) -> dict[str, float]:
    """Accuracy restricted to each group; groups with no tasks are omitted.

    ``key`` is "length-bucket" (difficult-sentence length buckets) or
    "position" (words typed so far, capped with an overflow group).
    """
    if len(predictions) != len(tasks):
        raise ValueError(f"{len(predictions)} predictions for {len(tasks)} tasks")
    if key == "length-bucket":
        key_of = lambda t: bucket_by_length(t.difficult_length)
    elif key == "position":
        key_of = lambda t: _position_key(t.position, position_cap)
    else:
        raise ValueError(f"unknown breakdown key: {key!r}")
    totals: dict[str, int] = {}
    hits: dict[str, int] = {}
    for pred, task in zip(predictions, tasks):
        g = key_of(task)
        totals[g] = totals.get(g, 0) + 1
        if _matches(pred, task.gold):
            hits[g] = hits.get(g, 0) + 1
    return {g: hits.get(g, 0) / totals[g] for g in totals}


def upper_bound(
    per_backend_top1: Sequence[Sequence[str | None]], tasks: Sequence[PredictionTask]
) -> float:
    """Oracle ensemble accuracy: correct when ANY backend's top-1 is correct."""
    if len(per_backend_top1) != len(tasks):
        raise ValueError(f"{len(per_backend_top1)} rows for {len(tasks)} tasks")
    if not tasks:
        return 0.0
    hits = sum(
        1
        for words, task in zip(per_backend_top1, tasks)
        if any(_matches(w, task.gold) for w in words)
    )
    return hits / len(tasks)


def usage_frequency(winning_backends: Sequence[str]) -> dict[str, float]:
    """Normalized share of each backend among ensemble wins."""
    if not winning_backends:
        return {}
    counts: dict[str, int] = {}
    for bid in winning_backends:
        counts[bid] = counts.get(bid, 0) + 1
    total = len(winning_backends)
    return {bid: counts[bid] / total for bid in sorted(counts)}


@dataclass
class EvalReport:
    system_id: str
    task_count: int
    accuracy: float
    accuracy_at: dict[int, float]
    by_length: dict[str, float]
    by_position: dict[str, float]
    upper_bound: float | None = None
    usage_frequency: dict[str, float] | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "system_id": self.system_id,
            "task_count": self.task_count,
            "accuracy": self.accuracy,
            "accuracy_at": {str(n): v for n, v in sorted(self.accuracy_at.items())},
            "by_length": dict(self.by_length),
            "by_position": dict(self.by_position),
        }
        if self.upper_bound is not None:
            out["upper_bound"] = self.upper_bound
        if self.usage_frequency is not None:
            out["usage_frequency"] = dict(self.usage_frequency)
        return out


def build_report(
    system_id: str,
    tasks: Sequence[PredictionTask],
    predictions: Sequence[str | None],
    ranked: Sequence[SuggestionList],
    max_n: int = DEFAULT_MAX_N,
    oracle: float | None = None,
    winners: Sequence[str] | None = None,
    position_cap: int = DEFAULT_POSITION_CAP,
) -> EvalReport:
    return EvalReport(
        system_id=system_id,
        task_count=len(tasks),
        accuracy=accuracy(predictions, tasks),
        accuracy_at={n: accuracy_at_n(ranked, tasks, n) for n in range(1, max_n + 1)},
        by_length=breakdown(predictions, tasks, "length-bucket"),
        by_position=breakdown(predictions, tasks, "position", position_cap),
        upper_bound=oracle,
        usage_frequency=usage_frequency(winners) if winners is not None else None,
    )


def render_table(reports: Sequence[EvalReport], max_n: int = DEFAULT_MAX_N) -> str:
    """Aligned plain-text summary of one or more reports."""
    headers = ["system", "tasks", "accuracy"]
    headers += [f"@{n}" for n in range(1, max_n + 1)]
    headers += ["upper-bound"]
    rows = [headers]
    for r in reports:
        row = [r.system_id, str(r.task_count), f"{r.accuracy:.4f}"]
        row += [f"{r.accuracy_at.get(n, float('nan')):.4f}" for n in range(1, max_n + 1)]
        row += ["-" if r.upper_bound is None else f"{r.upper_bound:.4f}"]
        rows.append(row)
    widths = [max(len(row[c]) for row in rows) for c in range(len(headers))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]

    usage_rows = [(r.system_id, r.usage_frequency) for r in reports if r.usage_frequency]
    if usage_rows:
        lines.append("")
        lines.append("usage frequency (share of ensemble wins per backend)")
        for system_id, usage in usage_rows:
            parts = "  ".join(f"{bid}={share:.4f}" for bid, share in sorted(usage.items()))
            lines.append(f"{system_id}: {parts}")
    return "\n".join(lines) + "\n"
