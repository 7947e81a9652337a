"""Run backends and ensembles over tasks and build evaluation reports.

All tie-break randomness is keyed per task (pair id + position), so the
per-task results are independent of evaluation order and the reports are
identical whether tasks are scored serially, permuted, or in parallel.
"""

from dataclasses import dataclass
from typing import Sequence

from .backends import BackendRegistry
from .ensemble import (
    EnsembleConfig,
    NoSuggestionError,
    majority_vote_ranked,
    score_4cc,
    score_multilabel,
    task_features,
)
from .evaluation import (
    DEFAULT_MAX_N,
    EvalReport,
    PredictionTask,
    build_report,
    upper_bound,
)
from .selector import SelectorModel, select_multi, select_single
from .types import SuggestionList

MAJORITY_VOTE_ID = "majority-vote"
SELECTOR_4CC_ID = "4cc"
SELECTOR_MULTILABEL_ID = "multilabel"


@dataclass
class SystemOutput:
    """Per-task output of one system: top-1 words, ranked lists, winners."""

    system_id: str
    predictions: list[str | None]
    ranked: list[SuggestionList]
    winners: list[str] | None = None  # ensemble wins only


def collect_suggestions(
    registry: BackendRegistry, tasks: Sequence[PredictionTask], k: int
) -> list[list[SuggestionList]]:
    """Per-task, per-backend suggestion lists (the expensive step)."""
    grid = []
    for task in tasks:
        ctx = task.context()
        grid.append([backend.predict(ctx, k) for backend in registry])
    return grid


def _top1_pairs(lists: Sequence[SuggestionList]) -> list[tuple[str, float] | None]:
    out = []
    for slist in lists:
        top = slist.top1()
        out.append((top.word, top.prob) if top else None)
    return out


def run_backend_systems(
    registry: BackendRegistry,
    tasks: Sequence[PredictionTask],
    grid: Sequence[Sequence[SuggestionList]],
) -> list[SystemOutput]:
    outputs = []
    for b, backend_id in enumerate(registry.ids):
        ranked = [grid[t][b] for t in range(len(tasks))]
        preds = [slist.top1().word if slist.top1() else None for slist in ranked]
        outputs.append(SystemOutput(backend_id, preds, ranked))
    return outputs


def run_majority_vote(
    tasks: Sequence[PredictionTask],
    grid: Sequence[Sequence[SuggestionList]],
    cfg: EnsembleConfig,
) -> SystemOutput:
    preds: list[str | None] = []
    ranked: list[SuggestionList] = []
    winners: list[str] = []
    for task, lists in zip(tasks, grid):
        try:
            slist, word, chosen = majority_vote_ranked(
                lists, cfg, tie_key=(task.pair_id, task.position)
            )
        except NoSuggestionError:
            preds.append(None)
            ranked.append(SuggestionList(MAJORITY_VOTE_ID, ()))
            continue
        preds.append(word)
        ranked.append(slist)
        winners.extend(chosen)
    return SystemOutput(MAJORITY_VOTE_ID, preds, ranked, winners)


def run_selector_system(
    tasks: Sequence[PredictionTask],
    grid: Sequence[Sequence[SuggestionList]],
    selector: SelectorModel,
    cfg: EnsembleConfig,
    registry_ids: Sequence[str],
) -> SystemOutput:
    """Run the 4cc (single-label) or multilabel ensemble, depending on the
    selector's kind."""
    single = selector.kind == "single-label"
    system_id = SELECTOR_4CC_ID if single else SELECTOR_MULTILABEL_ID
    if tuple(selector.registry_order) != tuple(registry_ids):
        raise ValueError(
            f"selector was trained for backends {selector.registry_order}, "
            f"registry has {tuple(registry_ids)}"
        )
    preds: list[str | None] = []
    ranked: list[SuggestionList] = []
    winners: list[str] = []
    for task, lists in zip(tasks, grid):
        features = task_features(task, lists)
        top1 = _top1_pairs(lists)
        try:
            if single:
                word, j = score_4cc(top1, select_single(selector, features), cfg)
            else:
                word, j = score_multilabel(top1, select_multi(selector, features), cfg)
        except NoSuggestionError:
            preds.append(None)
            ranked.append(SuggestionList(system_id, ()))
            continue
        preds.append(word)
        # The chosen word is the winning backend's own top suggestion, so
        # that backend's ranked list is the ensemble's ranked list.
        ranked.append(lists[j])
        winners.append(registry_ids[j])
    return SystemOutput(system_id, preds, ranked, winners)


def evaluate(
    registry: BackendRegistry,
    tasks: Sequence[PredictionTask],
    cfg: EnsembleConfig | None = None,
    selector_single: SelectorModel | None = None,
    selector_multi: SelectorModel | None = None,
    max_n: int = DEFAULT_MAX_N,
) -> list[EvalReport]:
    """Evaluate every backend plus the configured ensembles on ``tasks``.

    Returns one report per system, backends first (registry order), then
    majority vote, then the selector ensembles that were supplied.
    """
    cfg = cfg or EnsembleConfig()
    k = max(max_n, cfg.vote_pool_k)
    grid = collect_suggestions(registry, tasks, k)
    per_task_top1 = [[p[0] if p else None for p in _top1_pairs(lists)] for lists in grid]
    oracle = upper_bound(per_task_top1, tasks) if tasks else 0.0

    outputs = run_backend_systems(registry, tasks, grid)
    outputs.append(run_majority_vote(tasks, grid, cfg))
    if selector_single is not None:
        outputs.append(
            run_selector_system(tasks, grid, selector_single, cfg, registry.ids)
        )
    if selector_multi is not None:
        outputs.append(
            run_selector_system(tasks, grid, selector_multi, cfg, registry.ids)
        )

    return [
        build_report(
            out.system_id,
            tasks,
            out.predictions,
            out.ranked,
            max_n=max_n,
            oracle=oracle,
            winners=out.winners,
        )
        for out in outputs
    ]
