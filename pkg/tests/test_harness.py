import random

import pytest

from autosimp.ensemble import EnsembleConfig, generate_4cc_data, generate_multilabel_data
from autosimp.evaluation import generate_all_tasks
from autosimp.harness import (
    MAJORITY_VOTE_ID,
    SELECTOR_4CC_ID,
    SELECTOR_MULTILABEL_ID,
    collect_suggestions,
    evaluate,
    run_selector_system,
)
from autosimp.selector import MULTI_LABEL, SINGLE_LABEL, TrainConfig, train_selector


@pytest.fixture(scope="module")
def fixture_world(fixture_registry, fixture_pairs):
    tasks = generate_all_tasks(fixture_pairs)
    grid = collect_suggestions(fixture_registry, tasks, k=5)
    train_cfg = TrainConfig(epochs=150, seed=3)
    sel_single = train_selector(
        generate_4cc_data(tasks, grid, random.Random(3)),
        SINGLE_LABEL,
        fixture_registry.ids,
        train_cfg,
    )
    sel_multi = train_selector(
        generate_multilabel_data(tasks, grid),
        MULTI_LABEL,
        fixture_registry.ids,
        train_cfg,
    )
    return fixture_registry, tasks, sel_single, sel_multi


def test_reports_cover_all_systems(fixture_world):
    registry, tasks, sel_single, sel_multi = fixture_world
    reports = evaluate(
        registry, tasks, selector_single=sel_single, selector_multi=sel_multi
    )
    ids = [r.system_id for r in reports]
    assert ids == list(registry.ids) + [
        MAJORITY_VOTE_ID, SELECTOR_4CC_ID, SELECTOR_MULTILABEL_ID,
    ]
    for r in reports:
        assert r.task_count == len(tasks)
        assert 0.0 <= r.accuracy <= 1.0
        assert r.upper_bound is not None


def test_upper_bound_dominates_every_system(fixture_world):
    registry, tasks, sel_single, sel_multi = fixture_world
    reports = evaluate(
        registry, tasks, selector_single=sel_single, selector_multi=sel_multi
    )
    for r in reports:
        assert r.upper_bound >= r.accuracy, r.system_id


def test_accuracy_at_n_monotone_for_every_system(fixture_world):
    registry, tasks, sel_single, sel_multi = fixture_world
    reports = evaluate(
        registry, tasks, selector_single=sel_single, selector_multi=sel_multi
    )
    for r in reports:
        values = [r.accuracy_at[n] for n in sorted(r.accuracy_at)]
        assert values == sorted(values), r.system_id
        assert r.accuracy_at[1] == pytest.approx(r.accuracy)


def test_ensemble_usage_frequencies_normalize(fixture_world):
    registry, tasks, sel_single, sel_multi = fixture_world
    reports = evaluate(
        registry, tasks, selector_single=sel_single, selector_multi=sel_multi
    )
    by_id = {r.system_id: r for r in reports}
    for system_id in (MAJORITY_VOTE_ID, SELECTOR_4CC_ID, SELECTOR_MULTILABEL_ID):
        usage = by_id[system_id].usage_frequency
        assert usage, system_id
        assert sum(usage.values()) == pytest.approx(1.0, abs=1e-9)
        assert set(usage) <= set(registry.ids)
    for backend_id in registry.ids:
        assert by_id[backend_id].usage_frequency is None


def test_task_order_does_not_change_reports(fixture_world):
    registry, tasks, sel_single, sel_multi = fixture_world
    cfg = EnsembleConfig(rng_seed=11)
    base = evaluate(
        registry, tasks, cfg=cfg, selector_single=sel_single, selector_multi=sel_multi
    )
    shuffled = list(tasks)
    random.Random(99).shuffle(shuffled)
    permuted = evaluate(
        registry, shuffled, cfg=cfg, selector_single=sel_single, selector_multi=sel_multi
    )
    for a, b in zip(base, permuted):
        assert a.to_dict() == b.to_dict()


def test_evaluate_is_deterministic(fixture_world):
    registry, tasks, sel_single, sel_multi = fixture_world
    cfg = EnsembleConfig(rng_seed=5)
    a = evaluate(registry, tasks, cfg=cfg, selector_single=sel_single)
    b = evaluate(registry, tasks, cfg=cfg, selector_single=sel_single)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_selector_registry_mismatch_rejected(fixture_world):
    registry, tasks, sel_single, _ = fixture_world
    grid = collect_suggestions(registry, tasks[:2], k=5)
    wrong = train_selector(
        generate_multilabel_data(tasks[:2], grid),
        MULTI_LABEL,
        ("other-a", "other-b", "other-c", "other-d"),
        TrainConfig(epochs=5),
    )
    with pytest.raises(ValueError):
        run_selector_system(tasks, grid, wrong, EnsembleConfig(), registry.ids)
