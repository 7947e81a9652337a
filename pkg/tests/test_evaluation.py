import json

import pytest

from autosimp.corpus import make_pair
from autosimp.evaluation import (
    accuracy,
    accuracy_at_n,
    breakdown,
    bucket_by_length,
    build_report,
    generate_all_tasks,
    generate_tasks,
    render_table,
    upper_bound,
    usage_frequency,
)
from autosimp.types import ranked_suggestions


def slist(*pairs, backend_id="b"):
    return ranked_suggestions(backend_id, pairs, 5)


# -- task expansion -----------------------------------------------------------


def test_golden_pair_expands_to_twelve_tasks(golden_pair):
    tasks = generate_tasks(golden_pair)
    assert len(tasks) == 12
    assert tasks[0].prefix == ("this",)
    assert tasks[0].gold == "insulin"
    assert tasks[-1].prefix == (
        "this", "insulin", "tells", "the", "cells", "to", "take", "up",
        "glucose", "from", "the", "blood",
    )
    assert tasks[-1].gold == "."


def test_two_token_sentence_yields_one_task():
    pair = make_pair("x", "t", "something difficult", "two words")
    tasks = generate_tasks(pair)
    assert len(tasks) == 1
    assert tasks[0].prefix == ("two",)
    assert tasks[0].gold == "words"


def test_single_token_sentence_yields_nothing():
    pair = make_pair("x", "t", "something difficult", "word")
    assert generate_tasks(pair) == []


def test_task_count_identity(fixture_pairs):
    tasks = generate_all_tasks(fixture_pairs)
    assert len(tasks) == sum(len(p.simple) - 1 for p in fixture_pairs)
    assert len(tasks) == 20  # simple sides of lengths 3,4,5,6,7


def test_task_bookkeeping(golden_pair):
    for task in generate_tasks(golden_pair):
        assert task.position == len(task.prefix)
        assert task.prefix + (task.gold,) == golden_pair.simple[: task.position + 1]
        assert task.difficult_length == len(golden_pair.difficult)


# -- accuracy -----------------------------------------------------------------


def _tasks(n=4, gold="g"):
    pair = make_pair("p", "t", "difficult stuff", " ".join(["w"] * n) + f" {gold}")
    return generate_tasks(pair)


def test_accuracy_all_correct_and_all_wrong():
    tasks = _tasks(3)
    golds = [t.gold for t in tasks]
    assert accuracy(golds, tasks) == 1.0
    assert accuracy(["nope"] * len(tasks), tasks) == 0.0


def test_accuracy_partial(golden_pair):
    tasks = generate_tasks(golden_pair)
    preds = [t.gold if i < 3 else "wrong" for i, t in enumerate(tasks)]
    assert accuracy(preds, tasks) == 0.25  # 3 of 12


def test_accuracy_case_normalized():
    tasks = _tasks(2)
    preds = [t.gold.upper() for t in tasks]
    assert accuracy(preds, tasks) == 1.0


def test_accuracy_none_counts_as_wrong():
    tasks = _tasks(2)
    preds = [tasks[0].gold] + [None] * (len(tasks) - 1)
    assert accuracy(preds, tasks) == pytest.approx(1 / len(tasks))


def test_accuracy_at_one_equals_top1_accuracy():
    tasks = _tasks(3)
    lists = [slist((t.gold, 0.9), ("x", 0.1)) for t in tasks]
    preds = [l.entries[0].word for l in lists]
    assert accuracy_at_n(lists, tasks, 1) == accuracy(preds, tasks)


def test_gold_at_rank_two():
    tasks = _tasks(3)
    lists = [slist(("x", 0.9), (t.gold, 0.1)) for t in tasks]
    assert accuracy_at_n(lists, tasks, 1) == 0.0
    assert accuracy_at_n(lists, tasks, 2) == 1.0


def test_accuracy_at_n_against_membership_scan(fixture_pairs):
    import random

    rng = random.Random(0)
    tasks = generate_all_tasks(fixture_pairs)
    vocab = sorted({w for p in fixture_pairs for w in p.simple})
    lists = []
    for t in tasks:
        cands = rng.sample(vocab, 5)
        lists.append(slist(*[(w, (5 - i) / 10) for i, w in enumerate(cands)]))
    for n in range(1, 6):
        scan = sum(
            1 for t, l in zip(tasks, lists) if t.gold in [e.word for e in l.entries[:n]]
        ) / len(tasks)
        assert accuracy_at_n(lists, tasks, n) == pytest.approx(scan)


def test_accuracy_at_n_nondecreasing(fixture_pairs):
    import random

    rng = random.Random(1)
    tasks = generate_all_tasks(fixture_pairs)
    lists = [
        slist(*[(f"w{rng.randint(0, 8)}", p) for p in (0.5, 0.3, 0.1)])
        for _ in tasks
    ]
    values = [accuracy_at_n(lists, tasks, n) for n in range(1, 6)]
    assert values == sorted(values)


# -- buckets and breakdowns ------------------------------------------------------


def test_length_buckets():
    assert bucket_by_length(1) == "very-short"
    assert bucket_by_length(5) == "very-short"
    assert bucket_by_length(6) == "short"
    assert bucket_by_length(15) == "short"
    assert bucket_by_length(16) == "medium"
    assert bucket_by_length(19) == "medium"
    assert bucket_by_length(20) == "long"
    assert bucket_by_length(50) == "long"


def test_breakdown_single_bucket_matches_overall():
    tasks = _tasks(4)
    preds = [t.gold for t in tasks[:2]] + ["x"] * (len(tasks) - 2)
    by = breakdown(preds, tasks, "length-bucket")
    assert list(by) == [bucket_by_length(tasks[0].difficult_length)]
    assert by[bucket_by_length(tasks[0].difficult_length)] == accuracy(preds, tasks)


def test_breakdown_two_buckets_hand_counted():
    short_pair = make_pair("s", "t", "three token sentence", "a b c")
    long_pair = make_pair(
        "l", "t", " ".join(["tok"] * 25), "a b c d"
    )
    tasks = generate_tasks(short_pair) + generate_tasks(long_pair)
    # short: 2 tasks, 1 correct; long: 3 tasks, 2 correct
    preds = [tasks[0].gold, "x", tasks[2].gold, tasks[3].gold, "x"]
    by = breakdown(preds, tasks, "length-bucket")
    assert by["very-short"] == pytest.approx(1 / 2)
    assert by["long"] == pytest.approx(2 / 3)


def test_breakdown_weighted_mean_reconstructs_overall(fixture_pairs):
    import random

    rng = random.Random(2)
    tasks = generate_all_tasks(fixture_pairs)
    preds = [t.gold if rng.random() < 0.5 else "x" for t in tasks]
    for key in ("length-bucket", "position"):
        by = breakdown(preds, tasks, key)
        counts: dict[str, int] = {}
        for t in tasks:
            g = (
                bucket_by_length(t.difficult_length)
                if key == "length-bucket"
                else (str(t.position) if t.position <= 20 else "21+")
            )
            counts[g] = counts.get(g, 0) + 1
        weighted = sum(by[g] * counts[g] for g in by) / len(tasks)
        assert abs(weighted - accuracy(preds, tasks)) < 1e-12


def test_breakdown_position_overflow_bucket():
    pair = make_pair("p", "t", "difficult", " ".join(f"w{i}" for i in range(25)))
    tasks = generate_tasks(pair)
    by = breakdown([t.gold for t in tasks], tasks, "position", position_cap=20)
    assert "21+" in by
    assert str(21) not in by


# -- upper bound and usage ---------------------------------------------------------


def test_upper_bound_of_disjoint_specialists():
    pair = make_pair("p", "t", "difficult stuff", " ".join(["z"] * 7))
    tasks = generate_tasks(pair)  # 6 tasks, every gold is "z"
    n = len(tasks)
    per_task = []
    for i in range(n):
        words = ["a", "b", "c"]
        words[i % 3] = "z"  # each backend correct on its own third
        per_task.append(words)
    assert upper_bound(per_task, tasks) == 1.0
    for b in range(3):
        preds = [row[b] for row in per_task]
        assert accuracy(preds, tasks) <= 1 / 3 + 1e-9


def test_upper_bound_identical_backends():
    tasks = _tasks(4)
    per_task = [[t.gold, t.gold] if i % 2 else ["x", "x"] for i, t in enumerate(tasks)]
    preds = [row[0] for row in per_task]
    assert upper_bound(per_task, tasks) == accuracy(preds, tasks)


def test_upper_bound_zero_when_never_correct():
    tasks = _tasks(3)
    assert upper_bound([["x", "y"] for _ in tasks], tasks) == 0.0


def test_usage_frequency_normalizes():
    assert usage_frequency(["b0"] * 4) == {"b0": 1.0}
    assert usage_frequency(["b0", "b1", "b2", "b3"]) == {
        "b0": 0.25, "b1": 0.25, "b2": 0.25, "b3": 0.25,
    }
    assert usage_frequency(["b0", "b0", "b0", "b1"]) == {"b0": 0.75, "b1": 0.25}
    assert usage_frequency([]) == {}


# -- report -------------------------------------------------------------------------


def test_report_schema_field_names():
    tasks = _tasks(3)
    lists = [slist((t.gold, 0.8)) for t in tasks]
    preds = [t.gold for t in tasks]
    report = build_report(
        "sys", tasks, preds, lists, oracle=1.0, winners=["b0", "b1", "b0"]
    )
    data = report.to_dict()
    assert set(data) == {
        "system_id", "task_count", "accuracy", "accuracy_at",
        "by_length", "by_position", "upper_bound", "usage_frequency",
    }
    assert set(data["accuracy_at"]) == {"1", "2", "3", "4", "5"}
    json.dumps(data)  # must be JSON-serializable as-is


def test_report_optional_fields_omitted():
    tasks = _tasks(2)
    lists = [slist((t.gold, 0.8)) for t in tasks]
    report = build_report("sys", tasks, [t.gold for t in tasks], lists)
    data = report.to_dict()
    assert "upper_bound" not in data
    assert "usage_frequency" not in data


def test_render_table_aligns():
    tasks = _tasks(3)
    lists = [slist((t.gold, 0.8)) for t in tasks]
    reports = [
        build_report("alpha", tasks, [t.gold for t in tasks], lists, oracle=1.0),
        build_report(
            "a-much-longer-name", tasks, ["x"] * len(tasks), lists, oracle=1.0,
            winners=["b0", "b0", "b1"],
        ),
    ]
    table = render_table(reports)
    lines = table.splitlines()
    assert lines[0].startswith("system")
    assert "alpha" in table and "a-much-longer-name" in table
    assert "usage frequency" in table
