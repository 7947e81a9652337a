"""Operator command line: extract, split, train-lm, train-selector, eval, serve.

Every subcommand prints its resolved configuration to stderr and is
reproducible: identical inputs, flags and seeds produce byte-identical
output files.
"""

import argparse
import json
import random
import sys
from pathlib import Path

from . import backends as backends_mod
from . import corpus as corpus_mod
from .config import load_service_config
from .ensemble import EnsembleConfig, generate_4cc_data, generate_multilabel_data
from .evaluation import generate_all_tasks, render_table
from .harness import collect_suggestions, evaluate
from .lm import TrainingError
from .selector import (
    MULTI_LABEL,
    SINGLE_LABEL,
    SelectorModel,
    TrainConfig,
    train_selector,
)


def _print_config(name: str, values: dict) -> None:
    print(f"[{name}] resolved config:", file=sys.stderr)
    for key in sorted(values):
        print(f"  {key} = {values[key]}", file=sys.stderr)


def _ensemble_config(args) -> EnsembleConfig:
    return EnsembleConfig(
        alpha=args.alpha,
        theta=args.theta,
        beta=args.beta,
        sigma=args.sigma,
        membership_bonus=args.membership_bonus,
        vote_pool_k=args.vote_pool_k,
        rng_seed=args.seed,
    )


def _add_ensemble_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.5, help="confidence weight (single-label scoring)")
    parser.add_argument("--theta", type=float, default=0.5, help="selection weight (single-label scoring)")
    parser.add_argument("--beta", type=float, default=0.5, help="confidence weight (multi-label scoring)")
    parser.add_argument("--sigma", type=float, default=0.5, help="membership weight (multi-label scoring)")
    parser.add_argument("--membership-bonus", type=float, default=0.25)
    parser.add_argument("--vote-pool-k", type=int, default=5)


def cmd_extract(args) -> int:
    _print_config("extract", vars(args))
    pairs = corpus_mod.read_pairs_tsv(args.pairs)
    dictionary = corpus_mod.read_dictionary(args.dictionary)
    kept = corpus_mod.filter_medical(
        pairs, dictionary, threshold=args.threshold, min_matches=args.min_matches
    )
    if args.exclude:
        kept = corpus_mod.apply_exclusions(kept, corpus_mod.read_exclusions(args.exclude))
    corpus_mod.write_pairs_tsv(args.output, kept)
    print(f"kept {len(kept)} of {len(pairs)} pairs -> {args.output}", file=sys.stderr)
    return 0


def cmd_split(args) -> int:
    _print_config("split", vars(args))
    pairs = corpus_mod.read_pairs_tsv(args.pairs)
    split = corpus_mod.split_dataset(
        pairs, ratios=(args.train, args.dev, args.test), seed=args.seed
    )
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, subset in (("train", split.train), ("dev", split.dev), ("test", split.test)):
        corpus_mod.write_pairs_tsv(outdir / f"{name}.tsv", subset)
    print(
        f"split {len(pairs)} pairs into {len(split.train)}/{len(split.dev)}/{len(split.test)}"
        f" -> {outdir}",
        file=sys.stderr,
    )
    return 0


def cmd_train_lm(args) -> int:
    _print_config("train-lm", vars(args))
    pairs = corpus_mod.read_pairs_tsv(args.pairs)
    if not pairs:
        raise TrainingError(f"no training pairs in {args.pairs}")
    registry = backends_mod.train_standard_backends(pairs)
    backends_mod.save_registry(args.output_dir, registry)
    print(f"trained {len(registry)} backends -> {args.output_dir}", file=sys.stderr)
    return 0


def cmd_train_selector(args) -> int:
    _print_config("train-selector", vars(args))
    registry = backends_mod.load_registry(args.models)
    pairs = corpus_mod.read_pairs_tsv(args.pairs)
    tasks = generate_all_tasks(pairs)
    if not tasks:
        raise TrainingError(f"no prediction tasks derivable from {args.pairs}")
    grid = collect_suggestions(registry, tasks, k=max(5, args.vote_pool_k))
    if args.kind == "4cc":
        examples = generate_4cc_data(tasks, grid, random.Random(args.seed))
        kind = SINGLE_LABEL
    else:
        examples = generate_multilabel_data(tasks, grid)
        kind = MULTI_LABEL
    config = TrainConfig(
        learning_rate=args.learning_rate,
        l2=args.l2,
        epochs=args.epochs,
        seed=args.seed,
        batch_size=args.batch_size,
    )
    model = train_selector(examples, kind, registry.ids, config)
    model.save(args.output)
    print(
        f"trained {args.kind} selector on {len(examples)} examples -> {args.output}",
        file=sys.stderr,
    )
    return 0


def cmd_eval(args) -> int:
    _print_config("eval", vars(args))
    registry = backends_mod.load_registry(args.models)
    pairs = corpus_mod.read_pairs_tsv(args.pairs)
    tasks = generate_all_tasks(pairs)
    selector_single = (
        SelectorModel.load(args.selector_4cc) if args.selector_4cc else None
    )
    selector_multi = (
        SelectorModel.load(args.selector_multilabel) if args.selector_multilabel else None
    )
    reports = evaluate(
        registry,
        tasks,
        cfg=_ensemble_config(args),
        selector_single=selector_single,
        selector_multi=selector_multi,
        max_n=args.max_n,
    )
    report_json = json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)
    Path(args.report).write_text(report_json + "\n", encoding="utf-8")
    table = render_table(reports, max_n=args.max_n)
    if args.table:
        Path(args.table).write_text(table, encoding="utf-8")
    else:
        print(table, end="")
    print(f"evaluated {len(tasks)} tasks -> {args.report}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .remote import RemoteBackend
    from .service import EventLog, SessionStore, SuggestionService, create_app

    cfg = load_service_config(args.config)
    if args.host:
        cfg.host = args.host
    if args.port:
        cfg.port = args.port
    if args.models:
        cfg.models_dir = args.models
    _print_config("serve", cfg.resolved())
    if not cfg.models_dir:
        raise ValueError("serve needs a models directory (config models_dir or --models)")

    extra = [
        RemoteBackend(
            spec["backend_id"],
            spec["endpoint"],
            timeout=float(spec.get("timeout", cfg.remote_timeout)),
        )
        for spec in cfg.remote_backends
    ]
    registry = backends_mod.load_registry(cfg.models_dir, extra=extra)
    selector_single = (
        SelectorModel.load(cfg.selector_4cc) if cfg.selector_4cc else None
    )
    selector_multi = (
        SelectorModel.load(cfg.selector_multilabel) if cfg.selector_multilabel else None
    )
    service = SuggestionService(
        registry,
        cfg=EnsembleConfig(rng_seed=cfg.seed),
        selector_single=selector_single,
        selector_multi=selector_multi,
    )
    data_dir = Path(cfg.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    app = create_app(
        service,
        store=SessionStore(data_dir / "sessions.db"),
        event_log=EventLog(data_dir / "events.jsonl"),
    )
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autosimp",
        description="Autocomplete workbench for sentence-level text simplification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="filter a parallel corpus down to medical pairs")
    p.add_argument("--pairs", required=True, help="input TSV: id, title, difficult, simple")
    p.add_argument("--dictionary", required=True, help="term file, one term per line")
    p.add_argument("--output", required=True, help="output TSV of kept pairs")
    p.add_argument("--threshold", type=float, default=corpus_mod.DEFAULT_THRESHOLD)
    p.add_argument("--min-matches", type=int, default=corpus_mod.DEFAULT_MIN_MATCHES)
    p.add_argument("--exclude", help="manual-review exclusion list (one pair id per line)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("split", help="shuffle and split a corpus into train/dev/test")
    p.add_argument("--pairs", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--train", type=float, default=0.70)
    p.add_argument("--dev", type=float, default=0.15)
    p.add_argument("--test", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train-lm", help="train the four standard backends")
    p.add_argument("--pairs", required=True, help="training pairs TSV")
    p.add_argument("--output-dir", required=True, help="model directory to write")
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("train-selector", help="train an ensemble selector")
    p.add_argument("--kind", choices=("4cc", "multilabel"), required=True)
    p.add_argument("--models", required=True, help="model directory from train-lm")
    p.add_argument("--pairs", required=True, help="pairs TSV to generate selector data from")
    p.add_argument("--output", required=True, help="selector file to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--vote-pool-k", type=int, default=5)
    p.set_defaults(func=cmd_train_selector)

    p = sub.add_parser("eval", help="evaluate backends and ensembles on a pairs file")
    p.add_argument("--models", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--report", required=True, help="report JSON to write")
    p.add_argument("--table", help="aligned-text table file (default: stdout)")
    p.add_argument("--selector-4cc", help="selector file for the single-label ensemble")
    p.add_argument("--selector-multilabel", help="selector file for the multi-label ensemble")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_ensemble_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP suggestion service")
    p.add_argument("--config", help="JSON config file (see README)")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--models", help="override models_dir from the config")
    p.set_defaults(func=cmd_serve)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (corpus_mod.CorpusError, TrainingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
