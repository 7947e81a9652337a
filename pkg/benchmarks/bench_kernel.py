"""Compare the compiled and pure-Python interpolation kernels.

Builds a synthetic corpus, trains a context-aware trigram model, and times
full predictions (distribution + top-k) through each kernel.

    python3 benchmarks/bench_kernel.py [--sentences 3000] [--queries 2000]
"""

import argparse
import random
import time

from autosimp import kernel
from autosimp import _scores_py
from autosimp.lm import CONCAT, train_ngram
from autosimp.types import PredictionContext

try:
    from autosimp import _scores as _scores_cy
except ImportError:
    _scores_cy = None


def build_world(n_sentences: int, vocab_size: int, seed: int = 0):
    rng = random.Random(seed)
    vocab = [f"w{i}" for i in range(vocab_size)]
    corpus = [
        [rng.choice(vocab) for _ in range(rng.randint(4, 18))]
        for _ in range(n_sentences)
    ]
    model = train_ngram(corpus, order=3, copy_weight=0.3, context_mode=CONCAT)
    contexts = []
    for _ in range(256):
        typed = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 10)))
        difficult = tuple(rng.choice(vocab) for _ in range(rng.randint(5, 25)))
        contexts.append(PredictionContext(typed=typed, difficult=difficult))
    return model, contexts


def time_kernel(name, impl, model, contexts, queries, k=5):
    original = kernel.interpolated_scores
    kernel.interpolated_scores = impl
    try:
        model.predict(contexts[0], k)  # warm up
        start = time.perf_counter()
        for i in range(queries):
            model.predict(contexts[i % len(contexts)], k)
        elapsed = time.perf_counter() - start
    finally:
        kernel.interpolated_scores = original
    return elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sentences", type=int, default=3000)
    parser.add_argument("--vocab", type=int, default=400)
    parser.add_argument("--queries", type=int, default=2000)
    args = parser.parse_args()

    print(f"corpus: {args.sentences} sentences, vocab {args.vocab}; "
          f"{args.queries} order-3 predictions with copy bias")
    model, contexts = build_world(args.sentences, args.vocab)

    results = []
    results.append(("python", time_kernel("python", _scores_py.interpolated_scores,
                                          model, contexts, args.queries)))
    if _scores_cy is not None:
        results.append(("cython", time_kernel("cython", _scores_cy.interpolated_scores,
                                              model, contexts, args.queries)))
    else:
        print("compiled kernel not built; showing pure-Python numbers only")

    print(f"\n{'kernel':<8} {'total s':>9} {'us/query':>10} {'speedup':>8}")
    base = results[0][1]
    for name, elapsed in results:
        per = elapsed / args.queries * 1e6
        print(f"{name:<8} {elapsed:>9.3f} {per:>10.1f} {base / elapsed:>8.2f}x")


if __name__ == "__main__":
    main()
