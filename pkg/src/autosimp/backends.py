"""Backend registry and the four standard native backends.

The registry fixes a canonical backend order that everything downstream
(selector labels, feature layout, serialized models, usage reports) relies
on; it must not change between training and evaluation.
"""

import json
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .corpus import SentencePair
from .lm import CONCAT, NO_CONTEXT, NGramModel, train_ngram
from .text import SEP
from .types import PredictionContext, SuggestionList

_REGISTRY_FORMAT = "autosimp-registry"
_REGISTRY_VERSION = 1


class Predictor(Protocol):
    backend_id: str

    def predict(self, ctx: PredictionContext, k: int) -> SuggestionList: ...


class NGramBackend:
    """Binds a backend id to a trained n-gram model."""

    def __init__(self, backend_id: str, model: NGramModel):
        self.backend_id = backend_id
        self.model = model

    def predict(self, ctx: PredictionContext, k: int) -> SuggestionList:
        return self.model.predict(ctx, k, backend_id=self.backend_id)


class BackendRegistry:
    """An ordered, immutable collection of predictors with unique ids."""

    def __init__(self, backends: Iterable[Predictor]):
        self.backends: tuple[Predictor, ...] = tuple(backends)
        ids = [b.backend_id for b in self.backends]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate backend ids: {ids}")
        self.ids: tuple[str, ...] = tuple(ids)

    def __len__(self) -> int:
        return len(self.backends)

    def __iter__(self):
        return iter(self.backends)

    def index_of(self, backend_id: str) -> int:
        return self.ids.index(backend_id)


# The four standard stand-in backends. They are configured with distinct
# orders, context modes and copy weights so their strengths differ and
# ensemble selection has real choices to make.
STANDARD_BACKEND_SPECS: tuple[tuple[str, dict], ...] = (
    ("trigram-context", dict(order=3, context_mode=CONCAT, copy_weight=0.3)),
    ("trigram-plain", dict(order=3, context_mode=NO_CONTEXT, copy_weight=0.0)),
    ("bigram-context", dict(order=2, context_mode=CONCAT, copy_weight=0.5)),
    ("unigram-context", dict(order=1, context_mode=CONCAT, copy_weight=0.7)),
)


def training_sequences(
    pairs: Sequence[SentencePair], context_mode: str
) -> list[list[str]]:
    """Token sequences a backend trains on.

    Context-aware models see the difficult sentence joined to the simple one
    by the separator sentinel; no-context models see only the simple side.
    """
    if context_mode == CONCAT:
        return [list(p.difficult) + [SEP] + list(p.simple) for p in pairs]
    if context_mode == NO_CONTEXT:
        return [list(p.simple) for p in pairs]
    raise ValueError(f"unknown context mode: {context_mode!r}")


def train_standard_backends(pairs: Sequence[SentencePair]) -> BackendRegistry:
    backends = []
    for backend_id, cfg in STANDARD_BACKEND_SPECS:
        corpus = training_sequences(pairs, cfg["context_mode"])
        model = train_ngram(
            corpus,
            order=cfg["order"],
            copy_weight=cfg["copy_weight"],
            context_mode=cfg["context_mode"],
        )
        backends.append(NGramBackend(backend_id, model))
    return BackendRegistry(backends)


def save_registry(directory: str | Path, registry: BackendRegistry) -> None:
    """Write every n-gram backend plus a manifest fixing the canonical order."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    order = []
    for backend in registry:
        if not isinstance(backend, NGramBackend):
            raise ValueError(
                f"only native backends can be serialized, got {type(backend).__name__}"
            )
        backend.model.save(directory / f"{backend.backend_id}.lm.json")
        order.append(backend.backend_id)
    manifest = {
        "format": _REGISTRY_FORMAT,
        "version": _REGISTRY_VERSION,
        "order": order,
    }
    with open(directory / "registry.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_registry(
    directory: str | Path, extra: Sequence[Predictor] = ()
) -> BackendRegistry:
    """Load the saved backends in manifest order; ``extra`` predictors
    (e.g. remote backends) are appended after them."""
    directory = Path(directory)
    with open(directory / "registry.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != _REGISTRY_FORMAT:
        raise ValueError(f"not a registry manifest: {directory / 'registry.json'}")
    backends: list[Predictor] = [
        NGramBackend(bid, NGramModel.load(directory / f"{bid}.lm.json"))
        for bid in manifest["order"]
    ]
    backends.extend(extra)
    return BackendRegistry(backends)
