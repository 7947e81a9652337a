"""Linear model-selection classifiers.

Two kinds over the same engineered feature vector:

- single-label: softmax regression naming the one backend whose output to
  trust for this query;
- multi-label: one independent logistic regression per backend predicting
  whether that backend's top suggestion will be correct.

Both train with (mini-batch) gradient descent on cross-entropy plus an L2
penalty on the weights. Losses are written in logsumexp/softplus form so the
analytic gradients check cleanly against finite differences.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

SINGLE_LABEL = "single-label"
MULTI_LABEL = "multi-label"

FEATURE_LAYOUT_VERSION = 1

_FORMAT = "autosimp-selector"
_VERSION = 1


@dataclass(frozen=True)
class SelectorExample:
    """One training row: features plus exactly one kind of label."""

    features: tuple[float, ...]
    label_single: int | None = None
    label_multi: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.label_single is None) == (self.label_multi is None):
            raise ValueError("exactly one of label_single / label_multi must be set")


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    epochs: int = 300
    seed: int = 0
    batch_size: int | None = None  # None = full batch


# -- loss / gradient cores (shared by training and the gradient checks) -----


def single_label_loss_grad(
    weights: np.ndarray, bias: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean softmax cross-entropy + l2*||W||^2; returns (loss, dW, db)."""
    n = X.shape[0]
    logits = X @ weights.T + bias
    zmax = logits.max(axis=1, keepdims=True)
    lse = zmax[:, 0] + np.log(np.exp(logits - zmax).sum(axis=1))
    loss = float((lse - logits[np.arange(n), y]).mean() + l2 * (weights**2).sum())
    probs = np.exp(logits - zmax)
    probs /= probs.sum(axis=1, keepdims=True)
    probs[np.arange(n), y] -= 1.0
    probs /= n
    grad_w = probs.T @ X + 2.0 * l2 * weights
    grad_b = probs.sum(axis=0)
    return loss, grad_w, grad_b


def multi_label_loss_grad(
    weights: np.ndarray, bias: np.ndarray, X: np.ndarray, Y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean (over rows) summed binary cross-entropy + l2*||W||^2."""
    n = X.shape[0]
    logits = X @ weights.T + bias
    # softplus(z) - y*z == -[y log s(z) + (1-y) log(1-s(z))]
    loss = float(
        (np.logaddexp(0.0, logits) - Y * logits).sum(axis=1).mean()
        + l2 * (weights**2).sum()
    )
    delta = (1.0 / (1.0 + np.exp(-logits)) - Y) / n
    grad_w = delta.T @ X + 2.0 * l2 * weights
    grad_b = delta.sum(axis=0)
    return loss, grad_w, grad_b


@dataclass
class SelectorModel:
    kind: str
    weights: np.ndarray  # (classes-or-backends, features)
    bias: np.ndarray
    registry_order: tuple[str, ...]
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    feature_layout_version: int = FEATURE_LAYOUT_VERSION
    loss_history: list[float] = field(default_factory=list)

    def _standardize(self, features: Sequence[float]) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        if x.shape != self.feature_mean.shape:
            raise ValueError(
                f"feature vector has length {x.shape}, expected {self.feature_mean.shape}"
            )
        return (x - self.feature_mean) / self.feature_scale

    def scores(self, features: Sequence[float]) -> np.ndarray:
        return self.weights @ self._standardize(features) + self.bias

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": _FORMAT,
            "version": _VERSION,
            "kind": self.kind,
            "registry_order": list(self.registry_order),
            "feature_layout_version": self.feature_layout_version,
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "feature_mean": self.feature_mean.tolist(),
            "feature_scale": self.feature_scale.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SelectorModel":
        if data.get("format") != _FORMAT:
            raise ValueError(f"not a selector file (format={data.get('format')!r})")
        if data.get("version") != _VERSION:
            raise ValueError(f"unsupported selector version: {data.get('version')!r}")
        return cls(
            kind=data["kind"],
            weights=np.array(data["weights"], dtype=np.float64),
            bias=np.array(data["bias"], dtype=np.float64),
            registry_order=tuple(data["registry_order"]),
            feature_mean=np.array(data["feature_mean"], dtype=np.float64),
            feature_scale=np.array(data["feature_scale"], dtype=np.float64),
            feature_layout_version=int(data["feature_layout_version"]),
        )

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "SelectorModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train_selector(
    examples: Sequence[SelectorExample],
    kind: str,
    registry_order: Sequence[str],
    config: TrainConfig | None = None,
) -> SelectorModel:
    """Fit a selector with deterministic seeded gradient descent.

    Features are standardized internally (mean/scale stored on the model),
    so the default learning rate behaves across raw feature scales.
    """
    if not examples:
        raise ValueError("cannot train a selector on an empty example set")
    if kind not in (SINGLE_LABEL, MULTI_LABEL):
        raise ValueError(f"unknown selector kind: {kind!r}")
    cfg = config or TrainConfig()
    registry_order = tuple(registry_order)
    n_out = len(registry_order)

    dims = {len(ex.features) for ex in examples}
    if len(dims) != 1:
        raise ValueError(f"inconsistent feature dimensions: {sorted(dims)}")
    X = np.array([ex.features for ex in examples], dtype=np.float64)

    if kind == SINGLE_LABEL:
        if any(ex.label_single is None for ex in examples):
            raise ValueError("single-label training needs label_single on every example")
        y = np.array([ex.label_single for ex in examples], dtype=np.int64)
        if y.min() < 0 or y.max() >= n_out:
            raise ValueError("label_single outside registry range")
    else:
        if any(ex.label_multi is None for ex in examples):
            raise ValueError("multi-label training needs label_multi on every example")
        Y = np.array([ex.label_multi for ex in examples], dtype=np.float64)
        if Y.shape[1] != n_out:
            raise ValueError(
                f"label_multi length {Y.shape[1]} != registry size {n_out}"
            )

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale < 1e-12, 1.0, scale)
    Xs = (X - mean) / scale

    n = Xs.shape[0]
    n_feat = Xs.shape[1]
    weights = np.zeros((n_out, n_feat), dtype=np.float64)
    bias = np.zeros(n_out, dtype=np.float64)
    rng = np.random.default_rng(cfg.seed)
    loss_grad = single_label_loss_grad if kind == SINGLE_LABEL else multi_label_loss_grad
    targets = y if kind == SINGLE_LABEL else Y

    batch = cfg.batch_size
    history: list[float] = []
    for _epoch in range(cfg.epochs):
        if batch is None or batch >= n:
            _loss, gw, gb = loss_grad(weights, bias, Xs, targets, cfg.l2)
            weights -= cfg.learning_rate * gw
            bias -= cfg.learning_rate * gb
        else:
            perm = rng.permutation(n)
            for start in range(0, n, batch):
                idx = perm[start : start + batch]
                _loss, gw, gb = loss_grad(weights, bias, Xs[idx], targets[idx], cfg.l2)
                weights -= cfg.learning_rate * gw
                bias -= cfg.learning_rate * gb
        epoch_loss, _gw, _gb = loss_grad(weights, bias, Xs, targets, cfg.l2)
        history.append(epoch_loss)

    return SelectorModel(
        kind=kind,
        weights=weights,
        bias=bias,
        registry_order=registry_order,
        feature_mean=mean,
        feature_scale=scale,
        loss_history=history,
    )


def select_single(model: SelectorModel, features: Sequence[float]) -> int:
    """Index of the backend the selector trusts; ties go to the lowest index."""
    if model.kind != SINGLE_LABEL:
        raise ValueError(f"select_single needs a single-label model, got {model.kind}")
    return int(np.argmax(model.scores(features)))


def select_multi(model: SelectorModel, features: Sequence[float]) -> tuple[int, ...]:
    """Per-backend correctness bits (sigmoid score thresholded at 0.5)."""
    if model.kind != MULTI_LABEL:
        raise ValueError(f"select_multi needs a multi-label model, got {model.kind}")
    return tuple(int(z >= 0.0) for z in model.scores(features))
