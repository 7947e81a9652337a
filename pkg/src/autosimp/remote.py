"""HTTP client for remote prediction backends.

Remote backends (typically GPU-hosted neural models) expose one endpoint:

    POST /v1/predict
    request:  {"difficult": [tokens] | null, "typed": [tokens], "k": int}
    response: {"backend_id": str, "suggestions": [{"word": str, "prob": float}]}

The client validates and renormalizes responses so the rest of the system
only ever sees well-formed suggestion lists.
"""

import math

import httpx

from .types import PredictionContext, SuggestionList, ranked_suggestions

PREDICT_PATH = "/v1/predict"


class BackendUnavailableError(RuntimeError):
    """The backend could not produce a usable response (distinct from an
    empty suggestion list, which is a valid answer)."""


def _predict_url(endpoint: str) -> str:
    if endpoint.endswith(PREDICT_PATH):
        return endpoint
    return endpoint.rstrip("/") + PREDICT_PATH


def _parse_response(data: object, k: int, backend_id: str | None) -> SuggestionList:
    if not isinstance(data, dict):
        raise BackendUnavailableError(f"malformed response: expected object, got {type(data).__name__}")
    resp_id = data.get("backend_id")
    if not isinstance(resp_id, str) or not resp_id:
        raise BackendUnavailableError("malformed response: missing backend_id")
    raw = data.get("suggestions")
    if not isinstance(raw, list):
        raise BackendUnavailableError("malformed response: missing suggestions list")
    pairs: list[tuple[str, float]] = []
    for item in raw:
        if not isinstance(item, dict):
            raise BackendUnavailableError("malformed response: suggestion is not an object")
        word, prob = item.get("word"), item.get("prob")
        if not isinstance(word, str) or not word:
            raise BackendUnavailableError(f"malformed response: bad word {word!r}")
        if isinstance(prob, bool) or not isinstance(prob, (int, float)):
            raise BackendUnavailableError(f"malformed response: bad prob {prob!r}")
        prob = float(prob)
        if not math.isfinite(prob) or prob <= 0.0 or prob > 1.0:
            raise BackendUnavailableError(f"malformed response: prob out of range: {prob!r}")
        pairs.append((word, prob))
    # Locally enforce the suggestion-list contract: dedupe (best prob wins),
    # renormalize when the reported mass exceeds 1, re-sort, truncate.
    best: dict[str, float] = {}
    for word, prob in pairs:
        if word not in best or prob > best[word]:
            best[word] = prob
    total = sum(best.values())
    if total > 1.0 + 1e-9:
        best = {w: p / total for w, p in best.items()}
    return ranked_suggestions(backend_id or resp_id, best.items(), k)


def remote_predict(
    endpoint: str,
    ctx: PredictionContext,
    k: int,
    timeout: float,
    backend_id: str | None = None,
) -> SuggestionList:
    """Query a remote backend; raises BackendUnavailableError on timeout,
    transport failure, non-2xx status, or a malformed body."""
    payload = {
        "difficult": list(ctx.difficult) if ctx.difficult else None,
        "typed": list(ctx.typed),
        "k": k,
    }
    try:
        resp = httpx.post(_predict_url(endpoint), json=payload, timeout=timeout)
        resp.raise_for_status()
        data = resp.json()
    except httpx.HTTPError as exc:
        raise BackendUnavailableError(f"backend at {endpoint} unavailable: {exc}") from exc
    except ValueError as exc:
        raise BackendUnavailableError(f"backend at {endpoint} returned non-JSON body") from exc
    return _parse_response(data, k, backend_id)


class RemoteBackend:
    """Registry adapter for a remote backend endpoint."""

    def __init__(self, backend_id: str, endpoint: str, timeout: float = 2.0):
        self.backend_id = backend_id
        self.endpoint = endpoint
        self.timeout = timeout

    def predict(self, ctx: PredictionContext, k: int) -> SuggestionList:
        return remote_predict(
            self.endpoint, ctx, k, timeout=self.timeout, backend_id=self.backend_id
        )
