"""Parallel simplification corpora: medical-pair extraction, filtering, splits.

A sentence pair is kept as "medical" when both the article title and the
difficult sentence contain at least ``min_matches`` dictionary terms, where a
term matches a token span if their character-trigram Jaccard similarity
reaches the threshold (default 0.85). Span matching is greedy left-to-right,
longest span first, without overlaps.
"""

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .text import tokenize

MAX_TERM_TOKENS = 8
DEFAULT_THRESHOLD = 0.85
DEFAULT_MIN_MATCHES = 4
DEFAULT_RATIOS = (0.70, 0.15, 0.15)


class CorpusError(ValueError):
    """A corpus file or corpus-level precondition is unusable."""


@dataclass(frozen=True)
class Term:
    """One dictionary entry in canonical form (lowercase, space-joined)."""

    surface: str
    tokens: tuple[str, ...]


def make_term(raw: str) -> Term:
    toks = tokenize(raw)
    if not toks:
        raise CorpusError(f"empty dictionary term: {raw!r}")
    if len(toks) > MAX_TERM_TOKENS:
        raise CorpusError(
            f"dictionary term longer than {MAX_TERM_TOKENS} tokens: {raw!r}"
        )
    return Term(surface=" ".join(toks), tokens=tuple(toks))


def char_trigrams(s: str) -> frozenset[str]:
    """Distinct character trigrams of ``s`` (empty for strings under 3 chars)."""
    return frozenset(s[i : i + 3] for i in range(len(s) - 2))


def _trigram_jaccard(a: str, b: str) -> float:
    ta, tb = char_trigrams(a), char_trigrams(b)
    if not ta and not tb:
        # Degenerate strings too short to produce trigrams: fall back to
        # exact equality so identical short terms still score 1.0.
        return 1.0 if a == b else 0.0
    if not ta or not tb:
        return 0.0
    inter = len(ta & tb)
    if inter == 0:
        return 0.0
    return inter / len(ta | tb)


class Dictionary:
    """A term dictionary with a trigram index for approximate span lookup."""

    def __init__(self, terms: Iterable[Term]):
        by_surface: dict[str, Term] = {}
        for term in terms:
            by_surface.setdefault(term.surface, term)
        self.terms: tuple[Term, ...] = tuple(
            by_surface[s] for s in sorted(by_surface)
        )
        self.max_term_tokens: int = max(
            (len(t.tokens) for t in self.terms), default=0
        )
        self._surfaces = frozenset(by_surface)
        # trigram -> indices of terms containing it; terms too short to have
        # trigrams can only ever match a span exactly, which the surface set
        # already covers.
        self._index: dict[str, list[int]] = {}
        self._term_trigrams: list[frozenset[str]] = []
        for i, term in enumerate(self.terms):
            grams = char_trigrams(term.surface)
            self._term_trigrams.append(grams)
            for g in grams:
                self._index.setdefault(g, []).append(i)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, surface: str) -> bool:
        return surface in self._surfaces

    def best_similarity(self, span: Sequence[str]) -> float:
        """Best term_similarity of ``span`` against any dictionary term."""
        joined = " ".join(span)
        if joined in self._surfaces:
            return 1.0
        grams = char_trigrams(joined)
        if not grams:
            return 0.0  # non-exact degenerate span cannot match anything
        seen: set[int] = set()
        best = 0.0
        for g in grams:
            seen.update(self._index.get(g, ()))
        for i in seen:
            tg = self._term_trigrams[i]
            if not tg:
                continue
            inter = len(grams & tg)
            if inter:
                best = max(best, inter / len(grams | tg))
        return best


def term_similarity(candidate: Sequence[str], term: Term) -> float:
    """Jaccard similarity over character trigrams of the space-joined strings.

    Symmetric; 1.0 iff the trigram sets are equal, 0.0 iff they are disjoint.
    """
    if not candidate:
        raise ValueError("candidate span must be non-empty")
    return _trigram_jaccard(" ".join(candidate), term.surface)


def count_term_matches(
    tokens: Sequence[str], dic: Dictionary, threshold: float = DEFAULT_THRESHOLD
) -> int:
    """Count maximal non-overlapping dictionary matches in ``tokens``.

    Greedy left-to-right: at each position the longest span (up to the
    dictionary's longest term) whose best similarity reaches ``threshold`` is
    consumed; unmatched positions advance by one token.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if not dic.terms:
        return 0
    n = len(tokens)
    count = 0
    i = 0
    while i < n:
        taken = 0
        for span_len in range(min(dic.max_term_tokens, n - i), 0, -1):
            if dic.best_similarity(tokens[i : i + span_len]) >= threshold:
                taken = span_len
                break
        if taken:
            count += 1
            i += taken
        else:
            i += 1
    return count


@dataclass(frozen=True)
class SentencePair:
    """One aligned (difficult, simple) pair with its article title."""

    pair_id: str
    title: tuple[str, ...]
    difficult: tuple[str, ...]
    simple: tuple[str, ...]


def make_pair(pair_id: str, title: str, difficult: str, simple: str) -> SentencePair:
    d, s = tokenize(difficult), tokenize(simple)
    if not d or not s:
        raise CorpusError(
            f"pair {pair_id!r}: difficult and simple sides must be non-empty"
        )
    return SentencePair(
        pair_id=pair_id,
        title=tuple(tokenize(title)),
        difficult=tuple(d),
        simple=tuple(s),
    )


def filter_medical(
    pairs: Sequence[SentencePair],
    dic: Dictionary,
    threshold: float = DEFAULT_THRESHOLD,
    min_matches: int = DEFAULT_MIN_MATCHES,
) -> list[SentencePair]:
    """Keep pairs whose title AND difficult sentence each contain at least
    ``min_matches`` dictionary matches. Preserves input order."""
    if min_matches < 1:
        raise ValueError(f"min_matches must be >= 1, got {min_matches}")
    kept = []
    for pair in pairs:
        if count_term_matches(pair.title, dic, threshold) < min_matches:
            continue
        if count_term_matches(pair.difficult, dic, threshold) < min_matches:
            continue
        kept.append(pair)
    return kept


@dataclass
class DatasetSplit:
    train: list[SentencePair] = field(default_factory=list)
    dev: list[SentencePair] = field(default_factory=list)
    test: list[SentencePair] = field(default_factory=list)
    seed: int = 0


def split_dataset(
    pairs: Sequence[SentencePair],
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> DatasetSplit:
    """Shuffle with ``seed`` and slice into train/dev/test.

    Dev and test sizes are floor-rounded; the remainder goes to train so the
    held-out sets never exceed their nominal share.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1.0, got {ratios}")
    if any(r < 0 for r in ratios):
        raise ValueError(f"ratios must be non-negative, got {ratios}")
    if len(pairs) < 3:
        raise CorpusError(
            f"corpus too small to split: {len(pairs)} pairs (need at least 3)"
        )
    shuffled = list(pairs)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_dev = int(n * ratios[1])
    n_test = int(n * ratios[2])
    n_train = n - n_dev - n_test
    return DatasetSplit(
        train=shuffled[:n_train],
        dev=shuffled[n_train : n_train + n_dev],
        test=shuffled[n_train + n_dev :],
        seed=seed,
    )


# ---------------------------------------------------------------------------
# File formats: TSV corpus, one-term-per-line dictionary, exclusion list.
# ---------------------------------------------------------------------------


def read_pairs_tsv(path: str | Path) -> list[SentencePair]:
    """Read a UTF-8 TSV corpus: id <tab> title <tab> difficult <tab> simple.

    Lines starting with '#' and blank lines are ignored.
    """
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise CorpusError(
                    f"{path}:{lineno}: expected 4 tab-separated fields, "
                    f"got {len(fields)}"
                )
            pairs.append(make_pair(*fields))
    return pairs


def write_pairs_tsv(path: str | Path, pairs: Iterable[SentencePair]) -> None:
    """Write pairs in canonical tokenized form (tokens joined by spaces)."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(
                "\t".join(
                    (p.pair_id, " ".join(p.title), " ".join(p.difficult), " ".join(p.simple))
                )
                + "\n"
            )


def read_dictionary(path: str | Path) -> Dictionary:
    """Read a UTF-8 dictionary file, one term per line."""
    terms = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            terms.append(make_term(line))
    return Dictionary(terms)


def read_exclusions(path: str | Path) -> set[str]:
    """Read an exclusion list, one pair id per line (manual-review output)."""
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip() and not line.startswith("#")}


def apply_exclusions(
    pairs: Sequence[SentencePair], excluded_ids: set[str]
) -> list[SentencePair]:
    return [p for p in pairs if p.pair_id not in excluded_ids]
