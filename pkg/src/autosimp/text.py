"""Canonical tokenization shared by every stage of the pipeline.

All corpus files, prediction contexts and gold words go through the same
tokenizer so that a word predicted by a backend can be compared to a corpus
token by plain string equality.
"""

import re

# Sentinel tokens. BOS/EOS wrap training sequences, UNK absorbs words that
# are out of vocabulary at prediction time, SEP joins the difficult sentence
# and the typed prefix in context-aware models. None of them is ever emitted
# as a suggestion.
BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
SEP = "<sep>"

RESERVED_TOKENS = frozenset((BOS, EOS, UNK, SEP))

# Punctuation marks that become standalone tokens; everything else is
# whitespace-delimited.
_TOKEN_RE = re.compile(r"[.,;:!?()\"']|[^\s.,;:!?()\"']+")


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into canonical tokens.

    ``. , ; : ! ? ( ) " '`` are isolated into standalone tokens, so a
    sentence-final period is a predictable token of its own. Empty input
    yields an empty list.
    """
    return _TOKEN_RE.findall(text.lower())
