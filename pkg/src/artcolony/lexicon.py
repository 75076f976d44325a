"""Adversarial comment lexicon and the token matching it implies.

Matching is deliberately simple: lowercase, fold diacritics, split on
non-alphabetic characters, no stemming. A comment is adversarial when any
token is in the lexicon.
"""

from __future__ import annotations

import re
import unicodedata

__all__ = ["ADVERSARIAL_LEXICON", "tokenize", "contains_lexicon_term", "count_lexicon_comments"]

ADVERSARIAL_LEXICON = (
    "boring", "derivative", "predictable", "generic", "uninspired",
    "cliched", "mediocre", "unimaginative", "trite", "hackneyed",
    "overplayed", "overdone", "safe", "timid", "conventional",
    "lazy", "formulaic", "stagnant", "redundant", "superficial",
)

_SPLIT = re.compile(r"[^a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercased, diacritic-folded alphabetic tokens."""
    folded = unicodedata.normalize("NFKD", text.lower())
    folded = "".join(ch for ch in folded if not unicodedata.combining(ch))
    return [tok for tok in _SPLIT.split(folded) if tok]


def contains_lexicon_term(text: str, lexicon=ADVERSARIAL_LEXICON) -> bool:
    vocab = set(lexicon)
    return any(tok in vocab for tok in tokenize(text))


def count_lexicon_comments(texts, lexicon=ADVERSARIAL_LEXICON) -> int:
    """Number of texts containing at least one lexicon token."""
    vocab = set(lexicon)
    return sum(1 for t in texts if any(tok in vocab for tok in tokenize(t)))
