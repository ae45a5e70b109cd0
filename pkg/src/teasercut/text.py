"""Tokenization and whole-word matching helpers.

Keyword checks throughout the engine are whole-word and case-insensitive:
"art" must not match inside "artist", but "AI" matches "ai". Multi-word
keywords match as a consecutive token sequence.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[0-9a-z]+(?:'[0-9a-z]+)?")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; apostrophes kept inside tokens ("don't")."""
    return _TOKEN_RE.findall(text.lower())


def contains_phrase(tokens: list[str], phrase_tokens: list[str]) -> bool:
    """True if phrase_tokens occurs as a consecutive run inside tokens."""
    if not phrase_tokens:
        return False
    n, m = len(tokens), len(phrase_tokens)
    first = phrase_tokens[0]
    for i in range(n - m + 1):
        if tokens[i] == first and tokens[i : i + m] == phrase_tokens:
            return True
    return False


def count_phrase(tokens: list[str], phrase_tokens: list[str]) -> int:
    """Number of (possibly overlapping) whole-word occurrences of the phrase."""
    if not phrase_tokens:
        return 0
    n, m = len(tokens), len(phrase_tokens)
    count = 0
    for i in range(n - m + 1):
        if tokens[i : i + m] == phrase_tokens:
            count += 1
    return count


def contains_keyword(text_tokens: list[str], keyword: str) -> bool:
    return contains_phrase(text_tokens, tokenize(keyword))
