"""Whitespace normalization and the tokenizer shared by every module."""

from __future__ import annotations

import re
import unicodedata

_WS_RUN = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    """Trim the ends and collapse internal runs of Unicode whitespace."""
    return _WS_RUN.sub(" ", text).strip()


def is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def is_punct(token: str) -> bool:
    return bool(token) and all(is_punct_char(c) for c in token)


def tokenize(text: str) -> list[str]:
    """Split on whitespace, then peel leading/trailing punctuation off each chunk.

    Every peeled punctuation character becomes its own token; case is kept.

    >>> tokenize('Open "file.dwg" now.')
    ['Open', '"', 'file.dwg', '"', 'now', '.']
    """
    tokens: list[str] = []
    for chunk in text.split():
        start, end = 0, len(chunk)
        while start < end and is_punct_char(chunk[start]):
            start += 1
        while end > start and is_punct_char(chunk[end - 1]):
            end -= 1
        tokens.extend(chunk[:start])
        if start < end:
            tokens.append(chunk[start:end])
        tokens.extend(chunk[end:])
    return tokens


def words(text: str) -> list[str]:
    """Tokens that are not pure punctuation."""
    return [t for t in tokenize(text) if not is_punct(t)]


def detokenize(tokens: list[str]) -> str:
    """Join tokens with spaces; closing punctuation hugs the left, opening the right."""
    out: list[str] = []
    glue = False
    for tok in tokens:
        if out and (glue or tok in _ATTACH_LEFT):
            out[-1] += tok
        else:
            out.append(tok)
        glue = tok in _ATTACH_RIGHT
    return " ".join(out)


_ATTACH_LEFT = frozenset(".,;:!?)]}%…»")
_ATTACH_RIGHT = frozenset("([{¿¡«")
