"""Rank-order character n-gram language identification (Cavnar & Trenkle).

A profile is the ``size`` most frequent n-grams of a text, ranked by
descending count (ties lexicographic). The out-of-place distance sums, over
the document profile, the rank displacement of each n-gram in the language
profile, charging ``size`` for n-grams the language profile lacks.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from ..core import primary_subtag
from ..errors import ProviderUnavailable
from .base import LanguageGuess

PROFILE_SIZE = 300
NGRAM = 3
MIN_CHARS = 20
SENTINEL = "_"
SEED_LANGS = ("de", "en", "es", "it")


def _word_ngrams(text: str, n: int) -> Iterable[str]:
    cleaned = "".join(c if c.isalpha() or c == "'" else " " for c in text.lower())
    for word in cleaned.split():
        padded = f"{SENTINEL}{word}{SENTINEL}"
        if len(padded) < n:
            yield padded
            continue
        for i in range(len(padded) - n + 1):
            yield padded[i : i + n]


def build_profile(text: str, size: int = PROFILE_SIZE, n: int = NGRAM) -> list[str]:
    counts = Counter(_word_ngrams(text, n))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [g for g, _ in ranked[:size]]


@dataclass(frozen=True)
class LanguageProfile:
    lang: str
    ngrams: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.ngrams)) != len(self.ngrams):
            raise ValueError(f"profile {self.lang!r} repeats n-grams")

    @classmethod
    def from_text(cls, lang: str, text: str, size: int = PROFILE_SIZE) -> LanguageProfile:
        return cls(primary_subtag(lang), tuple(build_profile(text, size)))

    def save(self, path: str | Path) -> None:
        Path(path).write_text("".join(g + "\n" for g in self.ngrams), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, lang: str | None = None) -> LanguageProfile:
        path = Path(path)
        grams = [line.rstrip("\n") for line in path.read_text(encoding="utf-8").splitlines()]
        return cls(primary_subtag(lang or path.stem), tuple(g for g in grams if g))


def out_of_place(doc: list[str] | tuple[str, ...], ranks: dict[str, int], max_penalty: int) -> int:
    return sum(abs(r - ranks[g]) if g in ranks else max_penalty for r, g in enumerate(doc))


def seed_text(lang: str) -> str:
    return resources.files(__package__).joinpath(f"data/seed/{lang}.txt").read_text(encoding="utf-8")


class NGramLanguageIdentifier:
    def __init__(self, profiles: Iterable[LanguageProfile], size: int = PROFILE_SIZE):
        self.profiles = {p.lang: p for p in profiles}
        if len(self.profiles) < 2:
            raise ProviderUnavailable("language identification needs profiles for at least two languages")
        self.size = size
        self._ranks = {lang: {g: i for i, g in enumerate(p.ngrams)} for lang, p in self.profiles.items()}
        blob = "\n".join(f"{lang}:{'|'.join(p.ngrams)}" for lang, p in sorted(self.profiles.items()))
        self.fingerprint = "ngram-langid:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    @classmethod
    def from_seed_corpora(cls, langs: Iterable[str] = SEED_LANGS) -> NGramLanguageIdentifier:
        return cls(LanguageProfile.from_text(lang, seed_text(lang)) for lang in langs)

    @classmethod
    def from_directory(cls, directory: str | Path) -> NGramLanguageIdentifier:
        files = sorted(Path(directory).glob("*.txt"))
        return cls(LanguageProfile.load(f) for f in files)

    @property
    def languages(self) -> list[str]:
        return sorted(self.profiles)

    def distances(self, text: str) -> dict[str, int]:
        doc = build_profile(text, self.size)
        return {lang: out_of_place(doc, ranks, self.size) for lang, ranks in self._ranks.items()}

    def identify_language(self, text: str) -> LanguageGuess:
        doc = build_profile(text, self.size)
        scored = sorted(
            (out_of_place(doc, ranks, self.size), lang) for lang, ranks in self._ranks.items()
        )
        best, lang = scored[0]
        worst_case = len(doc) * self.size
        confidence = 1.0 - best / worst_case if worst_case else 0.0
        too_short = sum(1 for c in text if not c.isspace()) < MIN_CHARS
        return LanguageGuess(lang, confidence, best, too_short)
