"""Provider contracts for machine translation, POS tagging and language ID."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

DEFAULT_N_BEST = 20


@dataclass(frozen=True)
class TranslationHypothesis:
    text: str
    score: float


@dataclass(frozen=True)
class NBestRequest:
    source_text: str
    source_lang: str
    target_lang: str
    n: int = DEFAULT_N_BEST

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")


class UniversalTag(str, enum.Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    DET = "DET"
    ADP = "ADP"
    NUM = "NUM"
    CONJ = "CONJ"
    PRT = "PRT"
    PUNCT = "."
    X = "X"


@runtime_checkable
class Translator(Protocol):
    fingerprint: str

    def translate_nbest(self, request: NBestRequest) -> list[TranslationHypothesis]: ...


@runtime_checkable
class Tagger(Protocol):
    fingerprint: str

    def tag_pos(self, text: str, lang: str) -> list[tuple[str, UniversalTag]]: ...


@dataclass(frozen=True)
class LanguageGuess:
    lang: str
    confidence: float
    distance: int
    too_short: bool = False


@runtime_checkable
class LanguageIdentifier(Protocol):
    fingerprint: str

    def identify_language(self, text: str) -> LanguageGuess: ...


def sort_hypotheses(hyps: list[TranslationHypothesis], n: int) -> list[TranslationHypothesis]:
    """Order by non-increasing score (stable) and keep at most ``n``."""
    return sorted(hyps, key=lambda h: -h.score)[:n]
