"""Per-unit features and feature-vector assembly.

Every feature maps a TranslationUnit (plus providers) to a finite float.
Similarity features lie in [0, 1], indicators are 0.0/1.0, ratios are
positive and ``cg_score`` is a non-negative z-score. Texts are
whitespace-normalized before anything is measured.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from . import metrics
from .core import FeatureSchema, FeatureVector, LabeledUnit, TranslationUnit, primary_subtag
from .errors import (
    ConfigError,
    FeatureExtractionError,
    ProviderUnavailable,
    TmcleanError,
    UnsupportedLanguage,
)
from .providers.base import (
    DEFAULT_N_BEST,
    LanguageIdentifier,
    NBestRequest,
    Tagger,
    Translator,
    UniversalTag,
)
from .text import is_punct, normalize_ws, tokenize, words

PUNCTUATION = frozenset(".,;:!?()[]{}\"'%/\\-–—…¿¡«»")

SOME_TAGS = frozenset({UniversalTag.NOUN, UniversalTag.VERB, UniversalTag.ADJ, UniversalTag.PRON})

# Gale-Church length model: variance of target chars per source char
CG_VARIANCE = 6.8


@dataclass
class FeatureContext:
    translator: Translator | None = None
    tagger: Tagger | None = None
    identifier: LanguageIdentifier | None = None
    n_best: int = DEFAULT_N_BEST
    punctuation: frozenset[str] = PUNCTUATION

    def __post_init__(self) -> None:
        if self.n_best < 1:
            raise ValueError("n_best must be at least 1")

    def provider(self, kind: str):
        return {"mt": self.translator, "pos": self.tagger, "langid": self.identifier}[kind]


class UnitView:
    """Lazily computed, shared intermediate results for one unit."""

    def __init__(self, unit: TranslationUnit, ctx: FeatureContext):
        self.unit = unit
        self.ctx = ctx

    @cached_property
    def source(self) -> str:
        return normalize_ws(self.unit.source_text)

    @cached_property
    def target(self) -> str:
        return normalize_ws(self.unit.target_text)

    @cached_property
    def target_tokens(self) -> list[str]:
        return tokenize(self.target)

    @cached_property
    def hypotheses(self) -> list[str]:
        req = NBestRequest(self.source, self.unit.source_lang, self.unit.target_lang, self.ctx.n_best)
        hyps = _require(self.ctx.translator, "machine translation").translate_nbest(req)
        return [normalize_ws(h.text) for h in hyps[: self.ctx.n_best]]

    @cached_property
    def source_tags(self) -> list[UniversalTag]:
        tagger = _require(self.ctx.tagger, "POS tagging")
        return [t for _, t in tagger.tag_pos(self.source, self.unit.source_lang)]

    @cached_property
    def target_tags(self) -> list[UniversalTag]:
        tagger = _require(self.ctx.tagger, "POS tagging")
        return [t for _, t in tagger.tag_pos(self.target, self.unit.target_lang)]

    def confirms(self, text: str, lang: str) -> bool:
        ident = _require(self.ctx.identifier, "language identification")
        known = getattr(ident, "languages", None)
        if known is not None and primary_subtag(lang) not in known:
            raise UnsupportedLanguage(f"no language profile for {lang!r}")
        guess = ident.identify_language(text)
        return guess.too_short or guess.lang == primary_subtag(lang)


def _require(provider, what: str):
    if provider is None:
        raise ProviderUnavailable(f"no {what} provider configured")
    return provider


# -- pure helpers (also used directly by tests) --------------------------------


def best_cfs(hypotheses: Iterable[str], target: str) -> float:
    return max((metrics.cfs(h, target) for h in hypotheses), default=0.0)


def best_bleu(hypotheses: Iterable[str], target: str) -> float:
    ref = tokenize(target)
    return max((metrics.sentence_bleu(tokenize(h), ref) for h in hypotheses), default=0.0)


def nbest_coverage(hypotheses: Iterable[str], target: str) -> float:
    union = [tok for h in hypotheses for tok in tokenize(h)]
    return metrics.coverage([t for t in tokenize(target) if not is_punct(t)], union)


def tag_histogram(tags: Iterable[UniversalTag], keep: frozenset | None = None) -> Counter:
    return Counter(t for t in tags if keep is None or t in keep)


def capletter_tokens(text: str) -> set[str]:
    return {t for t in tokenize(text) if len(t) >= 2 and t.isalpha() and t.isupper()}


def punct_histogram(text: str, alphabet: frozenset[str] = PUNCTUATION) -> Counter:
    return Counter(c for c in text if c in alphabet)


def cg_z(source_chars: int, target_chars: int) -> float:
    return abs(target_chars - source_chars) / math.sqrt(CG_VARIANCE * max(1, source_chars))


# -- features ------------------------------------------------------------------


def _ratio_words(v: UnitView) -> float:
    return (1 + len(words(v.source))) / (1 + len(words(v.target)))


def _ratio_chars(v: UnitView) -> float:
    return (1 + len(v.source)) / (1 + len(v.target))


def _pos_sim_all(v: UnitView) -> float:
    return metrics.cosine_counts(tag_histogram(v.source_tags), tag_histogram(v.target_tags))


def _pos_sim_some(v: UnitView) -> float:
    return metrics.cosine_counts(tag_histogram(v.source_tags, SOME_TAGS), tag_histogram(v.target_tags, SOME_TAGS))


def _pos_exact(v: UnitView) -> float:
    return float(v.source_tags == v.target_tags)


def _language_detection(v: UnitView) -> float:
    return float(v.confirms(v.target, v.unit.target_lang))


def _lang_diff(v: UnitView) -> float:
    ok = v.confirms(v.source, v.unit.source_lang) and v.confirms(v.target, v.unit.target_lang)
    return 0.0 if ok else 1.0


def _mt_cfs(v: UnitView) -> float:
    return best_cfs(v.hypotheses, v.target)


def _mt_bleu(v: UnitView) -> float:
    return best_bleu(v.hypotheses, v.target)


def _mt_coverage(v: UnitView) -> float:
    return nbest_coverage(v.hypotheses, v.target)


def _bisegment_similarity(v: UnitView) -> float:
    top = v.hypotheses[0] if v.hypotheses else ""
    hyp = Counter(t.casefold() for t in tokenize(top))
    tgt = Counter(t.casefold() for t in v.target_tokens)
    return metrics.cosine_counts(hyp, tgt)


def _cg_score(v: UnitView) -> float:
    return cg_z(len(v.source), len(v.target))


def _only_capletters_dif(v: UnitView) -> float:
    a, b = capletter_tokens(v.source), capletter_tokens(v.target)
    if not a and not b:
        return 0.0
    return 1.0 - len(a & b) / len(a | b)


def _punctuation_similarity(v: UnitView) -> float:
    alphabet = v.ctx.punctuation
    return metrics.cosine_counts(punct_histogram(v.source, alphabet), punct_histogram(v.target, alphabet))


@dataclass(frozen=True)
class FeatureDef:
    name: str
    fn: Callable[[UnitView], float]
    needs: frozenset[str]
    kind: str  # similarity | indicator | ratio | score


FEATURES: dict[str, FeatureDef] = {
    d.name: d
    for d in (
        FeatureDef("ratio_words", _ratio_words, frozenset(), "ratio"),
        FeatureDef("ratio_chars", _ratio_chars, frozenset(), "ratio"),
        FeatureDef("pos_sim_all", _pos_sim_all, frozenset({"pos"}), "similarity"),
        FeatureDef("pos_sim_some", _pos_sim_some, frozenset({"pos"}), "similarity"),
        FeatureDef("pos_exact", _pos_exact, frozenset({"pos"}), "indicator"),
        FeatureDef("language_detection", _language_detection, frozenset({"langid"}), "indicator"),
        FeatureDef("lang_diff", _lang_diff, frozenset({"langid"}), "indicator"),
        FeatureDef("mt_cfs", _mt_cfs, frozenset({"mt"}), "similarity"),
        FeatureDef("mt_bleu", _mt_bleu, frozenset({"mt"}), "similarity"),
        FeatureDef("mt_coverage", _mt_coverage, frozenset({"mt"}), "similarity"),
        FeatureDef("bisegment_similarity", _bisegment_similarity, frozenset({"mt"}), "similarity"),
        FeatureDef("cg_score", _cg_score, frozenset(), "score"),
        FeatureDef("only_capletters_dif", _only_capletters_dif, frozenset(), "similarity"),
        FeatureDef("punctuation_similarity", _punctuation_similarity, frozenset(), "similarity"),
    )
}

ALL_FEATURES = tuple(FEATURES)


def compute(name: str, unit: TranslationUnit, ctx: FeatureContext) -> float:
    """Compute one named feature for one unit."""
    return _compute(FEATURES[name], UnitView(unit, ctx))


def _compute(feature: FeatureDef, view: UnitView) -> float:
    try:
        value = float(feature.fn(view))
    except TmcleanError as exc:
        raise FeatureExtractionError(view.unit.id, feature.name, exc) from exc
    if not math.isfinite(value):
        raise FeatureExtractionError(view.unit.id, feature.name, ValueError(f"non-finite value {value}"))
    return value


def check_context(names: Iterable[str], ctx: FeatureContext) -> None:
    """Fail before any extraction when a feature is unknown or lacks its provider."""
    missing: dict[str, list[str]] = {}
    for name in names:
        if name not in FEATURES:
            raise ConfigError(f"unknown feature {name!r}; known: {', '.join(ALL_FEATURES)}")
        for kind in sorted(FEATURES[name].needs):
            if ctx.provider(kind) is None:
                missing.setdefault(kind, []).append(name)
    if missing:
        detail = "; ".join(f"{kind} provider needed by {', '.join(names)}" for kind, names in missing.items())
        raise ConfigError(f"missing providers: {detail}")


def provider_fingerprint(name: str, ctx: FeatureContext) -> str:
    parts = []
    for kind in sorted(FEATURES[name].needs):
        prov = ctx.provider(kind)
        parts.append(f"{kind}={getattr(prov, 'fingerprint', '?')}")
        if kind == "mt":
            parts.append(f"n={ctx.n_best}")
    return ";".join(parts)


def extract_vector(unit: TranslationUnit, ctx: FeatureContext, schema: FeatureSchema) -> FeatureVector:
    """Compute the schema's features for one unit; one n-best request serves all MT features."""
    view = UnitView(unit, ctx)
    return FeatureVector(schema, tuple(_compute(FEATURES[n], view) for n in schema.names))


def _unit_of(item) -> TranslationUnit:
    return item.unit if isinstance(item, LabeledUnit) else item


def extract_vectors(
    items: Sequence[TranslationUnit | LabeledUnit],
    ctx: FeatureContext,
    schema: FeatureSchema,
    workers: int = 1,
) -> list[FeatureVector]:
    """Vectors in input order; units are processed by ``workers`` threads."""
    check_context(schema.names, ctx)
    units = [_unit_of(it) for it in items]
    if workers <= 1:
        return [extract_vector(u, ctx, schema) for u in units]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda u: extract_vector(u, ctx, schema), units))


class FeatureCache:
    """In-memory feature values keyed by (unit id, feature, provider fingerprint)."""

    def __init__(self) -> None:
        self._values: dict[tuple[str, str, str], float] = {}
        self._lock = threading.Lock()
        self.computed = 0

    def __len__(self) -> int:
        return len(self._values)

    def matrix(
        self,
        items: Sequence[TranslationUnit | LabeledUnit],
        ctx: FeatureContext,
        names: Sequence[str],
        workers: int = 1,
    ) -> np.ndarray:
        """Return a ``len(items) x len(names)`` array, computing only what is missing."""
        check_context(names, ctx)
        prints = {n: provider_fingerprint(n, ctx) for n in names}

        def row(unit: TranslationUnit) -> list[float]:
            view = UnitView(unit, ctx)
            out = []
            for n in names:
                key = (unit.id, n, prints[n])
                value = self._values.get(key)
                if value is None:
                    value = _compute(FEATURES[n], view)
                    with self._lock:
                        self._values[key] = value
                        self.computed += 1
                out.append(value)
            return out

        units = [_unit_of(it) for it in items]
        if workers <= 1:
            rows = [row(u) for u in units]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(row, units))
        return np.asarray(rows, dtype=float).reshape(len(units), len(names))


def format_feature_dump(
    items: Sequence[TranslationUnit | LabeledUnit], vectors: Sequence[FeatureVector], schema: FeatureSchema
) -> str:
    """TSV: ``id [label] feature...`` header, one row per unit in input order."""
    labeled = bool(items) and isinstance(items[0], LabeledUnit)
    header = ["id"] + (["label"] if labeled else []) + list(schema.names)
    lines = ["\t".join(header)]
    for item, vec in zip(items, vectors):
        row = [_unit_of(item).id] + ([str(int(item.label))] if labeled else [])
        row += [repr(v) for v in vec.values]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"
