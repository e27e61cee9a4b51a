"""Run configuration: one JSON file, overridable by command-line flags.

Example::

    {
      "mt": {"kind": "glossary", "glossary": "bundled:en-de", "cache": "mt-cache.jsonl"},
      "tagger": {"kind": "builtin"},
      "langid": {"kind": "builtin"},
      "features": null,
      "forest": {"n_trees": 100, "max_depth": null, "min_leaf_size": 1, "features_per_split": null},
      "task": "binary-ii",
      "seed": 0,
      "workers": 1
    }

``features: null`` selects the default nine-feature schema.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .core import FeatureSchema, TaskKind
from .errors import ConfigError, TmcleanError
from .features import ALL_FEATURES, FeatureContext
from .ingestion import SplitSpec
from .classifiers import ForestParams


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MTConfig(_Strict):
    kind: Literal["none", "glossary", "remote"] = "none"
    glossary: Optional[str] = None  # path, or "bundled:<src>-<tgt>"
    endpoint: Optional[str] = None
    timeout: float = Field(30.0, gt=0)
    provider_id: Optional[str] = None
    cache: Optional[str] = None


class TaggerConfig(_Strict):
    kind: Literal["none", "builtin", "external"] = "builtin"
    command: Optional[list[str]] = None
    mappings: dict[str, str] = Field(default_factory=dict)  # lang -> mapping file; bundled otherwise
    timeout: float = Field(60.0, gt=0)


class LangIdConfig(_Strict):
    kind: Literal["none", "builtin"] = "builtin"
    profile_dir: Optional[str] = None


class ForestConfig(_Strict):
    n_trees: int = Field(100, ge=1)
    max_depth: Optional[int] = Field(None, ge=0)
    min_leaf_size: int = Field(1, ge=1)
    features_per_split: Optional[int] = Field(None, ge=1)


class RunConfig(_Strict):
    mt: MTConfig = Field(default_factory=MTConfig)
    tagger: TaggerConfig = Field(default_factory=TaggerConfig)
    langid: LangIdConfig = Field(default_factory=LangIdConfig)
    features: Optional[list[str]] = None
    n_best: int = Field(20, ge=1)
    forest: ForestConfig = Field(default_factory=ForestConfig)
    task: TaskKind = TaskKind.BINARY_II
    seed: int = 0
    workers: int = Field(1, ge=1)
    train_fraction: float = Field(2 / 3, gt=0, lt=1)
    repetitions: int = Field(5, ge=1)
    strict: Optional[bool] = None  # None: strict for training data, lenient for cleaning
    source_lang: Optional[str] = None  # TMX inputs
    target_lang: Optional[str] = None

    @field_validator("features")
    @classmethod
    def _known_features(cls, v):
        if v is not None:
            unknown = [n for n in v if n not in ALL_FEATURES]
            if unknown:
                raise ValueError(f"unknown features {unknown}")
            if len(set(v)) != len(v) or not v:
                raise ValueError("features must be a non-empty list without duplicates")
        return v

    def schema(self) -> FeatureSchema:
        return FeatureSchema(tuple(self.features)) if self.features else FeatureSchema.default()

    def forest_params(self) -> ForestParams:
        return ForestParams(rng_seed=self.seed, **self.forest.model_dump())

    def split_spec(self) -> SplitSpec:
        return SplitSpec(self.train_fraction, self.repetitions, self.seed)


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Read the JSON config (if any) and apply dotted-key flag overrides."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        node = data
        *parents, leaf = key.split(".")
        for p in parents:
            node = node.setdefault(p, {})
        node[leaf] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration:\n{exc}") from exc


def build_context(cfg: RunConfig) -> FeatureContext:
    """Instantiate the configured providers."""
    from .providers.cache import CachedTranslator, MTCache
    from .providers.glossary import GlossaryTranslator
    from .providers.langid import NGramLanguageIdentifier
    from .providers.pos import BuiltinTagger, ExternalTagger, bundled_mapping, load_tag_mapping
    from .providers.remote import RemoteTranslator

    translator = None
    mt = cfg.mt
    if mt.kind == "glossary":
        if not mt.glossary:
            raise ConfigError("mt.kind 'glossary' needs mt.glossary")
        if mt.glossary.startswith("bundled:"):
            translator = GlossaryTranslator.bundled(mt.glossary.split(":", 1)[1])
        else:
            translator = GlossaryTranslator.load(mt.glossary)
    elif mt.kind == "remote":
        if not mt.endpoint:
            raise ConfigError("mt.kind 'remote' needs mt.endpoint")
        translator = RemoteTranslator(mt.endpoint, mt.timeout, mt.provider_id)
    if translator is not None and mt.cache:
        translator = CachedTranslator(translator, MTCache(mt.cache))

    tagger = None
    if cfg.tagger.kind == "builtin":
        tagger = BuiltinTagger()
    elif cfg.tagger.kind == "external":
        if not cfg.tagger.command:
            raise ConfigError("tagger.kind 'external' needs tagger.command")
        mappings = {lang: load_tag_mapping(p, lang) for lang, p in cfg.tagger.mappings.items()}
        for lang in ("de", "en", "es", "it"):
            if lang not in mappings:
                mappings[lang] = bundled_mapping(lang)
        tagger = ExternalTagger(cfg.tagger.command, mappings, cfg.tagger.timeout)

    identifier = None
    if cfg.langid.kind == "builtin":
        try:
            identifier = (
                NGramLanguageIdentifier.from_directory(cfg.langid.profile_dir)
                if cfg.langid.profile_dir
                else NGramLanguageIdentifier.from_seed_corpora()
            )
        except TmcleanError as exc:
            raise ConfigError(f"language profiles: {exc}") from exc
    return FeatureContext(translator, tagger, identifier, cfg.n_best)
