"""Domain types shared across the pipeline."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptySegment


def primary_subtag(code: str) -> str:
    """``"en-US"`` and ``"en_us"`` both become ``"en"``."""
    return code.replace("_", "-").split("-", 1)[0].strip().lower()


def same_language(a: str, b: str) -> bool:
    return primary_subtag(a) == primary_subtag(b)


class Label(enum.IntEnum):
    CORRECT = 1
    ALMOST_CORRECT = 2
    INCORRECT = 3


class TaskKind(str, enum.Enum):
    BINARY_II = "binary-ii"
    FINE_GRAINED = "fine-grained"

    @property
    def class_ids(self) -> tuple[int, ...]:
        return (0, 1) if self is TaskKind.BINARY_II else (1, 2, 3)


# Binary-II class ids
VALID = 0
INVALID = 1


def map_label(label: Label | int, task: TaskKind) -> int:
    label = Label(label)
    if task is TaskKind.FINE_GRAINED:
        return int(label)
    return INVALID if label is Label.INCORRECT else VALID


@dataclass(frozen=True)
class TranslationUnit:
    id: str
    source_lang: str
    target_lang: str
    source_text: str
    target_text: str

    def __post_init__(self) -> None:
        if not self.source_text.strip():
            raise EmptySegment(f"unit {self.id!r}: empty source segment")
        if not self.target_text.strip():
            raise EmptySegment(f"unit {self.id!r}: empty target segment")
        if same_language(self.source_lang, self.target_lang):
            raise ValueError(
                f"unit {self.id!r}: source and target language are both "
                f"{primary_subtag(self.source_lang)!r}"
            )


@dataclass(frozen=True)
class LabeledUnit:
    unit: TranslationUnit
    label: Label

    def __post_init__(self) -> None:
        object.__setattr__(self, "label", Label(self.label))


DEFAULT_FEATURES = (
    "ratio_words",
    "pos_sim_all",
    "language_detection",
    "mt_cfs",
    "mt_bleu",
    "ratio_chars",
    "cg_score",
    "only_capletters_dif",
    "punctuation_similarity",
)


@dataclass(frozen=True)
class FeatureSchema:
    names: tuple[str, ...]
    version: str = "1"

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate feature names in schema: {self.names}")
        if not self.names:
            raise ValueError("schema must name at least one feature")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @classmethod
    def default(cls) -> FeatureSchema:
        return cls(DEFAULT_FEATURES)

    def to_dict(self) -> dict:
        return {"names": list(self.names), "version": self.version}

    @classmethod
    def from_dict(cls, d: dict) -> FeatureSchema:
        return cls(tuple(d["names"]), str(d.get("version", "1")))


@dataclass(frozen=True)
class FeatureVector:
    schema: FeatureSchema
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if len(values) != len(self.schema):
            raise ValueError(
                f"vector has {len(values)} values, schema has {len(self.schema)}"
            )
        for name, v in zip(self.schema.names, values):
            if not math.isfinite(v):
                raise ValueError(f"feature {name!r} is not finite: {v}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, name: str) -> float:
        return self.values[self.schema.index(name)]

    def select(self, schema: FeatureSchema) -> FeatureVector:
        """Project onto a sub-schema (by name)."""
        return FeatureVector(schema, tuple(self[n] for n in schema.names))


def labels_of(units: Iterable[LabeledUnit]) -> list[Label]:
    return [u.label for u in units]


def class_ids(labels: Sequence[Label | int], task: TaskKind) -> list[int]:
    return [map_label(label, task) for label in labels]
