"""Reading and writing datasets, corpus statistics, and train/test splits.

Two carriers are supported:

* TSV, one unit per line::

      id <TAB> source_lang <TAB> target_lang <TAB> source_text <TAB> target_text [<TAB> label]

  Lines starting with ``#`` and blank lines are ignored. Tabs, newlines,
  carriage returns and backslashes inside text are written as ``\\t``,
  ``\\n``, ``\\r`` and ``\\\\``.
* A TMX subset: ``tu``/``tuv``/``seg`` with ``xml:lang`` (or ``lang``) on ``tuv``.
"""

from __future__ import annotations

import hashlib
import logging
import math
import random
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from ._io import atomic_write
from .core import Label, LabeledUnit, TranslationUnit, primary_subtag, same_language
from .errors import (
    BadLabel,
    DataError,
    DegenerateSplit,
    EmptySegment,
    MalformedRow,
    MissingVariant,
    RowError,
    XmlError,
)
from .seeds import derive_seed
from .text import normalize_ws

log = logging.getLogger(__name__)

XML_LANG = "{http://www.w3.org/XML/1998/namespace}lang"

_UNESCAPES = {"t": "\t", "n": "\n", "r": "\r", "\\": "\\", "#": "#"}


def escape_field(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def unescape_field(text: str) -> str:
    if "\\" not in text:
        return text
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text) and text[i + 1] in _UNESCAPES:
            out.append(_UNESCAPES[text[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


# -- TSV -----------------------------------------------------------------------


@dataclass(frozen=True)
class TsvRecord:
    """One non-comment line of a TSV file and what it parsed into."""

    line_no: int
    line: str
    item: LabeledUnit | TranslationUnit | None
    error: RowError | None = None


def _parse_tsv_line(line: str, line_no: int, has_labels: bool):
    cols = line.split("\t")
    if has_labels:
        if len(cols) != 6:
            raise MalformedRow(f"expected 6 columns, found {len(cols)}", line_no)
    elif len(cols) not in (5, 6):
        raise MalformedRow(f"expected 5 columns, found {len(cols)}", line_no)
    uid, src_lang, tgt_lang, src, tgt = (unescape_field(c) for c in cols[:5])
    if not src.strip():
        raise EmptySegment("empty source segment", line_no)
    if not tgt.strip():
        raise EmptySegment("empty target segment", line_no)
    if not src_lang or not tgt_lang or same_language(src_lang, tgt_lang):
        raise MalformedRow(
            f"need two different language codes, got {src_lang!r}/{tgt_lang!r}", line_no
        )
    unit = TranslationUnit(uid, src_lang, tgt_lang, src, tgt)
    if not has_labels:
        return unit
    try:
        label = Label(int(cols[5]))
    except ValueError:
        raise BadLabel(f"label must be 1, 2 or 3, got {cols[5]!r}", line_no) from None
    return LabeledUnit(unit, label)


def iter_tsv(path: str | Path, has_labels: bool = True) -> Iterator[TsvRecord]:
    """Yield every data line with either its parsed item or its error."""
    with open(path, encoding="utf-8", newline="\n") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.endswith("\r"):
                line = line[:-1]
            if not line.strip() or line.startswith("#"):
                continue
            try:
                item = _parse_tsv_line(line, line_no, has_labels)
            except RowError as exc:
                yield TsvRecord(line_no, line, None, exc)
            else:
                yield TsvRecord(line_no, line, item)


def read_tsv(
    path: str | Path,
    has_labels: bool = True,
    strict: bool = True,
    errors: list[RowError] | None = None,
) -> list:
    """Read a TSV file into LabeledUnits (``has_labels``) or TranslationUnits.

    In strict mode the first bad row raises. Otherwise bad rows are skipped,
    logged, and appended to ``errors`` when a list is given.
    """
    items = []
    for rec in iter_tsv(path, has_labels):
        if rec.error is not None:
            if strict:
                raise rec.error
            log.warning("skipping %s: %s", path, rec.error)
            if errors is not None:
                errors.append(rec.error)
            continue
        items.append(rec.item)
    return items


def format_tsv_line(item: LabeledUnit | TranslationUnit) -> str:
    if isinstance(item, LabeledUnit):
        unit, label = item.unit, str(int(item.label))
    else:
        unit, label = item, None
    cols = [unit.id, unit.source_lang, unit.target_lang, unit.source_text, unit.target_text]
    cols = [escape_field(c) for c in cols]
    if cols[0].startswith("#"):  # would otherwise read back as a comment
        cols[0] = "\\" + cols[0]
    if label is not None:
        cols.append(label)
    return "\t".join(cols)


def write_tsv(path: str | Path, items: Sequence[LabeledUnit | TranslationUnit]) -> None:
    atomic_write(path, "".join(format_tsv_line(it) + "\n" for it in items))


# -- TMX -----------------------------------------------------------------------


@dataclass
class TmxRecord:
    index: int
    element: ET.Element
    item: TranslationUnit | None
    error: RowError | None = None


def _tuv_lang(tuv: ET.Element) -> str | None:
    return tuv.get(XML_LANG) or tuv.get("lang")


def _seg_text(tuv: ET.Element) -> str | None:
    seg = tuv.find("seg")
    if seg is None:
        return None
    return normalize_ws("".join(seg.itertext()))


def parse_tmx(path: str | Path) -> ET.ElementTree:
    try:
        return ET.parse(path)
    except ET.ParseError as exc:
        raise XmlError(f"{path}: {exc}") from exc


def iter_tmx(tree: ET.ElementTree, source_lang: str, target_lang: str) -> Iterator[TmxRecord]:
    src_key, tgt_key = primary_subtag(source_lang), primary_subtag(target_lang)
    for index, tu in enumerate(tree.getroot().iter("tu"), start=1):
        uid = tu.get("tuid") or str(index)
        texts: dict[str, tuple[str, str | None]] = {}
        for tuv in tu.findall("tuv"):
            lang = _tuv_lang(tuv)
            if lang is None:
                continue
            key = primary_subtag(lang)
            if key in (src_key, tgt_key) and key not in texts:
                texts[key] = (lang, _seg_text(tuv))
        try:
            for key in (src_key, tgt_key):
                if key not in texts or texts[key][1] is None:
                    raise MissingVariant(f"tu {uid!r} has no {key!r} segment", index)
                if not texts[key][1]:
                    raise EmptySegment(f"tu {uid!r} has an empty {key!r} segment", index)
        except RowError as exc:
            yield TmxRecord(index, tu, None, exc)
            continue
        (s_lang, s_text), (t_lang, t_text) = texts[src_key], texts[tgt_key]
        yield TmxRecord(index, tu, TranslationUnit(uid, s_lang, t_lang, s_text, t_text))


def read_tmx(
    path: str | Path,
    source_lang: str,
    target_lang: str,
    strict: bool = True,
    errors: list[RowError] | None = None,
) -> list[TranslationUnit]:
    """Read translation units for one language pair from a TMX file.

    Inline markup inside ``seg`` is dropped (its text content is kept) and
    the result is whitespace-normalized.
    """
    units = []
    for rec in iter_tmx(parse_tmx(path), source_lang, target_lang):
        if rec.error is not None:
            if strict:
                raise rec.error
            log.warning("skipping %s: %s", path, rec.error)
            if errors is not None:
                errors.append(rec.error)
            continue
        units.append(rec.item)
    return units


def _tmx_skeleton(header: ET.Element | None, srclang: str) -> tuple[ET.Element, ET.Element]:
    root = ET.Element("tmx", {"version": "1.4"})
    if header is not None:
        root.append(header)
    else:
        ET.SubElement(
            root,
            "header",
            {
                "creationtool": "tmclean",
                "creationtoolversion": "0.1.0",
                "segtype": "sentence",
                "o-tmf": "tmclean",
                "adminlang": "en",
                "srclang": srclang,
                "datatype": "plaintext",
            },
        )
    return root, ET.SubElement(root, "body")


def _tmx_bytes(root: ET.Element) -> bytes:
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def write_tmx(path: str | Path, units: Sequence[TranslationUnit]) -> None:
    srclang = units[0].source_lang if units else "en"
    root, body = _tmx_skeleton(None, srclang)
    for unit in units:
        tu = ET.SubElement(body, "tu", {"tuid": unit.id})
        for lang, text in ((unit.source_lang, unit.source_text), (unit.target_lang, unit.target_text)):
            tuv = ET.SubElement(tu, "tuv", {XML_LANG: lang})
            ET.SubElement(tuv, "seg").text = text
    atomic_write(path, _tmx_bytes(root))


def write_tmx_elements(path: str | Path, header: ET.Element | None, tus: Sequence[ET.Element], srclang: str) -> None:
    """Write original ``tu`` elements verbatim (markup included) into a new TMX."""
    root, body = _tmx_skeleton(header, srclang)
    body.extend(tus)
    atomic_write(path, _tmx_bytes(root))


# -- statistics ----------------------------------------------------------------


@dataclass
class DatasetStats:
    class_counts: dict[int, int] = field(default_factory=lambda: {int(l): 0 for l in Label})
    total: int = 0
    by_pair: dict[str, dict[int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "class_counts": {str(k): v for k, v in self.class_counts.items()},
            "total": self.total,
            "by_pair": {
                pair: {str(k): v for k, v in counts.items()}
                for pair, counts in sorted(self.by_pair.items())
            },
        }


def stats(dataset: Sequence[LabeledUnit]) -> DatasetStats:
    out = DatasetStats()
    for lu in dataset:
        out.class_counts[int(lu.label)] += 1
        pair = f"{primary_subtag(lu.unit.source_lang)}-{primary_subtag(lu.unit.target_lang)}"
        counts = out.by_pair.setdefault(pair, {int(l): 0 for l in Label})
        counts[int(lu.label)] += 1
    out.total = sum(out.class_counts.values())
    return out


# -- splitting -----------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 2 / 3
    repetitions: int = 5
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def split_indices(
    strata: Sequence[int], spec: SplitSpec, repetition_index: int
) -> tuple[list[int], list[int]]:
    """Stratified random subsampling over positions ``0..len(strata)-1``.

    The train side has ``round(train_fraction * N)`` members; each stratum
    contributes the floor or ceiling of its proportional share (largest
    remainder). Both sides keep input order.
    """
    if not 0 <= repetition_index < spec.repetitions:
        raise ValueError(f"repetition_index {repetition_index} outside 0..{spec.repetitions - 1}")
    n = len(strata)
    by_class: dict[int, list[int]] = {}
    for i, c in enumerate(strata):
        by_class.setdefault(int(c), []).append(i)
    target = _round_half_up(spec.train_fraction * n)
    shares = {c: spec.train_fraction * len(ix) for c, ix in by_class.items()}
    take = {c: math.floor(s) for c, s in shares.items()}
    leftover = target - sum(take.values())
    for c in sorted(by_class, key=lambda c: (-(shares[c] - take[c]), c))[:leftover]:
        take[c] += 1
    for c, k in sorted(take.items()):
        if k == 0:
            raise DegenerateSplit(f"class {c} would have no training members")
    if target >= n:
        raise DegenerateSplit("test side would be empty")

    rng = random.Random(derive_seed(spec.rng_seed, repetition_index))
    train: list[int] = []
    for c in sorted(by_class):
        members = list(by_class[c])
        rng.shuffle(members)
        train.extend(members[: take[c]])
    train.sort()
    chosen = set(train)
    test = [i for i in range(n) if i not in chosen]
    return train, test


def split(
    dataset: Sequence[LabeledUnit], spec: SplitSpec, repetition_index: int
) -> tuple[list[LabeledUnit], list[LabeledUnit]]:
    train, test = split_indices([int(lu.label) for lu in dataset], spec, repetition_index)
    return [dataset[i] for i in train], [dataset[i] for i in test]


def partition_dump(dataset: Sequence[LabeledUnit], train: Sequence[LabeledUnit]) -> str:
    """Audit listing: one ``id<TAB>train|test`` line per unit, in dataset order."""
    train_ids = {id(lu) for lu in train}
    return "".join(
        f"{lu.unit.id}\t{'train' if id(lu) in train_ids else 'test'}\n" for lu in dataset
    )


def partition_hash(dump: str) -> str:
    return hashlib.sha256(dump.encode("utf-8")).hexdigest()


def require_labels(items: Sequence) -> list[LabeledUnit]:
    if items and not isinstance(items[0], LabeledUnit):
        raise DataError("this command needs labeled data (6th TSV column)")
    return list(items)
