"""POS tagging into the 12-tag universal tagset.

``BuiltinTagger`` is a small rule-based tagger (closed-class lexicon, then
suffix rules, then NOUN). ``ExternalTagger`` runs any command-line tagger
that reads one token per line and prints ``token<TAB>fine-tag`` lines,
with a blank line between sentences; fine tags are mapped through a
``TagMapping``.
"""

from __future__ import annotations

import hashlib
import logging
import subprocess
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from ..core import primary_subtag
from ..errors import (
    DuplicateFineTag,
    ProviderTimeout,
    ProviderUnavailable,
    UnknownUniversalTag,
    UnsupportedLanguage,
)
from ..text import is_punct, tokenize
from .base import UniversalTag

log = logging.getLogger(__name__)

BUILTIN_LANGS = ("de", "en", "es", "it")


def parse_universal(name: str) -> UniversalTag:
    try:
        return UniversalTag(name)
    except ValueError:
        pass
    try:
        return UniversalTag[name]
    except KeyError:
        raise UnknownUniversalTag(f"{name!r} is not a universal tag") from None


@dataclass
class TagMapping:
    lang: str
    table: dict[str, UniversalTag]
    _warned: set[str] = field(default_factory=set, repr=False, compare=False)

    def __getitem__(self, fine: str) -> UniversalTag:
        tag = self.table.get(fine)
        if tag is None:
            if fine not in self._warned:
                self._warned.add(fine)
                log.warning("unmapped %s tag %r, using X", self.lang, fine)
            return UniversalTag.X
        return tag


def load_tag_mapping(path: str | Path, lang: str | None = None) -> TagMapping:
    """Read ``fine-tag<TAB>universal-tag`` rows; the language defaults to the file stem."""
    path = Path(path)
    table: dict[str, UniversalTag] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fine, _, coarse = line.partition("\t")
            if fine in table:
                raise DuplicateFineTag(f"{path}:{line_no}: fine tag {fine!r} mapped twice")
            try:
                table[fine] = parse_universal(coarse.strip())
            except UnknownUniversalTag as exc:
                raise UnknownUniversalTag(f"{path}:{line_no}: {exc}") from None
    return TagMapping(primary_subtag(lang or path.stem), table)


def bundled_mapping(lang: str) -> TagMapping:
    lang = primary_subtag(lang)
    res = resources.files(__package__).joinpath(f"data/mappings/{lang}.map")
    if not res.is_file():
        raise UnsupportedLanguage(f"no bundled tag mapping for {lang!r}")
    with resources.as_file(res) as p:
        return load_tag_mapping(p, lang)


def _load_lexicon(lang: str) -> dict[str, UniversalTag]:
    text = resources.files(__package__).joinpath(f"data/lexicon/{lang}.tsv").read_text(encoding="utf-8")
    lex = {}
    for line in text.splitlines():
        if line.strip():
            word, tag = line.split("\t")
            lex[word] = UniversalTag[tag] if tag in UniversalTag.__members__ else UniversalTag(tag)
    return lex


# (suffix, tag) in priority order; longest/most specific first
_SUFFIXES: dict[str, list[tuple[str, UniversalTag]]] = {
    "en": [
        ("ly", UniversalTag.ADV),
        ("ing", UniversalTag.VERB),
        ("ed", UniversalTag.VERB),
        ("tion", UniversalTag.NOUN),
        ("ment", UniversalTag.NOUN),
        ("ness", UniversalTag.NOUN),
        ("ity", UniversalTag.NOUN),
        ("ous", UniversalTag.ADJ),
        ("ful", UniversalTag.ADJ),
        ("able", UniversalTag.ADJ),
        ("ible", UniversalTag.ADJ),
        ("ive", UniversalTag.ADJ),
        ("less", UniversalTag.ADJ),
        ("ical", UniversalTag.ADJ),
        ("al", UniversalTag.ADJ),
    ],
    "de": [
        ("weise", UniversalTag.ADV),
        ("lich", UniversalTag.ADJ),
        ("isch", UniversalTag.ADJ),
        ("ig", UniversalTag.ADJ),
        ("bar", UniversalTag.ADJ),
        ("los", UniversalTag.ADJ),
        ("en", UniversalTag.VERB),
        ("ern", UniversalTag.VERB),
        ("eln", UniversalTag.VERB),
        ("t", UniversalTag.VERB),
        ("e", UniversalTag.ADJ),
    ],
    "es": [
        ("mente", UniversalTag.ADV),
        ("ción", UniversalTag.NOUN),
        ("sión", UniversalTag.NOUN),
        ("dad", UniversalTag.NOUN),
        ("miento", UniversalTag.NOUN),
        ("ando", UniversalTag.VERB),
        ("iendo", UniversalTag.VERB),
        ("ado", UniversalTag.VERB),
        ("ido", UniversalTag.VERB),
        ("ar", UniversalTag.VERB),
        ("er", UniversalTag.VERB),
        ("ir", UniversalTag.VERB),
        ("oso", UniversalTag.ADJ),
        ("osa", UniversalTag.ADJ),
        ("ble", UniversalTag.ADJ),
        ("ivo", UniversalTag.ADJ),
        ("iva", UniversalTag.ADJ),
        ("al", UniversalTag.ADJ),
    ],
    "it": [
        ("mente", UniversalTag.ADV),
        ("zione", UniversalTag.NOUN),
        ("mento", UniversalTag.NOUN),
        ("tà", UniversalTag.NOUN),
        ("ando", UniversalTag.VERB),
        ("endo", UniversalTag.VERB),
        ("are", UniversalTag.VERB),
        ("ere", UniversalTag.VERB),
        ("ire", UniversalTag.VERB),
        ("ato", UniversalTag.VERB),
        ("ito", UniversalTag.VERB),
        ("uto", UniversalTag.VERB),
        ("oso", UniversalTag.ADJ),
        ("osa", UniversalTag.ADJ),
        ("bile", UniversalTag.ADJ),
        ("ale", UniversalTag.ADJ),
    ],
}


def _is_number(tok: str) -> bool:
    return any(c.isdigit() for c in tok) and all(c.isdigit() or c in ".,:-/%" for c in tok)


class BuiltinTagger:
    """Lexicon + suffix rules for de/en/es/it; output is already universal."""

    def __init__(self, langs: Sequence[str] = BUILTIN_LANGS):
        self.lexicons = {lang: _load_lexicon(lang) for lang in langs}
        blob = "\n".join(
            f"{lang}:{w}={t.value}" for lang, lex in sorted(self.lexicons.items()) for w, t in sorted(lex.items())
        )
        self.fingerprint = "builtin-pos:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def _tag_token(self, tok: str, lang: str, prev: UniversalTag | None) -> UniversalTag:
        if is_punct(tok):
            return UniversalTag.PUNCT
        if _is_number(tok):
            return UniversalTag.NUM
        lex = self.lexicons[lang]
        if tok in lex:
            return lex[tok]
        low = tok.lower()
        if low in lex:
            return lex[low]
        if len(tok) >= 2 and tok.isupper():
            return UniversalTag.NOUN
        if lang == "de" and tok[0].isupper():
            return UniversalTag.NOUN
        if lang == "en" and low.endswith("s") and not low.endswith("ss") and len(low) > 2:
            if prev in (UniversalTag.NOUN, UniversalTag.PRON):
                return UniversalTag.VERB
        for suffix, tag in _SUFFIXES[lang]:
            if low.endswith(suffix) and len(low) > len(suffix) + 1:
                return tag
        return UniversalTag.NOUN

    def tag_pos(self, text: str, lang: str) -> list[tuple[str, UniversalTag]]:
        key = primary_subtag(lang)
        if key not in self.lexicons:
            raise UnsupportedLanguage(f"built-in tagger has no lexicon for {lang!r}")
        out: list[tuple[str, UniversalTag]] = []
        prev = None
        for tok in tokenize(text):
            prev = self._tag_token(tok, key, prev)
            out.append((tok, prev))
        return out


class ExternalTagger:
    """Adapter around an external tagger process.

    ``command`` is an argv list; ``{lang}`` inside an argument is replaced by
    the language code. Tokens come from the shared tokenizer, so the output
    is always aligned with it.
    """

    def __init__(self, command: Sequence[str], mappings: dict[str, TagMapping], timeout: float = 60.0):
        self.command = list(command)
        self.mappings = {primary_subtag(k): v for k, v in mappings.items()}
        self.timeout = timeout
        self.fingerprint = "external-pos:" + hashlib.sha256(" ".join(self.command).encode()).hexdigest()[:16]

    def tag_many(self, texts: Sequence[str], lang: str) -> list[list[tuple[str, UniversalTag]]]:
        key = primary_subtag(lang)
        if key not in self.mappings:
            raise UnsupportedLanguage(f"no tag mapping configured for {lang!r}")
        mapping = self.mappings[key]
        sentences = [tokenize(t) for t in texts]
        payload = "".join("".join(tok + "\n" for tok in toks) + "\n" for toks in sentences)
        argv = [arg.replace("{lang}", key) for arg in self.command]
        try:
            proc = subprocess.run(
                argv, input=payload, capture_output=True, text=True, encoding="utf-8", timeout=self.timeout
            )
        except subprocess.TimeoutExpired as exc:
            raise ProviderTimeout(f"tagger timed out after {self.timeout}s") from exc
        except OSError as exc:
            raise ProviderUnavailable(f"cannot run tagger {argv[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            raise ProviderUnavailable(f"tagger exited with {proc.returncode}: {proc.stderr.strip()[:200]}")
        blocks = _split_blocks(proc.stdout)
        non_empty = [s for s in sentences if s]
        if len(blocks) != len(non_empty):
            raise ProviderUnavailable(f"tagger returned {len(blocks)} sentences for {len(non_empty)}")
        it = iter(blocks)
        result = []
        for toks in sentences:
            if not toks:
                result.append([])
                continue
            rows = next(it)
            if len(rows) != len(toks):
                raise ProviderUnavailable(f"tagger returned {len(rows)} tags for {len(toks)} tokens")
            result.append([(tok, mapping[fine]) for tok, (_, fine) in zip(toks, rows)])
        return result

    def tag_pos(self, text: str, lang: str) -> list[tuple[str, UniversalTag]]:
        return self.tag_many([text], lang)[0]


def _split_blocks(output: str) -> list[list[tuple[str, str]]]:
    blocks, current = [], []
    for line in output.splitlines():
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        token, _, fine = line.partition("\t")
        current.append((token, fine.strip()))
    if current:
        blocks.append(current)
    return blocks
