"""Word-by-word dictionary translator used as a deterministic MT stand-in."""

from __future__ import annotations

import hashlib
import heapq
from importlib import resources
from pathlib import Path

from ..core import primary_subtag
from ..errors import DataError, UnsupportedPair
from ..text import detokenize, tokenize
from .base import NBestRequest, TranslationHypothesis


class GlossaryTranslator:
    """Translate token by token; unknown tokens pass through unchanged.

    An entry may list several alternatives, best first. The n-best list is
    the cartesian product of alternatives enumerated by increasing total
    alternative rank (score = -rank sum), capped at ``n``.
    """

    def __init__(self, source_lang: str, target_lang: str, entries: dict[str, list[str]]):
        self.source_lang = primary_subtag(source_lang)
        self.target_lang = primary_subtag(target_lang)
        self.entries = {k: list(v) for k, v in entries.items() if v}
        blob = "\n".join(f"{k}\t{'|'.join(v)}" for k, v in sorted(self.entries.items()))
        digest = hashlib.sha256(f"{self.source_lang}-{self.target_lang}\n{blob}".encode()).hexdigest()
        self.fingerprint = f"glossary:{digest[:16]}"

    @classmethod
    def load(cls, path: str | Path, source_lang: str | None = None, target_lang: str | None = None):
        """Read a glossary TSV: ``source<TAB>alt1|alt2|...``.

        A ``# pair: en-de`` comment supplies the language pair when it is not
        passed explicitly.
        """
        entries: dict[str, list[str]] = {}
        pair = None
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if line.startswith("#"):
                    if line[1:].strip().startswith("pair:"):
                        pair = line.split(":", 1)[1].strip()
                    continue
                if not line.strip():
                    continue
                cols = line.split("\t")
                if len(cols) != 2:
                    raise DataError(f"{path}:{line_no}: expected 2 columns")
                entries[cols[0]] = [alt.strip() for alt in cols[1].split("|") if alt.strip()]
        if source_lang is None or target_lang is None:
            if pair is None:
                raise DataError(f"{path}: no '# pair:' header and no language pair given")
            source_lang, target_lang = pair.split("-", 1)
        return cls(source_lang, target_lang, entries)

    @classmethod
    def bundled(cls, pair: str = "en-de") -> GlossaryTranslator:
        res = resources.files(__package__).joinpath(f"data/glossary/{pair}.tsv")
        if not res.is_file():
            raise DataError(f"no bundled glossary for {pair!r}")
        with resources.as_file(res) as p:
            return cls.load(p)

    def options(self, token: str) -> list[str]:
        """Translations of one token, best first; unknown tokens map to themselves.

        A capitalized token found only in lower case gets capitalized output.
        """
        if token in self.entries:
            return self.entries[token]
        folded = token.casefold()
        if folded in self.entries:
            alts = self.entries[folded]
            if token[:1].isupper():
                alts = [a[:1].upper() + a[1:] for a in alts]
            return alts
        return [token]

    def translate_nbest(self, request: NBestRequest) -> list[TranslationHypothesis]:
        if (primary_subtag(request.source_lang), primary_subtag(request.target_lang)) != (
            self.source_lang,
            self.target_lang,
        ):
            raise UnsupportedPair(
                f"glossary covers {self.source_lang}->{self.target_lang}, "
                f"not {request.source_lang}->{request.target_lang}"
            )
        options = [self.options(tok) for tok in tokenize(request.source_text)]
        if not options:
            return [TranslationHypothesis("", 0.0)]
        # best-first enumeration of rank vectors
        start = (0,) * len(options)
        heap = [(0, start)]
        seen = {start}
        out: list[TranslationHypothesis] = []
        while heap and len(out) < request.n:
            cost, ranks = heapq.heappop(heap)
            text = detokenize([options[i][r] for i, r in enumerate(ranks)])
            out.append(TranslationHypothesis(text, float(-cost)))
            for i, r in enumerate(ranks):
                if r + 1 < len(options[i]):
                    nxt = ranks[:i] + (r + 1,) + ranks[i + 1 :]
                    if nxt not in seen:
                        seen.add(nxt)
                        heapq.heappush(heap, (cost + 1, nxt))
        return out
