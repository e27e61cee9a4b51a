"""Persistent n-best cache: an append-only JSON-lines file.

Each line holds ``{"key": ..., "request": {...}, "response": [...]}`` where
the key is a SHA-256 over (provider id, languages, n, source text).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from pathlib import Path

from .base import NBestRequest, TranslationHypothesis, Translator

log = logging.getLogger(__name__)


def cache_key(provider_id: str, request: NBestRequest) -> str:
    payload = json.dumps(
        [provider_id, request.source_lang, request.target_lang, request.n, request.source_text],
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class MTCache:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, list[TranslationHypothesis]] = {}
        self._lock = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    hyps = [TranslationHypothesis(h["text"], float(h["score"])) for h in rec["response"]]
                except (ValueError, KeyError, TypeError):
                    # a torn final write from an interrupted run
                    log.warning("%s:%d: ignoring unreadable cache record", self.path, line_no)
                    continue
                self._entries[rec["key"]] = hyps

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> list[TranslationHypothesis] | None:
        return self._entries.get(key)

    def key_lock(self, key: str) -> threading.Lock:
        with self._lock:
            return self._key_locks.setdefault(key, threading.Lock())

    def put(self, key: str, request: NBestRequest, hyps: list[TranslationHypothesis]) -> None:
        record = {
            "key": key,
            "request": {
                "source": request.source_text,
                "srcLang": request.source_lang,
                "tgtLang": request.target_lang,
                "nBest": request.n,
            },
            "response": [{"text": h.text, "score": h.score} for h in hyps],
        }
        line = json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n"
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            self._entries[key] = list(hyps)


class CachedTranslator:
    """Wrap a translator so that each distinct request reaches it at most once."""

    def __init__(self, inner: Translator, cache: MTCache):
        self.inner = inner
        self.cache = cache
        self.fingerprint = inner.fingerprint
        self.misses = 0

    def translate_nbest(self, request: NBestRequest) -> list[TranslationHypothesis]:
        key = cache_key(self.inner.fingerprint, request)
        hit = self.cache.get(key)
        if hit is not None:
            return list(hit)
        with self.cache.key_lock(key):
            hit = self.cache.get(key)
            if hit is not None:
                return list(hit)
            hyps = self.inner.translate_nbest(request)
            self.misses += 1
            self.cache.put(key, request, hyps)
            return list(hyps)
