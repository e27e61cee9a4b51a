"""Client for a remote MT engine speaking a small JSON-over-HTTP protocol.

``POST {endpoint}/translate`` with
``{"source": str, "srcLang": str, "tgtLang": str, "nBest": int}`` answers
``{"hypotheses": [{"text": str, "score": number}, ...]}``.
"""

from __future__ import annotations

import httpx

from ..errors import ProviderTimeout, ProviderUnavailable
from .base import NBestRequest, TranslationHypothesis, sort_hypotheses


class RemoteTranslator:
    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        provider_id: str | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.fingerprint = f"remote:{provider_id or self.endpoint}"
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def close(self) -> None:
        self._client.close()

    def translate_nbest(self, request: NBestRequest) -> list[TranslationHypothesis]:
        body = {
            "source": request.source_text,
            "srcLang": request.source_lang,
            "tgtLang": request.target_lang,
            "nBest": request.n,
        }
        try:
            resp = self._client.post(f"{self.endpoint}/translate", json=body)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"MT request timed out: {exc}") from exc
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"MT endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(f"MT endpoint answered HTTP {resp.status_code}")
        try:
            hyps = [
                TranslationHypothesis(str(h["text"]), float(h["score"]))
                for h in resp.json()["hypotheses"]
            ]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProviderUnavailable(f"malformed MT response: {exc}") from exc
        return sort_hypotheses(hyps, request.n)
