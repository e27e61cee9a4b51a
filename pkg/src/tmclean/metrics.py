"""String and sequence similarity kernels."""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Mapping, Sequence

from .errors import BothEmpty, EmptyReference, EmptyTarget


def levenshtein_chars(a: str, b: str) -> int:
    """Character edit distance (unit-cost insert/delete/substitute).

    Uses the bit-parallel formulation of the DP (Myers 1999, Hyyrö 2001):
    each DP column is held as two bit vectors of vertical +1/-1 deltas, so
    a column update is a handful of integer operations regardless of
    ``len(a)``. Python ints give unbounded width.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    if m == 0:
        return len(a)
    # pattern = shorter string
    peq: dict[str, int] = {}
    for i, ch in enumerate(b):
        peq[ch] = peq.get(ch, 0) | (1 << i)
    mask = (1 << m) - 1
    high = 1 << (m - 1)
    pv, mv, score = mask, 0, m
    for ch in a:
        eq = peq.get(ch, 0)
        xv = eq | mv
        xh = ((((eq & pv) + pv) & mask) ^ pv) | eq
        ph = mv | (~(xh | pv) & mask)
        mh = pv & xh
        if ph & high:
            score += 1
        elif mh & high:
            score -= 1
        ph = ((ph << 1) | 1) & mask
        mh = (mh << 1) & mask
        pv = mh | (~(xv | ph) & mask)
        mv = ph & xv
    return score


def cfs(a: str, b: str) -> float:
    """1 - edit distance / length of the longer string; 1.0 identical, 0.0 disjoint."""
    longer = max(len(a), len(b))
    if longer == 0:
        raise BothEmpty("cfs is undefined for two empty strings")
    return 1.0 - levenshtein_chars(a, b) / longer


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int = 4) -> float:
    """Smoothed sentence-level BLEU.

    Orders 1..min(max_n, len(candidate)); clipped precisions for orders >= 2
    get +1 on numerator and denominator, unigrams are left unsmoothed.
    """
    if not reference:
        raise EmptyReference("BLEU needs a non-empty reference")
    if not candidate:
        return 0.0
    top = min(max_n, len(candidate))
    log_sum = 0.0
    for n in range(1, top + 1):
        cand, ref = _ngrams(candidate, n), _ngrams(reference, n)
        matches = sum(min(c, ref[g]) for g, c in cand.items())
        total = sum(cand.values())
        if n >= 2:
            matches, total = matches + 1, total + 1
        if matches == 0:
            return 0.0
        log_sum += math.log(matches / total)
    bp = min(0.0, 1.0 - len(reference) / len(candidate))
    return min(1.0, math.exp(log_sum / top + bp))


def cosine_counts(u: Mapping, v: Mapping) -> float:
    """Cosine of two sparse non-negative count vectors; 1.0 if both are zero."""
    su = sum(x * x for x in u.values())
    sv = sum(x * x for x in v.values())
    if su == 0 and sv == 0:
        return 1.0
    if su == 0 or sv == 0:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(x * v.get(k, 0) for k, x in u.items())
    # one sqrt of the product keeps equal integer vectors at exactly 1.0
    return max(0.0, min(1.0, dot / math.sqrt(su * sv)))


def coverage(target_tokens: Iterable[str], hypothesis_tokens: Iterable[str]) -> float:
    """Share of distinct (case-folded) target tokens found among hypothesis tokens."""
    wanted = {t.casefold() for t in target_tokens}
    if not wanted:
        raise EmptyTarget("coverage needs at least one target token")
    have = {t.casefold() for t in hypothesis_tokens}
    return len(wanted & have) / len(wanted)
