import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmclean.errors import BothEmpty, EmptyReference, EmptyTarget
from tmclean.metrics import cfs, cosine_counts, coverage, levenshtein_chars, sentence_bleu

from oracles import bleu_oracle, levenshtein_oracle

short = st.text(alphabet="abc", max_size=8)
uni = st.text(st.characters(blacklist_categories=("Cs",)), max_size=90)


@pytest.mark.parametrize("a,b,d", [("kitten", "sitting", 3), ("", "abc", 3), ("abc", "", 3), ("flaw", "lawn", 2)])
def test_levenshtein_examples(a, b, d):
    assert levenshtein_chars(a, b) == d


@given(uni, uni)
def test_levenshtein_long_matches_oracle(a, b):
    # exercises the multi-word bit-vector path
    assert levenshtein_chars(a, b) == levenshtein_oracle(a, b)


def test_levenshtein_beyond_64_chars():
    rng = random.Random(5)
    for _ in range(30):
        a = "".join(rng.choice("ab") for _ in range(rng.randint(60, 140)))
        b = "".join(rng.choice("ab") for _ in range(rng.randint(60, 140)))
        assert levenshtein_chars(a, b) == levenshtein_oracle(a, b)


def test_levenshtein_counts_scalar_values():
    assert levenshtein_chars("é", "é") == 2
    assert levenshtein_chars("😀", "😁") == 1


@given(short, short, short)
def test_levenshtein_is_metric(a, b, c):
    assert levenshtein_chars(a, b) == levenshtein_chars(b, a)
    assert (levenshtein_chars(a, b) == 0) == (a == b)
    assert levenshtein_chars(a, c) <= levenshtein_chars(a, b) + levenshtein_chars(b, c)


def test_cfs_examples():
    assert cfs("abc", "abc") == 1.0
    assert cfs("abc", "abd") == pytest.approx(2 / 3)
    assert cfs("", "abc") == 0.0
    with pytest.raises(BothEmpty):
        cfs("", "")


@given(uni, uni)
def test_cfs_range_symmetry(a, b):
    if not a and not b:
        return
    v = cfs(a, b)
    assert 0.0 <= v <= 1.0
    assert v == cfs(b, a)


def test_bleu_hand_worked():
    assert sentence_bleu("the cat sat".split(), "the cat slept".split()) == pytest.approx(0.6057, abs=1e-4)
    expected = (2 / 3 * 2 / 3 * 1 / 2) ** (1 / 3)
    assert sentence_bleu("the cat sat".split(), "the cat slept".split()) == pytest.approx(expected, rel=1e-12)


def test_bleu_identity_disjoint_empty():
    six = "a b c d e f".split()
    assert sentence_bleu(six, six) == 1.0
    assert sentence_bleu(["x", "y"], ["a", "b"]) == 0.0
    assert sentence_bleu([], ["a"]) == 0.0
    with pytest.raises(EmptyReference):
        sentence_bleu(["a"], [])


def test_bleu_brevity_penalty():
    ref = "a b c d".split()
    assert sentence_bleu(["a", "b"], ref) == pytest.approx(math.exp(1 - 2) * (1 * 2 / 2) ** 0.5)


toks = st.lists(st.sampled_from("a b c d e".split()), max_size=9)


@given(toks, toks.filter(bool))
def test_bleu_matches_oracle(c, r):
    assert sentence_bleu(c, r) == pytest.approx(bleu_oracle(c, r), rel=1e-12, abs=1e-15)


@given(toks.filter(bool), toks.filter(bool))
def test_bleu_bounds(c, r):
    assert 0.0 <= sentence_bleu(c, r) <= 1.0 + 1e-12
    assert sentence_bleu(c, c) == pytest.approx(1.0)


@given(st.permutations(list("abcdefg")))
def test_bleu_permutation_never_beats_identity(perm):
    ref = list("abcdefg")
    assert sentence_bleu(perm, ref) <= sentence_bleu(ref, ref)


def test_cosine_examples():
    assert cosine_counts({"NOUN": 2, "VERB": 1}, {"NOUN": 1, "VERB": 1}) == pytest.approx(3 / math.sqrt(10))
    assert cosine_counts({"a": 1}, {"b": 1}) == 0.0
    assert cosine_counts({}, {}) == 1.0
    assert cosine_counts({"a": 0}, {"b": 2}) == 0.0
    assert cosine_counts({"a": 3, "b": 4}, {"a": 3, "b": 4}) == pytest.approx(1.0)


counts = st.dictionaries(st.sampled_from("abcd"), st.integers(0, 20), max_size=4)


@given(counts, counts, st.integers(1, 50))
def test_cosine_range_and_scale(u, v, k):
    c = cosine_counts(u, v)
    assert 0.0 <= c <= 1.0
    if any(u.values()):
        assert cosine_counts({x: k * y for x, y in u.items()}, v) == pytest.approx(c)


def test_coverage_examples():
    assert coverage(["a", "b", "c"], ["c", "b", "a", "z"]) == 1.0
    assert coverage(["a", "b", "c"], ["a", "c", "x"]) == pytest.approx(2 / 3)
    assert coverage(["a", "a", "b"], ["a"]) == 0.5
    assert coverage(["Haus"], ["haus"]) == 1.0
    with pytest.raises(EmptyTarget):
        coverage([], ["a"])
