"""Synthetic labeled corpora for end-to-end checks and demos.

Clean units pair an English UI-style sentence with a glossary translation
(sometimes with a small defect, labeled "almost correct"). A fraction of
units is corrupted and labeled incorrect, in one of three ways: the target
of another unit, a sentence in the wrong language, or a target cut at about
half its length.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import Label, LabeledUnit, TranslationUnit
from .providers.glossary import GlossaryTranslator
from .providers.langid import seed_text
from .text import detokenize, tokenize

NOUNS = (
    "file drawing layer button window menu tool object model view setting folder user "
    "dialog option command line point text color size name value document project page "
    "toolbar printer sheet table block template version error message list tab"
).split()
PLURALS = "files drawings layers objects settings options lines points values tools changes".split()
VERBS = (
    "click select open save close delete create move copy enter display show use add "
    "remove export import print edit rename update change"
).split()
ADJS = "new current selected default large small visible hidden empty first last red blue green".split()
CAPS = "DWG DXF PDF CAD API XML FBX STL RGB USB".split()

TEMPLATES = (
    "{V} the {n}.",
    "{V} the {a} {n}.",
    "{V} the {n} in the {n}.",
    "You can {v} the {n} from the {n}.",
    "To {v} a {n}, {v} the {n}.",
    "The {n} is {a}.",
    "The {n} and the {n} are {a}.",
    "If the {n} is {a}, {v} the {n} again.",
    "{V} the {n} as {C}.",
    "Do you want to {v} the {n}?",
    "Set the {n} to {d}.",
    "{V} all {p} in the {a} {n}.",
    "Use the {C} {n} to {v} the {n}.",
    "{V} the {n} ({C}) and {v} the {p}.",
    "You must {v} the {a} {p} first.",
    "Each {n} can {v} the {p} with {C} {n}.",
)

CORRUPTIONS = ("shuffled", "wrong_language", "truncated")
WRONG_LANGS = ("en", "es", "it")


@dataclass
class SyntheticCorpus:
    units: list[LabeledUnit]
    kinds: dict[str, str] = field(default_factory=dict)  # unit id -> clean/almost/corruption kind

    def corrupted_ids(self) -> set[str]:
        return {uid for uid, k in self.kinds.items() if k in CORRUPTIONS}


def _fill(template: str, rng: random.Random) -> str:
    out = template
    slots = {
        "{V}": lambda: rng.choice(VERBS).capitalize(),
        "{v}": lambda: rng.choice(VERBS),
        "{n}": lambda: rng.choice(NOUNS),
        "{p}": lambda: rng.choice(PLURALS),
        "{a}": lambda: rng.choice(ADJS),
        "{C}": lambda: rng.choice(CAPS),
        "{d}": lambda: str(rng.randint(1, 500)),
    }
    while "{" in out:
        start = out.index("{")
        slot = out[start : start + 3]
        out = out[:start] + slots[slot]() + out[start + 3 :]
    return out


def _translate(source: str, glossary: GlossaryTranslator, rng: random.Random, vary: float) -> str:
    """A reference translation: mostly first choices, some alternatives."""
    picked = []
    for tok in tokenize(source):
        opts = glossary.options(tok)
        picked.append(opts[0] if len(opts) == 1 or rng.random() >= vary else rng.choice(opts[1:]))
    return detokenize(picked)


def _small_defect(target: str, rng: random.Random) -> str:
    toks = tokenize(target)
    wordy = [i for i, t in enumerate(toks) if t.isalpha() and len(t) > 3]
    if not wordy:
        return target + " ."
    i = rng.choice(wordy)
    word = toks[i]
    if rng.random() < 0.5:
        j = rng.randrange(len(word) - 1)
        toks[i] = word[:j] + word[j + 1] + word[j] + word[j + 2 :]
    else:
        del toks[i]
    return detokenize(toks)


def _truncate(target: str) -> str:
    half = max(1, len(target) // 2)
    cut = target.rfind(" ", 0, half + 1)
    return (target[:cut] if cut > 0 else target[:half]).strip()


def make_corpus(
    n: int = 1400,
    corrupt_fraction: float = 0.2,
    almost_fraction: float = 0.1,
    seed: int = 0,
    glossary: GlossaryTranslator | None = None,
) -> SyntheticCorpus:
    """Generate ``n`` labeled en-de units; ``round(n * corrupt_fraction)`` are corrupted."""
    rng = random.Random(seed)
    glossary = glossary or GlossaryTranslator.bundled("en-de")
    wrong = {lang: [s for s in seed_text(lang).splitlines() if s.strip()] for lang in WRONG_LANGS}
    sources = [_fill(rng.choice(TEMPLATES), rng) for _ in range(n)]
    targets = [_translate(s, glossary, rng, vary=0.3) for s in sources]
    n_bad = round(n * corrupt_fraction)
    bad = set(rng.sample(range(n), n_bad))
    units: list[LabeledUnit] = []
    kinds: dict[str, str] = {}
    for i, (src, tgt) in enumerate(zip(sources, targets)):
        uid = f"syn-{i + 1:05d}"
        label = Label.CORRECT
        kind = "clean"
        if i in bad:
            kind = CORRUPTIONS[rng.randrange(len(CORRUPTIONS))]
            label = Label.INCORRECT
            if kind == "shuffled":
                j = rng.randrange(n)
                while targets[j] == tgt:
                    j = rng.randrange(n)
                tgt = targets[j]
            elif kind == "wrong_language":
                tgt = rng.choice(wrong[rng.choice(WRONG_LANGS)])
            else:
                tgt = _truncate(tgt)
        elif rng.random() < almost_fraction:
            kind = "almost"
            label = Label.ALMOST_CORRECT
            tgt = _small_defect(tgt, rng)
        units.append(LabeledUnit(TranslationUnit(uid, "en", "de", src, tgt), label))
        kinds[uid] = kind
    return SyntheticCorpus(units, kinds)
