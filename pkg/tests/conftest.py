from __future__ import annotations

import pytest

from tmclean.core import Label, LabeledUnit, TranslationUnit
from tmclean.features import FeatureContext
from tmclean.providers.glossary import GlossaryTranslator
from tmclean.providers.langid import NGramLanguageIdentifier
from tmclean.providers.pos import BuiltinTagger


@pytest.fixture(scope="session")
def glossary():
    return GlossaryTranslator.bundled("en-de")


@pytest.fixture(scope="session")
def identifier():
    return NGramLanguageIdentifier.from_seed_corpora()


@pytest.fixture(scope="session")
def tagger():
    return BuiltinTagger()


@pytest.fixture(scope="session")
def ctx(glossary, tagger, identifier):
    return FeatureContext(glossary, tagger, identifier)


def tu(src: str, tgt: str, uid: str = "u1", sl: str = "en", tl: str = "de") -> TranslationUnit:
    return TranslationUnit(uid, sl, tl, src, tgt)


def lu(src: str, tgt: str, label: int, uid: str = "u1") -> LabeledUnit:
    return LabeledUnit(tu(src, tgt, uid), Label(label))


# -- acceptance report: one line per criterion ------------------------------------

_criteria: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key, value in report.user_properties:
        if key == "criterion":
            number, title = value
            outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
            prev = _criteria.get(number)
            if prev is None or prev[0] == "PASS" or outcome == "FAIL":
                _criteria[number] = (outcome, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcome, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {outcome}  {title}")
