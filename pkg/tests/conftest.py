"""Shared fixtures: tiny corpora and profile documents used across suites."""

from collections import Counter

import pytest

from venuerec import Article, Corpus
from venuerec.profiles import Subprofile

# one line per acceptance criterion, printed after the run summary
ACCEPTANCE_LINES: list[str] = []


def note_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_article(i, venue, year=2010, text="", keywords=(), authors=()):
    return Article(
        article_id=f"a{i:04d}",
        venue_id=venue,
        year=year,
        title_abstract=text,
        keywords=tuple(keywords),
        authors=tuple(authors),
    )


def make_profile(doc_id, venue, content=None, keywords=None, authors=None, cluster=None):
    return Subprofile(
        doc_id=doc_id,
        venue_id=venue,
        cluster_id=cluster,
        n_articles=1,
        content=Counter(content or {}),
        keywords=Counter(keywords or {}),
        authors=Counter(authors or {}),
    )


@pytest.fixture
def two_doc_profiles():
    """The 2-document content fixture: cf(a)=2, cf(b)=4, |C_content|=6."""
    return [
        make_profile("d1", "v1", content={"a": 2, "b": 1}),
        make_profile("d2", "v2", content={"b": 3}),
    ]


@pytest.fixture
def padded_two_doc_profiles():
    """Variant where both docs carry a filler token, so |d2| = 4."""
    return [
        make_profile("d1", "v1", content={"b": 1, "x": 1}),
        make_profile("d2", "v2", content={"b": 3, "y": 1}),
    ]
