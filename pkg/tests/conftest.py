import pytest

from fuzzy_memory.config import DATA_DIR
from fuzzy_memory.lexicon import Lexicon, LexiconParser
from fuzzy_memory.patterns import builtin_catalog
from fuzzy_memory.store import MemoryStore


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless `-m slow` is explicitly selected."""

    # Without a marker expression the performance smoke tests stay out of
    # the default run.
    if not config.getoption("-m"):
        skip_me = pytest.mark.skip(reason="use `-m slow` to run this test")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_me)


def _read(name: str) -> str:
    return (DATA_DIR / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def lex() -> Lexicon:
    """The shipped starter lexicon, built without touching the event loop."""
    parser = LexiconParser()
    return Lexicon(
        items=tuple(parser.parse_items(_read("fuzzy_lexicon.tsv"))),
        words=tuple(parser.parse_words(_read("words.tsv"))),
        stopwords=parser.parse_stopwords(_read("stopwords.txt")),
        synonyms=parser.parse_synonyms(_read("synonyms.txt")),
    )


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


@pytest.fixture
def store() -> MemoryStore:
    return MemoryStore()
