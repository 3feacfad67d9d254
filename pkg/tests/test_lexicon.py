import pytest

from fuzzy_memory.errors import DuplicateEntryError, InvalidSeverityError, LexiconError
from fuzzy_memory.lexicon import Lexicon, LexiconParser, load_lexicon, save_lexicon
from fuzzy_memory.models import (
    Context,
    CorrectionRecord,
    FuzzyItem,
    TaggedFragment,
    WordEntry,
)


def test_parse_items_reads_severity_row():
    items = LexiconParser().parse_items("progressively\tmanner_adverb\t3\n")
    assert items == [FuzzyItem("progressively", "manner_adverb", 3)]


def test_parse_items_empty_file():
    assert LexiconParser().parse_items("") == []
    assert Lexicon().items == ()


def test_parse_items_rejects_bad_severity_with_line_number():
    text = "# header\nprogressively\tmanner_adverb\t3\nnear\tpreposition\t4\n"
    with pytest.raises(InvalidSeverityError) as exc:
        LexiconParser().parse_items(text)
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)


@pytest.mark.parametrize(
    "text, error",
    [
        ("near\tpreposition\n", LexiconError),
        ("near\tplace\t2\n", LexiconError),
        ("near\tpreposition\tthree\n", InvalidSeverityError),
        ("near\tpreposition\t2\nnear\tpreposition\t3\n", DuplicateEntryError),
    ],
)
def test_parse_items_rejects_malformed_rows(text, error):
    with pytest.raises(error):
        LexiconParser().parse_items(text)


def test_parse_words_checks_feature_placement():
    parser = LexiconParser()
    assert parser.parse_words("gate\tnoun\tlocation\n") == [
        WordEntry("gate", "noun", frozenset({"location"}))
    ]
    with pytest.raises(LexiconError, match="verb features"):
        parser.parse_words("gate\tnoun\tdurative\n")
    with pytest.raises(LexiconError, match="noun features"):
        parser.parse_words("heat\tverb\tunit\n")


def test_variant_owned_by_two_items_is_rejected():
    with pytest.raises(DuplicateEntryError):
        Lexicon(
            items=(
                FuzzyItem("minimize", "verb_modal", 2, ("minimise",)),
                FuzzyItem("reduce", "verb_modal", 1, ("minimise",)),
            )
        )


def test_stopword_cannot_be_an_item():
    with pytest.raises(LexiconError):
        Lexicon(items=(FuzzyItem("some", "determiner", 3),), stopwords=frozenset({"some"}))


@pytest.mark.parametrize(
    "surface, lemma, category, severity",
    [
        ("Progressively", "progressively", "manner_adverb", 3),
        ("PROGRESSIVELY", "progressively", "manner_adverb", 3),
        ("minimizes", "minimize", "verb_modal", 2),
        ("minimise", "minimize", "verb_modal", 2),
        ("lots of", "a lot of", "determiner", 3),
        ("a few", "a few", "determiner", 3),
        ("next to", "next to", "preposition", 2),
    ],
)
def test_lookup_fuzzy(lex, surface, lemma, category, severity):
    item = lex.lookup_fuzzy(surface)
    assert item is not None
    assert (item.lemma, item.category, item.severity) == (lemma, category, severity)


@pytest.mark.parametrize("surface", ["pipe", "the", "", "close"])
def test_lookup_fuzzy_misses(lex, surface):
    assert lex.lookup_fuzzy(surface) is None


def test_categorize(lex):
    assert lex.categorize("heat") == frozenset(
        {
            WordEntry("heat", "verb", frozenset({"action", "durative"})),
            WordEntry("heat", "noun", frozenset()),
        }
    )
    assert lex.categorize("the") == frozenset()
    assert lex.categorize(",") == frozenset()
    assert lex.categorize("frobnicator") == frozenset({WordEntry("frobnicator", "noun")})
    assert lex.categorize("35") == frozenset(
        {WordEntry("35", "other", frozenset({"quantity"}))}
    )
    # fuzzy items missing from the word file take their category's pos
    assert lex.categorize("regularly") == frozenset({WordEntry("regularly", "adverb")})


def test_quantity_helpers(lex):
    assert lex.is_quantity("12")
    assert lex.is_quantity("knots")
    assert lex.is_quantity("than")
    assert not lex.is_quantity("gate")
    assert lex.is_numeral("twelve")
    assert not lex.is_numeral("knots")


def test_same_word_uses_synonym_sets(lex):
    assert lex.same_word("gate", "door")
    assert lex.same_word("kts", "knot")
    assert not lex.same_word("pipe", "probe")


def _record(item: str, case: int, seq: int) -> CorrectionRecord:
    return CorrectionRecord(
        id=f"rec-{seq:06d}",
        seq=seq,
        item_lemma=item,
        category="adjective",
        severity=2,
        original=TaggedFragment(("x",)),
        corrected=None,
        writer_id="w",
        context=Context(item, ""),
        case=case,
        rule="unchanged",
        timestamp="",
    )


def test_suggest_demotions_reports_mostly_uncorrected_items():
    lex = Lexicon(items=(FuzzyItem("easy", "adjective", 2), FuzzyItem("basic", "adjective", 1)))
    records = [_record("easy", 1, n) for n in range(1, 5)] + [_record("easy", 3, 5)]
    records += [_record("basic", 1, n) for n in range(6, 12)]

    demotions = lex.suggest_demotions(records, min_records=5)

    assert demotions == [(FuzzyItem("easy", "adjective", 2), 1, 0.8)]
    assert lex.suggest_demotions(records[:4], min_records=5) == []


async def test_load_save_round_trip(tmp_path, lex):
    target = tmp_path / "lexicon.tsv"
    await save_lexicon(lex, target)

    reloaded = await load_lexicon(target)
    assert reloaded.items == lex.items

    again = tmp_path / "again.tsv"
    await save_lexicon(reloaded, again)
    assert again.read_text() == target.read_text()


def test_lookups_are_computed_once(lex):
    assert lex.max_item_words == 3
    first = lex.categorize("valves")
    assert lex.categorize("valves") is first
    assert lex.lookup_fuzzy("Lots of") is lex.lookup_fuzzy("Lots of")
    assert lex.lookup_fuzzy("Lots of").lemma == "a lot of"
    assert ("categorize", "valves") in lex._memo
