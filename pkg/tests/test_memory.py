import pytest

from fuzzy_memory.config import Config
from fuzzy_memory.detector import detect
from fuzzy_memory.errors import MissingWriterError, SentenceMismatchError
from fuzzy_memory.memory import (
    COMPLEMENTED,
    ERASED,
    REWRITE,
    TERM_REPLACEMENT,
    UNCHANGED,
    VALUE_COMPLEMENT,
    VALUE_REPLACEMENT,
    CorrectionClassifier,
    build_context_classes,
    induce,
    learn,
    mine_correct,
)
from fuzzy_memory.models import TaggedFragment
from fuzzy_memory.textmodel import make_document, render_tagged, tokenize

EASY = "Install the sensor in a location that allows easy viewing during inspection."


def _classify(lex, original, corrected, item_lemma):
    alert = next(a for a in detect(make_document(original), lex) if a.item.lemma == item_lemma)
    classifier = CorrectionClassifier(lex)
    before = tokenize(original)[0].surfaces
    after = tokenize(corrected)[0].surfaces if corrected is not None else None
    return classifier.classify(before, after, alert.span)


@pytest.mark.parametrize(
    "original, corrected, item, expected",
    [
        (
            "Progressively close the pipe.",
            "Progressively close the pipe in 30 seconds.",
            "progressively",
            (2, COMPLEMENTED),
        ),
        (
            "Progressively heat the probe.",
            "Heat the probe progressively in 5 seconds.",
            "progressively",
            (2, COMPLEMENTED),
        ),
        (
            "The power must be reduced progressively to 65% to reach 180 knots.",
            "Reduce the power to 65% with a reduction of 10% every 30 seconds to reach 180 knots.",
            "progressively",
            (2, VALUE_COMPLEMENT),
        ),
        (
            "Any new special conditions must be reported.",
            "Any new conditions must be reported.",
            "special",
            (3, ERASED),
        ),
        (
            "Proc. 690 used as a basic reference applicable to airborne.",
            "Proc. 690 used as a reference applicable to airborne.",
            "basic",
            (3, ERASED),
        ),
        (
            "Aircraft used in normal operation.",
            "Aircraft used with side winds below 35 kts and outside air temperature below 50 Celsius.",
            "normal",
            (4, TERM_REPLACEMENT),
        ),
        (
            "Take-off a few knots above V1.",
            "Take-off less than 12 knots above V1.",
            "a few",
            (2, VALUE_REPLACEMENT),
        ),
        (
            "Park near the gate.",
            "Park less than 100 meters from the gate.",
            "near",
            (2, VALUE_REPLACEMENT),
        ),
        (
            "Carefully plug-in the mother card.",
            "Carefully plug-in the mother card otherwise you may damage the connectors.",
            "carefully",
            (2, COMPLEMENTED),
        ),
        (
            "Regularly check the filter.",
            "Every 50 hours check the filter.",
            "regularly",
            (2, VALUE_REPLACEMENT),
        ),
        (
            "Use a convenient programming language.",
            "Use a programming language that has debugging tools.",
            "convenient",
            (4, TERM_REPLACEMENT),
        ),
        (
            "Check that the engine runs in normal conditions.",
            "The maintenance team records the engine vibration at each stop.",
            "normal",
            (5, REWRITE),
        ),
        (EASY, EASY, "easy", (1, UNCHANGED)),
        (EASY, None, "easy", (1, UNCHANGED)),
    ],
)
def test_classify_worked_examples(lex, original, corrected, item, expected):
    assert _classify(lex, original, corrected, item) == expected


def test_classify_tighter_ratio_turns_term_replacement_into_rewrite(lex):
    alert = detect(make_document("Aircraft used in normal operation."), lex)[0]
    strict = CorrectionClassifier(lex, case4_edit_ratio=0.1)
    before = tokenize("Aircraft used in normal operation.")[0].surfaces
    after = tokenize("Aircraft used with side winds below 35 kts.")[0].surfaces
    assert strict.classify(before, after, alert.span) == (5, REWRITE)


def test_learn_records_writer_and_fragments(lex, store):
    original = make_document("Progressively heat the probe.", "manual")
    corrected = make_document("Heat the probe progressively in 5 seconds.", "manual")

    records = learn(original, corrected, "John", lex, store, timestamp="t0")

    assert len(records) == 1
    record = records[0]
    assert store.records == [record]
    assert record.id == "rec-000001"
    assert record.writer_id == "John"
    assert record.case == 2
    assert render_tagged(record.original) == "<fuzzy> Progressively </fuzzy> heat the probe ."
    assert (
        render_tagged(record.corrected)
        == "Heat the probe <revised> progressively in 5 seconds </revised> ."
    )


def test_learn_unchanged_document_records_case_one(lex, store):
    doc = make_document("Park near the gate.\nTake-off a few knots above V1.\n")
    records = learn(doc, doc, "w1", lex, store)
    assert [(r.item_lemma, r.case, r.corrected) for r in records] == [
        ("near", 1, None),
        ("a few", 1, None),
    ]


def test_learn_three_alerts_two_corrected(lex, store):
    original = make_document(
        "Progressively heat the probe.\nPark near the gate.\n"
        "Any new special conditions must be reported.\n"
    )
    corrected = make_document(
        "Progressively heat the probe in 5 seconds.\nPark near the gate.\n"
        "Any new conditions must be reported.\n"
    )
    records = learn(original, corrected, "w1", lex, store)
    assert [r.case for r in records] == [2, 1, 3]
    assert sum(1 for r in records if r.case == 1) == 1


def test_learn_attributes_edits_to_nearest_alert(lex, store):
    original = make_document("Regularly check the valves near the gate.")
    corrected = make_document("Every 50 hours check the valves near the gate.")
    records = learn(original, corrected, "w1", lex, store)
    assert [(r.item_lemma, r.case, r.rule) for r in records] == [
        ("regularly", 2, VALUE_REPLACEMENT),
        ("near", 1, UNCHANGED),
    ]


def test_learn_requires_writer(lex, store):
    doc = make_document("Park near the gate.")
    with pytest.raises(MissingWriterError):
        learn(doc, doc, "  ", lex, store)


def test_learn_rejects_sentence_count_mismatch(lex, store):
    original = make_document("Park near the gate.\nClose the pipe.")
    corrected = make_document("Park less than 100 meters from the gate.")
    with pytest.raises(SentenceMismatchError) as exc:
        learn(original, corrected, "w1", lex, store)
    assert exc.value.index == 0
    assert store.records == []


def test_mine_correct_indexes_quantity_realizations(lex, store):
    corpus = make_document(
        "Heat the probe in 2 to 4 mns.\nProgressively heat the probe in 2 to 4 mns.\n",
        "corpus",
    )
    found = mine_correct([corpus], lex, store)

    assert [r.text for r in found] == ["in 2 to 4 mns"]
    realization = found[0]
    assert realization.id == "real-000001"
    assert realization.context.head == "heat"
    assert realization.context.additional_lemmas == ("probe",)
    assert store.realizations == found


def _easy_store(lex, store, uncorrected, erased=0):
    lines = [EASY] * (uncorrected + erased)
    fixed = [EASY] * uncorrected + [EASY.replace("easy ", "")] * erased
    learn(make_document("\n".join(lines)), make_document("\n".join(fixed)), "w1", lex, store)
    return store


def test_induce_emits_unvalidated_deactivation_at_threshold(lex, store, catalog):
    _easy_store(lex, store, 5)
    result = induce(store, Config(), lex, catalog)

    assert result.classes == 1
    assert len(store.deactivations.entries) == 1
    entry = store.deactivations.entries[0]
    assert entry.item_lemma == "easy"
    assert entry.context.head == "view"
    assert entry.support == 5
    assert not entry.validated
    assert result.deactivations_added == [entry.id]
    # pending entries do not suppress anything yet
    assert len(detect(make_document(EASY), lex, store.deactivations)) == 1

    assert store.validate(entry.id, "t1")
    assert detect(make_document(EASY), lex, store.deactivations) == []


def test_induce_below_threshold_emits_nothing(lex, store, catalog):
    _easy_store(lex, store, 4)
    induce(store, Config(), lex, catalog)
    assert store.deactivations.entries == []


def test_induce_is_idempotent(lex, store, catalog):
    _easy_store(lex, store, 5)
    first = induce(store, Config(), lex, catalog)
    second = induce(store, Config(), lex, catalog)
    assert first.changes > 0
    assert second.changes == 0
    assert second.deactivations_added == []


def test_one_correction_removes_deactivation_eligibility(lex, store, catalog):
    _easy_store(lex, store, 5)
    induce(store, Config(), lex, catalog)
    entry_id = store.deactivations.entries[0].id

    learn(
        make_document(EASY),
        make_document(EASY.replace("easy ", "")),
        "w2",
        lex,
        store,
    )
    result = induce(store, Config(), lex, catalog)

    assert store.records[-1].case == 3
    assert store.deactivations.entries == []
    assert result.deactivations_removed == [entry_id]


def test_validation_survives_reinduction(lex, store, catalog):
    _easy_store(lex, store, 5)
    induce(store, Config(), lex, catalog)
    store.validate(store.deactivations.entries[0].id, "t1")

    induce(store, Config(), lex, catalog)
    assert store.deactivations.entries[0].validated
    assert not store.validate(store.deactivations.entries[0].id, "t2")


def test_global_deactivation_needs_several_contexts(lex, store, catalog):
    sentences = [
        "Use the easy panel.",
        "Open the easy cover.",
        "Check the easy valve.",
    ]
    text = "\n".join(sentences * 5)
    learn(make_document(text), make_document(text), "w1", lex, store)
    induce(store, Config(), lex, catalog)

    globals_ = [d for d in store.deactivations.entries if d.is_global]
    assert len(globals_) == 1
    assert globals_[0].support == 15
    assert sum(1 for d in store.deactivations.entries if not d.is_global) == 3


def test_context_classes_group_matching_contexts(lex, store):
    _easy_store(lex, store, 2, erased=1)
    classes = build_context_classes(store.records, 2, lex)
    assert len(classes) == 1
    assert (classes[0].uncorrected, classes[0].corrected) == (2, 1)
    assert classes[0].record_ids == [r.id for r in store.records]


def test_recommendations_rank_fillers_by_frequency(lex, store, catalog):
    original = make_document("\n".join(["Progressively close the pipe."] * 4))
    corrected = make_document(
        "\n".join(
            ["Progressively close the pipe in 30 seconds."] * 3
            + ["Progressively close the pipe in 10 seconds."]
        )
    )
    learn(original, corrected, "w1", lex, store)
    induce(store, Config(), lex, catalog)

    (cls,) = store.classes
    fillers = store.recommendations[("P-prog", cls.id)]["time_interval"]
    assert [(f.text, f.frequency) for f in fillers] == [
        ("30 seconds", 3),
        ("10 seconds", 1),
    ]


def test_recommendations_merge_realizations(lex, store, catalog):
    mine_correct(
        [make_document("Heat the probe in 2 to 4 mns.\nHeat the probe in 2 to 4 mns.\n")],
        lex,
        store,
    )
    learn(
        make_document("Progressively heat the probe."),
        make_document("Progressively heat the probe in 5 seconds."),
        "w1",
        lex,
        store,
    )
    induce(store, Config(), lex, catalog)

    (cls,) = store.classes
    fillers = store.recommendations[("P-prog", cls.id)]["time_interval"]
    assert [(f.text, f.frequency) for f in fillers] == [
        ("2 to 4 mns", 2),
        ("5 seconds", 1),
    ]


def test_record_fragments_keep_tokens(lex, store):
    learn(
        make_document("Park near the gate."),
        make_document("Park less than 100 meters from the gate."),
        "w1",
        lex,
        store,
    )
    record = store.records[0]
    assert isinstance(record.corrected, TaggedFragment)
    assert record.corrected.tokens() == [
        "Park", "less", "than", "100", "meters", "from", "the", "gate", ".",
    ]
    assert record.original.region("fuzzy") == (1, 2)
