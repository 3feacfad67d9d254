import random
import time

import pytest

from fuzzy_memory.detector import (
    annotate,
    context_match,
    detect,
    extract_context,
    is_suppressed,
)
from fuzzy_memory.lexicon import Lexicon
from fuzzy_memory.models import (
    Context,
    ContextWord,
    Deactivation,
    DeactivationSet,
    FuzzyItem,
)
from fuzzy_memory.textmodel import make_document, tokenize


def _context(sentence_text, item_lemma, lex):
    sentence = tokenize(sentence_text)[0]
    alert = next(
        a for a in detect(make_document(sentence_text), lex) if a.item.lemma == item_lemma
    )
    return extract_context(sentence, alert.span, alert.item, lex)


def _words(*lemmas):
    return tuple(ContextWord(lemma, "noun") for lemma in lemmas)


def test_context_of_determiner_uses_following_noun(lex):
    context = _context("Take-off a few knots above V1.", "a few", lex)
    assert context.head == "knot"
    assert context.additional_lemmas == ("take-off", "v1")
    assert "above" not in context.additional_lemmas


def test_context_of_adverb_uses_nearest_verb(lex):
    context = _context(
        "Progressively heat the probe until the chamber sensor reads stable values.",
        "progressively",
        lex,
    )
    assert context.head == "heat"
    assert context.additional_lemmas == ("probe", "chamber sensor", "read", "stable")
    assert [w.pos for w in context.additional] == ["noun", "noun", "verb", "adjective"]


def test_context_of_bare_item_is_empty(lex):
    sentence = tokenize("a few")[0]
    item = lex.lookup_fuzzy("a few")
    context = extract_context(sentence, (0, 2), item, lex)
    assert context == Context("a few", "", ())
    assert context.flagged


def test_context_size_is_bounded(lex):
    text = "Use the easy panel with cable, screw, bolt, pump, valve, filter and tank."
    context = _context(text, "easy", lex)
    assert context.head == "panel"
    assert len(context.additional) == 4
    assert context.item_lemma not in context.additional_lemmas
    assert context.head not in context.additional_lemmas


def test_detect_single_alert(lex):
    alerts = detect(make_document("Progressively heat the probe.", "manual"), lex)
    assert len(alerts) == 1
    alert = alerts[0]
    assert (alert.item.lemma, alert.severity, alert.span) == ("progressively", 3, (0, 1))
    assert alert.id == "manual:0:0"
    assert alert.context.head == "heat"


def test_detect_prefers_longest_match_without_overlap(lex):
    alerts = detect(make_document("a few of the few options"), lex)
    assert [(a.item.lemma, a.span) for a in alerts] == [("a few", (0, 2)), ("few", (4, 5))]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("Wait a few more than usual.", [("few more than", (2, 5))]),
        ("Wait a few more.", [("a few", (1, 3))]),
        (
            "Wait a few more than a few cycles.",
            [("few more than", (2, 5)), ("a few", (5, 7))],
        ),
    ],
)
def test_overlapping_items_resolve_longest_then_leftmost(text, expected):
    lex = Lexicon(
        items=(
            FuzzyItem("a few", "determiner", 3),
            FuzzyItem("few more", "determiner", 3),
            FuzzyItem("few more than", "determiner", 3),
        )
    )
    alerts = detect(make_document(text), lex)
    assert [(a.item.lemma, a.span) for a in alerts] == expected
    assert [a.id for a in alerts] == [f":0:{span[0]}" for _, span in expected]


def test_detect_matches_variants_and_inflections(lex):
    alerts = detect(make_document("It minimizes leaks and lots of noise."), lex)
    assert [a.item.lemma for a in alerts] == ["minimize", "a lot of"]


def test_validated_contextual_deactivation_suppresses(lex):
    doc = make_document("Progressively heat the probe.")
    context = detect(doc, lex)[0].context
    pending = DeactivationSet([Deactivation("deact-1", "progressively", context, 5)])
    active = DeactivationSet([Deactivation("deact-1", "progressively", context, 5, True)])

    assert len(detect(doc, lex, pending)) == 1
    assert detect(doc, lex, active) == []
    # another head keeps alerting
    assert len(detect(make_document("Progressively close the pipe."), lex, active)) == 1


def test_global_deactivation_suppresses_every_context(lex):
    deact = DeactivationSet([Deactivation("deact-g", "progressively", None, 15, True)])
    doc = make_document("Progressively heat the probe.\nProgressively close the pipe.")
    assert detect(doc, lex, deact) == []
    assert is_suppressed(Context("progressively", "anything"), deact)


def test_context_match_rules(lex):
    c1 = Context("progressively", "heat", _words("heat", "probe", "sensor", "valve"))
    c2 = Context("progressively", "heat", _words("probe", "heat", "gauge"))
    assert context_match(c1, c1, k=2)
    assert context_match(c1, c2, k=2)
    assert context_match(c2, c1, k=2)
    assert not context_match(c1, c2, k=3)

    pipe = Context("progressively", "pipe", _words("heat", "probe"))
    probe = Context("progressively", "probe", _words("heat", "probe"))
    assert not context_match(pipe, probe, k=0, lex=lex)

    other_item = Context("gradually", "heat", c1.additional)
    assert not context_match(c1, other_item)
    assert context_match(c1, other_item, match_item=False)


def test_context_match_accepts_synonym_heads(lex):
    gate = Context("near", "gate", _words("park"))
    door = Context("near", "door", _words("park"))
    assert context_match(gate, door, lex=lex)
    assert not context_match(gate, door)


def test_annotate_wraps_alert_spans(lex):
    text = "Park near the gate.\nTake-off a few knots above V1.\n"
    doc = make_document(text, "manual")
    annotated = annotate(doc, detect(doc, lex))
    assert annotated == (
        "Park <fuzzy id=1 sev=3>near</fuzzy> the gate.\n"
        "Take-off <fuzzy id=2 sev=3>a few</fuzzy> knots above V1.\n"
    )


FILLERS = ["inspect", "the", "valve", "pump", "panel", "cable", "install", "fuel", "tank"]


def _synthetic_corpus(lex, rng, sentences):
    """Filler sentences with items spliced in, plus the spans they landed on."""
    items = sorted(lex.items, key=lambda i: i.lemma)
    lines, expected = [], set()
    for index in range(sentences):
        tokens = []
        for _ in range(rng.randint(1, 3)):
            tokens += [rng.choice(FILLERS) for _ in range(rng.randint(1, 4))]
            if rng.random() < 0.6:
                item = rng.choice(items)
                expected.add((index, len(tokens), len(tokens) + len(item.words), item.lemma))
                tokens += item.words
        tokens.append(rng.choice(FILLERS))
        lines.append(" ".join(tokens) + " .")
    return "\n".join(lines) + "\n", expected


def test_synthetic_precision_and_recall(lex):
    rng = random.Random(7)
    text, expected = _synthetic_corpus(lex, rng, 300)
    alerts = detect(make_document(text, "synthetic"), lex)
    found = {(a.sentence_index, a.span[0], a.span[1], a.item.lemma) for a in alerts}

    assert expected
    true_positives = len(found & expected)
    assert true_positives / len(found) == 1.0
    assert true_positives / len(expected) == 1.0


@pytest.mark.slow
def test_detect_one_megabyte_document(lex):
    line = "Install the pump near the tank and inspect the main valve before every flight.\n"
    text = line * (1_000_000 // len(line) + 1)
    doc = make_document(text, "big")

    started = time.perf_counter()
    alerts = detect(doc, lex)
    elapsed = time.perf_counter() - started

    assert len(alerts) == len(doc.sentences)
    assert elapsed < 2.0
