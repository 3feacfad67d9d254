import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .constants import CATEGORY_POS
from .lexicon import Lexicon
from .models import (
    Alert,
    Context,
    ContextWord,
    DeactivationSet,
    Document,
    FuzzyItem,
    Sentence,
    Unit,
)
from .search import longest_match_at
from .textmodel import group_compounds

logger = logging.getLogger(__name__)

# pos whose head is the verb it modifies; every other pos looks for a noun
_VERB_HEADED = frozenset({"adverb"})


def _distance(unit: Unit, span: Tuple[int, int]) -> Tuple[int, int, int]:
    """Sort key: token distance to the span, following words first, then position."""
    start, end = span
    if unit.start >= end:
        return unit.start - end + 1, 0, unit.start
    return start - unit.end + 1, 1, unit.start


def _overlaps(unit: Unit, span: Tuple[int, int]) -> bool:
    return unit.start < span[1] and span[0] < unit.end


def _select_head(units: List[Unit], span: Tuple[int, int], pos: str) -> Optional[Unit]:
    if pos in _VERB_HEADED:
        verbs = [u for u in units if u.is_verb]
        if verbs:
            return min(verbs, key=lambda u: _distance(u, span))
        nouns = [u for u in units if u.is_noun]
        return min(nouns, key=lambda u: _distance(u, span)) if nouns else None

    following = [u for u in units if u.is_noun and u.start >= span[1]]
    if following:
        return min(following, key=lambda u: u.start)
    preceding = [u for u in units if u.is_noun and u.end <= span[0]]
    if preceding:
        return max(preceding, key=lambda u: u.end)
    return None


def context_for_span(
    sentence: Sentence,
    span: Tuple[int, int],
    pos: str,
    lex: Lexicon,
    item_lemma: str = "",
    size: int = 4,
    units: Optional[List[Unit]] = None,
) -> Context:
    """
    Head plus up to `size` nearest eligible units around `span`. `pos` is the
    part of speech the span plays: adverbs attach to the nearest verb, the
    rest to the nearest following (else preceding) noun.
    """
    if units is None:
        units = group_compounds(sentence, lex)
    units = [u for u in units if not _overlaps(u, span)]
    head = _select_head(units, span, pos)
    head_lemma = head.lemma if head is not None else ""

    additional: List[ContextWord] = []
    seen = {head_lemma, item_lemma}
    for unit in sorted(units, key=lambda u: _distance(u, span)):
        if len(additional) >= size:
            break
        unit_pos = unit.context_pos
        if unit is head or unit_pos is None or unit.lemma in seen:
            continue
        seen.add(unit.lemma)
        additional.append(ContextWord(unit.lemma, unit_pos))

    if not head_lemma:
        logger.debug("No head word for '%s' in sentence %d", item_lemma, sentence.index)
    return Context(item_lemma=item_lemma, head=head_lemma, additional=tuple(additional))


def extract_context(
    sentence: Sentence,
    span: Tuple[int, int],
    item: FuzzyItem,
    lex: Lexicon,
    size: int = 4,
    units: Optional[List[Unit]] = None,
) -> Context:
    return context_for_span(
        sentence, span, CATEGORY_POS[item.category], lex, item.lemma, size, units
    )


def _words_match(a: Sequence[str], b: Sequence[str], lex: Optional[Lexicon]) -> int:
    same = lex.same_word if lex is not None else (lambda x, y: x == y)
    return sum(1 for x in a if any(same(x, y) for y in b))


def context_match(
    c1: Context,
    c2: Context,
    k: int = 2,
    lex: Optional[Lexicon] = None,
    match_item: bool = True,
) -> bool:
    """
    Same item, same head (or synonyms), and at least min(k, |a1|, |a2|)
    shared additional words. Symmetric: the overlap is counted both ways and
    the smaller count wins.
    """
    if match_item and c1.item_lemma != c2.item_lemma:
        return False
    if c1.head != c2.head:
        if lex is None or not c1.head or not lex.same_word(c1.head, c2.head):
            return False

    a1, a2 = c1.additional_lemmas, c2.additional_lemmas
    required = min(k, len(a1), len(a2))
    if required == 0:
        return True
    overlap = min(_words_match(a1, a2, lex), _words_match(a2, a1, lex))
    return overlap >= required


def is_suppressed(
    context: Context,
    deact: DeactivationSet,
    k: int = 2,
    lex: Optional[Lexicon] = None,
) -> bool:
    if context.item_lemma in deact.global_items:
        return True
    return any(
        d.item_lemma == context.item_lemma
        and d.context is not None
        and context_match(d.context, context, k, lex)
        for d in deact.contextual
    )


def _resolve_overlaps(
    hits: List[Tuple[int, int, FuzzyItem]],
) -> List[Tuple[int, int, FuzzyItem]]:
    """Longest match wins, then leftmost; returns the kept spans by position."""
    kept: List[Tuple[int, int, FuzzyItem]] = []
    for start, end, item in sorted(hits, key=lambda h: (h[0] - h[1], h[0])):
        if all(end <= s or e <= start for s, e, _ in kept):
            kept.append((start, end, item))
    return sorted(kept, key=lambda h: h[0])


def detect_sentence(
    sentence: Sentence,
    lex: Lexicon,
    deact: Optional[DeactivationSet] = None,
    k: int = 2,
    context_size: int = 4,
) -> List[Alert]:
    surfaces = sentence.surfaces
    hits: List[Tuple[int, int, FuzzyItem]] = []
    for idx in range(len(surfaces)):
        hit = longest_match_at(surfaces, idx, lex.max_item_words, lex.lookup_fuzzy)
        if hit is not None:
            hits.append((idx, idx + hit[0], hit[1]))
    if not hits:
        return []

    units = group_compounds(sentence, lex)
    alerts: List[Alert] = []
    for start, end, item in _resolve_overlaps(hits):
        span = (start, end)
        context = extract_context(sentence, span, item, lex, context_size, units)
        if deact is not None and is_suppressed(context, deact, k, lex):
            logger.debug("Suppressed '%s' (head '%s')", item.lemma, context.head)
            continue
        alerts.append(
            Alert(
                id=f"{sentence.doc_id}:{sentence.index}:{start}",
                doc_id=sentence.doc_id,
                sentence_index=sentence.index,
                span=span,
                item=item,
                severity=item.severity,
                context=context,
            )
        )
    return alerts


def detect(
    doc: Document,
    lex: Lexicon,
    deact: Optional[DeactivationSet] = None,
    k: int = 2,
    context_size: int = 4,
) -> List[Alert]:
    alerts: List[Alert] = []
    for sentence in doc.sentences:
        alerts.extend(detect_sentence(sentence, lex, deact, k, context_size))
    logger.info("Detected %d alerts in %s", len(alerts), doc.doc_id or "<text>")
    return alerts


def alert_record(alert: Alert) -> Dict[str, Any]:
    return {
        "id": alert.id,
        "doc_id": alert.doc_id,
        "sentence_index": alert.sentence_index,
        "span": list(alert.span),
        "item_lemma": alert.item.lemma,
        "category": alert.item.category,
        "severity": alert.severity,
        "head": alert.context.head,
        "additional": list(alert.context.additional_lemmas),
    }


def annotate(doc: Document, alerts: List[Alert]) -> str:
    """The original text with each alert wrapped in <fuzzy id=N sev=S>...</fuzzy>."""
    sentences = {s.index: s for s in doc.sentences}
    marks: List[Tuple[int, int, str]] = []
    for number, alert in enumerate(alerts, start=1):
        tokens = sentences[alert.sentence_index].tokens
        start = tokens[alert.span[0]].offset
        end = tokens[alert.span[1] - 1].end
        marks.append((start, end, f"<fuzzy id={number} sev={alert.severity}>"))

    out = []
    cursor = 0
    for start, end, opening in sorted(marks):
        out.append(doc.text[cursor:start])
        out.append(opening + doc.text[start:end] + "</fuzzy>")
        cursor = end
    out.append(doc.text[cursor:])
    return "".join(out)
