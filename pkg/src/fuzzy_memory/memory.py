import hashlib
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .align import (
    DELETE,
    INSERT,
    KEEP,
    SUBSTITUTE,
    align,
    edit_blocks,
    positions,
    revised_region,
)
from .config import Config
from .constants import QUANTITY_MARKERS, QUANTITY_SLOT_TYPES
from .detector import context_for_span, context_match, detect, detect_sentence
from .errors import MissingWriterError, SentenceMismatchError
from .lexicon import Lexicon
from .models import (
    Alert,
    Alignment,
    Context,
    ContextClass,
    CorrectRealization,
    CorrectionRecord,
    Deactivation,
    DeactivationSet,
    Document,
    Filler,
    TaggedFragment,
)
from .patterns import (
    Catalog,
    PatternMatcher,
    extract_fillers,
    rank_fillers,
    slot_text,
)
from .store import MemoryStore, StoreParser
from .textmodel import detokenize, quantity_runs, sentence_from_surfaces

logger = logging.getLogger(__name__)

UNCHANGED = "unchanged"
ERASED = "erased"
COMPLEMENTED = "complemented"
VALUE_REPLACEMENT = "value-replacement"
VALUE_COMPLEMENT = "value-complement"
TERM_REPLACEMENT = "term-replacement"
REWRITE = "rewrite"

# cases whose corrections feed the recommendation table
FILLER_CASES = frozenset({2, 4})


class CorrectionClassifier:
    """
    Assigns one of the five correction cases by comparing lemma bags of the
    original and corrected sentences, first matching rule wins:

      unchanged          corrected absent or lemma-identical        -> 1
      erased             only the item's lemmas removed, no content
                         added                                      -> 3
      complemented       item kept, no content removed              -> 2
      value-replacement  item removed, nothing else, added content
                         all quantity expressions                   -> 2
      value-complement   item removed, nothing else, a numeral or
                         unit added                                 -> 2
      term-replacement   item removed, content added, content
                         removed outside the item / original length
                         within `case4_edit_ratio`                  -> 4
      rewrite            anything else                              -> 5
    """

    def __init__(self, lex: Lexicon, case4_edit_ratio: float = 0.25):
        self.lex = lex
        self.case4_edit_ratio = case4_edit_ratio

    def _is_content(self, surface: str) -> bool:
        return bool(self.lex.categorize(surface))

    def _is_value(self, surface: str) -> bool:
        """A numeral, number word or unit; comparators alone do not count."""
        if self.lex.is_numeral(surface):
            return True
        return self.lex.is_quantity(surface) and self.lex.lemma(surface) not in QUANTITY_MARKERS

    @staticmethod
    def _pick(tokens: Sequence[str], lemmas: Sequence[str], bag: Counter) -> List[str]:
        """The tokens accounting for `bag`, taken left to right."""
        remaining = Counter(bag)
        picked = []
        for surface, lemma in zip(tokens, lemmas):
            if remaining[lemma] > 0:
                remaining[lemma] -= 1
                picked.append(surface)
        return picked

    def classify(
        self,
        original: Sequence[str],
        corrected: Optional[Sequence[str]],
        span: Tuple[int, int],
    ) -> Tuple[int, str]:
        if corrected is None:
            return 1, UNCHANGED
        o = [self.lex.lemma(t) for t in original]
        c = [self.lex.lemma(t) for t in corrected]
        if o == c:
            return 1, UNCHANGED

        start, end = span
        removed = Counter(o) - Counter(c)
        added = Counter(c) - Counter(o)
        item = Counter(o[start:end])
        item_content = {
            lemma for surface, lemma in zip(original[start:end], o[start:end])
            if self._is_content(surface)
        } or set(item)

        removed_tokens = self._pick(original, o, removed)
        added_tokens = self._pick(corrected, c, added)
        removed_content = [t for t in removed_tokens if self._is_content(t)]
        added_content = [t for t in added_tokens if self._is_content(t)]

        item_removed = any(removed[lemma] > 0 for lemma in item_content)
        within_item = all(removed[lemma] <= item[lemma] for lemma in removed)

        if item_removed and within_item and not added_content:
            return 3, ERASED
        if not item_removed and not removed_content:
            return 2, COMPLEMENTED
        if not item_removed:
            return 5, REWRITE

        outside = Counter(self.lex.lemma(t) for t in removed_content) - item
        if not outside:
            if added_content and all(self.lex.is_quantity(t) for t in added_content):
                return 2, VALUE_REPLACEMENT
            if any(self._is_value(t) for t in added_tokens):
                return 2, VALUE_COMPLEMENT
        if added_content:
            ratio = sum(outside.values()) / len(original)
            if ratio <= self.case4_edit_ratio:
                return 4, TERM_REPLACEMENT
        return 5, REWRITE


def _first_divergence(original: Document, corrected: Document) -> int:
    for idx, (a, b) in enumerate(zip(original.sentences, corrected.sentences)):
        if [t.lemma for t in a.tokens] != [t.lemma for t in b.tokens]:
            return idx
    return min(len(original.sentences), len(corrected.sentences))


def _block_span(alignment: Alignment, block: Tuple[int, int]) -> Tuple[int, int]:
    """Original-side [lo, hi) touched by an edit block; zero-width for inserts."""
    starts = positions(alignment)
    lo = starts[block[0]][0]
    last = alignment.ops[block[1] - 1]
    hi = starts[block[1] - 1][0] + (0 if last.kind == INSERT else 1)
    return lo, max(lo, hi)


def _attribute_edits(alignment: Alignment, spans: List[Tuple[int, int]]) -> List[List[int]]:
    """Op indices owned by each alert span: every edit block goes to the nearest span."""
    owned: List[List[int]] = [[] for _ in spans]
    for block in edit_blocks(alignment):
        lo, hi = _block_span(alignment, block)
        distances = [max(0, start - hi, lo - end) for start, end in spans]
        winner = distances.index(min(distances))
        owned[winner].extend(range(*block))
    return owned


def _partial(
    alignment: Alignment,
    original: Sequence[str],
    corrected: Sequence[str],
    mine: Set[int],
) -> List[str]:
    """The corrected sentence with only the edits in `mine` applied."""
    out: List[str] = []
    for idx, op in enumerate(alignment.ops):
        if op.kind == KEEP:
            out.append(original[op.i])
        elif idx in mine:
            if op.kind in (INSERT, SUBSTITUTE):
                out.append(corrected[op.j])
        elif op.kind in (DELETE, SUBSTITUTE):
            out.append(original[op.i])
    return out


def learn(
    original_doc: Document,
    corrected_doc: Document,
    writer_id: str,
    lex: Lexicon,
    store: MemoryStore,
    config: Optional[Config] = None,
    timestamp: str = "",
) -> List[CorrectionRecord]:
    """
    Appends one CorrectionRecord per alert of `original_doc` to the store and
    returns them. Sentences are paired one to one; edits in a sentence holding
    several alerts are attributed to the nearest alert.
    """
    config = config or Config()
    if not writer_id or not writer_id.strip():
        raise MissingWriterError("A writer id is required to record corrections")
    if len(original_doc.sentences) != len(corrected_doc.sentences):
        raise SentenceMismatchError(
            len(original_doc.sentences),
            len(corrected_doc.sentences),
            _first_divergence(original_doc, corrected_doc),
        )

    classifier = CorrectionClassifier(lex, config.case4_edit_ratio)
    alerts = detect(
        original_doc, lex, store.deactivations, config.context_match_k, config.context_size
    )
    by_sentence: Dict[int, List[Alert]] = {}
    for alert in alerts:
        by_sentence.setdefault(alert.sentence_index, []).append(alert)

    added: List[CorrectionRecord] = []
    for index, sentence_alerts in sorted(by_sentence.items()):
        original = original_doc.sentences[index].surfaces
        corrected = corrected_doc.sentences[index].surfaces
        alignment = align(
            [lex.lemma(t) for t in original], [lex.lemma(t) for t in corrected]
        )
        owned = _attribute_edits(alignment, [a.span for a in sentence_alerts])

        for alert, mine in zip(sentence_alerts, owned):
            fragment: Optional[TaggedFragment] = None
            if mine and alignment.cost:
                view = _partial(alignment, original, corrected, set(mine))
                case, rule = classifier.classify(original, view, alert.span)
                region = revised_region(alignment, mine)
                fragment = TaggedFragment.from_tokens(list(corrected), "revised", region)
            else:
                case, rule = classifier.classify(original, None, alert.span)

            seq = store.next_seq()
            record = CorrectionRecord(
                id=f"rec-{seq:06d}",
                seq=seq,
                item_lemma=alert.item.lemma,
                category=alert.item.category,
                severity=alert.severity,
                original=TaggedFragment.from_tokens(list(original), "fuzzy", alert.span),
                corrected=fragment if case != 1 else None,
                writer_id=writer_id,
                context=alert.context,
                case=case,
                rule=rule,
                timestamp=timestamp,
                doc_id=original_doc.doc_id,
                sentence_index=index,
            )
            store.records.append(record)
            added.append(record)

    logger.info(
        "Recorded %d observations from %s (writer %s)",
        len(added),
        original_doc.doc_id,
        writer_id,
    )
    return added


def mine_correct(
    docs: Iterable[Document],
    lex: Lexicon,
    store: MemoryStore,
    config: Optional[Config] = None,
) -> List[CorrectRealization]:
    """Indexes quantity expressions of alert-free sentences under their context."""
    config = config or Config()
    found: List[CorrectRealization] = []
    for doc in docs:
        for sentence in doc.sentences:
            if detect_sentence(
                sentence,
                lex,
                store.deactivations,
                config.context_match_k,
                config.context_size,
            ):
                continue
            surfaces = sentence.surfaces
            for span in quantity_runs(surfaces, lex):
                context = context_for_span(
                    sentence, span, "adverb", lex, size=config.context_size
                )
                if context.flagged:
                    continue
                seq = store.next_seq()
                realization = CorrectRealization(
                    id=f"real-{seq:06d}",
                    seq=seq,
                    text=detokenize(surfaces[span[0] : span[1]]),
                    context=context,
                    doc_id=doc.doc_id,
                    sentence_index=sentence.index,
                )
                store.realizations.append(realization)
                found.append(realization)
    logger.info("Indexed %d correct realizations", len(found))
    return found


def _digest(*parts: str) -> str:
    return hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()[:10]


def _context_key(context: Context) -> Tuple[str, ...]:
    return (context.item_lemma, context.head, *context.additional_lemmas)


def build_context_classes(
    records: Iterable[CorrectionRecord], k: int = 2, lex: Optional[Lexicon] = None
) -> List[ContextClass]:
    """
    Groups records by (item, head); a record joins the first class whose
    representative, the first context seen, matches its own.
    """
    classes: List[ContextClass] = []
    for record in sorted(records, key=lambda r: r.seq):
        target = next(
            (
                cls
                for cls in classes
                if cls.item_lemma == record.item_lemma
                and context_match(cls.representative, record.context, k, lex)
            ),
            None,
        )
        if target is None:
            target = ContextClass(
                id=f"cls-{_digest(*_context_key(record.context))}",
                item_lemma=record.item_lemma,
                head=record.context.head,
                representative=record.context,
            )
            classes.append(target)
        target.record_ids.append(record.id)
        if record.case == 1:
            target.uncorrected += 1
        else:
            target.corrected += 1
    return classes


def induce_deactivations(
    classes: List[ContextClass], config: Config, validated: frozenset
) -> DeactivationSet:
    entries: List[Deactivation] = []
    for cls in classes:
        if cls.uncorrected >= config.deactivation_threshold and cls.corrected == 0:
            entry_id = f"deact-{_digest(*_context_key(cls.representative))}"
            entries.append(
                Deactivation(
                    id=entry_id,
                    item_lemma=cls.item_lemma,
                    context=cls.representative,
                    support=cls.uncorrected,
                    validated=entry_id in validated,
                )
            )

    items: Dict[str, List[ContextClass]] = {}
    for cls in classes:
        items.setdefault(cls.item_lemma, []).append(cls)
    for item_lemma, item_classes in items.items():
        uncorrected = sum(c.uncorrected for c in item_classes)
        contexts = sum(1 for c in item_classes if c.uncorrected)
        corrected = sum(c.corrected for c in item_classes)
        if (
            uncorrected >= config.global_threshold
            and contexts >= config.global_min_contexts
            and corrected == 0
        ):
            entry_id = f"deact-{_digest(item_lemma, '*')}"
            entries.append(
                Deactivation(
                    id=entry_id,
                    item_lemma=item_lemma,
                    context=None,
                    support=uncorrected,
                    validated=entry_id in validated,
                )
            )
    return DeactivationSet(entries)


class _FillerTally:
    def __init__(self):
        self.frequency: Counter = Counter()
        self.recency: Dict[str, int] = {}
        self.provenance: Dict[str, List[str]] = {}

    def add(self, text: str, seq: int, source: str) -> None:
        if source in self.provenance.get(text, []):
            return
        self.frequency[text] += 1
        self.recency[text] = max(self.recency.get(text, 0), seq)
        self.provenance.setdefault(text, []).append(source)

    def ranked(self) -> List[Filler]:
        return rank_fillers(
            Filler(text, n, self.recency[text], tuple(self.provenance[text]))
            for text, n in self.frequency.items()
        )


def build_recommendations(
    store: MemoryStore,
    classes: List[ContextClass],
    catalog: Catalog,
    lex: Lexicon,
    k: int = 2,
) -> Dict[Tuple[str, str], Dict[str, List[Filler]]]:
    matcher = PatternMatcher(lex)
    class_of = {rid: cls for cls in classes for rid in cls.record_ids}
    applicable: Dict[str, Set[str]] = {}
    cells: Dict[Tuple[str, str], Dict[str, _FillerTally]] = {}

    for record in sorted(store.records, key=lambda r: r.seq):
        cls = class_of[record.id]
        span = record.original.region("fuzzy")
        if span is None:
            continue
        original = record.original.tokens()
        sentence = sentence_from_surfaces(original, record.doc_id, record.sentence_index)
        for pattern in catalog.applicable(record.item_lemma, record.category):
            binding = matcher.match_span(
                pattern, sentence, span, record.item_lemma, record.category
            )
            if binding is None:
                continue
            applicable.setdefault(cls.id, set()).add(pattern.id)
            if record.case not in FILLER_CASES or record.corrected is None:
                continue
            fillers = extract_fillers(
                pattern,
                binding,
                original,
                record.corrected.tokens(),
                record.corrected.region("revised"),
                lex,
            )
            for slot, text in fillers.items():
                cell = cells.setdefault((pattern.id, cls.id), {})
                cell.setdefault(slot, _FillerTally()).add(text, record.seq, record.id)

    for realization in sorted(store.realizations, key=lambda r: r.seq):
        for cls in classes:
            if not context_match(
                cls.representative, realization.context, k, lex, match_item=False
            ):
                continue
            for pattern_id in sorted(applicable.get(cls.id, ())):
                pattern = catalog.get(pattern_id)
                for slot in pattern.slots:
                    if slot.slot_type not in QUANTITY_SLOT_TYPES:
                        continue
                    cell = cells.setdefault((pattern_id, cls.id), {})
                    cell.setdefault(slot.name, _FillerTally()).add(
                        slot_text(pattern, slot, realization.text),
                        realization.seq,
                        realization.id,
                    )

    return {
        key: {slot: tally.ranked() for slot, tally in sorted(slots.items())}
        for key, slots in sorted(cells.items())
    }


@dataclass
class InductionResult:
    classes: int
    deactivations_added: List[str]
    deactivations_removed: List[str]
    recommendation_cells: int
    changes: int


def induce(
    store: MemoryStore, config: Config, lex: Lexicon, catalog: Catalog
) -> InductionResult:
    """
    Rebuilds every derived table from the records and realizations. A pure
    function of them, so a second run reports no changes.
    """
    parser = StoreParser()
    before = set(parser.render_derived(store).splitlines()[1:])
    previous = {d.id for d in store.deactivations.entries}

    classes = build_context_classes(store.records, config.context_match_k, lex)
    deactivations = induce_deactivations(classes, config, store.validated_ids)
    recommendations = build_recommendations(
        store, classes, catalog, lex, config.context_match_k
    )

    store.classes = classes
    store.deactivations = deactivations
    store.recommendations = recommendations
    store.config = config.fingerprint()

    after = set(parser.render_derived(store).splitlines()[1:])
    current = {d.id for d in deactivations.entries}
    added = sorted(current - previous)
    for entry in deactivations.entries:
        if entry.id in added and not entry.validated:
            logger.info(
                "New deactivation %s for '%s' awaits validation", entry.id, entry.item_lemma
            )

    return InductionResult(
        classes=len(classes),
        deactivations_added=added,
        deactivations_removed=sorted(previous - current),
        recommendation_cells=len(recommendations),
        changes=len(before ^ after),
    )
