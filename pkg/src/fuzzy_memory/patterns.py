import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import aiofiles

from .config import DATA_DIR
from .constants import (
    BUILTIN_PATTERNS,
    DEFAULT_GAP,
    FUZZY_CATEGORIES,
    PURPOSE_CONJUNCTIONS,
    QUANTITY_SLOT_TYPES,
    SENTENCE_TERMINATORS,
    SLOT_TYPES,
    WORD_FEATURES,
)
from .detector import context_match, detect
from .errors import PatternSyntaxError, UnboundVariableError
from .lexicon import Lexicon
from .models import (
    Alert,
    Binding,
    CorrectionPattern,
    Filler,
    PatternElement,
    RhsElement,
    Sentence,
    SlotSpec,
    Suggestion,
    TaggedFragment,
    Unit,
)
from .store import MemoryStore
from .textmodel import (
    detokenize,
    group_compounds,
    lemmatize,
    make_document,
    plain_text,
    quantity_runs,
    tokenize,
)

logger = logging.getLogger(__name__)

SAMPLE_CORPUS = DATA_DIR / "sample_corpus.txt"
PLACEHOLDER = "\u27e8{}\u27e9"

_VAR_POS = ("noun", "verb", "adjective", "number")


class PatternParser:
    """
    Reads the pattern file syntax, one pattern per line:

        P-near: [{near} L:noun(location)] -> [less than <distance> from $L]

    Comment lines directly above a pattern become its notes.
    """

    COMMENT = "#"
    LINE_RE = re.compile(r"^\s*([A-Za-z][\w-]*)\s*:\s*\[(.*)\]\s*->\s*\[(.*)\]\s*$")
    ID_RE = re.compile(r"^\s*([^\s:]+)")
    NAME_RE = re.compile(r"[A-Za-z][\w-]*")
    ELEMENT_RE = re.compile(r"\{[^}]*\}|<[^>]*>|\S+")
    VAR_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*):([a-z]+)(?:\(([^)]*)\))?$")
    SLOT_RE = re.compile(r"^<(?:([A-Za-z][A-Za-z0-9_]*):)?([a-z_]+)>$")

    def parse(self, text: str) -> List[CorrectionPattern]:
        patterns: List[CorrectionPattern] = []
        notes: List[str] = []
        for line_number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                notes = []
                continue
            if line.startswith(self.COMMENT):
                notes.append(line.lstrip(self.COMMENT).strip())
                continue

            match = self.LINE_RE.match(raw)
            if not match:
                guess = self.ID_RE.match(raw)
                column, expected = self._locate_failure(raw)
                raise PatternSyntaxError(
                    guess.group(1) if guess else "<unknown>",
                    column,
                    f"line {line_number}: expected 'ID: [LHS] -> [RHS]', "
                    f"missing {expected} in '{line}'",
                )
            pattern_id = match.group(1)
            lhs = self._parse_lhs(pattern_id, match.group(2), match.start(2) + 1)
            rhs = self._parse_rhs(pattern_id, lhs, match.group(3), match.start(3) + 1)
            patterns.append(CorrectionPattern(pattern_id, lhs, rhs, " ".join(notes)))
            notes = []
        return patterns

    def _locate_failure(self, raw: str) -> Tuple[int, str]:
        """1-based column where `raw` leaves the line shape, and what was due."""
        pos = len(raw) - len(raw.lstrip())
        ident = self.NAME_RE.match(raw, pos)
        if ident is None:
            return pos + 1, "a pattern id"
        pos = self._skip_spaces(raw, ident.end())
        for token, what in ((":", "':' after the id"), ("[", "'[' opening the left-hand side")):
            if not raw.startswith(token, pos):
                return pos + 1, what
            pos = self._skip_spaces(raw, pos + 1)

        arrow = raw.find("->", pos)
        if arrow < 0:
            return len(raw.rstrip()) + 1, "'->'"
        close = raw.rfind("]", pos, arrow)
        if close < 0:
            return arrow + 1, "']' closing the left-hand side"
        gap = self._skip_spaces(raw, close + 1)
        if gap != arrow:
            return gap + 1, "'->'"

        pos = self._skip_spaces(raw, arrow + 2)
        if not raw.startswith("[", pos):
            return pos + 1, "'[' opening the right-hand side"
        return len(raw.rstrip()) + 1, "']' closing the right-hand side"

    @staticmethod
    def _skip_spaces(raw: str, pos: int) -> int:
        while pos < len(raw) and raw[pos].isspace():
            pos += 1
        return pos

    def _elements(self, text: str, offset: int) -> Iterator[Tuple[int, str]]:
        for m in self.ELEMENT_RE.finditer(text):
            yield offset + m.start(), m.group()

    def _parse_lhs(
        self, pattern_id: str, text: str, offset: int
    ) -> Tuple[PatternElement, ...]:
        elements: List[PatternElement] = []
        names = set()
        for position, token in self._elements(text, offset):
            if token.startswith("{"):
                if not token.endswith("}"):
                    raise PatternSyntaxError(pattern_id, position, f"unclosed item slot '{token}'")
                inner = " ".join(token[1:-1].lower().split())
                if any(e.kind == "item" for e in elements):
                    raise PatternSyntaxError(pattern_id, position, "more than one item slot")
                if inner in FUZZY_CATEGORIES:
                    elements.append(PatternElement("item", pos=inner))
                else:
                    elements.append(PatternElement("item", value=inner or None))
                continue
            if token == "|":
                elements.append(PatternElement("boundary"))
                continue
            if token.startswith(("<", "$")):
                raise PatternSyntaxError(
                    pattern_id, position, f"'{token}' is only allowed on the right-hand side"
                )

            var = self.VAR_RE.match(token)
            if var is None:
                elements.append(PatternElement("literal", value=token.lower()))
                continue

            name, pos, args = var.group(1), var.group(2), var.group(3)
            if name in names:
                raise PatternSyntaxError(pattern_id, position, f"variable {name} bound twice")
            names.add(name)
            if pos == "gap":
                elements.append(self._parse_gap(pattern_id, position, name, args))
            elif pos == "conj":
                if (args or "").strip() != "purpose":
                    raise PatternSyntaxError(
                        pattern_id, position, "conj takes exactly one class: conj(purpose)"
                    )
                elements.append(PatternElement("conj", name=name, value="purpose"))
            elif pos in _VAR_POS:
                features = frozenset(a.strip() for a in (args or "").split(",") if a.strip())
                unknown = features - set(WORD_FEATURES)
                if unknown:
                    raise PatternSyntaxError(
                        pattern_id, position, f"unknown features {', '.join(sorted(unknown))}"
                    )
                elements.append(
                    PatternElement("var", name=name, pos=pos, features=features)
                )
            else:
                raise PatternSyntaxError(pattern_id, position, f"unknown category '{pos}'")

        if not elements:
            raise PatternSyntaxError(pattern_id, offset, "empty left-hand side")
        return tuple(elements)

    @staticmethod
    def _parse_gap(
        pattern_id: str, position: int, name: str, args: Optional[str]
    ) -> PatternElement:
        if args is None:
            low, high = DEFAULT_GAP
        else:
            try:
                low, high = (int(a) for a in args.split(","))
            except ValueError as e:
                raise PatternSyntaxError(
                    pattern_id, position, f"gap bounds must be 'min,max', got '{args}'"
                ) from e
        if low < 0 or high < low:
            raise PatternSyntaxError(pattern_id, position, f"invalid gap bounds {low},{high}")
        return PatternElement("gap", name=name, min_tokens=low, max_tokens=high)

    def _parse_rhs(
        self,
        pattern_id: str,
        lhs: Tuple[PatternElement, ...],
        text: str,
        offset: int,
    ) -> Tuple[RhsElement, ...]:
        bound = {e.name for e in lhs if e.name}
        has_item = any(e.kind == "item" for e in lhs)
        slot_names = set()
        elements: List[RhsElement] = []
        for position, token in self._elements(text, offset):
            if token.startswith("$"):
                name = token[1:]
                if name not in bound:
                    raise PatternSyntaxError(
                        pattern_id, position, f"${name} is not bound on the left-hand side"
                    )
                elements.append(RhsElement("copy", name))
            elif token == "{}":
                if not has_item:
                    raise PatternSyntaxError(
                        pattern_id, position, "{} copies the item but there is no item slot"
                    )
                elements.append(RhsElement("item"))
            elif token.startswith("<"):
                slot = self.SLOT_RE.match(token)
                if slot is None or slot.group(2) not in SLOT_TYPES:
                    raise PatternSyntaxError(pattern_id, position, f"unknown slot '{token}'")
                name = slot.group(1) or slot.group(2)
                if name in slot_names:
                    raise PatternSyntaxError(
                        pattern_id, position, f"slot name '{name}' used twice"
                    )
                slot_names.add(name)
                elements.append(RhsElement("slot", slot=SlotSpec(name, slot.group(2))))
            else:
                elements.append(RhsElement("literal", token))
        return tuple(elements)


def accepts(pattern: CorrectionPattern, item_lemma: str, category: str) -> bool:
    slot = pattern.item_slot
    if slot is None:
        return True
    if slot.value is not None:
        return slot.value == item_lemma
    if slot.pos is not None:
        return slot.pos == category
    return True


@dataclass(frozen=True)
class Catalog:
    patterns: Tuple[CorrectionPattern, ...] = ()
    warnings: Tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.patterns)

    def get(self, pattern_id: str) -> CorrectionPattern:
        for pattern in self.patterns:
            if pattern.id == pattern_id:
                return pattern
        raise KeyError(pattern_id)

    def applicable(self, item_lemma: str, category: str) -> List[CorrectionPattern]:
        """Patterns that may apply to an item, most specific first."""
        found = [p for p in self.patterns if accepts(p, item_lemma, category)]
        return sorted(found, key=lambda p: -p.specificity)


class PatternMatcher:
    """Matches pattern left-hand sides anchored on an alert span."""

    def __init__(self, lex: Lexicon):
        self.lex = lex

    def match(
        self, pattern: CorrectionPattern, alert: Alert, sentence: Sentence
    ) -> Optional[Binding]:
        return self.match_span(
            pattern, sentence, alert.span, alert.item.lemma, alert.item.category
        )

    def match_span(
        self,
        pattern: CorrectionPattern,
        sentence: Sentence,
        span: Tuple[int, int],
        item_lemma: str,
        category: str,
    ) -> Optional[Binding]:
        if not accepts(pattern, item_lemma, category):
            return None

        state = _MatchState(self.lex, sentence, span)
        if pattern.is_sentence_level:
            starts: Iterable[int] = range(0, span[0] + 1)
        else:
            starts = range(span[0], -1, -1)

        for start in starts:
            for end, spans in state.run(pattern.lhs, 0, start, ()):
                if pattern.is_sentence_level and end < span[1]:
                    continue
                return Binding(pattern.id, start, end, span, spans)
        return None


class _MatchState:
    def __init__(self, lex: Lexicon, sentence: Sentence, span: Tuple[int, int]):
        self.lex = lex
        self.span = span
        self.surfaces = sentence.surfaces
        self.lemmas = [lex.lemma(s) for s in self.surfaces]
        self.units: Dict[int, Unit] = {u.start: u for u in group_compounds(sentence, lex)}

    def _is_punct(self, idx: int) -> bool:
        return not any(ch.isalnum() for ch in self.surfaces[idx])

    def _ends_on_noun(self, end: int) -> bool:
        return any(e.pos == "noun" for e in self.lex.categorize(self.surfaces[end - 1]))

    def _gap_lengths(self, element: PatternElement, pos: int) -> List[int]:
        longest = 0
        while (
            longest < element.max_tokens
            and pos + longest < len(self.surfaces)
            and not self._is_punct(pos + longest)
        ):
            longest += 1
        lengths = list(range(longest, element.min_tokens - 1, -1))
        # longest run ending on a noun first, then the rest longest first
        return [n for n in lengths if n and self._ends_on_noun(pos + n)] + [
            n for n in lengths if not (n and self._ends_on_noun(pos + n))
        ]

    def _var_end(self, element: PatternElement, pos: int) -> Optional[int]:
        n = len(self.surfaces)
        if element.pos == "number":
            return pos + 1 if pos < n and self.lex.is_numeral(self.surfaces[pos]) else None
        if element.pos == "noun":
            while pos < n and self.lex.is_stopword(self.surfaces[pos]):
                pos += 1
        unit = self.units.get(pos)
        if unit is None or not unit.has_pos(element.pos):
            return None
        if not element.features <= unit.features(element.pos):
            return None
        return unit.end

    def run(
        self,
        elements: Sequence[PatternElement],
        idx: int,
        pos: int,
        spans: Tuple[Tuple[str, Tuple[int, int]], ...],
    ) -> Iterator[Tuple[int, Tuple[Tuple[str, Tuple[int, int]], ...]]]:
        if idx == len(elements):
            yield pos, spans
            return

        element = elements[idx]
        n = len(self.surfaces)
        if element.kind == "item":
            if pos == self.span[0]:
                yield from self.run(elements, idx + 1, self.span[1], spans)
        elif element.kind == "literal":
            if pos < n and self.lemmas[pos] == lemmatize(element.value or ""):
                yield from self.run(elements, idx + 1, pos + 1, spans)
        elif element.kind == "boundary":
            if pos == n or (pos == n - 1 and self.surfaces[pos] in SENTENCE_TERMINATORS):
                yield from self.run(elements, idx + 1, pos, spans)
        elif element.kind == "conj":
            for words in PURPOSE_CONJUNCTIONS:
                if tuple(self.lemmas[pos : pos + len(words)]) == words:
                    end = pos + len(words)
                    yield from self.run(
                        elements, idx + 1, end, spans + ((element.name, (pos, end)),)
                    )
        elif element.kind == "gap":
            for length in self._gap_lengths(element, pos):
                end = pos + length
                yield from self.run(
                    elements, idx + 1, end, spans + ((element.name, (pos, end)),)
                )
        elif element.kind == "var":
            end = self._var_end(element, pos)
            if end is not None:
                yield from self.run(
                    elements, idx + 1, end, spans + ((element.name, (pos, end)),)
                )


def _words(text: str) -> List[str]:
    return [t.surface for s in tokenize(text) for t in s.tokens]


def _rhs_parts(
    pattern: CorrectionPattern, binding: Binding, surfaces: Sequence[str]
) -> List[Tuple[str, Any]]:
    """RHS as ('tokens', [...]) and ('slot', SlotSpec) parts."""
    parts: List[Tuple[str, Any]] = []
    for element in pattern.rhs:
        if element.kind == "literal":
            parts.append(("tokens", [element.value]))
        elif element.kind == "item":
            start, end = binding.item_span
            parts.append(("tokens", list(surfaces[start:end])))
        elif element.kind == "copy":
            bound = binding.span(element.value)
            if bound is None:
                raise UnboundVariableError(
                    f"Pattern {pattern.id} copies ${element.value} but the binding has no such variable"
                )
            parts.append(("tokens", list(surfaces[bound[0] : bound[1]])))
        else:
            parts.append(("slot", element.slot))
    return parts


def _same(a: str, b: str) -> bool:
    return lemmatize(a) == lemmatize(b)


def apply(
    pattern: CorrectionPattern,
    binding: Binding,
    surfaces: Sequence[str],
    fillers: Optional[Dict[str, str]] = None,
) -> TaggedFragment:
    """
    Rewrites the matched span of `surfaces` with the pattern's right-hand side.
    Unfilled slots render as a typed placeholder. The revised tags cover what
    actually changed inside the match; tokens outside it are untouched.
    """
    fillers = fillers or {}
    replacement: List[str] = []
    for kind, value in _rhs_parts(pattern, binding, surfaces):
        if kind == "tokens":
            replacement.extend(value)
        elif fillers.get(value.name):
            before, after = _adjacent_literals(pattern, value)
            replacement.extend(_strip_literals(_words(fillers[value.name]), before, after))
        else:
            replacement.append(PLACEHOLDER.format(value.slot_type))

    matched = list(surfaces[binding.start : binding.end])
    shortest = min(len(matched), len(replacement))
    head = 0
    while head < shortest and _same(matched[head], replacement[head]):
        head += 1
    tail = 0
    while tail < shortest - head and _same(matched[-1 - tail], replacement[-1 - tail]):
        tail += 1

    tokens = list(surfaces[: binding.start]) + replacement + list(surfaces[binding.end :])
    region = (binding.start + head, binding.start + len(replacement) - tail)
    return TaggedFragment.from_tokens(tokens, "revised", region)


def follow_template(
    pattern: CorrectionPattern,
    binding: Binding,
    original: Sequence[str],
    corrected: Sequence[str],
    lex: Lexicon,
) -> Optional[Dict[str, str]]:
    """
    Slot texts if `corrected` is exactly the pattern's rewrite of `original`
    with some non-empty filler in every slot, else None.
    """
    template: List[Tuple[str, str]] = [("tok", lex.lemma(t)) for t in original[: binding.start]]
    for kind, value in _rhs_parts(pattern, binding, original):
        if kind == "tokens":
            template += [("tok", lex.lemma(t)) for t in value]
        else:
            template.append(("slot", value.name))
    template += [("tok", lex.lemma(t)) for t in original[binding.end :]]
    target = [lex.lemma(t) for t in corrected]

    def walk(ti: int, ci: int) -> Optional[Dict[str, Tuple[int, int]]]:
        if ti == len(template):
            return {} if ci == len(target) else None
        kind, value = template[ti]
        if kind == "tok":
            if ci < len(target) and target[ci] == value:
                return walk(ti + 1, ci + 1)
            return None
        for end in range(ci + 1, len(target) + 1):
            rest = walk(ti + 1, end)
            if rest is not None:
                rest[value] = (ci, end)
                return rest
        return None

    found = walk(0, 0)
    if found is None:
        return None
    return {name: detokenize(list(corrected[s:e])) for name, (s, e) in found.items()}


def _adjacent_literals(pattern: CorrectionPattern, slot: SlotSpec) -> Tuple[List[str], List[str]]:
    rhs = list(pattern.rhs)
    idx = next(i for i, e in enumerate(rhs) if e.slot is slot)
    before: List[str] = []
    for element in reversed(rhs[:idx]):
        if element.kind != "literal":
            break
        before.insert(0, element.value)
    after: List[str] = []
    for element in rhs[idx + 1 :]:
        if element.kind != "literal":
            break
        after.append(element.value)
    return before, after


def _strip_literals(tokens: List[str], before: List[str], after: List[str]) -> List[str]:
    if before and len(tokens) > len(before):
        if all(_same(a, b) for a, b in zip(tokens, before)):
            tokens = tokens[len(before) :]
    if after and len(tokens) > len(after):
        if all(_same(a, b) for a, b in zip(tokens[-len(after) :], after)):
            tokens = tokens[: -len(after)]
    return tokens


def slot_text(pattern: CorrectionPattern, slot: SlotSpec, text: str) -> str:
    """`text` without the literals the pattern already writes around `slot`."""
    before, after = _adjacent_literals(pattern, slot)
    return detokenize(_strip_literals(_words(text), before, after))


def extract_fillers(
    pattern: CorrectionPattern,
    binding: Binding,
    original: Sequence[str],
    corrected: Sequence[str],
    region: Optional[Tuple[int, int]],
    lex: Lexicon,
) -> Dict[str, str]:
    """
    Slot fillers a past correction supplies for `pattern`: the exact template
    reading when the writer followed the rewrite, otherwise a best effort over
    the revised region (first quantity run for value-like slots, new words for
    warnings and paraphrases).
    """
    if not pattern.slots:
        return {}
    exact = follow_template(pattern, binding, original, corrected, lex)
    if exact is not None:
        return {name: text for name, text in exact.items() if text}
    if region is None or region[0] == region[1]:
        return {}

    revised = list(corrected[region[0] : region[1]])
    runs = quantity_runs(revised, lex)
    seen = Counter(lex.lemma(t) for t in original)
    novel = []
    for token in revised:
        lemma = lex.lemma(token)
        if seen[lemma] > 0:
            seen[lemma] -= 1
        else:
            novel.append(token)

    fillers: Dict[str, str] = {}
    for slot in pattern.slots:
        if slot.slot_type in QUANTITY_SLOT_TYPES:
            if not runs:
                continue
            start, end = runs.pop(0)
            before, after = _adjacent_literals(pattern, slot)
            tokens = _strip_literals(revised[start:end], before, after)
        else:
            tokens = novel
        if tokens:
            fillers[slot.name] = detokenize(tokens)
    return fillers


def rank_fillers(fillers: Iterable[Filler]) -> List[Filler]:
    """Decreasing frequency, then most recent first, then alphabetical."""
    return sorted(fillers, key=lambda f: (-f.frequency, -f.recency, f.text))


def _merge(pool: Dict[str, Filler], filler: Filler) -> None:
    known = pool.get(filler.text)
    if known is None:
        pool[filler.text] = Filler(
            filler.text, len(set(filler.provenance)), filler.recency, tuple(filler.provenance)
        )
        return
    provenance = tuple(dict.fromkeys(known.provenance + filler.provenance))
    pool[filler.text] = Filler(
        filler.text, len(provenance), max(known.recency, filler.recency), provenance
    )


def past_corrections(
    alert: Alert, store: MemoryStore, lex: Lexicon, k: int = 2
) -> List[Filler]:
    """Revised regions of earlier corrections of the item in matching contexts."""
    pool: Dict[str, Filler] = {}
    for record in store.records:
        if record.item_lemma != alert.item.lemma or record.case not in (2, 3, 4):
            continue
        if record.corrected is None or not context_match(record.context, alert.context, k, lex):
            continue
        region = record.corrected.region("revised")
        tokens = record.corrected.tokens()
        text = detokenize(tokens[region[0] : region[1]]) if region else ""
        _merge(pool, Filler(text, 1, record.seq, (record.id,)))
    return rank_fillers(pool.values())


def suggest(
    alert: Alert,
    sentence: Sentence,
    store: MemoryStore,
    catalog: Catalog,
    lex: Lexicon,
    k: int = 2,
) -> List[Suggestion]:
    matcher = PatternMatcher(lex)
    classes = [
        cls
        for cls in store.classes
        if cls.item_lemma == alert.item.lemma
        and context_match(cls.representative, alert.context, k, lex)
    ]
    realizations = [
        r
        for r in store.realizations
        if context_match(r.context, alert.context, k, lex, match_item=False)
    ]
    past = past_corrections(alert, store, lex, k)

    suggestions: List[Suggestion] = []
    for pattern in catalog.applicable(alert.item.lemma, alert.item.category):
        binding = matcher.match(pattern, alert, sentence)
        if binding is None:
            continue

        pools: Dict[str, Dict[str, Filler]] = {slot.name: {} for slot in pattern.slots}
        for cls in classes:
            for slot, fillers in store.recommendations.get((pattern.id, cls.id), {}).items():
                for filler in fillers:
                    _merge(pools.setdefault(slot, {}), filler)
        for slot in pattern.slots:
            if slot.slot_type not in QUANTITY_SLOT_TYPES:
                continue
            for realization in realizations:
                _merge(
                    pools[slot.name],
                    Filler(
                        slot_text(pattern, slot, realization.text),
                        1,
                        realization.seq,
                        (realization.id,),
                    ),
                )

        ranked = {slot: rank_fillers(pool.values()) for slot, pool in pools.items()}
        chosen = {slot: fillers[0].text for slot, fillers in ranked.items() if fillers}
        fragment = apply(pattern, binding, sentence.surfaces, chosen)
        suggestions.append(
            Suggestion(alert.id, pattern.id, plain_text(fragment), fragment, ranked, past)
        )

    if not suggestions:
        suggestions.append(
            Suggestion(alert.id, None, detokenize(sentence.surfaces), None, {}, past)
        )
    return suggestions


def suggestion_record(suggestion: Suggestion) -> Dict[str, Any]:
    return {
        "alert": suggestion.alert_id,
        "pattern": suggestion.pattern_id,
        "rendered": suggestion.rendered,
        "fillers": {
            slot: [[f.text, f.frequency] for f in fillers]
            for slot, fillers in suggestion.fillers.items()
        },
        "past_corrections": [[f.text, f.frequency] for f in suggestion.past_corrections],
    }


def check_overlaps(catalog: Catalog, lex: Lexicon, corpus: str) -> List[str]:
    """
    Alerts of `corpus` matched by patterns of more than one family. Variants
    of one family and sentence-level patterns are alternatives, not overlaps.
    """
    matcher = PatternMatcher(lex)
    doc = make_document(corpus, "sample")
    warnings: List[str] = []
    reported = set()
    for alert in detect(doc, lex):
        sentence = doc.sentences[alert.sentence_index]
        families = sorted(
            {
                p.family
                for p in catalog.applicable(alert.item.lemma, alert.item.category)
                if not p.is_sentence_level and matcher.match(p, alert, sentence)
            }
        )
        if len(families) > 1 and tuple(families) not in reported:
            reported.add(tuple(families))
            warnings.append(
                f"Patterns {', '.join(families)} overlap on '{alert.item.lemma}' in "
                f"'{detokenize(sentence.surfaces)}'"
            )
    return warnings


def builtin_catalog() -> Catalog:
    return Catalog(tuple(PatternParser().parse(BUILTIN_PATTERNS)))


async def load_patterns(
    path: Optional[Path] = None,
    lex: Optional[Lexicon] = None,
    corpus_path: Optional[Path] = SAMPLE_CORPUS,
) -> Catalog:
    """
    Built-in patterns plus those of `path`; a user pattern with a built-in id
    replaces it. With a lexicon, the merged catalog is checked for overlaps
    over the sample corpus and any found are logged and kept as warnings.
    """
    parser = PatternParser()
    merged: Dict[str, CorrectionPattern] = {p.id: p for p in parser.parse(BUILTIN_PATTERNS)}
    warnings: List[str] = []

    if path is not None:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            user = parser.parse(await f.read())
        for pattern in user:
            if pattern.id in merged:
                message = f"Pattern {pattern.id} from {path} overrides the built-in one"
                logger.warning(message)
                warnings.append(message)
            merged[pattern.id] = pattern

    catalog = Catalog(tuple(merged.values()))
    if lex is not None and corpus_path is not None and Path(corpus_path).exists():
        async with aiofiles.open(corpus_path, "r", encoding="utf-8") as f:
            corpus = await f.read()
        for message in check_overlaps(catalog, lex, corpus):
            logger.warning(message)
            warnings.append(message)

    logger.info("Loaded %d correction patterns", len(catalog))
    return Catalog(catalog.patterns, tuple(warnings))
