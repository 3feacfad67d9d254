from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple, Union


@dataclass(frozen=True)
class FuzzyItem:
    """
    A lexicon entry: a word or fixed multiword expression whose reading varies
    with context, with its a-priori severity (3 being the worst).
    """

    lemma: str
    category: str
    severity: int
    variants: Tuple[str, ...] = ()
    features: Tuple[str, ...] = ()

    @property
    def words(self) -> Tuple[str, ...]:
        return tuple(self.lemma.split(" "))


@dataclass(frozen=True)
class WordEntry:
    lemma: str
    pos: str
    features: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    offset: int
    line: int

    @property
    def end(self) -> int:
        return self.offset + len(self.surface)


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]
    doc_id: str = ""
    index: int = 0

    @property
    def surfaces(self) -> List[str]:
        return [t.surface for t in self.tokens]

    @property
    def lemmas(self) -> List[str]:
        return [t.lemma for t in self.tokens]


@dataclass
class Document:
    doc_id: str
    text: str
    sentences: List[Sentence] = field(default_factory=list)

    @property
    def line_count(self) -> int:
        return len(self.text.splitlines())


@dataclass(frozen=True)
class Tag:
    kind: str
    closing: bool = False


FragmentElement = Union[str, Tag]


@dataclass(frozen=True)
class TaggedFragment:
    """
    A token sequence with balanced, non-nested <fuzzy>/<revised> regions.
    """

    elements: Tuple[FragmentElement, ...]

    def tokens(self) -> List[str]:
        return [e for e in self.elements if isinstance(e, str)]

    def regions(self, kind: str) -> List[Tuple[int, int]]:
        """Token index ranges [start, end) covered by each region of `kind`."""
        found = []
        position = 0
        start: Optional[int] = None
        for element in self.elements:
            if isinstance(element, str):
                position += 1
            elif element.kind == kind:
                if element.closing and start is not None:
                    found.append((start, position))
                    start = None
                else:
                    start = position
        return found

    def region(self, kind: str) -> Optional[Tuple[int, int]]:
        found = self.regions(kind)
        return found[0] if found else None

    @classmethod
    def from_tokens(
        cls,
        tokens: List[str],
        kind: Optional[str] = None,
        span: Optional[Tuple[int, int]] = None,
    ) -> "TaggedFragment":
        if kind is None or span is None:
            return cls(tuple(tokens))
        start, end = span
        return cls(
            tuple(tokens[:start])
            + (Tag(kind),)
            + tuple(tokens[start:end])
            + (Tag(kind, closing=True),)
            + tuple(tokens[end:])
        )


@dataclass(frozen=True)
class Unit:
    """A context unit: a content token or a maximal noun compound."""

    lemma: str
    start: int
    end: int
    entries: FrozenSet[WordEntry]

    def has_pos(self, pos: str) -> bool:
        return any(e.pos == pos for e in self.entries)

    def features(self, pos: str) -> FrozenSet[str]:
        merged: set = set()
        for entry in self.entries:
            if entry.pos == pos:
                merged |= entry.features
        return frozenset(merged)

    @property
    def is_noun(self) -> bool:
        return self.has_pos("noun")

    @property
    def is_verb(self) -> bool:
        return self.has_pos("verb")

    @property
    def context_pos(self) -> Optional[str]:
        """Part of speech under which the unit may enter a context, if any."""
        if self.is_noun:
            return "noun"
        if self.has_pos("adjective"):
            return "adjective"
        if "action" in self.features("verb"):
            return "verb"
        return None


@dataclass(frozen=True)
class ContextWord:
    lemma: str
    pos: str


@dataclass(frozen=True)
class Context:
    item_lemma: str
    head: str
    additional: Tuple[ContextWord, ...] = ()

    @property
    def flagged(self) -> bool:
        return not self.head

    @property
    def additional_lemmas(self) -> Tuple[str, ...]:
        return tuple(w.lemma for w in self.additional)


@dataclass(frozen=True)
class Alert:
    id: str
    doc_id: str
    sentence_index: int
    span: Tuple[int, int]
    item: FuzzyItem
    severity: int
    context: Context


@dataclass(frozen=True)
class Deactivation:
    id: str
    item_lemma: str
    context: Optional[Context]
    support: int
    validated: bool = False

    @property
    def is_global(self) -> bool:
        return self.context is None


@dataclass
class DeactivationSet:
    entries: List[Deactivation] = field(default_factory=list)

    def active(self) -> List[Deactivation]:
        return [d for d in self.entries if d.validated]

    @property
    def global_items(self) -> FrozenSet[str]:
        return frozenset(d.item_lemma for d in self.active() if d.is_global)

    @property
    def contextual(self) -> List[Deactivation]:
        return [d for d in self.active() if not d.is_global]

    def get(self, deactivation_id: str) -> Optional[Deactivation]:
        for entry in self.entries:
            if entry.id == deactivation_id:
                return entry
        return None


@dataclass(frozen=True)
class AlignOp:
    kind: str
    i: Optional[int] = None
    j: Optional[int] = None


@dataclass(frozen=True)
class Alignment:
    ops: Tuple[AlignOp, ...]
    cost: int


@dataclass(frozen=True)
class CorrectionRecord:
    id: str
    seq: int
    item_lemma: str
    category: str
    severity: int
    original: TaggedFragment
    corrected: Optional[TaggedFragment]
    writer_id: str
    context: Context
    case: int
    rule: str
    timestamp: str
    doc_id: str = ""
    sentence_index: int = 0

    @property
    def is_corrected(self) -> bool:
        return self.case != 1


@dataclass(frozen=True)
class CorrectRealization:
    id: str
    seq: int
    text: str
    context: Context
    doc_id: str = ""
    sentence_index: int = 0


@dataclass
class ContextClass:
    id: str
    item_lemma: str
    head: str
    representative: Context
    record_ids: List[str] = field(default_factory=list)
    uncorrected: int = 0
    corrected: int = 0


@dataclass(frozen=True)
class PatternElement:
    kind: str
    name: Optional[str] = None
    value: Optional[str] = None
    pos: Optional[str] = None
    features: FrozenSet[str] = frozenset()
    min_tokens: int = 0
    max_tokens: int = 0


@dataclass(frozen=True)
class SlotSpec:
    name: str
    slot_type: str
    unit: Optional[str] = None


@dataclass(frozen=True)
class RhsElement:
    kind: str
    value: str = ""
    slot: Optional[SlotSpec] = None


@dataclass(frozen=True)
class CorrectionPattern:
    id: str
    lhs: Tuple[PatternElement, ...]
    rhs: Tuple[RhsElement, ...]
    notes: str = ""

    @property
    def family(self) -> str:
        parts = self.id.split("-")
        return "-".join(parts[:2])

    @property
    def item_slot(self) -> Optional[PatternElement]:
        for element in self.lhs:
            if element.kind == "item":
                return element
        return None

    @property
    def is_sentence_level(self) -> bool:
        return self.item_slot is None

    @property
    def applies_to(self) -> Optional[str]:
        slot = self.item_slot
        return slot.value if slot else None

    @property
    def slots(self) -> List[SlotSpec]:
        return [e.slot for e in self.rhs if e.slot is not None]

    @property
    def specificity(self) -> int:
        literals = sum(1 for e in self.lhs if e.kind == "literal")
        if self.item_slot is not None and self.item_slot.value:
            literals += 1
        return literals


@dataclass(frozen=True)
class Binding:
    pattern_id: str
    start: int
    end: int
    item_span: Tuple[int, int]
    spans: Tuple[Tuple[str, Tuple[int, int]], ...] = ()

    def span(self, name: str) -> Optional[Tuple[int, int]]:
        for key, value in self.spans:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class Filler:
    text: str
    frequency: int
    recency: int = 0
    provenance: Tuple[str, ...] = ()


@dataclass
class Suggestion:
    alert_id: str
    pattern_id: Optional[str]
    rendered: str
    fragment: Optional[TaggedFragment] = None
    fillers: Dict[str, List[Filler]] = field(default_factory=dict)
    past_corrections: List[Filler] = field(default_factory=list)


@dataclass(frozen=True)
class Validation:
    """An operator's confirmation of an induced deactivation."""

    deactivation_id: str
    seq: int
    timestamp: str
