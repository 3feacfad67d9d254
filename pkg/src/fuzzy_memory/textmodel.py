import re
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, List, Optional, Tuple

import aiofiles

from .constants import ABBREVIATIONS, QUANTITY_MARKERS, SENTENCE_TERMINATORS, TAG_KINDS
from .errors import DocumentEncodingError, UnbalancedTagError, UnknownTagError
from .models import (
    Document,
    FragmentElement,
    Sentence,
    Tag,
    TaggedFragment,
    Token,
    Unit,
    WordEntry,
)
from .search import normalise, runs

if TYPE_CHECKING:
    from .lexicon import Lexicon

_HYPHENS = "\\-\u2010\u2011"
_TOKEN_RE = re.compile(rf"\w+(?:[{_HYPHENS}.'\u2019]\w+)*%?|[^\w\s]")
_WORD_RE = re.compile(r"^[a-z]+(?:-[a-z]+)*$")
_NUMBER_RE = re.compile(r"^[+-]?\d+(?:[.,]\d+)*%?$")
_VOWELS = frozenset("aeiou")
_NO_SPACE_BEFORE = frozenset({".", ",", ";", ":", "!", "?", ")", "]", "%"})
_NO_SPACE_AFTER = frozenset({"(", "["})

# irregular or rule-defeating forms; every value must itself be a fixed point
LEMMA_OVERRIDES = {
    "using": "use",
    "used": "use",
    "uses": "use",
    "does": "do",
    "has": "have",
    "had": "have",
    "is": "be",
    "was": "be",
    "were": "be",
    "been": "be",
    "always": "always",
    "series": "series",
    "changing": "change",
    "changed": "change",
    "changes": "change",
    "moved": "move",
    "data": "data",
    "during": "during",
    "string": "string",
    "nothing": "nothing",
    "something": "something",
    "anything": "anything",
    "everything": "everything",
    "ceiling": "ceiling",
}

# stems taking back a silent e once -ing/-ed is stripped, by final letter
_SILENT_E_FINALS = frozenset("cgsvz")
# and by final vowel+consonant pair
_SILENT_E_PAIRS = frozenset(
    {"at", "ut", "ur", "ir", "ar", "in", "ok", "ak", "ud", "od", "id", "ib", "um"}
)
_KEEP_DOUBLE = frozenset({"ll", "ss", "zz", "ff"})


def is_number(surface: str) -> bool:
    return bool(_NUMBER_RE.match(surface))


def _is_consonant_slot(stem: str, idx: int) -> bool:
    ch = stem[idx]
    if ch not in _VOWELS:
        return True
    # the u of "qu" behaves as a consonant: requir(e), acquir(e)
    return ch == "u" and idx > 0 and stem[idx - 1] == "q"


def _restore_stem(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS:
        if stem[-2:] not in _KEEP_DOUBLE:
            return stem[:-1]
        return stem
    if len(stem) >= 3 and stem[-1] not in _VOWELS and stem[-2] in "aiou":
        if _is_consonant_slot(stem, -3) and (
            stem[-1] in _SILENT_E_FINALS or stem[-2:] in _SILENT_E_PAIRS
        ):
            return stem + "e"
    return stem


def _strip_once(word: str) -> str:
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("es") and len(word) > 3:
        stem = word[:-2]
        if stem.endswith(("x", "ch", "sh", "ss", "zz")):
            return stem
        if stem.endswith(("s", "z")):
            return word[:-1]
    if (
        word.endswith("s")
        and len(word) > 3
        and not word.endswith(("ss", "us", "is"))
    ):
        return word[:-1]
    if word.endswith("ing") and len(word) > 5:
        return _restore_stem(word[:-3])
    if word.endswith("ed") and len(word) > 5 and not word.endswith("eed"):
        return _restore_stem(word[:-2])
    return word


@lru_cache(maxsize=65536)
def lemmatize(surface: str) -> str:
    word = normalise(surface).lower()
    if word in LEMMA_OVERRIDES:
        return LEMMA_OVERRIDES[word]
    if not _WORD_RE.match(word):
        return word
    while True:
        stripped = _strip_once(word)
        if stripped == word:
            return word
        word = LEMMA_OVERRIDES.get(stripped, stripped)


def tokenize(text: str, doc_id: str = "") -> List[Sentence]:
    sentences: List[Sentence] = []
    current: List[Token] = []
    line = 1
    last_end = 0

    def close() -> None:
        if current:
            sentences.append(Sentence(tuple(current), doc_id, len(sentences)))
            current.clear()

    for match in _TOKEN_RE.finditer(text):
        offset = match.start()
        newlines = text.count("\n", last_end, offset)
        if newlines:
            close()
            line += newlines
        surface = match.group()
        current.append(Token(surface, lemmatize(surface), offset, line))
        last_end = match.end()
        if surface in SENTENCE_TERMINATORS:
            previous = current[-2].lemma if len(current) > 1 else ""
            if surface != "." or previous not in ABBREVIATIONS:
                close()
    close()
    return sentences


def make_document(text: str, doc_id: str = "") -> Document:
    return Document(doc_id=doc_id, text=text, sentences=tokenize(text, doc_id))


async def read_document(path: Path, doc_id: Optional[str] = None) -> Document:
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            text = await f.read()
    except UnicodeDecodeError as e:
        raise DocumentEncodingError(path, str(e)) from e
    return make_document(text, doc_id if doc_id is not None else path.name)


def sentence_from_surfaces(
    surfaces: List[str], doc_id: str = "", index: int = 0
) -> Sentence:
    """Rebuilds a Sentence from stored fragment tokens (offsets are synthetic)."""
    tokens = []
    offset = 0
    for surface in surfaces:
        tokens.append(Token(surface, lemmatize(surface), offset, 1))
        offset += len(surface) + 1
    return Sentence(tuple(tokens), doc_id, index)


def detokenize(surfaces: List[str]) -> str:
    out = ""
    for surface in surfaces:
        if out and surface not in _NO_SPACE_BEFORE and out[-1] not in _NO_SPACE_AFTER:
            out += " "
        out += surface
    return out


def group_compounds(sentence: Sentence, lex: "Lexicon") -> List[Unit]:
    entries = [lex.categorize(token) for token in sentence.tokens]
    nounish = [
        any(e.pos == "noun" for e in es) and not any(e.pos == "verb" for e in es)
        for es in entries
    ]

    units: List[Unit] = []
    compound_starts = {start: end for start, end in runs(nounish)}
    idx = 0
    while idx < len(entries):
        if idx in compound_starts and compound_starts[idx] - idx > 1:
            end = compound_starts[idx]
            lemma = " ".join(lex.lemma(t.surface) for t in sentence.tokens[idx:end])
            head_features = frozenset().union(
                *(e.features for e in entries[end - 1] if e.pos == "noun")
            )
            units.append(
                Unit(lemma, idx, end, frozenset({WordEntry(lemma, "noun", head_features)}))
            )
            idx = end
            continue
        if entries[idx]:
            units.append(
                Unit(next(iter(entries[idx])).lemma, idx, idx + 1, entries[idx])
            )
        idx += 1
    return units


class TagParser:
    OPEN = "<{kind}>"
    CLOSE = "</{kind}>"
    TAG_RE = re.compile(r"<(/?)([A-Za-z]+)([^<>]*)>")

    def parse(self, text: str) -> TaggedFragment:
        elements: List[FragmentElement] = []
        open_tag: Optional[Tuple[str, int]] = None
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue

            match = self.TAG_RE.match(text, pos)
            if match:
                closing, kind, attrs = match.group(1) == "/", match.group(2), match.group(3)
                if kind not in TAG_KINDS:
                    raise UnknownTagError(f"unknown tag '{match.group()}'", pos)
                if attrs.strip():
                    raise UnknownTagError(
                        f"attributes are not allowed in fragments: '{match.group()}'", pos
                    )
                if closing:
                    if open_tag is None or open_tag[0] != kind:
                        raise UnbalancedTagError(f"unexpected '</{kind}>'", pos)
                    open_tag = None
                else:
                    if open_tag is not None:
                        raise UnbalancedTagError(
                            f"'<{kind}>' opened inside '<{open_tag[0]}>'", pos
                        )
                    open_tag = (kind, pos)
                elements.append(Tag(kind, closing))
                pos = match.end()
                continue

            end = pos
            while end < len(text) and not text[end].isspace():
                if text[end] == "<" and self.TAG_RE.match(text, end):
                    break
                end += 1
            elements.append(text[pos:end])
            pos = end

        if open_tag is not None:
            raise UnbalancedTagError(f"'<{open_tag[0]}>' is never closed", open_tag[1])
        return TaggedFragment(tuple(elements))

    def render(self, fragment: TaggedFragment) -> str:
        parts = []
        for element in fragment.elements:
            if isinstance(element, Tag):
                template = self.CLOSE if element.closing else self.OPEN
                parts.append(template.format(kind=element.kind))
            else:
                parts.append(element)
        return " ".join(parts)


_TAG_PARSER = TagParser()


def parse_tagged(text: str) -> TaggedFragment:
    return _TAG_PARSER.parse(text)


def render_tagged(fragment: TaggedFragment) -> str:
    return _TAG_PARSER.render(fragment)


def plain_text(fragment: TaggedFragment) -> str:
    return detokenize(fragment.tokens())


def quantity_runs(surfaces: List[str], lex: "Lexicon") -> List[Tuple[int, int]]:
    """
    Maximal runs of quantity-expression tokens holding at least one numeral,
    without trailing comparators or interval markers.
    """
    flags = [lex.is_quantity(s) for s in surfaces]
    for idx in range(1, len(surfaces) - 1):
        # "between 3 and 5 minutes"
        if surfaces[idx].lower() == "and" and lex.is_numeral(surfaces[idx - 1]):
            flags[idx] = lex.is_numeral(surfaces[idx + 1])

    found = []
    for start, end in runs(flags):
        while end > start and lex.lemma(surfaces[end - 1]) in QUANTITY_MARKERS:
            end -= 1
        if any(lex.is_numeral(s) for s in surfaces[start:end]):
            found.append((start, end))
    return found
