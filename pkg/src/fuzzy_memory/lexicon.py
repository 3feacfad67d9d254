import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import aiofiles

from .constants import (
    CATEGORY_POS,
    FUZZY_CATEGORIES,
    NOUN_ONLY_FEATURES,
    NUMBER_WORDS,
    QUANTITY_MARKERS,
    SEVERITIES,
    VERB_ONLY_FEATURES,
    WORD_FEATURES,
    WORD_POS,
)
from .errors import DuplicateEntryError, InvalidSeverityError, LexiconError
from .models import CorrectionRecord, FuzzyItem, Token, WordEntry
from .search import normalise
from .textmodel import is_number, lemmatize
from .utils import atomic_write

logger = logging.getLogger(__name__)


@lru_cache(maxsize=65536)
def _normalise_form(text: str) -> str:
    return " ".join(normalise(text).lower().split())


@lru_cache(maxsize=65536)
def _lemmatize_form(form: str) -> str:
    return " ".join(lemmatize(word) for word in form.split(" "))


@dataclass(frozen=True)
class Lexicon:
    """
    The fuzzy-item lexicon plus the word-category resource used for contexts
    and pattern constraints. Immutable once built; lookups are case-insensitive.
    """

    items: Tuple[FuzzyItem, ...] = ()
    words: Tuple[WordEntry, ...] = ()
    stopwords: FrozenSet[str] = frozenset()
    synonyms: Tuple[FrozenSet[str], ...] = ()
    _forms: Dict[str, FuzzyItem] = field(default_factory=dict, compare=False, repr=False)
    _rows: Dict[str, FrozenSet[WordEntry]] = field(
        default_factory=dict, compare=False, repr=False
    )
    _synsets: Dict[str, FrozenSet[int]] = field(
        default_factory=dict, compare=False, repr=False
    )
    _max_words: int = field(default=1, init=False, compare=False, repr=False)
    # surface -> result memo for the per-token lookups; the lexicon never changes
    _memo: Dict[Tuple[str, str], object] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self):
        forms: Dict[str, FuzzyItem] = {}
        for item in self.items:
            for form in (item.lemma, *item.variants):
                key = _normalise_form(form)
                owner = forms.get(key)
                if owner is not None and owner != item:
                    raise DuplicateEntryError(
                        f"'{key}' maps to both '{owner.lemma}' ({owner.category}) "
                        f"and '{item.lemma}' ({item.category})"
                    )
                forms[key] = item
        for word in self.stopwords:
            if word in forms and forms[word].lemma == word:
                raise LexiconError(f"'{word}' is both a stopword and a fuzzy item")

        rows: Dict[str, set] = {}
        for entry in self.words:
            rows.setdefault(entry.lemma, set()).add(entry)

        synsets: Dict[str, set] = {}
        for idx, synset in enumerate(self.synonyms):
            for lemma in synset:
                synsets.setdefault(lemma, set()).add(idx)

        self._forms.update(forms)
        self._rows.update({k: frozenset(v) for k, v in rows.items()})
        self._synsets.update({k: frozenset(v) for k, v in synsets.items()})
        object.__setattr__(
            self, "_max_words", max((len(item.words) for item in self.items), default=1)
        )

    @property
    def max_item_words(self) -> int:
        return self._max_words

    def _cached(self, kind: str, surface: str, compute):
        key = (kind, surface)
        try:
            return self._memo[key]
        except KeyError:
            value = self._memo[key] = compute(surface)
            return value

    def lookup_fuzzy(self, surface: str) -> Optional[FuzzyItem]:
        return self._cached("fuzzy", surface, self._lookup_fuzzy)

    def _lookup_fuzzy(self, surface: str) -> Optional[FuzzyItem]:
        form = _normalise_form(surface)
        if not form:
            return None
        item = self._forms.get(form)
        if item is None:
            item = self._forms.get(_lemmatize_form(form))
        return item

    def lemma(self, surface: str) -> str:
        return self._cached("lemma", surface, self._lemma)

    def _lemma(self, surface: str) -> str:
        form = _normalise_form(surface)
        item = self._forms.get(form)
        if item is not None and " " not in item.lemma:
            return item.lemma
        return lemmatize(surface)

    def is_stopword(self, surface: str) -> bool:
        form = _normalise_form(surface)
        return form in self.stopwords or self.lemma(surface) in self.stopwords

    def categorize(self, token: Union[Token, str]) -> FrozenSet[WordEntry]:
        surface = token.surface if isinstance(token, Token) else token
        return self._cached("categorize", surface, self._categorize)

    def _categorize(self, surface: str) -> FrozenSet[WordEntry]:
        if not any(ch.isalnum() for ch in surface):
            return frozenset()
        if self.is_stopword(surface):
            return frozenset()

        lemma = self.lemma(surface)
        rows = self._rows.get(lemma) or self._rows.get(_normalise_form(surface))
        if rows:
            return rows

        item = self._forms.get(_normalise_form(surface)) or self._forms.get(lemma)
        if item is not None and " " not in item.lemma:
            return frozenset({WordEntry(lemma, CATEGORY_POS[item.category])})
        if is_number(surface):
            return frozenset({WordEntry(lemma, "other", frozenset({"quantity"}))})
        return frozenset({WordEntry(lemma, "noun")})

    def is_quantity(self, surface: str) -> bool:
        if surface == "%" or is_number(surface):
            return True
        lemma = self.lemma(surface)
        if lemma in QUANTITY_MARKERS or lemma in NUMBER_WORDS:
            return True
        return any(
            "unit" in entry.features or "quantity" in entry.features
            for entry in self._rows.get(lemma, ())
        )

    def is_numeral(self, surface: str) -> bool:
        return is_number(surface) or self.lemma(surface) in NUMBER_WORDS

    def same_word(self, a: str, b: str) -> bool:
        """Lemma equality, or membership in a common synonym set."""
        if a == b:
            return True
        return bool(self._synsets.get(a, frozenset()) & self._synsets.get(b, frozenset()))

    def suggest_demotions(
        self, records: Iterable[CorrectionRecord], min_records: int = 5
    ) -> List[Tuple[FuzzyItem, int, float]]:
        """
        Items writers mostly leave uncorrected: (item, suggested severity,
        uncorrected rate). Severity is only ever changed by editing the file.
        """
        totals: Counter = Counter()
        uncorrected: Counter = Counter()
        for record in records:
            totals[record.item_lemma] += 1
            if record.case == 1:
                uncorrected[record.item_lemma] += 1

        suggestions = []
        for item in self.items:
            total = totals[item.lemma]
            if total < min_records or item.severity == 1:
                continue
            rate = uncorrected[item.lemma] / total
            if rate > 0.5:
                suggestions.append((item, item.severity - 1, round(rate, 3)))
        return suggestions


class LexiconParser:
    COMMENT = "#"

    def _lines(self, text: str):
        for line_number, raw in enumerate(text.splitlines(), start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith(self.COMMENT):
                continue
            yield line_number, line

    @staticmethod
    def _split_list(column: str) -> Tuple[str, ...]:
        return tuple(part.strip() for part in column.split(",") if part.strip())

    def parse_items(self, text: str) -> List[FuzzyItem]:
        items: List[FuzzyItem] = []
        seen: Dict[Tuple[str, str], int] = {}
        for line_number, line in self._lines(text):
            columns = line.split("\t")
            if len(columns) < 3 or len(columns) > 5:
                raise LexiconError(
                    f"expected 3 to 5 tab-separated columns, got {len(columns)}",
                    line_number,
                )
            lemma = _normalise_form(columns[0])
            category = columns[1].strip()
            if not lemma:
                raise LexiconError("empty lemma", line_number)
            if category not in FUZZY_CATEGORIES:
                raise LexiconError(f"unknown category '{category}'", line_number)
            try:
                severity = int(columns[2].strip())
            except ValueError as e:
                raise InvalidSeverityError(
                    f"severity must be 1, 2 or 3, got '{columns[2].strip()}'", line_number
                ) from e
            if severity not in SEVERITIES:
                raise InvalidSeverityError(
                    f"severity must be 1, 2 or 3, got '{severity}'", line_number
                )
            if (lemma, category) in seen:
                raise DuplicateEntryError(
                    f"'{lemma}' ({category}) already defined on line {seen[(lemma, category)]}",
                    line_number,
                )
            seen[(lemma, category)] = line_number
            variants = tuple(
                _normalise_form(v)
                for v in (self._split_list(columns[3]) if len(columns) > 3 else ())
            )
            features = self._split_list(columns[4]) if len(columns) > 4 else ()
            items.append(FuzzyItem(lemma, category, severity, variants, features))
        return items

    def parse_words(self, text: str) -> List[WordEntry]:
        entries: List[WordEntry] = []
        seen: Dict[Tuple[str, str], int] = {}
        for line_number, line in self._lines(text):
            columns = line.split("\t")
            if len(columns) < 2 or len(columns) > 3:
                raise LexiconError(
                    f"expected 2 or 3 tab-separated columns, got {len(columns)}",
                    line_number,
                )
            lemma = _normalise_form(columns[0])
            pos = columns[1].strip()
            features = frozenset(self._split_list(columns[2]) if len(columns) > 2 else ())
            if pos not in WORD_POS:
                raise LexiconError(f"unknown part of speech '{pos}'", line_number)
            unknown = features - set(WORD_FEATURES)
            if unknown:
                raise LexiconError(
                    f"unknown features {', '.join(sorted(unknown))}", line_number
                )
            if features & VERB_ONLY_FEATURES and pos != "verb":
                raise LexiconError("action/durative are verb features", line_number)
            if features & NOUN_ONLY_FEATURES and pos != "noun":
                raise LexiconError("location/unit are noun features", line_number)
            if (lemma, pos) in seen:
                raise DuplicateEntryError(
                    f"'{lemma}' ({pos}) already defined on line {seen[(lemma, pos)]}",
                    line_number,
                )
            seen[(lemma, pos)] = line_number
            entries.append(WordEntry(lemma, pos, features))
        return entries

    def parse_stopwords(self, text: str) -> FrozenSet[str]:
        return frozenset(_normalise_form(line) for _, line in self._lines(text))

    def parse_synonyms(self, text: str) -> Tuple[FrozenSet[str], ...]:
        return tuple(
            frozenset(_normalise_form(w) for w in self._split_list(line))
            for _, line in self._lines(text)
        )

    def render_items(self, items: Iterable[FuzzyItem]) -> str:
        lines = []
        for item in items:
            columns = [item.lemma, item.category, str(item.severity)]
            if item.variants or item.features:
                columns.append(",".join(item.variants))
            if item.features:
                columns.append(",".join(item.features))
            lines.append("\t".join(columns))
        return "\n".join(lines) + ("\n" if lines else "")


async def _read(path: Optional[Path]) -> str:
    if path is None:
        return ""
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        return await f.read()


async def load_lexicon(
    path: Path,
    words_path: Optional[Path] = None,
    stopwords_path: Optional[Path] = None,
    synonyms_path: Optional[Path] = None,
) -> Lexicon:
    parser = LexiconParser()
    lexicon = Lexicon(
        items=tuple(parser.parse_items(await _read(path))),
        words=tuple(parser.parse_words(await _read(words_path))),
        stopwords=parser.parse_stopwords(await _read(stopwords_path)),
        synonyms=parser.parse_synonyms(await _read(synonyms_path)),
    )
    logger.info(
        "Loaded %d fuzzy items and %d word entries from %s",
        len(lexicon.items),
        len(lexicon.words),
        path,
    )
    return lexicon


async def save_lexicon(lex: Lexicon, path: Path) -> None:
    await atomic_write(path, LexiconParser().render_items(lex.items))
