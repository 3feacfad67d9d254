FUZZY_CATEGORIES = (
    "manner_adverb",
    "temporal_location_adverb",
    "determiner",
    "preposition",
    "verb_modal",
    "adjective",
    "noun",
)

WORD_POS = ("noun", "adjective", "verb", "adverb", "determiner", "preposition", "other")

WORD_FEATURES = ("action", "durative", "location", "unit", "quantity")

VERB_ONLY_FEATURES = frozenset({"action", "durative"})
NOUN_ONLY_FEATURES = frozenset({"location", "unit"})

# part of speech a fuzzy item takes when the word-category file is silent on it
CATEGORY_POS = {
    "manner_adverb": "adverb",
    "temporal_location_adverb": "adverb",
    "determiner": "determiner",
    "preposition": "preposition",
    "verb_modal": "verb",
    "adjective": "adjective",
    "noun": "noun",
}

SEVERITIES = (1, 2, 3)

TAG_KINDS = ("fuzzy", "revised")

SENTENCE_TERMINATORS = frozenset({".", "!", "?"})

# a period after one of these does not close the sentence
ABBREVIATIONS = frozenset(
    {"proc", "fig", "e.g", "i.e", "approx", "ref", "no", "vol", "sect", "eq", "cf"}
)

# comparators and interval markers that may surround a value
QUANTITY_MARKERS = frozenset(
    {
        "less",
        "more",
        "than",
        "below",
        "above",
        "under",
        "over",
        "every",
        "each",
        "to",
        "from",
        "between",
        "within",
        "in",
        "per",
        "at",
        "least",
        "up",
        "maximum",
        "minimum",
        "max",
        "min",
        "exactly",
    }
)

NUMBER_WORDS = frozenset(
    {
        "one",
        "two",
        "three",
        "four",
        "five",
        "six",
        "seven",
        "eight",
        "nine",
        "ten",
        "eleven",
        "twelve",
        "twenty",
        "hundred",
        "thousand",
    }
)

PURPOSE_CONJUNCTIONS = (("in", "order", "to"), ("so", "as", "to"), ("so", "that"))

SLOT_TYPES = (
    "value",
    "interval",
    "time",
    "time_interval",
    "distance",
    "warning",
    "paraphrase",
)

# slots whose fillers are quantity expressions
QUANTITY_SLOT_TYPES = frozenset({"value", "interval", "time", "time_interval", "distance"})

DEFAULT_GAP = (0, 3)

CONTEXT_ELIGIBLE_POS = frozenset({"noun", "adjective"})

STABLE_TIMESTAMP = "1970-01-01T00:00:00Z"

STORE_FORMAT = "fuzzy-memory-store"
STORE_VERSION = 1


BUILTIN_PATTERNS = """
# Fuzzy determiners: give an upper or a lower bound.
P-few: [{a few} X:noun] -> [less than <value> $X]
P-most: [{most} X:noun] -> [more than <value> $X]

# Temporal adverbs combined with an action: a period with a quantifier.
P-regularly: [{regularly} A:verb(action) G:gap] -> [every <time> $A $G]
P-frequently: [{frequently} A:verb(action) G:gap] -> [every <time> $A $G]

# progressively keeps its manner but needs a duration on durative verbs.
P-prog: [{progressively} V:verb(durative) G:gap] -> [{} $V $G in <time_interval>]

# Manner adverbs with no measurable reading: state the risk, or drop them.
P-carefully-warn: [{carefully} A:verb(action) G:gap] -> [{} $A $G <warning>]
P-carefully-skip: [{carefully} A:verb(action)] -> [$A]

# Prepositions: a distance or an interval of values.
P-near: [{near} L:noun(location)] -> [less than <distance> from $L]
P-around: [{around} L:noun(location)] -> [less than <distance> from $L]
P-about: [{about} N:number] -> [between <interval>]

# Fuzzy adjectives: paraphrase what is meant, or erase.
P-adj-para: [{adjective} X:noun] -> [$X <paraphrase>]
P-adj-erase: [{adjective}] -> []

# Requirements: move the purpose clause to its own sentence.
P-shall-purpose: [X:gap(1,30) shall Y:gap(1,30) P:conj(purpose) Z:gap(1,30) |] -> [$X shall $Y . The goal is to $Z]
"""
