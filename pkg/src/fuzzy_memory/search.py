from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

T = TypeVar("T")

_REPLACEMENTS = {
    "\u2010": "-",
    "\u2011": "-",
    "\u2012": "-",
    "\u2013": "-",
    "\u2014": "-",
    "\u2015": "-",
    "\u2212": "-",
    "\u2018": "'",
    "\u2019": "'",
    "\u201a": "'",
    "\u201b": "'",
    "\u201c": '"',
    "\u201d": '"',
    "\u201e": '"',
    "\u201f": '"',
    "\u00a0": " ",
    "\u2002": " ",
    "\u2003": " ",
    "\u2004": " ",
    "\u2005": " ",
    "\u2006": " ",
    "\u2007": " ",
    "\u2008": " ",
    "\u2009": " ",
    "\u200a": " ",
    "\u202f": " ",
    "\u205f": " ",
    "\u3000": " ",
}


def normalise(text: str) -> str:
    """Map typographic dashes, quotes and spaces to ASCII, one char for one char."""
    return "".join(_REPLACEMENTS.get(c, c) for c in text)


def longest_match_at(
    tokens: Sequence[str],
    start: int,
    max_len: int,
    lookup: Callable[[str], Optional[T]],
) -> Optional[Tuple[int, T]]:
    """Tries the longest space-joined window first; returns (length, hit)."""
    for length in range(min(max_len, len(tokens) - start), 0, -1):
        hit = lookup(" ".join(tokens[start : start + length]))
        if hit is not None:
            return length, hit
    return None


def runs(flags: List[bool]) -> List[Tuple[int, int]]:
    """Maximal [start, end) runs of True values."""
    found = []
    start: Optional[int] = None
    for idx, flag in enumerate(flags):
        if flag and start is None:
            start = idx
        elif not flag and start is not None:
            found.append((start, idx))
            start = None
    if start is not None:
        found.append((start, len(flags)))
    return found
