from pathlib import Path
from typing import Optional


class FuzzyMemoryError(Exception):
    """Base class for every error raised by fuzzy_memory."""


class LexiconError(FuzzyMemoryError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"Invalid lexicon entry on line {line}: {message}"
        super().__init__(message)


class DuplicateEntryError(LexiconError):
    pass


class InvalidSeverityError(LexiconError):
    pass


class TagError(FuzzyMemoryError, ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"Invalid tagged fragment at offset {offset}: {message}")


class UnbalancedTagError(TagError):
    pass


class UnknownTagError(TagError):
    pass


class PatternSyntaxError(FuzzyMemoryError, ValueError):
    def __init__(self, pattern_id: str, position: int, message: str):
        self.pattern_id = pattern_id
        self.position = position
        super().__init__(
            f"Invalid pattern '{pattern_id}' at position {position}: {message}"
        )


class ConfigError(FuzzyMemoryError, ValueError):
    pass


class SentenceMismatchError(FuzzyMemoryError, ValueError):
    def __init__(self, original_count: int, corrected_count: int, index: int):
        self.index = index
        super().__init__(
            f"Sentence count mismatch: original has {original_count} sentences, "
            f"corrected has {corrected_count}; first divergent sentence is {index}"
        )


class MissingWriterError(FuzzyMemoryError, ValueError):
    pass


class UnboundVariableError(FuzzyMemoryError, RuntimeError):
    pass


class DocumentEncodingError(FuzzyMemoryError, ValueError):
    def __init__(self, path: Path, reason: str):
        self.path = path
        super().__init__(f"Cannot read {path} as UTF-8: {reason}")


class StoreError(FuzzyMemoryError, RuntimeError):
    pass


class StoreLockedError(StoreError):
    pass
