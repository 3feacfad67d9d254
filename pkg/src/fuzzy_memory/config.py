import hashlib
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import aiofiles

from .errors import ConfigError

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"

_INT_KEYS = {
    "deactivation_threshold",
    "global_threshold",
    "global_min_contexts",
    "context_match_k",
    "context_size",
    "min_severity",
}
_FLOAT_KEYS = {"case4_edit_ratio"}
_PATH_KEYS = {
    "lexicon_path",
    "words_path",
    "stopwords_path",
    "synonyms_path",
    "patterns_path",
    "store_path",
}
# settings that change what induce derives; they go into the store fingerprint
_FINGERPRINT_KEYS = (
    "deactivation_threshold",
    "global_threshold",
    "global_min_contexts",
    "context_match_k",
    "context_size",
    "case4_edit_ratio",
)


@dataclass(frozen=True)
class Config:
    deactivation_threshold: int = 5
    global_threshold: int = 15
    global_min_contexts: int = 3
    context_match_k: int = 2
    context_size: int = 4
    case4_edit_ratio: float = 0.25
    min_severity: int = 1
    lexicon_path: Path = field(default=DATA_DIR / "fuzzy_lexicon.tsv")
    words_path: Path = field(default=DATA_DIR / "words.tsv")
    stopwords_path: Path = field(default=DATA_DIR / "stopwords.txt")
    synonyms_path: Path = field(default=DATA_DIR / "synonyms.txt")
    patterns_path: Optional[Path] = None
    store_path: Path = field(default=Path("fuzzy-memory.store"))

    def __post_init__(self):
        for key in ("deactivation_threshold", "global_threshold", "global_min_contexts"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be at least 1, got {getattr(self, key)}")
        if self.context_match_k < 0:
            raise ConfigError(f"context_match_k must be >= 0, got {self.context_match_k}")
        if self.context_size < 1:
            raise ConfigError(f"context_size must be at least 1, got {self.context_size}")
        if not 0.0 <= self.case4_edit_ratio <= 1.0:
            raise ConfigError(
                f"case4_edit_ratio must be within [0, 1], got {self.case4_edit_ratio}"
            )
        if self.min_severity not in (1, 2, 3):
            raise ConfigError(f"min_severity must be 1, 2 or 3, got {self.min_severity}")

    def with_overrides(self, **overrides: Any) -> "Config":
        given = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(given) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
        return replace(self, **{k: _coerce(k, v) for k, v in given.items()})

    def fingerprint(self) -> str:
        values = asdict(self)
        canonical = ";".join(f"{k}={values[k]}" for k in _FINGERPRINT_KEYS)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _coerce(key: str, value: Any) -> Any:
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _PATH_KEYS:
            return Path(value)
    except ValueError as e:
        raise ConfigError(f"Invalid value for {key}: {value!r}") from e
    return value


def parse_config(text: str, base: Optional[Config] = None) -> Config:
    known = {f.name for f in fields(Config)}
    values: Dict[str, Any] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"Invalid config line {line_number}: expected 'key = value', got '{raw}'"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"Invalid config line {line_number}: unknown key '{key}'")
        values[key] = _coerce(key, value)
    return replace(base or Config(), **values)


async def load_config(path: Optional[Path]) -> Config:
    if path is None:
        return Config()
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            text = await f.read()
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    config = parse_config(text)
    logger.info("Loaded configuration from %s", path)
    return config
