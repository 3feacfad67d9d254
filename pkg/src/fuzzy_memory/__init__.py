from pathlib import Path
from typing import List, Optional

from .cli import main
from .config import Config, load_config
from .detector import context_match, detect, extract_context
from .lexicon import Lexicon, load_lexicon, save_lexicon
from .memory import CorrectionClassifier, induce, learn, mine_correct
from .models import Alert, Context, CorrectionRecord, Suggestion
from .patterns import Catalog, load_patterns, suggest
from .store import MemoryStore, load_store, save_store
from .textmodel import read_document


async def load_default_lexicon(config: Optional[Config] = None) -> Lexicon:
    config = config or Config()
    return await load_lexicon(
        config.lexicon_path, config.words_path, config.stopwords_path, config.synonyms_path
    )


async def detect_file(path: Path, config: Optional[Config] = None) -> List[Alert]:
    config = config or Config()
    lex = await load_default_lexicon(config)
    store = await load_store(config.store_path)
    doc = await read_document(path)
    return detect(doc, lex, store.deactivations, config.context_match_k, config.context_size)


__all__ = [
    "Alert",
    "Catalog",
    "Config",
    "Context",
    "CorrectionClassifier",
    "CorrectionRecord",
    "Lexicon",
    "MemoryStore",
    "Suggestion",
    "context_match",
    "detect",
    "detect_file",
    "extract_context",
    "induce",
    "learn",
    "load_config",
    "load_default_lexicon",
    "load_lexicon",
    "load_patterns",
    "load_store",
    "main",
    "mine_correct",
    "save_lexicon",
    "save_store",
    "suggest",
]
