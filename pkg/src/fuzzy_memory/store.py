import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import aiofiles

from .constants import STABLE_TIMESTAMP, STORE_FORMAT, STORE_VERSION
from .errors import FuzzyMemoryError, StoreError, StoreLockedError
from .models import (
    Context,
    ContextClass,
    ContextWord,
    CorrectRealization,
    CorrectionRecord,
    Deactivation,
    DeactivationSet,
    Filler,
    Validation,
)
from .textmodel import parse_tagged, render_tagged
from .utils import atomic_write, dumps

logger = logging.getLogger(__name__)

# (pattern id, context class id) -> slot name -> ranked fillers
RecommendationTable = Dict[Tuple[str, str], Dict[str, List[Filler]]]


@dataclass
class MemoryStore:
    """
    Append-only correction memory. `records`, `realizations` and `validations`
    are the source of truth; `classes`, `deactivations` and `recommendations`
    are derived by induction and can always be rebuilt from them.
    """

    records: List[CorrectionRecord] = field(default_factory=list)
    realizations: List[CorrectRealization] = field(default_factory=list)
    validations: List[Validation] = field(default_factory=list)
    classes: List[ContextClass] = field(default_factory=list)
    deactivations: DeactivationSet = field(default_factory=DeactivationSet)
    recommendations: RecommendationTable = field(default_factory=dict)
    config: str = ""
    written_at: str = STABLE_TIMESTAMP

    def next_seq(self) -> int:
        last = [r.seq for r in self.records]
        last += [r.seq for r in self.realizations]
        last += [v.seq for v in self.validations]
        return max(last, default=0) + 1

    @property
    def validated_ids(self) -> frozenset:
        return frozenset(v.deactivation_id for v in self.validations)

    def validate(self, deactivation_id: str, timestamp: str) -> bool:
        """Marks an induced deactivation as confirmed. False if it already was."""
        entry = self.deactivations.get(deactivation_id)
        if entry is None:
            raise StoreError(f"Unknown deactivation id: {deactivation_id}")
        if entry.validated:
            return False

        self.validations.append(Validation(deactivation_id, self.next_seq(), timestamp))
        self.deactivations.entries = [
            Deactivation(d.id, d.item_lemma, d.context, d.support, True)
            if d.id == deactivation_id
            else d
            for d in self.deactivations.entries
        ]
        return True


def context_to_json(context: Context) -> Dict[str, Any]:
    return {
        "item": context.item_lemma,
        "head": context.head,
        "additional": [[w.lemma, w.pos] for w in context.additional],
    }


def context_from_json(data: Dict[str, Any]) -> Context:
    return Context(
        item_lemma=data["item"],
        head=data["head"],
        additional=tuple(ContextWord(lemma, pos) for lemma, pos in data["additional"]),
    )


def _filler_to_json(filler: Filler) -> Dict[str, Any]:
    return {
        "text": filler.text,
        "frequency": filler.frequency,
        "recency": filler.recency,
        "provenance": list(filler.provenance),
    }


def _filler_from_json(data: Dict[str, Any]) -> Filler:
    return Filler(
        data["text"], data["frequency"], data["recency"], tuple(data["provenance"])
    )


class StoreParser:
    """
    JSON-lines codec for the store file and its `.derived` sibling. Each file
    starts with a header line; every other line carries a `type` field.
    """

    def render_header(self, store: MemoryStore) -> str:
        return dumps(
            {
                "config": store.config,
                "format": STORE_FORMAT,
                "version": STORE_VERSION,
                "written_at": store.written_at,
            }
        )

    def render_record(self, record: CorrectionRecord) -> str:
        return dumps(
            {
                "type": "record",
                "id": record.id,
                "seq": record.seq,
                "item": record.item_lemma,
                "category": record.category,
                "severity": record.severity,
                "original": render_tagged(record.original),
                "corrected": (
                    render_tagged(record.corrected) if record.corrected is not None else None
                ),
                "writer": record.writer_id,
                "context": context_to_json(record.context),
                "case": record.case,
                "rule": record.rule,
                "timestamp": record.timestamp,
                "doc_id": record.doc_id,
                "sentence_index": record.sentence_index,
            }
        )

    def render_realization(self, realization: CorrectRealization) -> str:
        return dumps(
            {
                "type": "realization",
                "id": realization.id,
                "seq": realization.seq,
                "text": realization.text,
                "context": context_to_json(realization.context),
                "doc_id": realization.doc_id,
                "sentence_index": realization.sentence_index,
            }
        )

    def render_validation(self, validation: Validation) -> str:
        return dumps(
            {
                "type": "validation",
                "id": validation.deactivation_id,
                "seq": validation.seq,
                "timestamp": validation.timestamp,
            }
        )

    def render(self, store: MemoryStore) -> str:
        lines = [self.render_header(store)]
        entries: List[Tuple[int, str]] = []
        entries += [(r.seq, self.render_record(r)) for r in store.records]
        entries += [(r.seq, self.render_realization(r)) for r in store.realizations]
        entries += [(v.seq, self.render_validation(v)) for v in store.validations]
        lines += [line for _, line in sorted(entries, key=lambda e: e[0])]
        return "\n".join(lines) + "\n"

    def render_derived(self, store: MemoryStore) -> str:
        lines = [self.render_header(store)]
        for cls in store.classes:
            lines.append(
                dumps(
                    {
                        "type": "class",
                        "id": cls.id,
                        "item": cls.item_lemma,
                        "head": cls.head,
                        "representative": context_to_json(cls.representative),
                        "records": cls.record_ids,
                        "uncorrected": cls.uncorrected,
                        "corrected": cls.corrected,
                    }
                )
            )
        for entry in store.deactivations.entries:
            lines.append(
                dumps(
                    {
                        "type": "deactivation",
                        "id": entry.id,
                        "item": entry.item_lemma,
                        "context": (
                            context_to_json(entry.context) if entry.context else None
                        ),
                        "support": entry.support,
                        "validated": entry.validated,
                    }
                )
            )
        for (pattern_id, class_id), slots in sorted(store.recommendations.items()):
            lines.append(
                dumps(
                    {
                        "type": "recommendation",
                        "pattern": pattern_id,
                        "class": class_id,
                        "slots": {
                            name: [_filler_to_json(f) for f in fillers]
                            for name, fillers in slots.items()
                        },
                    }
                )
            )
        return "\n".join(lines) + "\n"

    def _entries(self, text: str, what: str):
        header: Optional[Dict[str, Any]] = None
        for line_number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise StoreError(
                    f"Invalid {what} entry on line {line_number}: {e.msg}"
                ) from e
            if not isinstance(data, dict):
                raise StoreError(
                    f"Invalid {what} entry on line {line_number}: expected an object"
                )
            if header is None:
                if data.get("format") != STORE_FORMAT:
                    raise StoreError(
                        f"Invalid {what} header on line {line_number}: "
                        f"not a {STORE_FORMAT} file"
                    )
                if data.get("version") != STORE_VERSION:
                    raise StoreError(
                        f"Invalid {what} header on line {line_number}: "
                        f"unsupported version {data.get('version')!r}"
                    )
                header = data
                yield line_number, data
                continue
            yield line_number, data

    def parse(self, text: str) -> MemoryStore:
        store = MemoryStore()
        for line_number, data in self._entries(text, "store"):
            kind = data.get("type")
            try:
                if kind is None and "format" in data:
                    store.config = data["config"]
                    store.written_at = data["written_at"]
                elif kind == "record":
                    store.records.append(self._parse_record(data))
                elif kind == "realization":
                    store.realizations.append(
                        CorrectRealization(
                            id=data["id"],
                            seq=data["seq"],
                            text=data["text"],
                            context=context_from_json(data["context"]),
                            doc_id=data["doc_id"],
                            sentence_index=data["sentence_index"],
                        )
                    )
                elif kind == "validation":
                    store.validations.append(
                        Validation(data["id"], data["seq"], data["timestamp"])
                    )
                else:
                    raise StoreError(
                        f"Invalid store entry on line {line_number}: unknown type {kind!r}"
                    )
            except (KeyError, TypeError, ValueError) as e:
                if isinstance(e, FuzzyMemoryError):
                    raise
                raise StoreError(
                    f"Invalid store entry on line {line_number}: missing or bad field {e}"
                ) from e
        return store

    @staticmethod
    def _parse_record(data: Dict[str, Any]) -> CorrectionRecord:
        corrected = data["corrected"]
        return CorrectionRecord(
            id=data["id"],
            seq=data["seq"],
            item_lemma=data["item"],
            category=data["category"],
            severity=data["severity"],
            original=parse_tagged(data["original"]),
            corrected=parse_tagged(corrected) if corrected is not None else None,
            writer_id=data["writer"],
            context=context_from_json(data["context"]),
            case=data["case"],
            rule=data["rule"],
            timestamp=data["timestamp"],
            doc_id=data["doc_id"],
            sentence_index=data["sentence_index"],
        )

    def parse_derived(self, text: str, store: MemoryStore) -> None:
        entries: List[Deactivation] = []
        for line_number, data in self._entries(text, "derived"):
            kind = data.get("type")
            try:
                if kind is None and "format" in data:
                    if data["config"] != store.config:
                        logger.warning(
                            "Derived tables were built with config %s, store has %s; "
                            "run induce to rebuild them",
                            data["config"],
                            store.config,
                        )
                elif kind == "class":
                    store.classes.append(
                        ContextClass(
                            id=data["id"],
                            item_lemma=data["item"],
                            head=data["head"],
                            representative=context_from_json(data["representative"]),
                            record_ids=list(data["records"]),
                            uncorrected=data["uncorrected"],
                            corrected=data["corrected"],
                        )
                    )
                elif kind == "deactivation":
                    context = data["context"]
                    entries.append(
                        Deactivation(
                            id=data["id"],
                            item_lemma=data["item"],
                            context=context_from_json(context) if context else None,
                            support=data["support"],
                            validated=data["validated"],
                        )
                    )
                elif kind == "recommendation":
                    store.recommendations[(data["pattern"], data["class"])] = {
                        name: [_filler_from_json(f) for f in fillers]
                        for name, fillers in data["slots"].items()
                    }
                else:
                    raise StoreError(
                        f"Invalid derived entry on line {line_number}: unknown type {kind!r}"
                    )
            except (KeyError, TypeError, ValueError) as e:
                if isinstance(e, FuzzyMemoryError):
                    raise
                raise StoreError(
                    f"Invalid derived entry on line {line_number}: missing or bad field {e}"
                ) from e
        store.deactivations = DeactivationSet(entries)


def derived_path(path: Path) -> Path:
    return path.with_name(path.name + ".derived")


def lock_path(path: Path) -> Path:
    return path.with_name(path.name + ".lock")


async def load_store(path: Path) -> MemoryStore:
    """Reads the store and its derived tables; a missing store is an empty one."""
    path = Path(path)
    parser = StoreParser()
    if not path.exists():
        logger.info("No store at %s, starting empty", path)
        return MemoryStore()

    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        store = parser.parse(await f.read())

    derived = derived_path(path)
    if derived.exists():
        async with aiofiles.open(derived, "r", encoding="utf-8") as f:
            parser.parse_derived(await f.read(), store)

    logger.info(
        "Loaded store %s: %d records, %d realizations, %d deactivations",
        path,
        len(store.records),
        len(store.realizations),
        len(store.deactivations.entries),
    )
    return store


async def save_store(store: MemoryStore, path: Path) -> None:
    path = Path(path)
    parser = StoreParser()
    await atomic_write(path, parser.render(store))
    await atomic_write(derived_path(path), parser.render_derived(store))


class StoreLock:
    """Advisory lock held by commands that mutate the store."""

    def __init__(self, path: Path):
        self.path = lock_path(Path(path))
        self._held = False

    def __enter__(self) -> "StoreLock":
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as e:
            raise StoreLockedError(
                f"Store is locked by another process: {self.path} exists"
            ) from e
        with os.fdopen(fd, "w") as f:
            f.write(str(os.getpid()))
        self._held = True
        return self

    def __exit__(self, *exc_info) -> None:
        if self._held:
            try:
                os.remove(self.path)
            except FileNotFoundError:
                pass
            self._held = False
