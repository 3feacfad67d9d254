import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .config import Config, load_config
from .detector import alert_record, annotate, detect
from .errors import FuzzyMemoryError
from .lexicon import Lexicon, load_lexicon
from .memory import induce, learn, mine_correct
from .models import Alert, Document
from .patterns import load_patterns, suggest, suggestion_record
from .report import build_report
from .store import MemoryStore, StoreLock, load_store, save_store
from .textmodel import read_document
from .utils import atomic_write, dumps, now

logger = logging.getLogger(__name__)


async def _resources(args: argparse.Namespace) -> Tuple[Config, Lexicon]:
    config = await load_config(args.config)
    config = config.with_overrides(
        store_path=args.store,
        lexicon_path=args.lexicon,
        patterns_path=args.patterns,
        min_severity=args.min_severity,
    )
    lex = await load_lexicon(
        config.lexicon_path,
        config.words_path,
        config.stopwords_path,
        config.synonyms_path,
    )
    return config, lex


async def _read_all(paths: List[str]) -> List[Document]:
    return [await read_document(Path(p)) for p in paths]


async def _emit(lines: List[str], output: Optional[str]) -> None:
    if output:
        await atomic_write(Path(output), "".join(line + "\n" for line in lines))
    else:
        for line in lines:
            print(line)


async def _save(store: MemoryStore, config: Config, stable: bool) -> None:
    store.config = config.fingerprint()
    store.written_at = now(stable)
    await save_store(store, config.store_path)


def _severe(alerts: List[Alert], config: Config) -> List[Alert]:
    return [a for a in alerts if a.severity >= config.min_severity]


async def run_detect(args: argparse.Namespace, config: Config, lex: Lexicon) -> int:
    store = await load_store(config.store_path)
    docs = await _read_all(args.inputs)
    records: List[str] = []
    reported = 0
    for doc in docs:
        alerts = _severe(
            detect(
                doc,
                lex,
                store.deactivations,
                config.context_match_k,
                config.context_size,
            ),
            config,
        )
        reported += len(alerts)
        records.extend(dumps(alert_record(a)) for a in alerts)
        if args.output_dir:
            target = Path(args.output_dir) / f"{doc.doc_id}.annotated"
            await atomic_write(target, annotate(doc, alerts))

    if args.output_dir:
        await _emit(records, str(Path(args.output_dir) / "alerts.jsonl"))
    else:
        await _emit(records, None)
    print(dumps({"command": "detect", "documents": len(docs), "alerts": reported}))
    return 1 if reported else 0


async def run_learn(args: argparse.Namespace, config: Config, lex: Lexicon) -> int:
    with StoreLock(config.store_path):
        store = await load_store(config.store_path)
        original = await read_document(Path(args.original))
        corrected = await read_document(Path(args.corrected), doc_id=original.doc_id)
        added = learn(
            original,
            corrected,
            args.writer or "",
            lex,
            store,
            config,
            timestamp=now(args.stable_output),
        )
        await _save(store, config, args.stable_output)

    cases: Dict[str, int] = {}
    for record in added:
        cases[str(record.case)] = cases.get(str(record.case), 0) + 1
    print(dumps({"command": "learn", "records": len(added), "cases": cases}))
    return 0


async def run_mine_correct(args: argparse.Namespace, config: Config, lex: Lexicon) -> int:
    with StoreLock(config.store_path):
        store = await load_store(config.store_path)
        found = mine_correct(await _read_all(args.corpus), lex, store, config)
        await _save(store, config, args.stable_output)
    print(dumps({"command": "mine-correct", "realizations": len(found)}))
    return 0


async def run_induce(args: argparse.Namespace, config: Config, lex: Lexicon) -> int:
    catalog = await load_patterns(config.patterns_path, lex)
    with StoreLock(config.store_path):
        store = await load_store(config.store_path)
        result = induce(store, config, lex, catalog)
        await _save(store, config, args.stable_output)

    unvalidated = sum(1 for d in store.deactivations.entries if not d.validated)
    print(
        dumps(
            {
                "command": "induce",
                "changes": result.changes,
                "message": f"{result.changes} changes",
                "classes": result.classes,
                "deactivations": len(store.deactivations.entries),
                "unvalidated": unvalidated,
                "added": result.deactivations_added,
                "removed": result.deactivations_removed,
                "recommendations": result.recommendation_cells,
            }
        )
    )
    return 0


async def run_suggest(args: argparse.Namespace, config: Config, lex: Lexicon) -> int:
    store = await load_store(config.store_path)
    catalog = await load_patterns(config.patterns_path, lex)
    doc = await read_document(Path(args.input))
    alerts = _severe(
        detect(doc, lex, store.deactivations, config.context_match_k, config.context_size),
        config,
    )
    lines = []
    for alert in alerts:
        sentence = doc.sentences[alert.sentence_index]
        for suggestion in suggest(
            alert, sentence, store, catalog, lex, config.context_match_k
        ):
            lines.append(dumps(suggestion_record(suggestion)))
    await _emit(lines, args.output)
    print(dumps({"command": "suggest", "alerts": len(alerts), "suggestions": len(lines)}))
    return 0


async def run_validate(args: argparse.Namespace, config: Config, lex: Lexicon) -> int:
    with StoreLock(config.store_path):
        store = await load_store(config.store_path)
        changed = store.validate(args.deactivation_id, now(args.stable_output))
        if changed:
            await _save(store, config, args.stable_output)
    print(
        dumps(
            {"command": "validate", "id": args.deactivation_id, "changed": changed}
        )
    )
    return 0


async def run_report(args: argparse.Namespace, config: Config, lex: Lexicon) -> int:
    store = await load_store(config.store_path)
    catalog = await load_patterns(config.patterns_path, lex)
    docs = await _read_all(args.inputs) if args.inputs else None
    report = build_report(store, lex, catalog, config, docs)
    await _emit(report.to_lines(), args.output)
    print(
        dumps(
            {
                "command": "report",
                "alerts": report.alerts,
                "per_1000_lines": report.per_thousand_lines,
                "records": len(store.records),
            }
        )
    )
    return 0


COMMANDS = {
    "detect": run_detect,
    "learn": run_learn,
    "mine-correct": run_mine_correct,
    "induce": run_induce,
    "suggest": run_suggest,
    "validate": run_validate,
    "report": run_report,
}


async def run(args: argparse.Namespace) -> int:
    try:
        config, lex = await _resources(args)
        return await COMMANDS[args.command](args, config, lex)
    except (FuzzyMemoryError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzy-memory-py",
        description="Detect fuzzy lexical items and learn from their corrections.",
    )
    parser.add_argument("--config", type=Path, help="key = value configuration file")
    parser.add_argument("--store", help="correction memory file")
    parser.add_argument("--lexicon", help="fuzzy lexicon TSV file")
    parser.add_argument("--patterns", help="extra correction patterns file")
    parser.add_argument(
        "--stable-output",
        action="store_true",
        help="pin every timestamp so repeated runs produce identical files",
    )
    parser.add_argument("--min-severity", type=int, choices=(1, 2, 3))
    parser.add_argument("-v", "--verbose", action="count", default=0)

    commands = parser.add_subparsers(dest="command", required=True)

    detect_cmd = commands.add_parser("detect", help="report fuzzy items in documents")
    detect_cmd.add_argument("inputs", nargs="+")
    detect_cmd.add_argument(
        "--output-dir", help="write annotated documents and alerts.jsonl here"
    )

    learn_cmd = commands.add_parser("learn", help="record a writer's corrections")
    learn_cmd.add_argument("original")
    learn_cmd.add_argument("corrected")
    learn_cmd.add_argument("--writer", help="id of the writer who made the corrections")

    mine_cmd = commands.add_parser(
        "mine-correct", help="index quantity expressions of already correct text"
    )
    mine_cmd.add_argument("corpus", nargs="+")

    commands.add_parser("induce", help="rebuild deactivations and recommendations")

    suggest_cmd = commands.add_parser("suggest", help="propose corrections for a document")
    suggest_cmd.add_argument("input")
    suggest_cmd.add_argument("--output")

    validate_cmd = commands.add_parser("validate", help="confirm an induced deactivation")
    validate_cmd.add_argument("deactivation_id")

    report_cmd = commands.add_parser("report", help="summarise the correction memory")
    report_cmd.add_argument("inputs", nargs="*")
    report_cmd.add_argument("--output")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def main(argv: Optional[List[str]] = None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        sys.exit(asyncio.run(run(args)))
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        sys.exit(2)
