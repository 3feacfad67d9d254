from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .config import Config
from .detector import detect
from .lexicon import Lexicon
from .models import Alert, Deactivation, Document, FuzzyItem
from .patterns import Catalog, PatternMatcher, follow_template
from .store import MemoryStore
from .textmodel import sentence_from_surfaces
from .utils import dumps

CASES = (1, 2, 3, 4, 5)


@dataclass
class Report:
    item_counts: Dict[str, int] = field(default_factory=dict)
    alerts: int = 0
    lines: int = 0
    per_thousand_lines: Optional[float] = None
    case_counts: Dict[int, int] = field(default_factory=dict)
    case_percent: Dict[int, float] = field(default_factory=dict)
    rule_counts: Dict[str, int] = field(default_factory=dict)
    deactivations: List[Deactivation] = field(default_factory=list)
    recommendations: List[Dict[str, Any]] = field(default_factory=list)
    acceptance: Dict[str, int] = field(default_factory=dict)
    demotions: List[Tuple[FuzzyItem, int, float]] = field(default_factory=list)

    def to_lines(self) -> List[str]:
        lines = [
            dumps(
                {
                    "section": "summary",
                    "alerts": self.alerts,
                    "lines": self.lines,
                    "per_1000_lines": self.per_thousand_lines,
                }
            ),
            dumps({"section": "items", "counts": self.item_counts}),
            dumps(
                {
                    "section": "cases",
                    "counts": {str(c): n for c, n in self.case_counts.items()},
                    "percent": {str(c): p for c, p in self.case_percent.items()},
                }
            ),
            dumps({"section": "rules", "counts": self.rule_counts}),
        ]
        for entry in self.deactivations:
            lines.append(
                dumps(
                    {
                        "section": "deactivation",
                        "id": entry.id,
                        "item": entry.item_lemma,
                        "head": entry.context.head if entry.context else None,
                        "support": entry.support,
                        "validated": entry.validated,
                    }
                )
            )
        for row in self.recommendations:
            lines.append(dumps({"section": "recommendation", **row}))
        lines.append(dumps({"section": "acceptance", "counts": self.acceptance}))
        for item, suggested, rate in self.demotions:
            lines.append(
                dumps(
                    {
                        "section": "demotion",
                        "item": item.lemma,
                        "severity": item.severity,
                        "suggested": suggested,
                        "uncorrected_rate": rate,
                    }
                )
            )
        return lines


def per_thousand(alerts: int, lines: int) -> float:
    return round(1000 * alerts / lines, 1) if lines else 0.0


def case_distribution(cases: Iterable[int]) -> Tuple[Dict[int, int], Dict[int, float]]:
    counts = Counter(cases)
    total = sum(counts.values())
    ordered = {case: counts.get(case, 0) for case in CASES}
    percent = {
        case: round(100 * n / total, 1) if total else 0.0 for case, n in ordered.items()
    }
    return ordered, percent


def acceptance_counts(store: MemoryStore, catalog: Catalog, lex: Lexicon) -> Dict[str, int]:
    """Per pattern, corrections that follow its rewrite word for word."""
    matcher = PatternMatcher(lex)
    counts: Counter = Counter()
    for record in store.records:
        if record.case not in (2, 3, 4) or record.corrected is None:
            continue
        span = record.original.region("fuzzy")
        if span is None:
            continue
        original = record.original.tokens()
        corrected = record.corrected.tokens()
        sentence = sentence_from_surfaces(original)
        for pattern in catalog.applicable(record.item_lemma, record.category):
            binding = matcher.match_span(
                pattern, sentence, span, record.item_lemma, record.category
            )
            if binding and follow_template(pattern, binding, original, corrected, lex) is not None:
                counts[pattern.id] += 1
    return dict(sorted(counts.items()))


def top_recommendations(store: MemoryStore, limit: int = 3) -> List[Dict[str, Any]]:
    classes = {cls.id: cls for cls in store.classes}
    rows = []
    for (pattern_id, class_id), slots in sorted(store.recommendations.items()):
        cls = classes.get(class_id)
        for slot, fillers in slots.items():
            rows.append(
                {
                    "pattern": pattern_id,
                    "class": class_id,
                    "item": cls.item_lemma if cls else None,
                    "head": cls.head if cls else None,
                    "slot": slot,
                    "fillers": [[f.text, f.frequency] for f in fillers[:limit]],
                }
            )
    return rows


def build_report(
    store: MemoryStore,
    lex: Lexicon,
    catalog: Catalog,
    config: Optional[Config] = None,
    docs: Optional[List[Document]] = None,
) -> Report:
    """
    Summarises the memory. With `docs`, alert counts and the alerts per 1000
    lines figure come from detecting over them; otherwise from the records.
    """
    config = config or Config()
    report = Report()

    if docs is not None:
        alerts: List[Alert] = []
        for doc in docs:
            alerts.extend(
                detect(
                    doc,
                    lex,
                    store.deactivations,
                    config.context_match_k,
                    config.context_size,
                )
            )
        report.alerts = len(alerts)
        report.lines = sum(doc.line_count for doc in docs)
        report.per_thousand_lines = per_thousand(report.alerts, report.lines)
        report.item_counts = dict(sorted(Counter(a.item.lemma for a in alerts).items()))
    else:
        report.alerts = len(store.records)
        report.item_counts = dict(
            sorted(Counter(r.item_lemma for r in store.records).items())
        )

    report.case_counts, report.case_percent = case_distribution(
        r.case for r in store.records
    )
    report.rule_counts = dict(sorted(Counter(r.rule for r in store.records).items()))
    report.deactivations = list(store.deactivations.entries)
    report.recommendations = top_recommendations(store)
    report.acceptance = acceptance_counts(store, catalog, lex)
    report.demotions = lex.suggest_demotions(
        store.records, min_records=config.deactivation_threshold
    )
    return report
