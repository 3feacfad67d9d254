import json

from fuzzy_memory.config import Config
from fuzzy_memory.memory import induce, learn
from fuzzy_memory.report import acceptance_counts, build_report, case_distribution, per_thousand
from fuzzy_memory.textmodel import make_document


def test_per_thousand():
    assert per_thousand(33, 500) == 66.0
    assert per_thousand(1, 3) == 333.3
    assert per_thousand(0, 0) == 0.0


def test_case_distribution_lists_every_case():
    counts, percent = case_distribution([2, 2, 3, 1])
    assert counts == {1: 1, 2: 2, 3: 1, 4: 0, 5: 0}
    assert percent == {1: 25.0, 2: 50.0, 3: 25.0, 4: 0.0, 5: 0.0}
    assert case_distribution([]) == ({c: 0 for c in range(1, 6)}, {c: 0.0 for c in range(1, 6)})


def test_report_over_documents(lex, catalog, store):
    lines = ["Regularly inspect the valve."] * 33 + ["Close the valve."] * 467
    doc = make_document("\n".join(lines) + "\n", "manual")

    report = build_report(store, lex, catalog, docs=[doc])

    assert report.lines == 500
    assert report.alerts == 33
    assert report.per_thousand_lines == 66.0
    assert report.item_counts == {"regularly": 33}


def test_report_from_records(lex, catalog, store):
    learn(
        make_document("Take-off a few knots above V1.\nPark near the gate.\n"),
        make_document("Take-off less than 12 knots above V1.\nPark near the gate.\n"),
        "w1",
        lex,
        store,
    )
    report = build_report(store, lex, catalog)

    assert report.alerts == 2
    assert report.per_thousand_lines is None
    assert report.item_counts == {"a few": 1, "near": 1}
    assert report.case_counts[1] == 1
    assert report.case_counts[2] == 1
    assert report.rule_counts == {"unchanged": 1, "value-replacement": 1}
    assert report.acceptance == {"P-few": 1}


def test_acceptance_ignores_corrections_off_template(lex, catalog, store):
    learn(
        make_document("Progressively heat the probe."),
        make_document("Heat the probe progressively in 5 seconds."),
        "w1",
        lex,
        store,
    )
    assert store.records[0].case == 2
    assert acceptance_counts(store, catalog, lex) == {}


def test_report_lists_deactivations_and_demotions(lex, catalog, store):
    text = "\n".join(["Park near the gate."] * 5)
    learn(make_document(text), make_document(text), "w1", lex, store)
    induce(store, Config(), lex, catalog)

    report = build_report(store, lex, catalog)
    rows = [json.loads(line) for line in report.to_lines()]
    sections = [row["section"] for row in rows]

    assert sections[:4] == ["summary", "items", "cases", "rules"]
    (deactivation,) = [row for row in rows if row["section"] == "deactivation"]
    assert deactivation["item"] == "near"
    assert deactivation["head"] == "gate"
    assert deactivation["validated"] is False
    assert rows[2]["counts"] == {"1": 5, "2": 0, "3": 0, "4": 0, "5": 0}

    (demotion,) = [row for row in rows if row["section"] == "demotion"]
    assert demotion["item"] == "near"
    assert (demotion["severity"], demotion["suggested"]) == (3, 2)
    assert demotion["uncorrected_rate"] == 1.0


def test_report_shows_top_recommendations(lex, catalog, store):
    original = make_document("\n".join(["Progressively close the pipe."] * 4))
    corrected = make_document(
        "\n".join(["Progressively close the pipe in 30 seconds."] * 3 + ["Progressively close the pipe."])
    )
    learn(original, corrected, "w1", lex, store)
    induce(store, Config(), lex, catalog)

    (row,) = build_report(store, lex, catalog).recommendations
    assert (row["pattern"], row["item"], row["head"], row["slot"]) == (
        "P-prog",
        "progressively",
        "close",
        "time_interval",
    )
    assert row["fillers"] == [["30 seconds", 3]]
