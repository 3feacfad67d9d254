import json

import pytest

from fuzzy_memory.config import Config
from fuzzy_memory.errors import StoreError, StoreLockedError
from fuzzy_memory.memory import induce, learn, mine_correct
from fuzzy_memory.store import (
    MemoryStore,
    StoreLock,
    StoreParser,
    derived_path,
    load_store,
    save_store,
)
from fuzzy_memory.textmodel import make_document

EASY = "Install the sensor in a location that allows easy viewing during inspection."


@pytest.fixture
def populated(lex, catalog):
    store = MemoryStore()
    learn(
        make_document("\n".join([EASY] * 5)),
        make_document("\n".join([EASY] * 5)),
        "w1",
        lex,
        store,
        timestamp="1970-01-01T00:00:00Z",
    )
    learn(
        make_document("Progressively close the pipe.\nPark near the gate."),
        make_document(
            "Progressively close the pipe in 30 seconds.\n"
            "Park less than 100 meters from the gate."
        ),
        "w2",
        lex,
        store,
    )
    mine_correct([make_document("Close the pipe in 2 to 4 mns.")], lex, store)
    induce(store, Config(), lex, catalog)
    store.validate(store.deactivations.entries[0].id, "1970-01-01T00:00:00Z")
    return store


def test_render_parse_render_is_byte_identical(populated):
    parser = StoreParser()
    text = parser.render(populated)

    reparsed = parser.parse(text)

    assert parser.render(reparsed) == text
    assert reparsed.records == populated.records
    assert reparsed.realizations == populated.realizations
    assert reparsed.validations == populated.validations


def test_entries_are_ordered_by_sequence(populated):
    lines = StoreParser().render(populated).splitlines()
    assert json.loads(lines[0])["format"] == "fuzzy-memory-store"
    kinds = [json.loads(line)["type"] for line in lines[1:]]
    assert kinds == ["record"] * 7 + ["realization", "validation"]


async def test_save_and_load_round_trip(tmp_path, populated):
    path = tmp_path / "memory.jsonl"
    await save_store(populated, path)

    assert derived_path(path).exists()
    loaded = await load_store(path)

    parser = StoreParser()
    assert parser.render(loaded) == parser.render(populated)
    assert parser.render_derived(loaded) == parser.render_derived(populated)
    assert loaded.deactivations.entries[0].validated


async def test_missing_store_loads_empty(tmp_path):
    store = await load_store(tmp_path / "absent.jsonl")
    assert store == MemoryStore()


async def test_store_without_derived_file(tmp_path, populated):
    path = tmp_path / "memory.jsonl"
    await save_store(populated, path)
    derived_path(path).unlink()

    loaded = await load_store(path)
    assert len(loaded.records) == 7
    assert loaded.classes == []
    assert loaded.deactivations.entries == []


def test_bad_json_reports_line_number():
    parser = StoreParser()
    text = parser.render_header(MemoryStore()) + "\n{not json\n"
    with pytest.raises(StoreError, match="line 2"):
        parser.parse(text)


@pytest.mark.parametrize(
    "line, message",
    [
        ('{"format": "something-else", "version": 1}', "header on line 1"),
        ('["a list"]', "expected an object"),
    ],
)
def test_bad_header(line, message):
    with pytest.raises(StoreError, match=message):
        StoreParser().parse(line + "\n")


def test_unknown_entry_type():
    parser = StoreParser()
    text = parser.render_header(MemoryStore()) + '\n{"type": "comment"}\n'
    with pytest.raises(StoreError, match="unknown type 'comment'"):
        parser.parse(text)


def test_record_missing_field():
    parser = StoreParser()
    text = parser.render_header(MemoryStore()) + '\n{"type": "record", "id": "rec-000001"}\n'
    with pytest.raises(StoreError, match="line 2"):
        parser.parse(text)


def test_validate_unknown_id_raises(populated):
    with pytest.raises(StoreError, match="Unknown deactivation id"):
        populated.validate("deact-missing", "t")


def test_store_lock_is_exclusive(tmp_path):
    path = tmp_path / "memory.jsonl"
    with StoreLock(path):
        with pytest.raises(StoreLockedError):
            with StoreLock(path):
                pass
    # released on exit
    with StoreLock(path):
        pass
    assert not (tmp_path / "memory.jsonl.lock").exists()
