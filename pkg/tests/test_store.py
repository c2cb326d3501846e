"""Filesystem store: layout, idempotent ingest, level handling."""

import json

import pytest

from pidgraph import graph_equal
from pidgraph.store import LEVELS, ModelRecord, ModelStore, content_id

from helpers import CONTROL_LOOP, STRAIGHT_LINE


@pytest.fixture
def store(tmp_path):
    return ModelStore(str(tmp_path / "store"))


def test_ingest_writes_all_artifacts(store):
    record, report = store.ingest(STRAIGHT_LINE, "line")
    model_dir = store.models_dir / record.model_id
    for filename in ("source.xml", "complete.graphml", "high.graphml", "report.json", "meta.json"):
        assert (model_dir / filename).is_file(), filename
    # no temp files left behind
    assert not list(model_dir.glob("*.tmp"))
    assert (model_dir / "source.xml").read_text(encoding="utf-8") == STRAIGHT_LINE
    assert report["nodesBefore"] == record.nodes["complete"]


def test_model_id_is_content_hash(store):
    record, _ = store.ingest(STRAIGHT_LINE, "line")
    assert record.model_id == content_id(STRAIGHT_LINE)
    assert len(record.model_id) == 16
    # same content, same id; different content, different id
    again, _ = store.ingest(STRAIGHT_LINE, "renamed")
    assert again.model_id == record.model_id
    other, _ = store.ingest(CONTROL_LOOP, "loop")
    assert other.model_id != record.model_id


def test_reingest_is_idempotent(store):
    first, _ = store.ingest(STRAIGHT_LINE, "line")
    second, _ = store.ingest(STRAIGHT_LINE, "line")
    assert first.model_id == second.model_id
    assert len(store.list_models()) == 1
    assert graph_equal(
        store.get_graph(first.model_id, "complete"),
        store.get_graph(second.model_id, "complete"),
    )


def test_record_counts_match_graphs(store):
    record, _ = store.ingest(STRAIGHT_LINE, "line")
    for level in LEVELS:
        graph = store.get_graph(record.model_id, level)
        assert graph.node_count() == record.nodes[level]
        assert graph.edge_count() == record.edges[level]
        assert record.tokens[level] > 0
    assert record.nodes["high"] <= record.nodes["complete"]


def test_record_roundtrip_camel_case(store):
    record, _ = store.ingest(STRAIGHT_LINE, "line")
    data = record.to_dict()
    assert set(data) == {"modelId", "name", "created", "nodes", "edges", "tokens"}
    assert ModelRecord.from_dict(data) == record


def test_list_models_sorted(store):
    store.ingest(STRAIGHT_LINE, "line")
    store.ingest(CONTROL_LOOP, "loop")
    records = store.list_models()
    assert len(records) == 2
    assert [r.model_id for r in records] == sorted(r.model_id for r in records)


def test_get_graphml_validates_level(store):
    record, _ = store.ingest(STRAIGHT_LINE, "line")
    with pytest.raises(ValueError):
        store.get_graphml(record.model_id, "medium")
    assert store.get_graphml("no-such-model", "high") is None
    assert store.get_record("no-such-model") is None
    assert store.get_report("no-such-model") is None
    assert store.get_graph("no-such-model", "complete") is None


def test_report_persisted(store):
    record, report = store.ingest(STRAIGHT_LINE, "line")
    loaded = store.get_report(record.model_id)
    assert loaded == report
    assert loaded["nodesAfter"] <= loaded["nodesBefore"]
    assert [s["step"] for s in loaded["steps"]] == [
        "prune_structural", "collapse_chains", "strip_properties",
    ]


def test_sessions_save_load_list(store):
    assert store.load_session("missing") is None
    payload = {"sessionId": "s-1", "systemPrompt": "p", "tokenBudget": 1000, "history": []}
    store.save_session("s-1", payload)
    store.save_session("s-0", dict(payload, sessionId="s-0"))
    assert store.load_session("s-1") == payload
    assert store.list_sessions() == ["s-0", "s-1"]
    assert not list(store.sessions_dir.glob("*.tmp"))


def test_store_reopens_from_disk(tmp_path):
    root = str(tmp_path / "store")
    record, _ = ModelStore(root).ingest(STRAIGHT_LINE, "line")
    reopened = ModelStore(root)
    assert reopened.get_record(record.model_id) == record
    assert reopened.get_graph(record.model_id, "high") is not None
