"""On-disk store for ingested models, their graphs, and chat sessions.

Layout under the store root:

    models/<model_id>/source.xml        raw uploaded document
    models/<model_id>/complete.graphml  full graph
    models/<model_id>/high.graphml      condensed graph
    models/<model_id>/report.json       condensation report
    models/<model_id>/meta.json         ModelRecord
    sessions/<session_id>.json          chat session snapshots

Every write goes to a temp file in the same directory and is renamed
into place, so a crash can never leave a half-written artifact.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .condense import CondensationPolicy, condense
from .graph import PropertyGraph, build_graph
from .graphio import estimate_tokens, export_graphml, import_graphml
from .parser import parse_dexpi

logger = logging.getLogger(__name__)

LEVELS = ("complete", "high")


@dataclass
class ModelRecord:
    """Summary of one ingested model."""

    model_id: str
    name: str
    created: float
    nodes: Dict[str, int]
    edges: Dict[str, int]
    tokens: Dict[str, int]

    def to_dict(self) -> dict:
        return {
            "modelId": self.model_id,
            "name": self.name,
            "created": self.created,
            "nodes": dict(self.nodes),
            "edges": dict(self.edges),
            "tokens": dict(self.tokens),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelRecord":
        return cls(
            model_id=data["modelId"],
            name=data["name"],
            created=data["created"],
            nodes=dict(data["nodes"]),
            edges=dict(data["edges"]),
            tokens=dict(data["tokens"]),
        )


def content_id(content: str) -> str:
    """Stable model id: prefix of the document content hash."""
    return hashlib.sha256(content.encode("utf-8")).hexdigest()[:16]


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


class ModelStore:
    """Filesystem-backed store; one directory per model."""

    def __init__(self, root: str):
        self.root = Path(root)
        self.models_dir = self.root / "models"
        self.sessions_dir = self.root / "sessions"
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self.sessions_dir.mkdir(parents=True, exist_ok=True)

    # -- models ------------------------------------------------------

    def ingest(
        self,
        content: str,
        name: str,
        policy: Optional[CondensationPolicy] = None,
    ) -> Tuple[ModelRecord, dict]:
        """Parse, build, condense, and persist a document.

        Returns the record and the condensation report dict. Re-ingesting
        identical content is idempotent (same id, artifacts rewritten).
        """
        model_id = content_id(content)
        model = parse_dexpi(content)
        complete = build_graph(model)
        condensed, report = condense(complete, policy)

        complete_xml = export_graphml(complete)
        condensed_xml = export_graphml(condensed)
        record = ModelRecord(
            model_id=model_id,
            name=name,
            created=time.time(),
            nodes={"complete": complete.node_count(), "high": condensed.node_count()},
            edges={"complete": complete.edge_count(), "high": condensed.edge_count()},
            tokens={
                "complete": estimate_tokens(complete_xml).token_count,
                "high": estimate_tokens(condensed_xml).token_count,
            },
        )

        target = self.models_dir / model_id
        target.mkdir(parents=True, exist_ok=True)
        _write_atomic(target / "source.xml", content)
        _write_atomic(target / "complete.graphml", complete_xml)
        _write_atomic(target / "high.graphml", condensed_xml)
        report_dict = report.to_dict()
        _write_atomic(target / "report.json", json.dumps(report_dict, indent=2, sort_keys=True))
        _write_atomic(target / "meta.json", json.dumps(record.to_dict(), indent=2, sort_keys=True))
        logger.info("ingested model %s (%s)", model_id, name)
        return record, report_dict

    def list_models(self) -> List[ModelRecord]:
        records = []
        for meta in sorted(self.models_dir.glob("*/meta.json")):
            records.append(ModelRecord.from_dict(json.loads(meta.read_text(encoding="utf-8"))))
        return records

    def get_record(self, model_id: str) -> Optional[ModelRecord]:
        meta = self.models_dir / model_id / "meta.json"
        if not meta.is_file():
            return None
        return ModelRecord.from_dict(json.loads(meta.read_text(encoding="utf-8")))

    def get_graphml(self, model_id: str, level: str) -> Optional[str]:
        if level not in LEVELS:
            raise ValueError(f"unknown graph level {level!r} (expected one of {LEVELS})")
        path = self.models_dir / model_id / f"{level}.graphml"
        if not path.is_file():
            return None
        return path.read_text(encoding="utf-8")

    def get_graph(self, model_id: str, level: str) -> Optional[PropertyGraph]:
        text = self.get_graphml(model_id, level)
        if text is None:
            return None
        return import_graphml(text)

    def get_report(self, model_id: str) -> Optional[dict]:
        path = self.models_dir / model_id / "report.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    # -- sessions ----------------------------------------------------

    def save_session(self, session_id: str, payload: dict) -> None:
        _write_atomic(
            self.sessions_dir / f"{session_id}.json",
            json.dumps(payload, indent=2, sort_keys=True),
        )

    def load_session(self, session_id: str) -> Optional[dict]:
        path = self.sessions_dir / f"{session_id}.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def list_sessions(self) -> List[str]:
        return sorted(p.stem for p in self.sessions_dir.glob("*.json"))
