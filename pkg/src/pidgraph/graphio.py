"""Graph serialization and token estimation.

GraphML is the wire format handed to the LLM as context; JSON is the
parallel format consumed by the browser UI. Export is deterministic:
equal graphs serialize to byte-identical text (sorted node ids, sorted
key declarations, stable edge order), which makes round-trip and
equality checks exact.

GraphML has no multi-label concept, so node labels are joined with ";"
under a single "labels" key; edge types live under a "type" key. A
property key used with several scalar types gets one <key> declaration
per type, the GraphML-standard way to keep typing lossless.
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple
from xml.sax.saxutils import escape

from .graph import GraphEdge, GraphNode, PropertyGraph, Scalar

LABEL_SEPARATOR = ";"


class GraphMLExportError(Exception):
    pass


class GraphMLImportError(Exception):
    pass


def _type_name(value: Scalar) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "long"
    if isinstance(value, float):
        return "double"
    if isinstance(value, str):
        return "string"
    raise TypeError(type(value).__name__)


def _format_value(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export_graphml(graph: PropertyGraph) -> str:
    """Serialize a graph to deterministic GraphML text."""
    node_keys: List[Tuple[str, str]] = [("labels", "string")]
    edge_keys: List[Tuple[str, str]] = [("type", "string")]
    node_seen = {("labels", "string")}
    edge_seen = {("type", "string")}

    def collect(owner: str, properties: Dict[str, Scalar], seen: set, keys: List[Tuple[str, str]], reserved: str) -> None:
        for key in sorted(properties):
            value = properties[key]
            if key == reserved:
                raise GraphMLExportError(f"{owner}: property key {key!r} collides with the reserved GraphML key")
            try:
                pair = (key, _type_name(value))
            except TypeError as exc:
                raise GraphMLExportError(f"{owner}: property {key!r} has unsupported value type {exc}") from None
            if pair not in seen:
                seen.add(pair)
                keys.append(pair)

    for node_id in sorted(graph.nodes):
        collect(f"node {node_id}", graph.nodes[node_id].properties, node_seen, node_keys, "labels")
    for edge in graph.edges:
        collect(f"edge {edge.source}->{edge.target}", edge.properties, edge_seen, edge_keys, "type")

    node_keys = [node_keys[0]] + sorted(node_keys[1:])
    edge_keys = [edge_keys[0]] + sorted(edge_keys[1:])

    key_ids: Dict[Tuple[str, str, str], str] = {}
    lines: List[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
    ]
    counter = 0
    for domain, keys in (("node", node_keys), ("edge", edge_keys)):
        for name, type_name in keys:
            key_id = f"k{counter}"
            counter += 1
            key_ids[(domain, name, type_name)] = key_id
            lines.append(
                f'  <key id="{key_id}" for="{domain}" attr.name="{_attr_escape(name)}" attr.type="{type_name}"/>'
            )

    lines.append('  <graph id="G" edgedefault="directed">')

    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        labels_id = key_ids[("node", "labels", "string")]
        lines.append(f'    <node id="{_attr_escape(node_id)}">')
        lines.append(f'      <data key="{labels_id}">{escape(LABEL_SEPARATOR.join(node.labels))}</data>')
        for key in sorted(node.properties):
            value = node.properties[key]
            data_id = key_ids[("node", key, _type_name(value))]
            lines.append(f'      <data key="{data_id}">{escape(_format_value(value))}</data>')
        lines.append("    </node>")

    def edge_sort_key(edge: GraphEdge):
        return (edge.source, edge.target, edge.type, tuple(sorted(edge.properties.items())))

    type_id = key_ids[("edge", "type", "string")]
    for edge in sorted(graph.edges, key=edge_sort_key):
        lines.append(f'    <edge source="{_attr_escape(edge.source)}" target="{_attr_escape(edge.target)}">')
        lines.append(f'      <data key="{type_id}">{escape(edge.type)}</data>')
        for key in sorted(edge.properties):
            value = edge.properties[key]
            data_id = key_ids[("edge", key, _type_name(value))]
            lines.append(f'      <data key="{data_id}">{escape(_format_value(value))}</data>')
        lines.append("    </edge>")

    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def _attr_escape(value: str) -> str:
    return escape(str(value), {'"': "&quot;"})


def _parse_typed(value: str, type_name: str) -> Scalar:
    if type_name == "boolean":
        return value == "true"
    if type_name in ("int", "long"):
        return int(value)
    if type_name in ("float", "double"):
        return float(value)
    return value


def import_graphml(text: str) -> PropertyGraph:
    """Parse GraphML text (as produced by export_graphml, or compatible)."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise GraphMLImportError(f"malformed GraphML: {exc}") from None

    def local(tag: str) -> str:
        return tag.rsplit("}", 1)[-1] if "}" in tag else tag

    if local(root.tag) != "graphml":
        raise GraphMLImportError(f"root element is <{local(root.tag)}>, not <graphml>")

    keys: Dict[str, Tuple[str, str, str]] = {}
    for elem in root:
        if local(elem.tag) == "key":
            key_id = elem.get("id", "")
            keys[key_id] = (
                elem.get("for", "all"),
                elem.get("attr.name", key_id),
                elem.get("attr.type", "string"),
            )

    graph = PropertyGraph()
    for graph_elem in root:
        if local(graph_elem.tag) != "graph":
            continue
        for elem in graph_elem:
            name = local(elem.tag)
            if name == "node":
                node = GraphNode(id=elem.get("id", ""))
                for data in elem:
                    if local(data.tag) != "data":
                        continue
                    ref = data.get("key", "")
                    if ref not in keys:
                        raise GraphMLImportError(f"unknown key reference {ref!r} on node {node.id}")
                    _, attr_name, attr_type = keys[ref]
                    value = data.text or ""
                    if attr_name == "labels":
                        node.labels = value.split(LABEL_SEPARATOR) if value else []
                    else:
                        node.properties[attr_name] = _parse_typed(value, attr_type)
                graph.nodes[node.id] = node
            elif name == "edge":
                edge = GraphEdge(source=elem.get("source", ""), target=elem.get("target", ""), type="")
                for data in elem:
                    if local(data.tag) != "data":
                        continue
                    ref = data.get("key", "")
                    if ref not in keys:
                        raise GraphMLImportError(f"unknown key reference {ref!r} on edge {edge.source}->{edge.target}")
                    _, attr_name, attr_type = keys[ref]
                    value = data.text or ""
                    if attr_name == "type":
                        edge.type = value
                    else:
                        edge.properties[attr_name] = _parse_typed(value, attr_type)
                graph.edges.append(edge)
    return graph


# ---------------------------------------------------------------------------
# JSON graph format (UI wire format)


def export_json(graph: PropertyGraph, indent: Optional[int] = None) -> str:
    """JSON form: {"nodes":[{id,labels,properties}],"edges":[...]}, sorted keys."""
    payload = {
        "nodes": [
            {
                "id": node_id,
                "labels": graph.nodes[node_id].labels,
                "properties": graph.nodes[node_id].properties,
            }
            for node_id in sorted(graph.nodes)
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "type": e.type,
                "properties": e.properties,
            }
            for e in sorted(graph.edges, key=lambda e: (e.source, e.target, e.type, tuple(sorted(e.properties.items()))))
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=indent)


def import_json(text: str) -> PropertyGraph:
    data = json.loads(text)
    graph = PropertyGraph()
    for node in data.get("nodes", []):
        graph.nodes[node["id"]] = GraphNode(
            id=node["id"], labels=list(node.get("labels", [])), properties=dict(node.get("properties", {}))
        )
    for edge in data.get("edges", []):
        graph.edges.append(
            GraphEdge(
                source=edge["source"],
                target=edge["target"],
                type=edge.get("type", ""),
                properties=dict(edge.get("properties", {})),
            )
        )
    return graph


def load_graph(text: str) -> PropertyGraph:
    """Sniff GraphML vs JSON graph content and import accordingly."""
    stripped = text.lstrip()
    if stripped.startswith("<"):
        return import_graphml(text)
    return import_json(text)


# ---------------------------------------------------------------------------
# token estimation


@dataclass(frozen=True)
class TokenEstimate:
    char_count: int
    token_count: int
    method: str  # "heuristic" | "exact-tokenizer"


_TOKENIZERS: Dict[str, Callable[[str], int]] = {}

HEURISTIC_CHARS_PER_TOKEN = 4


def register_tokenizer(name: str, fn: Callable[[str], int]) -> None:
    """Plug in an exact tokenizer (text -> token count) under a name."""
    _TOKENIZERS[name] = fn


def estimate_tokens(text: str, tokenizer: Optional[str] = None) -> TokenEstimate:
    """Token estimate for text: ceil(chars/4) by default, exact when a
    registered tokenizer name is given."""
    if tokenizer is not None:
        if tokenizer not in _TOKENIZERS:
            raise KeyError(f"no tokenizer registered under {tokenizer!r}")
        return TokenEstimate(len(text), _TOKENIZERS[tokenizer](text), "exact-tokenizer")
    return TokenEstimate(len(text), math.ceil(len(text) / HEURISTIC_CHARS_PER_TOKEN), "heuristic")
