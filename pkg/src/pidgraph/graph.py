"""Labeled property graph built from a parsed plant model.

Nodes carry multi-tier labels (package, taxonomy tiers, class) and
key-value properties; edges carry a type from a closed vocabulary:

    has_<ClassName>     parent -> subcomponent (domain hierarchy)
    is_located_in       item -> enclosing plant area
    send_to             material flow, directed with the flow
    measured_by         measured item -> measuring function
    send_signal_to      measuring/processing function -> next function
    control             actuating function -> actuated item
    is_logical_end_of   off-page connector -> the function/line it terminates
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .model import Diagnostic, PidModel, PlantItem, Severity
from . import taxonomy

Scalar = Union[str, int, float, bool]

FIXED_EDGE_TYPES = (
    "is_located_in",
    "send_to",
    "control",
    "send_signal_to",
    "is_logical_end_of",
    "measured_by",
)


class GraphBuildError(Exception):
    """Raised in strict mode when the model references a missing item."""


@dataclass
class GraphNode:
    id: str
    labels: List[str] = field(default_factory=list)
    properties: Dict[str, Scalar] = field(default_factory=dict)


@dataclass
class GraphEdge:
    source: str
    target: str
    type: str
    properties: Dict[str, Scalar] = field(default_factory=dict)

    def key(self) -> Tuple:
        return (self.source, self.target, self.type, tuple(sorted(self.properties.items(), key=lambda kv: kv[0])))


@dataclass
class PropertyGraph:
    nodes: Dict[str, GraphNode] = field(default_factory=dict)
    edges: List[GraphEdge] = field(default_factory=list)

    def node_count(self) -> int:
        return len(self.nodes)

    def edge_count(self) -> int:
        return len(self.edges)

    def edges_of_type(self, edge_type: str) -> List[GraphEdge]:
        return [e for e in self.edges if e.type == edge_type]

    def out_edges(self, node_id: str, edge_type: Optional[str] = None) -> List[GraphEdge]:
        return [e for e in self.edges if e.source == node_id and (edge_type is None or e.type == edge_type)]

    def in_edges(self, node_id: str, edge_type: Optional[str] = None) -> List[GraphEdge]:
        return [e for e in self.edges if e.target == node_id and (edge_type is None or e.type == edge_type)]

    def copy(self) -> "PropertyGraph":
        return PropertyGraph(
            nodes={
                nid: GraphNode(n.id, list(n.labels), dict(n.properties))
                for nid, n in self.nodes.items()
            },
            edges=[GraphEdge(e.source, e.target, e.type, dict(e.properties)) for e in self.edges],
        )


def is_valid_edge_type(edge_type: str) -> bool:
    return edge_type in FIXED_EDGE_TYPES or edge_type.startswith("has_")


def graph_equal(a: PropertyGraph, b: PropertyGraph) -> bool:
    """Structural equality, insensitive to edge ordering."""
    if set(a.nodes) != set(b.nodes):
        return False
    for nid, node in a.nodes.items():
        other = b.nodes[nid]
        if node.labels != other.labels or node.properties != other.properties:
            return False
    return sorted(e.key() for e in a.edges) == sorted(e.key() for e in b.edges)


def derive_labels(item: PlantItem, table=taxonomy) -> List[str]:
    """Label list for an item: [package, taxonomy tiers..., lowerCamel class]."""
    return table.labels_for(item.class_name, item.package)


_KEY_SPLIT = re.compile(r"[^0-9A-Za-z]+")


def normalize_key(name: str) -> str:
    """DEXPI attribute name -> lowerCamelCase property key."""
    parts = [p for p in _KEY_SPLIT.split(name) if p]
    if not parts:
        return name
    head = parts[0][0].lower() + parts[0][1:]
    return head + "".join(p[0].upper() + p[1:] for p in parts[1:])


def _parse_scalar(value: str) -> Scalar:
    text = value.strip()
    if not text:
        return value
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return value


def _node_from_item(item: PlantItem) -> GraphNode:
    properties: Dict[str, Scalar] = {"className": item.class_name}
    if item.tag:
        properties["tagName"] = item.tag
    for name, attr in item.attributes.items():
        key = normalize_key(name)
        if key in ("className", "tagName"):
            continue
        properties[key] = _parse_scalar(attr.value)
        if attr.units:
            properties[key + "Units"] = attr.units
    return GraphNode(id=item.id, labels=derive_labels(item), properties=properties)


def build_graph(model: PidModel, strict: bool = False) -> PropertyGraph:
    """Build the complete labeled property graph for a plant model.

    One node per PlantItem; domain edges from the item hierarchy; lexical
    edges from piping and signal connectivity. In strict mode an
    unresolved reference raises GraphBuildError, otherwise the edge is
    skipped (lexical_edges reports it as a diagnostic).
    """
    graph = PropertyGraph()
    for item_id in sorted(model.items):
        graph.nodes[item_id] = _node_from_item(model.items[item_id])

    # domain hierarchy
    for item_id in sorted(model.items):
        item = model.items[item_id]
        parent_labels = graph.nodes[item_id].labels
        area_parent = "plantStructure" in parent_labels
        for child_id in item.children:
            if child_id not in model.items:
                if strict:
                    raise GraphBuildError(f"unresolved reference {child_id}")
                continue
            child = model.items[child_id]
            if area_parent:
                graph.edges.append(GraphEdge(child_id, item_id, "is_located_in"))
            else:
                graph.edges.append(GraphEdge(item_id, child_id, f"has_{child.class_name}"))

    lexical, diagnostics = lexical_edges(model)
    if strict:
        for diag in diagnostics:
            if diag.severity == Severity.ERROR:
                raise GraphBuildError(str(diag))
    graph.edges.extend(lexical)
    return graph


def lexical_edges(model: PidModel) -> Tuple[List[GraphEdge], List[Diagnostic]]:
    """Interaction edges: material flow, measurement, signal, control, logical ends.

    Material flow follows the model's piping connections. When flow
    attaches to an equipment port (nozzle), internal hops connect the
    port to its owning equipment so the flow path runs through the
    equipment node itself.
    """
    edges: List[GraphEdge] = []
    diagnostics: List[Diagnostic] = []

    parent_of: Dict[str, str] = {}
    for item in model.items.values():
        for child in item.children:
            parent_of[child] = item.id

    seen: set = set()

    def add(source: str, target: str, edge_type: str) -> None:
        key = (source, target, edge_type)
        if key not in seen:
            seen.add(key)
            edges.append(GraphEdge(source, target, edge_type))

    def equipment_hop(port_id: str, incoming: bool) -> None:
        item = model.items.get(port_id)
        parent_id = parent_of.get(port_id)
        if item is None or parent_id is None:
            return
        parent = model.items.get(parent_id)
        if parent is None or item.package != "equipment" or parent.package != "equipment":
            return
        if incoming:
            add(port_id, parent_id, "send_to")
        else:
            add(parent_id, port_id, "send_to")

    for conn in model.piping_connections:
        if conn.from_item not in model.items or conn.to_item not in model.items:
            missing = conn.from_item if conn.from_item not in model.items else conn.to_item
            diagnostics.append(Diagnostic(Severity.ERROR, missing, f"unresolved reference {missing} in piping connection"))
            continue
        add(conn.from_item, conn.to_item, "send_to")
        equipment_hop(conn.from_item, incoming=False)
        equipment_hop(conn.to_item, incoming=True)

    for sig in model.signal_connections:
        source = model.items.get(sig.source)
        target = model.items.get(sig.target)
        if source is None or target is None:
            missing = sig.source if source is None else sig.target
            diagnostics.append(Diagnostic(Severity.ERROR, missing, f"unresolved reference {missing} in signal connection"))
            continue
        if sig.kind == "measurement":
            add(sig.source, sig.target, "measured_by")
        elif sig.kind == "signal":
            add(sig.source, sig.target, "send_signal_to")
        elif sig.kind == "actuation":
            add(sig.source, sig.target, "control")
        elif sig.kind == "logical_end":
            # the off-page connector is the logical end of the function/line
            src_labels = derive_labels(source)
            if "offPageConnector" in src_labels:
                add(sig.source, sig.target, "is_logical_end_of")
            else:
                add(sig.target, sig.source, "is_logical_end_of")
        else:
            diagnostics.append(
                Diagnostic(Severity.WARNING, sig.source, f"signal connection {sig.source} -> {sig.target} of unknown kind, edge skipped")
            )

    return edges, diagnostics
