"""High-level graph condensation.

Reduces a complete P&ID knowledge graph to its process-relevant core in
three ordered steps:

    1. prune_structural  - fold equipment subcomponents into their parent
                           and remove structural connection nodes (nozzles,
                           pipes, flanges, ...), re-stitching material flow
                           so retained neighbors stay connected
    2. collapse_chains   - replace runs of property-empty flow-through
                           nodes with a single send_to edge
    3. strip_properties  - drop node properties outside the allowlist
                           (geometry, presentation, internal GUIDs)

Every re-stitched or collapsed edge records the class names it replaced
in its "via" property (";"-joined), so connectivity provenance survives
condensation. Nodes carrying a valve tier, an instrumentation-function
tier, or a tagName are never removed, nor is any endpoint of a
measurement/signal/control edge; this holds regardless of policy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .graph import GraphEdge, GraphNode, PropertyGraph

RETAINED_DEFAULT: FrozenSet[str] = frozenset(
    {
        "vessel",
        "pump",
        "compressor",
        "heatExchanger",
        "column",
        "valve",
        "safetyDevice",
        "instrumentationFunction",
        "offPageConnector",
        "plantStructure",
    }
)

PRUNABLE_DEFAULT: FrozenSet[str] = frozenset(
    {
        "nozzle",
        "pipe",
        "centerLine",
        "flange",
        "reducer",
        "propertyBreak",
        "pipingNode",
        "pipingNetwork",
        "pipeFlowArrow",
    }
)

PROPERTY_ALLOWLIST_DEFAULT: FrozenSet[str] = frozenset(
    {
        "tagName",
        "className",
        "nominalDiameter",
        "designPressure*",
        "designTemperature*",
        "power",
        "setPressure",
        "failAction",
        "description",
    }
)

# labels whose presence protects a node unconditionally (see module docstring)
_HARD_PROTECTED_LABELS = ("valve", "instrumentationFunction")
_PROTECTING_EDGE_TYPES = ("measured_by", "send_signal_to", "control", "is_logical_end_of")

VIA_SEPARATOR = ";"


class PolicyError(Exception):
    """Contradictory condensation policy (a label both retained and prunable)."""


@dataclass
class CondensationPolicy:
    """Which labels survive condensation and which properties are kept.

    Attributes:
        retained_labels: nodes carrying any of these labels are always kept.
        prunable_labels: structural labels removed in step 1 (unless the
            node also carries a retained label or is otherwise protected).
        property_allowlist: property keys kept by step 3. A trailing "*"
            makes an entry a prefix match (designPressure* covers
            designPressureMin/Max); "<key>Units" companions of kept keys
            and keys merged from folded children (e.g. nozzle1NominalDiameter)
            are kept as well.
    """

    retained_labels: Set[str] = field(default_factory=lambda: set(RETAINED_DEFAULT))
    prunable_labels: Set[str] = field(default_factory=lambda: set(PRUNABLE_DEFAULT))
    property_allowlist: Set[str] = field(default_factory=lambda: set(PROPERTY_ALLOWLIST_DEFAULT))

    def check(self) -> None:
        overlap = self.retained_labels & self.prunable_labels
        if overlap:
            raise PolicyError(f"labels both retained and prunable: {sorted(overlap)}")

    def to_dict(self) -> dict:
        return {
            "retainedLabels": sorted(self.retained_labels),
            "prunableLabels": sorted(self.prunable_labels),
            "propertyAllowlist": sorted(self.property_allowlist),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CondensationPolicy":
        policy = cls()
        if "retainedLabels" in data:
            policy.retained_labels = set(data["retainedLabels"])
        if "prunableLabels" in data:
            policy.prunable_labels = set(data["prunableLabels"])
        if "propertyAllowlist" in data:
            policy.property_allowlist = set(data["propertyAllowlist"])
        policy.check()
        return policy

    @classmethod
    def from_json(cls, text: str) -> "CondensationPolicy":
        return cls.from_dict(json.loads(text))

    # -- matching -------------------------------------------------------

    def is_retained(self, node: GraphNode) -> bool:
        return any(label in self.retained_labels for label in node.labels)

    def is_prunable(self, node: GraphNode) -> bool:
        return any(label in self.prunable_labels for label in node.labels)

    def keeps_property(self, key: str) -> bool:
        base = key[: -len("Units")] if key.endswith("Units") and len(key) > 5 else key
        for candidate in (key, base):
            for entry in self.property_allowlist:
                if _allow_match(candidate, entry):
                    return True
        return False


def _allow_match(key: str, entry: str) -> bool:
    star = entry.endswith("*")
    stem = entry[:-1] if star else entry
    if not stem:
        return False
    capitalized = stem[0].upper() + stem[1:]
    if star:
        return key.startswith(stem) or capitalized in key
    return key == stem or key.endswith(capitalized)


@dataclass
class StepCounts:
    step: str
    nodes: int
    edges: int


@dataclass
class CondensationReport:
    nodes_before: int
    nodes_after: int
    edges_before: int
    edges_after: int
    tokens_before: int
    tokens_after: int
    removals: Dict[str, List[str]] = field(default_factory=dict)
    steps: List[StepCounts] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "nodesBefore": self.nodes_before,
            "nodesAfter": self.nodes_after,
            "edgesBefore": self.edges_before,
            "edgesAfter": self.edges_after,
            "tokensBefore": self.tokens_before,
            "tokensAfter": self.tokens_after,
            "removals": {rule: sorted(ids) for rule, ids in self.removals.items()},
            "steps": [{"step": s.step, "nodes": s.nodes, "edges": s.edges} for s in self.steps],
        }


# ---------------------------------------------------------------------------
# protection


def _protected_ids(graph: PropertyGraph, policy: CondensationPolicy) -> Set[str]:
    """Nodes that must survive regardless of the prune/collapse rules."""
    protected: Set[str] = set()
    for node in graph.nodes.values():
        if policy.is_retained(node):
            protected.add(node.id)
            continue
        if "tagName" in node.properties:
            protected.add(node.id)
            continue
        if any(label in _HARD_PROTECTED_LABELS for label in node.labels):
            protected.add(node.id)
    for edge in graph.edges:
        if edge.type in _PROTECTING_EDGE_TYPES:
            protected.add(edge.source)
            protected.add(edge.target)
    return protected


def _via_list(edge: GraphEdge) -> List[str]:
    via = edge.properties.get("via")
    if not via:
        return []
    return str(via).split(VIA_SEPARATOR)


def _make_via(parts: List[str]) -> Dict[str, str]:
    return {"via": VIA_SEPARATOR.join(parts)} if parts else {}


def _node_class(node: GraphNode) -> str:
    name = node.properties.get("className")
    if isinstance(name, str) and name:
        return name
    return node.labels[-1] if node.labels else node.id


# ---------------------------------------------------------------------------
# step 1: prune structural nodes & fold subcomponents


def prune_structural(graph: PropertyGraph, policy: Optional[CondensationPolicy] = None) -> PropertyGraph:
    """Remove structural connection nodes and fold equipment subcomponents."""
    pruned, _, _ = _prune_structural_impl(graph, policy or CondensationPolicy())
    return pruned


def _prune_structural_impl(
    graph: PropertyGraph, policy: CondensationPolicy
) -> Tuple[PropertyGraph, List[str], List[str]]:
    policy.check()
    g = graph.copy()
    protected = _protected_ids(g, policy)

    folded = _fold_children(g, protected)
    pruned = _prune_connection_nodes(g, policy, protected)
    return g, folded, pruned


def _fold_children(g: PropertyGraph, protected: Set[str]) -> List[str]:
    """Merge non-protected has_* subtrees of protected nodes into the parent."""
    folded: List[str] = []
    for parent_id in sorted(g.nodes):
        if parent_id not in protected or parent_id not in g.nodes:
            continue
        # collect the whole non-protected subtree below this parent
        subtree: List[str] = []
        frontier = [parent_id]
        while frontier:
            current = frontier.pop()
            for edge in g.out_edges(current):
                if not edge.type.startswith("has_"):
                    continue
                child = edge.target
                if child in protected or child not in g.nodes or child in subtree:
                    continue
                subtree.append(child)
                frontier.append(child)
        if not subtree:
            continue

        prefix_counters: Dict[str, int] = {}
        for child_id in sorted(subtree):
            child = g.nodes[child_id]
            class_name = _node_class(child)
            prefix_base = class_name[0].lower() + class_name[1:] if class_name else "part"
            prefix_counters[prefix_base] = prefix_counters.get(prefix_base, 0) + 1
            prefix = f"{prefix_base}{prefix_counters[prefix_base]}"
            parent = g.nodes[parent_id]
            for key, value in child.properties.items():
                merged_key = prefix + key[0].upper() + key[1:]
                parent.properties.setdefault(merged_key, value)
            _remove_node_stitching(g, child_id, stitch_to=parent_id)
            folded.append(child_id)
    return folded


def _remove_node_stitching(g: PropertyGraph, node_id: str, stitch_to: str) -> None:
    """Remove node_id, redirecting its send_to edges onto stitch_to."""
    class_name = _node_class(g.nodes[node_id])
    new_edges: List[GraphEdge] = []
    seen = {e.key() for e in g.edges if e.source != node_id and e.target != node_id}
    for edge in g.edges:
        if edge.source != node_id and edge.target != node_id:
            new_edges.append(edge)
            continue
        if edge.type != "send_to":
            continue  # containment/signal edges of a folded node vanish with it
        if edge.source == node_id and edge.target == node_id:
            continue
        via = _via_list(edge)
        if edge.source == node_id:
            if edge.target == stitch_to:
                continue
            stitched = GraphEdge(stitch_to, edge.target, "send_to", _make_via([class_name] + via))
        else:
            if edge.source == stitch_to:
                continue
            stitched = GraphEdge(edge.source, stitch_to, "send_to", _make_via(via + [class_name]))
        if stitched.key() not in seen:
            seen.add(stitched.key())
            new_edges.append(stitched)
    g.edges = new_edges
    del g.nodes[node_id]


def _prune_connection_nodes(g: PropertyGraph, policy: CondensationPolicy, protected: Set[str]) -> List[str]:
    """Remove prunable nodes, cartesian-stitching flow across each removal.

    A node is only removed when the stitched edges do not outnumber the
    removed ones (in_degree * out_degree <= in_degree + out_degree), so
    the reduction stays monotone; dense hubs survive until earlier
    removals thin them out. Runs to fixpoint.
    """
    removed: List[str] = []
    while True:
        changed = False
        for node_id in sorted(g.nodes):
            if node_id in protected:
                continue
            node = g.nodes[node_id]
            if not policy.is_prunable(node) or policy.is_retained(node):
                continue
            ins = [e for e in g.edges if e.target == node_id and e.type == "send_to" and e.source != node_id]
            outs = [e for e in g.edges if e.source == node_id and e.type == "send_to" and e.target != node_id]
            if ins and outs and len(ins) * len(outs) > len(ins) + len(outs):
                continue
            _prune_one(g, node_id, ins, outs)
            removed.append(node_id)
            changed = True
        if not changed:
            return removed


def _prune_one(g: PropertyGraph, node_id: str, ins: List[GraphEdge], outs: List[GraphEdge]) -> None:
    class_name = _node_class(g.nodes[node_id])
    keep = [e for e in g.edges if e.source != node_id and e.target != node_id]
    seen = {e.key() for e in keep}
    for e_in in ins:
        for e_out in outs:
            via = _via_list(e_in) + [class_name] + _via_list(e_out)
            stitched = GraphEdge(e_in.source, e_out.target, "send_to", _make_via(via))
            if stitched.key() not in seen:
                seen.add(stitched.key())
                keep.append(stitched)
    g.edges = keep
    del g.nodes[node_id]


# ---------------------------------------------------------------------------
# step 2: collapse low-information chains


def collapse_chains(graph: PropertyGraph, policy: Optional[CondensationPolicy] = None) -> PropertyGraph:
    """Replace maximal runs of low-information flow-through nodes by one edge.

    A node is collapsible when it (a) carries no allowlisted property
    besides className, (b) has exactly one incoming and one outgoing
    send_to edge and no other incident edges, and (c) is not retained or
    otherwise protected. The replacement edge records the collapsed class
    names, in order, in its "via" property.
    """
    collapsed_graph, _ = _collapse_chains_impl(graph, policy or CondensationPolicy())
    return collapsed_graph


def _collapse_chains_impl(
    graph: PropertyGraph, policy: CondensationPolicy
) -> Tuple[PropertyGraph, List[str]]:
    policy.check()
    g = graph.copy()
    protected = _protected_ids(g, policy)

    def collapsible(node_id: str) -> bool:
        if node_id in protected:
            return False
        node = g.nodes[node_id]
        for key in node.properties:
            if key != "className" and policy.keeps_property(key):
                return False
        incident = [e for e in g.edges if e.source == node_id or e.target == node_id]
        ins = [e for e in incident if e.target == node_id and e.type == "send_to"]
        outs = [e for e in incident if e.source == node_id and e.type == "send_to"]
        if len(incident) != 2 or len(ins) != 1 or len(outs) != 1:
            return False
        return ins[0].source != node_id  # no self-loop

    removed: List[str] = []
    for start in sorted(graph.nodes):
        if start not in g.nodes or not collapsible(start):
            continue
        # expand to the maximal chain around start
        chain = [start]
        while True:
            pred = next(e.source for e in g.edges if e.target == chain[0] and e.type == "send_to")
            if pred in g.nodes and pred not in chain and collapsible(pred):
                chain.insert(0, pred)
            else:
                break
        while True:
            succ = next(e.target for e in g.edges if e.source == chain[-1] and e.type == "send_to")
            if succ in g.nodes and succ not in chain and collapsible(succ):
                chain.append(succ)
            else:
                break
        entry = next(e for e in g.edges if e.target == chain[0] and e.type == "send_to")
        exit_ = next(e for e in g.edges if e.source == chain[-1] and e.type == "send_to")
        if entry.source in chain or exit_.target in chain:
            continue  # pure cycle of collapsible nodes, nothing to anchor on

        via = _via_list(entry)
        for node_id in chain:
            via.append(_node_class(g.nodes[node_id]))
            out = next(e for e in g.edges if e.source == node_id and e.type == "send_to")
            via.extend(_via_list(out))

        chain_set = set(chain)
        g.edges = [e for e in g.edges if e.source not in chain_set and e.target not in chain_set]
        g.edges.append(GraphEdge(entry.source, exit_.target, "send_to", _make_via(via)))
        for node_id in chain:
            del g.nodes[node_id]
        removed.extend(chain)
    return g, removed


# ---------------------------------------------------------------------------
# step 3: strip non-process properties


def strip_properties(graph: PropertyGraph, policy: Optional[CondensationPolicy] = None) -> PropertyGraph:
    """Keep only allowlisted node properties; labels are untouched."""
    policy = policy or CondensationPolicy()
    policy.check()
    g = graph.copy()
    for node in g.nodes.values():
        node.properties = {k: v for k, v in node.properties.items() if policy.keeps_property(k)}
    return g


# ---------------------------------------------------------------------------
# full pipeline


def condense(
    graph: PropertyGraph, policy: Optional[CondensationPolicy] = None
) -> Tuple[PropertyGraph, CondensationReport]:
    """Run the three condensation steps in order and report the reduction.

    Token counts are measured on the GraphML serialization of the input
    and output graphs with the default heuristic estimator.
    """
    from .graphio import estimate_tokens, export_graphml

    policy = policy or CondensationPolicy()
    policy.check()

    tokens_before = estimate_tokens(export_graphml(graph)).token_count

    step1, folded, pruned = _prune_structural_impl(graph, policy)
    step2, collapsed = _collapse_chains_impl(step1, policy)
    step3 = strip_properties(step2, policy)

    tokens_after = estimate_tokens(export_graphml(step3)).token_count

    report = CondensationReport(
        nodes_before=graph.node_count(),
        nodes_after=step3.node_count(),
        edges_before=graph.edge_count(),
        edges_after=step3.edge_count(),
        tokens_before=tokens_before,
        tokens_after=tokens_after,
        removals={
            "folded_children": folded,
            "pruned_structural": pruned,
            "collapsed_chains": collapsed,
        },
        steps=[
            StepCounts("prune_structural", step1.node_count(), step1.edge_count()),
            StepCounts("collapse_chains", step2.node_count(), step2.edge_count()),
            StepCounts("strip_properties", step3.node_count(), step3.edge_count()),
        ],
    )
    return step3, report
