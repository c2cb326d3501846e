"""Benchmark harness: flow tracing, answer scoring, report generation.

Three stock questions are scored against graph-derived ground truth:

    Q1_pattern  flow path from inlet to outlet, scored by longest common
                prefix against the traced tag sequence
    Q2_valves   valve inventory, scored by recall against the valve tag set
    Q3_safety   open-ended safety analysis, recorded for human scoring
"""

from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set

from . import chain, providers
from .graph import PropertyGraph

logger = logging.getLogger(__name__)

BRANCH_OPEN = "[branch]"
BRANCH_CLOSE = "[/branch]"
CYCLE_PREFIX = "[cycle:"

QUESTION_TEXT = {
    "Q1_pattern": "Describe the process from inlet to outlet.",
    "Q2_valves": "List all valves and their specifications.",
    "Q3_safety": "Analyze the flowsheet and give recommendations regarding process safety.",
}


class TraceError(Exception):
    """Flow tracing precondition failure."""


def _display_name(graph: PropertyGraph, node_id: str) -> str:
    node = graph.nodes[node_id]
    tag = node.properties.get("tagName")
    return str(tag) if tag else node_id


def trace_flow(graph: PropertyGraph, inlet_id: str) -> List[str]:
    """Depth-first flow trace from an inlet along send_to edges.

    Returns tag names (node id when untagged) in traversal order. Where
    flow splits, each branch is wrapped in [branch]/[/branch] markers;
    an edge returning to a node on the current path emits a
    "[cycle:<tag>]" marker instead of recursing.

    Raises:
        TraceError: unknown inlet, or the inlet has incoming flow.
    """
    if inlet_id not in graph.nodes:
        raise TraceError(f"inlet {inlet_id!r} is not in the graph")
    incoming = [e for e in graph.in_edges(inlet_id) if e.type == "send_to"]
    if incoming:
        raise TraceError(
            f"inlet {inlet_id!r} has incoming flow from "
            f"{sorted(e.source for e in incoming)!r}; trace must start upstream"
        )

    adjacency: Dict[str, List[str]] = {}
    for edge in graph.edges:
        if edge.type == "send_to":
            adjacency.setdefault(edge.source, []).append(edge.target)
    for targets in adjacency.values():
        targets.sort(key=lambda nid: (_display_name(graph, nid), nid))

    result: List[str] = []

    def visit(node_id: str, path: Set[str]) -> None:
        result.append(_display_name(graph, node_id))
        path = path | {node_id}
        successors = adjacency.get(node_id, [])
        if len(successors) == 1:
            target = successors[0]
            if target in path:
                result.append(f"{CYCLE_PREFIX}{_display_name(graph, target)}]")
            else:
                visit(target, path)
        elif len(successors) > 1:
            for target in successors:
                result.append(BRANCH_OPEN)
                if target in path:
                    result.append(f"{CYCLE_PREFIX}{_display_name(graph, target)}]")
                else:
                    visit(target, path)
                result.append(BRANCH_CLOSE)

    visit(inlet_id, set())
    return result


def strip_markers(trace: Sequence[str]) -> List[str]:
    """Drop branch/cycle markers, leaving the plain tag sequence."""
    return [
        step
        for step in trace
        if step not in (BRANCH_OPEN, BRANCH_CLOSE) and not step.startswith(CYCLE_PREFIX)
    ]


def score_sequence(predicted: Sequence[str], truth: Sequence[str]) -> float:
    """Longest-common-prefix score: matching leading items / len(truth)."""
    if not truth:
        raise ValueError("truth sequence must be non-empty")
    matched = 0
    for have, want in zip(predicted, truth):
        if have.strip().lower() != want.strip().lower():
            break
        matched += 1
    return matched / len(truth)


def list_nodes_by_label(graph: PropertyGraph, label: str) -> List[str]:
    """Node ids carrying the label, sorted by display tag."""
    found = [nid for nid, node in graph.nodes.items() if label in node.labels]
    return sorted(found, key=lambda nid: (_display_name(graph, nid), nid))


def score_recall(predicted: Set[str], truth: Set[str]) -> float:
    """|predicted ∩ truth| / |truth| with case-insensitive matching."""
    if not truth:
        raise ValueError("truth set must be non-empty")
    predicted_fold = {p.strip().lower() for p in predicted}
    truth_fold = {t.strip().lower() for t in truth}
    return len(predicted_fold & truth_fold) / len(truth_fold)


def extract_tags(answer: str, known_tags: Sequence[str]) -> List[str]:
    """Known tags found in the answer, ordered by first mention.

    Matching is case-insensitive and requires the tag to stand alone
    (not embedded in a longer alphanumeric run), so "V104.01" does not
    match inside "V104.011".
    """
    positions: List[tuple] = []
    for tag in known_tags:
        pattern = re.compile(
            r"(?<![A-Za-z0-9])" + re.escape(tag) + r"(?![A-Za-z0-9])", re.IGNORECASE
        )
        match = pattern.search(answer)
        if match:
            positions.append((match.start(), tag))
    positions.sort()
    return [tag for _, tag in positions]


@dataclass
class EvalCase:
    """One benchmark run: a stock question against one graph level."""

    question_id: str
    graph_level: str = "high"
    provider: Optional[providers.ProviderSpec] = None
    question: str = ""

    def __post_init__(self):
        if self.question_id not in QUESTION_TEXT:
            raise ValueError(f"unknown question_id {self.question_id!r}")
        if not self.question:
            self.question = QUESTION_TEXT[self.question_id]

    @classmethod
    def from_dict(cls, data: dict) -> "EvalCase":
        spec = data.get("provider")
        return cls(
            question_id=data["question_id"],
            graph_level=data.get("graph_level", "high"),
            provider=providers.ProviderSpec.from_dict(spec) if spec else None,
            question=data.get("question", ""),
        )


@dataclass
class EvalResult:
    """Outcome of one case."""

    case: EvalCase
    answer: str = ""
    score: Optional[float] = None
    status: str = "ok"
    notes: str = ""

    def row(self) -> List[str]:
        return [
            self.case.question_id,
            self.case.graph_level,
            self.status,
            "" if self.score is None else f"{self.score:.3f}",
            self.notes,
        ]


@dataclass
class GroundTruth:
    """Graph-derived answers the scored questions are checked against."""

    flow_tags: List[str] = field(default_factory=list)
    valve_tags: List[str] = field(default_factory=list)


def ground_truth_from_graph(graph: PropertyGraph, inlet_id: str) -> GroundTruth:
    """Build ground truth by tracing from the inlet and listing valves.

    The flow sequence keeps only tagged nodes (an answer cannot be
    expected to name internal ids) and only the first visit to each —
    converging branches revisit nodes but a written answer names them
    once.
    """
    trace = trace_flow(graph, inlet_id)
    tagged = {
        str(node.properties["tagName"])
        for node in graph.nodes.values()
        if "tagName" in node.properties
    }
    flow_tags: List[str] = []
    for step in strip_markers(trace):
        if step in tagged and step not in flow_tags:
            flow_tags.append(step)
    valves = [_display_name(graph, nid) for nid in list_nodes_by_label(graph, "valve")]
    return GroundTruth(flow_tags=flow_tags, valve_tags=valves)


def _score_case(
    case: EvalCase, answer: str, graph: PropertyGraph, truth: GroundTruth
) -> EvalResult:
    all_tags = sorted(
        {
            str(node.properties["tagName"])
            for node in graph.nodes.values()
            if "tagName" in node.properties
        }
    )
    if case.question_id == "Q1_pattern":
        mentioned = extract_tags(answer, all_tags)
        score = score_sequence(mentioned, truth.flow_tags)
        return EvalResult(case=case, answer=answer, score=score)
    if case.question_id == "Q2_valves":
        mentioned = set(extract_tags(answer, all_tags))
        score = score_recall(mentioned, set(truth.valve_tags))
        return EvalResult(case=case, answer=answer, score=score)
    return EvalResult(
        case=case, answer=answer, score=None, notes="recorded for human scoring"
    )


def run_benchmark(
    cases: Sequence[EvalCase],
    graphs: Dict[str, PropertyGraph],
    truth: GroundTruth,
    default_provider: Optional[providers.ProviderSpec] = None,
    token_budget: int = chain.DEFAULT_TOKEN_BUDGET,
) -> List[EvalResult]:
    """Run every case, scoring answers against the ground truth.

    A provider failure marks that case failed and the run continues.
    graphs maps level name ("complete"/"high") to the graph to ground on.
    """
    results: List[EvalResult] = []
    for case in cases:
        graph = graphs.get(case.graph_level)
        if graph is None:
            results.append(
                EvalResult(case=case, status="failed", notes=f"no graph for level {case.graph_level!r}")
            )
            continue
        spec = case.provider or default_provider
        if spec is None:
            results.append(EvalResult(case=case, status="failed", notes="no provider configured"))
            continue
        try:
            provider = providers.create_provider(spec)
            session = chain.new_session(graph, token_budget=token_budget)
            answer = chain.ask_text(session, case.question, provider)
        except Exception as exc:  # noqa: BLE001 - the run must survive any case failure
            logger.warning("case %s failed: %s", case.question_id, exc)
            results.append(EvalResult(case=case, status="failed", notes=str(exc)))
            continue
        results.append(_score_case(case, answer, graph, truth))
    return results


def results_to_csv(results: Sequence[EvalResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["question_id", "graph_level", "status", "score", "notes"])
    for result in results:
        writer.writerow(result.row())
    return buffer.getvalue()


def results_table(results: Sequence[EvalResult]) -> str:
    headers = ["question_id", "graph_level", "status", "score", "notes"]
    rows = [result.row() for result in results]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines)


def load_cases(path: str) -> List[EvalCase]:
    """Load cases JSON; scripted-provider script paths resolve relative
    to the cases file, so a cases bundle works from any directory."""
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if isinstance(data, dict):
        data = data.get("cases", [])
    cases = [EvalCase.from_dict(entry) for entry in data]
    base = Path(path).resolve().parent
    for case in cases:
        spec = case.provider
        if (
            spec is not None
            and spec.provider_name == "scripted"
            and spec.endpoint
            and not Path(spec.endpoint).is_absolute()
        ):
            case.provider = replace(spec, endpoint=str(base / spec.endpoint))
    return cases
