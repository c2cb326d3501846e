"""DEXPI/Proteus XML parser.

Targets the Proteus schema family >= 4.0 with namespace-tolerant matching
on local element names: every element carrying a ComponentClass attribute
becomes one PlantItem, nesting mirrors the XML hierarchy, and unknown
classes pass through with their class name preserved.

Connectivity:
    - Piping: each PipingNetworkSegment yields a flow chain
      [Connection.FromID] + [child items in document order] + [Connection.ToID].
      Direction follows document order (upstream -> downstream) unless the
      endpoint ports carry explicit Flow="in|out" declarations, in which
      case those win; contradictory declarations are recorded as a
      diagnostic and document order is kept.
    - Instrumentation: SignalLine / InformationFlow elements yield signal
      connections classified as measurement, signal, actuation, or
      logical_end from the endpoint classes.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .model import (
    Attribute,
    Diagnostic,
    PidModel,
    PipingConnection,
    PlantItem,
    Severity,
    SignalConnection,
)
from . import taxonomy


class DexpiParseError(Exception):
    """Malformed document or, in strict mode, unresolvable references.

    Attributes:
        line / column: position of the underlying XML error when known.
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if "}" in tag else tag


@dataclass
class _Port:
    owner: str
    flow: Optional[str] = None  # "in" | "out" | None


@dataclass
class _SegmentLink:
    segment_id: str
    from_id: Optional[str]
    to_id: Optional[str]
    from_port: Optional[str]
    to_port: Optional[str]
    chain: List[str] = field(default_factory=list)


_SIGNAL_ELEMENTS = {"SignalLine", "InformationFlow", "MeasuringLine", "SignalConnection"}

# instrumentation label tiers used for signal-kind classification
_MEASURING = "measuringFunction"
_ACTUATING = "actuatingFunction"
_OPC = "offPageConnector"


def parse_dexpi(document: str, strict: bool = False) -> PidModel:
    """Parse DEXPI/Proteus XML text into a PidModel.

    Args:
        document: XML text (UTF-8 string).
        strict: when True, raise DexpiParseError on the first error-severity
            diagnostic instead of collecting it.

    Raises:
        DexpiParseError: malformed XML (always), or any error diagnostic
            in strict mode.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise DexpiParseError(f"malformed XML: {exc.msg}", line, column) from None

    parser = _DocumentWalk()
    parser.walk(root)
    model = parser.finish()

    if strict:
        errors = [d for d in model.parse_diagnostics if d.severity == Severity.ERROR]
        if errors:
            raise DexpiParseError(f"strict parse failed: {errors[0]}")
    return model


class _DocumentWalk:
    """Single pass over the element tree, collecting items and connectivity."""

    def __init__(self) -> None:
        self.items: Dict[str, PlantItem] = {}
        self.order: List[str] = []
        self.diagnostics: List[Diagnostic] = []
        self.metadata: Dict[str, str] = {}
        self.ports: Dict[str, _Port] = {}
        self.segments: List[_SegmentLink] = []
        self.signal_links: List[Tuple[str, str]] = []  # raw (from, to) of signal elements
        self._synth_counter = 0
        self._dup_counter = 0

    # -- tree walk -----------------------------------------------------

    def walk(self, root: ET.Element) -> None:
        self.metadata["rootElement"] = _local(root.tag)
        self._walk(root, enclosing_item=None, section_package=None)

    def _walk(self, elem: ET.Element, enclosing_item: Optional[PlantItem], section_package: Optional[str]) -> None:
        name = _local(elem.tag)

        if name == "PlantInformation":
            for key in ("SchemaVersion", "OriginatingSystem", "Date", "ProjectName"):
                if elem.get(key):
                    self.metadata[taxonomy.lower_camel(key)] = elem.get(key, "")
            return
        if name == "Drawing":
            if elem.get("Name"):
                self.metadata["drawingName"] = elem.get("Name", "")
            for child in elem:
                self._walk(child, enclosing_item, section_package)
            return
        if name in _SIGNAL_ELEMENTS:
            self._collect_signal(elem)
            return
        if name == "Connection":
            # handled by the enclosing segment scan; standalone Connections
            # (outside segments) are ignored
            return

        item = None
        if elem.get("ComponentClass") is not None:
            item = self._make_item(elem, enclosing_item, section_package)
            if enclosing_item is not None and item is not None:
                enclosing_item.children.append(item.id)

        next_section = taxonomy.SECTION_PACKAGES.get(name, section_package)
        next_item = item if item is not None else enclosing_item

        if item is not None and item.class_name == "PipingNetworkSegment":
            self._collect_segment(elem, item)
            # child items were registered by _collect_segment's walk
            return

        for child in elem:
            self._walk(child, next_item, next_section)

    # -- items ----------------------------------------------------------

    def _make_item(self, elem: ET.Element, enclosing_item: Optional[PlantItem], section_package: Optional[str]) -> Optional[PlantItem]:
        class_name = elem.get("ComponentClass", "")
        item_id = elem.get("ID")
        if not item_id:
            item_id = f"gen-{self._synth_counter}"
        self._synth_counter += 1

        if item_id in self.items:
            self._dup_counter += 1
            new_id = f"{item_id}-dup{self._dup_counter}"
            self.diagnostics.append(
                Diagnostic(Severity.ERROR, item_id, f"duplicate id, renamed to {new_id}")
            )
            item_id = new_id

        package = taxonomy.package_for_class(class_name)
        if package is None:
            if enclosing_item is not None:
                package = enclosing_item.package
            elif section_package is not None:
                package = section_package
            else:
                package = "equipment"
                self.diagnostics.append(
                    Diagnostic(Severity.WARNING, item_id, f"unknown class {class_name} outside any section, defaulting to equipment")
                )

        item = PlantItem(id=item_id, class_name=class_name, package=package)
        item.tag = elem.get("TagName") or None
        self._read_attributes(elem, item)
        self._read_ports(elem, item)
        self.items[item_id] = item
        self.order.append(item_id)
        return item

    def _read_attributes(self, elem: ET.Element, item: PlantItem) -> None:
        for block in elem:
            if _local(block.tag) != "GenericAttributes":
                continue
            for attr in block:
                if _local(attr.tag) != "GenericAttribute":
                    continue
                name = attr.get("Name")
                if not name:
                    continue
                value = attr.get("Value", "")
                units = attr.get("Units") or None
                if name not in item.attributes:
                    item.attributes[name] = Attribute(value=value, units=units)
                if item.tag is None and name in ("TagNameAssignmentClass", "TagName"):
                    item.tag = value or None
        # drawing coordinates, kept as plain attributes (pruned later by the condenser)
        for child in elem:
            if _local(child.tag) == "Position":
                for loc in child:
                    if _local(loc.tag) == "Location":
                        if loc.get("X") is not None:
                            item.attributes.setdefault("XCoordinate", Attribute(loc.get("X", "")))
                        if loc.get("Y") is not None:
                            item.attributes.setdefault("YCoordinate", Attribute(loc.get("Y", "")))

    def _read_ports(self, elem: ET.Element, item: PlantItem) -> None:
        for child in elem:
            if _local(child.tag) != "ConnectionPoints":
                continue
            for node in child:
                if _local(node.tag) != "Node":
                    continue
                node_id = node.get("ID")
                if not node_id:
                    continue
                flow = node.get("Flow")
                flow = flow.lower() if flow in ("In", "Out", "in", "out") else None
                self.ports[node_id] = _Port(owner=item.id, flow=flow)

    # -- piping ----------------------------------------------------------

    def _collect_segment(self, elem: ET.Element, segment: PlantItem) -> None:
        link = _SegmentLink(segment.id, None, None, None, None)
        for child in elem:
            name = _local(child.tag)
            if name == "Connection":
                link.from_id = child.get("FromID")
                link.to_id = child.get("ToID")
                link.from_port = child.get("FromNode")
                link.to_port = child.get("ToNode")
                continue
            if child.get("ComponentClass") is not None:
                sub = self._make_item(child, segment, "piping")
                if sub is not None:
                    segment.children.append(sub.id)
                    link.chain.append(sub.id)
                # nested structure below piping components (rare) still scanned
                for grand in child:
                    self._walk(grand, sub, "piping")
            elif name in _SIGNAL_ELEMENTS:
                self._collect_signal(child)
        self.segments.append(link)

    def _resolve_endpoint(self, ref: Optional[str]) -> Tuple[Optional[str], Optional[str]]:
        """Resolve a Connection endpoint to (item id, port id)."""
        if ref is None:
            return None, None
        if ref in self.items:
            return ref, None
        port = self.ports.get(ref)
        if port is not None:
            return port.owner, ref
        return None, ref

    def _segment_connections(self) -> List[PipingConnection]:
        connections: List[PipingConnection] = []
        for link in self.segments:
            from_item, from_port = self._resolve_endpoint(link.from_id)
            to_item, to_port = self._resolve_endpoint(link.to_id)
            from_port = from_port or link.from_port
            to_port = to_port or link.to_port

            for ref, resolved in ((link.from_id, from_item), (link.to_id, to_item)):
                if ref is not None and resolved is None:
                    self.diagnostics.append(
                        Diagnostic(Severity.ERROR, link.segment_id, f"unresolved connection reference {ref}")
                    )

            chain: List[Tuple[str, Optional[str]]] = []
            if from_item:
                chain.append((from_item, from_port))
            chain.extend((i, None) for i in link.chain)
            if to_item:
                chain.append((to_item, to_port))
            if len(chain) < 2:
                continue

            if self._segment_reversed(link, from_port, to_port):
                chain.reverse()

            for (a, ap), (b, bp) in zip(chain, chain[1:]):
                if a == b and ap == bp:
                    self.diagnostics.append(
                        Diagnostic(Severity.ERROR, a, "piping connection loops back onto the same port")
                    )
                    continue
                connections.append(PipingConnection(from_item=a, to_item=b, from_port=ap, to_port=bp))
        return connections

    def _segment_reversed(self, link: _SegmentLink, from_port: Optional[str], to_port: Optional[str]) -> bool:
        """Explicit Flow declarations on endpoint ports override document order."""
        from_flow = self.ports[from_port].flow if from_port in self.ports else None
        to_flow = self.ports[to_port].flow if to_port in self.ports else None
        if from_flow is None and to_flow is None:
            return False
        forward = (from_flow in (None, "out")) and (to_flow in (None, "in"))
        backward = (from_flow in (None, "in")) and (to_flow in (None, "out"))
        if forward and not backward:
            return False
        if backward and not forward:
            return True
        self.diagnostics.append(
            Diagnostic(Severity.WARNING, link.segment_id, "ambiguous flow direction from port declarations, keeping document order")
        )
        return False

    # -- instrumentation ---------------------------------------------------

    def _collect_signal(self, elem: ET.Element) -> None:
        for child in elem:
            if _local(child.tag) == "Connection":
                from_id = child.get("FromID")
                to_id = child.get("ToID")
                if from_id and to_id:
                    self.signal_links.append((from_id, to_id))
                else:
                    self.diagnostics.append(
                        Diagnostic(Severity.WARNING, "", "signal connection missing FromID/ToID, skipped")
                    )

    def _classify_signal(self, source: PlantItem, target: PlantItem) -> Optional[str]:
        src_labels = taxonomy.labels_for(source.class_name, source.package)
        tgt_labels = taxonomy.labels_for(target.class_name, target.package)
        if _OPC in src_labels or _OPC in tgt_labels:
            return "logical_end"
        if _MEASURING in tgt_labels and source.package != "instrumentation":
            return "measurement"
        if _ACTUATING in src_labels and target.package != "instrumentation":
            return "actuation"
        if source.package == "instrumentation" and target.package == "instrumentation":
            return "signal"
        return None

    def _signal_connections(self) -> List[SignalConnection]:
        connections: List[SignalConnection] = []
        for from_id, to_id in self.signal_links:
            source = self.items.get(from_id)
            target = self.items.get(to_id)
            if source is None or target is None:
                missing = from_id if source is None else to_id
                self.diagnostics.append(
                    Diagnostic(Severity.ERROR, missing, f"unresolved signal reference {missing}")
                )
                continue
            kind = self._classify_signal(source, target)
            if kind is None:
                self.diagnostics.append(
                    Diagnostic(Severity.WARNING, from_id, f"signal connection {from_id} -> {to_id} has no classifiable kind")
                )
            connections.append(SignalConnection(source=from_id, target=to_id, kind=kind))
        return connections

    # -- assembly ----------------------------------------------------------

    def finish(self) -> PidModel:
        model = PidModel(items=self.items, metadata=self.metadata)
        model.piping_connections = self._segment_connections()
        model.signal_connections = self._signal_connections()
        model.parse_diagnostics = self.diagnostics
        return model


def validate(model: PidModel) -> List[Diagnostic]:
    """Check model invariants; returns diagnostics, never mutates the model."""
    diagnostics: List[Diagnostic] = []

    seen_ids: Dict[str, int] = {}
    for key, item in model.items.items():
        seen_ids[item.id] = seen_ids.get(item.id, 0) + 1
        if key != item.id:
            diagnostics.append(Diagnostic(Severity.ERROR, item.id, f"item keyed as {key} but carries id {item.id}"))
        if item.package not in ("equipment", "piping", "instrumentation"):
            diagnostics.append(Diagnostic(Severity.ERROR, item.id, f"invalid package {item.package}"))
        known = taxonomy.package_for_class(item.class_name)
        if known is not None and known != item.package:
            diagnostics.append(
                Diagnostic(Severity.WARNING, item.id, f"package {item.package} disagrees with taxonomy ({known}) for class {item.class_name}")
            )
        for child in item.children:
            if child not in model.items:
                diagnostics.append(Diagnostic(Severity.ERROR, item.id, f"unresolved child reference {child}"))
    for item_id, count in seen_ids.items():
        if count > 1:
            diagnostics.append(Diagnostic(Severity.ERROR, item_id, "duplicate id"))

    for conn in model.piping_connections:
        for endpoint in (conn.from_item, conn.to_item):
            if endpoint not in model.items:
                diagnostics.append(Diagnostic(Severity.ERROR, endpoint, f"unresolved reference {endpoint} in piping connection"))
        if conn.from_item == conn.to_item and conn.from_port == conn.to_port:
            diagnostics.append(Diagnostic(Severity.ERROR, conn.from_item, "piping connection loops back onto the same port"))

    for sig in model.signal_connections:
        for endpoint in (sig.source, sig.target):
            if endpoint not in model.items:
                diagnostics.append(Diagnostic(Severity.ERROR, endpoint, f"unresolved reference {endpoint} in signal connection"))
        if sig.kind is not None and sig.kind not in ("measurement", "signal", "actuation", "logical_end"):
            diagnostics.append(Diagnostic(Severity.ERROR, sig.source, f"invalid signal kind {sig.kind}"))

    return diagnostics
