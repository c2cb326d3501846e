"""In-memory plant model parsed from DEXPI/Proteus XML.

The model mirrors the three component packages of a P&ID: equipment,
piping, and instrumentation. Items keep their original attribute values
verbatim (no unit conversion) so a parse is lossless with respect to the
source document.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

PACKAGES = ("equipment", "piping", "instrumentation")


class Severity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True)
class Diagnostic:
    """A validation or parse finding attached to an item (or the document).

    Attributes:
        severity: info, warning, or error.
        item_id: id of the offending item, or "" for document-level findings.
        message: human-readable description.
    """

    severity: Severity
    item_id: str
    message: str

    def __str__(self) -> str:
        where = self.item_id or "<document>"
        return f"[{self.severity.value}] {where}: {self.message}"


@dataclass
class Attribute:
    """One generic attribute: value string plus optional unit string."""

    value: str
    units: Optional[str] = None


@dataclass
class PlantItem:
    """A single plant component (equipment, piping item, or instrumentation function).

    Attributes:
        id: document-unique id (synthetic "gen-<n>" when the XML has none).
        class_name: DEXPI component class, e.g. "ReciprocatingPump".
        package: one of equipment / piping / instrumentation.
        tag: engineering tag such as "P4712", when present.
        attributes: ordered name -> Attribute map, values verbatim.
        children: ids of subcomponents (nozzles, displacers, chambers, ...).
    """

    id: str
    class_name: str
    package: str
    tag: Optional[str] = None
    attributes: Dict[str, Attribute] = field(default_factory=dict)
    children: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class PipingConnection:
    """A directed material-flow link between two items (optionally via ports)."""

    from_item: str
    to_item: str
    from_port: Optional[str] = None
    to_port: Optional[str] = None


SIGNAL_KINDS = ("measurement", "signal", "actuation", "logical_end")


@dataclass(frozen=True)
class SignalConnection:
    """A directed instrumentation link.

    kind is one of measurement / signal / actuation / logical_end, or None
    when the source document did not allow a classification (the graph
    builder skips such connections with a diagnostic).
    """

    source: str
    target: str
    kind: Optional[str] = None


@dataclass
class PidModel:
    """Parsed plant: items plus piping and signal connectivity.

    Invariants (checked by :func:`pidgraph.parser.validate`):
        - item ids unique across the document
        - every child id and connection endpoint resolves to an item
        - no piping connection loops back onto the same port of one item
    """

    items: Dict[str, PlantItem] = field(default_factory=dict)
    piping_connections: List[PipingConnection] = field(default_factory=list)
    signal_connections: List[SignalConnection] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)
    parse_diagnostics: List[Diagnostic] = field(default_factory=list)

    def package_counts(self) -> Dict[str, int]:
        counts = {p: 0 for p in PACKAGES}
        for item in self.items.values():
            counts[item.package] = counts.get(item.package, 0) + 1
        return counts

    def items_of_class(self, class_name: str) -> List[PlantItem]:
        return [i for i in self.items.values() if i.class_name == class_name]


def model_to_dict(model: PidModel) -> dict:
    """Plain-dict form of a model, used by the CLI --json output."""
    return {
        "metadata": dict(model.metadata),
        "items": [
            {
                "id": item.id,
                "className": item.class_name,
                "package": item.package,
                "tag": item.tag,
                "attributes": {
                    name: {"value": attr.value, "units": attr.units}
                    for name, attr in item.attributes.items()
                },
                "children": list(item.children),
            }
            for item in sorted(model.items.values(), key=lambda i: i.id)
        ],
        "pipingConnections": [
            {
                "from": c.from_item,
                "fromPort": c.from_port,
                "to": c.to_item,
                "toPort": c.to_port,
            }
            for c in model.piping_connections
        ],
        "signalConnections": [
            {"source": c.source, "target": c.target, "kind": c.kind}
            for c in model.signal_connections
        ],
        "diagnostics": [
            {"severity": d.severity.value, "itemId": d.item_id, "message": d.message}
            for d in model.parse_diagnostics
        ],
    }
