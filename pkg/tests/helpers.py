"""Shared test utilities: tiny XML documents and synthetic plant models."""

from __future__ import annotations

import random
from typing import List, Optional, Tuple

from pidgraph.model import (
    Attribute,
    PidModel,
    PipingConnection,
    PlantItem,
    SignalConnection,
)

XMLNS = "http://sandbox.dexpi.org/PlantModel"


def wrap(body: str, schema_version: str = "4.2") -> str:
    """A minimal PlantModel document around the given body."""
    return (
        f'<PlantModel xmlns="{XMLNS}">'
        f'<PlantInformation SchemaVersion="{schema_version}" OriginatingSystem="test"/>'
        f"{body}"
        "</PlantModel>"
    )


def ga(name: str, value: str, units: Optional[str] = None) -> str:
    unit_attr = f' Units="{units}"' if units else ""
    return f'<GenericAttribute Name="{name}" Value="{value}"{unit_attr}/>'


def attrs(*entries: str) -> str:
    return f'<GenericAttributes Set="DexpiAttributes">{"".join(entries)}</GenericAttributes>'


def node(node_id: str, flow: Optional[str] = None) -> str:
    flow_attr = f' Flow="{flow}"' if flow else ""
    return f'<Node ID="{node_id}"{flow_attr}/>'


def ports(*nodes: str) -> str:
    return f"<ConnectionPoints>{''.join(nodes)}</ConnectionPoints>"


PUMP_FRAGMENT = wrap(
    '<Equipment ID="pump" ComponentClass="ReciprocatingPump" TagName="P1">'
    + ports(node("pump-in.1", "In"), node("pump-out.1", "Out"))
    + '<Nozzle ID="pump-in" ComponentClass="Nozzle"/>'
    + '<Nozzle ID="pump-out" ComponentClass="Nozzle"/>'
    + '<Equipment ID="pump-disp" ComponentClass="Displacer"/>'
    + '<Equipment ID="pump-cham" ComponentClass="PumpChamber"/>'
    + "</Equipment>"
)

# tank -> pipe -> pump, flow attached through nozzle ports
STRAIGHT_LINE = wrap(
    '<Equipment ID="tank" ComponentClass="Tank" TagName="T1">'
    + '<Nozzle ID="tank-out" ComponentClass="Nozzle">'
    + ports(node("tank-out.1", "Out"))
    + "</Nozzle>"
    + "</Equipment>"
    + '<Equipment ID="pump" ComponentClass="CentrifugalPump" TagName="P1">'
    + '<Nozzle ID="pump-in" ComponentClass="Nozzle">'
    + ports(node("pump-in.1", "In"))
    + "</Nozzle>"
    + "</Equipment>"
    + '<PipingNetworkSystem ID="sys" ComponentClass="PipingNetworkSystem">'
    + '<PipingNetworkSegment ID="seg" ComponentClass="PipingNetworkSegment">'
    + '<Connection FromID="tank-out.1" ToID="pump-in.1"/>'
    + '<PipingComponent ID="pipe" ComponentClass="Pipe"/>'
    + "</PipingNetworkSegment>"
    + "</PipingNetworkSystem>"
)

# measuring -> processing -> actuating loop around a tank and a globe valve
CONTROL_LOOP = wrap(
    '<Equipment ID="tank" ComponentClass="Tank" TagName="T1"/>'
    + '<PipingNetworkSystem ID="sys" ComponentClass="PipingNetworkSystem">'
    + '<PipingNetworkSegment ID="seg" ComponentClass="PipingNetworkSegment">'
    + '<PipingComponent ID="lv" ComponentClass="GlobeValve" TagName="LV1"/>'
    + "</PipingNetworkSegment>"
    + "</PipingNetworkSystem>"
    + '<ProcessInstrumentationFunction ID="tt" ComponentClass="ProcessSignalGeneratingFunction" TagName="TT1"/>'
    + '<ProcessInstrumentationFunction ID="tic" ComponentClass="ProcessInstrumentationFunction" TagName="TIC1"/>'
    + '<ProcessInstrumentationFunction ID="ty" ComponentClass="ActuatingFunction" TagName="TY1"/>'
    + '<SignalLine ID="s1"><Connection FromID="tank" ToID="tt"/></SignalLine>'
    + '<SignalLine ID="s2"><Connection FromID="tt" ToID="tic"/></SignalLine>'
    + '<SignalLine ID="s3"><Connection FromID="tic" ToID="ty"/></SignalLine>'
    + '<SignalLine ID="s4"><Connection FromID="ty" ToID="lv"/></SignalLine>'
)


def _item(
    model: PidModel,
    item_id: str,
    class_name: str,
    package: str,
    tag: Optional[str] = None,
    parent: Optional[str] = None,
    **attributes: str,
) -> PlantItem:
    item = PlantItem(id=item_id, class_name=class_name, package=package, tag=tag)
    for name, value in attributes.items():
        item.attributes[name] = Attribute(value=value)
    model.items[item_id] = item
    if parent is not None:
        model.items[parent].children.append(item_id)
    return item


def synth_model(seed: int) -> PidModel:
    """A randomized but reproducible plant model.

    Equipment items with nozzles are joined by piping chains of random
    structural parts and the occasional tagged valve; some seeds add a
    branch line, a measurement, and a control hookup. Everything is
    derived from the seed alone.
    """
    rng = random.Random(seed)
    model = PidModel(items={}, metadata={"schemaVersion": "4.2"})
    connections: List[PipingConnection] = []
    signals: List[SignalConnection] = []

    equipment_classes = ["Tank", "CentrifugalPump", "PlateHeatExchanger", "PressureVessel"]
    n_equipment = rng.randint(3, 6)
    nozzle_counter = 0
    equipment: List[str] = []
    for index in range(n_equipment):
        eq_id = f"eq{index}"
        _item(model, eq_id, rng.choice(equipment_classes), "equipment", tag=f"E{index}")
        for side in ("a", "b"):
            nozzle_counter += 1
            _item(model, f"nz{index}{side}", "Nozzle", "equipment", parent=eq_id,
                  NominalDiameter=str(rng.choice([50, 80, 100])))
        equipment.append(eq_id)

    part_classes = ["Pipe", "Flange", "Reducer", "PropertyBreak"]
    part_counter = 0
    valve_counter = 0

    def chain_between(source: str, target: str) -> None:
        nonlocal part_counter, valve_counter
        hops = [source]
        for _ in range(rng.randint(0, 4)):
            part_counter += 1
            part_id = f"part{part_counter}"
            _item(model, part_id, rng.choice(part_classes), "piping")
            hops.append(part_id)
        if rng.random() < 0.6:
            valve_counter += 1
            valve_id = f"valve{valve_counter}"
            _item(model, valve_id, "GateValve", "piping", tag=f"V{valve_counter}",
                  NominalDiameter="80")
            hops.append(valve_id)
        hops.append(target)
        for a, b in zip(hops, hops[1:]):
            connections.append(PipingConnection(from_item=a, to_item=b))

    # a main line threading all equipment, nozzle to nozzle
    for index in range(n_equipment - 1):
        chain_between(f"nz{index}b", f"nz{index + 1}a")

    # occasionally a branch from an early nozzle to a late one (creates a cycle
    # in the undirected sense and a converging junction in the directed one)
    if n_equipment >= 4 and rng.random() < 0.5:
        chain_between("nz0b", f"nz{n_equipment - 1}a")

    # instrumentation: measurement on one equipment, control onto one valve
    if rng.random() < 0.7:
        _item(model, "meas", "ProcessSignalGeneratingFunction", "instrumentation", tag="MT1")
        target_eq = rng.choice(equipment)
        signals.append(SignalConnection(source=target_eq, target="meas", kind="measurement"))
        if valve_counter and rng.random() < 0.8:
            _item(model, "ctrl", "ProcessInstrumentationFunction", "instrumentation", tag="MC1")
            _item(model, "act", "ActuatingFunction", "instrumentation", tag="MY1")
            signals.append(SignalConnection(source="meas", target="ctrl", kind="signal"))
            signals.append(SignalConnection(source="ctrl", target="act", kind="signal"))
            signals.append(SignalConnection(source="act", target="valve1", kind="actuation"))

    model.piping_connections = connections
    model.signal_connections = signals
    return model


def send_to_pairs(graph) -> List[Tuple[str, str]]:
    return [(e.source, e.target) for e in graph.edges if e.type == "send_to"]
