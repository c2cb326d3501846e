#!/usr/bin/env python3
"""Generate fixtures/reference_sample.xml, the bundled flowsheet sample.

The flowsheet is a storage-and-transfer unit: feed enters through a
preheater into buffer tank T4750, two pumps (one centrifugal, one
reciprocating) transfer the product through a plate cooler to the
product line, a safety valve relieves the reciprocating pump discharge
to flare, and a cooling-water loop serves the preheater. Temperature
and level control loops actuate the two globe valves.

Output is deterministic: identical bytes on every run. Run with --stats
to print the measurements (node/edge/token counts per graph level) that
the committed golden files are reconciled against.
"""

from __future__ import annotations

import argparse
import uuid
import xml.etree.ElementTree as ET
from pathlib import Path

RDL = "http://sandbox.dexpi.org/rdl"
_PID_NAMESPACE = uuid.UUID("b74b4a2e-54d6-4c32-9f0d-7a3f4c8a91d5")

_coord_counter = 0


def _coords() -> tuple:
    global _coord_counter
    _coord_counter += 1
    x = round((_coord_counter * 17.3) % 420.0 + 12.5, 1)
    y = round((_coord_counter * 39.7) % 286.0 + 9.5, 1)
    return x, y


def persistent_id(item_id: str) -> str:
    return str(uuid.uuid5(_PID_NAMESPACE, item_id))


def add_attributes(elem: ET.Element, class_name: str, tag: str, attrs: list) -> None:
    block = ET.SubElement(elem, "GenericAttributes", {"Set": "DexpiAttributes"})
    ET.SubElement(
        block,
        "GenericAttribute",
        {"Name": "ComponentClassURI", "Value": f"{RDL}/{class_name}"},
    )
    ET.SubElement(
        block,
        "GenericAttribute",
        {"Name": "PersistentID", "Value": persistent_id(elem.get("ID", ""))},
    )
    ET.SubElement(block, "GenericAttribute", {"Name": "ComponentName", "Value": class_name})
    ET.SubElement(block, "GenericAttribute", {"Name": "Revision", "Value": "C"})
    ET.SubElement(block, "GenericAttribute", {"Name": "LastModified", "Value": "2024-05-16T10:31:00"})
    ET.SubElement(block, "GenericAttribute", {"Name": "SourceDrawing", "Value": "PID-104-4750"})
    ET.SubElement(block, "GenericAttribute", {"Name": "Status", "Value": "released"})
    ET.SubElement(
        block,
        "GenericAttribute",
        {"Name": "UniqueReference", "Value": f"{RDL}/instances/{elem.get('ID', '')}"},
    )
    if tag:
        ET.SubElement(
            block, "GenericAttribute", {"Name": "TagNameAssignmentClass", "Value": tag}
        )
    for entry in attrs:
        name, value = entry[0], entry[1]
        units = entry[2] if len(entry) > 2 else None
        ga = {"Name": name, "Value": str(value)}
        if units:
            ga["Units"] = units
        ET.SubElement(block, "GenericAttribute", ga)


def item(
    parent: ET.Element,
    element_name: str,
    class_name: str,
    item_id: str,
    tag: str = "",
    attrs: list = (),
    ports: list = (),
) -> ET.Element:
    elem = ET.SubElement(parent, element_name, {"ID": item_id, "ComponentClass": class_name})
    if tag:
        elem.set("TagName", tag)
    add_attributes(elem, class_name, tag, list(attrs))
    x, y = _coords()
    pos = ET.SubElement(elem, "Position")
    ET.SubElement(pos, "Location", {"X": str(x), "Y": str(y)})
    if ports:
        points = ET.SubElement(elem, "ConnectionPoints")
        for port_id, flow in ports:
            ET.SubElement(points, "Node", {"ID": port_id, "Flow": flow})
    return elem


# ---------------------------------------------------------------------------
# equipment


def build_equipment(root: ET.Element) -> None:
    area = item(
        root,
        "Equipment",
        "PlantArea",
        "AREA-4750",
        tag="A4750",
        attrs=[
            ("AreaNumber", "4750"),
            (
                "Description",
                "Storage and transfer area for the intermediate product: buffer tank, "
                "transfer pump pair, feed preheater and product cooler.",
            ),
        ],
    )

    tank = item(
        area,
        "Equipment",
        "Tank",
        "EQ-T4750",
        tag="T4750",
        attrs=[
            ("NominalCapacity", "12.5", "m3"),
            ("DesignPressure", "4.0", "bar"),
            ("DesignTemperature", "90", "degC"),
            ("MaterialOfConstruction", "1.4571"),
            (
                "Description",
                "Vertical buffer tank holding preheated intermediate product between the "
                "feed preheater H1008 and the two transfer pumps. Fitted with level and "
                "temperature instrumentation and a high-level alarm switch.",
            ),
        ],
    )
    for n, (duty, dn) in enumerate(
        [("fill inlet", "80"), ("pump suction outlet", "100"), ("drain", "50"), ("vent", "50"), ("manhole", "500")],
        start=1,
    ):
        flow = "In" if duty in ("fill inlet",) else "Out"
        item(
            tank,
            "Nozzle",
            "Nozzle",
            f"NOZ-T4750-{n}",
            attrs=[
                ("NominalDiameter", dn, "mm"),
                ("NominalPressure", "PN 16"),
                ("NozzleDuty", duty),
            ],
            ports=[(f"NOZ-T4750-{n}.1", flow)] if n <= 3 else [],
        )

    pump1 = item(
        area,
        "Equipment",
        "CentrifugalPump",
        "EQ-P4711",
        tag="P4711",
        attrs=[
            ("Power", "60", "kW"),
            ("DesignPressure", "16.0", "bar"),
            ("NominalRotationalSpeed", "2900", "rpm"),
            (
                "Description",
                "Centrifugal transfer pump, main duty. Takes suction from tank T4750 and "
                "delivers the product through the cooler H1007 to the product header.",
            ),
        ],
    )
    item(pump1, "Nozzle", "Nozzle", "NOZ-P4711-1", attrs=[("NominalDiameter", "100", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "suction")])
    item(pump1, "Nozzle", "Nozzle", "NOZ-P4711-2", attrs=[("NominalDiameter", "80", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "discharge")])

    pump2 = item(
        area,
        "Equipment",
        "ReciprocatingPump",
        "EQ-P4712",
        tag="P4712",
        attrs=[
            ("Power", "84", "kW"),
            ("DesignPressure", "16.0", "bar"),
            ("StrokeFrequency", "58", "1/min"),
            (
                "Description",
                "Reciprocating transfer pump, spare duty. Positive displacement; its "
                "discharge line carries a full-flow safety valve relieving to flare.",
            ),
        ],
    )
    item(pump2, "Nozzle", "Nozzle", "NOZ-P4712-1", attrs=[("NominalDiameter", "100", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "suction")])
    item(pump2, "Nozzle", "Nozzle", "NOZ-P4712-2", attrs=[("NominalDiameter", "80", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "discharge")])
    item(pump2, "Displacer", "Displacer", "INT-P4712-DISP", attrs=[("DisplacedVolume", "0.85", "L")])
    item(pump2, "PumpChamber", "PumpChamber", "INT-P4712-CHAM", attrs=[("ChamberVolume", "1.20", "L")])

    cooler = item(
        area,
        "Equipment",
        "PlateHeatExchanger",
        "EQ-H1007",
        tag="H1007",
        attrs=[
            ("HeatExchangeArea", "18.0", "m2"),
            ("DesignPressure", "16.0", "bar"),
            ("DesignTemperature", "120", "degC"),
            (
                "Description",
                "Plate-type product cooler on the common pump discharge header, "
                "upstream of the product battery limit.",
            ),
        ],
    )
    item(cooler, "Nozzle", "Nozzle", "NOZ-H1007-1", attrs=[("NominalDiameter", "80", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "process inlet")])
    item(cooler, "Nozzle", "Nozzle", "NOZ-H1007-2", attrs=[("NominalDiameter", "80", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "process outlet")])
    item(cooler, "Nozzle", "Nozzle", "NOZ-H1007-3", attrs=[("NominalDiameter", "50", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "cooling medium inlet")])
    item(cooler, "Nozzle", "Nozzle", "NOZ-H1007-4", attrs=[("NominalDiameter", "50", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "cooling medium outlet")])

    heater = item(
        area,
        "Equipment",
        "TubularHeatExchanger",
        "EQ-H1008",
        tag="H1008",
        attrs=[
            ("HeatExchangeArea", "32.0", "m2"),
            ("DesignPressureTubeSide", "10.0", "bar"),
            ("DesignPressureShellSide", "6.0", "bar"),
            ("DesignTemperature", "140", "degC"),
            (
                "Description",
                "Shell-and-tube feed preheater. Feed passes through the tubes; "
                "tempered cooling water on the shell side trims the tank inlet "
                "temperature under control of loop TIC4750.",
            ),
        ],
    )
    item(
        heater, "Nozzle", "Nozzle", "NOZ-H1008-1",
        attrs=[("NominalDiameter", "80", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "tube-side inlet")],
        ports=[("NOZ-H1008-1.1", "In")],
    )
    item(
        heater, "Nozzle", "Nozzle", "NOZ-H1008-2",
        attrs=[("NominalDiameter", "80", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "tube-side outlet")],
        ports=[("NOZ-H1008-2.1", "Out")],
    )
    item(
        heater, "Nozzle", "Nozzle", "NOZ-H1008-3",
        attrs=[("NominalDiameter", "50", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "shell-side inlet")],
        ports=[("NOZ-H1008-3.1", "In")],
    )
    item(
        heater, "Nozzle", "Nozzle", "NOZ-H1008-4",
        attrs=[("NominalDiameter", "50", "mm"), ("NominalPressure", "PN 16"), ("NozzleDuty", "shell-side outlet")],
        ports=[("NOZ-H1008-4.1", "Out")],
    )
    item(heater, "TubeBundle", "TubeBundle", "INT-H1008-TB", attrs=[("NumberOfTubes", "124"), ("TubeOuterDiameter", "20", "mm")])


# ---------------------------------------------------------------------------
# piping


def _valve_attrs(dn: str, description: str, extra: list = ()) -> list:
    return [
        ("NominalDiameter", dn, "mm"),
        ("NominalDiameterRepresentation", f"DN {dn}"),
        ("NominalPressureRepresentation", "PN 16"),
        ("DesignPressure", "16.0", "bar"),
        ("DesignTemperature", "120", "degC"),
        ("PipingClassCode", "CS16"),
        ("ValveBodyMaterial", "1.0619"),
        ("TrimMaterial", "13Cr"),
        ("ConnectionType", "flanged"),
        *extra,
        ("Description", description),
    ]


def _pipe_attrs(dn: str) -> list:
    return [
        ("NominalDiameter", dn, "mm"),
        ("NominalDiameterRepresentation", f"DN {dn}"),
        ("NominalDiameterStandard", "DIN EN 10220"),
        ("WallThickness", "3.2", "mm"),
        ("OperatingPressure", "6.0", "bar"),
        ("OperatingTemperature", "80", "degC"),
        ("PipingClassCode", "CS16"),
        ("InsulationCode", "H30"),
    ]


def _flange_attrs(dn: str) -> list:
    return [
        ("NominalDiameter", dn, "mm"),
        ("NominalPressureRepresentation", "PN 16"),
        ("FlangeType", "WN"),
        ("FlangeStandard", "EN 1092-1"),
        ("GasketType", "spiral wound"),
        ("BoltMaterial", "A2-70"),
    ]


# part shorthands used in the segment tables below:
#   P         plain pipe            F   flange
#   B         property break        R   reducer
#   ("P", id, tag, dn, description) tagged (instrumented) pipe
#   ("V", cls, id, tag, dn, description, extra) valve
#   ("O", id, tag, page, description) pipe off-page connector
#   ("T", id) pipe tee

VALVES = {
    "V104.01": ("GateValve", "Feed block valve at the unit inlet; locked open during normal operation and closed only for unit isolation at turnaround."),
    "V104.02": ("GateValve", "Suction block valve for centrifugal pump P4711; closed when the pump is pulled for maintenance."),
    "V104.03": ("CheckValve", "Discharge check valve preventing reverse flow through P4711 when the spare pump runs; swing type with a soft seat."),
    "V104.04": ("GateValve", "Discharge block valve for centrifugal pump P4711; throttled only during start-up, otherwise fully open."),
    "V104.05": ("GateValve", "Suction block valve for reciprocating pump P4712; closed when the pump is pulled for maintenance."),
    "V104.06": ("CheckValve", "Discharge check valve preventing reverse flow through P4712; piston type suited to pulsating flow."),
    "V104.07": ("GateValve", "Crossover block valve joining the P4712 discharge into the common product header downstream of the P4711 check valve."),
    "V104.08": ("BallValve", "Tank drain valve to the closed drain system; car-sealed closed and opened only under a drain permit."),
}


def _systems() -> list:
    return [
        (
            "SYS-FEED",
            [("LineNumber", "104-01"), ("FluidCode", "P"), ("NominalDiameter", "80", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", None, None,
                    [
                        ("O", "PC-FEED", "FEED-104", "PID-0102", "Feed inlet battery limit from the upstream reaction unit, continuation on drawing PID-0102."),
                        "B", "F",
                        ("P", "PIPE-104-P", "104-P", "80", "Feed header pressure tapping spool, monitored by PT104."),
                        "F", "P", "F", "P", "F", "P", "F",
                    ],
                ),
                (
                    "S2", "SYS-FEED-S1-F5", "NOZ-H1008-1.1",
                    [
                        ("V", None, "PC-V10401", "V104.01", "80", None, []),
                        "F",
                        ("P", "PIPE-104-F", "104-F", "80", "Feed metering spool carrying the orifice run for flow transmitter FT104."),
                        "F", "P", "R", "P", "F", "P", "F",
                    ],
                ),
            ],
        ),
        (
            "SYS-FILL",
            [("LineNumber", "104-02"), ("FluidCode", "P"), ("NominalDiameter", "80", "mm"), ("PipingClassCode", "CS16")],
            [
                ("S1", "NOZ-H1008-2.1", "NOZ-T4750-1.1", ["F", "P", "F", "P", "F", "P", "F", "P", "F", "P", "F"]),
            ],
        ),
        (
            "SYS-TKOUT",
            [("LineNumber", "104-03"), ("FluidCode", "P"), ("NominalDiameter", "100", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "NOZ-T4750-2.1", None,
                    [
                        "F", "P", "F",
                        ("V", "GlobeValve", "PC-LV4750", "LV4750", "100",
                         "Tank level control valve on the common pump suction header, "
                         "actuated by level loop LIC4750.",
                         [("FailAction", "fail open")]),
                        "F",
                    ],
                ),
                ("S2", "SYS-TKOUT-S1-F3", None, ["P", "F", "P", "F", "P", ("T", "PT-TEE-1")]),
            ],
        ),
        (
            "SYS-P1S",
            [("LineNumber", "104-04"), ("FluidCode", "P"), ("NominalDiameter", "100", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "PT-TEE-1", "NOZ-P4711-1",
                    ["F", "P", "F", ("V", None, "PC-V10402", "V104.02", "100", None, []), "F", "P", "F", "P", "F", "P", "F"],
                ),
            ],
        ),
        (
            "SYS-P1D",
            [("LineNumber", "104-05"), ("FluidCode", "P"), ("NominalDiameter", "80", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "NOZ-P4711-2", None,
                    ["F", "P", "F", ("V", None, "PC-V10403", "V104.03", "80", None, []), "F"],
                ),
                (
                    "S2", "SYS-P1D-S1-F3", None,
                    [
                        ("P", "PIPE-104-P1", "104-P1", "80", "P4711 discharge spool with local pressure gauge PI4711."),
                        "F",
                        ("V", None, "PC-V10404", "V104.04", "80", None, []),
                        "F", "P", "F", "P", "F",
                        ("T", "PT-TEE-2"),
                    ],
                ),
            ],
        ),
        (
            "SYS-P2S",
            [("LineNumber", "104-06"), ("FluidCode", "P"), ("NominalDiameter", "100", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "PT-TEE-1", "NOZ-P4712-1",
                    ["F", "P", "F", ("V", None, "PC-V10405", "V104.05", "100", None, []), "F", "P", "F", "P", "F", "P", "F"],
                ),
            ],
        ),
        (
            "SYS-P2D",
            [("LineNumber", "104-07"), ("FluidCode", "P"), ("NominalDiameter", "80", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "NOZ-P4712-2", None,
                    [
                        "F", "P", "F",
                        ("V", None, "PC-V10406", "V104.06", "80", None, []),
                        "F",
                        ("P", "PIPE-104-P2", "104-P2", "80", "P4712 discharge spool with local pressure gauge PI4712."),
                        "F", "P", "F",
                        ("T", "PT-TEE-3"),
                    ],
                ),
            ],
        ),
        (
            "SYS-RLF",
            [("LineNumber", "104-08"), ("FluidCode", "P"), ("NominalDiameter", "50", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "PT-TEE-3", None,
                    [
                        "F",
                        ("V", "SafetyValve", "PC-SV10401", "SV104.01", "50",
                         "Spring-loaded full-flow safety valve protecting the positive-displacement "
                         "pump discharge against blocked outlet; relieves to the flare header.",
                         [("SetPressure", "6.0", "bar")]),
                        "F", "P", "F", "P", "F", "P", "B",
                        ("O", "PC-FLARE", "FLARE-104", "PID-0109", "Relief tie-in to the low-pressure flare header, continuation on drawing PID-0109."),
                    ],
                ),
            ],
        ),
        (
            "SYS-JOIN",
            [("LineNumber", "104-09"), ("FluidCode", "P"), ("NominalDiameter", "80", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "PT-TEE-3", "PT-TEE-2",
                    ["F", ("V", None, "PC-V10407", "V104.07", "80", None, []), "F", "P", "F", "P", "F", "P", "F"],
                ),
            ],
        ),
        (
            "SYS-PROD",
            [("LineNumber", "104-10"), ("FluidCode", "P"), ("NominalDiameter", "80", "mm"), ("PipingClassCode", "CS16")],
            [
                ("S1", "PT-TEE-2", "NOZ-H1007-1", ["F", "P", "R", "P", "F"]),
                (
                    "S2", "NOZ-H1007-2", None,
                    [
                        "F", "P", "F", "P", "F", "P", "B",
                        ("O", "PC-PROD", "PROD-104", "PID-0105", "Cooled product to the storage battery limit, continuation on drawing PID-0105."),
                    ],
                ),
            ],
        ),
        (
            "SYS-CWS",
            [("LineNumber", "471-01"), ("FluidCode", "CWS"), ("NominalDiameter", "50", "mm"), ("PipingClassCode", "CS10")],
            [
                (
                    "S1", None, "NOZ-H1008-3.1",
                    [
                        ("O", "PC-CWS", "CWS-104", "PID-0201", "Cooling water supply from the utility header, continuation on drawing PID-0201."),
                        "B", "F", "P", "F", "P", "F",
                        ("V", "GlobeValve", "PC-TV4750", "TV4750", "50",
                         "Tempered-water control valve trimming the preheater duty, actuated "
                         "by temperature loop TIC4750.",
                         [("FailAction", "fail closed")]),
                        "F", "P", "F", "P", "F",
                    ],
                ),
            ],
        ),
        (
            "SYS-CWR",
            [("LineNumber", "471-02"), ("FluidCode", "CWR"), ("NominalDiameter", "50", "mm"), ("PipingClassCode", "CS10")],
            [
                (
                    "S1", "NOZ-H1008-4.1", None,
                    [
                        "F", "P", "F", "P", "F", "P", "B",
                        ("O", "PC-CWR", "CWR-104", "PID-0201", "Cooling water return to the utility header, continuation on drawing PID-0201."),
                    ],
                ),
            ],
        ),
        (
            "SYS-DRN",
            [("LineNumber", "104-11"), ("FluidCode", "P"), ("NominalDiameter", "50", "mm"), ("PipingClassCode", "CS16")],
            [
                (
                    "S1", "NOZ-T4750-3.1", None,
                    [
                        "F",
                        ("V", None, "PC-V10408", "V104.08", "50", None, []),
                        "F", "P", "F", "P", "F", "P", "B",
                        ("O", "PC-DRAIN", "DRAIN-104", "PID-0108", "Drain tie-in to the closed drain collection system, continuation on drawing PID-0108."),
                    ],
                ),
            ],
        ),
    ]


def build_piping(root: ET.Element) -> None:
    for sys_id, sys_attrs, segments in _systems():
        system = item(root, "PipingNetworkSystem", "PipingNetworkSystem", sys_id, attrs=sys_attrs)
        dn = next(str(a[1]) for a in sys_attrs if a[0] == "NominalDiameter")
        for seg_name, from_ref, to_ref, parts in segments:
            seg_id = f"{sys_id}-{seg_name}"
            segment = item(
                system, "PipingNetworkSegment", "PipingNetworkSegment", seg_id,
                attrs=[("SegmentNumber", seg_name.lstrip("S"))],
            )
            counters = {"P": 0, "F": 0, "B": 0, "R": 0}

            def auto_id(kind: str) -> str:
                counters[kind] += 1
                return f"{seg_id}-{kind}{counters[kind]}"

            for part in parts:
                if part == "P":
                    item(segment, "PipingComponent", "Pipe", auto_id("P"), attrs=_pipe_attrs(dn))
                elif part == "F":
                    item(segment, "PipingComponent", "Flange", auto_id("F"), attrs=_flange_attrs(dn))
                elif part == "B":
                    item(segment, "PipingComponent", "PropertyBreak", auto_id("B"), attrs=[("PipingClassChange", "CS16/CS10")])
                elif part == "R":
                    item(segment, "PipingComponent", "PipeReducer", auto_id("R"), attrs=[("NominalDiameterLarge", "100", "mm"), ("NominalDiameterSmall", "80", "mm")])
                elif part[0] == "P":
                    _, pid, tag, pdn, description = part
                    item(segment, "PipingComponent", "Pipe", pid, tag=tag, attrs=_pipe_attrs(pdn) + [("Description", description)])
                elif part[0] == "V":
                    _, cls, vid, tag, vdn, description, extra = part
                    cls = cls or VALVES[tag][0]
                    description = description or VALVES[tag][1]
                    item(segment, "PipingComponent", cls, vid, tag=tag, attrs=_valve_attrs(vdn, description, extra))
                elif part[0] == "O":
                    _, oid, tag, page, description = part
                    item(
                        segment, "PipingComponent", "PipeOffPageConnector", oid, tag=tag,
                        attrs=[("CrossPageReference", page), ("Description", description)],
                    )
                elif part[0] == "T":
                    item(segment, "PipingComponent", "PipeTee", part[1], attrs=[("NominalDiameter", dn, "mm")])
                else:
                    raise ValueError(f"unknown part spec {part!r}")

            conn = {}
            if from_ref:
                conn["FromID"] = from_ref
            if to_ref:
                conn["ToID"] = to_ref
            if conn:
                ET.SubElement(segment, "Connection", conn)


# ---------------------------------------------------------------------------
# instrumentation


INSTRUMENTS = [
    ("ProcessSignalGeneratingFunction", "IF-TT4750", "TT4750",
     [("MeasuredVariable", "temperature"), ("SignalType", "4-20 mA"), ("MeasuringRange", "0..120", "degC"),
      ("Description", "Tank temperature transmitter, Pt100 element in a thermowell, feeding control loop TIC4750.")]),
    ("ProcessInstrumentationFunction", "IF-TIC4750", "TIC4750",
     [("ControllerType", "PID"), ("SignalType", "4-20 mA"),
      ("Description", "Tank temperature controller in the DCS; trims the tempered-water valve TV4750 at the feed preheater to hold the tank at 60 degC.")]),
    ("ActuatingFunction", "IF-TY4750", "TY4750",
     [("ActuationType", "pneumatic"), ("SignalType", "4-20 mA"),
      ("Description", "Current-to-pneumatic converter driving the diaphragm actuator of temperature control valve TV4750.")]),
    ("ProcessSignalGeneratingFunction", "IF-LT4750", "LT4750",
     [("MeasuredVariable", "level"), ("SignalType", "4-20 mA"), ("MeasuringRange", "0..100", "%"),
      ("Description", "Tank level transmitter, guided-wave radar, feeding control loop LIC4750.")]),
    ("ProcessInstrumentationFunction", "IF-LIC4750", "LIC4750",
     [("ControllerType", "PID"), ("SignalType", "4-20 mA"),
      ("Description", "Tank level controller in the DCS; throttles level control valve LV4750 on the pump suction header to hold a constant working level.")]),
    ("ActuatingFunction", "IF-LY4750", "LY4750",
     [("ActuationType", "pneumatic"), ("SignalType", "4-20 mA"),
      ("Description", "Current-to-pneumatic converter driving the diaphragm actuator of level control valve LV4750.")]),
    ("ProcessSignalGeneratingFunction", "IF-LSH4750", "LSH4750",
     [("MeasuredVariable", "level"), ("SignalType", "binary"),
      ("Description", "Independent high-level switch on tank T4750, vibrating fork, raising alarm XA4750 on a hardwired circuit.")]),
    ("SignalOffPageConnector", "IF-XA4750", "XA4750",
     [("CrossPageReference", "PID-0110"),
      ("Description", "High-level alarm annunciation to the control room panel, continuation on drawing PID-0110.")]),
    ("ProcessSignalGeneratingFunction", "IF-FT104", "FT104",
     [("MeasuredVariable", "flow"), ("SignalType", "4-20 mA"), ("MeasuringRange", "0..40", "m3/h"),
      ("Description", "Feed flow transmitter, differential pressure over the orifice run of the feed metering spool 104-F.")]),
    ("ProcessInstrumentationFunction", "IF-FI104", "FI104",
     [("SignalType", "4-20 mA"),
      ("Description", "Feed flow indication in the control room; totalised for the daily production log.")]),
    ("SignalOffPageConnector", "IF-XO104", "XO104",
     [("CrossPageReference", "PID-0111"),
      ("Description", "Feed flow signal to the plant historian, continuation on drawing PID-0111.")]),
    ("ProcessSignalGeneratingFunction", "IF-PI4711", "PI4711",
     [("MeasuredVariable", "pressure"), ("SignalType", "local"), ("MeasuringRange", "0..16", "bar"),
      ("Description", "Local bourdon-tube pressure gauge on the P4711 discharge spool 104-P1.")]),
    ("ProcessSignalGeneratingFunction", "IF-PI4712", "PI4712",
     [("MeasuredVariable", "pressure"), ("SignalType", "local"), ("MeasuringRange", "0..16", "bar"),
      ("Description", "Local bourdon-tube pressure gauge on the P4712 discharge spool 104-P2.")]),
    ("ProcessSignalGeneratingFunction", "IF-PT104", "PT104",
     [("MeasuredVariable", "pressure"), ("SignalType", "4-20 mA"), ("MeasuringRange", "0..10", "bar"),
      ("Description", "Feed header pressure transmitter on the tapping spool 104-P at the unit inlet.")]),
    ("ProcessInstrumentationFunction", "IF-PIR104", "PIR104",
     [("SignalType", "4-20 mA"),
      ("Description", "Feed pressure recording in the control room for surveillance of the upstream unit.")]),
    ("ProcessSignalGeneratingFunction", "IF-TI4750", "TI4750",
     [("MeasuredVariable", "temperature"), ("SignalType", "local"), ("MeasuringRange", "0..120", "degC"),
      ("Description", "Local bimetal dial thermometer on tank T4750, shell-mounted beside the level bridle.")]),
]

SIGNALS = [
    ("EQ-T4750", "IF-TT4750"),
    ("IF-TT4750", "IF-TIC4750"),
    ("IF-TIC4750", "IF-TY4750"),
    ("IF-TY4750", "PC-TV4750"),
    ("EQ-T4750", "IF-LT4750"),
    ("IF-LT4750", "IF-LIC4750"),
    ("IF-LIC4750", "IF-LY4750"),
    ("IF-LY4750", "PC-LV4750"),
    ("EQ-T4750", "IF-LSH4750"),
    ("IF-LSH4750", "IF-XA4750"),
    ("PIPE-104-F", "IF-FT104"),
    ("IF-FT104", "IF-FI104"),
    ("IF-FT104", "IF-XO104"),
    ("PIPE-104-P", "IF-PT104"),
    ("IF-PT104", "IF-PIR104"),
    ("PIPE-104-P1", "IF-PI4711"),
    ("PIPE-104-P2", "IF-PI4712"),
    ("EQ-T4750", "IF-TI4750"),
]


def build_instrumentation(root: ET.Element) -> None:
    for class_name, item_id, tag, attrs in INSTRUMENTS:
        item(root, class_name, class_name, item_id, tag=tag, attrs=attrs)
    for n, (from_id, to_id) in enumerate(SIGNALS, start=1):
        line = ET.SubElement(root, "SignalLine", {"ID": f"SL-{n:02d}"})
        ET.SubElement(line, "Connection", {"FromID": from_id, "ToID": to_id})


# ---------------------------------------------------------------------------
# document


def build_document() -> ET.Element:
    global _coord_counter
    _coord_counter = 0
    root = ET.Element("PlantModel", {"xmlns": "http://sandbox.dexpi.org/PlantModel"})
    ET.SubElement(
        root,
        "PlantInformation",
        {
            "SchemaVersion": "4.2",
            "OriginatingSystem": "PlantEditor 9.1",
            "Date": "2024-05-16",
            "ProjectName": "Tank Farm 104",
            "Is3D": "no",
            "Units": "mm",
        },
    )
    ET.SubElement(root, "Drawing", {"Name": "PID-104-4750", "Revision": "C", "Size": "A1"})
    build_equipment(root)
    build_piping(root)
    build_instrumentation(root)
    return root


def render(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def write_fixture(path: Path) -> str:
    text = render(build_document())
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return text


def print_stats(text: str) -> None:
    from pidgraph.condense import condense
    from pidgraph.graph import build_graph
    from pidgraph.graphio import export_graphml, estimate_tokens
    from pidgraph.parser import parse_dexpi

    model = parse_dexpi(text)
    complete = build_graph(model)
    condensed, report = condense(complete)
    valve_tags = sorted(
        str(n.properties.get("tagName"))
        for n in condensed.nodes.values()
        if "valve" in n.labels
    )
    print(f"document chars:    {len(text)}")
    print(f"items parsed:      {len(model.items)}")
    print(f"diagnostics:       {[str(d) for d in model.parse_diagnostics]}")
    print(f"complete nodes:    {complete.node_count()}")
    print(f"complete edges:    {complete.edge_count()}")
    print(f"complete tokens:   {estimate_tokens(export_graphml(complete)).token_count}")
    print(f"condensed nodes:   {condensed.node_count()}")
    print(f"condensed edges:   {condensed.edge_count()}")
    print(f"condensed tokens:  {estimate_tokens(export_graphml(condensed)).token_count}")
    print(f"node reduction:    {1 - condensed.node_count() / complete.node_count():.3f}")
    print(f"edge reduction:    {1 - condensed.edge_count() / complete.edge_count():.3f}")
    print(f"token reduction:   {1 - report.tokens_after / report.tokens_before:.3f}")
    print(f"valves ({len(valve_tags)}):       {valve_tags}")
    print("per step:          " + "; ".join(f"{s.step}: {s.nodes}n/{s.edges}e" for s in report.steps))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures" / "reference_sample.xml"))
    parser.add_argument("--stats", action="store_true", help="print graph measurements after writing")
    args = parser.parse_args()
    text = write_fixture(Path(args.out))
    print(f"wrote {args.out} ({len(text)} chars)")
    if args.stats:
        print_stats(text)


if __name__ == "__main__":
    main()
