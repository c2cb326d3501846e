"""DEXPI component-class taxonomy.

Maps a component class to its package and the intermediate label tiers
between the package and the class itself. The intermediate tiers make
family-level queries ("all valves", "all instrumentation functions")
plain label lookups on the knowledge graph.

Classes missing from the table fall back to [package, lowerCamel(class)],
so unknown vendor classes pass through without special casing.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

# class -> (package, intermediate tiers). The class tier itself is always
# appended in lowerCamelCase, so it is not repeated here.
_TAXONOMY: Dict[str, Tuple[str, Tuple[str, ...]]] = {
    # --- equipment ---------------------------------------------------
    "Tank": ("equipment", ("vessel",)),
    "PressureVessel": ("equipment", ("vessel",)),
    "Drum": ("equipment", ("vessel",)),
    "Silo": ("equipment", ("vessel",)),
    "CentrifugalPump": ("equipment", ("pump",)),
    "ReciprocatingPump": ("equipment", ("pump",)),
    "RotaryPump": ("equipment", ("pump",)),
    "EjectorPump": ("equipment", ("pump",)),
    "CentrifugalCompressor": ("equipment", ("compressor",)),
    "ReciprocatingCompressor": ("equipment", ("compressor",)),
    "TubularHeatExchanger": ("equipment", ("heatExchanger",)),
    "PlateHeatExchanger": ("equipment", ("heatExchanger",)),
    "AirCooledHeatExchanger": ("equipment", ("heatExchanger",)),
    "ElectricHeater": ("equipment", ("heatExchanger",)),
    "ProcessColumn": ("equipment", ("column",)),
    "Nozzle": ("equipment", ()),
    "Displacer": ("equipment", ()),
    "PumpChamber": ("equipment", ()),
    "Impeller": ("equipment", ()),
    "TubeBundle": ("equipment", ()),
    "Shell": ("equipment", ()),
    "Agitator": ("equipment", ()),
    "HeatingCoil": ("equipment", ()),
    "PlantArea": ("equipment", ("plantStructure",)),
    "PlantSystem": ("equipment", ("plantStructure",)),
    "Site": ("equipment", ("plantStructure",)),
    "ProcessPlant": ("equipment", ("plantStructure",)),
    # --- piping -------------------------------------------------------
    "PipingNetworkSystem": ("piping", ("pipingNetwork",)),
    "PipingNetworkSegment": ("piping", ("pipingNetwork",)),
    "Pipe": ("piping", ()),
    "CenterLine": ("piping", ()),
    "Flange": ("piping", ()),
    "BlindFlange": ("piping", ("flange",)),
    "PipeReducer": ("piping", ("reducer",)),
    "ConcentricDiameterChange": ("piping", ("reducer",)),
    "EccentricDiameterChange": ("piping", ("reducer",)),
    "PropertyBreak": ("piping", ()),
    "PipingNode": ("piping", ()),
    "PipeTee": ("piping", ("fitting",)),
    "PipeCross": ("piping", ("fitting",)),
    "PipeBend": ("piping", ("fitting",)),
    "PipeCoupling": ("piping", ("fitting",)),
    "Strainer": ("piping", ("fitting",)),
    "SightGlass": ("piping", ("fitting",)),
    "PipeOffPageConnector": ("piping", ("offPageConnector",)),
    "PipeFlowArrow": ("piping", ()),
    "GateValve": ("piping", ("valve",)),
    "GlobeValve": ("piping", ("valve",)),
    "BallValve": ("piping", ("valve",)),
    "ButterflyValve": ("piping", ("valve",)),
    "PlugValve": ("piping", ("valve",)),
    "NeedleValve": ("piping", ("valve",)),
    "CheckValve": ("piping", ("valve",)),
    "SwingCheckValve": ("piping", ("valve", "checkValve")),
    "AngleValve": ("piping", ("valve",)),
    "AngleGlobeValve": ("piping", ("valve",)),
    "SafetyValve": ("piping", ("valve", "safetyValve")),
    "SpringLoadedGlobeSafetyValve": ("piping", ("valve", "safetyValve")),
    "SpringLoadedAngleGlobeSafetyValve": ("piping", ("valve", "safetyValve")),
    "RuptureDisc": ("piping", ("safetyDevice",)),
    "CustomPipingComponent": ("piping", ()),
    "PipingComponent": ("piping", ()),
    # --- instrumentation ---------------------------------------------
    "ProcessInstrumentationFunction": ("instrumentation", ("instrumentationFunction",)),
    "ProcessSignalGeneratingFunction": ("instrumentation", ("instrumentationFunction", "measuringFunction")),
    "ProcessControlFunction": ("instrumentation", ("instrumentationFunction",)),
    "ActuatingFunction": ("instrumentation", ("instrumentationFunction", "actuatingFunction")),
    "ActuatingElectricalFunction": ("instrumentation", ("instrumentationFunction", "actuatingFunction")),
    "InstrumentationLoopFunction": ("instrumentation", ("instrumentationFunction",)),
    "SignalGeneratingFunction": ("instrumentation", ("instrumentationFunction", "measuringFunction")),
    "SignalOffPageConnector": ("instrumentation", ("offPageConnector",)),
    "SignalConveyingFunction": ("instrumentation", ()),
    "Transmitter": ("instrumentation", ("instrumentationFunction", "measuringFunction")),
    "ControlledActuator": ("instrumentation", ("actuator",)),
    "OperatedValveReference": ("instrumentation", ()),
    "MeasuringLineFunction": ("instrumentation", ()),
    "SignalLineFunction": ("instrumentation", ()),
}

# Section elements whose descendants default to the section's package when
# the class itself is unknown.
SECTION_PACKAGES: Dict[str, str] = {
    "Equipment": "equipment",
    "TaggedPlantItem": "equipment",
    "PipingNetworkSystem": "piping",
    "PipingNetworkSegment": "piping",
    "PipingComponent": "piping",
    "ProcessInstrumentationFunction": "instrumentation",
    "SignalLine": "instrumentation",
    "InformationFlow": "instrumentation",
}


def lower_camel(name: str) -> str:
    """"ReciprocatingPump" -> "reciprocatingPump"; leaves other casing alone."""
    if not name:
        return name
    return name[0].lower() + name[1:]


def known_class(class_name: str) -> bool:
    return class_name in _TAXONOMY


def package_for_class(class_name: str) -> Optional[str]:
    """Package for a known class, or None when the class is not in the table."""
    entry = _TAXONOMY.get(class_name)
    return entry[0] if entry else None


def tiers_for_class(class_name: str) -> Tuple[str, ...]:
    """Intermediate label tiers for a known class ("" tiers never occur)."""
    entry = _TAXONOMY.get(class_name)
    return entry[1] if entry else ()


def labels_for(class_name: str, package: str) -> List[str]:
    """Full label list: [package, intermediate tiers..., lowerCamel class].

    The package argument wins over the table only for unknown classes;
    known classes always use their table package so labels stay
    consistent across documents.
    """
    entry = _TAXONOMY.get(class_name)
    if entry is None:
        return [package, lower_camel(class_name)]
    pkg, tiers = entry
    return [pkg, *tiers, lower_camel(class_name)]
