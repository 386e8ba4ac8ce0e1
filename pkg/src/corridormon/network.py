"""Corridor topology and synchrophasor measurement frames.

A corridor separates a generation-side bus group from a load-side bus group.
Corridor lines span the two sides and are the only branches that enter the
equivalent-line reduction; intra-area ties (generator-to-generator or
load-to-load) are carried along for bookkeeping but never reduced.

Conventions: quantities are per unit, line currents are oriented from the
generation-side endpoint towards the load-side endpoint, and timestamps are
integer microseconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    DanglingEndpoint,
    DuplicateId,
    MissingMeasurement,
    NonFiniteValue,
    NotACorridorLine,
)
from .phasors import is_finite

BusId = str
LineId = str


@dataclass(frozen=True)
class Line:
    """A branch identified by name with two bus endpoints."""

    id: LineId
    from_bus: BusId
    to_bus: BusId


@dataclass(frozen=True)
class CorridorTopology:
    """Static description of which buses and lines form the corridor.

    Treat instances as immutable; build them through :func:`build_topology`
    so the identifier cross-checks have run.
    """

    gen_buses: tuple[BusId, ...]
    load_buses: tuple[BusId, ...]
    corridor_lines: tuple[Line, ...]
    intra_area_lines: tuple[Line, ...] = ()
    _lines_by_id: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def boundary_buses(self) -> tuple[BusId, ...]:
        return self.gen_buses + self.load_buses

    def line(self, line_id: LineId) -> Line:
        return self._lines_by_id[line_id]

    def is_gen_bus(self, bus: BusId) -> bool:
        return bus in self.gen_buses

    def gen_side(self, line_id: LineId) -> BusId:
        """Generation-side endpoint of a corridor line, whatever its file order."""
        line = self.line(line_id)
        return line.from_bus if self.is_gen_bus(line.from_bus) else line.to_bus

    def load_side(self, line_id: LineId) -> BusId:
        line = self.line(line_id)
        return line.to_bus if self.is_gen_bus(line.from_bus) else line.from_bus


def build_topology(
    gen_buses,
    load_buses,
    corridor_lines,
    intra_area_lines=(),
) -> CorridorTopology:
    """Validate identifiers and assemble a :class:`CorridorTopology`.

    Raises :class:`DuplicateId`, :class:`DanglingEndpoint` or
    :class:`NotACorridorLine` when the description is inconsistent.
    """
    gens = tuple(gen_buses)
    loads = tuple(load_buses)
    corridor = tuple(corridor_lines)
    intra = tuple(intra_area_lines)

    if not gens or not loads:
        raise ValueError("need at least one bus on each side of the corridor")
    if not corridor:
        raise ValueError("need at least one corridor line")

    seen: set[str] = set()
    for bus in gens + loads:
        if bus in seen:
            raise DuplicateId(f"bus id {bus!r} listed twice")
        seen.add(bus)

    buses = set(gens) | set(loads)
    gen_set = set(gens)

    line_ids: set[str] = set()
    for line in corridor + intra:
        if line.id in line_ids:
            raise DuplicateId(f"line id {line.id!r} listed twice")
        line_ids.add(line.id)
        for endpoint in (line.from_bus, line.to_bus):
            if endpoint not in buses:
                raise DanglingEndpoint(
                    f"line {line.id!r} references unknown bus {endpoint!r}"
                )

    for line in corridor:
        from_gen = line.from_bus in gen_set
        to_gen = line.to_bus in gen_set
        if from_gen == to_gen:
            raise NotACorridorLine(
                f"line {line.id!r} joins {line.from_bus!r} and {line.to_bus!r}; "
                "a corridor line must span the two sides"
            )
    for line in intra:
        if (line.from_bus in gen_set) != (line.to_bus in gen_set):
            raise NotACorridorLine(
                f"line {line.id!r} spans the corridor but is listed as an "
                "intra-area tie"
            )

    topo = CorridorTopology(gens, loads, corridor, intra)
    topo._lines_by_id.update({ln.id: ln for ln in corridor + intra})
    return topo


@dataclass(frozen=True)
class SynchroFrame:
    """One time-aligned set of boundary measurements.

    ``bus_voltages`` and ``line_currents`` map identifiers to complex per-unit
    phasors.  A frame may carry extra entries (for instance tie-line currents);
    they are kept but never used by the reduction.
    """

    timestamp_us: int
    bus_voltages: dict[BusId, complex]
    line_currents: dict[LineId, complex]


def validate_frame(frame: SynchroFrame, topo: CorridorTopology) -> SynchroFrame:
    """Check coverage and finiteness of a frame against a topology.

    Every boundary bus needs a voltage and every corridor line a current.
    All provided values, including extras, must be finite.  Returns the frame
    unchanged so calls can be chained.
    """
    for bus in topo.boundary_buses:
        if bus not in frame.bus_voltages:
            raise MissingMeasurement(f"no voltage for bus {bus!r}")
    for line in topo.corridor_lines:
        if line.id not in frame.line_currents:
            raise MissingMeasurement(f"no current for line {line.id!r}")
    for key, value in frame.bus_voltages.items():
        if not is_finite(value):
            raise NonFiniteValue(f"voltage at {key!r} is not finite")
    for key, value in frame.line_currents.items():
        if not is_finite(value):
            raise NonFiniteValue(f"current on {key!r} is not finite")
    return frame


# --- topology file format -----------------------------------------------------
#
# JSON object with bus id arrays and line objects:
# {
#   "gen_buses": ["g1", "g2"],
#   "load_buses": ["l1", "l2"],
#   "corridor_lines": [{"id": "gl1", "from": "g1", "to": "l1"}, ...],
#   "intra_area_lines": [{"id": "gg", "from": "g1", "to": "g2"}, ...]
# }


def _line_from_obj(obj) -> Line:
    return Line(id=str(obj["id"]), from_bus=str(obj["from"]), to_bus=str(obj["to"]))


def topology_from_dict(data: dict) -> CorridorTopology:
    return build_topology(
        [str(b) for b in data["gen_buses"]],
        [str(b) for b in data["load_buses"]],
        [_line_from_obj(o) for o in data["corridor_lines"]],
        [_line_from_obj(o) for o in data.get("intra_area_lines", [])],
    )


def topology_to_dict(topo: CorridorTopology) -> dict:
    def as_obj(line: Line) -> dict:
        return {"id": line.id, "from": line.from_bus, "to": line.to_bus}

    return {
        "gen_buses": list(topo.gen_buses),
        "load_buses": list(topo.load_buses),
        "corridor_lines": [as_obj(ln) for ln in topo.corridor_lines],
        "intra_area_lines": [as_obj(ln) for ln in topo.intra_area_lines],
    }


def load_topology(path) -> CorridorTopology:
    with open(path, "r", encoding="utf-8") as fh:
        return topology_from_dict(json.load(fh))


def dump_topology(topo: CorridorTopology, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(topology_to_dict(topo), fh, indent=2)
        fh.write("\n")
