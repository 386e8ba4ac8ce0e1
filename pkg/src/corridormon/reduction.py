"""Reduction of a multi-line corridor to one equivalent line.

Every corridor line contributes its series admittance.  The corridor
admittance is the sum over all lines, and each boundary bus receives a
complex weight: the admittances of its incident corridor lines divided by
the corridor total.  The weighted bus voltages give one generation-side and
one load-side area voltage, and the line currents sum to the corridor
current.  With the weights defined this way the equivalent line satisfies

    Y_corridor * (V_gen_area - V_load_area) = sum_ij Y_ij * (V_i - V_j)

identically, so a corridor whose boundary voltages are equal on each side
reduces with no information loss at all.

Admittances either come from a static per-line table or are estimated each
frame as I / (V_gen_end - V_load_end); estimation needs no network data and
tracks switching, but requires the endpoint voltages to differ.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import (
    DegenerateVoltageDifference,
    MissingAdmittance,
    MissingMeasurement,
    ZeroCorridorAdmittance,
)
from .network import CorridorTopology, SynchroFrame

# Admittance source sentinel for reduce_frame.
ESTIMATE_FROM_FRAME = "estimate-from-frame"

# |V_gen_end - V_load_end| below this cannot be divided by safely (pu).
EPS_VOLTAGE_DIFF = 1e-9

# |I_corridor| below this leaves the impedance fields of the reduced system
# undefined (pu).
EPS_CURRENT = 1e-12

LineAdmittanceSet = dict[str, complex]


@dataclass(frozen=True)
class WeightSet:
    """Complex per-bus combination weights; each side sums to one."""

    gen_weights: dict[str, complex]
    load_weights: dict[str, complex]


@dataclass(frozen=True)
class ReducedSystem:
    """The corridor collapsed to a single equivalent line for one instant.

    ``z_gl`` and ``z_l`` (the equivalent series impedance seen from the
    measurements and the apparent load impedance) are ``None`` when the
    corridor current is too small to divide by.
    """

    timestamp_us: int
    v_g: complex
    v_l: complex
    v_gl: complex
    i_gl: complex
    y_gl: complex
    weights: WeightSet
    line_admittances: LineAdmittanceSet
    z_gl: complex | None
    z_l: complex | None


def line_admittance(
    v_gen_side: complex,
    v_load_side: complex,
    current: complex,
    eps: float = EPS_VOLTAGE_DIFF,
) -> complex:
    """Series admittance of one line from its two-ended measurements.

    ``current`` must be oriented from the generation-side endpoint to the
    load-side endpoint.
    """
    dv = v_gen_side - v_load_side
    if abs(dv) < eps:
        raise DegenerateVoltageDifference(
            f"endpoint voltages differ by |{abs(dv):.3e}| < {eps:g}"
        )
    return current / dv


def corridor_admittance(
    admittances: LineAdmittanceSet, topo: CorridorTopology
) -> complex:
    """Sum of the corridor line admittances."""
    total = 0j
    for line in topo.corridor_lines:
        if line.id not in admittances:
            raise MissingAdmittance(f"no admittance for corridor line {line.id!r}")
        total += admittances[line.id]
    return total


def compute_weights(
    admittances: LineAdmittanceSet, topo: CorridorTopology
) -> WeightSet:
    """Per-bus voltage weights: incident corridor admittance over the total.

    A boundary bus with no in-service corridor line simply gets weight zero.
    Both sides sum to one by construction.
    """
    y_gl = corridor_admittance(admittances, topo)
    if abs(y_gl) == 0.0:
        raise ZeroCorridorAdmittance("corridor admittances sum to zero")

    gen_sums = {bus: 0j for bus in topo.gen_buses}
    load_sums = {bus: 0j for bus in topo.load_buses}
    for line in topo.corridor_lines:
        y = admittances[line.id]
        gen_sums[topo.gen_side(line.id)] += y
        load_sums[topo.load_side(line.id)] += y
    return WeightSet(
        gen_weights={bus: y / y_gl for bus, y in gen_sums.items()},
        load_weights={bus: y / y_gl for bus, y in load_sums.items()},
    )


def _in_service_topology(
    frame: SynchroFrame, topo: CorridorTopology
) -> CorridorTopology:
    """Topology restricted to corridor lines the frame actually measured.

    A corridor line with no current in the frame is treated as switched out
    for that instant.
    """
    present = tuple(
        line for line in topo.corridor_lines if line.id in frame.line_currents
    )
    if not present:
        raise MissingMeasurement("frame carries no corridor line currents")
    if len(present) == len(topo.corridor_lines):
        return topo
    sub = replace(topo, corridor_lines=present)
    sub._lines_by_id.update(topo._lines_by_id)
    return sub


def reduce_frame(
    frame: SynchroFrame,
    topo: CorridorTopology,
    admittances: LineAdmittanceSet | str = ESTIMATE_FROM_FRAME,
) -> ReducedSystem:
    """Collapse one measurement frame to the equivalent single line.

    ``admittances`` is either the sentinel :data:`ESTIMATE_FROM_FRAME` or a
    static per-line table (only the entries for in-service lines are used).
    """
    live = _in_service_topology(frame, topo)

    used: LineAdmittanceSet = {}
    for line in live.corridor_lines:
        gen_bus = live.gen_side(line.id)
        load_bus = live.load_side(line.id)
        try:
            v_gen = frame.bus_voltages[gen_bus]
            v_load = frame.bus_voltages[load_bus]
        except KeyError as exc:
            raise MissingMeasurement(f"no voltage for bus {exc.args[0]!r}") from exc
        if isinstance(admittances, str):
            if admittances != ESTIMATE_FROM_FRAME:
                raise ValueError(f"unknown admittance source {admittances!r}")
            used[line.id] = line_admittance(
                v_gen, v_load, frame.line_currents[line.id]
            )
        else:
            if line.id not in admittances:
                raise MissingAdmittance(
                    f"no admittance for corridor line {line.id!r}"
                )
            used[line.id] = admittances[line.id]

    y_gl = corridor_admittance(used, live)
    weights = compute_weights(used, live)

    v_g = sum(
        weights.gen_weights[bus] * frame.bus_voltages[bus]
        for bus in live.gen_buses
    )
    v_l = sum(
        weights.load_weights[bus] * frame.bus_voltages[bus]
        for bus in live.load_buses
    )
    v_gl = v_g - v_l
    i_gl = sum(frame.line_currents[line.id] for line in live.corridor_lines)

    if abs(i_gl) < EPS_CURRENT:
        z_gl = z_l = None
    else:
        z_gl = v_gl / i_gl
        z_l = v_l / i_gl

    return ReducedSystem(
        timestamp_us=frame.timestamp_us,
        v_g=v_g,
        v_l=v_l,
        v_gl=v_gl,
        i_gl=i_gl,
        y_gl=y_gl,
        weights=weights,
        line_admittances=used,
        z_gl=z_gl,
        z_l=z_l,
    )
