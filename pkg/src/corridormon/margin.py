"""Stability indices on the reduced equivalent line.

Three ways of asking the same question ("how close is the corridor to its
transfer limit?"), all evaluated per frame with no history:

* apparent-power index: 100 * |S_corridor| / |S_load|, where both powers use
  the corridor current.  Reaches 100 % at maximum power transfer.
* impedance-match index: 100 * |Z_corridor| / |Z_load|.  Also 100 % at the
  limit, where the apparent load impedance equals the line impedance.
* voltage ratio: |V_load_area| / |V_gen_area - V_load_area|.  Falls towards
  1.0 at the limit from above.

All three depend only on phasor magnitudes of the reduced system, so they
are invariant under a common rotation of every measurement (an arbitrary
synchrophasor reference angle).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CorridorError,
    DegenerateVoltageDifference,
    ZeroCurrent,
    ZeroLoadImpedance,
    ZeroLoadVoltage,
)
from .reduction import EPS_CURRENT, EPS_VOLTAGE_DIFF, ReducedSystem

APPARENT = "apparent"
IMPEDANCE = "impedance"
VRATIO = "vratio"

INDEX_NAMES = (APPARENT, IMPEDANCE, VRATIO)

DEFAULT_THRESHOLD_PCT = 80.0


def apparent_power_index(rs: ReducedSystem) -> float:
    """100 * |S_corridor| / |S_load| in percent."""
    if abs(rs.i_gl) < EPS_CURRENT:
        raise ZeroCurrent("corridor current is zero; power ratio undefined")
    if abs(rs.v_l) == 0.0:
        raise ZeroLoadVoltage("load-area voltage is zero")
    s_gl = rs.v_gl * rs.i_gl.conjugate()
    s_l = rs.v_l * rs.i_gl.conjugate()
    return 100.0 * abs(s_gl) / abs(s_l)


def impedance_match_index(rs: ReducedSystem) -> float:
    """100 * |Z_corridor| / |Z_load| in percent."""
    if rs.z_gl is None or rs.z_l is None:
        raise ZeroCurrent("corridor current too small for impedance fields")
    if abs(rs.z_l) == 0.0:
        raise ZeroLoadImpedance("apparent load impedance is zero")
    return 100.0 * abs(rs.z_gl) / abs(rs.z_l)


def voltage_ratio_index(rs: ReducedSystem) -> float:
    """|V_load_area| / |V_gen_area - V_load_area|; approaches 1 at the limit."""
    if abs(rs.v_gl) < EPS_VOLTAGE_DIFF:
        raise DegenerateVoltageDifference(
            "area voltages coincide; ratio undefined"
        )
    return abs(rs.v_l) / abs(rs.v_gl)


_INDEX_FUNCS = {
    APPARENT: apparent_power_index,
    IMPEDANCE: impedance_match_index,
    VRATIO: voltage_ratio_index,
}


@dataclass(frozen=True)
class MarginReport:
    """Per-frame index values plus the alarm decision.

    An index that could not be evaluated is ``None``.  ``alarm`` compares the
    chosen index against ``threshold``: at or above it for the two percent
    indices, at or below it for the voltage ratio (which falls towards its
    collapse value of 1.0, so its threshold is a plain ratio, not a percent).
    """

    timestamp_us: int
    apparent_power_index_pct: float | None
    impedance_match_pct: float | None
    voltage_ratio: float | None
    alarm: bool
    chosen_index: str
    threshold: float


def evaluate(
    rs: ReducedSystem,
    chosen_index: str = APPARENT,
    threshold: float = DEFAULT_THRESHOLD_PCT,
) -> MarginReport:
    """Evaluate all three indices and raise the alarm from the chosen one.

    Indices other than the chosen one are best-effort: a failure there is
    recorded as ``None`` without failing the report.  A failure of the chosen
    index propagates.
    """
    if chosen_index not in _INDEX_FUNCS:
        raise ValueError(f"unknown index {chosen_index!r}; have {INDEX_NAMES}")

    values: dict[str, float | None] = {}
    for name, func in _INDEX_FUNCS.items():
        try:
            values[name] = func(rs)
        except CorridorError:
            if name == chosen_index:
                raise
            values[name] = None

    chosen_value = values[chosen_index]
    assert chosen_value is not None
    if chosen_index == VRATIO:
        alarm = chosen_value <= threshold
    else:
        alarm = chosen_value >= threshold

    return MarginReport(
        timestamp_us=rs.timestamp_us,
        apparent_power_index_pct=values[APPARENT],
        impedance_match_pct=values[IMPEDANCE],
        voltage_ratio=values[VRATIO],
        alarm=alarm,
        chosen_index=chosen_index,
        threshold=threshold,
    )
