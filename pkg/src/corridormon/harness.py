"""Reference experiments for the corridor reduction.

Two workloads live here:

* a golden check of the two-line corridor benchmark: known admittances and
  equal boundary voltages at the collapse point must reproduce the published
  rounded values of the reduced system (the published table is only
  consistent to its two significant figures, hence the loose tolerance), and
* a load-imbalance error sweep: the corridor reduction is exact when the
  load-side voltages are equal, so transferring real power between the two
  load buses and comparing full-network loadability against the reduced
  two-bus maximum quantifies how fast the estimate degrades.

The default study network lives in ``data/`` as JSON next to this module.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib.resources import files

import numpy as np

from .errors import BaseCaseInfeasible
from .margin import apparent_power_index, impedance_match_index, voltage_ratio_index
from .network import CorridorTopology, Line, SynchroFrame, build_topology
from .phasors import angle_between_deg
from .powerflow import (
    PfNetwork,
    max_loadability,
    network_from_dict,
    solution_frame,
    two_bus_max_power,
)
from .reduction import ReducedSystem, reduce_frame

# --- the two-line corridor benchmark -------------------------------------------
#
# Two generator buses at 1+0j feed two load buses at 0.5-0.2j, one corridor
# line each, with intra-area ties carrying no current.  This operating point
# sits exactly at maximum power transfer, so every index must read collapse.

BENCH_LINE_ADMITTANCES = {"gl1": 3.8 - 19.1j, "gl2": 11.4 - 57.2j}
BENCH_GEN_VOLTAGE = 1.0 + 0.0j
BENCH_LOAD_VOLTAGE = 0.5 - 0.2j

# Published rounded values for the reduced system at that operating point.
BENCH_EXPECTED = {
    "corridor_admittance": 15.3 - 76.3j,
    "corridor_admittance_magnitude": 77.82,
    "weight_1": 0.25 + 0.0j,
    "weight_2": 0.75 + 0.0j,
    "area_voltage_difference": 0.5 + 0.2j,
    "corridor_current": 24.5 - 34.8j,
    "load_admittance_magnitude": 77.82,
    "load_apparent_power_magnitude": 23.3,
    "apparent_power_index_pct": 100.0,
    "impedance_match_pct": 100.0,
    "voltage_ratio": 1.0,
}

# The published table is internally consistent only to its 2-figure rounding.
BENCH_TOLERANCE = 0.05


def bench_topology() -> CorridorTopology:
    return build_topology(
        ["g1", "g2"],
        ["l1", "l2"],
        [Line("gl1", "g1", "l1"), Line("gl2", "g2", "l2")],
        [Line("gg", "g1", "g2"), Line("ll", "l1", "l2")],
    )


def bench_frame(timestamp_us: int = 0) -> SynchroFrame:
    """The benchmark operating point with currents consistent with the admittances."""
    dv = BENCH_GEN_VOLTAGE - BENCH_LOAD_VOLTAGE
    currents = {line: y * dv for line, y in BENCH_LINE_ADMITTANCES.items()}
    currents["gg"] = 0.0 + 0.0j  # intra-area ties are currentless here
    currents["ll"] = 0.0 + 0.0j
    return SynchroFrame(
        timestamp_us,
        {
            "g1": BENCH_GEN_VOLTAGE,
            "g2": BENCH_GEN_VOLTAGE,
            "l1": BENCH_LOAD_VOLTAGE,
            "l2": BENCH_LOAD_VOLTAGE,
        },
        currents,
    )


@dataclass(frozen=True)
class GoldenCheck:
    name: str
    computed: complex | float
    expected: complex | float
    rel_err: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.rel_err <= self.tol


@dataclass(frozen=True)
class GoldenReport:
    checks: tuple[GoldenCheck, ...]
    reduced: ReducedSystem

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def to_text(self) -> str:
        out = io.StringIO()
        width = max(len(check.name) for check in self.checks)
        for check in self.checks:
            out.write(
                f"{check.name:<{width}}  computed={_fmt_value(check.computed):>22}"
                f"  expected={_fmt_value(check.expected):>14}"
                f"  rel_err={check.rel_err:.2e}"
                f"  {'ok' if check.ok else 'MISMATCH'}\n"
            )
        return out.getvalue()


def _fmt_value(value: complex | float) -> str:
    if isinstance(value, complex):
        return f"{value.real:.6g}{value.imag:+.6g}j"
    return f"{value:.6g}"


def run_perfect_reduction() -> GoldenReport:
    """Reduce the benchmark frame and compare against the published values.

    Raises :class:`AssertionError` naming the first mismatched quantity;
    otherwise returns the full comparison report.
    """
    topo = bench_topology()
    rs = reduce_frame(bench_frame(), topo)

    s_l = rs.v_l * rs.i_gl.conjugate()
    computed = {
        "corridor_admittance": rs.y_gl,
        "corridor_admittance_magnitude": abs(rs.y_gl),
        "weight_1": rs.weights.gen_weights["g1"],
        "weight_2": rs.weights.gen_weights["g2"],
        "area_voltage_difference": rs.v_gl,
        "corridor_current": rs.i_gl,
        "load_admittance_magnitude": abs(rs.i_gl / rs.v_l),
        "load_apparent_power_magnitude": abs(s_l),
        "apparent_power_index_pct": apparent_power_index(rs),
        "impedance_match_pct": impedance_match_index(rs),
        "voltage_ratio": voltage_ratio_index(rs),
    }

    checks = []
    for name, expected in BENCH_EXPECTED.items():
        value = computed[name]
        rel_err = abs(value - expected) / abs(expected)
        check = GoldenCheck(name, value, expected, rel_err, BENCH_TOLERANCE)
        if not check.ok:
            raise AssertionError(
                f"{name}: computed {_fmt_value(value)}, expected "
                f"{_fmt_value(expected)} (rel err {rel_err:.3e} > {BENCH_TOLERANCE})"
            )
        checks.append(check)
    return GoldenReport(tuple(checks), rs)


# --- default study network -------------------------------------------------------


def default_network() -> PfNetwork:
    data = json.loads(
        files("corridormon.data").joinpath("corridor4bus_net.json").read_text()
    )
    return network_from_dict(data)


def default_topology() -> CorridorTopology:
    from .network import topology_from_dict

    data = json.loads(
        files("corridormon.data").joinpath("corridor4bus_topology.json").read_text()
    )
    return topology_from_dict(data)


def balanced_split(net: PfNetwork, topo: CorridorTopology) -> tuple[float, ...]:
    """Load shares proportional to each load bus's corridor admittance.

    Loading along this direction keeps the load-side voltages (nearly) equal,
    which is the zero-error point of the reduction.
    """
    by_id = {line.id: line.y for line in net.lines}
    sums = {bus: 0.0 for bus in topo.load_buses}
    for line in topo.corridor_lines:
        sums[topo.load_side(line.id)] += abs(by_id[line.id])
    total = sum(sums.values())
    return tuple(sums[bus] / total for bus in topo.load_buses)


def default_splits(
    net: PfNetwork | None = None, topo: CorridorTopology | None = None
) -> list[tuple[float, float]]:
    """The standard imbalance grid: coarse shares plus the exact balanced split."""
    net = net if net is not None else default_network()
    topo = topo if topo is not None else default_topology()
    star = balanced_split(net, topo)[0]
    shares = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, star, 0.2, 0.1, 0.01]
    return [(s, 1.0 - s) for s in shares]


# --- error sweep -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One split of the imbalance sweep, complete system versus reduced line.

    ``error_pct`` is signed: a reduced system that overestimates the true
    limit yields a negative error.
    """

    p_max_l1: float
    p_max_l2: float
    p_max_total: float
    dv_mag: float
    d_angle_deg: float
    p_max_reduced: float
    error_pct: float


def _normalize_split(split, n_loads: int) -> tuple[float, ...]:
    if isinstance(split, (int, float)):
        if n_loads != 2:
            raise ValueError("scalar splits only make sense for two load buses")
        split = (float(split), 1.0 - float(split))
    shares = tuple(float(s) for s in split)
    if len(shares) != n_loads:
        raise ValueError(f"split {split!r} does not match {n_loads} load buses")
    if any(s < 0 for s in shares) or sum(shares) <= 0:
        raise ValueError(f"split {split!r} must be nonnegative with a positive sum")
    total = sum(shares)
    return tuple(s / total for s in shares)


def error_sweep(net: PfNetwork, topo: CorridorTopology, transfer_steps) -> list[SweepRow]:
    """Quantify the reduction error while real power shifts between the loads.

    For each split: find the complete system's maximum loadability along that
    direction, reduce the critical frame, then push the reduced system's own
    apparent load (at its power factor) to the equivalent line's maximum.
    The signed percentage difference between the two limits fills the row.
    """
    if len(topo.load_buses) != 2:
        raise ValueError("the sweep table is defined for corridors with two load buses")

    rows = []
    for step in transfer_steps:
        shares = _normalize_split(step, len(topo.load_buses))
        direction = dict(zip(topo.load_buses, shares))
        try:
            result = max_loadability(net, direction, pf_constant=True)
        except BaseCaseInfeasible as exc:
            raise BaseCaseInfeasible(f"split {step!r}: {exc}") from exc

        crit = result.critical_solution
        frame = solution_frame(net, topo, crit, 0)
        rs = reduce_frame(frame, topo)

        s_apparent = rs.v_l * rs.i_gl.conjugate()
        phi = math.atan2(s_apparent.imag, s_apparent.real)
        s_reduced = two_bus_max_power(
            rs.v_g, rs.y_gl, phi, s_seed=abs(result.total_load_s_max)
        )

        v_l1 = crit.bus_voltages[topo.load_buses[0]]
        v_l2 = crit.bus_voltages[topo.load_buses[1]]
        p_total = result.total_load_p_max
        p_reduced = s_reduced.real
        rows.append(
            SweepRow(
                p_max_l1=result.lambda_max * shares[0],
                p_max_l2=result.lambda_max * shares[1],
                p_max_total=p_total,
                dv_mag=abs(v_l1) - abs(v_l2),
                d_angle_deg=angle_between_deg(v_l1, v_l2),
                p_max_reduced=p_reduced,
                error_pct=100.0 * (p_total - p_reduced) / p_reduced,
            )
        )
    return rows


# --- table output ------------------------------------------------------------------

SWEEP_COLUMNS = (
    "p_max_l1",
    "p_max_l2",
    "p_max_total",
    "dv_mag",
    "d_angle_deg",
    "p_max_reduced",
    "error_pct",
)

_UNITS_NOTE = "# angles in degrees, error in percent, other quantities per unit"


def _fmt6(value: float) -> str:
    """Decimal notation with 6 significant digits, never exponent form."""
    if value == 0.0:
        return "0"
    return np.format_float_positional(
        value, precision=6, unique=False, fractional=False, trim="-"
    )


def emit_table(rows: list[SweepRow], format: str = "text") -> str:
    """Serialize sweep rows; ``format`` is "text" (aligned) or "csv"."""
    cells = [
        [_fmt6(getattr(row, col)) for col in SWEEP_COLUMNS] for row in rows
    ]
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(cells)
        return out.getvalue()
    if format == "text":
        widths = [
            max(len(col), *(len(row[i]) for row in cells)) if cells else len(col)
            for i, col in enumerate(SWEEP_COLUMNS)
        ]
        lines = ["  ".join(col.rjust(w) for col, w in zip(SWEEP_COLUMNS, widths))]
        for row in cells:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        lines.append(_UNITS_NOTE)
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")


def parse_sweep_csv(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SWEEP_COLUMNS:
        raise ValueError(f"unexpected sweep header {header!r}")
    return [SweepRow(*(float(cell) for cell in row)) for row in reader if row]
