"""Command-line front end.

Three subcommands:

* ``monitor`` streams measurement frames (CSV) through the corridor
  reduction and margin evaluation, emitting one report row per frame,
* ``sweep`` runs the load-imbalance error sweep and prints the table,
* ``golden-table1`` runs the built-in benchmark check.

Frame CSV: header ``t_us`` then ``V:<bus>:mag,V:<bus>:ang`` per boundary bus
and ``I:<line>:mag,I:<line>:ang`` per corridor line; magnitudes per unit,
angles in degrees, timestamps integer microseconds, strictly increasing.
Report CSV: ``t_us,index_apparent_pct,index_impedance_pct,voltage_ratio,alarm``.
A frame whose reduction or indices are degenerate (no current, coincident
voltages, ...) produces a diagnostic row with empty index fields instead of
aborting the stream.

Exit status: 0 all frames processed and no alarm, 2 at least one alarm
(scriptable), 1 fatal error (unreadable input, malformed file, bad config).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

from . import margin
from .errors import (
    CorridorError,
    DegenerateVoltageDifference,
    MalformedRow,
    MissingAdmittance,
    MissingMeasurement,
    NonFiniteValue,
    NonMonotoneTimestamp,
    ZeroCorridorAdmittance,
    ZeroCurrent,
    ZeroLoadImpedance,
    ZeroLoadVoltage,
)
from .harness import (
    default_network,
    default_splits,
    default_topology,
    emit_table,
    error_sweep,
    run_perfect_reduction,
)
from .network import (
    CorridorTopology,
    SynchroFrame,
    load_topology,
    validate_frame,
)
from .phasors import from_polar, to_polar
from .powerflow import load_network
from .reduction import ESTIMATE_FROM_FRAME, reduce_frame

PROG = "corridormon"

TIME_COLUMN = "t_us"
REPORT_HEADER = "t_us,index_apparent_pct,index_impedance_pct,voltage_ratio,alarm"

# Frame-local degeneracies: the row becomes diagnostic, the stream continues.
PER_FRAME_ERRORS = (
    MissingMeasurement,
    NonFiniteValue,
    DegenerateVoltageDifference,
    ZeroCorridorAdmittance,
    ZeroCurrent,
    ZeroLoadVoltage,
    ZeroLoadImpedance,
)


# --- frame CSV -----------------------------------------------------------------


def frame_header(topo: CorridorTopology) -> list[str]:
    """Canonical column list for a topology, in declaration order."""
    cols = [TIME_COLUMN]
    for bus in topo.boundary_buses:
        cols += [f"V:{bus}:mag", f"V:{bus}:ang"]
    for line in topo.corridor_lines:
        cols += [f"I:{line.id}:mag", f"I:{line.id}:ang"]
    return cols


def _bind_header(header: Sequence[str], topo: CorridorTopology) -> list[str]:
    """Check the header against the topology; returns the column names.

    Columns may appear in any order but must cover exactly the boundary buses
    and corridor lines, with ``t_us`` first.
    """
    if not header or header[0] != TIME_COLUMN:
        raise MalformedRow(
            f"first column must be {TIME_COLUMN!r}", line_number=1, column=0
        )
    expected = set(frame_header(topo)[1:])
    got = set(header[1:])
    if len(got) != len(header) - 1:
        raise MalformedRow("duplicate column in header", line_number=1, column=0)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        raise MalformedRow(
            "header does not match topology"
            + (f"; missing {missing}" if missing else "")
            + (f"; unexpected {extra}" if extra else ""),
            line_number=1,
            column=0,
        )
    return list(header)


def _parse_row(
    row: Sequence[str], line_number: int, columns: Sequence[str]
) -> SynchroFrame:
    if len(row) != len(columns):
        raise MalformedRow(
            f"{len(row)} fields where {len(columns)} expected",
            line_number=line_number,
            column=len(columns) if len(row) > len(columns) else len(row),
        )
    try:
        t_us = int(row[0])
    except ValueError:
        raise MalformedRow(
            f"timestamp {row[0]!r} is not an integer",
            line_number=line_number,
            column=0,
        ) from None

    mags: dict[tuple[str, str], float] = {}
    angs: dict[tuple[str, str], float] = {}
    for i, (name, cell) in enumerate(zip(columns[1:], row[1:]), start=1):
        kind, ident, part = name.split(":")
        try:
            value = float(cell)
        except ValueError:
            raise MalformedRow(
                f"column {name!r}: {cell!r} is not a number",
                line_number=line_number,
                column=i,
            ) from None
        (mags if part == "mag" else angs)[(kind, ident)] = value

    voltages = {
        ident: from_polar(mag, angs[("V", ident)])
        for (kind, ident), mag in mags.items()
        if kind == "V"
    }
    currents = {
        ident: from_polar(mag, angs[("I", ident)])
        for (kind, ident), mag in mags.items()
        if kind == "I"
    }
    return SynchroFrame(t_us, voltages, currents)


def iter_frames(lines: Iterable[str], topo: CorridorTopology) -> Iterator[SynchroFrame]:
    """Parse a frame CSV stream, enforcing strictly increasing timestamps."""
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow("empty input: no header row", line_number=1, column=0)
    columns = _bind_header(header, topo)

    last_t: int | None = None
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        frame = _parse_row(row, line_number, columns)
        if last_t is not None and frame.timestamp_us <= last_t:
            raise NonMonotoneTimestamp(
                f"line {line_number}: timestamp {frame.timestamp_us} after {last_t}"
            )
        last_t = frame.timestamp_us
        yield frame


def frames_to_csv(frames: Iterable[SynchroFrame], topo: CorridorTopology) -> str:
    """Serialize frames in the canonical column order (for tests and tooling)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    columns = frame_header(topo)
    writer.writerow(columns)
    for frame in frames:
        cells: list[str] = [str(frame.timestamp_us)]
        for name in columns[1:]:
            kind, ident, part = name.split(":")
            phasor = (
                frame.bus_voltages[ident] if kind == "V" else frame.line_currents[ident]
            )
            mag, ang = to_polar(phasor)
            cells.append(format(mag if part == "mag" else ang, ".10g"))
        writer.writerow(cells)
    return out.getvalue()


# --- monitor -----------------------------------------------------------------------


@dataclass(frozen=True)
class MonitorConfig:
    """Validated settings for one monitoring run."""

    topology_path: str
    input_path: str = "-"
    admittance_mode: str = ESTIMATE_FROM_FRAME  # or a path to a line table
    chosen_index: str = margin.APPARENT
    threshold: float = margin.DEFAULT_THRESHOLD_PCT
    output_path: str = "-"

    def __post_init__(self) -> None:
        if self.chosen_index not in margin.INDEX_NAMES:
            raise ValueError(
                f"unknown index {self.chosen_index!r}; have {margin.INDEX_NAMES}"
            )
        if not 0.0 < self.threshold <= 200.0:
            raise ValueError(
                f"threshold {self.threshold} outside (0, 200]"
            )


def load_admittance_table(path: str) -> dict[str, complex]:
    """Per-line admittances from a network-style JSON file (its `lines` list)."""
    with open(path) as handle:
        data = json.load(handle)
    lines = data["lines"] if isinstance(data, dict) else data
    return {line["id"]: complex(line["g"], line["b"]) for line in lines}


def _report_row(t_us: int, report: margin.MarginReport | None) -> str:
    if report is None:
        return f"{t_us},,,,false"
    cells = [str(t_us)]
    for value in (
        report.apparent_power_index_pct,
        report.impedance_match_pct,
        report.voltage_ratio,
    ):
        cells.append("" if value is None else format(value, ".10g"))
    cells.append("true" if report.alarm else "false")
    return ",".join(cells)


def monitor_stream(
    config: MonitorConfig,
    topo: CorridorTopology,
    lines: Iterable[str],
    out: TextIO,
) -> int:
    """Run the per-frame pipeline; returns the process exit status."""
    if config.admittance_mode == ESTIMATE_FROM_FRAME:
        admittances: dict[str, complex] | str = ESTIMATE_FROM_FRAME
    else:
        admittances = load_admittance_table(config.admittance_mode)
        for line in topo.corridor_lines:
            if line.id not in admittances:
                raise MissingAdmittance(
                    f"admittance table lacks corridor line {line.id!r}"
                )

    out.write(REPORT_HEADER + "\n")
    any_alarm = False
    for frame in iter_frames(lines, topo):
        try:
            validate_frame(frame, topo)
            rs = reduce_frame(frame, topo, admittances)
            report = margin.evaluate(rs, config.chosen_index, config.threshold)
        except PER_FRAME_ERRORS:
            out.write(_report_row(frame.timestamp_us, None) + "\n")
            continue
        any_alarm = any_alarm or report.alarm
        out.write(_report_row(frame.timestamp_us, report) + "\n")
    return 2 if any_alarm else 0


def cmd_monitor(args: argparse.Namespace) -> int:
    config = MonitorConfig(
        topology_path=args.topology,
        input_path=args.input,
        admittance_mode=args.admittance
        if args.admittance != "estimate"
        else ESTIMATE_FROM_FRAME,
        chosen_index=args.index,
        threshold=args.threshold,
        output_path=args.output,
    )
    topo = load_topology(config.topology_path)

    if config.input_path == "-":
        in_handle: TextIO = sys.stdin
    else:
        in_handle = open(config.input_path)
    try:
        if config.output_path == "-":
            return monitor_stream(config, topo, in_handle, sys.stdout)
        with open(config.output_path, "w") as out_handle:
            return monitor_stream(config, topo, in_handle, out_handle)
    finally:
        if in_handle is not sys.stdin:
            in_handle.close()


# --- sweep and golden ---------------------------------------------------------------


def parse_splits(text: str) -> list:
    """Split grid file: one split per line, comma-separated load shares.

    A line with a single value ``s`` means shares ``(s, 1-s)``.  ``#`` starts
    a comment.
    """
    splits = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [float(cell) for cell in line.split(",")]
        splits.append(parts[0] if len(parts) == 1 else tuple(parts))
    return splits


def cmd_sweep(args: argparse.Namespace) -> int:
    net = default_network() if args.network is None else load_network(args.network)
    topo = default_topology() if args.topology is None else load_topology(args.topology)

    if args.splits is None:
        splits = default_splits(net, topo)
    else:
        with open(args.splits) as handle:
            splits = parse_splits(handle.read())

    rows = error_sweep(net, topo, splits)
    text = emit_table(rows, args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as handle:
            handle.write(text)
    return 0


def cmd_golden(args: argparse.Namespace) -> int:
    report = run_perfect_reduction()
    sys.stdout.write(report.to_text())
    return 0


# --- entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Voltage-collapse proximity monitoring for a transmission corridor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mon = sub.add_parser("monitor", help="stream measurement frames to margin reports")
    mon.add_argument("--topology", required=True, help="corridor topology JSON")
    mon.add_argument("--input", default="-", help="frame CSV file, or - for stdin")
    mon.add_argument(
        "--admittance",
        default="estimate",
        help="'estimate' (from each frame) or a line-table JSON path",
    )
    mon.add_argument(
        "--index",
        default=margin.APPARENT,
        choices=margin.INDEX_NAMES,
        help="index driving the alarm",
    )
    mon.add_argument(
        "--threshold",
        type=float,
        default=margin.DEFAULT_THRESHOLD_PCT,
        help="alarm threshold (percent for the indices, plain ratio for vratio)",
    )
    mon.add_argument("--output", default="-", help="report CSV file, or - for stdout")
    mon.set_defaults(func=cmd_monitor)

    swp = sub.add_parser("sweep", help="load-imbalance error sweep table")
    swp.add_argument("--network", default=None, help="network JSON (default: built-in)")
    swp.add_argument("--topology", default=None, help="topology JSON (default: built-in)")
    swp.add_argument(
        "--splits", default=None, help="split grid file (default: built-in grid)"
    )
    swp.add_argument("--format", default="text", choices=("text", "csv"))
    swp.add_argument("--output", default="-", help="output file, or - for stdout")
    swp.set_defaults(func=cmd_sweep)

    gold = sub.add_parser(
        "golden-table1", help="check the built-in two-line corridor benchmark"
    )
    gold.set_defaults(func=cmd_golden)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CorridorError, AssertionError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
