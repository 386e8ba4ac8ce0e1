"""Voltage-collapse margin monitoring for multi-line transmission corridors.

Combines synchrophasor voltage and current measurements from both ends of
every line in a corridor into a single equivalent line, then tracks how far
the corridor is from its maximum power transfer.  Ships with a small AC
power-flow and loadability solver used to generate synthetic measurement
streams and to quantify the reduction error, plus a streaming CLI.
"""

from .errors import (
    BaseCaseInfeasible,
    CorridorError,
    DanglingEndpoint,
    DegenerateVoltageDifference,
    DuplicateId,
    MalformedRow,
    MissingAdmittance,
    MissingMeasurement,
    NonConvergence,
    NonFiniteValue,
    NonMonotoneTimestamp,
    NotACorridorLine,
    PowerFlowError,
    SingularJacobian,
    ZeroCorridorAdmittance,
    ZeroCurrent,
    ZeroLoadImpedance,
    ZeroLoadVoltage,
)
from .margin import (
    MarginReport,
    apparent_power_index,
    evaluate,
    impedance_match_index,
    voltage_ratio_index,
)
from .network import (
    CorridorTopology,
    Line,
    SynchroFrame,
    build_topology,
    load_topology,
    validate_frame,
)
from .powerflow import (
    Bus,
    LoadabilityResult,
    PfLine,
    PfNetwork,
    PfSolution,
    generate_frames,
    load_network,
    max_loadability,
    solve_power_flow,
    solution_frame,
    two_bus_max_power,
)
from .reduction import (
    ESTIMATE_FROM_FRAME,
    ReducedSystem,
    WeightSet,
    compute_weights,
    corridor_admittance,
    line_admittance,
    reduce_frame,
)
from .harness import (
    GoldenCheck,
    GoldenReport,
    SweepRow,
    balanced_split,
    default_network,
    default_splits,
    default_topology,
    emit_table,
    error_sweep,
    parse_sweep_csv,
    run_perfect_reduction,
)

__version__ = "0.1.0"
