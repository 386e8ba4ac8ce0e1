"""AC power flow, maximum loadability and synthetic measurement generation.

The solver is a dense polar Newton-Raphson for small networks: one slack bus
(fixed voltage phasor), PV buses (fixed P injection and voltage magnitude,
no reactive limits) and PQ buses (fixed P and Q consumption).  Lines are
series admittances only, per unit throughout.

Loadability is found by bisection on a load scaling factor, using solver
convergence as the feasibility test and warm-starting each probe from the
last feasible solution.  The same machinery drives ``two_bus_max_power``,
which the corridor reduction uses as its equivalent-line capacity estimate.

Two interchangeable Newton kernels exist: a compiled one built from
``_nr_c.pyx`` and a NumPy fallback in ``_nr_py``.  Whichever is importable
is picked at import time; see :func:`backend` / :func:`set_backend`.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _nr_py
from .errors import (
    BaseCaseInfeasible,
    DanglingEndpoint,
    DuplicateId,
    NonConvergence,
    SingularJacobian,
)
from .network import CorridorTopology, SynchroFrame

try:
    from . import _nr_c

    _KERNELS = {"compiled": _nr_c, "python": _nr_py}
    _kernel = _nr_c
except ImportError:  # pragma: no cover - depends on build environment
    _KERNELS = {"python": _nr_py}
    _kernel = _nr_py

SLACK = "slack"
PV = "pv"
PQ = "pq"

_KIND_CODES = {SLACK: _nr_py.SLACK_CODE, PV: _nr_py.PV_CODE, PQ: _nr_py.PQ_CODE}

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 50


def backend() -> str:
    """Name of the Newton kernel currently in use."""
    for name, module in _KERNELS.items():
        if module is _kernel:
            return name
    raise RuntimeError("unknown kernel module")  # pragma: no cover


def available_backends() -> tuple[str, ...]:
    return tuple(_KERNELS)


def set_backend(name: str) -> str:
    """Switch the Newton kernel ("compiled" or "python"); returns the old name.

    Exists for benchmarking and for testing the two kernels against each
    other; results are identical to solver tolerance either way.
    """
    global _kernel
    if name not in _KERNELS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_KERNELS)}")
    previous = backend()
    _kernel = _KERNELS[name]
    return previous


# --- network description -----------------------------------------------------


@dataclass(frozen=True)
class Bus:
    """One bus. ``p``/``q`` mean injection for PV and consumption for PQ."""

    id: str
    kind: str
    v_set: float = 1.0
    angle_deg: float = 0.0
    p: float = 0.0
    q: float = 0.0


@dataclass(frozen=True)
class PfLine:
    id: str
    from_bus: str
    to_bus: str
    y: complex


@dataclass(frozen=True)
class PfNetwork:
    """A validated little network: exactly one slack, unique ids, connected."""

    buses: tuple[Bus, ...]
    lines: tuple[PfLine, ...]

    def __post_init__(self):
        seen: set[str] = set()
        slack_count = 0
        for bus in self.buses:
            if bus.id in seen:
                raise DuplicateId(f"bus id {bus.id!r} listed twice")
            seen.add(bus.id)
            if bus.kind not in _KIND_CODES:
                raise ValueError(f"bus {bus.id!r} has unknown kind {bus.kind!r}")
            if bus.kind == SLACK:
                slack_count += 1
            if bus.kind == PQ and bus.p < 0:
                raise ValueError(
                    f"bus {bus.id!r}: PQ consumption must be nonnegative"
                )
        if slack_count != 1:
            raise ValueError(f"need exactly one slack bus, found {slack_count}")

        line_ids: set[str] = set()
        adjacency: dict[str, set[str]] = {bus.id: set() for bus in self.buses}
        for line in self.lines:
            if line.id in line_ids:
                raise DuplicateId(f"line id {line.id!r} listed twice")
            line_ids.add(line.id)
            for endpoint in (line.from_bus, line.to_bus):
                if endpoint not in adjacency:
                    raise DanglingEndpoint(
                        f"line {line.id!r} references unknown bus {endpoint!r}"
                    )
            adjacency[line.from_bus].add(line.to_bus)
            adjacency[line.to_bus].add(line.from_bus)

        if len(self.buses) > 1:
            reached = {self.buses[0].id}
            stack = [self.buses[0].id]
            while stack:
                for neighbour in adjacency[stack.pop()]:
                    if neighbour not in reached:
                        reached.add(neighbour)
                        stack.append(neighbour)
            if len(reached) != len(self.buses):
                raise ValueError("network is not connected")

    def bus(self, bus_id: str) -> Bus:
        for candidate in self.buses:
            if candidate.id == bus_id:
                return candidate
        raise KeyError(bus_id)

    def pq_buses(self) -> tuple[Bus, ...]:
        return tuple(bus for bus in self.buses if bus.kind == PQ)

    def with_loads(self, loads: dict[str, complex]) -> "PfNetwork":
        """Copy of the network with PQ consumptions replaced by ``loads``."""
        new_buses = []
        for bus in self.buses:
            if bus.kind == PQ and bus.id in loads:
                s = loads[bus.id]
                new_buses.append(
                    Bus(bus.id, PQ, bus.v_set, bus.angle_deg, s.real, s.imag)
                )
            else:
                new_buses.append(bus)
        return PfNetwork(tuple(new_buses), self.lines)


@dataclass(frozen=True)
class PfSolution:
    """Converged operating point: voltages plus derived line currents."""

    bus_voltages: dict[str, complex]
    line_currents: dict[str, complex]
    converged: bool
    iterations: int
    max_mismatch: float


@dataclass(frozen=True)
class LoadabilityResult:
    lambda_max: float
    total_load_p_max: float
    total_load_s_max: complex
    critical_solution: PfSolution


# --- compiled form used by the kernels ----------------------------------------


class _Compiled:
    """Network flattened to the arrays the kernels consume."""

    def __init__(self, net: PfNetwork):
        self.net = net
        self.index = {bus.id: i for i, bus in enumerate(net.buses)}
        n = len(net.buses)
        self.g = np.zeros((n, n))
        self.b = np.zeros((n, n))
        for line in net.lines:
            i = self.index[line.from_bus]
            k = self.index[line.to_bus]
            y = line.y
            self.g[i, i] += y.real
            self.b[i, i] += y.imag
            self.g[k, k] += y.real
            self.b[k, k] += y.imag
            self.g[i, k] -= y.real
            self.b[i, k] -= y.imag
            self.g[k, i] -= y.real
            self.b[k, i] -= y.imag

        self.kind = np.empty(n, dtype=np.int64)
        self.p_spec = np.zeros(n)
        self.q_spec = np.zeros(n)
        self.vm_flat = np.ones(n)
        self.va_flat = np.zeros(n)
        for i, bus in enumerate(net.buses):
            self.kind[i] = _KIND_CODES[bus.kind]
            if bus.kind == SLACK:
                self.vm_flat[i] = bus.v_set
                self.va_flat[i] = math.radians(bus.angle_deg)
            elif bus.kind == PV:
                self.p_spec[i] = bus.p
                self.vm_flat[i] = bus.v_set
            else:
                self.p_spec[i] = -bus.p
                self.q_spec[i] = -bus.q

    def start(self, initial: dict[str, complex] | None):
        vm = self.vm_flat.copy()
        va = self.va_flat.copy()
        if initial is not None:
            for bus_id, v in initial.items():
                i = self.index[bus_id]
                # fixed quantities keep their setpoints regardless of the guess
                if self.kind[i] == _nr_py.PQ_CODE:
                    vm[i] = abs(v)
                if self.kind[i] != _nr_py.SLACK_CODE:
                    va[i] = cmath.phase(v)
        return vm, va

    def run(self, initial=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
        vm0, va0 = self.start(initial)
        return _kernel.nr_solve(
            self.g, self.b, self.kind, self.p_spec, self.q_spec,
            vm0, va0, tol, max_iter,
        )

    def set_load(self, bus_id: str, p: float, q: float) -> None:
        i = self.index[bus_id]
        if self.kind[i] != _nr_py.PQ_CODE:
            raise ValueError(f"bus {bus_id!r} is not a PQ bus")
        self.p_spec[i] = -p
        self.q_spec[i] = -q

    def solution(self, vm, va, iterations, mismatch) -> PfSolution:
        v = vm * np.exp(1j * va)
        voltages = {bus.id: complex(v[i]) for i, bus in enumerate(self.net.buses)}
        currents = {
            line.id: line.y * (voltages[line.from_bus] - voltages[line.to_bus])
            for line in self.net.lines
        }
        return PfSolution(voltages, currents, True, iterations, mismatch)


def solve_power_flow(
    net: PfNetwork,
    initial: dict[str, complex] | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> PfSolution:
    """Newton-Raphson solve; raises NonConvergence or SingularJacobian."""
    comp = _Compiled(net)
    vm, va, iterations, mismatch, status = comp.run(initial, tol, max_iter)
    if status == _nr_py.SINGULAR:
        raise SingularJacobian(f"singular Jacobian after {iterations} iterations")
    if status != _nr_py.OK:
        raise NonConvergence(
            f"no convergence after {iterations} iterations "
            f"(mismatch {mismatch:.3e})",
            iterations=iterations,
            mismatch=mismatch,
        )
    return comp.solution(vm, va, iterations, mismatch)


# --- maximum loadability -------------------------------------------------------


def _load_ray(net: PfNetwork, direction: dict[str, float], pf_constant: bool):
    """Per-bus (participation, q per unit of p) pairs for the scaling ray."""
    pq_ids = {bus.id for bus in net.pq_buses()}
    for bus_id in direction:
        if bus_id not in pq_ids:
            raise ValueError(f"direction names non-PQ bus {bus_id!r}")
    if any(share < 0 for share in direction.values()):
        raise ValueError("direction shares must be nonnegative")
    if not any(share > 0 for share in direction.values()):
        raise ValueError("direction must have at least one positive share")

    ray = []
    for bus in net.pq_buses():
        share = direction.get(bus.id, 0.0)
        if pf_constant:
            tan_phi = bus.q / bus.p if bus.p > 0 else 0.0
            ray.append((bus.id, share, share * tan_phi, 0.0))
        else:
            ray.append((bus.id, share, 0.0, bus.q))
    return ray


def max_loadability(
    net: PfNetwork,
    direction: dict[str, float],
    pf_constant: bool = True,
    resolution: float = 1e-5,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LoadabilityResult:
    """Largest load scaling ``lambda`` for which the power flow still solves.

    The PQ consumptions are replaced along the ray ``p_i = lambda * d_i``
    (a bus missing from ``direction`` carries no load on the ray).  With
    ``pf_constant`` each participating bus keeps the power factor of its base
    load; otherwise Q stays at the base value.  ``resolution`` is relative:
    the returned point is feasible while ``lambda_max * (1 + resolution)``
    is not.
    """
    ray = _load_ray(net, direction, pf_constant)

    comp = _Compiled(net)
    if comp.run(tol=tol, max_iter=max_iter)[4] != _nr_py.OK:
        raise BaseCaseInfeasible("base operating point does not solve")

    def feasible(lam: float, warm) -> tuple | None:
        for bus_id, p_share, q_share, q_fixed in ray:
            comp.set_load(bus_id, lam * p_share, lam * q_share + q_fixed)
        if warm is None:
            vm0, va0 = comp.start(None)
        else:
            vm0, va0 = warm[0].copy(), warm[1].copy()
        result = _kernel.nr_solve(
            comp.g, comp.b, comp.kind, comp.p_spec, comp.q_spec,
            vm0, va0, tol, max_iter,
        )
        return result[:4] if result[4] == _nr_py.OK else None

    lo = 0.0
    lo_state = feasible(0.0, None)
    if lo_state is None:  # pragma: no cover - a no-load case always solves
        raise BaseCaseInfeasible("zero-load point does not solve")

    hi = 1.0
    for _ in range(80):
        probe = feasible(hi, lo_state)
        if probe is None:
            break
        lo, lo_state = hi, probe
        hi *= 2.0
    else:  # pragma: no cover - defensive
        raise NonConvergence("no infeasible upper bound found for the load ray")

    while hi - lo > resolution * max(lo, resolution):
        mid = 0.5 * (lo + hi)
        probe = feasible(mid, lo_state)
        if probe is None:
            hi = mid
        else:
            lo, lo_state = mid, probe

    critical = comp.solution(*lo_state)
    total_p = lo * sum(p_share for _, p_share, _, _ in ray)
    total_s = sum(
        complex(lo * p_share, lo * q_share + q_fixed)
        for _, p_share, q_share, q_fixed in ray
    )
    return LoadabilityResult(lo, total_p, total_s, critical)


def two_bus_max_power(
    e: complex,
    y: complex,
    power_factor_angle: float,
    s_seed: float | None = None,
    resolution: float = 1e-9,
) -> complex:
    """Maximum constant-power-factor load through one series admittance.

    ``e`` is the sending-end source phasor, ``y`` the series admittance and
    ``power_factor_angle`` the load angle in radians (P = |S| cos, Q = |S| sin).
    Bisection on apparent power with the two-bus power flow as the
    feasibility test; ``s_seed`` just centres the initial bracket.  Returns
    the complex load power at the transfer limit.
    """
    if abs(e) <= 0.0 or abs(y) <= 0.0:
        raise ValueError("source magnitude and admittance must be nonzero")

    cos_phi = math.cos(power_factor_angle)
    sin_phi = math.sin(power_factor_angle)
    net = PfNetwork(
        (
            Bus("src", SLACK, v_set=abs(e), angle_deg=math.degrees(cmath.phase(e))),
            Bus("load", PQ, p=0.0, q=0.0),
        ),
        (PfLine("ln", "src", "load", y),),
    )
    comp = _Compiled(net)

    def feasible(s: float, warm):
        comp.set_load("load", s * cos_phi, s * sin_phi)
        if warm is None:
            result = comp.run()
        else:
            result = _kernel.nr_solve(
                comp.g, comp.b, comp.kind, comp.p_spec, comp.q_spec,
                warm[0].copy(), warm[1].copy(), DEFAULT_TOL, DEFAULT_MAX_ITER,
            )
        return result[:4] if result[4] == _nr_py.OK else None

    lo = 0.0
    lo_state = feasible(0.0, None)
    hi = s_seed if s_seed and s_seed > 0 else abs(e) ** 2 * abs(y)
    for _ in range(200):
        probe = feasible(hi, lo_state)
        if probe is None:
            break
        lo, lo_state = hi, probe
        hi *= 2.0
    else:  # pragma: no cover - defensive
        raise NonConvergence("no infeasible upper bound for two-bus load")

    while hi - lo > resolution * max(lo, resolution):
        mid = 0.5 * (lo + hi)
        probe = feasible(mid, lo_state)
        if probe is None:
            hi = mid
        else:
            lo, lo_state = mid, probe

    return complex(lo * cos_phi, lo * sin_phi)


# --- synthetic measurement frames ----------------------------------------------


def solution_frame(
    net: PfNetwork,
    topo: CorridorTopology,
    solution: PfSolution,
    timestamp_us: int,
) -> SynchroFrame:
    """Extract the corridor's boundary measurements from a solved case.

    Corridor line currents are reoriented so positive flow runs from the
    generation side to the load side, whatever the line's from/to order.
    """
    voltages = {
        bus: solution.bus_voltages[bus] for bus in topo.boundary_buses
    }
    net_lines = {ln.id: ln for ln in net.lines}
    currents = {}
    for line in topo.corridor_lines:
        if line.id not in solution.line_currents:
            raise DanglingEndpoint(
                f"corridor line {line.id!r} does not exist in the network"
            )
        # the solver's current runs along the network line's own from->to
        # order, which need not match the topology's
        current = solution.line_currents[line.id]
        if topo.gen_side(line.id) != net_lines[line.id].from_bus:
            current = -current
        currents[line.id] = current
    return SynchroFrame(timestamp_us, voltages, currents)


def generate_frames(
    net: PfNetwork,
    topo: CorridorTopology,
    load_trajectory: Sequence[float] | Iterable[float],
    frame_interval_us: int,
    noise_std: float = 0.0,
    seed: int | None = None,
    t0_us: int = 0,
) -> Iterator[SynchroFrame]:
    """Yield one frame per load scaling, solving the network at each point.

    Scalings multiply the base PQ loads (constant power factor).  Optional
    Gaussian noise of standard deviation ``noise_std`` is added to the
    rectangular components of every measurement; pass ``seed`` to make the
    stream reproducible.  A trajectory point beyond the transfer limit raises
    :class:`NonConvergence`, ending the stream after the frames already
    delivered.
    """
    rng = np.random.default_rng(seed)
    base_loads = {bus.id: complex(bus.p, bus.q) for bus in net.pq_buses()}
    previous: dict[str, complex] | None = None
    for k, scaling in enumerate(load_trajectory):
        scaled = net.with_loads(
            {bus_id: scaling * s for bus_id, s in base_loads.items()}
        )
        solution = solve_power_flow(scaled, initial=previous)
        previous = solution.bus_voltages
        frame = solution_frame(net, topo, solution, t0_us + k * frame_interval_us)
        if noise_std > 0.0:
            frame = SynchroFrame(
                frame.timestamp_us,
                {
                    key: v + complex(*rng.normal(0.0, noise_std, 2))
                    for key, v in frame.bus_voltages.items()
                },
                {
                    key: i + complex(*rng.normal(0.0, noise_std, 2))
                    for key, i in frame.line_currents.items()
                },
            )
        yield frame


# --- network file format --------------------------------------------------------
#
# JSON object:
# {
#   "buses": [{"id": "g1", "kind": "slack", "v_set": 1.0, "angle_deg": 0.0},
#             {"id": "l1", "kind": "pq", "p": 1.0, "q": 0.6}, ...],
#   "lines": [{"id": "gl1", "from": "g1", "to": "l1", "g": 3.8, "b": -19.1}, ...]
# }
# where a line's series admittance is g + jb.  Unknown keys are ignored.


def network_from_dict(data: dict) -> PfNetwork:
    buses = tuple(
        Bus(
            id=str(obj["id"]),
            kind=str(obj["kind"]).lower(),
            v_set=float(obj.get("v_set", 1.0)),
            angle_deg=float(obj.get("angle_deg", 0.0)),
            p=float(obj.get("p", 0.0)),
            q=float(obj.get("q", 0.0)),
        )
        for obj in data["buses"]
    )
    lines = tuple(
        PfLine(
            id=str(obj["id"]),
            from_bus=str(obj["from"]),
            to_bus=str(obj["to"]),
            y=complex(float(obj["g"]), float(obj["b"])),
        )
        for obj in data["lines"]
    )
    return PfNetwork(buses, lines)


def network_to_dict(net: PfNetwork) -> dict:
    buses = []
    for bus in net.buses:
        obj: dict = {"id": bus.id, "kind": bus.kind}
        if bus.kind in (SLACK, PV):
            obj["v_set"] = bus.v_set
        if bus.kind == SLACK:
            obj["angle_deg"] = bus.angle_deg
        if bus.kind in (PV, PQ):
            obj["p"] = bus.p
        if bus.kind == PQ:
            obj["q"] = bus.q
        buses.append(obj)
    lines = [
        {"id": ln.id, "from": ln.from_bus, "to": ln.to_bus,
         "g": ln.y.real, "b": ln.y.imag}
        for ln in net.lines
    ]
    return {"buses": buses, "lines": lines}


def load_network(path) -> PfNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return network_from_dict(json.load(fh))


def dump_network(net: PfNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(net), fh, indent=2)
        fh.write("\n")
