import cmath

import numpy as np
import pytest

from corridormon import (
    DegenerateVoltageDifference,
    MissingAdmittance,
    MissingMeasurement,
    SynchroFrame,
    ZeroCorridorAdmittance,
    compute_weights,
    corridor_admittance,
    line_admittance,
    reduce_frame,
)
from corridormon.reduction import ESTIMATE_FROM_FRAME

# Known two-line corridor at its transfer limit: both generator voltages
# equal, both load voltages equal, currents consistent with the admittances.
Y1 = 3.8 - 19.1j
Y2 = 11.4 - 57.2j
V_G = 1.0 + 0.0j
V_L = 0.5 - 0.2j


def collapse_frame(t=0):
    dv = V_G - V_L
    return SynchroFrame(
        t,
        {"g1": V_G, "g2": V_G, "l1": V_L, "l2": V_L},
        {"gl1": Y1 * dv, "gl2": Y2 * dv},
    )


def random_frame(rng, topo):
    """Voltages spread around nominal, currents arbitrary (estimate mode)."""
    voltages = {}
    for bus in topo.gen_buses:
        voltages[bus] = cmath.rect(rng.uniform(0.95, 1.05), rng.uniform(-0.2, 0.2))
    for bus in topo.load_buses:
        voltages[bus] = cmath.rect(rng.uniform(0.6, 0.9), rng.uniform(-0.6, -0.1))
    currents = {
        line.id: complex(rng.uniform(1, 30), rng.uniform(-30, -1))
        for line in topo.corridor_lines
    }
    return SynchroFrame(0, voltages, currents)


class TestLineAdmittance:
    def test_recovers_admittance(self):
        dv = V_G - V_L
        assert line_admittance(V_G, V_L, Y1 * dv) == pytest.approx(Y1, rel=1e-14)

    def test_degenerate_difference(self):
        with pytest.raises(DegenerateVoltageDifference):
            line_admittance(V_G, V_G, 1.0 + 0j)


class TestWeights:
    def test_sum_to_one_exactly_here(self, corridor2):
        weights = compute_weights({"gl1": Y1, "gl2": Y2}, corridor2)
        assert sum(weights.gen_weights.values()) == pytest.approx(1.0, abs=1e-15)
        assert sum(weights.load_weights.values()) == pytest.approx(1.0, abs=1e-15)

    def test_proportional_to_admittance(self, corridor2):
        weights = compute_weights({"gl1": Y1, "gl2": Y2}, corridor2)
        assert weights.gen_weights["g1"] == pytest.approx(Y1 / (Y1 + Y2), rel=1e-14)
        assert weights.load_weights["l2"] == pytest.approx(Y2 / (Y1 + Y2), rel=1e-14)

    def test_equal_lines_give_half_half(self, corridor2):
        weights = compute_weights({"gl1": 5 - 20j, "gl2": 5 - 20j}, corridor2)
        for w in list(weights.gen_weights.values()) + list(weights.load_weights.values()):
            assert w == pytest.approx(0.5 + 0j, abs=1e-15)

    def test_zero_total_admittance(self, corridor2):
        with pytest.raises(ZeroCorridorAdmittance):
            compute_weights({"gl1": 1 - 4j, "gl2": -1 + 4j}, corridor2)

    def test_missing_line(self, corridor2):
        with pytest.raises(MissingAdmittance):
            corridor_admittance({"gl1": Y1}, corridor2)


class TestReduceCollapseFrame:
    """Exact self-consistency at the known operating point (sums are exact)."""

    def test_frozen_exact_values(self, corridor2):
        rs = reduce_frame(collapse_frame(), corridor2)
        assert rs.y_gl == pytest.approx(15.2 - 76.3j, abs=1e-12)
        assert rs.v_gl == pytest.approx(0.5 + 0.2j, abs=1e-12)
        assert rs.i_gl == pytest.approx(22.86 - 35.11j, abs=1e-10)
        assert rs.v_g == pytest.approx(V_G, abs=1e-12)
        assert rs.v_l == pytest.approx(V_L, abs=1e-12)

    def test_current_conservation_identity(self, corridor2):
        rs = reduce_frame(collapse_frame(), corridor2)
        assert rs.y_gl * rs.v_gl == pytest.approx(rs.i_gl, rel=1e-12)

    def test_impedances(self, corridor2):
        rs = reduce_frame(collapse_frame(), corridor2)
        assert rs.z_gl == pytest.approx(1 / (15.2 - 76.3j), rel=1e-12)
        # at this operating point the load impedance matches the line
        assert abs(rs.z_l) == pytest.approx(abs(rs.z_gl), rel=1e-12)

    def test_timestamp_preserved(self, corridor2):
        assert reduce_frame(collapse_frame(t=777), corridor2).timestamp_us == 777


class TestEstimateMode:
    def test_identity_holds_for_arbitrary_frames(self, corridor2):
        """Estimated admittances make the equivalent line carry exactly the
        summed corridor current, whatever the measurements are."""
        rng = np.random.default_rng(21)
        for _ in range(200):
            frame = random_frame(rng, corridor2)
            rs = reduce_frame(frame, corridor2)
            total = sum(frame.line_currents.values())
            assert rs.y_gl * rs.v_gl == pytest.approx(total, rel=1e-11)

    def test_matches_static_mode_on_consistent_frame(self, corridor2):
        static = reduce_frame(
            collapse_frame(), corridor2, {"gl1": Y1, "gl2": Y2}
        )
        estimated = reduce_frame(collapse_frame(), corridor2, ESTIMATE_FROM_FRAME)
        assert estimated.y_gl == pytest.approx(static.y_gl, rel=1e-12)
        assert estimated.v_gl == pytest.approx(static.v_gl, rel=1e-12)
        assert estimated.i_gl == pytest.approx(static.i_gl, rel=1e-12)

    def test_degenerate_estimate(self, corridor2):
        frame = collapse_frame()
        frame.bus_voltages["l1"] = V_G  # no drop across gl1
        with pytest.raises(DegenerateVoltageDifference):
            reduce_frame(frame, corridor2)

    def test_unknown_mode_string(self, corridor2):
        with pytest.raises(ValueError):
            reduce_frame(collapse_frame(), corridor2, "guess")


class TestScalingCovariance:
    def test_voltage_and_current_scalings(self, corridor2):
        """Scaling voltages by a and currents by b rescales the reduction
        covariantly and leaves all three index ingredients' ratios alone."""
        rng = np.random.default_rng(4)
        frame = random_frame(rng, corridor2)
        a, b = 1.7, 0.3
        scaled = SynchroFrame(
            0,
            {k: a * v for k, v in frame.bus_voltages.items()},
            {k: b * i for k, i in frame.line_currents.items()},
        )
        base = reduce_frame(frame, corridor2)
        resc = reduce_frame(scaled, corridor2)
        assert resc.v_gl == pytest.approx(a * base.v_gl, rel=1e-12)
        assert resc.i_gl == pytest.approx(b * base.i_gl, rel=1e-12)
        assert resc.y_gl == pytest.approx((b / a) * base.y_gl, rel=1e-12)
        assert abs(resc.v_l) / abs(resc.v_gl) == pytest.approx(
            abs(base.v_l) / abs(base.v_gl), rel=1e-12
        )


class TestSwitching:
    def test_out_of_service_line_drops_from_reduction(self, corridor2):
        """A line absent from the frame is treated as switched out: the
        corridor reduces to the remaining line alone."""
        frame = collapse_frame()
        del frame.line_currents["gl1"]
        rs = reduce_frame(frame, corridor2)
        assert rs.y_gl == pytest.approx(Y2, rel=1e-12)
        assert rs.weights.gen_weights["g2"] == pytest.approx(1.0 + 0j, abs=1e-15)
        assert rs.weights.gen_weights["g1"] == pytest.approx(0.0j, abs=1e-15)
        assert rs.i_gl == pytest.approx(Y2 * (V_G - V_L), rel=1e-12)

    def test_no_lines_at_all(self, corridor2):
        frame = collapse_frame()
        frame.line_currents.clear()
        with pytest.raises(MissingMeasurement):
            reduce_frame(frame, corridor2)

    def test_missing_voltage_reported(self, corridor2):
        frame = collapse_frame()
        del frame.bus_voltages["g2"]
        with pytest.raises(MissingMeasurement, match="g2"):
            reduce_frame(frame, corridor2)


def test_zero_current_leaves_impedances_undefined(corridor2):
    frame = SynchroFrame(
        0,
        {"g1": V_G, "g2": V_G, "l1": 0.9 + 0j, "l2": 0.9 + 0j},
        {"gl1": 1e-14 + 0j, "gl2": -1e-14 + 0j},
    )
    rs = reduce_frame(frame, corridor2, {"gl1": Y1, "gl2": Y2})
    assert rs.z_gl is None
    assert rs.z_l is None


def test_static_mode_missing_admittance(corridor2):
    with pytest.raises(MissingAdmittance):
        reduce_frame(collapse_frame(), corridor2, {"gl1": Y1})
