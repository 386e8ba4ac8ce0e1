import dataclasses

import pytest

from corridormon import BaseCaseInfeasible
from corridormon.harness import (
    BENCH_EXPECTED,
    SweepRow,
    balanced_split,
    bench_frame,
    bench_topology,
    default_network,
    default_splits,
    default_topology,
    emit_table,
    error_sweep,
    parse_sweep_csv,
    run_perfect_reduction,
)


class TestGoldenBenchmark:
    def test_passes_and_reports(self):
        report = run_perfect_reduction()
        assert report.ok
        assert len(report.checks) == len(BENCH_EXPECTED)
        names = [c.name for c in report.checks]
        assert "corridor_admittance" in names
        assert "apparent_power_index_pct" in names

    def test_text_rendering(self):
        text = run_perfect_reduction().to_text()
        assert "ok" in text and "MISMATCH" not in text
        assert text.count("\n") == len(BENCH_EXPECTED)
        # rendering is deterministic
        assert text == run_perfect_reduction().to_text()

    def test_specific_tolerances(self):
        """The sharp quantities are far inside the published-rounding budget."""
        by_name = {c.name: c for c in run_perfect_reduction().checks}
        assert by_name["area_voltage_difference"].rel_err < 1e-12
        assert by_name["apparent_power_index_pct"].rel_err < 1e-10
        assert by_name["voltage_ratio"].rel_err < 1e-10
        assert by_name["corridor_current"].rel_err < 0.05

    def test_bench_frame_is_consistent(self, corridor2):
        frame = bench_frame()
        topo = bench_topology()
        assert topo.corridor_lines == corridor2.corridor_lines
        # currents were derived from the admittances and the voltage drop
        dv = frame.bus_voltages["g1"] - frame.bus_voltages["l1"]
        assert frame.line_currents["gl1"] / dv == pytest.approx(
            3.8 - 19.1j, rel=1e-14
        )


class TestDefaults:
    def test_default_network_solves(self, four_bus):
        net, topo = four_bus
        assert {b.id for b in net.buses} >= set(topo.boundary_buses)

    def test_balanced_split_tracks_admittance_shares(self, four_bus):
        net, topo = four_bus
        share_l1, share_l2 = balanced_split(net, topo)
        assert share_l1 + share_l2 == pytest.approx(1.0, abs=1e-15)
        by_id = {ln.id: ln.y for ln in net.lines}
        expected = abs(by_id["gl1"]) / (abs(by_id["gl1"]) + abs(by_id["gl2"]))
        assert share_l1 == pytest.approx(expected, rel=1e-12)

    def test_default_splits_include_balanced_point(self, four_bus):
        net, topo = four_bus
        splits = default_splits(net, topo)
        star = balanced_split(net, topo)[0]
        firsts = [s[0] for s in splits]
        assert star in firsts
        assert len(splits) == 12
        for a, b in splits:
            assert a + b == pytest.approx(1.0, abs=1e-12)


@pytest.fixture(scope="module")
def rows(four_bus):
    net, topo = four_bus
    star = balanced_split(net, topo)[0]
    return error_sweep(net, topo, [1.0, 0.5, star, 0.01]), star


class TestErrorSweep:
    def test_balanced_split_is_near_exact(self, rows):
        table, star = rows
        assert abs(table[2].error_pct) < 0.05

    def test_imbalance_overestimates_capacity(self, rows):
        """The equivalent line cannot see the weaker load bus saturating
        first, so its limit always comes out high (negative signed error)."""
        table, _ = rows
        assert table[0].error_pct < -5.0
        assert table[1].error_pct < -1.0
        assert table[3].error_pct < -0.5

    def test_voltage_difference_switches_sign(self, rows):
        table, _ = rows
        assert table[0].dv_mag < 0 < table[3].dv_mag

    def test_row_bookkeeping(self, rows):
        table, _ = rows
        for row in table:
            assert row.p_max_total == pytest.approx(
                row.p_max_l1 + row.p_max_l2, rel=1e-9
            )
            assert row.error_pct == pytest.approx(
                100.0 * (row.p_max_total - row.p_max_reduced) / row.p_max_reduced,
                rel=1e-9,
            )

    def test_scalar_and_pair_splits_agree(self, four_bus):
        net, topo = four_bus
        a = error_sweep(net, topo, [0.3])
        b = error_sweep(net, topo, [(0.3, 0.7)])
        c = error_sweep(net, topo, [(0.6, 1.4)])  # shares normalize
        assert a[0] == b[0] == c[0]

    def test_bad_splits_rejected(self, four_bus):
        net, topo = four_bus
        with pytest.raises(ValueError):
            error_sweep(net, topo, [(0.5, 0.5, 0.0)])
        with pytest.raises(ValueError):
            error_sweep(net, topo, [(-0.1, 1.1)])
        with pytest.raises(ValueError):
            error_sweep(net, topo, [(0.0, 0.0)])

    def test_infeasible_base_case_reported(self, four_bus):
        net, topo = four_bus
        heavy = net.with_loads(
            {"l1": 100.0 + 60.0j, "l2": 100.0 + 60.0j}
        )
        with pytest.raises(BaseCaseInfeasible):
            error_sweep(heavy, topo, [0.5])


class TestEmitTable:
    ROW = SweepRow(10.6238, 0.0, 10.6238, -0.270288, -17.397, 14.9454, -28.9163)

    def test_csv_round_trip(self):
        text = emit_table([self.ROW], "csv")
        rows = parse_sweep_csv(text)
        assert rows == [self.ROW]
        assert emit_table(rows, "csv") == text

    def test_empty_is_header_only(self):
        assert emit_table([], "csv").splitlines() == [
            "p_max_l1,p_max_l2,p_max_total,dv_mag,d_angle_deg,p_max_reduced,error_pct"
        ]
        text_lines = emit_table([], "text").splitlines()
        assert len(text_lines) == 2 and text_lines[1].startswith("#")

    def test_text_has_units_note(self):
        text = emit_table([self.ROW], "text")
        assert text.splitlines()[-1] == (
            "# angles in degrees, error in percent, other quantities per unit"
        )

    def test_six_significant_digits_no_exponent(self):
        row = dataclasses.replace(
            self.ROW, dv_mag=0.000123456789, d_angle_deg=12345678.9
        )
        cells = emit_table([row], "csv").splitlines()[1].split(",")
        assert cells[3] == "0.000123457"
        assert cells[4] == "12345700"
        assert "e" not in cells[3] and "E" not in cells[3]

    def test_zero_formats_bare(self):
        cells = emit_table([self.ROW], "csv").splitlines()[1].split(",")
        assert cells[1] == "0"

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_table([], "xml")

    def test_header_mismatch_on_parse(self):
        with pytest.raises(ValueError):
            parse_sweep_csv("a,b,c\n1,2,3\n")
