import pytest

from annulus.circuit import (
    Circuit,
    PauliProduct,
    QubitProfile,
    Rotation,
    SynthParams,
    TLayer,
    generate,
)
from annulus.errors import CapacityError, GeometryError
from annulus.fast_y import FastYModel, delta, eviction_penalty, optimize
from annulus.floorplan import FloorplanConfig, TileCoord, build, is_corner
from annulus.placement import Placement, greedy_place
from annulus.scheduler import LatencyModel, simulate

MODEL = FastYModel()


def layer(*products):
    return TLayer([Rotation(PauliProduct(p)) for p in products])


def y_heavy_circuit(num_qubits, y_counts, shared_layers=False):
    """One Y rotation per count, one qubit active per layer."""
    layers = []
    for q, count in enumerate(y_counts):
        for _ in range(count):
            layers.append(layer({q: "Y"}))
    return Circuit("ys", num_qubits, tuple(layers))


class TestModel:
    def test_defaults(self):
        assert (MODEL.t_y_slow_edge, MODEL.t_y_slow_corner, MODEL.t_y_fast) == (
            5, 7, 1,
        )

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            FastYModel(t_y_fast=5)


class TestDelta:
    def test_edge_example(self):
        fp = build(FloorplanConfig(n=8))
        p = QubitProfile(t_s=3, t_m=0, y_s=3, y_m=0, nu=3)
        assert delta(p, TileCoord(0, 1), fp, MODEL) == 12  # 3 * (5 - 1)

    def test_zero_y(self):
        fp = build(FloorplanConfig(n=8))
        p = QubitProfile(t_s=2, t_m=0, y_s=0, y_m=0, nu=2)
        assert delta(p, TileCoord(0, 1), fp, MODEL) == 0

    def test_corner_example(self):
        fp = build(FloorplanConfig(n=8))
        corner = TileCoord(0, 7)
        assert is_corner(fp, corner)
        p = QubitProfile(t_s=1, t_m=0, y_s=1, y_m=0, nu=1)
        assert delta(p, corner, fp, MODEL) == 6  # 7 - 1

    def test_outer_ring_rejected(self):
        fp = build(FloorplanConfig(n=8, outer_rings=1))
        p = QubitProfile(1, 0, 1, 0, 1)
        with pytest.raises(GeometryError):
            delta(p, TileCoord(1, 0), fp, MODEL)


class TestEvictionPenalty:
    def test_ring1_free(self):
        fp = build(FloorplanConfig(n=8, outer_rings=1))
        placement = Placement(assignment={0: TileCoord(0, 1)})
        penalty, delta_r = eviction_penalty(0, placement, fp, nu=10)
        assert (penalty, delta_r) == (10, 1)

    def test_idle_qubit_free_eviction(self):
        fp = build(FloorplanConfig(n=8, outer_rings=1))
        placement = Placement(assignment={0: TileCoord(0, 1)})
        assert eviction_penalty(0, placement, fp, nu=0) == (0, 1)

    def test_ring1_full_goes_to_ring2(self):
        fp = build(FloorplanConfig(n=8, outer_rings=2))
        assignment = {0: TileCoord(0, 1)}
        for i in range(fp.ring_sizes[1]):
            assignment[i + 1] = TileCoord(1, i)
        placement = Placement(assignment=assignment)
        assert eviction_penalty(0, placement, fp, nu=4) == (8, 2)

    def test_full_floorplan_errors(self):
        fp = build(FloorplanConfig(n=8))  # no outer rings at all
        placement = Placement(assignment={0: TileCoord(0, 1)})
        with pytest.raises(CapacityError):
            eviction_penalty(0, placement, fp, nu=1)


class TestOptimize:
    def test_no_y_work_is_identity(self):
        circuit = Circuit(
            "xz", 4, tuple(layer({q: "X"}) for q in range(4))
        )
        fp = build(FloorplanConfig(n=8, outer_rings=1))
        placement = greedy_place(circuit, fp)
        out = optimize(circuit, placement, fp)
        assert out.assignment == placement.assignment
        assert not out.promoted
        assert not out.promotion_log

    def test_single_promotion_speeds_up_y(self):
        # one busy Y qubit, plenty of free ring-0 space: Fig-7-style payoff
        circuit = y_heavy_circuit(2, [6, 0])
        fp = build(FloorplanConfig(n=8, outer_rings=1))
        placement = greedy_place(circuit, fp)
        before = simulate(circuit, placement, fp)
        out = optimize(circuit, placement, fp)
        after = simulate(circuit, out, fp)
        assert 0 in out.promoted
        assert out.tiles_consumed() == circuit.num_qubits + len(out.promoted)
        # each promoted Y layer drops from 5t to 1t
        assert before.layers[0].t_meas == 5
        assert after.layers[0].t_meas == 1
        assert after.t_total == before.t_total - 6 * 4

    def test_gain_gate_sign(self):
        # q0 sits beside the theta=7 corner, so its only annexable
        # neighbor is q1's tile: Delta = 12 vs I = nu(q1) decides
        fp = build(FloorplanConfig(n=8, outer_rings=1))
        placement = Placement(
            assignment={0: TileCoord(0, 8), 1: TileCoord(0, 9)}
        )

        def scenario(nu1):
            layers = tuple(layer({0: "Y"}) for _ in range(3)) + tuple(
                layer({1: "Z"}) for _ in range(nu1)
            )
            return Circuit(f"gate{nu1}", 2, layers)

        out = optimize(scenario(10), placement, fp)  # G = 12 - 10 = 2 > 0
        promo = [r for r in out.promotion_log if r.qubit == 0]
        assert promo and promo[0].evicted == 1
        assert promo[0].speedup == 12
        assert promo[0].penalty == 10
        assert promo[0].gain == 2

        out14 = optimize(scenario(14), placement, fp)  # G = 12 - 14 <= 0
        assert 0 not in out14.promoted

    def test_accounting_and_log_fields(self):
        circuit = generate(SynthParams(num_qubits=24, num_layers=20,
                                       density_class="medium", seed=3))
        fp = build(FloorplanConfig(n=10, outer_rings=1))
        placement = greedy_place(circuit, fp)
        out = optimize(circuit, placement, fp)
        occ = out.occupied()  # raises on double-assignment
        assert len(occ) == out.tiles_consumed()
        assert out.tiles_consumed() == circuit.num_qubits + len(out.promoted)
        for rec in out.promotion_log:
            assert rec.gain == rec.speedup - rec.penalty
            assert rec.gain > 0
            assert rec.second_tile.r == 0
            if rec.evicted is not None:
                assert rec.destination.r >= 1

    def test_promoted_pair_is_adjacent_non_corner(self):
        circuit = generate(SynthParams(num_qubits=20, num_layers=25,
                                       density_class="high", seed=8))
        fp = build(FloorplanConfig(n=10, outer_rings=1))
        out = optimize(circuit, greedy_place(circuit, fp), fp)
        for q in out.promoted:
            own = out.assignment[q]
            annex = out.second_tiles[q]
            assert own.r == 0 and annex.r == 0
            assert abs(own.theta - annex.theta) == 1
            assert not is_corner(fp, own)
            assert not is_corner(fp, annex)

    @pytest.mark.parametrize("seed", range(8))
    @pytest.mark.parametrize("density", ["low", "high"])
    def test_never_hurts(self, seed, density):
        circuit = generate(SynthParams(num_qubits=40, num_layers=25,
                                       density_class=density, seed=seed))
        from annulus.circuit import totals
        from annulus.floorplan import auto_config

        fp = build(auto_config(40, totals(circuit)[1]))
        placement = greedy_place(circuit, fp)
        t_off = simulate(circuit, placement, fp).t_total
        t_on = simulate(circuit, optimize(circuit, placement, fp), fp).t_total
        assert t_on <= t_off

    @pytest.mark.parametrize("seed", range(4))
    def test_budget_monotone(self, seed):
        circuit = generate(SynthParams(num_qubits=30, num_layers=25,
                                       density_class="high", seed=seed))
        from annulus.circuit import totals
        from annulus.floorplan import auto_config

        fp = build(auto_config(30, totals(circuit)[1]))
        placement = greedy_place(circuit, fp)
        previous = None
        for budget in (0, 1, 2, 4, 8, None):
            out = optimize(circuit, placement, fp, budget=budget)
            t_total = simulate(circuit, out, fp).t_total
            if previous is not None:
                assert t_total <= previous
            previous = t_total

    def test_full_floorplan_yields_zero_promotions(self):
        # every tile occupied, no outer rings: nothing can move or annex
        fp = build(FloorplanConfig(n=8))
        circuit = y_heavy_circuit(27, [2] * 27)
        placement = greedy_place(circuit, fp)
        out = optimize(circuit, placement, fp)
        assert not out.promoted
