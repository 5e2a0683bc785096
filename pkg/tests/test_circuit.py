import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulus.circuit import (
    DENSITY_RANGES,
    Circuit,
    Pauli,
    PauliProduct,
    Rotation,
    SynthParams,
    TLayer,
    active_set,
    generate,
    parse_circuit,
    profile,
    profile_all,
    serialize_circuit,
    totals,
)
from annulus.errors import CircuitError


def layer(*products):
    return TLayer([Rotation(PauliProduct(p)) for p in products])


def make_circuit(num_qubits, layer_products, name="t"):
    return Circuit(name, num_qubits, tuple(layer(*ps) for ps in layer_products))


class TestTypes:
    def test_pauli_product_rejects_empty(self):
        with pytest.raises(CircuitError):
            PauliProduct({})

    def test_pauli_product_sorted_support(self):
        p = PauliProduct({3: "X", 1: "Z"})
        assert p.qubits == (1, 3)

    def test_rotation_rejects_unknown_angle(self):
        with pytest.raises(CircuitError):
            Rotation(PauliProduct({0: "X"}), "pi/2")

    def test_layer_rejects_overlap(self):
        with pytest.raises(CircuitError, match="overlapping supports"):
            layer({0: "X"}, {0: "Z"})

    def test_layer_rejects_quarter(self):
        with pytest.raises(CircuitError):
            TLayer([Rotation(PauliProduct({0: "X"}), "pi/4")])

    def test_circuit_rejects_out_of_range_qubit(self):
        with pytest.raises(CircuitError):
            make_circuit(1, [[{1: "X"}]])


class TestProfile:
    def test_hand_counted_three_layer_example(self):
        # layers: {0:Y}, {0:X,1:Z}, {0:Y,1:X}
        c = make_circuit(2, [[{0: "Y"}], [{0: "X", 1: "Z"}], [{0: "Y", 1: "X"}]])
        p = profile(c, 0)
        assert (p.t_s, p.t_m, p.y_s, p.y_m) == (1, 2, 1, 1)
        assert p.deg_int == 2
        assert p.nu == 3
        assert p.y_total == 2

    def test_idle_qubit_all_zero(self):
        c = make_circuit(3, [[{0: "X"}], [{0: "Z", 1: "Y"}]])
        p = profile(c, 2)
        assert (p.t_s, p.t_m, p.y_s, p.y_m, p.nu, p.y_total) == (0, 0, 0, 0, 0, 0)

    def test_shared_edge_weight_two(self):
        # two multi-qubit rotations over the same pair: both count in t_m/deg_int
        c = make_circuit(
            4,
            [[{1: "Y"}], [{1: "X", 2: "Z"}], [{1: "Z", 2: "X"}]],
        )
        p = profile(c, 1)
        assert p.t_m == 2
        assert p.deg_int == 2

    def test_out_of_range(self):
        c = make_circuit(2, [[{0: "X"}]])
        with pytest.raises(CircuitError):
            profile(c, 2)


def naive_profile(circuit, q):
    """Independent recount, one rotation at a time."""
    t_s = t_m = y_s = y_m = 0
    nu = 0
    for lay in circuit.layers:
        active = False
        for rot in lay.rotations:
            pauli = rot.product.pauli_on(q)
            if pauli is None:
                continue
            active = True
            if rot.product.arity > 1:
                t_m += 1
                y_m += pauli == Pauli.Y
            else:
                t_s += 1
                y_s += pauli == Pauli.Y
        nu += active
    return t_s, t_m, y_s, y_m, nu


@st.composite
def small_circuits(draw):
    num_qubits = draw(st.integers(2, 6))
    num_layers = draw(st.integers(0, 6))
    layers = []
    for _ in range(num_layers):
        available = list(range(num_qubits))
        rotations = []
        while available and draw(st.booleans()):
            arity = draw(st.integers(1, min(3, len(available))))
            members = available[:arity]
            available = available[arity:]
            paulis = {
                q: draw(st.sampled_from(["X", "Y", "Z"])) for q in members
            }
            rotations.append(Rotation(PauliProduct(paulis)))
        layers.append(TLayer(rotations))
    return Circuit("hyp", num_qubits, tuple(layers))


class TestProfileOracle:
    @settings(max_examples=60, deadline=None)
    @given(small_circuits())
    def test_matches_naive_recount(self, circuit):
        profiles = profile_all(circuit)
        for q in range(circuit.num_qubits):
            assert (
                profiles[q].t_s,
                profiles[q].t_m,
                profiles[q].y_s,
                profiles[q].y_m,
                profiles[q].nu,
            ) == naive_profile(circuit, q)

    @settings(max_examples=60, deadline=None)
    @given(small_circuits())
    def test_count_identities(self, circuit):
        n_t, _ = totals(circuit)
        profiles = profile_all(circuit)
        assert sum(p.nu for p in profiles) == n_t
        assert sum(p.t_s for p in profiles) + sum(p.t_m for p in profiles) >= n_t


class TestActiveSetAndTotals:
    def test_active_set_union(self):
        c = make_circuit(4, [[{0: "X", 2: "Z"}]])
        assert active_set(c, 0) == {0, 2}

    def test_empty_layer(self):
        c = Circuit("e", 2, (TLayer(()),))
        assert active_set(c, 0) == frozenset()

    def test_three_singletons(self):
        c = make_circuit(4, [[{0: "X"}, {1: "Y"}, {3: "Z"}]])
        assert active_set(c, 0) == {0, 1, 3}

    def test_out_of_range_layer(self):
        c = make_circuit(2, [[{0: "X"}]])
        with pytest.raises(CircuitError):
            active_set(c, 1)

    def test_totals_example(self):
        c = make_circuit(
            4, [[{0: "X", 2: "Z"}], [{1: "Y"}], [{0: "Z"}, {1: "X"}, {3: "Y"}]]
        )
        assert totals(c) == (6, 3)

    def test_totals_empty(self):
        c = Circuit("e", 2, ())
        assert totals(c) == (0, 0)

    def test_totals_synthetic_recount(self):
        c = generate(SynthParams(num_qubits=20, num_layers=15,
                                 density_class="medium", seed=42))
        n_t = sum(len(lay.active_set()) for lay in c.layers)
        s_max = max(len(lay.active_set()) for lay in c.layers)
        assert totals(c) == (n_t, s_max)


class TestGenerator:
    def test_determinism(self):
        params = SynthParams(num_qubits=25, num_layers=20,
                             density_class="high", seed=99)
        assert serialize_circuit(generate(params)) == serialize_circuit(
            generate(params)
        )

    def test_high_density_floor(self):
        c = generate(SynthParams(num_qubits=100, num_layers=12,
                                 density_class="high", seed=3))
        for lay in c.layers:
            assert len(lay.active_set()) >= 60

    @pytest.mark.parametrize("density_class", sorted(DENSITY_RANGES))
    @pytest.mark.parametrize("seed", [7, 8])
    def test_layer_fractions_within_class(self, density_class, seed):
        lo, hi = DENSITY_RANGES[density_class]
        c = generate(SynthParams(num_qubits=40, num_layers=30,
                                 density_class=density_class, seed=seed))
        for lay in c.layers:
            frac = len(lay.active_set()) / c.num_qubits
            # |S_j| is the rounded target, so allow half-a-qubit slack
            assert lo - 0.5 / c.num_qubits <= frac <= hi + 0.5 / c.num_qubits

    def test_mean_fraction_low_class(self):
        c = generate(SynthParams(num_qubits=10, num_layers=10,
                                 density_class="low", seed=7))
        fractions = [len(lay.active_set()) / 10 for lay in c.layers]
        mean = sum(fractions) / len(fractions)
        assert 0.01 <= mean < 0.30

    @pytest.mark.parametrize("seed", range(6))
    def test_layer_disjointness_all_seeds(self, seed):
        # TLayer construction enforces disjointness; building is the check
        c = generate(SynthParams(num_qubits=30, num_layers=20,
                                 density_class="medium", seed=seed))
        assert c.num_layers == 20

    def test_arity_bound(self):
        c = generate(SynthParams(num_qubits=50, num_layers=25,
                                 density_class="high", seed=5,
                                 max_rotation_arity=3))
        arities = {rot.product.arity for lay in c.layers for rot in lay.rotations}
        assert max(arities) <= 3

    def test_param_validation(self):
        with pytest.raises(CircuitError):
            SynthParams(num_qubits=5, num_layers=10, density_class="low")
        with pytest.raises(CircuitError):
            SynthParams(num_qubits=10, num_layers=10, density_class="ultra")


class TestDocumentFormat:
    def test_minimal_round_trip(self):
        doc = json.dumps(
            {
                "name": "m",
                "num_qubits": 2,
                "layers": [[{"paulis": {"0": "Z"}, "angle": "pi/8",
                             "sign": "+"}]],
            }
        )
        c = parse_circuit(doc)
        assert c.num_qubits == 2
        assert c.num_layers == 1
        assert parse_circuit(serialize_circuit(c)) == c

    def test_overlap_rejected(self):
        doc = json.dumps(
            {
                "name": "bad",
                "num_qubits": 1,
                "layers": [[
                    {"paulis": {"0": "X"}, "angle": "pi/8", "sign": "+"},
                    {"paulis": {"0": "Z"}, "angle": "pi/8", "sign": "+"},
                ]],
            }
        )
        with pytest.raises(CircuitError, match="overlapping"):
            parse_circuit(doc)

    def test_empty_layers(self):
        c = parse_circuit('{"name": "e", "num_qubits": 3, "layers": []}')
        assert c.num_layers == 0
        assert totals(c) == (0, 0)

    def test_unknown_top_level_field_rejected(self):
        with pytest.raises(CircuitError, match="unknown top-level"):
            parse_circuit('{"name": "x", "num_qubits": 1, "layers": [], "zz": 1}')

    def test_unknown_rotation_field_rejected(self):
        doc = json.dumps(
            {
                "name": "x",
                "num_qubits": 1,
                "layers": [[{"paulis": {"0": "X"}, "extra": True}]],
            }
        )
        with pytest.raises(CircuitError, match="unknown fields"):
            parse_circuit(doc)

    def test_quarter_angle_in_layer_rejected(self):
        doc = json.dumps(
            {
                "name": "x",
                "num_qubits": 1,
                "layers": [[{"paulis": {"0": "X"}, "angle": "pi/4"}]],
            }
        )
        with pytest.raises(CircuitError, match="pi/8"):
            parse_circuit(doc)

    def test_index_out_of_range_rejected(self):
        doc = json.dumps(
            {
                "name": "x",
                "num_qubits": 1,
                "layers": [[{"paulis": {"1": "X"}}]],
            }
        )
        with pytest.raises(CircuitError):
            parse_circuit(doc)

    def test_final_measurements_round_trip(self):
        c = Circuit(
            "fm",
            2,
            (layer({0: "Z"}),),
            final_measurements=(
                Rotation(PauliProduct({0: "X", 1: "Z"}), "pi/4", -1),
            ),
        )
        back = parse_circuit(serialize_circuit(c))
        assert back.final_measurements == c.final_measurements

    def test_serialization_is_byte_stable(self):
        c = generate(SynthParams(num_qubits=12, num_layers=10,
                                 density_class="low", seed=1))
        assert serialize_circuit(c) == serialize_circuit(c)
