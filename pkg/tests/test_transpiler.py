import numpy as np
import pytest

from annulus.circuit import EIGHTH, QUARTER, Pauli, PauliProduct, Rotation
from annulus.errors import CircuitError
from annulus.transpiler import (
    Gate,
    GateList,
    commute_cliffords,
    equal_up_to_phase,
    layerize,
    oracle_unitary,
    parse_gates,
    to_rotations,
)


def rot(paulis, angle=EIGHTH, sign=+1):
    return Rotation(PauliProduct(paulis), angle, sign)


class TestParseGates:
    def test_basic_lines(self):
        gl = parse_gates("H 0\nT 0")
        assert [g.kind for g in gl.gates] == ["H", "T"]
        assert gl.num_qubits == 1

    def test_comments_and_blanks(self):
        gl = parse_gates("# header\n\nT 1  # trailing\n")
        assert gl.num_qubits == 2

    def test_cnot_distinct(self):
        with pytest.raises(CircuitError, match="distinct"):
            parse_gates("CNOT 0 0")

    def test_ppr_line(self):
        gl = parse_gates("PPR pi/8 + X0 Z2")
        gate = gl.gates[0]
        assert gate.kind == "PPR"
        assert gate.rotation.product.as_dict() == {0: Pauli.X, 2: Pauli.Z}
        assert gate.rotation.angle == EIGHTH

    def test_unknown_mnemonic(self):
        with pytest.raises(CircuitError, match="unknown mnemonic"):
            parse_gates("FOO 0")

    def test_bad_arity(self):
        with pytest.raises(CircuitError):
            parse_gates("H 0 1")


class TestDecompositions:
    def test_t_gate(self):
        rots = to_rotations(GateList(1, (Gate("T", (0,)),)))
        assert rots == [rot({0: "Z"})]

    def test_s_then_sdg_is_identity(self):
        gl = GateList(1, (Gate("S", (0,)), Gate("SDG", (0,))))
        u = oracle_unitary(to_rotations(gl), 1)
        assert equal_up_to_phase(u, np.eye(2))

    @pytest.mark.parametrize("kind", ["H", "S", "SDG", "T", "TDG"])
    def test_single_qubit_gates_match_oracle(self, kind):
        gl = GateList(1, (Gate(kind, (0,)),))
        assert equal_up_to_phase(
            oracle_unitary(to_rotations(gl), 1), oracle_unitary(gl, 1)
        )

    @pytest.mark.parametrize("qubits", [(0, 1), (1, 0)])
    def test_cnot_matches_canonical_matrix(self, qubits):
        gl = GateList(2, (Gate("CNOT", qubits),))
        u = oracle_unitary(to_rotations(gl), 2)
        assert equal_up_to_phase(u, oracle_unitary(gl, 2))

    def test_cnot_01_explicit_matrix(self):
        gl = GateList(2, (Gate("CNOT", (0, 1)),))
        # qubit 0 is the most significant bit
        expected = np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
            dtype=complex,
        )
        assert equal_up_to_phase(oracle_unitary(gl, 2), expected)


class TestCommutation:
    def test_commuting_pauli_unchanged(self):
        circuit = commute_cliffords(
            [rot({0: "Z"}, QUARTER), rot({0: "Z"})], 1
        )
        eighths = [r for lay in circuit.layers for r in lay.rotations]
        assert eighths == [rot({0: "Z"})]
        assert circuit.final_measurements == (rot({0: "Z"}, QUARTER),)

    def test_anticommuting_basis_change_is_y(self):
        circuit = commute_cliffords(
            [rot({0: "X"}, QUARTER), rot({0: "Z"})], 1
        )
        (eighth,) = [r for lay in circuit.layers for r in lay.rotations]
        assert eighth.product.as_dict() == {0: Pauli.Y}
        # the sign is whatever preserves the unitary; the oracle decides
        u_in = oracle_unitary([rot({0: "X"}, QUARTER), rot({0: "Z"})], 1)
        assert equal_up_to_phase(oracle_unitary(circuit, 1), u_in)

    def test_angle_classes_and_counts_preserved(self):
        rots = to_rotations(
            parse_gates("H 0\nT 0\nCNOT 0 1\nT 1\nS 0\nTDG 0")
        )
        n_eighth = sum(r.angle == EIGHTH for r in rots)
        circuit = commute_cliffords(rots, 2)
        eighths = [r for lay in circuit.layers for r in lay.rotations]
        assert len(eighths) == n_eighth
        assert all(r.angle == EIGHTH for r in eighths)
        assert all(r.angle == QUARTER for r in circuit.final_measurements)


def random_gate_list(rng, num_qubits, length):
    gates = []
    for _ in range(length):
        kind = rng.choice(["H", "S", "SDG", "T", "TDG", "CNOT"])
        if kind == "CNOT" and num_qubits >= 2:
            pair = rng.choice(num_qubits, size=2, replace=False)
            gates.append(Gate("CNOT", (int(pair[0]), int(pair[1]))))
        elif kind == "CNOT":
            gates.append(Gate("T", (0,)))
        else:
            gates.append(Gate(kind, (int(rng.integers(num_qubits)),)))
    return GateList(num_qubits, tuple(gates))


class TestEndToEnd:
    @pytest.mark.parametrize("seed", range(40))
    def test_unitary_preserved_random_lists(self, seed):
        rng = np.random.default_rng(seed)
        num_qubits = int(rng.integers(1, 4))
        gl = random_gate_list(rng, num_qubits, int(rng.integers(1, 13)))
        circuit = commute_cliffords(to_rotations(gl), num_qubits)
        assert equal_up_to_phase(
            oracle_unitary(circuit, num_qubits),
            oracle_unitary(gl, num_qubits),
            tol=1e-9,
        )


class TestLayerize:
    def test_disjoint_pack_together(self):
        layers = layerize([rot({0: "Z"}), rot({1: "X"})])
        assert len(layers) == 1
        assert len(layers[0].rotations) == 2

    def test_overlap_splits(self):
        layers = layerize([rot({0: "Z"}), rot({0: "X"})])
        assert len(layers) == 2

    def test_idempotent_on_layered(self):
        layers = layerize([rot({0: "Z"}), rot({1: "X"}), rot({0: "X"})])
        flat = [r for lay in layers for r in lay.rotations]
        again = layerize(flat)
        assert [lay.rotations for lay in again] == [lay.rotations for lay in layers]

    def test_rejects_quarter(self):
        with pytest.raises(CircuitError):
            layerize([rot({0: "Z"}, QUARTER)])

    @pytest.mark.parametrize("seed", range(8))
    def test_output_is_topological_order_of_dependencies(self, seed):
        rng = np.random.default_rng(100 + seed)
        rots = []
        for _ in range(50):
            arity = int(rng.integers(1, 4))
            members = rng.choice(6, size=arity, replace=False)
            rots.append(
                rot({int(q): ["X", "Y", "Z"][int(rng.integers(3))]
                     for q in members})
            )
        layers = layerize(rots)
        flat = [r for lay in layers for r in lay.rotations]
        assert sorted(map(id, flat)) == sorted(map(id, rots))
        # overlapping pairs keep their input order
        position = {id(r): i for i, r in enumerate(flat)}
        for i, a in enumerate(rots):
            for b in rots[i + 1:]:
                if set(a.product.qubits) & set(b.product.qubits):
                    assert position[id(a)] < position[id(b)]
        # disjoint supports within each layer
        for lay in layers:
            seen = set()
            for r in lay.rotations:
                assert not (seen & set(r.product.qubits))
                seen |= set(r.product.qubits)


class TestOracle:
    def test_empty_is_identity(self):
        assert np.allclose(oracle_unitary([], 2), np.eye(4))

    def test_t_squared_is_s(self):
        u_tt = oracle_unitary(
            GateList(1, (Gate("T", (0,)), Gate("T", (0,)))), 1
        )
        u_s = oracle_unitary(GateList(1, (Gate("S", (0,)),)), 1)
        assert equal_up_to_phase(u_tt, u_s)

    def test_eighth_x_matrix(self):
        u = oracle_unitary([rot({0: "X"})], 1)
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        expected = np.cos(np.pi / 8) * np.eye(2) - 1j * np.sin(np.pi / 8) * x
        assert np.allclose(u, expected)

    def test_too_many_qubits(self):
        with pytest.raises(CircuitError):
            oracle_unitary([], 5)
