"""Clifford+T to canonical pi/8 rotation form.

Gates decompose into Pauli-product rotations (Cliffords as pi/4, T as
pi/8); pi/4 rotations then commute rightward past the pi/8 rotations,
conjugating their Pauli bases, until only pi/8 rotations remain followed
by a terminal Clifford block stored on the circuit's final measurement
layer. A dense-matrix oracle (Q <= 4) pins every sign convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import (
    EIGHTH,
    QUARTER,
    Circuit,
    Pauli,
    PauliProduct,
    Rotation,
    TLayer,
    pauli_product_mul,
)
from .errors import CircuitError

SINGLE_QUBIT_GATES = ("H", "S", "SDG", "T", "TDG")
GATE_KINDS = SINGLE_QUBIT_GATES + ("CNOT", "PPR")


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    rotation: Rotation | None = None  # PPR only

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind in SINGLE_QUBIT_GATES and len(self.qubits) != 1:
            raise CircuitError(f"{self.kind} takes exactly one qubit")
        if self.kind == "CNOT":
            if len(self.qubits) != 2:
                raise CircuitError("CNOT takes exactly two qubits")
            if self.qubits[0] == self.qubits[1]:
                raise CircuitError("CNOT requires distinct qubits")
        if self.kind == "PPR" and self.rotation is None:
            raise CircuitError("PPR gate needs a rotation payload")
        if any(q < 0 for q in self.qubits):
            raise CircuitError("negative qubit index")


@dataclass(frozen=True)
class GateList:
    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise CircuitError(
                    f"gate {g.kind} touches qubit {max(g.qubits)} >= "
                    f"num_qubits {self.num_qubits}"
                )


def parse_gates(text: str) -> GateList:
    """Parse the line-based gate format.

    One gate per line: ``MNEMONIC q [q2]``; ``PPR <angle> <sign>
    <Pauli><qubit>...`` for direct rotations; ``#`` starts a comment.
    The qubit count is inferred from the largest index used.
    """
    gates: list[Gate] = []
    top = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        mnem = parts[0].upper()
        where = f"line {lineno}"
        if mnem == "PPR":
            if len(parts) < 4:
                raise CircuitError(f"{where}: PPR needs angle, sign and operators")
            angle_txt = parts[1]
            if angle_txt not in (EIGHTH, QUARTER):
                raise CircuitError(f"{where}: unknown PPR angle {angle_txt!r}")
            if parts[2] not in ("+", "-"):
                raise CircuitError(f"{where}: PPR sign must be + or -")
            sign = +1 if parts[2] == "+" else -1
            paulis: dict[int, Pauli] = {}
            for tok in parts[3:]:
                letter, idx = tok[:1].upper(), tok[1:]
                if letter not in ("X", "Y", "Z") or not idx.isdigit():
                    raise CircuitError(f"{where}: bad Pauli operand {tok!r}")
                q = int(idx)
                if q in paulis:
                    raise CircuitError(f"{where}: duplicate qubit {q} in PPR")
                paulis[q] = Pauli[letter]
            rot = Rotation(PauliProduct(paulis), angle_txt, sign)
            gates.append(Gate("PPR", tuple(sorted(paulis)), rot))
            top = max(top, max(paulis) + 1)
        elif mnem in SINGLE_QUBIT_GATES or mnem == "CNOT":
            want = 2 if mnem == "CNOT" else 1
            args = parts[1:]
            if len(args) != want or not all(a.isdigit() for a in args):
                raise CircuitError(
                    f"{where}: {mnem} takes {want} qubit argument(s)"
                )
            qs = tuple(int(a) for a in args)
            gates.append(Gate(mnem, qs))
            top = max(top, max(qs) + 1)
        else:
            raise CircuitError(f"{where}: unknown mnemonic {parts[0]!r}")
    if not gates:
        raise CircuitError("empty gate list")
    return GateList(num_qubits=top, gates=tuple(gates))


def _q(pauli: Pauli, q: int, sign: int = +1) -> Rotation:
    return Rotation(PauliProduct({q: pauli}), QUARTER, sign)


def to_rotations(gates: GateList) -> list[Rotation]:
    """Standard rotation decomposition, exact up to global phase.

    T -> pi/8 Z; S -> pi/4 Z; H -> pi/4 Z, pi/4 X, pi/4 Z;
    CNOT(c,t) -> pi/4 on -Z_c X_t, pi/4 Z_c, pi/4 X_t (commuting factors).
    """
    out: list[Rotation] = []
    for g in gates.gates:
        q0 = g.qubits[0]
        if g.kind == "T":
            out.append(Rotation(PauliProduct({q0: Pauli.Z}), EIGHTH, +1))
        elif g.kind == "TDG":
            out.append(Rotation(PauliProduct({q0: Pauli.Z}), EIGHTH, -1))
        elif g.kind == "S":
            out.append(_q(Pauli.Z, q0))
        elif g.kind == "SDG":
            out.append(_q(Pauli.Z, q0, -1))
        elif g.kind == "H":
            out.extend((_q(Pauli.Z, q0), _q(Pauli.X, q0), _q(Pauli.Z, q0)))
        elif g.kind == "CNOT":
            c, t = g.qubits
            out.append(
                Rotation(PauliProduct({c: Pauli.Z, t: Pauli.X}), QUARTER, -1)
            )
            out.append(_q(Pauli.Z, c))
            out.append(_q(Pauli.X, t))
        else:  # PPR
            out.append(g.rotation)
    return out


def _conjugate(rot: Rotation, quarter: Rotation) -> Rotation:
    """Rewrite ``rot`` for a rightward move of ``quarter`` past it.

    With C = exp(-i s_c (pi/4) P_c) moved from before R to after it,
    R' = C^dag R C. Commuting bases are untouched; anticommuting bases map
    P_r -> i * s_c * P_c P_r, whose +-1 coefficient folds into the sign.
    """
    p_c, p_r = quarter.product, rot.product
    if p_c.commutes_with(p_r):
        return rot
    phase, prod = pauli_product_mul(p_c, p_r)
    # i * i**phase must be real (+-1) for anticommuting Hermitian products.
    k = (1 + phase + (2 if quarter.sign < 0 else 0)) % 4
    if prod is None or k % 2 != 0:
        raise AssertionError("anticommuting Pauli conjugation must stay Hermitian")
    sign = rot.sign * (1 if k == 0 else -1)
    return Rotation(prod, rot.angle, sign)


def commute_cliffords(
    rotations: list[Rotation], num_qubits: int, name: str = "transpiled"
) -> Circuit:
    """Push every pi/4 rotation to the end and layerize the pi/8 remainder.

    The accumulated terminal Clifford block is preserved on
    ``final_measurements`` (it carries no latency; keeping it signed lets
    the unitary oracle close over the whole transformation).
    """
    terminal: list[Rotation] = []
    eighths: list[Rotation] = []
    for rot in rotations:
        if rot.angle == QUARTER:
            terminal.append(rot)
        else:
            moved = rot
            for quarter in reversed(terminal):
                moved = _conjugate(moved, quarter)
            eighths.append(moved)
    return Circuit(
        name=name,
        num_qubits=num_qubits,
        layers=tuple(layerize(eighths)),
        final_measurements=tuple(terminal),
    )


def layerize(rotations: list[Rotation]) -> list[TLayer]:
    """Greedy order-preserving packing into T-layers.

    A rotation joins the most recent layer iff its support is disjoint
    from the layer's support and it commutes with every member; otherwise
    it opens a new layer.
    """
    layers: list[list[Rotation]] = []
    supports: list[set[int]] = []
    for rot in rotations:
        if not rot.is_eighth:
            raise CircuitError("layerize accepts pi/8 rotations only")
        qs = set(rot.product.qubits)
        if layers and not (supports[-1] & qs) and all(
            rot.product.commutes_with(other.product) for other in layers[-1]
        ):
            layers[-1].append(rot)
            supports[-1] |= qs
        else:
            layers.append([rot])
            supports.append(set(qs))
    return [TLayer(layer) for layer in layers]


# --- dense-matrix oracle -----------------------------------------------------

_P1 = {
    Pauli.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Pauli.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Pauli.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
_GATE1 = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    "TDG": np.diag([1, np.exp(-1j * np.pi / 4)]).astype(complex),
}


def _pauli_matrix(product: PauliProduct, num_qubits: int) -> np.ndarray:
    """Kron product with qubit 0 as the most significant factor."""
    mats = [np.eye(2, dtype=complex)] * num_qubits
    for q, p in product.support:
        mats[q] = _P1[p]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _rotation_matrix(rot: Rotation, num_qubits: int) -> np.ndarray:
    theta = np.pi / 8 if rot.is_eighth else np.pi / 4
    pm = _pauli_matrix(rot.product, num_qubits)
    dim = 1 << num_qubits
    return np.cos(theta) * np.eye(dim) - 1j * rot.sign * np.sin(theta) * pm


def _gate_matrix(gate: Gate, num_qubits: int) -> np.ndarray:
    if gate.kind == "PPR":
        return _rotation_matrix(gate.rotation, num_qubits)
    if gate.kind == "CNOT":
        c, t = gate.qubits
        dim = 1 << num_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for basis in range(dim):
            # qubit 0 is the most significant bit
            c_bit = (basis >> (num_qubits - 1 - c)) & 1
            target = basis ^ ((c_bit & 1) << (num_qubits - 1 - t))
            mat[target, basis] = 1
        return mat
    mats = [np.eye(2, dtype=complex)] * num_qubits
    mats[gate.qubits[0]] = _GATE1[gate.kind]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def oracle_unitary(obj, num_qubits: int) -> np.ndarray:
    """Dense unitary of a GateList, rotation list, or transpiled Circuit.

    Brute-force product of per-element matrices; limited to num_qubits <= 4
    on purpose (it exists to verify the symbolic paths, not to scale).
    """
    if num_qubits > 4:
        raise CircuitError("oracle limited to at most 4 qubits")
    dim = 1 << num_qubits
    unitary = np.eye(dim, dtype=complex)
    if isinstance(obj, GateList):
        elements = [_gate_matrix(g, num_qubits) for g in obj.gates]
    elif isinstance(obj, Circuit):
        rots = [r for layer in obj.layers for r in layer.rotations]
        rots += list(obj.final_measurements)
        elements = [_rotation_matrix(r, num_qubits) for r in rots]
    else:
        elements = [_rotation_matrix(r, num_qubits) for r in obj]
    for mat in elements:
        unitary = mat @ unitary
    return unitary


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff u = exp(i phi) v entrywise within ``tol``."""
    if u.shape != v.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[idx]) < tol:
        return bool(np.max(np.abs(u)) < tol)
    phase = u[idx] / v[idx]
    if abs(abs(phase) - 1) > 1e-6:
        return False
    return bool(np.max(np.abs(u - phase * v)) <= tol)
