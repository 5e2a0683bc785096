"""Logical circuit representation: T-layers of Pauli-product rotations.

A circuit in final form is an ordered list of T-layers, each holding
pi/8 Pauli-product rotations with pairwise disjoint supports, optionally
followed by terminal measurement products (the absorbed Clifford block).
Per-qubit workload statistics (single/multi rotation counts, Y counts,
interaction degree, active-layer count) drive every placement decision
downstream, so they are computed in one flat pass by the kernel backend.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import CircuitError

EIGHTH = "pi/8"
QUARTER = "pi/4"
_ANGLES = (EIGHTH, QUARTER)

DENSITY_RANGES: dict[str, tuple[float, float]] = {
    "low": (0.01, 0.30),
    "medium": (0.30, 0.60),
    "high": (0.60, 1.00),
}


class Pauli(enum.IntEnum):
    """Non-identity single-qubit Pauli. Identity is encoded by absence."""

    X = 1
    Y = 2
    Z = 3

    def __str__(self) -> str:  # noqa: D105
        return self.name


def _as_pauli(value: "Pauli | str") -> Pauli:
    if isinstance(value, Pauli):
        return value
    try:
        return Pauli[value]
    except KeyError:
        raise CircuitError(f"unknown Pauli {value!r} (expected X, Y or Z)") from None


@dataclass(frozen=True)
class PauliProduct:
    """Tensor product of non-identity Paulis, keyed by qubit index."""

    support: tuple[tuple[int, Pauli], ...]

    def __init__(self, paulis: Mapping[int, "Pauli | str"]):
        if not paulis:
            raise CircuitError("Pauli product must act on at least one qubit")
        items = []
        for q, p in sorted(paulis.items()):
            q = int(q)
            if q < 0:
                raise CircuitError(f"negative qubit index {q}")
            items.append((q, _as_pauli(p)))
        object.__setattr__(self, "support", tuple(items))

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.support)

    @property
    def arity(self) -> int:
        return len(self.support)

    def pauli_on(self, q: int) -> Pauli | None:
        for qi, p in self.support:
            if qi == q:
                return p
        return None

    def as_dict(self) -> dict[int, Pauli]:
        return dict(self.support)

    def commutes_with(self, other: "PauliProduct") -> bool:
        """Operator commutation: even number of anticommuting local pairs."""
        mine = self.as_dict()
        clashes = sum(
            1 for q, p in other.support if q in mine and mine[q] != p
        )
        return clashes % 2 == 0

    def __str__(self) -> str:
        return " ".join(f"{p}{q}" for q, p in self.support)


# Single-qubit products: table[a][b] = (phase exponent k in i**k, result)
# for a*b with a, b in {X, Y, Z}; None result means identity.
_MUL: dict[Pauli, dict[Pauli, tuple[int, Pauli | None]]] = {
    Pauli.X: {Pauli.X: (0, None), Pauli.Y: (1, Pauli.Z), Pauli.Z: (3, Pauli.Y)},
    Pauli.Y: {Pauli.X: (3, Pauli.Z), Pauli.Y: (0, None), Pauli.Z: (1, Pauli.X)},
    Pauli.Z: {Pauli.X: (1, Pauli.Y), Pauli.Y: (3, Pauli.X), Pauli.Z: (0, None)},
}


def pauli_product_mul(
    a: PauliProduct, b: PauliProduct
) -> tuple[int, PauliProduct | None]:
    """Multiply two Pauli products.

    Returns ``(k, product)`` with ``a @ b = i**k * product`` and ``product``
    ``None`` when the result is proportional to the identity.
    """
    phase = 0
    out: dict[int, Pauli] = dict(a.support)
    for q, p in b.support:
        if q in out:
            k, r = _MUL[out[q]][p]
            phase = (phase + k) % 4
            if r is None:
                del out[q]
            else:
                out[q] = r
        else:
            out[q] = p
    return phase, (PauliProduct(out) if out else None)


@dataclass(frozen=True)
class Rotation:
    """Pauli-product rotation exp(-i * sign * theta * P), theta in {pi/8, pi/4}."""

    product: PauliProduct
    angle: str = EIGHTH
    sign: int = +1

    def __post_init__(self):
        if self.angle not in _ANGLES:
            raise CircuitError(f"unknown angle class {self.angle!r}")
        if self.sign not in (+1, -1):
            raise CircuitError("rotation sign must be +1 or -1")

    @property
    def is_eighth(self) -> bool:
        return self.angle == EIGHTH


@dataclass(frozen=True)
class TLayer:
    """One step of concurrently executing pi/8 rotations (disjoint supports)."""

    rotations: tuple[Rotation, ...]

    def __init__(self, rotations: Iterable[Rotation]):
        rotations = tuple(rotations)
        seen: set[int] = set()
        for rot in rotations:
            if not rot.is_eighth:
                raise CircuitError("T-layers may contain only pi/8 rotations")
            for q in rot.product.qubits:
                if q in seen:
                    raise CircuitError(
                        f"overlapping supports within a layer (qubit {q})"
                    )
                seen.add(q)
        object.__setattr__(self, "rotations", rotations)

    def active_set(self) -> frozenset[int]:
        return frozenset(q for rot in self.rotations for q in rot.product.qubits)


@dataclass(frozen=True)
class Circuit:
    """A workload: Q logical qubits and an ordered sequence of T-layers."""

    name: str
    num_qubits: int
    layers: tuple[TLayer, ...]
    final_measurements: tuple[Rotation, ...] = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        for j, layer in enumerate(self.layers):
            for rot in layer.rotations:
                for q in rot.product.qubits:
                    if q >= self.num_qubits:
                        raise CircuitError(
                            f"layer {j}: qubit index {q} >= num_qubits "
                            f"{self.num_qubits}"
                        )
        for rot in self.final_measurements:
            for q in rot.product.qubits:
                if q >= self.num_qubits:
                    raise CircuitError(
                        f"final measurement qubit {q} >= num_qubits"
                    )

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @cached_property
    def _flat(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Flattened CSR-style arrays consumed by the kernel backend.

        (layer_ptr[J+1] into rotations, rot_ptr[R+1] into members,
        member qubit indices, member Pauli codes).
        """
        layer_ptr = [0]
        rot_ptr = [0]
        qubits: list[int] = []
        paulis: list[int] = []
        for layer in self.layers:
            for rot in layer.rotations:
                for q, p in rot.product.support:
                    qubits.append(q)
                    paulis.append(int(p))
                rot_ptr.append(len(qubits))
            layer_ptr.append(len(rot_ptr) - 1)
        return (
            np.asarray(layer_ptr, dtype=np.int64),
            np.asarray(rot_ptr, dtype=np.int64),
            np.asarray(qubits, dtype=np.int64),
            np.asarray(paulis, dtype=np.int8),
        )

    @cached_property
    def _totals(self) -> tuple[int, int]:
        layer_ptr, rot_ptr, qubits, _ = self._flat
        if self.num_layers == 0:
            return 0, 0
        members_before_layer = rot_ptr[layer_ptr]
        sizes = np.diff(members_before_layer)
        return int(qubits.shape[0]), int(sizes.max(initial=0))


@dataclass(frozen=True)
class QubitProfile:
    """Per-qubit non-Clifford statistics over a circuit's T-layers."""

    t_s: int  # single-qubit pi/8 rotations on q
    t_m: int  # multi-qubit pi/8 rotations involving q
    y_s: int  # of t_s, those with local Pauli Y
    y_m: int  # of t_m, those with local Pauli Y
    nu: int  # layers in which q is active
    deg_int: int = field(init=False)
    y_total: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "deg_int", self.t_m)
        object.__setattr__(self, "y_total", self.y_s + self.y_m)


def active_set(circuit: Circuit, j: int) -> frozenset[int]:
    """Qubits touched by layer ``j`` (union of its rotation supports)."""
    if not 0 <= j < circuit.num_layers:
        raise CircuitError(f"layer index {j} out of range (J={circuit.num_layers})")
    return circuit.layers[j].active_set()


def profile_all(circuit: Circuit) -> list[QubitProfile]:
    """Profiles for every qubit, one flat pass via the kernel backend."""
    layer_ptr, rot_ptr, qubits, paulis = circuit._flat
    t_s, t_m, y_s, y_m, nu = _kernels.profile_counts(
        layer_ptr, rot_ptr, qubits, paulis, circuit.num_qubits
    )
    return [
        QubitProfile(int(t_s[q]), int(t_m[q]), int(y_s[q]), int(y_m[q]), int(nu[q]))
        for q in range(circuit.num_qubits)
    ]


def profile(circuit: Circuit, q: int) -> QubitProfile:
    """Workload statistics for a single qubit."""
    if not 0 <= q < circuit.num_qubits:
        raise CircuitError(f"qubit {q} out of range (Q={circuit.num_qubits})")
    return profile_all(circuit)[q]


def totals(circuit: Circuit) -> tuple[int, int]:
    """(N_T, S_max): total active-qubit slots and peak active-set size.

    Disjoint supports within a layer make both totals readable off the
    flattened arrays: every member entry is one active-set slot.
    """
    return circuit._totals


@dataclass(frozen=True)
class SynthParams:
    """Parameters for the synthetic workload generator."""

    num_qubits: int
    num_layers: int
    density_class: str
    multi_qubit_fraction: float = 0.3
    max_rotation_arity: int = 4
    seed: int = 0

    def __post_init__(self):
        if not 10 <= self.num_qubits <= 1000:
            raise CircuitError("num_qubits must be in [10, 1000]")
        if not 10 <= self.num_layers <= 1000:
            raise CircuitError("num_layers must be in [10, 1000]")
        if self.density_class not in DENSITY_RANGES:
            raise CircuitError(f"unknown density class {self.density_class!r}")
        if not 0.0 <= self.multi_qubit_fraction <= 1.0:
            raise CircuitError("multi_qubit_fraction must be a probability")
        if self.max_rotation_arity < 2:
            raise CircuitError("max_rotation_arity must be >= 2")


def generate(params: SynthParams) -> Circuit:
    """Deterministic synthetic circuit for the given parameters and seed.

    Each layer draws an active fraction uniformly from the density-class
    range and activates that many distinct qubits. Which qubits activate,
    and which of them join multi-qubit rotations, is skewed by per-circuit
    propensity weights so that qubit profiles are heterogeneous enough for
    cost-based placement to have signal. Local Paulis are uniform over
    {X, Y, Z}; signs are uniform over {+, -}.
    """
    rng = np.random.default_rng(np.random.PCG64(params.seed))
    q_count = params.num_qubits
    lo, hi = DENSITY_RANGES[params.density_class]

    activity = rng.dirichlet(np.full(q_count, 0.5))
    multi_affinity = rng.dirichlet(np.full(q_count, 0.5))

    layers = []
    for _ in range(params.num_layers):
        fraction = rng.uniform(lo, hi)
        n_active = int(np.floor(fraction * q_count + 0.5))
        n_active = min(n_active, q_count)
        if n_active == 0:
            layers.append(TLayer(()))
            continue
        active = rng.choice(q_count, size=n_active, replace=False, p=activity)
        remaining = [int(q) for q in active]
        rotations = []
        while remaining:
            if len(remaining) >= 2 and rng.random() < params.multi_qubit_fraction:
                arity = int(
                    rng.integers(2, min(params.max_rotation_arity, len(remaining)) + 1)
                )
                weights = multi_affinity[remaining]
                weights = weights / weights.sum()
                picks = rng.choice(len(remaining), size=arity, replace=False, p=weights)
                members = [remaining[i] for i in sorted(picks, reverse=True)]
                for i in sorted(picks, reverse=True):
                    del remaining[i]
            else:
                members = [remaining.pop(0)]
            paulis = {q: Pauli(int(rng.integers(1, 4))) for q in members}
            sign = +1 if rng.random() < 0.5 else -1
            rotations.append(Rotation(PauliProduct(paulis), EIGHTH, sign))
        layers.append(TLayer(rotations))

    name = (
        f"synth-{params.density_class}-q{q_count}-j{params.num_layers}"
        f"-s{params.seed}"
    )
    return Circuit(name=name, num_qubits=q_count, layers=tuple(layers))


# --- circuit document (JSON) ------------------------------------------------

_ROTATION_FIELDS = {"paulis", "angle", "sign"}
_MEAS_FIELDS = {"paulis", "sign"}
_TOP_FIELDS = {"name", "num_qubits", "layers", "final_measurements"}


def _parse_product(obj, where: str) -> PauliProduct:
    if not isinstance(obj, dict) or not obj:
        raise CircuitError(f"{where}: 'paulis' must be a non-empty object")
    paulis = {}
    for key, val in obj.items():
        try:
            q = int(key)
        except ValueError:
            raise CircuitError(f"{where}: bad qubit key {key!r}") from None
        paulis[q] = val
    return PauliProduct(paulis)


def _parse_sign(raw, where: str) -> int:
    if raw == "+":
        return +1
    if raw == "-":
        return -1
    raise CircuitError(f"{where}: sign must be '+' or '-', got {raw!r}")


def parse_circuit(text: str) -> Circuit:
    """Parse and validate a circuit document (see ``serialize_circuit``)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"malformed circuit document: {exc}") from None
    if not isinstance(doc, dict):
        raise CircuitError("circuit document must be a JSON object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise CircuitError(f"unknown top-level fields: {sorted(unknown)}")
    for req in ("name", "num_qubits", "layers"):
        if req not in doc:
            raise CircuitError(f"missing required field {req!r}")
    if not isinstance(doc["num_qubits"], int):
        raise CircuitError("num_qubits must be an integer")
    if not isinstance(doc["layers"], list):
        raise CircuitError("layers must be an array")

    layers = []
    for j, raw_layer in enumerate(doc["layers"]):
        if not isinstance(raw_layer, list):
            raise CircuitError(f"layer {j} must be an array of rotations")
        rotations = []
        for k, raw in enumerate(raw_layer):
            where = f"layer {j} rotation {k}"
            if not isinstance(raw, dict):
                raise CircuitError(f"{where}: must be an object")
            unknown = set(raw) - _ROTATION_FIELDS
            if unknown:
                raise CircuitError(f"{where}: unknown fields {sorted(unknown)}")
            if raw.get("angle", EIGHTH) != EIGHTH:
                raise CircuitError(
                    f"{where}: layers accept only pi/8 rotations, got "
                    f"{raw.get('angle')!r}"
                )
            product = _parse_product(raw.get("paulis"), where)
            sign = _parse_sign(raw.get("sign", "+"), where)
            rotations.append(Rotation(product, EIGHTH, sign))
        layers.append(TLayer(rotations))

    finals = []
    for k, raw in enumerate(doc.get("final_measurements") or []):
        where = f"final measurement {k}"
        if not isinstance(raw, dict):
            raise CircuitError(f"{where}: must be an object")
        unknown = set(raw) - _MEAS_FIELDS
        if unknown:
            raise CircuitError(f"{where}: unknown fields {sorted(unknown)}")
        product = _parse_product(raw.get("paulis"), where)
        sign = _parse_sign(raw.get("sign", "+"), where)
        finals.append(Rotation(product, QUARTER, sign))

    return Circuit(
        name=str(doc["name"]),
        num_qubits=doc["num_qubits"],
        layers=tuple(layers),
        final_measurements=tuple(finals),
    )


def serialize_circuit(circuit: Circuit) -> str:
    """Canonical JSON document for a circuit (byte-stable for a given input)."""
    doc: dict = {
        "name": circuit.name,
        "num_qubits": circuit.num_qubits,
        "layers": [
            [
                {
                    "paulis": {str(q): str(p) for q, p in rot.product.support},
                    "angle": rot.angle,
                    "sign": "+" if rot.sign > 0 else "-",
                }
                for rot in layer.rotations
            ]
            for layer in circuit.layers
        ],
    }
    if circuit.final_measurements:
        doc["final_measurements"] = [
            {
                "paulis": {str(q): str(p) for q, p in rot.product.support},
                "sign": "+" if rot.sign > 0 else "-",
            }
            for rot in circuit.final_measurements
        ]
    return json.dumps(doc, indent=1) + "\n"
