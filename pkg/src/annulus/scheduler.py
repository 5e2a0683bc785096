"""Per-layer latency simulation over the annular floorplan.

Each T-layer costs a movement term (outer-ring qubits travel to their
entry lane and hop inward, serialized per lane) plus a measurement term
(max basis cost across the layer's rotations). The workload total adds
the one-off magic-state-factory startup latency.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .circuit import Circuit, Pauli, TLayer, totals
from .errors import CircuitError, GeometryError
from .floorplan import Floorplan, TileCoord, is_corner, nearest_channel, project_angle
from .placement import Placement

MOVEMENT_MODES = ("stateless", "promote_inward")


@dataclass(frozen=True)
class LatencyModel:
    """Latency constants (units of the surface-code beat t) and mode flags."""

    t_xz_edge: int = 1
    t_y_edge: int = 5
    t_xz_corner: int = 3
    t_y_corner: int = 7
    t_y_fast: int = 1
    worst_case_corner: bool = False  # +1t on corner costs when the CR is used
    tau_msf: int = 11  # 15-to-1 distillation startup
    movement_mode: str = "stateless"
    lane_pipelining: bool = True

    def __post_init__(self):
        for name in ("t_xz_edge", "t_y_edge", "t_xz_corner", "t_y_corner",
                     "t_y_fast", "tau_msf"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer (t units)")
        if self.movement_mode not in MOVEMENT_MODES:
            raise ValueError(f"movement_mode must be one of {MOVEMENT_MODES}")


@dataclass(frozen=True)
class LayerTrace:
    j: int
    t_move: int
    t_meas: int


@dataclass(frozen=True)
class Relocation:
    layer: int
    qubit: int
    from_ring: int
    to_ring: int
    to_theta: int


@dataclass(frozen=True)
class ExecutionTrace:
    layers: tuple[LayerTrace, ...]
    tau_msf: int
    t_total: int
    n_t: int
    cr_batched: bool = False
    relocations: tuple[Relocation, ...] = ()

    @property
    def sum_move(self) -> int:
        return sum(l.t_move for l in self.layers)

    @property
    def sum_meas(self) -> int:
        return sum(l.t_meas for l in self.layers)


def _channels(placement: Placement, fp: Floorplan) -> tuple[int, ...]:
    return placement.channels if placement.channels is not None else fp.lanes


def qubit_move(q: int, placement: Placement, fp: Floorplan) -> int:
    """Movement latency of one activation: radial hops plus lane distance.

    Ring-0 qubits measure in place through the adjacent ancilla ring and
    are charged nothing (their corner handling is priced in the
    measurement constants instead).
    """
    if q not in placement.assignment:
        raise CircuitError(f"qubit {q} is not placed")
    tile = placement.assignment[q]
    if tile.r == 0:
        return 0
    _, d_theta = nearest_channel(fp, tile, _channels(placement, fp))
    return tile.r + d_theta


def layer_move(
    layer: TLayer, placement: Placement, fp: Floorplan, model: LatencyModel
) -> int:
    """Layer movement: per-lane max plus serialization, max across lanes."""
    chans = _channels(placement, fp)
    lane_moves: dict[int, list[int]] = {}
    for q in sorted(layer.active_set()):
        tile = placement.assignment[q]
        if tile.r == 0:
            continue
        lane_idx, d_theta = nearest_channel(fp, tile, chans)
        lane_moves.setdefault(lane_idx, []).append(tile.r + d_theta)
    best = 0
    for moves in lane_moves.values():
        cost = max(moves) + len(moves) - 1 if model.lane_pipelining else sum(moves)
        best = max(best, cost)
    return best


def _basis_cost(
    pauli: Pauli,
    tile: TileCoord,
    promoted: bool,
    fp: Floorplan,
    model: LatencyModel,
) -> int:
    if tile.r != 0:
        # travelers measure at edge rates once inside the CR
        return model.t_y_edge if pauli == Pauli.Y else model.t_xz_edge
    extra = 1 if model.worst_case_corner else 0
    if pauli == Pauli.Y:
        if promoted:
            return model.t_y_fast
        if is_corner(fp, tile):
            return model.t_y_corner + extra
        return model.t_y_edge
    if is_corner(fp, tile):
        return model.t_xz_corner + extra
    return model.t_xz_edge


def layer_meas(
    layer: TLayer, placement: Placement, fp: Floorplan, model: LatencyModel
) -> int:
    """Layer measurement: max over rotations of the max member basis cost."""
    worst = 0
    for rot in layer.rotations:
        rot_cost = 0
        for q, p in rot.product.support:
            tile = placement.assignment[q]
            rot_cost = max(
                rot_cost,
                _basis_cost(p, tile, q in placement.promoted, fp, model),
            )
        worst = max(worst, rot_cost)
    return worst


def _batch_layers(
    circuit: Circuit, w_cr: int
) -> tuple[list[list], list[int]]:
    """Split oversized layers into sequential sub-layers (first-fit, in order)."""
    sub_layers: list[list] = []
    origin: list[int] = []
    for j, layer in enumerate(circuit.layers):
        current: list = []
        count = 0
        for rot in layer.rotations:
            arity = rot.product.arity
            if current and count + arity > w_cr:
                sub_layers.append(current)
                origin.append(j)
                current, count = [], 0
            current.append(rot)
            count += arity
        sub_layers.append(current)
        origin.append(j)
    return sub_layers, origin


def simulate(
    circuit: Circuit,
    placement: Placement,
    fp: Floorplan,
    model: LatencyModel | None = None,
) -> ExecutionTrace:
    """Run the layer-by-layer latency model and assemble the trace.

    In promote_inward mode each qubit relocates inward once after its
    first active layer (innermost free tile nearest its lane), and later
    activations are charged from the new home; stateless mode charges the
    placed position every time. Layers whose active sets exceed the CR
    capacity are batched into sequential sub-layers with a warning.
    """
    model = model or LatencyModel()
    for q in range(circuit.num_qubits):
        if q not in placement.assignment:
            raise CircuitError(f"qubit {q} is not placed")

    n_t, s_max = totals(circuit)
    cr_batched = s_max > fp.cr_capacity
    if cr_batched:
        warnings.warn(
            f"peak active set {s_max} exceeds CR capacity {fp.cr_capacity}; "
            "oversized layers are batched sequentially (cr_batched)",
            stacklevel=2,
        )
        groups, origin = _batch_layers(circuit, fp.cr_capacity)
        layer_ptr = [0]
        rot_ptr = [0]
        flat_q: list[int] = []
        flat_p: list[int] = []
        for group in groups:
            for rot in group:
                for q, p in rot.product.support:
                    flat_q.append(q)
                    flat_p.append(int(p))
                rot_ptr.append(len(flat_q))
            layer_ptr.append(len(rot_ptr) - 1)
        layer_ptr = np.asarray(layer_ptr, dtype=np.int64)
        rot_ptr = np.asarray(rot_ptr, dtype=np.int64)
        flat_qubits = np.asarray(flat_q, dtype=np.int64)
        flat_paulis = np.asarray(flat_p, dtype=np.int8)
    else:
        layer_ptr, rot_ptr, flat_qubits, flat_paulis = circuit._flat
        origin = list(range(circuit.num_layers))

    chans = _channels(placement, fp)
    num_q = circuit.num_qubits
    ring = np.zeros(num_q, dtype=np.int64)
    theta = np.zeros(num_q, dtype=np.int64)
    dtheta = np.zeros(num_q, dtype=np.int64)
    lane_id = np.zeros(num_q, dtype=np.int64)
    corner = np.zeros(num_q, dtype=np.int64)
    promoted = np.zeros(num_q, dtype=np.int64)
    for q in range(num_q):
        tile = placement.assignment[q]
        if tile.kind != "ring":
            raise GeometryError(f"qubit {q} placed on a non-ring tile")
        ring[q] = tile.r
        theta[q] = tile.theta
        lane_idx, d_theta = nearest_channel(fp, tile, chans)
        lane_id[q] = lane_idx
        dtheta[q] = d_theta
        corner[q] = 1 if is_corner(fp, tile) else 0
        promoted[q] = 1 if q in placement.promoted else 0

    occupied = np.zeros(fp.total_tiles, dtype=np.uint8)
    for tile in placement.occupied():
        occupied[fp.tile_index(tile)] = 1
    for tile in placement.reserved:
        occupied[fp.tile_index(tile)] = 1
    if placement.region is None:
        allowed = np.ones(fp.total_tiles, dtype=np.uint8)
    else:
        allowed = np.zeros(fp.total_tiles, dtype=np.uint8)
        for tile in placement.region:
            allowed[fp.tile_index(tile)] = 1
    for tile in placement.reserved:
        allowed[fp.tile_index(tile)] = 0

    lane_proj = np.zeros((len(chans), fp.num_rings), dtype=np.int64)
    for k, theta0 in enumerate(chans):
        for r in range(fp.num_rings):
            lane_proj[k, r] = project_angle(fp, theta0, r)

    t_move, t_meas, reloc = _kernels.simulate_layers(
        layer_ptr,
        rot_ptr,
        flat_qubits,
        flat_paulis,
        ring,
        theta,
        dtheta,
        lane_id,
        corner,
        promoted,
        np.asarray(fp.ring_sizes, dtype=np.int64),
        np.asarray(fp.ring_offsets, dtype=np.int64),
        occupied,
        allowed,
        fp.corner_map,
        lane_proj,
        model.t_xz_edge,
        model.t_y_edge,
        model.t_xz_corner,
        model.t_y_corner,
        model.t_y_fast,
        1 if model.worst_case_corner else 0,
        model.lane_pipelining,
        model.movement_mode == "promote_inward",
    )

    move_by_layer = [0] * circuit.num_layers
    meas_by_layer = [0] * circuit.num_layers
    for sub_j, orig_j in enumerate(origin):
        move_by_layer[orig_j] += int(t_move[sub_j])
        meas_by_layer[orig_j] += int(t_meas[sub_j])
    layers = tuple(
        LayerTrace(j, move_by_layer[j], meas_by_layer[j])
        for j in range(circuit.num_layers)
    )
    relocations = tuple(
        Relocation(origin[int(row[0])], int(row[1]), int(row[2]), int(row[3]),
                   int(row[4]))
        for row in reloc
    )
    t_total = sum(move_by_layer) + sum(meas_by_layer) + model.tau_msf
    return ExecutionTrace(
        layers=layers,
        tau_msf=model.tau_msf,
        t_total=t_total,
        n_t=n_t,
        cr_batched=cr_batched,
        relocations=relocations,
    )


def cpi_t(trace: ExecutionTrace) -> float | None:
    """Code beats per non-Clifford instruction; None when N_T = 0."""
    if trace.n_t == 0:
        return None
    return trace.t_total / trace.n_t


def cpi_t_exact(trace: ExecutionTrace) -> Fraction | None:
    if trace.n_t == 0:
        return None
    return Fraction(trace.t_total, trace.n_t)


def rho_route(trace: ExecutionTrace) -> float:
    """Routing inflation: 1 + total movement over total measurement time."""
    meas = trace.sum_meas
    if meas == 0:
        raise CircuitError("routing inflation undefined with zero measurement time")
    return 1.0 + trace.sum_move / meas


T_STEP_SECONDS_AT_D11 = 10e-6


def wallclock(trace: ExecutionTrace, code_distance: int) -> float:
    """Seconds of wall-clock time: 10us per beat at distance 11, linear in d."""
    if code_distance < 3 or code_distance % 2 == 0:
        raise GeometryError("code distance must be odd and >= 3")
    return trace.t_total * T_STEP_SECONDS_AT_D11 * (code_distance / 11)


def trace_rows(trace: ExecutionTrace) -> list[tuple[int, int, int]]:
    """(j, t_move, t_meas) rows for table export."""
    return [(l.j, l.t_move, l.t_meas) for l in trace.layers]
