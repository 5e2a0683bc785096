"""Workload-aware qubit placement onto the annular floorplan.

Each qubit gets a scalar demand score from its non-Clifford profile; the
highest-scoring qubits take the tiles with the cheapest CR access (inner
ring first, edges before corners, close to an entry lane).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .circuit import Circuit, QubitProfile, profile_all
from .errors import CapacityError, GeometryError
from .floorplan import Floorplan, TileCoord, all_data_tiles, capacity, is_corner, nearest_channel


@dataclass(frozen=True)
class PlacementWeights:
    """Hyperparameters of the per-qubit demand score."""

    alpha_t: float = 1.0
    alpha_y: float = 1.5
    lambda_t: float = 1.0
    lambda_y: float = 2.0
    lambda_int: float = 4.0

    def __post_init__(self):
        if self.alpha_t <= 0 or self.alpha_y <= 0:
            raise ValueError("multi-qubit upweights must be positive")
        if min(self.lambda_t, self.lambda_y, self.lambda_int) < 0:
            raise ValueError("cost weights must be non-negative")


def cost(profile: QubitProfile, w: PlacementWeights) -> float:
    """Demand score: weighted T load, Y load and interaction degree.

    Tload = t_s + alpha_t * t_m and Yload = y_s + alpha_y * y_m upweight
    multi-qubit rotations; the interaction degree enters separately.
    Linear and monotone in every profile count.
    """
    t_load = profile.t_s + w.alpha_t * profile.t_m
    y_load = profile.y_s + w.alpha_y * profile.y_m
    return w.lambda_t * t_load + w.lambda_y * y_load + w.lambda_int * profile.deg_int


@dataclass(frozen=True)
class PromotionRecord:
    """One executed fast-Y promotion (see fast_y.optimize)."""

    qubit: int
    evicted: int | None
    speedup: int  # Delta(q)
    penalty: int  # I(q*)
    gain: int  # G = speedup - penalty
    second_tile: TileCoord
    destination: TileCoord | None


@dataclass(frozen=True)
class Placement:
    """Qubit -> tile map plus the fast-Y promotion state.

    ``channels`` overrides the floorplan lanes as the CR entry angles for
    these qubits (used by concurrent sector placement); ``region``, when
    set, is the subset of tiles this placement may ever occupy, and
    ``reserved`` tiles are kept free (entry-channel tiles under
    multiprogramming).
    """

    assignment: dict[int, TileCoord]
    promoted: frozenset[int] = frozenset()
    second_tiles: dict[int, TileCoord] = field(default_factory=dict)
    channels: tuple[int, ...] | None = None
    region: frozenset[TileCoord] | None = None
    reserved: frozenset[TileCoord] = frozenset()
    promotion_log: tuple[PromotionRecord, ...] = ()

    def occupied(self) -> dict[TileCoord, int]:
        """Tile -> occupant map covering primary and promoted second tiles."""
        occ: dict[TileCoord, int] = {}
        for q, tile in self.assignment.items():
            if tile in occ:
                raise GeometryError(f"tile {tile} double-assigned")
            occ[tile] = q
        for q, tile in self.second_tiles.items():
            if tile in occ:
                raise GeometryError(f"second tile {tile} double-assigned")
            occ[tile] = q
        return occ

    def tiles_consumed(self) -> int:
        return len(self.assignment) + len(self.second_tiles)

    def with_updates(self, **kw) -> "Placement":
        return replace(self, **kw)


def fill_order(
    fp: Floorplan,
    channels: tuple[int, ...] | None = None,
    tiles: Iterable[TileCoord] | None = None,
) -> list[TileCoord]:
    """Tiles ordered by desirability for high-demand qubits.

    Ring ascending, non-corner before corner within a ring, then by
    angular distance to the nearest entry channel, then by angle.
    """
    pool = list(tiles) if tiles is not None else all_data_tiles(fp)

    def key(tile: TileCoord):
        _, d_theta = nearest_channel(fp, tile, channels)
        return (tile.r, 1 if is_corner(fp, tile) else 0, d_theta, tile.theta)

    return sorted(pool, key=key)


def order_by_cost(costs: Sequence[float]) -> list[int]:
    """Qubit indices sorted by descending cost, ties by ascending index."""
    return sorted(range(len(costs)), key=lambda q: (-costs[q], q))


def greedy_place(
    circuit: Circuit, fp: Floorplan, w: PlacementWeights | None = None
) -> Placement:
    """Single-pass greedy radial fill: costliest qubits innermost."""
    w = w or PlacementWeights()
    if circuit.num_qubits > capacity(fp):
        raise CapacityError(
            f"{circuit.num_qubits} qubits exceed floorplan capacity {capacity(fp)}"
        )
    profiles = profile_all(circuit)
    costs = [cost(p, w) for p in profiles]
    order = order_by_cost(costs)
    tiles = fill_order(fp)
    assignment = {q: tiles[pos] for pos, q in enumerate(order)}
    return Placement(assignment=assignment)


def reversed_place(
    circuit: Circuit, fp: Floorplan, w: PlacementWeights | None = None
) -> Placement:
    """Adversarial baseline: cheapest qubits take the best tiles."""
    w = w or PlacementWeights()
    if circuit.num_qubits > capacity(fp):
        raise CapacityError(
            f"{circuit.num_qubits} qubits exceed floorplan capacity {capacity(fp)}"
        )
    profiles = profile_all(circuit)
    costs = [cost(p, w) for p in profiles]
    order = list(reversed(order_by_cost(costs)))
    tiles = fill_order(fp)
    assignment = {q: tiles[pos] for pos, q in enumerate(order)}
    return Placement(assignment=assignment)


def random_place(circuit: Circuit, fp: Floorplan, seed: int = 0) -> Placement:
    """Profile-blind baseline: uniformly random tiles (seeded)."""
    import numpy as np

    if circuit.num_qubits > capacity(fp):
        raise CapacityError(
            f"{circuit.num_qubits} qubits exceed floorplan capacity {capacity(fp)}"
        )
    rng = np.random.default_rng(np.random.PCG64(seed))
    tiles = all_data_tiles(fp)
    perm = rng.permutation(len(tiles))
    assignment = {
        q: tiles[int(perm[q])] for q in range(circuit.num_qubits)
    }
    return Placement(assignment=assignment)
