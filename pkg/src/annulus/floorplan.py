"""Annular floorplan geometry.

An n x n logical grid hosts a ring of data tiles (ring 0) around an
ancilla ring and a central compute region; one border tile and one
ancilla-ring tile are reserved as the magic-state-factory channel.
Larger workloads stack full square annuli of data tiles outside
(rings 1..L). Every ring is enumerated clockwise from its top-left
corner; ring 0 places the MSF channel at the end of the walk so that
corner angles sit at exact multiples of (n - 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class FloorplanConfig:
    n: int  # grid side
    outer_rings: int = 0  # L
    lanes: int = 4  # K, CR-entry lanes on ring 0
    code_distance: int = 11  # informational, for wall-clock reporting

    def __post_init__(self):
        if self.n < 6:
            raise GeometryError(f"grid side must be >= 6, got {self.n}")
        if self.outer_rings < 0:
            raise GeometryError("outer ring count must be >= 0")
        n0 = 4 * (self.n - 1) - 1
        if not 1 <= self.lanes <= n0 - 4:
            raise GeometryError(
                f"lane count must be in [1, {n0 - 4}] for n={self.n}"
            )
        if self.code_distance < 3 or self.code_distance % 2 == 0:
            raise GeometryError("code distance must be odd and >= 3")


@dataclass(frozen=True)
class TileCoord:
    r: int
    theta: int
    kind: str = "ring"

    def __post_init__(self):
        if self.kind not in ("ring", "cr_slot", "msf"):
            raise GeometryError(f"unknown tile kind {self.kind!r}")


def _corner_angles(side: int) -> tuple[int, ...]:
    return (0, side - 1, 2 * (side - 1), 3 * (side - 1))


@dataclass(frozen=True)
class Floorplan:
    config: FloorplanConfig
    ring_sizes: tuple[int, ...]  # N_r for r in [0, L]
    lanes: tuple[int, ...]  # ring-0 angular positions, non-corner, distinct

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def num_rings(self) -> int:
        return len(self.ring_sizes)

    @property
    def data_tiles_ring0(self) -> int:
        return self.ring_sizes[0]

    @property
    def usable_ancilla_tiles(self) -> int:
        return 4 * (self.n - 3) - 1

    @property
    def cr_capacity(self) -> int:
        return (self.n - 4) ** 2

    @cached_property
    def corner_sets(self) -> tuple[frozenset[int], ...]:
        out = []
        for r in range(self.num_rings):
            side = self.n + 2 * r
            out.append(frozenset(_corner_angles(side)))
        return tuple(out)

    @cached_property
    def ring_offsets(self) -> tuple[int, ...]:
        """Prefix offsets into flat tile-indexed arrays, one slot per ring."""
        offs = [0]
        for size in self.ring_sizes:
            offs.append(offs[-1] + size)
        return tuple(offs)

    @property
    def total_tiles(self) -> int:
        return self.ring_offsets[-1]

    def tile_index(self, coord: TileCoord) -> int:
        return self.ring_offsets[coord.r] + coord.theta

    @cached_property
    def corner_map(self) -> np.ndarray:
        """uint8 flag per flat tile index."""
        flags = np.zeros(self.total_tiles, dtype=np.uint8)
        for r, corners in enumerate(self.corner_sets):
            base = self.ring_offsets[r]
            for theta in corners:
                flags[base + theta] = 1
        return flags

    def summary(self) -> dict:
        return {
            "n": self.n,
            "outer_rings": self.config.outer_rings,
            "lanes": self.config.lanes,
            "code_distance": self.config.code_distance,
            "ring_sizes": list(self.ring_sizes),
            "lane_angles": list(self.lanes),
            "data_tiles_ring0": self.data_tiles_ring0,
            "usable_ancilla_tiles": self.usable_ancilla_tiles,
            "cr_capacity": self.cr_capacity,
            "capacity": capacity(self),
            "density": density(self.n, self.config.outer_rings),
        }


def build(config: FloorplanConfig) -> Floorplan:
    """Construct the floorplan: ring sizes, budgets, and lane positions.

    Lane k starts at floor(k * N_0 / K) and shifts clockwise past corners
    (a corner tile has a single ancilla neighbor and cannot anchor a CR
    entry) and past angles already taken by lower-indexed lanes.
    """
    n, ell, k = config.n, config.outer_rings, config.lanes
    n0 = 4 * (n - 1) - 1
    sizes = [n0] + [4 * (n + 2 * r - 1) for r in range(1, ell + 1)]
    corners0 = set(_corner_angles(n))
    lanes: list[int] = []
    for i in range(k):
        theta = (i * n0) // k
        while theta in corners0 or theta in lanes:
            theta = (theta + 1) % n0
        lanes.append(theta)
    return Floorplan(config=config, ring_sizes=tuple(sizes), lanes=tuple(lanes))


def _check_ring_angle(fp: Floorplan, r: int, theta: int) -> None:
    if not 0 <= r < fp.num_rings:
        raise GeometryError(f"ring {r} out of range (rings 0..{fp.num_rings - 1})")
    if not 0 <= theta < fp.ring_sizes[r]:
        raise GeometryError(
            f"angle {theta} out of range on ring {r} (N_r={fp.ring_sizes[r]})"
        )


def ring_dist(fp: Floorplan, r: int, theta_a: int, theta_b: int) -> int:
    """Wrap-around distance on ring r: min of the two arc lengths."""
    _check_ring_angle(fp, r, theta_a)
    _check_ring_angle(fp, r, theta_b)
    size = fp.ring_sizes[r]
    fwd = (theta_a - theta_b) % size
    return min(fwd, size - fwd)


def project_angle(fp: Floorplan, theta0: int, r: int) -> int:
    """Map a ring-0 angle onto ring r by proportional scaling (half-up)."""
    if r == 0:
        return theta0
    size = fp.ring_sizes[r]
    return int(math.floor(theta0 * size / fp.ring_sizes[0] + 0.5)) % size


def nearest_channel(
    fp: Floorplan, coord: TileCoord, channels: tuple[int, ...] | None = None
) -> tuple[int, int]:
    """(channel index, angular distance) for a ring tile.

    ``channels`` are ring-0 angles (defaults to the built lanes), mapped
    to the tile's ring by proportional scaling. Ties break to the lowest
    channel index.
    """
    if coord.kind != "ring":
        raise GeometryError("nearest_channel expects a ring tile")
    _check_ring_angle(fp, coord.r, coord.theta)
    chans = fp.lanes if channels is None else channels
    best_idx, best_d = -1, -1
    for idx, theta0 in enumerate(chans):
        proj = project_angle(fp, theta0, coord.r)
        d = ring_dist(fp, coord.r, coord.theta, proj)
        if best_idx < 0 or d < best_d:
            best_idx, best_d = idx, d
    return best_idx, best_d


def nearest_lane(fp: Floorplan, coord: TileCoord) -> tuple[int, int]:
    """(lane index, angular distance to it) for a ring tile."""
    return nearest_channel(fp, coord, None)


def is_corner(fp: Floorplan, coord: TileCoord) -> bool:
    if coord.kind != "ring":
        raise GeometryError("corner query expects a ring tile")
    _check_ring_angle(fp, coord.r, coord.theta)
    return coord.theta in fp.corner_sets[coord.r]


def density(n: int, outer_rings: int) -> float:
    """Data-tile fraction of the stacked layout (MSF row excluded)."""
    if n < 6:
        raise GeometryError("grid side must be >= 6")
    ring0 = 4 * (n - 1) - 1
    outer = sum(4 * (n + 2 * r - 1) for r in range(1, outer_rings + 1))
    return (ring0 + outer) / (n * n + outer)


def min_grid(s_max: int) -> int:
    """Smallest grid side whose compute region holds s_max concurrent tiles."""
    if s_max < 1:
        raise GeometryError("peak active-set size must be >= 1")
    return max(6, 4 + math.isqrt(s_max - 1) + 1)


def capacity(fp: Floorplan) -> int:
    """Total data tiles across all rings."""
    return sum(fp.ring_sizes)


def ring_tiles(fp: Floorplan, r: int) -> list[TileCoord]:
    return [TileCoord(r, theta) for theta in range(fp.ring_sizes[r])]


def all_data_tiles(fp: Floorplan) -> list[TileCoord]:
    return [t for r in range(fp.num_rings) for t in ring_tiles(fp, r)]


def _capacity_of(n: int, outer_rings: int) -> int:
    return 4 * (n - 1) - 1 + sum(
        4 * (n + 2 * r - 1) for r in range(1, outer_rings + 1)
    )


def auto_config(
    num_qubits: int,
    s_max: int,
    outer_rings: int | None = None,
    lanes: int = 4,
    code_distance: int = 11,
    fasty_headroom: bool = True,
    min_ring0: int = 0,
) -> FloorplanConfig:
    """Size a floorplan for one workload.

    The grid side always satisfies the compute-region bound (the CR must
    hold the peak active set) and any requested ring-0 minimum. With
    ``outer_rings`` unset, the smallest ring count that fits the qubits
    (plus promotion headroom, a quarter of ring 0) is chosen; with it
    pinned, the grid side grows instead, so ring sweeps genuinely push
    qubits outward on smaller grids.
    """
    base_n = min_grid(max(s_max, 1))
    while 4 * (base_n - 1) - 1 - 4 < lanes or 4 * (base_n - 1) - 1 < min_ring0:
        base_n += 1

    def needed(n: int) -> int:
        head = (4 * (n - 1) - 1) // 4 if fasty_headroom else 0
        return num_qubits + head

    if outer_rings is None:
        n, ell = base_n, 0
        while _capacity_of(n, ell) < needed(n):
            ell += 1
    else:
        ell = outer_rings
        n = base_n
        while _capacity_of(n, ell) < needed(n):
            n += 1
    return FloorplanConfig(
        n=n, outer_rings=ell, lanes=lanes, code_distance=code_distance
    )
