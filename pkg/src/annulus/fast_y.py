"""Two-tile fast-Y promotion.

A ring-0 qubit can annex an adjacent ring-0 tile to expose X and Z
boundaries on one edge, dropping its Y-measurement cost to a single
step. The annexed tile's occupant (if any) is relocated to an outer
ring. A candidate promotion must clear two gates: the analytic
speedup-vs-penalty score G = Delta - I must be positive, and the
workload's simulated runtime with the promotion applied must not regress
(the analytic score prices the eviction at nu * delta_r, which ignores
lane distance and serialization, and prices the speedup as if the
qubit's Y measurement always sat on the layer's critical path).
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, QubitProfile, profile_all
from .errors import CapacityError, GeometryError
from .floorplan import Floorplan, TileCoord, is_corner, nearest_channel, project_angle, ring_dist
from .placement import Placement, PlacementWeights, PromotionRecord, cost


@dataclass(frozen=True)
class FastYModel:
    """Y-measurement costs (in t) for the slow and fast paths."""

    t_y_slow_edge: int = 5
    t_y_slow_corner: int = 7
    t_y_fast: int = 1

    def __post_init__(self):
        if not self.t_y_fast < self.t_y_slow_edge < self.t_y_slow_corner:
            raise ValueError("expected t_y_fast < t_y_slow_edge < t_y_slow_corner")


def delta(
    profile: QubitProfile, tile: TileCoord, fp: Floorplan, model: FastYModel
) -> int:
    """Latency reduction from promoting the qubit at ``tile``.

    Y(q) * (t_slow - t_fast), with the slow cost resolved by the tile's
    corner status. Promotions apply to ring-0 tiles only.
    """
    if tile.r != 0:
        raise GeometryError("fast-Y promotion applies to ring-0 tiles only")
    slow = model.t_y_slow_corner if is_corner(fp, tile) else model.t_y_slow_edge
    return profile.y_total * (slow - model.t_y_fast)


def _free_outer_tile(
    occ: dict[TileCoord, int],
    fp: Floorplan,
    lane_theta0: int,
    region: frozenset[TileCoord] | None,
    reserved: frozenset[TileCoord],
) -> TileCoord | None:
    """Innermost outer-ring free tile closest to the given entry lane."""
    for r in range(1, fp.num_rings):
        target = project_angle(fp, lane_theta0, r)
        best: tuple[int, int] | None = None
        for theta in range(fp.ring_sizes[r]):
            tile = TileCoord(r, theta)
            if tile in occ or tile in reserved:
                continue
            if region is not None and tile not in region:
                continue
            key = (ring_dist(fp, r, theta, target), theta)
            if best is None or key < best:
                best = key
        if best is not None:
            return TileCoord(r, best[1])
    return None


def _eviction_plan(
    tile: TileCoord,
    nu: int,
    fp: Floorplan,
    occ: dict[TileCoord, int],
    channels: tuple[int, ...],
    region: frozenset[TileCoord] | None,
    reserved: frozenset[TileCoord],
) -> tuple[int, int, TileCoord] | None:
    """(penalty, ring displacement, destination) or None when nothing is free."""
    if tile.r != 0:
        raise GeometryError("eviction applies to ring-0 qubits only")
    lane_idx, _ = nearest_channel(fp, tile, channels)
    dest = _free_outer_tile(occ, fp, channels[lane_idx], region, reserved)
    if dest is None:
        return None
    return nu * dest.r, dest.r, dest


def eviction_penalty(
    q: int, placement: Placement, fp: Floorplan, nu: int
) -> tuple[int, int]:
    """Movement penalty nu * delta_r of relocating ``q`` off ring 0."""
    chans = placement.channels if placement.channels is not None else fp.lanes
    plan = _eviction_plan(
        placement.assignment[q], nu, fp, placement.occupied(), chans,
        placement.region, placement.reserved,
    )
    if plan is None:
        raise CapacityError("no free outer-ring tile for eviction")
    penalty, delta_r, _ = plan
    return penalty, delta_r


def _ring0_neighbors(fp: Floorplan, theta: int) -> list[int]:
    """Tangentially adjacent ring-0 angles.

    The wrap pair (0, N_0 - 1) is not adjacent: those tiles flank the
    MSF channel at the end of the perimeter walk.
    """
    n0 = fp.ring_sizes[0]
    out = []
    if theta - 1 >= 0:
        out.append(theta - 1)
    if theta + 1 < n0:
        out.append(theta + 1)
    return out


def optimize(
    circuit: Circuit,
    placement: Placement,
    fp: Floorplan,
    model: FastYModel | None = None,
    budget: int | None = None,
    weights: PlacementWeights | None = None,
    latency_model=None,
) -> Placement:
    """Greedy positive-gain promotion pass for a single workload."""
    profiles = profile_all(circuit)
    w = weights or PlacementWeights()
    costs = [cost(p, w) for p in profiles]
    return optimize_groups(
        profiles,
        costs,
        placement,
        fp,
        model or FastYModel(),
        group_of={q: 0 for q in placement.assignment},
        group_budgets={0: budget},
        group_regions={0: placement.region},
        group_circuits={0: circuit},
        group_offsets={0: 0},
        latency_model=latency_model,
    )


def _derived_latency_model(model: FastYModel, latency_model):
    from .scheduler import LatencyModel

    if latency_model is not None:
        return latency_model
    return LatencyModel(
        t_y_edge=model.t_y_slow_edge,
        t_y_corner=model.t_y_slow_corner,
        t_y_fast=model.t_y_fast,
    )


def optimize_groups(
    profiles: list[QubitProfile],
    costs: list[float],
    placement: Placement,
    fp: Floorplan,
    model: FastYModel,
    group_of: dict[int, int],
    group_budgets: dict[int, int | None],
    group_regions: dict[int, frozenset[TileCoord] | None],
    group_circuits: dict[int, Circuit],
    group_offsets: dict[int, int],
    latency_model=None,
) -> Placement:
    """Promotion engine shared by single and multiprogrammed runs.

    Candidates (unpromoted ring-0 non-corner qubits) are processed in
    descending analytic speedup; the annexed neighbor is a free eligible
    tile when one exists, otherwise the adjacent occupant minimizing
    (penalty, cost) relocates to the innermost free outer tile of its
    group's region. Evictions never cross groups and never touch promoted
    qubits. A G > 0 candidate is committed only after a simulation of its
    own workload confirms the runtime does not regress. Passes repeat
    until a full pass commits nothing (an eviction can free a neighbor
    tile for a previously blocked candidate).
    """
    from .scheduler import simulate

    lat_model = _derived_latency_model(model, latency_model)
    assignment = dict(placement.assignment)
    promoted = set(placement.promoted)
    second = dict(placement.second_tiles)
    log = list(placement.promotion_log)
    occ = placement.occupied()
    remaining = dict(group_budgets)
    chans = placement.channels if placement.channels is not None else fp.lanes

    def group_view(gid: int) -> Placement:
        base = group_offsets[gid]
        size = group_circuits[gid].num_qubits
        members = range(base, base + size)
        return Placement(
            assignment={g - base: assignment[g] for g in members},
            promoted=frozenset(g - base for g in promoted if group_of[g] == gid),
            second_tiles={
                g - base: t for g, t in second.items() if group_of[g] == gid
            },
            channels=placement.channels,
            region=group_regions.get(gid),
            reserved=placement.reserved,
        )

    def group_runtime(gid: int) -> int:
        return simulate(group_circuits[gid], group_view(gid), fp, lat_model).t_total

    runtime = {gid: group_runtime(gid) for gid in group_circuits}
    accept_count = 0
    rejected_at: dict[int, int] = {}

    def candidates() -> list[tuple[int, int]]:
        cand = []
        for q, tile in assignment.items():
            if q in promoted or tile.r != 0 or is_corner(fp, tile):
                continue
            cand.append((delta(profiles[q], tile, fp, model), q))
        cand.sort(key=lambda item: (-item[0], item[1]))
        return cand

    progressed = True
    while progressed:
        progressed = False
        for speedup, q in candidates():
            if speedup <= 0:
                break  # sorted by speedup; nothing below can gain
            gid = group_of[q]
            if remaining.get(gid) == 0:
                continue
            if rejected_at.get(q) == accept_count:
                continue  # nothing changed since this candidate last failed
            region = group_regions.get(gid)
            tile = assignment[q]
            if q in promoted or tile.r != 0 or is_corner(fp, tile):
                continue  # an earlier promotion in this pass evicted q
            free_choice: TileCoord | None = None
            evict_choice = None  # ((penalty, cost, theta), occupant, tile, dest)
            for theta_n in _ring0_neighbors(fp, tile.theta):
                neighbor = TileCoord(0, theta_n)
                if is_corner(fp, neighbor) or neighbor in placement.reserved:
                    continue
                if region is not None and neighbor not in region:
                    continue
                occupant = occ.get(neighbor)
                if occupant is None:
                    if free_choice is None or theta_n < free_choice.theta:
                        free_choice = neighbor
                    continue
                if occupant in promoted or group_of.get(occupant) != gid:
                    continue
                if assignment[occupant] != neighbor:
                    continue  # the neighbor tile is someone's annexed tile
                plan = _eviction_plan(
                    neighbor, profiles[occupant].nu, fp, occ, chans,
                    region, placement.reserved,
                )
                if plan is None:
                    continue
                penalty, _, dest = plan
                key = (penalty, costs[occupant], theta_n)
                if evict_choice is None or key < evict_choice[0]:
                    evict_choice = (key, occupant, neighbor, dest)

            if free_choice is not None:
                penalty, evictee, neighbor, dest = 0, None, free_choice, None
            elif evict_choice is not None:
                (penalty, _, _), evictee, neighbor, dest = evict_choice
            else:
                continue
            gain = speedup - penalty
            if gain <= 0:
                continue

            # tentative apply, then verify against the simulated runtime
            promoted.add(q)
            second[q] = neighbor
            if evictee is not None:
                old_tile = assignment[evictee]
                del occ[old_tile]
                assignment[evictee] = dest
                occ[dest] = evictee
            occ[neighbor] = q
            new_runtime = group_runtime(gid)
            ok = new_runtime < runtime[gid] or (
                new_runtime == runtime[gid] and evictee is None
            )
            if not ok:
                promoted.discard(q)
                del second[q]
                del occ[neighbor]
                if evictee is not None:
                    del occ[dest]
                    assignment[evictee] = old_tile
                    occ[old_tile] = evictee
                rejected_at[q] = accept_count
                continue

            runtime[gid] = new_runtime
            accept_count += 1
            if remaining.get(gid) is not None:
                remaining[gid] -= 1
            log.append(
                PromotionRecord(
                    qubit=q,
                    evicted=evictee,
                    speedup=speedup,
                    penalty=penalty,
                    gain=gain,
                    second_tile=neighbor,
                    destination=dest,
                )
            )
            progressed = True

    return placement.with_updates(
        assignment=assignment,
        promoted=frozenset(promoted),
        second_tiles=second,
        promotion_log=tuple(log),
    )
