"""Concurrent workloads on one shared floorplan.

Ring-0 residency and fast-Y promotions are rationed by per-workload
pressure quotas; each workload then receives a contiguous angular sector
of the data rings with a private CR-entry channel at its midpoint, and
runs the ordinary greedy fill and promotion passes inside it. Runtimes
under concurrency are compared against isolated runs to report mean
slowdown, efficiency, and Jain's fairness index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, profile_all, totals
from .errors import CapacityError
from .fast_y import FastYModel, optimize, optimize_groups
from .floorplan import Floorplan, TileCoord, all_data_tiles, capacity
from .placement import (
    Placement,
    PlacementWeights,
    cost,
    fill_order,
    greedy_place,
    order_by_cost,
)
from .scheduler import LatencyModel, qubit_move, simulate

POLICIES = ("proposed", "naive", "random")

# Default ring-0 oversubscription for auto-sized concurrent runs: the
# sharing model assumes resources are sufficient (mild contention), and
# per-workload entry channels stop paying off when most qubits live on
# outer rings anyway.
RING0_TIGHTNESS = 1.3


@dataclass(frozen=True)
class MultiConfig:
    eta_t: float = 1.0
    eta_m: float = 2.0
    b_y_total: int | None = None  # None -> floor(N_0 / 4)

    def __post_init__(self):
        if self.eta_t < 0 or self.eta_m < 0 or (self.eta_t == 0 and self.eta_m == 0):
            raise ValueError("pressure weights must be >= 0 and not both zero")

    def resolved_b_y_total(self, fp: Floorplan) -> int:
        if self.b_y_total is not None:
            return self.b_y_total
        return fp.ring_sizes[0] // 4


@dataclass(frozen=True)
class WorkloadPressures:
    p_t: int  # aggregate active-set size over layers
    p_y: int  # aggregate Y participation over qubits
    p_m: int  # total movement latency under the isolated placement


@dataclass(frozen=True)
class Quotas:
    b0: tuple[int, ...]
    by: tuple[int, ...]


@dataclass(frozen=True)
class WorkloadResult:
    index: int
    name: str
    num_qubits: int
    b0: int
    by: int
    t_alone: int
    t_conc: int

    @property
    def slowdown(self) -> float:
        return self.t_conc / self.t_alone


@dataclass(frozen=True)
class MultiReport:
    policy: str
    workloads: tuple[WorkloadResult, ...]
    mean_slowdown: float
    efficiency: float
    jain: float


def jain_index(rates: list[float]) -> float:
    """Jain's fairness index over service rates: (sum x)^2 / (W sum x^2)."""
    if not rates:
        raise ValueError("need at least one rate")
    total = sum(rates)
    squares = sum(x * x for x in rates)
    return (total * total) / (len(rates) * squares)


def pressures(
    circuit: Circuit, fp: Floorplan, weights: PlacementWeights | None = None
) -> WorkloadPressures:
    """Scalar demand pressures for quota allocation.

    Movement pressure comes from the workload's own isolated greedy
    placement so it reflects the same policy that will place it.
    """
    p_t, _ = totals(circuit)
    profiles = profile_all(circuit)
    p_y = sum(p.y_total for p in profiles)
    alone = greedy_place(circuit, fp, weights)
    p_m = sum(qubit_move(q, alone, fp) for q in range(circuit.num_qubits))
    return WorkloadPressures(p_t=p_t, p_y=p_y, p_m=p_m)


def _equal_split(target: int, count: int) -> list[int]:
    base, extra = divmod(target, count)
    return [base + (1 if w < extra else 0) for w in range(count)]


def _ceil_shares(total_budget: int, weights: list[float]) -> tuple[list[int], list[float]]:
    denom = sum(weights)
    raws = [total_budget * w / denom for w in weights]
    return [math.ceil(r) for r in raws], raws


def _trim_largest_remainder(vals: list[int], raws: list[float], target: int) -> list[int]:
    """Remove units from the smallest-fractional-remainder entries first."""
    vals = list(vals)
    order = sorted(range(len(vals)), key=lambda w: (raws[w] - math.floor(raws[w]), -w))
    i = 0
    while sum(vals) > target:
        w = order[i % len(order)]
        if vals[w] > 0:
            vals[w] -= 1
        i += 1
    return vals


def budgets(
    pressure_list: list[WorkloadPressures], fp: Floorplan, cfg: MultiConfig
) -> Quotas:
    """Ring-0 and fast-Y quotas: ceiling shares, then largest-remainder trim.

    The ring-0 trim target reserves one entry-channel tile per workload
    under actual sharing (W >= 2); a single workload keeps the whole ring.
    Zero-pressure denominators fall back to an equal split.
    """
    w_count = len(pressure_list)
    if w_count < 1:
        raise ValueError("need at least one workload")
    n0 = fp.ring_sizes[0]
    target0 = n0 if w_count == 1 else n0 - fp.config.lanes

    combined = [cfg.eta_t * p.p_t + cfg.eta_m * p.p_m for p in pressure_list]
    if sum(combined) <= 0:
        b0 = _equal_split(target0, w_count)
    else:
        vals, raws = _ceil_shares(n0, combined)
        b0 = _trim_largest_remainder(vals, raws, target0)

    by_total = cfg.resolved_b_y_total(fp)
    y_weights = [float(p.p_y) for p in pressure_list]
    if sum(y_weights) <= 0:
        by = _equal_split(by_total, w_count)
    else:
        vals, raws = _ceil_shares(by_total, y_weights)
        by = _trim_largest_remainder(vals, raws, by_total)

    return Quotas(b0=tuple(b0), by=tuple(by))


# --- sector geometry ---------------------------------------------------------


@dataclass(frozen=True)
class Sector:
    start: int  # ring-0 angle where the sector begins
    width: int  # ring-0 tiles
    channels: tuple[int, ...]  # ring-0 angles of the private CR entries (reserved)
    ring_ranges: tuple[tuple[int, int], ...]  # (start, width) per ring


def _largest_remainder_widths(n0: int, shares: list[int]) -> list[int]:
    total = sum(shares)
    if total == 0:
        raws = [n0 / len(shares)] * len(shares)
    else:
        raws = [n0 * s / total for s in shares]
    widths = [math.floor(r) for r in raws]
    leftover = n0 - sum(widths)
    order = sorted(
        range(len(shares)), key=lambda w: (-(raws[w] - math.floor(raws[w])), w)
    )
    for i in range(leftover):
        widths[order[i % len(order)]] += 1
    return widths


def _repair_widths(widths: list[int], minima: list[int]) -> list[int]:
    widths = list(widths)
    while True:
        deficit = next(
            (w for w in range(len(widths)) if widths[w] < minima[w]), None
        )
        if deficit is None:
            return widths
        donors = [w for w in range(len(widths)) if widths[w] > minima[w]]
        if not donors:
            raise CapacityError("sector widths cannot satisfy ring-0 quotas")
        donor = max(donors, key=lambda w: (widths[w] - minima[w], -w))
        widths[donor] -= 1
        widths[deficit] += 1


def _sector_ranges(fp: Floorplan, widths: list[int]) -> list[list[tuple[int, int]]]:
    """Per-workload (start, width) per ring from the ring-0 widths.

    Boundaries project to outer rings by floored proportional scaling of
    the cumulative widths, which keeps the rings exactly partitioned.
    """
    n0 = fp.ring_sizes[0]
    cumulative = [0]
    for width in widths:
        cumulative.append(cumulative[-1] + width)
    out = []
    for w in range(len(widths)):
        ranges = []
        for r in range(fp.num_rings):
            size = fp.ring_sizes[r]
            lo = math.floor(cumulative[w] * size / n0)
            hi = math.floor(cumulative[w + 1] * size / n0)
            ranges.append((lo % size if size else 0, hi - lo))
        out.append(ranges)
    return out


def _channel_counts(fp: Floorplan, widths: list[int]) -> list[int]:
    """Apportion the K provisioned entry lanes to sectors by width.

    Every sector owns at least one channel; spares go to the sectors with
    the largest fractional claim (and enough room for another reserved
    tile inside).
    """
    k = fp.config.lanes
    n0 = fp.ring_sizes[0]
    w_count = len(widths)
    counts = [1] * w_count
    claims = [k * widths[w] / n0 for w in range(w_count)]
    for _ in range(k - w_count):
        eligible = [w for w in range(w_count) if counts[w] < widths[w] - 1]
        if not eligible:
            break
        w = max(eligible, key=lambda w: (claims[w] - counts[w], -w))
        counts[w] += 1
    return counts


def build_sectors(
    fp: Floorplan, b0: tuple[int, ...], qubit_counts: tuple[int, ...]
) -> list[Sector]:
    """Contiguous per-workload sectors with private spread-out channels.

    Widths start proportional to b0 (largest remainder). Fitting every
    workload inside its full multi-ring slice is the hard constraint:
    deficit sectors take width, one tile at a time, from the donor with
    the most slack (a transfer is kept only if the donor still fits).
    A second pass tops widths back up toward full ring-0 quota
    realization where slack allows. Each sector then anchors its share of
    the K provisioned entry channels on evenly spaced non-corner tiles.
    """
    n0 = fp.ring_sizes[0]
    w_count = len(b0)
    if 2 * w_count > n0:
        raise CapacityError("too many workloads for the ring-0 perimeter")
    widths = _repair_widths(
        _largest_remainder_widths(n0, list(b0)), [2] * w_count
    )

    def usable_of(widths_now: list[int]) -> list[int]:
        ranges = _sector_ranges(fp, widths_now)
        chans = _channel_counts(fp, widths_now)
        return [
            widths_now[w] - chans[w] + sum(wr for _, wr in ranges[w][1:])
            for w in range(w_count)
        ]

    def transfer(widths_now: list[int], w: int, floors: list[int]) -> bool:
        """Move one width tile to ``w`` without breaking any donor's fit."""
        usable = usable_of(widths_now)
        donors = sorted(
            (d for d in range(w_count)
             if d != w and widths_now[d] > floors[d]
             and usable[d] > qubit_counts[d]),
            key=lambda d: (-(usable[d] - qubit_counts[d]), d),
        )
        for d in donors:
            widths_now[d] -= 1
            widths_now[w] += 1
            if usable_of(widths_now)[d] >= qubit_counts[d]:
                return True
            widths_now[d] += 1
            widths_now[w] -= 1
        return False

    hard_floors = [2] * w_count
    for _ in range(n0 * w_count + 1):
        usable = usable_of(widths)
        deficits = sorted(
            (w for w in range(w_count) if usable[w] < qubit_counts[w]),
            key=lambda w: (-(qubit_counts[w] - usable[w]), w),
        )
        if not deficits:
            break
        if not transfer(widths, deficits[0], hard_floors):
            raise CapacityError(
                f"workload {deficits[0]} does not fit its sector and no "
                "sector has slack to give"
            )
    else:
        raise CapacityError("sector width repair did not converge")

    # soft pass: realize ring-0 quotas where slack allows, never shrinking
    # a donor below its own quota realization
    chans_now = _channel_counts(fp, widths)
    quota_floors = [
        min(b0[w], qubit_counts[w]) + chans_now[w] for w in range(w_count)
    ]
    for _ in range(n0 * w_count + 1):
        want = [w for w in range(w_count) if widths[w] < quota_floors[w]]
        if not want:
            break
        if not transfer(widths, want[0], quota_floors):
            break

    corners = fp.corner_sets[0]
    counts = _channel_counts(fp, widths)
    sectors = []
    pos = 0
    ranges = _sector_ranges(fp, widths)
    for w in range(w_count):
        width = widths[w]
        taken: list[int] = []
        for i in range(counts[w]):
            ideal = math.floor((i + 0.5) * width / counts[w])
            chan = None
            for step in range(width):
                angle = (pos + (ideal + step) % width) % n0
                if angle not in corners and angle not in taken:
                    chan = angle
                    break
            if chan is None:
                raise CapacityError("sector cannot anchor its channels off corners")
            taken.append(chan)
        sectors.append(
            Sector(
                start=pos % n0,
                width=width,
                channels=tuple(sorted(taken)),
                ring_ranges=tuple(ranges[w]),
            )
        )
        pos += width
    return sectors


def sector_tiles(fp: Floorplan, sector: Sector) -> list[TileCoord]:
    tiles = []
    for r, (start, width) in enumerate(sector.ring_ranges):
        size = fp.ring_sizes[r]
        tiles.extend(TileCoord(r, (start + i) % size) for i in range(width))
    return tiles


def place_concurrent(
    workloads: list[Circuit],
    fp: Floorplan,
    quotas: Quotas,
    weights: PlacementWeights | None = None,
    fasty_model: FastYModel | None = None,
    fasty: bool = True,
    latency_model: LatencyModel | None = None,
) -> list[Placement]:
    """Quota-constrained sector placement (the proposed policy).

    Each workload's top-b0 qubits by cost take its ring-0 sector tiles;
    the rest fill the sector's outer-ring tiles radially. Fast-Y then
    runs per workload with its promotion budget, evicting only within
    the workload's own sector.
    """
    w_count = len(workloads)
    weights = weights or PlacementWeights()
    if w_count == 1:
        placement = greedy_place(workloads[0], fp, weights)
        if fasty:
            placement = optimize(
                workloads[0], placement, fp, fasty_model,
                budget=quotas.by[0], weights=weights,
                latency_model=latency_model,
            )
        return [placement]

    if fp.config.lanes < w_count:
        raise CapacityError(
            f"{w_count} workloads need {w_count} CR entry lanes; floorplan "
            f"provisions {fp.config.lanes}"
        )
    if sum(c.num_qubits for c in workloads) + w_count > capacity(fp):
        raise CapacityError(
            "combined workloads (plus reserved channel tiles) exceed capacity"
        )

    sectors = build_sectors(
        fp, quotas.b0, tuple(c.num_qubits for c in workloads)
    )
    placements = []
    for w, circ in enumerate(workloads):
        sector = sectors[w]
        tiles = sector_tiles(fp, sector)
        channel_tiles = {TileCoord(0, theta) for theta in sector.channels}
        usable = [t for t in tiles if t not in channel_tiles]
        ring0 = [t for t in usable if t.r == 0]
        outer = [t for t in usable if t.r > 0]
        if circ.num_qubits > len(usable):
            raise CapacityError(
                f"workload {w} ({circ.num_qubits} qubits) exceeds its sector "
                f"capacity {len(usable)}"
            )
        chans = sector.channels
        ring0_order = fill_order(fp, channels=chans, tiles=ring0)
        outer_order = fill_order(fp, channels=chans, tiles=outer)
        profiles = profile_all(circ)
        costs = [cost(p, weights) for p in profiles]
        order = order_by_cost(costs)
        # the quota caps ring-0 residency, but overflow the outer slice
        # cannot hold stays on the sector's own ring-0 tiles
        n_inner = max(quotas.b0[w], circ.num_qubits - len(outer_order))
        n_inner = min(n_inner, circ.num_qubits, len(ring0_order))
        assignment: dict[int, TileCoord] = {}
        for pos, q in enumerate(order[:n_inner]):
            assignment[q] = ring0_order[pos]
        for pos, q in enumerate(order[n_inner:]):
            assignment[q] = outer_order[pos]
        placement = Placement(
            assignment=assignment,
            channels=chans,
            region=frozenset(tiles),
            reserved=frozenset(channel_tiles),
        )
        if fasty:
            placement = optimize(
                circ, placement, fp, fasty_model,
                budget=quotas.by[w], weights=weights,
                latency_model=latency_model,
            )
        placements.append(placement)
    return placements


# --- baseline policies -------------------------------------------------------


def _split_combined(
    workloads: list[Circuit],
    fp: Floorplan,
    combined_tiles: dict[tuple[int, int], TileCoord],
    quotas: Quotas,
    weights: PlacementWeights,
    fasty_model: FastYModel | None,
    fasty: bool,
    latency_model: LatencyModel | None = None,
) -> list[Placement]:
    """Shared-occupancy fast-Y over a combined placement, then split."""
    offsets = []
    acc = 0
    for circ in workloads:
        offsets.append(acc)
        acc += circ.num_qubits
    assignment = {
        offsets[w] + q: tile for (w, q), tile in combined_tiles.items()
    }
    combined = Placement(assignment=assignment)
    profiles: list = []
    costs: list[float] = []
    group_of: dict[int, int] = {}
    for w, circ in enumerate(workloads):
        for q, prof in enumerate(profile_all(circ)):
            profiles.append(prof)
            costs.append(cost(prof, weights))
            group_of[offsets[w] + q] = w
    if fasty:
        combined = optimize_groups(
            profiles,
            costs,
            combined,
            fp,
            fasty_model or FastYModel(),
            group_of=group_of,
            group_budgets={w: quotas.by[w] for w in range(len(workloads))},
            group_regions={w: None for w in range(len(workloads))},
            group_circuits={w: workloads[w] for w in range(len(workloads))},
            group_offsets={w: offsets[w] for w in range(len(workloads))},
            latency_model=latency_model,
        )
    placements = []
    for w, circ in enumerate(workloads):
        base = offsets[w]
        local = {
            q: combined.assignment[base + q] for q in range(circ.num_qubits)
        }
        promoted = frozenset(
            g - base for g in combined.promoted if group_of[g] == w
        )
        second = {
            g - base: tile
            for g, tile in combined.second_tiles.items()
            if group_of[g] == w
        }
        log = tuple(r for r in combined.promotion_log if group_of[r.qubit] == w)
        placements.append(
            Placement(
                assignment=local,
                promoted=promoted,
                second_tiles=second,
                promotion_log=log,
            )
        )
    return placements


def place_naive(
    workloads: list[Circuit],
    fp: Floorplan,
    quotas: Quotas,
    weights: PlacementWeights | None = None,
    fasty_model: FastYModel | None = None,
    fasty: bool = True,
    seed: int = 0,
    latency_model: LatencyModel | None = None,
) -> list[Placement]:
    """Cost-sorted sector fill with workload-unaware sector allocation.

    Qubits keep their cost ordering inside each sector, but the sectors
    themselves are dealt out with no regard to workload pressure: equal
    ring-0 and fast-Y shares, matched to workloads by a seeded
    permutation. Ablates exactly the workload-awareness of the quotas.
    """
    w_count = len(workloads)
    n0 = fp.ring_sizes[0]
    target0 = n0 if w_count == 1 else n0 - fp.config.lanes
    b0_eq = _equal_split(target0, w_count)
    by_eq = _equal_split(sum(quotas.by), w_count)
    rng = np.random.default_rng(np.random.PCG64(seed))
    perm = [int(i) for i in rng.permutation(w_count)]
    unaware = Quotas(
        b0=tuple(b0_eq[perm[w]] for w in range(w_count)),
        by=tuple(by_eq[perm[w]] for w in range(w_count)),
    )
    return place_concurrent(
        workloads, fp, unaware, weights, fasty_model, fasty,
        latency_model=latency_model,
    )


def place_random(
    workloads: list[Circuit],
    fp: Floorplan,
    quotas: Quotas,
    weights: PlacementWeights | None = None,
    fasty_model: FastYModel | None = None,
    fasty: bool = True,
    seed: int = 0,
    latency_model: LatencyModel | None = None,
) -> list[Placement]:
    """Uniformly random tile assignment (seeded), no workload awareness."""
    weights = weights or PlacementWeights()
    if sum(c.num_qubits for c in workloads) > capacity(fp):
        raise CapacityError("combined workloads exceed floorplan capacity")
    rng = np.random.default_rng(np.random.PCG64(seed))
    tiles = all_data_tiles(fp)
    perm = rng.permutation(len(tiles))
    combined_tiles = {}
    pos = 0
    for w, circ in enumerate(workloads):
        for q in range(circ.num_qubits):
            combined_tiles[(w, q)] = tiles[int(perm[pos])]
            pos += 1
    return _split_combined(
        workloads, fp, combined_tiles, quotas, weights, fasty_model, fasty,
        latency_model,
    )


# --- concurrent simulation ---------------------------------------------------


def simulate_concurrent(
    workloads: list[Circuit],
    fp: Floorplan,
    cfg: MultiConfig | None = None,
    weights: PlacementWeights | None = None,
    model: LatencyModel | None = None,
    fasty_model: FastYModel | None = None,
    policy: str = "proposed",
    fasty: bool = True,
    seed: int = 0,
) -> MultiReport:
    """Offline concurrent execution report for one placement policy.

    All workloads start at time zero; contention enters only through the
    quota-constrained placement, so each workload simulates independently
    on its own slice of the shared floorplan. Isolated baselines run on
    the same floorplan with the unconstrained greedy placement and the
    system-wide fast-Y cap.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    cfg = cfg or MultiConfig()
    weights = weights or PlacementWeights()
    model = model or LatencyModel()

    press = [pressures(c, fp, weights) for c in workloads]
    quotas = budgets(press, fp, cfg)
    by_total = cfg.resolved_b_y_total(fp)

    t_alone = []
    for circ in workloads:
        placement = greedy_place(circ, fp, weights)
        if fasty:
            placement = optimize(
                circ, placement, fp, fasty_model, budget=by_total,
                weights=weights, latency_model=model,
            )
        t_alone.append(simulate(circ, placement, fp, model).t_total)

    if policy == "proposed":
        placements = place_concurrent(
            workloads, fp, quotas, weights, fasty_model, fasty,
            latency_model=model,
        )
    elif policy == "naive":
        placements = place_naive(
            workloads, fp, quotas, weights, fasty_model, fasty, seed=seed,
            latency_model=model,
        )
    else:
        placements = place_random(
            workloads, fp, quotas, weights, fasty_model, fasty, seed=seed,
            latency_model=model,
        )

    t_conc = [
        simulate(circ, placement, fp, model).t_total
        for circ, placement in zip(workloads, placements)
    ]

    results = tuple(
        WorkloadResult(
            index=w,
            name=workloads[w].name,
            num_qubits=workloads[w].num_qubits,
            b0=quotas.b0[w],
            by=quotas.by[w],
            t_alone=t_alone[w],
            t_conc=t_conc[w],
        )
        for w in range(len(workloads))
    )
    slowdowns = [r.slowdown for r in results]
    rates = [1.0 / s for s in slowdowns]
    return MultiReport(
        policy=policy,
        workloads=results,
        mean_slowdown=sum(slowdowns) / len(slowdowns),
        efficiency=sum(t_alone) / (len(workloads) * max(t_conc)),
        jain=jain_index(rates),
    )
