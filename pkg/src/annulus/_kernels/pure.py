"""Pure-Python reference kernels.

Mirrors ``annulus._kernels._fast`` (the Cython build) operation for
operation; both backends must produce identical integer outputs for
identical inputs. Keep the two files in sync when touching either.
"""
from __future__ import annotations

import numpy as np

BACKEND = "pure"


def profile_counts(layer_ptr, rot_ptr, qubits, paulis, num_qubits):
    """Per-qubit (t_s, t_m, y_s, y_m, nu) over flattened layers.

    nu equals per-rotation membership counts because supports within a
    layer are disjoint (validated at circuit construction).
    """
    rp = rot_ptr.tolist()
    qs = qubits.tolist()
    ps = paulis.tolist()
    t_s = [0] * num_qubits
    t_m = [0] * num_qubits
    y_s = [0] * num_qubits
    y_m = [0] * num_qubits
    nu = [0] * num_qubits
    for i in range(len(rp) - 1):
        lo, hi = rp[i], rp[i + 1]
        multi = (hi - lo) > 1
        for m in range(lo, hi):
            q = qs[m]
            is_y = ps[m] == 2
            if multi:
                t_m[q] += 1
                if is_y:
                    y_m[q] += 1
            else:
                t_s[q] += 1
                if is_y:
                    y_s[q] += 1
            nu[q] += 1

    def out(xs):
        return np.asarray(xs, dtype=np.int64)

    return out(t_s), out(t_m), out(y_s), out(y_m), out(nu)


def _ring_dist(a, b, size):
    d = (a - b) % size
    e = (b - a) % size
    return d if d < e else e


def simulate_layers(
    layer_ptr,
    rot_ptr,
    qubits,
    paulis,
    ring,
    theta,
    dtheta,
    lane_id,
    corner,
    promoted,
    ring_sizes,
    ring_offsets,
    occupied,
    allowed,
    corner_map,
    lane_proj,
    t_xz_edge,
    t_y_edge,
    t_xz_corner,
    t_y_corner,
    t_y_fast,
    worst_corner,
    pipelining,
    promote_inward,
):
    """Per-layer (t_move, t_meas) plus the relocation log.

    Movement: ring-0 qubits are charged 0 (measured in place through the
    ancilla ring); a ring-r qubit travels dtheta tangential steps to its
    entry lane plus r radial hops. Active travelers sharing a lane cost
    max-of-group plus one serialization step per extra entrant (or the
    plain sum with pipelining off); the layer movement time is the max
    over lanes. Measurement: max over rotations of the max member basis
    cost; travelers measure at edge rates.

    In promote_inward mode a qubit relocates once, right after its first
    active layer, to the innermost allowed free tile nearest a lane
    (inward rings only); later activations are charged from the new home.
    Position arrays are copied internally; the occupancy bitmap is mutated
    in place. Relocations are returned as rows of
    (layer, qubit, from_ring, to_ring, to_theta, to_dtheta).
    """
    lp = layer_ptr.tolist()
    rp = rot_ptr.tolist()
    qs = qubits.tolist()
    ps = paulis.tolist()
    ring = np.asarray(ring).tolist()
    theta = np.asarray(theta).tolist()
    dtheta = np.asarray(dtheta).tolist()
    lane_id = np.asarray(lane_id).tolist()
    corner = np.asarray(corner).tolist()
    promoted = np.asarray(promoted).tolist()
    sizes = ring_sizes.tolist()
    offsets = ring_offsets.tolist()
    occ = occupied  # uint8 ndarray, shared with caller
    alw = allowed
    cmap = corner_map
    proj = lane_proj.tolist()  # [n_lanes][n_rings]
    n_lanes = len(proj)
    n_layers = len(lp) - 1

    t_move = np.zeros(n_layers, dtype=np.int64)
    t_meas = np.zeros(n_layers, dtype=np.int64)
    reloc: list[tuple[int, int, int, int, int, int]] = []
    activated = [False] * len(ring)

    lane_max = [0] * n_lanes
    lane_sum = [0] * n_lanes
    lane_cnt = [0] * n_lanes

    for j in range(n_layers):
        touched: list[int] = []
        meas = 0
        movers: list[int] = []
        for i in range(lp[j], lp[j + 1]):
            rot_meas = 0
            for m in range(rp[i], rp[i + 1]):
                q = qs[m]
                p = ps[m]
                r = ring[q]
                if r == 0:
                    if p == 2:  # Y
                        if promoted[q]:
                            basis = t_y_fast
                        elif corner[q]:
                            basis = t_y_corner + worst_corner
                        else:
                            basis = t_y_edge
                    else:
                        if corner[q]:
                            basis = t_xz_corner + worst_corner
                        else:
                            basis = t_xz_edge
                else:
                    move = r + dtheta[q]
                    lid = lane_id[q]
                    if lane_cnt[lid] == 0:
                        touched.append(lid)
                    lane_cnt[lid] += 1
                    lane_sum[lid] += move
                    if move > lane_max[lid]:
                        lane_max[lid] = move
                    basis = t_y_edge if p == 2 else t_xz_edge
                    if promote_inward and not activated[q]:
                        movers.append(q)
                activated[q] = True
                if basis > rot_meas:
                    rot_meas = basis
            if rot_meas > meas:
                meas = rot_meas
        move_total = 0
        for lid in touched:
            cost = lane_max[lid] + (lane_cnt[lid] - 1) if pipelining else lane_sum[lid]
            if cost > move_total:
                move_total = cost
            lane_max[lid] = 0
            lane_sum[lid] = 0
            lane_cnt[lid] = 0
        t_move[j] = move_total
        t_meas[j] = meas

        for q in movers:
            r = ring[q]
            for dest_r in range(r):
                size = sizes[dest_r]
                base = offsets[dest_r]
                best_d = -1
                best_t = -1
                best_lane = -1
                for t in range(size):
                    idx = base + t
                    if occ[idx] or not alw[idx]:
                        continue
                    d_best = -1
                    l_best = -1
                    for k in range(n_lanes):
                        d = _ring_dist(t, proj[k][dest_r], size)
                        if d_best < 0 or d < d_best:
                            d_best = d
                            l_best = k
                    if best_t < 0 or d_best < best_d or (d_best == best_d and t < best_t):
                        best_d = d_best
                        best_t = t
                        best_lane = l_best
                if best_t >= 0:
                    occ[offsets[r] + theta[q]] = 0
                    occ[base + best_t] = 1
                    reloc.append((j, q, r, dest_r, best_t, best_d))
                    ring[q] = dest_r
                    theta[q] = best_t
                    dtheta[q] = best_d
                    lane_id[q] = best_lane
                    corner[q] = int(cmap[base + best_t])
                    break
            # no inward tile free at first activation: the qubit stays put

    reloc_arr = np.asarray(reloc, dtype=np.int64).reshape(-1, 6)
    return t_move, t_meas, reloc_arr
