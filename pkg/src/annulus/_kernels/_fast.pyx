# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; must stay in lockstep with annulus._kernels.pure."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def profile_counts(
    cnp.int64_t[::1] layer_ptr,
    cnp.int64_t[::1] rot_ptr,
    cnp.int64_t[::1] qubits,
    cnp.int8_t[::1] paulis,
    Py_ssize_t num_qubits,
):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] t_s = np.zeros(num_qubits, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] t_m = np.zeros(num_qubits, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] y_s = np.zeros(num_qubits, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] y_m = np.zeros(num_qubits, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nu = np.zeros(num_qubits, dtype=np.int64)
    cdef cnp.int64_t[::1] vt_s = t_s
    cdef cnp.int64_t[::1] vt_m = t_m
    cdef cnp.int64_t[::1] vy_s = y_s
    cdef cnp.int64_t[::1] vy_m = y_m
    cdef cnp.int64_t[::1] vnu = nu
    cdef Py_ssize_t i, m, q
    cdef bint multi, is_y
    cdef Py_ssize_t n_rot = rot_ptr.shape[0] - 1

    for i in range(n_rot):
        multi = (rot_ptr[i + 1] - rot_ptr[i]) > 1
        for m in range(rot_ptr[i], rot_ptr[i + 1]):
            q = qubits[m]
            is_y = paulis[m] == 2
            if multi:
                vt_m[q] += 1
                if is_y:
                    vy_m[q] += 1
            else:
                vt_s[q] += 1
                if is_y:
                    vy_s[q] += 1
            vnu[q] += 1
    return t_s, t_m, y_s, y_m, nu


cdef inline cnp.int64_t _ring_dist(cnp.int64_t a, cnp.int64_t b, cnp.int64_t size):
    cdef cnp.int64_t d = (a - b) % size
    cdef cnp.int64_t e = (b - a) % size
    if d < 0:
        d += size
    if e < 0:
        e += size
    return d if d < e else e


def simulate_layers(
    cnp.int64_t[::1] layer_ptr,
    cnp.int64_t[::1] rot_ptr,
    cnp.int64_t[::1] qubits,
    cnp.int8_t[::1] paulis,
    ring_in,
    theta_in,
    dtheta_in,
    lane_id_in,
    corner_in,
    promoted_in,
    cnp.int64_t[::1] ring_sizes,
    cnp.int64_t[::1] ring_offsets,
    cnp.ndarray[cnp.uint8_t, ndim=1] occupied,
    cnp.ndarray[cnp.uint8_t, ndim=1] allowed,
    cnp.ndarray[cnp.uint8_t, ndim=1] corner_map,
    cnp.ndarray[cnp.int64_t, ndim=2] lane_proj,
    cnp.int64_t t_xz_edge,
    cnp.int64_t t_y_edge,
    cnp.int64_t t_xz_corner,
    cnp.int64_t t_y_corner,
    cnp.int64_t t_y_fast,
    cnp.int64_t worst_corner,
    bint pipelining,
    bint promote_inward,
):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ring = np.ascontiguousarray(ring_in, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] theta = np.ascontiguousarray(theta_in, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dtheta = np.ascontiguousarray(dtheta_in, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lane_id = np.ascontiguousarray(lane_id_in, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] corner = np.ascontiguousarray(corner_in, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] promoted = np.ascontiguousarray(promoted_in, dtype=np.int64).copy()

    cdef cnp.int64_t[::1] vring = ring
    cdef cnp.int64_t[::1] vtheta = theta
    cdef cnp.int64_t[::1] vdtheta = dtheta
    cdef cnp.int64_t[::1] vlane = lane_id
    cdef cnp.int64_t[::1] vcorner = corner
    cdef cnp.int64_t[::1] vprom = promoted
    cdef cnp.uint8_t[::1] occ = occupied
    cdef cnp.uint8_t[::1] alw = allowed
    cdef cnp.uint8_t[::1] cmap = corner_map
    cdef cnp.int64_t[:, ::1] proj = np.ascontiguousarray(lane_proj)

    cdef Py_ssize_t n_lanes = proj.shape[0]
    cdef Py_ssize_t n_layers = layer_ptr.shape[0] - 1
    cdef Py_ssize_t n_qubits = ring.shape[0]

    cdef cnp.ndarray[cnp.int64_t, ndim=1] t_move = np.zeros(n_layers, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] t_meas = np.zeros(n_layers, dtype=np.int64)
    cdef cnp.int64_t[::1] vmove = t_move
    cdef cnp.int64_t[::1] vmeas = t_meas

    cdef cnp.ndarray[cnp.uint8_t, ndim=1] activated = np.zeros(n_qubits, dtype=np.uint8)
    cdef cnp.uint8_t[::1] vact = activated
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lane_max = np.zeros(n_lanes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lane_sum = np.zeros(n_lanes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lane_cnt = np.zeros(n_lanes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] touched = np.zeros(n_lanes, dtype=np.int64)
    cdef cnp.int64_t[::1] vlmax = lane_max
    cdef cnp.int64_t[::1] vlsum = lane_sum
    cdef cnp.int64_t[::1] vlcnt = lane_cnt
    cdef cnp.int64_t[::1] vtouch = touched
    cdef cnp.ndarray[cnp.int64_t, ndim=1] movers = np.zeros(n_qubits, dtype=np.int64)
    cdef cnp.int64_t[::1] vmovers = movers

    reloc = []

    cdef Py_ssize_t j, i, m, q, t, k, w
    cdef Py_ssize_t n_touched, n_movers
    cdef cnp.int64_t p, r, basis, rot_meas, meas, move, lid, cost, move_total
    cdef cnp.int64_t size, base, best_d, best_t, best_lane, d_best, l_best, d
    cdef cnp.int64_t dest_r, idx

    for j in range(n_layers):
        n_touched = 0
        n_movers = 0
        meas = 0
        for i in range(layer_ptr[j], layer_ptr[j + 1]):
            rot_meas = 0
            for m in range(rot_ptr[i], rot_ptr[i + 1]):
                q = qubits[m]
                p = paulis[m]
                r = vring[q]
                if r == 0:
                    if p == 2:
                        if vprom[q]:
                            basis = t_y_fast
                        elif vcorner[q]:
                            basis = t_y_corner + worst_corner
                        else:
                            basis = t_y_edge
                    else:
                        if vcorner[q]:
                            basis = t_xz_corner + worst_corner
                        else:
                            basis = t_xz_edge
                else:
                    move = r + vdtheta[q]
                    lid = vlane[q]
                    if vlcnt[lid] == 0:
                        vtouch[n_touched] = lid
                        n_touched += 1
                    vlcnt[lid] += 1
                    vlsum[lid] += move
                    if move > vlmax[lid]:
                        vlmax[lid] = move
                    basis = t_y_edge if p == 2 else t_xz_edge
                    if promote_inward and not vact[q]:
                        vmovers[n_movers] = q
                        n_movers += 1
                vact[q] = 1
                if basis > rot_meas:
                    rot_meas = basis
            if rot_meas > meas:
                meas = rot_meas
        move_total = 0
        for w in range(n_touched):
            lid = vtouch[w]
            if pipelining:
                cost = vlmax[lid] + (vlcnt[lid] - 1)
            else:
                cost = vlsum[lid]
            if cost > move_total:
                move_total = cost
            vlmax[lid] = 0
            vlsum[lid] = 0
            vlcnt[lid] = 0
        vmove[j] = move_total
        vmeas[j] = meas

        for w in range(n_movers):
            q = vmovers[w]
            r = vring[q]
            for dest_r in range(r):
                size = ring_sizes[dest_r]
                base = ring_offsets[dest_r]
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
                        d = _ring_dist(t, proj[k, dest_r], size)
                        if d_best < 0 or d < d_best:
                            d_best = d
                            l_best = k
                    if best_t < 0 or d_best < best_d or (d_best == best_d and t < best_t):
                        best_d = d_best
                        best_t = t
                        best_lane = l_best
                if best_t >= 0:
                    occ[ring_offsets[r] + vtheta[q]] = 0
                    occ[base + best_t] = 1
                    reloc.append((j, q, r, dest_r, best_t, best_d))
                    vring[q] = dest_r
                    vtheta[q] = best_t
                    vdtheta[q] = best_d
                    vlane[q] = best_lane
                    vcorner[q] = cmap[base + best_t]
                    break

    reloc_arr = np.asarray(reloc, dtype=np.int64).reshape(-1, 6)
    return t_move, t_meas, reloc_arr
