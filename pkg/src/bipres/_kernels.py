"""Compiled inner loops for the bigraded reduction.

The sweep runs over the distinct x-coordinates of the column grades (the
outer, lexicographic index of the grid).  Within one x-sweep the grid points
(x, y) are visited with increasing y and, at each point, the affected
columns by increasing index -- which is simply increasing column index over
all columns with x-grade <= x.  A column whose pivot is still owned by itself
does nothing when visited, so only "dirty" columns are processed: columns
entering at this x, and columns whose pivot was claimed by a smaller index.
These are kept in a min-heap; pops are strictly increasing within a sweep,
so each column is processed at most once per sweep, exactly as in the
grid-point formulation.

Columns live in a bump-allocated pool (``buf``/``vals`` plus per-column
``start``/``length``); each addition writes its result at the top of the pool
and a compaction pass reclaims dead space when the pool fills.
"""

import numpy as np
from numba import njit

@njit(cache=True)
def _grow_i64(arr, need):
    if need <= arr.shape[0]:
        return arr
    out = np.empty(max(need, 2 * arr.shape[0] + 16), dtype=np.int64)
    out[: arr.shape[0]] = arr
    return out


@njit(cache=True)
def _grow_i32(arr, need):
    if need <= arr.shape[0]:
        return arr
    out = np.empty(max(need, 2 * arr.shape[0] + 16), dtype=np.int32)
    out[: arr.shape[0]] = arr
    return out


@njit(cache=True)
def _compact(buf, vals, start, length, extra):
    live = 0
    for q in range(start.shape[0]):
        live += length[q]
    cap = max(buf.shape[0], 2 * (live + extra) + 1024)
    nbuf = np.empty(cap, dtype=np.int32)
    nvals = np.empty(cap, dtype=np.int32)
    t = 0
    for q in range(start.shape[0]):
        ln = length[q]
        if ln > 0:
            s = start[q]
            nbuf[t : t + ln] = buf[s : s + ln]
            nvals[t : t + ln] = vals[s : s + ln]
            start[q] = t
            t += ln
    return nbuf, nvals, t


@njit(cache=True)
def _axpy(buf, vals, top, sa, la, sb, lb, c, p):
    """Write (col a) + c * (col b) at buf[top:]; return its length."""
    o = top
    a = sa
    ae = sa + la
    b = sb
    be = sb + lb
    if p == 2:
        while a < ae and b < be:
            ra = buf[a]
            rb = buf[b]
            if ra < rb:
                buf[o] = ra
                vals[o] = 1
                o += 1
                a += 1
            elif rb < ra:
                buf[o] = rb
                vals[o] = 1
                o += 1
                b += 1
            else:
                a += 1
                b += 1
        while a < ae:
            buf[o] = buf[a]
            vals[o] = 1
            o += 1
            a += 1
        while b < be:
            buf[o] = buf[b]
            vals[o] = 1
            o += 1
            b += 1
        return o - top
    while a < ae and b < be:
        ra = buf[a]
        rb = buf[b]
        if ra < rb:
            buf[o] = ra
            vals[o] = vals[a]
            o += 1
            a += 1
        elif rb < ra:
            buf[o] = rb
            vals[o] = (c * np.int64(vals[b])) % p
            o += 1
            b += 1
        else:
            v = (np.int64(vals[a]) + c * np.int64(vals[b])) % p
            if v != 0:
                buf[o] = ra
                vals[o] = v
                o += 1
            a += 1
            b += 1
    while a < ae:
        buf[o] = buf[a]
        vals[o] = vals[a]
        o += 1
        a += 1
    while b < be:
        buf[o] = buf[b]
        vals[o] = (c * np.int64(vals[b])) % p
        o += 1
        b += 1
    return o - top


@njit(cache=True)
def _heap_push(heap, hs, v):
    i = hs
    heap[i] = v
    while i > 0:
        par = (i - 1) >> 1
        if heap[par] <= heap[i]:
            break
        tmp = heap[par]
        heap[par] = heap[i]
        heap[i] = tmp
        i = par
    return hs + 1


@njit(cache=True)
def _heap_pop(heap, hs):
    top = heap[0]
    hs -= 1
    heap[0] = heap[hs]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= hs:
            break
        c = left
        if left + 1 < hs and heap[left + 1] < heap[left]:
            c = left + 1
        if heap[i] <= heap[c]:
            break
        tmp = heap[i]
        heap[i] = heap[c]
        heap[c] = tmp
        i = c
    return top, hs


@njit(cache=True)
def _snapshot(out_ptr, out_rows, out_vals, out_meta, n_out, buf, vals, s, ln, col, sweep):
    nnz = out_ptr[n_out]
    out_rows = _grow_i32(out_rows, nnz + ln)
    out_vals = _grow_i32(out_vals, nnz + ln)
    out_rows[nnz : nnz + ln] = buf[s : s + ln]
    out_vals[nnz : nnz + ln] = vals[s : s + ln]
    out_ptr = _grow_i64(out_ptr, n_out + 2)
    out_ptr[n_out + 1] = nnz + ln
    out_meta = _grow_i64(out_meta, 2 * n_out + 2)
    out_meta[2 * n_out] = col
    out_meta[2 * n_out + 1] = sweep
    return out_ptr, out_rows, out_vals, out_meta, n_out + 1


@njit(cache=True)
def bigraded_reduce(
    indptr,
    indices,
    data,
    col_sweep,
    sweep_order,
    sweep_ptr,
    nrows,
    p,
    inv,
    track_v,
    record_gens,
    record_grobner,
    record_trace,
):
    n = indptr.shape[0] - 1
    nnz_in = indices.shape[0]

    cap = max(1 << 12, nnz_in // 2)
    buf = np.empty(cap, dtype=np.int32)
    vals = np.empty(cap, dtype=np.int32)
    start = np.zeros(n, dtype=np.int64)
    length = np.zeros(n, dtype=np.int64)
    top = 0

    vcap = (1 << 12) if track_v else 1
    vbuf = np.empty(vcap, dtype=np.int32)
    vvals = np.empty(vcap, dtype=np.int32)
    vstart = np.zeros(n if track_v else 0, dtype=np.int64)
    vlength = np.zeros(n if track_v else 0, dtype=np.int64)
    vtop = 0

    pivs = np.full(nrows, -1, dtype=np.int64)
    inq = np.zeros(n, dtype=np.bool_)
    heap = np.empty(n + 1, dtype=np.int64)

    zero_sweep = np.full(n, -1, dtype=np.int64)
    zero_order = np.empty(n, dtype=np.int64)
    nzero = 0

    g_ptr = np.zeros(1, dtype=np.int64)
    g_rows = np.empty(0, dtype=np.int32)
    g_vals = np.empty(0, dtype=np.int32)
    g_meta = np.empty(0, dtype=np.int64)
    ng = 0
    b_ptr = np.zeros(1, dtype=np.int64)
    b_rows = np.empty(0, dtype=np.int32)
    b_vals = np.empty(0, dtype=np.int32)
    b_meta = np.empty(0, dtype=np.int64)
    nb = 0
    trace = np.empty(0, dtype=np.int64)
    ntrace = 0
    additions = 0

    for xi in range(sweep_ptr.shape[0] - 1):
        s0 = sweep_ptr[xi]
        s1 = sweep_ptr[xi + 1]
        if s0 == s1:
            continue
        hs = 0
        for t in range(s0, s1):
            j = sweep_order[t]
            ln = indptr[j + 1] - indptr[j]
            if top + ln > buf.shape[0]:
                buf, vals, top = _compact(buf, vals, start, length, ln)
            a = indptr[j]
            for q in range(ln):
                buf[top + q] = indices[a + q]
                vals[top + q] = data[a + q]
            start[j] = top
            length[j] = ln
            top += ln
            if track_v:
                if vtop + 1 > vbuf.shape[0]:
                    vbuf, vvals, vtop = _compact(vbuf, vvals, vstart, vlength, 1)
                vbuf[vtop] = j
                vvals[vtop] = 1
                vstart[j] = vtop
                vlength[j] = 1
                vtop += 1
            hs = _heap_push(heap, hs, j)
            inq[j] = True

        while hs > 0:
            j, hs = _heap_pop(heap, hs)
            inq[j] = False
            while length[j] > 0:
                last = start[j] + length[j] - 1
                piv = buf[last]
                k = pivs[piv]
                if k == -1 or k > j:
                    if k > j and not inq[k]:
                        inq[k] = True
                        hs = _heap_push(heap, hs, k)
                    pivs[piv] = j
                    if record_grobner:
                        b_ptr, b_rows, b_vals, b_meta, nb = _snapshot(
                            b_ptr, b_rows, b_vals, b_meta, nb, buf, vals, start[j], length[j], j, xi
                        )
                    break
                if k == j:
                    break
                vj = np.int64(vals[last])
                vk = np.int64(vals[start[k] + length[k] - 1])
                c = (p - (vj * inv[vk]) % p) % p
                need = length[j] + length[k]
                if top + need > buf.shape[0]:
                    buf, vals, top = _compact(buf, vals, start, length, need)
                ln = _axpy(buf, vals, top, start[j], length[j], start[k], length[k], c, p)
                start[j] = top
                length[j] = ln
                top += ln
                if track_v:
                    vneed = vlength[j] + vlength[k]
                    if vtop + vneed > vbuf.shape[0]:
                        vbuf, vvals, vtop = _compact(vbuf, vvals, vstart, vlength, vneed)
                    vln = _axpy(vbuf, vvals, vtop, vstart[j], vlength[j], vstart[k], vlength[k], c, p)
                    vstart[j] = vtop
                    vlength[j] = vln
                    vtop += vln
                additions += 1
                if record_trace:
                    trace = _grow_i64(trace, 3 * ntrace + 3)
                    trace[3 * ntrace] = k
                    trace[3 * ntrace + 1] = j
                    trace[3 * ntrace + 2] = xi
                    ntrace += 1
            if length[j] == 0:
                if zero_sweep[j] == -1:
                    zero_sweep[j] = xi
                    zero_order[nzero] = j
                    nzero += 1
            elif record_gens and col_sweep[j] == xi:
                g_ptr, g_rows, g_vals, g_meta, ng = _snapshot(
                    g_ptr, g_rows, g_vals, g_meta, ng, buf, vals, start[j], length[j], j, xi
                )

    v_ptr = np.zeros(nzero + 1 if track_v else 1, dtype=np.int64)
    if track_v:
        tot = 0
        for q in range(nzero):
            tot += vlength[zero_order[q]]
            v_ptr[q + 1] = tot
        v_rows = np.empty(tot, dtype=np.int32)
        v_vals = np.empty(tot, dtype=np.int32)
        for q in range(nzero):
            j = zero_order[q]
            s = vstart[j]
            v_rows[v_ptr[q] : v_ptr[q + 1]] = vbuf[s : s + vlength[j]]
            v_vals[v_ptr[q] : v_ptr[q + 1]] = vvals[s : s + vlength[j]]
    else:
        v_rows = np.empty(0, dtype=np.int32)
        v_vals = np.empty(0, dtype=np.int32)

    return (
        zero_sweep,
        zero_order[:nzero].copy(),
        v_ptr,
        v_rows,
        v_vals,
        g_ptr[: ng + 1].copy(),
        g_rows[: g_ptr[ng]].copy(),
        g_vals[: g_ptr[ng]].copy(),
        g_meta[: 2 * ng].copy(),
        b_ptr[: nb + 1].copy(),
        b_rows[: b_ptr[nb]].copy(),
        b_vals[: b_ptr[nb]].copy(),
        b_meta[: 2 * nb].copy(),
        trace[: 3 * ntrace].copy(),
        additions,
    )


@njit(cache=True)
def express_in_basis(b_ptr, b_rows, b_vals, b_gx, b_gy, s_ptr, s_rows, s_vals, s_gx, s_gy, dim, p, inv):
    """Coordinates of each S-vector with respect to a basis with distinct pivots.

    Returns (status, ptr, rows, vals).  status is -1 on success, -2 - b if
    basis vector b shares a pivot with an earlier one, or the index of the
    first S-vector not in the span of the basis elements of lower grade.
    """
    nbasis = b_ptr.shape[0] - 1
    lookup = np.full(dim, -1, dtype=np.int64)
    for b in range(nbasis):
        if b_ptr[b + 1] == b_ptr[b]:
            return -2 - b, np.zeros(1, np.int64), np.empty(0, np.int32), np.empty(0, np.int32)
        piv = b_rows[b_ptr[b + 1] - 1]
        if lookup[piv] != -1:
            return -2 - b, np.zeros(1, np.int64), np.empty(0, np.int32), np.empty(0, np.int32)
        lookup[piv] = b

    ns = s_ptr.shape[0] - 1
    acc = np.zeros(dim, dtype=np.int64)
    out_ptr = np.zeros(ns + 1, dtype=np.int64)
    out_rows = np.empty(16, dtype=np.int32)
    out_vals = np.empty(16, dtype=np.int32)
    tmp_b = np.empty(nbasis + 1, dtype=np.int64)
    tmp_c = np.empty(nbasis + 1, dtype=np.int64)
    for s in range(ns):
        hi = -1
        live = 0
        for t in range(s_ptr[s], s_ptr[s + 1]):
            acc[s_rows[t]] = s_vals[t]
            hi = s_rows[t]
            live += 1
        cnt = 0
        row = hi
        while live > 0:
            if acc[row] == 0:
                row -= 1
                continue
            b = lookup[row]
            if b == -1 or b_gx[b] > s_gx[s] or b_gy[b] > s_gy[s]:
                return s, out_ptr, out_rows, out_vals
            c = (acc[row] * inv[b_vals[b_ptr[b + 1] - 1]]) % p
            for t in range(b_ptr[b], b_ptr[b + 1]):
                r = b_rows[t]
                old = acc[r]
                new = (old - c * b_vals[t]) % p
                if old == 0 and new != 0:
                    live += 1
                elif old != 0 and new == 0:
                    live -= 1
                acc[r] = new
            tmp_b[cnt] = b
            tmp_c[cnt] = c
            cnt += 1
            row -= 1
        order = np.argsort(tmp_b[:cnt])
        nnz = out_ptr[s]
        out_rows = _grow_i32(out_rows, nnz + cnt)
        out_vals = _grow_i32(out_vals, nnz + cnt)
        for q in range(cnt):
            out_rows[nnz + q] = tmp_b[order[q]]
            out_vals[nnz + q] = tmp_c[order[q]]
        out_ptr[s + 1] = nnz + cnt
    return -1, out_ptr, out_rows[: out_ptr[ns]].copy(), out_vals[: out_ptr[ns]].copy()
