"""Vectorised numpy implementations of the hot kernels.

Every function here has a numba twin in ``numba_impl`` with identical
semantics.  Integer-valued outputs (winding grids, band masks) must agree
bit for bit between the two backends; float outputs must agree to normal
rounding noise.  Anything clever enough to break that contract belongs
somewhere else.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 1.0 / (1 << 53)


def gaussian_pairs(seed, first_pair, n_pairs):
    """Standard normal pairs (n_pairs, 2) from a counter-based stream.

    Draw ``k`` of stream ``seed`` is the splitmix64 output for counter
    ``k``; pair ``p`` consumes draws ``2p`` and ``2p+1`` through a
    Box-Muller transform.  Random access by pair index, no state.
    """
    if n_pairs == 0:
        return np.zeros((0, 2), dtype=np.float64)
    k = np.arange(2 * first_pair, 2 * (first_pair + n_pairs), dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (np.uint64(seed) + (k + np.uint64(1)) * _GOLDEN).astype(np.uint64)
        z ^= z >> np.uint64(30)
        z *= _MIX1
        z ^= z >> np.uint64(27)
        z *= _MIX2
        z ^= z >> np.uint64(31)
    u = ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _U53
    u1 = u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    phi = (2.0 * np.pi) * u2
    out = np.empty((n_pairs, 2), dtype=np.float64)
    out[:, 0] = r * np.cos(phi)
    out[:, 1] = r * np.sin(phi)
    return out


def _expand(counts):
    """(ids, local_offsets) enumerating ``counts[i]`` slots per unit i."""
    total = int(counts.sum())
    if total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    ids = np.repeat(np.arange(counts.shape[0], dtype=np.int64), counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    local = np.arange(total, dtype=np.int64) - np.repeat(starts, counts)
    return ids, local


def scanline_winding(vx, vy, x0, y0, dx, dy, nx, ny):
    """Integer winding number at every cell centre, by horizontal scanlines.

    Edge p->q crosses the scanline through centre row j when
    min(py,qy) <= yc < max(py,qy); the crossing contributes +-1 (by edge
    direction) to every centre strictly left of the crossing abscissa.
    Contributions are applied as row difference counts and prefix-summed,
    so the result is exact integer arithmetic, independent of edge order.
    """
    n = vx.shape[0]
    px = vx
    py = vy
    qx = np.roll(vx, -1)
    qy = np.roll(vy, -1)
    keep = py != qy
    px, py, qx, qy = px[keep], py[keep], qx[keep], qy[keep]
    diff = np.zeros(ny * (nx + 1), dtype=np.float64)
    if px.shape[0]:
        a = np.minimum(py, qy)
        b = np.maximum(py, qy)
        sign = np.where(qy > py, 1.0, -1.0)
        j0f = np.floor((a - y0) / dy - 0.5) - 1.0
        j1f = np.ceil((b - y0) / dy - 0.5) + 1.0
        j0 = np.clip(j0f, 0, ny - 1).astype(np.int64)
        j1 = np.clip(j1f, -1, ny - 1).astype(np.int64)
        counts = np.maximum(j1 - j0 + 1, 0)
        eid, off = _expand(counts)
        j = j0[eid] + off
        yc = y0 + (j.astype(np.float64) + 0.5) * dy
        ok = (a[eid] <= yc) & (yc < b[eid])
        eid, j, yc = eid[ok], j[ok], yc[ok]
        if eid.shape[0]:
            pxs, pys, qxs, qys = px[eid], py[eid], qx[eid], qy[eid]
            xc = pxs + (yc - pys) * (qxs - pxs) / (qys - pys)
            k0 = np.clip(np.ceil((xc - x0) / dx - 0.5), 0, nx).astype(np.int64)
            # settle float ties so membership matches the per-point rule
            while True:
                lo = (k0 > 0) & (x0 + (k0.astype(np.float64) - 0.5) * dx >= xc)
                if not lo.any():
                    break
                k0[lo] -= 1
            while True:
                hi = (k0 < nx) & (x0 + (k0.astype(np.float64) + 0.5) * dx < xc)
                if not hi.any():
                    break
                k0[hi] += 1
            s = sign[eid]
            base = j * (nx + 1)
            diff += np.bincount(base, weights=s, minlength=diff.shape[0])
            diff -= np.bincount(base + k0, weights=s, minlength=diff.shape[0])
    theta = np.cumsum(diff.reshape(ny, nx + 1), axis=1)[:, :nx]
    return np.rint(theta).astype(np.int32)


def winding_at_points(vx, vy, zx, zy):
    """Winding numbers at arbitrary points, plus an exact on-edge flag.

    Same half-open crossing rule as ``scanline_winding``.  ``on_edge`` is
    True when the point lies exactly (float equality of the cross
    product, endpoints included) on some edge of the closed loop.
    """
    m = zx.shape[0]
    theta = np.zeros(m, dtype=np.int64)
    on_edge = np.zeros(m, dtype=bool)
    px = vx
    py = vy
    qx = np.roll(vx, -1)
    qy = np.roll(vy, -1)
    chunk = max(1, int(4e6 // max(1, px.shape[0])))
    for s in range(0, m, chunk):
        zxs = zx[s:s + chunk, None]
        zys = zy[s:s + chunk, None]
        up = (py[None, :] <= zys) & (zys < qy[None, :])
        dn = (qy[None, :] <= zys) & (zys < py[None, :])
        any_cross = up | dn
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (zys - py[None, :]) / (qy[None, :] - py[None, :])
            xc = px[None, :] + t * (qx[None, :] - px[None, :])
        hit = any_cross & (xc > zxs)
        theta[s:s + chunk] = (up & hit).sum(axis=1) - (dn & hit).sum(axis=1)
        cross = ((qx - px)[None, :] * (zys - py[None, :])
                 - (qy - py)[None, :] * (zxs - px[None, :]))
        inx = (np.minimum(px, qx)[None, :] <= zxs) & (zxs <= np.maximum(px, qx)[None, :])
        iny = (np.minimum(py, qy)[None, :] <= zys) & (zys <= np.maximum(py, qy)[None, :])
        on_edge[s:s + chunk] = ((cross == 0.0) & inx & iny).any(axis=1)
    return theta.astype(np.int32), on_edge


def curve_band_mask(vx, vy, x0, y0, dx, dy, nx, ny, eps):
    """Cells whose centre lies within ``eps`` of some edge of the loop.

    Candidate cells come from boxes around points sampled densely along
    each edge (a strict superset of the answer); the exact point-segment
    distance test then decides.  Backend-independent by construction.
    """
    mask = np.zeros((ny, nx), dtype=bool)
    n = vx.shape[0]
    px_all = vx
    py_all = vy
    qx_all = np.roll(vx, -1)
    qy_all = np.roll(vy, -1)
    cmin = min(dx, dy)
    eps2 = eps * eps
    block = 16384
    for e0 in range(0, n, block):
        px = px_all[e0:e0 + block]
        py = py_all[e0:e0 + block]
        qx = qx_all[e0:e0 + block]
        qy = qy_all[e0:e0 + block]
        ex = qx - px
        ey = qy - py
        L = np.hypot(ex, ey)
        nsamp = (L / cmin).astype(np.int64) + 1
        sid, soff = _expand(nsamp)
        t = (soff.astype(np.float64) + 0.5) / nsamp[sid].astype(np.float64)
        sx = px[sid] + t * ex[sid]
        sy = py[sid] + t * ey[sid]
        reach = eps + 0.5 * L[sid] / nsamp[sid].astype(np.float64) + 1e-9 * cmin
        i0 = np.clip(np.floor((sx - reach - x0) / dx - 0.5), 0, nx - 1).astype(np.int64)
        i1 = np.clip(np.ceil((sx + reach - x0) / dx - 0.5), -1, nx - 1).astype(np.int64)
        j0 = np.clip(np.floor((sy - reach - y0) / dy - 0.5), 0, ny - 1).astype(np.int64)
        j1 = np.clip(np.ceil((sy + reach - y0) / dy - 0.5), -1, ny - 1).astype(np.int64)
        w = np.maximum(i1 - i0 + 1, 0)
        h = np.maximum(j1 - j0 + 1, 0)
        boxes = w * h
        uid, loc = _expand(boxes)
        if uid.shape[0] == 0:
            continue
        wi = w[uid]
        i = i0[uid] + loc % wi
        j = j0[uid] + loc // wi
        cx = x0 + (i.astype(np.float64) + 0.5) * dx
        cy = y0 + (j.astype(np.float64) + 0.5) * dy
        apx = px[sid][uid]
        apy = py[sid][uid]
        aex = ex[sid][uid]
        aey = ey[sid][uid]
        ee = aex * aex + aey * aey
        num = (cx - apx) * aex + (cy - apy) * aey
        with np.errstate(divide="ignore", invalid="ignore"):
            tt = np.where(ee > 0.0, num / ee, 0.0)
        tt = np.clip(tt, 0.0, 1.0)
        ddx = cx - (apx + tt * aex)
        ddy = cy - (apy + tt * aey)
        hit = ddx * ddx + ddy * ddy <= eps2
        mask[j[hit], i[hit]] = True
    return mask


def grid_quadrant_winding(vx, vy, x0, y0, dx, dy, nx, ny):
    """Winding numbers at all cell centres by summed quadrant transitions.

    Tracks the quadrant of vertex - centre around the loop; quadrant
    steps of +-1 add +-1 quarter turn, steps of 2 add +-2 by the sign of
    the cross product.  Total quarter turns / 4 is the winding number.
    Exact integer arithmetic; values on the curve itself are unreliable
    (callers mask those cells).  Independent of the crossing-rule
    kernels, so it serves as an oracle for them.
    """
    cxs = x0 + (np.arange(nx, dtype=np.float64) + 0.5) * dx
    cys = y0 + (np.arange(ny, dtype=np.float64) + 0.5) * dy
    turns = np.zeros((ny, nx), dtype=np.int32)
    n = vx.shape[0]

    def quad(k):
        sx = vx[k] - cxs
        sy = vy[k] - cys
        q = np.empty((ny, nx), dtype=np.int8)
        q[:] = 3
        c0 = (sx > 0.0)[None, :] & (sy >= 0.0)[:, None]
        c1 = (sx <= 0.0)[None, :] & (sy > 0.0)[:, None]
        c2 = (sx < 0.0)[None, :] & (sy <= 0.0)[:, None]
        q[c2] = 2
        q[c1] = 1
        q[c0] = 0
        return q

    qprev = quad(0)
    for k in range(1, n + 1):
        kk = k % n
        qcur = quad(kk)
        d = (qcur.astype(np.int32) - qprev.astype(np.int32)) & 3
        turns += (d == 1).astype(np.int32) - (d == 3).astype(np.int32)
        opp = d == 2
        if opp.any():
            pxs = vx[(kk - 1) % n] - cxs
            pys = vy[(kk - 1) % n] - cys
            sxs = vx[kk] - cxs
            sys_ = vy[kk] - cys
            cross = pxs[None, :] * sys_[:, None] - pys[:, None] * sxs[None, :]
            turns += np.where(opp, np.where(cross > 0.0, 2, -2), 0).astype(np.int32)
        qprev = qcur
    return (turns // 4).astype(np.int32)


def occupation_mass(px, py, x0, y0, dx, dy, nx, ny, weight):
    """Distribute ``weight`` per segment over cells by traversed length.

    Splits each segment of the polyline (px, py) at every cell boundary
    it crosses and assigns each piece weight * (piece length / segment
    length) to the cell holding the piece midpoint.  Total mass is
    conserved up to rounding.
    """
    mass = np.zeros(ny * nx, dtype=np.float64)
    ax = px[:-1]
    ay = py[:-1]
    bx = px[1:]
    by = py[1:]
    nseg = ax.shape[0]
    fia = np.clip(np.floor((ax - x0) / dx), 0, nx - 1).astype(np.int64)
    fib = np.clip(np.floor((bx - x0) / dx), 0, nx - 1).astype(np.int64)
    fja = np.clip(np.floor((ay - y0) / dy), 0, ny - 1).astype(np.int64)
    fjb = np.clip(np.floor((by - y0) / dy), 0, ny - 1).astype(np.int64)
    kx = np.abs(fib - fia)
    ky = np.abs(fjb - fja)
    sidx, xoff = _expand(kx)
    sidy, yoff = _expand(ky)
    # parameter of the m-th vertical / horizontal cell boundary crossing
    mx = np.where(fib >= fia, fia + 1, fia)[sidx] + np.where(fib >= fia, 1, -1)[sidx] * xoff
    tx = (x0 + mx.astype(np.float64) * dx - ax[sidx]) / (bx[sidx] - ax[sidx])
    my = np.where(fjb >= fja, fja + 1, fja)[sidy] + np.where(fjb >= fja, 1, -1)[sidy] * yoff
    ty = (y0 + my.astype(np.float64) * dy - ay[sidy]) / (by[sidy] - ay[sidy])
    seg_all = np.concatenate([np.arange(nseg, dtype=np.int64), sidx, sidy])
    t_all = np.concatenate([np.zeros(nseg), tx, ty])
    t_all = np.clip(t_all, 0.0, 1.0)
    order = np.lexsort((t_all, seg_all))
    seg_all = seg_all[order]
    t_all = t_all[order]
    t_next = np.empty_like(t_all)
    t_next[:-1] = t_all[1:]
    t_next[-1] = 1.0
    last_of_seg = np.empty(seg_all.shape[0], dtype=bool)
    last_of_seg[:-1] = seg_all[1:] != seg_all[:-1]
    last_of_seg[-1] = True
    t_next[last_of_seg] = 1.0
    tm = 0.5 * (t_all + t_next)
    pxm = ax[seg_all] + tm * (bx[seg_all] - ax[seg_all])
    pym = ay[seg_all] + tm * (by[seg_all] - ay[seg_all])
    ci = np.clip(np.floor((pxm - x0) / dx), 0, nx - 1).astype(np.int64)
    cj = np.clip(np.floor((pym - y0) / dy), 0, ny - 1).astype(np.int64)
    wts = (t_next - t_all) * weight
    np.add.at(mass, cj * nx + ci, wts)
    return mass.reshape(ny, nx)
