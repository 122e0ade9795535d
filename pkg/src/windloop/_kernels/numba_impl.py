"""Numba implementations of the hot kernels.

Scalar loops compiled with ``@njit``; semantics mirror ``numpy_impl``
exactly (same tie rules, same candidate supersets, same accumulation
values), so integer outputs agree bit for bit across backends.
fastmath stays off: reassociation would break that agreement.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

BACKEND_NAME = "numba"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 1.0 / (1 << 53)


@nb.njit(cache=True, nogil=True)
def _mix(z):
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


@nb.njit(cache=True, nogil=True)
def gaussian_pairs(seed, first_pair, n_pairs):
    out = np.empty((n_pairs, 2), dtype=np.float64)
    s = np.uint64(seed)
    for p in range(n_pairs):
        k1 = np.uint64(2 * (first_pair + p))
        z1 = _mix(s + (k1 + np.uint64(1)) * _GOLDEN)
        z2 = _mix(s + (k1 + np.uint64(2)) * _GOLDEN)
        u1 = (np.float64(z1 >> np.uint64(11)) + 0.5) * _U53
        u2 = (np.float64(z2 >> np.uint64(11)) + 0.5) * _U53
        r = math.sqrt(-2.0 * math.log(u1))
        phi = 2.0 * math.pi * u2
        out[p, 0] = r * math.cos(phi)
        out[p, 1] = r * math.sin(phi)
    return out


@nb.njit(cache=True, nogil=True)
def scanline_winding(vx, vy, x0, y0, dx, dy, nx, ny):
    n = vx.shape[0]
    diff = np.zeros((ny, nx + 1), dtype=np.int64)
    for e in range(n):
        px = vx[e]
        py = vy[e]
        qx = vx[(e + 1) % n]
        qy = vy[(e + 1) % n]
        if py == qy:
            continue
        if qy > py:
            a, b, s = py, qy, 1
        else:
            a, b, s = qy, py, -1
        j0f = math.floor((a - y0) / dy - 0.5) - 1.0
        j1f = math.ceil((b - y0) / dy - 0.5) + 1.0
        if j1f < 0.0 or j0f > ny - 1.0:
            continue
        j0 = 0 if j0f < 0.0 else int(j0f)
        j1 = ny - 1 if j1f > ny - 1.0 else int(j1f)
        for j in range(j0, j1 + 1):
            yc = y0 + (j + 0.5) * dy
            if a <= yc and yc < b:
                xc = px + (yc - py) * (qx - px) / (qy - py)
                kf = math.ceil((xc - x0) / dx - 0.5)
                if kf < 0.0:
                    k0 = 0
                elif kf > nx:
                    k0 = nx
                else:
                    k0 = int(kf)
                while k0 > 0 and x0 + (k0 - 0.5) * dx >= xc:
                    k0 -= 1
                while k0 < nx and x0 + (k0 + 0.5) * dx < xc:
                    k0 += 1
                diff[j, 0] += s
                diff[j, k0] -= s
    theta = np.empty((ny, nx), dtype=np.int32)
    for j in range(ny):
        acc = 0
        for i in range(nx):
            acc += diff[j, i]
            theta[j, i] = np.int32(acc)
    return theta


@nb.njit(cache=True, nogil=True)
def winding_at_points(vx, vy, zx, zy):
    n = vx.shape[0]
    m = zx.shape[0]
    theta = np.zeros(m, dtype=np.int32)
    on_edge = np.zeros(m, dtype=np.bool_)
    for t in range(m):
        x = zx[t]
        y = zy[t]
        w = 0
        on = False
        for e in range(n):
            px = vx[e]
            py = vy[e]
            qx = vx[(e + 1) % n]
            qy = vy[(e + 1) % n]
            if py <= y and y < qy:
                xc = px + (y - py) * (qx - px) / (qy - py)
                if xc > x:
                    w += 1
            elif qy <= y and y < py:
                xc = px + (y - py) * (qx - px) / (qy - py)
                if xc > x:
                    w -= 1
            cross = (qx - px) * (y - py) - (qy - py) * (x - px)
            if cross == 0.0:
                if min(px, qx) <= x and x <= max(px, qx):
                    if min(py, qy) <= y and y <= max(py, qy):
                        on = True
        theta[t] = np.int32(w)
        on_edge[t] = on
    return theta, on_edge


@nb.njit(cache=True, nogil=True)
def curve_band_mask(vx, vy, x0, y0, dx, dy, nx, ny, eps):
    n = vx.shape[0]
    mask = np.zeros((ny, nx), dtype=np.bool_)
    cmin = min(dx, dy)
    eps2 = eps * eps
    for e in range(n):
        px = vx[e]
        py = vy[e]
        qx = vx[(e + 1) % n]
        qy = vy[(e + 1) % n]
        ex = qx - px
        ey = qy - py
        ee = ex * ex + ey * ey
        L = math.sqrt(ee)
        nsamp = int(L / cmin) + 1
        reach = eps + 0.5 * L / nsamp + 1e-9 * cmin
        for k in range(nsamp):
            tt = (k + 0.5) / nsamp
            sx = px + tt * ex
            sy = py + tt * ey
            i0f = math.floor((sx - reach - x0) / dx - 0.5)
            i1f = math.ceil((sx + reach - x0) / dx - 0.5)
            j0f = math.floor((sy - reach - y0) / dy - 0.5)
            j1f = math.ceil((sy + reach - y0) / dy - 0.5)
            if i1f < 0.0 or i0f > nx - 1.0 or j1f < 0.0 or j0f > ny - 1.0:
                continue
            i0 = 0 if i0f < 0.0 else int(i0f)
            i1 = nx - 1 if i1f > nx - 1.0 else int(i1f)
            j0 = 0 if j0f < 0.0 else int(j0f)
            j1 = ny - 1 if j1f > ny - 1.0 else int(j1f)
            for j in range(j0, j1 + 1):
                cy = y0 + (j + 0.5) * dy
                for i in range(i0, i1 + 1):
                    if mask[j, i]:
                        continue
                    cx = x0 + (i + 0.5) * dx
                    if ee > 0.0:
                        ts = ((cx - px) * ex + (cy - py) * ey) / ee
                        if ts < 0.0:
                            ts = 0.0
                        elif ts > 1.0:
                            ts = 1.0
                    else:
                        ts = 0.0
                    ddx = cx - (px + ts * ex)
                    ddy = cy - (py + ts * ey)
                    if ddx * ddx + ddy * ddy <= eps2:
                        mask[j, i] = True
    return mask


@nb.njit(cache=True, nogil=True)
def grid_quadrant_winding(vx, vy, x0, y0, dx, dy, nx, ny):
    n = vx.shape[0]
    theta = np.empty((ny, nx), dtype=np.int32)
    for j in range(ny):
        cy = y0 + (j + 0.5) * dy
        for i in range(nx):
            cx = x0 + (i + 0.5) * dx
            sx = vx[0] - cx
            sy = vy[0] - cy
            if sx > 0.0 and sy >= 0.0:
                qprev = 0
            elif sx <= 0.0 and sy > 0.0:
                qprev = 1
            elif sx < 0.0 and sy <= 0.0:
                qprev = 2
            else:
                qprev = 3
            ppx = sx
            ppy = sy
            turns = 0
            for k in range(1, n + 1):
                kk = k % n
                sx = vx[kk] - cx
                sy = vy[kk] - cy
                if sx > 0.0 and sy >= 0.0:
                    q = 0
                elif sx <= 0.0 and sy > 0.0:
                    q = 1
                elif sx < 0.0 and sy <= 0.0:
                    q = 2
                else:
                    q = 3
                d = (q - qprev) & 3
                if d == 1:
                    turns += 1
                elif d == 3:
                    turns -= 1
                elif d == 2:
                    cross = ppx * sy - ppy * sx
                    if cross > 0.0:
                        turns += 2
                    else:
                        turns -= 2
                qprev = q
                ppx = sx
                ppy = sy
            theta[j, i] = np.int32(turns // 4)
    return theta


@nb.njit(cache=True, nogil=True)
def occupation_mass(px, py, x0, y0, dx, dy, nx, ny, weight):
    mass = np.zeros((ny, nx), dtype=np.float64)
    nseg = px.shape[0] - 1
    for e in range(nseg):
        ax = px[e]
        ay = py[e]
        bx = px[e + 1]
        by = py[e + 1]
        fia = int(math.floor((ax - x0) / dx))
        fja = int(math.floor((ay - y0) / dy))
        fib = int(math.floor((bx - x0) / dx))
        fjb = int(math.floor((by - y0) / dy))
        if fia < 0:
            fia = 0
        elif fia > nx - 1:
            fia = nx - 1
        if fja < 0:
            fja = 0
        elif fja > ny - 1:
            fja = ny - 1
        if fib < 0:
            fib = 0
        elif fib > nx - 1:
            fib = nx - 1
        if fjb < 0:
            fjb = 0
        elif fjb > ny - 1:
            fjb = ny - 1
        kx = fib - fia if fib >= fia else fia - fib
        ky = fjb - fja if fjb >= fja else fja - fjb
        ncross = kx + ky
        if ncross == 0:
            mass[fja, fia] += weight
            continue
        # merge the sorted vertical and horizontal crossing parameters
        sxdir = 1 if fib >= fia else -1
        sydir = 1 if fjb >= fja else -1
        icx = 0
        icy = 0
        tprev = 0.0
        for step in range(ncross + 1):
            if step == ncross:
                tn = 1.0
            else:
                tx = 2.0
                ty = 2.0
                if icx < kx:
                    mxi = fia + 1 + icx if sxdir == 1 else fia - icx
                    tx = (x0 + mxi * dx - ax) / (bx - ax)
                if icy < ky:
                    myi = fja + 1 + icy if sydir == 1 else fja - icy
                    ty = (y0 + myi * dy - ay) / (by - ay)
                if tx <= ty:
                    tn = tx
                    icx += 1
                else:
                    tn = ty
                    icy += 1
                if tn < 0.0:
                    tn = 0.0
                elif tn > 1.0:
                    tn = 1.0
            tm = 0.5 * (tprev + tn)
            cmx = ax + tm * (bx - ax)
            cmy = ay + tm * (by - ay)
            ci = int(math.floor((cmx - x0) / dx))
            cj = int(math.floor((cmy - y0) / dy))
            if ci < 0:
                ci = 0
            elif ci > nx - 1:
                ci = nx - 1
            if cj < 0:
                cj = 0
            elif cj > ny - 1:
                cj = ny - 1
            mass[cj, ci] += (tn - tprev) * weight
            tprev = tn
    return mass
