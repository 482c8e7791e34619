"""Numba-compiled hot loops.

Two kernels: the Godunov numerical Hamiltonian evaluated at every grid node
(the per-step cost of the level-set solver) and the fast-sweeping distance
solve used by re-distancing. Both are compiled single-threaded; the batch
flux kernel is cross-checked against the scalar reference in
:mod:`walkfront.hamiltonian` by the test suite.
"""

import numpy as np
from numba import njit

__all__ = ["godunov_flux_grid", "fast_sweep"]

_BIG = 1.0e300


@njit(cache=True)
def _fill_candidates(a, b, K, buf):
    # endpoints, 0 when it lies inside, and K equispaced interior samples
    if a == b:
        buf[0] = a
        return 1
    buf[0] = a
    buf[1] = b
    n = 2
    lo = a if a < b else b
    hi = b if a < b else a
    if lo < 0.0 < hi:
        buf[n] = 0.0
        n += 1
    step = (hi - lo) / (K + 1)
    for k in range(1, K + 1):
        buf[n] = lo + step * k
        n += 1
    return n


@njit(cache=True, fastmath=True)
def godunov_flux_grid(A, B, dmx, dpx, dmy, dpy, K, out):
    """ext_u ext_v H(u, v) at every node, ext = min when minus <= plus.

    H(u, v) = max_m (A[m] u + B[m] v) is convex, so a pure-max ext is
    attained at an interval endpoint and the interior candidates can be
    skipped without changing the result; every min ext evaluates the full
    candidate set. The direction maximum is manually unrolled four wide to
    break the reduction dependency chain.
    """
    nx, ny = dmx.shape
    M = A.shape[2]
    ub = np.empty(K + 3)
    vb = np.empty(K + 3)
    tA = np.empty(M)
    for i in range(nx):
        for j in range(ny):
            a = dmx[i, j]
            b = dpx[i, j]
            c = dmy[i, j]
            d = dpy[i, j]
            Av = A[i, j]
            Bv = B[i, j]
            u_is_min = a <= b
            v_is_min = c <= d

            if v_is_min:
                nv = _fill_candidates(c, d, K, vb)
            else:
                vb[0] = c
                vb[1] = d
                nv = 1 if c == d else 2
            if u_is_min or v_is_min:
                nu = _fill_candidates(a, b, K, ub)
            else:
                ub[0] = a
                ub[1] = b
                nu = 1 if a == b else 2

            best_u = _BIG if u_is_min else -_BIG
            for iu in range(nu):
                u = ub[iu]
                for m in range(M):
                    tA[m] = Av[m] * u
                best_v = _BIG if v_is_min else -_BIG
                for iv in range(nv):
                    v = vb[iv]
                    b0 = -_BIG
                    b1 = -_BIG
                    b2 = -_BIG
                    b3 = -_BIG
                    m = 0
                    while m + 3 < M:
                        b0 = max(b0, tA[m] + Bv[m] * v)
                        b1 = max(b1, tA[m + 1] + Bv[m + 1] * v)
                        b2 = max(b2, tA[m + 2] + Bv[m + 2] * v)
                        b3 = max(b3, tA[m + 3] + Bv[m + 3] * v)
                        m += 4
                    while m < M:
                        b0 = max(b0, tA[m] + Bv[m] * v)
                        m += 1
                    h = max(max(b0, b1), max(b2, b3))
                    if v_is_min:
                        if h < best_v:
                            best_v = h
                    else:
                        if h > best_v:
                            best_v = h
                if u_is_min:
                    if best_v < best_u:
                        best_u = best_v
                else:
                    if best_v > best_u:
                        best_u = best_v
            out[i, j] = best_u
    return out


@njit(cache=True)
def fast_sweep(d, frozen, dx, dy):
    """Gauss-Seidel sweeps solving |grad d| = 1 upwind, frozen nodes fixed.

    `d` holds unsigned distances: subcell values at interface-adjacent
    (frozen) nodes, a large sentinel elsewhere. Four sweep orderings are
    repeated until the field stops changing.
    """
    nx, ny = d.shape
    ax = 1.0 / (dx * dx)
    ay = 1.0 / (dy * dy)
    tol = 1e-12 * (dx + dy)
    for _pass in range(64):
        max_change = 0.0
        for ordering in range(4):
            si = 1 if ordering % 2 == 0 else -1
            sj = 1 if ordering < 2 else -1
            i = 0 if si == 1 else nx - 1
            while 0 <= i < nx:
                j = 0 if sj == 1 else ny - 1
                while 0 <= j < ny:
                    if not frozen[i, j]:
                        a = _BIG
                        if i > 0 and d[i - 1, j] < a:
                            a = d[i - 1, j]
                        if i < nx - 1 and d[i + 1, j] < a:
                            a = d[i + 1, j]
                        b = _BIG
                        if j > 0 and d[i, j - 1] < b:
                            b = d[i, j - 1]
                        if j < ny - 1 and d[i, j + 1] < b:
                            b = d[i, j + 1]
                        if a < _BIG or b < _BIG:
                            if b >= _BIG:
                                u = a + dx
                            elif a >= _BIG:
                                u = b + dy
                            else:
                                u = a + dx
                                if u > b:
                                    u = b + dy
                                    if u > a:
                                        num = ax * a + ay * b
                                        ssum = ax + ay
                                        disc = num * num - ssum * (ax * a * a + ay * b * b - 1.0)
                                        if disc < 0.0:
                                            disc = 0.0
                                        u = (num + np.sqrt(disc)) / ssum
                            if u < d[i, j]:
                                change = d[i, j] - u
                                if change > max_change:
                                    max_change = change
                                d[i, j] = u
                    j += sj
                i += si
        if max_change < tol:
            break
    return d
