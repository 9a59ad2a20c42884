"""Hot numeric kernels, with optional numba acceleration.

Every kernel exists twice: a scalar-loop version that numba can compile and
a vectorized pure-numpy version.  At import time the loop versions are
wrapped with ``@njit(cache=True)`` unless the environment variable
``FLOWLAB_JIT`` is set to ``0``/``false``/``off`` (or numba is missing), in
which case the numpy versions are exported instead.  ``benchmarks/
bench_kernels.py`` times the two paths against each other.

Transfer-matrix conventions: a state is the pair (u, u').  Crossing a
segment of length L where -u'' + v u = lam u multiplies the state by
[[c, s], [-(lam-v) s, c]] with c = cos(w L), s = sin(w L)/w and
w = sqrt(lam - v); for lam < v the cosh/sinh analogues apply.  Near
lam = v both branches lose accuracy, so for |w L| < 1e-4 a three-term
Taylor expansion in z = (lam-v) L^2 is used, keeping the entries smooth
in lam through the turning point.  A vertex of strength s maps
(u, u') -> (u, u' + s u).
"""
from __future__ import annotations

import math
import os

import numpy as np

_TAYLOR_Z = 1e-8  # switch to series when |w L|^2 = |z| falls below this


def _jit_requested() -> bool:
    flag = os.environ.get("FLOWLAB_JIT", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


JIT_ENABLED = False
if _jit_requested():
    try:
        from numba import njit

        JIT_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        JIT_ENABLED = False


# ---------------------------------------------------------------------------
# loop implementations (numba-compilable, also plain-callable for tests)
# ---------------------------------------------------------------------------

def _eval_u_grid_loops(xs, gamma, coeffs, n):
    out = np.empty(xs.size)
    for i in range(xs.size):
        x = xs[i]
        u = math.sin(gamma * x)
        for j in range(coeffs.size):
            xj = (j + 1.0) / n
            if x > xj:
                u += coeffs[j] * math.sin(gamma * (x - xj))
        out[i] = u
    return out


def _shoot_grid_loops(lams, lengths, vvals, sigmas):
    out = np.empty(lams.size)
    nseg = lengths.size
    for i in range(lams.size):
        lam = lams[i]
        u = 0.0
        up = 1.0
        for k in range(nseg):
            L = lengths[k]
            w2 = lam - vvals[k]
            z = w2 * L * L
            if z > _TAYLOR_Z:
                w = math.sqrt(w2)
                c = math.cos(w * L)
                s = math.sin(w * L) / w
            elif z < -_TAYLOR_Z:
                q = math.sqrt(-w2)
                c = math.cosh(q * L)
                s = math.sinh(q * L) / q
            else:
                c = 1.0 - z / 2.0 + z * z / 24.0
                s = L * (1.0 - z / 6.0 + z * z / 120.0)
            u, up = c * u + s * up, -w2 * s * u + c * up
            if k + 1 < nseg:
                up += sigmas[k] * u
        out[i] = u
    return out


def _count_zeros_loops(lams, lengths, vvals, sigmas):
    # Zero count of the left-normalized shooting solution on (0, 1].  By
    # oscillation theory this equals the number of eigenvalues below lam
    # whenever lam is not itself an eigenvalue.  On an oscillatory segment
    # the Pruefer phase atan2(w u, u') advances linearly by w*L, and a
    # vertex kick cannot move it across a multiple of pi (that would need
    # u = 0), so one floor per segment suffices; the intra-half-period
    # position `frac` hands grazing zeros off between segments consistently.
    out = np.empty(lams.size, dtype=np.int64)
    nseg = lengths.size
    for i in range(lams.size):
        lam = lams[i]
        u = 0.0
        up = 1.0
        cnt = 0
        for k in range(nseg):
            L = lengths[k]
            w2 = lam - vvals[k]
            z = w2 * L * L
            if z > _TAYLOR_Z:
                w = math.sqrt(w2)
                frac = math.atan2(w * u, up) % math.pi
                cnt += int(math.floor((frac + w * L) / math.pi))
                c = math.cos(w * L)
                s = math.sin(w * L) / w
            else:
                if z < -_TAYLOR_Z:
                    q = math.sqrt(-w2)
                    c = math.cosh(q * L)
                    s = math.sinh(q * L) / q
                else:
                    c = 1.0 - z / 2.0 + z * z / 24.0
                    s = L * (1.0 - z / 6.0 + z * z / 120.0)
                # non-oscillatory: at most one zero, present exactly when
                # the endpoint values have opposite signs
                u_end = c * u + s * up
                if u != 0.0 and u_end != 0.0 and (u > 0.0) != (u_end > 0.0):
                    cnt += 1
            u, up = c * u + s * up, -w2 * s * u + c * up
            if k + 1 < nseg:
                up += sigmas[k] * u
        out[i] = cnt
    return out


def _transfer_eval_loops(xs, lam, nodes, vvals, sigmas):
    nseg = nodes.size - 1
    start_u = np.empty(nseg)
    start_up = np.empty(nseg)
    u = 0.0
    up = 1.0
    for k in range(nseg):
        start_u[k] = u
        start_up[k] = up
        L = nodes[k + 1] - nodes[k]
        w2 = lam - vvals[k]
        z = w2 * L * L
        if z > _TAYLOR_Z:
            w = math.sqrt(w2)
            c = math.cos(w * L)
            s = math.sin(w * L) / w
        elif z < -_TAYLOR_Z:
            q = math.sqrt(-w2)
            c = math.cosh(q * L)
            s = math.sinh(q * L) / q
        else:
            c = 1.0 - z / 2.0 + z * z / 24.0
            s = L * (1.0 - z / 6.0 + z * z / 120.0)
        u, up = c * u + s * up, -w2 * s * u + c * up
        if k + 1 < nseg:
            up += sigmas[k] * u

    out = np.empty(xs.size)
    for i in range(xs.size):
        x = xs[i]
        k = np.searchsorted(nodes, x, side="right") - 1
        if k < 0:
            k = 0
        if k > nseg - 1:
            k = nseg - 1
        t = x - nodes[k]
        w2 = lam - vvals[k]
        z = w2 * t * t
        if z > _TAYLOR_Z:
            w = math.sqrt(w2)
            c = math.cos(w * t)
            s = math.sin(w * t) / w
        elif z < -_TAYLOR_Z:
            q = math.sqrt(-w2)
            c = math.cosh(q * t)
            s = math.sinh(q * t) / q
        else:
            c = 1.0 - z / 2.0 + z * z / 24.0
            s = t * (1.0 - z / 6.0 + z * z / 120.0)
        out[i] = c * start_u[k] + s * start_up[k]
    return out


# ---------------------------------------------------------------------------
# vectorized numpy implementations
# ---------------------------------------------------------------------------

def _cs_numpy(w2, L):
    """Vectorized segment propagator entries (c, s) for an array of w2."""
    w2 = np.asarray(w2, dtype=float)
    z = w2 * L * L
    c = np.empty_like(w2)
    s = np.empty_like(w2)
    osc = z > _TAYLOR_Z
    ev = z < -_TAYLOR_Z
    mid = ~(osc | ev)
    if np.any(osc):
        w = np.sqrt(w2[osc])
        c[osc] = np.cos(w * L)
        s[osc] = np.sin(w * L) / w
    if np.any(ev):
        q = np.sqrt(-w2[ev])
        c[ev] = np.cosh(q * L)
        s[ev] = np.sinh(q * L) / q
    if np.any(mid):
        zm = z[mid]
        c[mid] = 1.0 - zm / 2.0 + zm * zm / 24.0
        s[mid] = L * (1.0 - zm / 6.0 + zm * zm / 120.0)
    return c, s


def eval_u_grid_numpy(xs, gamma, coeffs, n):
    xs = np.asarray(xs, dtype=float)
    u = np.sin(gamma * xs)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size:
        node_pos = np.arange(1, coeffs.size + 1) / n
        d = xs[:, None] - node_pos[None, :]
        u = u + np.sum((d > 0) * coeffs * np.sin(gamma * np.maximum(d, 0.0)), axis=1)
    return u


def shoot_grid_numpy(lams, lengths, vvals, sigmas):
    lams = np.asarray(lams, dtype=float)
    u = np.zeros_like(lams)
    up = np.ones_like(lams)
    nseg = len(lengths)
    for k in range(nseg):
        w2 = lams - vvals[k]
        c, s = _cs_numpy(w2, lengths[k])
        u, up = c * u + s * up, -w2 * s * u + c * up
        if k + 1 < nseg:
            up = up + sigmas[k] * u
    return u


def count_zeros_grid_numpy(lams, lengths, vvals, sigmas):
    lams = np.asarray(lams, dtype=float)
    u = np.zeros_like(lams)
    up = np.ones_like(lams)
    cnt = np.zeros(lams.size, dtype=np.int64)
    nseg = len(lengths)
    for k in range(nseg):
        L = lengths[k]
        w2 = lams - vvals[k]
        c, s = _cs_numpy(w2, L)
        osc = w2 * L * L > _TAYLOR_Z
        if np.any(osc):
            w = np.sqrt(w2[osc])
            frac = np.arctan2(w * u[osc], up[osc]) % np.pi
            cnt[osc] += np.floor((frac + w * L) / np.pi).astype(np.int64)
        non = ~osc
        if np.any(non):
            u_end = c[non] * u[non] + s[non] * up[non]
            flips = (u[non] != 0.0) & (u_end != 0.0) & ((u[non] > 0) != (u_end > 0))
            cnt[non] += flips.astype(np.int64)
        u, up = c * u + s * up, -w2 * s * u + c * up
        if k + 1 < nseg:
            up = up + sigmas[k] * u
    return cnt


def transfer_eval_grid_numpy(xs, lam, nodes, vvals, sigmas):
    xs = np.asarray(xs, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    nseg = nodes.size - 1
    lengths = np.diff(nodes)
    start_u = np.empty(nseg)
    start_up = np.empty(nseg)
    u, up = 0.0, 1.0
    for k in range(nseg):
        start_u[k] = u
        start_up[k] = up
        c, s = _cs_numpy(np.array([lam - vvals[k]]), lengths[k])
        w2 = lam - vvals[k]
        u, up = c[0] * u + s[0] * up, -w2 * s[0] * u + c[0] * up
        if k + 1 < nseg:
            up += sigmas[k] * u
    seg = np.clip(np.searchsorted(nodes, xs, side="right") - 1, 0, nseg - 1)
    out = np.empty(xs.size)
    for k in range(nseg):
        sel = seg == k
        if not np.any(sel):
            continue
        t = xs[sel] - nodes[k]
        w2 = lam - vvals[k]
        # per-point segment lengths differ, so expand the propagator inline
        z = w2 * t * t
        c = np.empty_like(t)
        s = np.empty_like(t)
        osc = z > _TAYLOR_Z
        ev = z < -_TAYLOR_Z
        mid = ~(osc | ev)
        if np.any(osc):
            w = math.sqrt(w2)
            c[osc] = np.cos(w * t[osc])
            s[osc] = np.sin(w * t[osc]) / w
        if np.any(ev):
            q = math.sqrt(-w2)
            c[ev] = np.cosh(q * t[ev])
            s[ev] = np.sinh(q * t[ev]) / q
        if np.any(mid):
            zm = z[mid]
            c[mid] = 1.0 - zm / 2.0 + zm * zm / 24.0
            s[mid] = t[mid] * (1.0 - zm / 6.0 + zm * zm / 120.0)
        out[sel] = c * start_u[k] + s * start_up[k]
    return out


# ---------------------------------------------------------------------------
# path selection
# ---------------------------------------------------------------------------

if JIT_ENABLED:
    eval_u_grid = njit(cache=True)(_eval_u_grid_loops)
    shoot_grid = njit(cache=True)(_shoot_grid_loops)
    count_zeros_grid = njit(cache=True)(_count_zeros_loops)
    transfer_eval_grid = njit(cache=True)(_transfer_eval_loops)
else:
    eval_u_grid = eval_u_grid_numpy
    shoot_grid = shoot_grid_numpy
    count_zeros_grid = count_zeros_grid_numpy
    transfer_eval_grid = transfer_eval_grid_numpy
