"""Compiled trial loop for Monte Carlo error estimation.

One trial draws X and Y once, then two test samples: Z from the H0 source
(stream ``Z``) and Z from the H1 source (stream ``Z1``).  Statistics are
evaluated from the draw lists with scratch count arrays, so a trial costs
O(N + n) no matter how large the alphabet is.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._streams import alias_draw, stream_state

CLASSIFIER_F = 0
CLASSIFIER_T = 1
CLASSIFIER_ORACLE = 2

LABEL_X = 0
LABEL_Y = 1
LABEL_Z0 = 2
LABEL_Z1 = 3


@njit(cache=True, nogil=True)
def _decide(code, N, n, xs, ys, zs, cx, cy, cz, llr):
    if code == CLASSIFIER_F:
        sx = 0
        for i in range(N):
            sx += cx[xs[i]]
        sy = 0
        for i in range(N):
            sy += cy[ys[i]]
        zx = 0
        zy = 0
        for i in range(n):
            zx += cx[zs[i]]
            zy += cy[zs[i]]
        num = np.int64(n) * (sx - sy) + 2 * np.int64(N) * (zy - zx)
        return 1 if num >= 0 else 0
    if code == CLASSIFIER_T:
        # every symbol with count 2 shows up twice in its draw list
        x2 = 0
        x11 = 0
        for i in range(N):
            s = xs[i]
            if cx[s] == 2 and cz[s] == 0:
                x2 += 1
            elif cx[s] == 1 and cz[s] == 1:
                x11 += 1
        y2 = 0
        y11 = 0
        for i in range(N):
            s = ys[i]
            if cy[s] == 2 and cz[s] == 0:
                y2 += 1
            elif cy[s] == 1 and cz[s] == 1:
                y11 += 1
        zx = 0
        zy = 0
        for i in range(n):
            s = zs[i]
            if cz[s] == 2:
                if cx[s] == 0:
                    zx += 1
                if cy[s] == 0:
                    zy += 1
        c1 = (x2 - y2) // 2
        c2 = (zx - zy) // 2
        c3 = y11 - x11
        NN = np.int64(N)
        nn = np.int64(n)
        num = c1 * nn * nn + c2 * NN * NN + c3 * nn * NN
        return 1 if num >= 0 else 0
    # genie likelihood ratio; ties go to 1
    acc = 0.0
    for i in range(n):
        acc += llr[zs[i]]
    return 1 if acc >= 0 else 0


@njit(cache=True, nogil=True)
def run_trials(
    master, t_start, t_stop, N, n, code,
    acc_x, al_x, acc_y, al_y, pin_symbol, pin_count,
    acc_z0, al_z0, acc_z1, al_z1, llr, record,
):
    """Return ``(errors_h0, errors_h1)`` over trials ``[t_start, t_stop)``.

    ``pin_count`` copies of ``pin_symbol`` are prepended to Y (the Y alias
    table must then exclude that symbol).  If ``record`` has two rows of
    length ``t_stop - t_start`` the per-trial decisions are written into it.
    """
    m = acc_x.size
    cx = np.zeros(m, dtype=np.int64)
    cy = np.zeros(m, dtype=np.int64)
    cz = np.zeros(m, dtype=np.int64)
    xs = np.empty(N, dtype=np.int64)
    ys = np.empty(N, dtype=np.int64)
    zs = np.empty(n, dtype=np.int64)
    st = np.empty(1, dtype=np.uint64)
    keep = record.shape[1] == t_stop - t_start
    e0 = 0
    e1 = 0
    for t in range(t_start, t_stop):
        st[0] = stream_state(master, t, LABEL_X)
        for i in range(N):
            s = alias_draw(st, acc_x, al_x)
            xs[i] = s
            cx[s] += 1
        for i in range(pin_count):
            ys[i] = pin_symbol
        cy[pin_symbol] += pin_count
        st[0] = stream_state(master, t, LABEL_Y)
        for i in range(pin_count, N):
            s = alias_draw(st, acc_y, al_y)
            ys[i] = s
            cy[s] += 1

        st[0] = stream_state(master, t, LABEL_Z0)
        for i in range(n):
            s = alias_draw(st, acc_z0, al_z0)
            zs[i] = s
            cz[s] += 1
        d0 = _decide(code, N, n, xs, ys, zs, cx, cy, cz, llr)
        for i in range(n):
            cz[zs[i]] = 0

        st[0] = stream_state(master, t, LABEL_Z1)
        for i in range(n):
            s = alias_draw(st, acc_z1, al_z1)
            zs[i] = s
            cz[s] += 1
        d1 = _decide(code, N, n, xs, ys, zs, cx, cy, cz, llr)
        for i in range(n):
            cz[zs[i]] = 0
        for i in range(N):
            cx[xs[i]] = 0
            cy[ys[i]] = 0

        if d0 == 1:
            e0 += 1
        if d1 == 0:
            e1 += 1
        if keep:
            record[0, t - t_start] = d0
            record[1, t - t_start] = d1
    return e0, e1
