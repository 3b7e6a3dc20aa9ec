"""Compiled inner loops: periodic sliding maxima and the r-variation search."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _fill_periodic(a, start, ext):
    # ext[t] = a[(start + t) % n] without a modulo per element
    n = a.shape[0]
    j = start % n
    for t in range(ext.shape[0]):
        ext[t] = a[j]
        j += 1
        if j == n:
            j = 0


@njit(cache=True)
def _window_sums_row(row, m, frac, out, ext):
    n = row.shape[0]
    total = 0.0
    for j in range(n):
        total += row[j]
    full = (2 * m + 1) // n
    rem = (2 * m + 1) - full * n
    # ext[t] = row[t - m - 1], covering i - m - 1 .. i + m + 1 for every i
    _fill_periodic(row, -m - 1, ext)
    s = 0.0
    for t in range(rem):
        s += ext[t + 1]
    base = full * total
    for i in range(n):
        v = s + base
        if frac != 0.0:
            v += frac * (ext[i] + ext[i + 2 * m + 2 - full * n])
        out[i] = v
        if rem > 0:
            s += ext[i + 1 + rem] - ext[i + 1]


@njit(cache=True)
def window_sums_rows(a, m, frac, out):
    """Periodic ``sum_{|j|<=m} a[i+j] + frac (a[i-m-1] + a[i+m+1])`` along rows."""
    rows, n = a.shape
    full = (2 * m + 1) // n
    ext = np.empty(n + 2 * m + 3 - full * n)
    for r in range(rows):
        _window_sums_row(a[r], m, frac, out[r], ext)


@njit(cache=True)
def _sliding_max_ws(a, d, out, ext, dqi, dqv):
    # out[i] = max(a[(i - d) % n], ..., a[(i + d) % n]) via a monotone deque;
    # ext, dqi, dqv are caller-provided work arrays of length >= n + 2d
    n = a.shape[0]
    if 2 * d + 1 >= n:
        m = a[0]
        for i in range(1, n):
            if a[i] > m:
                m = a[i]
        for i in range(n):
            out[i] = m
        return
    width = 2 * d + 1
    total = n + 2 * d
    e = ext[:total]
    _fill_periodic(a, -d, e)
    head = 0
    tail = 0
    for t in range(total):
        v = e[t]
        while tail > head and dqv[tail - 1] <= v:
            tail -= 1
        dqi[tail] = t
        dqv[tail] = v
        tail += 1
        if dqi[head] <= t - width:
            head += 1
        if t >= width - 1:
            out[t - 2 * d] = dqv[head]


@njit(cache=True)
def _sliding_max_periodic(a, d, out):
    n = a.shape[0]
    size = n + 2 * min(d, n)
    _sliding_max_ws(a, d, out, np.empty(size), np.empty(size, dtype=np.int64), np.empty(size))


@njit(cache=True)
def _scaled_window_sums(v, m, frac, scale, buf):
    # buf[i] = scale * (sum_{|j|<=m} v[i+j] + frac (v[i-m-1] + v[i+m+1])), periodic,
    # walking wrapped indices instead of materialising an extended copy
    n = v.shape[0]
    total = 0.0
    for j in range(n):
        total += v[j]
    full = (2 * m + 1) // n
    rem = (2 * m + 1) - full * n
    base = full * total
    lo = (-m) % n
    hi = lo
    s = 0.0
    for _ in range(rem):
        s += v[hi]
        hi += 1
        if hi == n:
            hi = 0
    left = (-m - 1) % n
    right = (m + 1) % n
    for i in range(n):
        val = s + base
        if frac != 0.0:
            val += frac * (v[left] + v[right])
        buf[i] = scale * val
        if rem > 0:
            s += v[hi] - v[lo]
            hi += 1
            if hi == n:
                hi = 0
            lo += 1
            if lo == n:
                lo = 0
        left += 1
        if left == n:
            left = 0
        right += 1
        if right == n:
            right = 0


@njit(cache=True)
def region_update(v, m, frac, scale, d, buf, out, dqi, dqv):
    """One radius of the region operator, fused.

    ``buf`` receives the scaled window sums of ``v`` and ``out`` is raised to
    their periodic sliding maximum of half-width ``d``.  The monotone deque
    lives in the ring buffers ``dqi`` and ``dqv`` of length at least
    ``min(2 d + 1, n) + 1``.
    """
    n = v.shape[0]
    _scaled_window_sums(v, m, frac, scale, buf)
    if 2 * d + 1 >= n:
        mx = buf[0]
        for i in range(1, n):
            if buf[i] > mx:
                mx = buf[i]
        for i in range(n):
            if mx > out[i]:
                out[i] = mx
        return
    if d == 0:
        for i in range(n):
            if buf[i] > out[i]:
                out[i] = buf[i]
        return
    width = 2 * d + 1
    cap = width + 1
    head = 0
    size = 0
    j = (-d) % n
    for t in range(n + 2 * d):
        x = buf[j]
        j += 1
        if j == n:
            j = 0
        # pop smaller values from the back
        while size > 0:
            back = head + size - 1
            if back >= cap:
                back -= cap
            if dqv[back] <= x:
                size -= 1
            else:
                break
        pos = head + size
        if pos >= cap:
            pos -= cap
        dqi[pos] = t
        dqv[pos] = x
        size += 1
        if dqi[head] <= t - width:
            head += 1
            if head == cap:
                head = 0
            size -= 1
        if t >= width - 1:
            i = t - 2 * d
            if dqv[head] > out[i]:
                out[i] = dqv[head]


@njit(cache=True)
def sliding_max_rows(a, d, out):
    """Periodic sliding max of half-width ``d`` along the last axis of a 2D array."""
    for r in range(a.shape[0]):
        _sliding_max_periodic(a[r], d, out[r])


def sliding_max(a: np.ndarray, d: int, axis: int = -1) -> np.ndarray:
    """Periodic running maximum over ``[i - d, i + d]`` along ``axis``.

    O(n) per line regardless of ``d``.
    """
    a = np.asarray(a, dtype=float)
    if d <= 0:
        return a.copy()
    moved = np.ascontiguousarray(np.moveaxis(a, axis, -1))
    flat = moved.reshape(-1, moved.shape[-1])
    out = np.empty_like(flat)
    sliding_max_rows(flat, int(d), out)
    return np.moveaxis(out.reshape(moved.shape), -1, axis)


@njit(cache=True)
def _variation_dp(vals, r, window):
    n = vals.shape[0]
    best = np.full(n, -1.0)
    best[0] = 0.0
    for j in range(1, n):
        lo = 0
        if window > 0 and j - window > 0:
            lo = j - window
        b = -1.0
        for i in range(lo, j):
            if best[i] < 0:
                continue
            dre = vals[j].real - vals[i].real
            dim = vals[j].imag - vals[i].imag
            sq = dre * dre + dim * dim
            if r == 2.0:
                c = best[i] + sq
            elif r == 4.0:
                c = best[i] + sq * sq
            else:
                c = best[i] + sq ** (0.5 * r)
            if c > b:
                b = c
        best[j] = b
    return best[n - 1]


def variation_sum(vals: np.ndarray, r: float, window: int = 0) -> float:
    """``max sum |v_{i_{t+1}} - v_{i_t}|^r`` over index chains from first to last sample.

    ``window > 0`` restricts each jump to at most ``window`` samples, which is
    exact whenever optimal chains only link nearby samples.
    """
    vals = np.ascontiguousarray(np.asarray(vals, dtype=complex))
    return float(_variation_dp(vals, float(r), int(window)))
