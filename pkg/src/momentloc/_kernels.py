"""Hot numeric kernels for the gradient-flow integrator.

Numba-jitted when available; setting MOMENTLOC_PURE_NUMPY=1 (or a missing
numba) selects the plain-Python/numpy fallback.  Ensemble runs use a
batched numpy integrator on the fallback path so throughput stays usable;
the per-sample arithmetic is the same Dormand-Prince 5(4) scheme with an
f-monotonicity rejection guard in both paths.
"""

from __future__ import annotations

import math
import os

import numpy as np

PURE_NUMPY = os.environ.get("MOMENTLOC_PURE_NUMPY", "").lower() not in ("", "0", "false")

if not PURE_NUMPY:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

if not HAVE_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


# Dormand-Prince 5(4) coefficients
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

STATUS_TIME = 0
STATUS_CONVERGED = 1
STATUS_STIFF = 2


@njit(cache=True)
def _fg_local(y, wts, shift, grad):
    """f and grad of 1/2 ||Phi||^2, Phi_a = sum_j |z_j|^2 W[j,a] + c_a."""
    n = wts.shape[0]
    k = wts.shape[1]
    f = 0.0
    sj = np.zeros(n)
    for a in range(k):
        phi_a = shift[a]
        for j in range(n):
            phi_a += (y[2 * j] * y[2 * j] + y[2 * j + 1] * y[2 * j + 1]) * wts[j, a]
        f += 0.5 * phi_a * phi_a
        for j in range(n):
            sj[j] += wts[j, a] * phi_a
    for j in range(n):
        grad[2 * j] = 2.0 * sj[j] * y[2 * j]
        grad[2 * j + 1] = 2.0 * sj[j] * y[2 * j + 1]
    return f


@njit(cache=True)
def _fg_radial(y, deg, grad):
    r2 = 0.0
    for i in range(y.size):
        r2 += y[i] * y[i]
    f = r2 ** (deg / 2.0)
    if r2 == 0.0:
        for i in range(y.size):
            grad[i] = 0.0
        return f
    c = deg * r2 ** (deg / 2.0 - 1.0)
    for i in range(y.size):
        grad[i] = c * y[i]
    return f


@njit(cache=True)
def _fg(kind, y, wts, shift, grad):
    if kind == 0:
        return _fg_local(y, wts, shift, grad)
    return _fg_radial(y, shift[0], grad)


@njit(cache=True)
def _gnorm(grad):
    s = 0.0
    for i in range(grad.size):
        s += grad[i] * grad[i]
    return math.sqrt(s)


@njit(cache=True)
def integrate_vector_field(kind, wts, shift, y0, t_end, rtol, atol, stop_grad,
                           dt0, max_rec):
    """Adaptive DP54 on dy/dt = -grad f with monotone-f step rejection.

    Returns (times, states, fvals, gnorms, count, status); arrays are
    preallocated to max_rec and thinned geometrically if they fill up.
    """
    dim = y0.size
    times = np.zeros(max_rec)
    states = np.zeros((max_rec, dim))
    fvals = np.zeros(max_rec)
    gnorms = np.zeros(max_rec)
    y = y0.copy()
    g = np.zeros(dim)
    k1 = np.zeros(dim)
    k2 = np.zeros(dim)
    k3 = np.zeros(dim)
    k4 = np.zeros(dim)
    k5 = np.zeros(dim)
    k6 = np.zeros(dim)
    k7 = np.zeros(dim)
    ytmp = np.zeros(dim)
    y5 = np.zeros(dim)

    f_cur = _fg(kind, y, wts, shift, g)
    gn = _gnorm(g)
    times[0] = 0.0
    states[0] = y
    fvals[0] = f_cur
    gnorms[0] = gn
    count = 1
    stride = 1
    since = 0

    t = 0.0
    dt = dt0
    status = STATUS_TIME
    if gn < stop_grad:
        return times, states, fvals, gnorms, count, STATUS_CONVERGED

    while t < t_end:
        if t + dt > t_end:
            dt = t_end - t
        _fg(kind, y, wts, shift, k1)
        for i in range(dim):
            ytmp[i] = y[i] - dt * _A21 * k1[i]
        _fg(kind, ytmp, wts, shift, k2)
        for i in range(dim):
            ytmp[i] = y[i] - dt * (_A31 * k1[i] + _A32 * k2[i])
        _fg(kind, ytmp, wts, shift, k3)
        for i in range(dim):
            ytmp[i] = y[i] - dt * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _fg(kind, ytmp, wts, shift, k4)
        for i in range(dim):
            ytmp[i] = y[i] - dt * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _fg(kind, ytmp, wts, shift, k5)
        for i in range(dim):
            ytmp[i] = y[i] - dt * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                   + _A64 * k4[i] + _A65 * k5[i])
        _fg(kind, ytmp, wts, shift, k6)
        for i in range(dim):
            y5[i] = y[i] - dt * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                 + _B5 * k5[i] + _B6 * k6[i])
        f_new = _fg(kind, y5, wts, shift, k7)

        errsq = 0.0
        for i in range(dim):
            sc = atol + rtol * max(abs(y[i]), abs(y5[i]))
            e = dt * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i]
                      + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]) / sc
            errsq += e * e
        err = math.sqrt(errsq / dim)
        f_guard = f_cur + 10.0 * atol * (1.0 + abs(f_cur))

        if err <= 1.0 and f_new <= f_guard:
            t += dt
            for i in range(dim):
                y[i] = y5[i]
            f_cur = f_new
            gn = _gnorm(k7)
            since += 1
            if since >= stride:
                since = 0
                if count == max_rec:
                    half = max_rec // 2
                    for j in range(half):
                        times[j] = times[2 * j + 1]
                        states[j] = states[2 * j + 1]
                        fvals[j] = fvals[2 * j + 1]
                        gnorms[j] = gnorms[2 * j + 1]
                    count = half
                    stride *= 2
                times[count] = t
                states[count] = y
                fvals[count] = f_cur
                gnorms[count] = gn
                count += 1
            if gn < stop_grad:
                status = STATUS_CONVERGED
                break
            fac = 0.9 * err ** -0.2 if err > 1e-12 else 5.0
            dt *= min(5.0, max(0.2, fac))
        else:
            if err > 1.0:
                dt *= max(0.1, 0.9 * err ** -0.2)
            else:
                dt *= 0.5
            if dt < 1e-14 * max(t, 1.0):
                status = STATUS_STIFF
                break

    if count < max_rec and (times[count - 1] != t or count == 1):
        times[count] = t
        states[count] = y
        fvals[count] = f_cur
        gnorms[count] = gn
        count += 1
    else:
        times[count - 1] = t
        states[count - 1] = y
        fvals[count - 1] = f_cur
        gnorms[count - 1] = gn
    return times, states, fvals, gnorms, count, status


@njit(cache=True)
def _p1_rhs(wre, wim, chart, a, b):
    """Right-hand side of the Fubini-Study flow in the active chart.

    Returns (dwre, dwim, phi, gnorm); chart 0 covers the pole with moment
    value a, chart 1 the pole with value b.
    """
    r2 = wre * wre + wim * wim
    if chart == 0:
        phi = (a + b * r2) / (1.0 + r2)
        coef = b - a
    else:
        phi = (a * r2 + b) / (1.0 + r2)
        coef = a - b
    dwre = -2.0 * coef * phi * wre
    dwim = -2.0 * coef * phi * wim
    gn = 2.0 * abs(coef) * abs(phi) * math.sqrt(r2) / (1.0 + r2)
    return dwre, dwim, phi, gn


@njit(cache=True)
def integrate_p1(a, b, w0re, w0im, chart0, t_end, rtol, atol, stop_grad, dt0, max_rec):
    """DP54 on the two-chart projective-line flow; switches chart at |w| > 1.

    Returns (times, states(re, im), charts, fvals, gnorms, count, status).
    """
    times = np.zeros(max_rec)
    states = np.zeros((max_rec, 2))
    charts = np.zeros(max_rec, dtype=np.int8)
    fvals = np.zeros(max_rec)
    gnorms = np.zeros(max_rec)

    wre, wim, chart = w0re, w0im, chart0
    d1, d2, phi, gn = _p1_rhs(wre, wim, chart, a, b)
    f_cur = 0.5 * phi * phi
    times[0] = 0.0
    states[0, 0] = wre
    states[0, 1] = wim
    charts[0] = chart
    fvals[0] = f_cur
    gnorms[0] = gn
    count = 1
    stride = 1
    since = 0

    t = 0.0
    dt = dt0
    status = STATUS_TIME
    if gn < stop_grad:
        return times, states, charts, fvals, gnorms, count, STATUS_CONVERGED

    while t < t_end:
        if t + dt > t_end:
            dt = t_end - t
        k1re, k1im, _, _ = _p1_rhs(wre, wim, chart, a, b)
        yre = wre + dt * _A21 * k1re
        yim = wim + dt * _A21 * k1im
        k2re, k2im, _, _ = _p1_rhs(yre, yim, chart, a, b)
        yre = wre + dt * (_A31 * k1re + _A32 * k2re)
        yim = wim + dt * (_A31 * k1im + _A32 * k2im)
        k3re, k3im, _, _ = _p1_rhs(yre, yim, chart, a, b)
        yre = wre + dt * (_A41 * k1re + _A42 * k2re + _A43 * k3re)
        yim = wim + dt * (_A41 * k1im + _A42 * k2im + _A43 * k3im)
        k4re, k4im, _, _ = _p1_rhs(yre, yim, chart, a, b)
        yre = wre + dt * (_A51 * k1re + _A52 * k2re + _A53 * k3re + _A54 * k4re)
        yim = wim + dt * (_A51 * k1im + _A52 * k2im + _A53 * k3im + _A54 * k4im)
        k5re, k5im, _, _ = _p1_rhs(yre, yim, chart, a, b)
        yre = wre + dt * (_A61 * k1re + _A62 * k2re + _A63 * k3re + _A64 * k4re + _A65 * k5re)
        yim = wim + dt * (_A61 * k1im + _A62 * k2im + _A63 * k3im + _A64 * k4im + _A65 * k5im)
        k6re, k6im, _, _ = _p1_rhs(yre, yim, chart, a, b)
        y5re = wre + dt * (_B1 * k1re + _B3 * k3re + _B4 * k4re + _B5 * k5re + _B6 * k6re)
        y5im = wim + dt * (_B1 * k1im + _B3 * k3im + _B4 * k4im + _B5 * k5im + _B6 * k6im)
        k7re, k7im, phi5, gn5 = _p1_rhs(y5re, y5im, chart, a, b)
        f_new = 0.5 * phi5 * phi5

        sc_re = atol + rtol * max(abs(wre), abs(y5re))
        sc_im = atol + rtol * max(abs(wim), abs(y5im))
        ere = dt * (_E1 * k1re + _E3 * k3re + _E4 * k4re + _E5 * k5re
                    + _E6 * k6re + _E7 * k7re) / sc_re
        eim = dt * (_E1 * k1im + _E3 * k3im + _E4 * k4im + _E5 * k5im
                    + _E6 * k6im + _E7 * k7im) / sc_im
        err = math.sqrt(0.5 * (ere * ere + eim * eim))
        f_guard = f_cur + 10.0 * atol * (1.0 + abs(f_cur))

        if err <= 1.0 and f_new <= f_guard:
            t += dt
            wre, wim = y5re, y5im
            f_cur = f_new
            gn = gn5
            r2 = wre * wre + wim * wim
            if r2 > 1.0:
                wre, wim = wre / r2, -wim / r2
                chart = 1 - chart
            since += 1
            if since >= stride:
                since = 0
                if count == max_rec:
                    half = max_rec // 2
                    for j in range(half):
                        times[j] = times[2 * j + 1]
                        states[j] = states[2 * j + 1]
                        charts[j] = charts[2 * j + 1]
                        fvals[j] = fvals[2 * j + 1]
                        gnorms[j] = gnorms[2 * j + 1]
                    count = half
                    stride *= 2
                times[count] = t
                states[count, 0] = wre
                states[count, 1] = wim
                charts[count] = chart
                fvals[count] = f_cur
                gnorms[count] = gn
                count += 1
            if gn < stop_grad:
                status = STATUS_CONVERGED
                break
            fac = 0.9 * err ** -0.2 if err > 1e-12 else 5.0
            dt *= min(5.0, max(0.2, fac))
        else:
            if err > 1.0:
                dt *= max(0.1, 0.9 * err ** -0.2)
            else:
                dt *= 0.5
            if dt < 1e-14 * max(t, 1.0):
                status = STATUS_STIFF
                break

    if count < max_rec and (times[count - 1] != t or count == 1):
        times[count] = t
        states[count, 0] = wre
        states[count, 1] = wim
        charts[count] = chart
        fvals[count] = f_cur
        gnorms[count] = gn
        count += 1
    else:
        times[count - 1] = t
        states[count - 1, 0] = wre
        states[count - 1, 1] = wim
        charts[count - 1] = chart
        fvals[count - 1] = f_cur
        gnorms[count - 1] = gn
    return times, states, charts, fvals, gnorms, count, status


@njit(cache=True)
def p1_ensemble_scalar(a, b, starts, charts0, t_end, rtol, atol, stop_grad, dt0):
    """Per-sample scalar integration of an ensemble (numba path).

    Returns (wre, wim, chart, phi, gnorm, steps, status, t_stop) arrays.
    """
    n = starts.shape[0]
    out = np.zeros((n, 4))
    chart_out = np.zeros(n, dtype=np.int8)
    steps = np.zeros(n, dtype=np.int64)
    status = np.zeros(n, dtype=np.int8)
    t_stop = np.zeros(n)
    for i in range(n):
        times, states, charts, fvals, gnorms, count, st = integrate_p1(
            a, b, starts[i, 0], starts[i, 1], charts0[i], t_end, rtol, atol,
            stop_grad, dt0, 64)
        wre = states[count - 1, 0]
        wim = states[count - 1, 1]
        chart = charts[count - 1]
        r2 = wre * wre + wim * wim
        if chart == 0:
            phi = (a + b * r2) / (1.0 + r2)
        else:
            phi = (a * r2 + b) / (1.0 + r2)
        out[i, 0] = wre
        out[i, 1] = wim
        out[i, 2] = phi
        out[i, 3] = gnorms[count - 1]
        chart_out[i] = chart
        steps[i] = count
        status[i] = st
        t_stop[i] = times[count - 1]
    return out, chart_out, steps, status, t_stop


def p1_ensemble_batched(a, b, starts, charts0, t_end, rtol, atol, stop_grad, dt0,
                        max_iter=2_000_000):
    """Vectorized ensemble integration (pure-numpy path).

    Same stages and step control as the scalar kernel, applied to all
    still-active samples at once with per-sample step sizes.
    """
    n = starts.shape[0]
    w = starts.astype(float).copy()
    chart = charts0.astype(np.int8).copy()
    t = np.zeros(n)
    dt = np.full(n, dt0)
    f_cur = np.zeros(n)
    gn = np.zeros(n)
    status = np.zeros(n, dtype=np.int8)
    active = np.ones(n, dtype=bool)

    def rhs(wv, ch):
        r2 = wv[:, 0] ** 2 + wv[:, 1] ** 2
        phi = np.where(ch == 0, (a + b * r2), (a * r2 + b)) / (1.0 + r2)
        coef = np.where(ch == 0, b - a, a - b)
        d = (-2.0 * coef * phi)[:, None] * wv
        g = 2.0 * np.abs(coef) * np.abs(phi) * np.sqrt(r2) / (1.0 + r2)
        return d, phi, g

    d0, phi0, g0 = rhs(w, chart)
    f_cur[:] = 0.5 * phi0 ** 2
    gn[:] = g0
    active &= gn >= stop_grad
    status[gn < stop_grad] = STATUS_CONVERGED

    it = 0
    while active.any() and it < max_iter:
        it += 1
        idx = np.nonzero(active)[0]
        wv = w[idx]
        ch = chart[idx]
        h = np.minimum(dt[idx], t_end - t[idx])
        k1, _, _ = rhs(wv, ch)
        k2, _, _ = rhs(wv + h[:, None] * _A21 * k1, ch)
        k3, _, _ = rhs(wv + h[:, None] * (_A31 * k1 + _A32 * k2), ch)
        k4, _, _ = rhs(wv + h[:, None] * (_A41 * k1 + _A42 * k2 + _A43 * k3), ch)
        k5, _, _ = rhs(wv + h[:, None] * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), ch)
        k6, _, _ = rhs(wv + h[:, None] * (_A61 * k1 + _A62 * k2 + _A63 * k3
                                          + _A64 * k4 + _A65 * k5), ch)
        y5 = wv + h[:, None] * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7, phi5, g5 = rhs(y5, ch)
        f_new = 0.5 * phi5 ** 2

        sc = atol + rtol * np.maximum(np.abs(wv), np.abs(y5))
        evec = h[:, None] * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5
                             + _E6 * k6 + _E7 * k7) / sc
        err = np.sqrt(0.5 * (evec ** 2).sum(axis=1))
        guard = f_cur[idx] + 10.0 * atol * (1.0 + np.abs(f_cur[idx]))
        ok = (err <= 1.0) & (f_new <= guard)

        acc = idx[ok]
        t[acc] = t[acc] + h[ok]
        w[acc] = y5[ok]
        f_cur[acc] = f_new[ok]
        gn[acc] = g5[ok]
        r2 = w[acc, 0] ** 2 + w[acc, 1] ** 2
        flip = r2 > 1.0
        fi = acc[flip]
        w[fi, 0] = w[fi, 0] / r2[flip]
        w[fi, 1] = -w[fi, 1] / r2[flip]
        chart[fi] = 1 - chart[fi]

        fac = np.where(err > 1e-12, 0.9 * err ** -0.2, 5.0)
        newdt = np.where(ok, np.minimum(5.0, np.maximum(0.2, fac)),
                         np.where(err > 1.0, np.maximum(0.1, 0.9 * err ** -0.2), 0.5))
        dt[idx] = dt[idx] * newdt

        conv = acc[gn[acc] < stop_grad]
        status[conv] = STATUS_CONVERGED
        active[conv] = False
        done = idx[t[idx] >= t_end * (1 - 1e-15)]
        active[done] = False
        stiff = idx[dt[idx] < 1e-14 * np.maximum(t[idx], 1.0)]
        status[stiff] = STATUS_STIFF
        active[stiff] = False

    r2 = w[:, 0] ** 2 + w[:, 1] ** 2
    phi = np.where(chart == 0, (a + b * r2), (a * r2 + b)) / (1.0 + r2)
    out = np.stack([w[:, 0], w[:, 1], phi, gn], axis=1)
    steps = np.zeros(n, dtype=np.int64)
    return out, chart, steps, status, t
