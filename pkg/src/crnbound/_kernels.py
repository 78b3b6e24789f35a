"""Hot numeric kernels: time-varying rate evaluation, the mass-action
right-hand side, and one embedded Dormand-Prince 5(4) step.

Two interchangeable backends exist: numba-compiled loops (default) and a
pure-numpy path.  Select with the environment variable ``CRNBOUND_KERNELS``
set to ``numba`` or ``numpy`` before import; if numba is unavailable the
numpy path is used automatically.  Both implementations are always importable
through ``IMPLEMENTATIONS`` so they can be benchmarked and parity-tested
against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .kinetics import KIND_SINUSOID, KIND_SWITCH

ENV_VAR = "CRNBOUND_KERNELS"

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0,
)
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0,
    22.0 / 525.0, -1.0 / 40.0,
)


# ---------------------------------------------------------------------------
# pure-numpy backend
# ---------------------------------------------------------------------------

def kappa_numpy(t, kind, base, lo, hi, freq, phase, dwell, values):
    """Rate constants at time t, clamped inside their bands."""
    out = base.copy()
    sin_mask = kind == KIND_SINUSOID
    if sin_mask.any():
        half = base[sin_mask] - lo[sin_mask]
        out[sin_mask] = base[sin_mask] + half * np.sin(
            freq[sin_mask] * t + phase[sin_mask]
        )
    sw_mask = kind == KIND_SWITCH
    if sw_mask.any():
        idx = np.minimum(
            (t / dwell[sw_mask]).astype(np.int64), values.shape[1] - 1
        )
        out[sw_mask] = values[np.nonzero(sw_mask)[0], idx]
    return np.minimum(np.maximum(out, lo), hi)


def rhs_numpy(t, x, Y, D, kind, base, lo, hi, freq, phase, dwell, values):
    """Mass-action derivative sum_k kappa_k(t) x**y_k (y_k' - y_k).

    Overflow produces non-finite output (silently); the integration loop
    rejects such steps.
    """
    kap = kappa_numpy(t, kind, base, lo, hi, freq, phase, dwell, values)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        mon = np.prod(np.power(x, Y), axis=1)
        return D.T @ (kap * mon)


def rk_step_numpy(t, h, x, Y, D, kind, base, lo, hi, freq, phase, dwell, values):
    """One Dormand-Prince 5(4) step: returns (5th-order state, error vector)."""
    args = (Y, D, kind, base, lo, hi, freq, phase, dwell, values)
    k1 = rhs_numpy(t, x, *args)
    k2 = rhs_numpy(t + _C2 * h, x + h * (_A21 * k1), *args)
    k3 = rhs_numpy(t + _C3 * h, x + h * (_A31 * k1 + _A32 * k2), *args)
    k4 = rhs_numpy(t + _C4 * h, x + h * (_A41 * k1 + _A42 * k2 + _A43 * k3), *args)
    k5 = rhs_numpy(
        t + _C5 * h, x + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), *args
    )
    k6 = rhs_numpy(
        t + h,
        x + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
        *args,
    )
    x5 = x + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
    k7 = rhs_numpy(t + h, x5, *args)
    err = h * (
        _E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7
    )
    return x5, err


# ---------------------------------------------------------------------------
# numba loop sources (compiled below when the backend is available)
# ---------------------------------------------------------------------------

def _kappa_loops(t, kind, base, lo, hi, freq, phase, dwell, values):
    n = kind.shape[0]
    out = np.empty(n, dtype=np.float64)
    width = values.shape[1]
    for k in range(n):
        if kind[k] == 1:  # sinusoid
            half = base[k] - lo[k]
            v = base[k] + half * math.sin(freq[k] * t + phase[k])
        elif kind[k] == 2:  # switch
            idx = int(t / dwell[k])
            if idx >= width:
                idx = width - 1
            v = values[k, idx]
        else:
            v = base[k]
        if v < lo[k]:
            v = lo[k]
        elif v > hi[k]:
            v = hi[k]
        out[k] = v
    return out


def _rhs_loops(t, x, Y, D, kind, base, lo, hi, freq, phase, dwell, values):
    n_rxn, n_sp = Y.shape
    kap = _kappa_loops(t, kind, base, lo, hi, freq, phase, dwell, values)
    out = np.zeros(n_sp, dtype=np.float64)
    for k in range(n_rxn):
        mon = 1.0
        for i in range(n_sp):
            e = Y[k, i]
            if e != 0.0:
                mon *= x[i] ** e
        rate = kap[k] * mon
        for i in range(n_sp):
            out[i] += rate * D[k, i]
    return out


def _rk_step_loops(t, h, x, Y, D, kind, base, lo, hi, freq, phase, dwell, values):
    k1 = _rhs_loops(t, x, Y, D, kind, base, lo, hi, freq, phase, dwell, values)
    k2 = _rhs_loops(
        t + _C2 * h, x + h * (_A21 * k1),
        Y, D, kind, base, lo, hi, freq, phase, dwell, values,
    )
    k3 = _rhs_loops(
        t + _C3 * h, x + h * (_A31 * k1 + _A32 * k2),
        Y, D, kind, base, lo, hi, freq, phase, dwell, values,
    )
    k4 = _rhs_loops(
        t + _C4 * h, x + h * (_A41 * k1 + _A42 * k2 + _A43 * k3),
        Y, D, kind, base, lo, hi, freq, phase, dwell, values,
    )
    k5 = _rhs_loops(
        t + _C5 * h, x + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4),
        Y, D, kind, base, lo, hi, freq, phase, dwell, values,
    )
    k6 = _rhs_loops(
        t + h,
        x + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
        Y, D, kind, base, lo, hi, freq, phase, dwell, values,
    )
    x5 = x + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
    k7 = _rhs_loops(
        t + h, x5, Y, D, kind, base, lo, hi, freq, phase, dwell, values
    )
    err = h * (
        _E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7
    )
    return x5, err


_STATUS_OK = 0
_STATUS_UNDERFLOW = 1
_STATUS_NONFINITE = 2
_STATUS_MAXSTEPS = 3


def integrate_loop_numpy(
    x0, t_end, rtol, atol, h0, max_steps,
    Y, D, kind, base, lo, hi, freq, phase, dwell, values,
):
    """Adaptive Dormand-Prince loop, numpy backend.

    Returns (status, times, states, derivs, n_accepted, n_rejected); any step
    with a non-positive component is rejected and retried at half the step.
    """
    args = (Y, D, kind, base, lo, hi, freq, phase, dwell, values)
    n = x0.shape[0]
    cap = 1024
    ts = np.empty(cap)
    xs = np.empty((cap, n))
    fs = np.empty((cap, n))
    f0 = rhs_numpy(0.0, x0, *args)
    if not np.all(np.isfinite(f0)):
        return _STATUS_NONFINITE, ts[:0], xs[:0], fs[:0], 0, 0
    size = 1
    ts[0] = 0.0
    xs[0] = x0
    fs[0] = f0
    t = 0.0
    x = x0.copy()
    h = h0
    n_acc = 0
    n_rej = 0
    status = _STATUS_OK
    while t < t_end:
        if n_acc + n_rej >= max_steps:
            status = _STATUS_MAXSTEPS
            break
        if h > t_end - t:
            h = t_end - t
        if t + h == t or h < 1e-300:
            status = _STATUS_UNDERFLOW
            break
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            x5, err = rk_step_numpy(t, h, x, *args)
        if not (np.all(np.isfinite(x5)) and np.all(np.isfinite(err))) or np.any(x5 <= 0.0):
            n_rej += 1
            h *= 0.5
            continue
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(x5))
        enorm = math.sqrt(float(np.mean((err / scale) ** 2)))
        if enorm <= 1.0:
            t = t + h
            x = x5
            f_new = rhs_numpy(t, x, *args)
            if not np.all(np.isfinite(f_new)):
                status = _STATUS_NONFINITE
                break
            if size == cap:
                cap *= 2
                ts = np.concatenate([ts, np.empty(cap - size)])
                xs = np.concatenate([xs, np.empty((cap - size, n))])
                fs = np.concatenate([fs, np.empty((cap - size, n))])
            ts[size] = t
            xs[size] = x
            fs[size] = f_new
            size += 1
            n_acc += 1
            if enorm == 0.0:
                h *= _MAX_FACTOR_LOOP
            else:
                fac = _SAFETY_LOOP * enorm ** -0.2
                if fac > _MAX_FACTOR_LOOP:
                    fac = _MAX_FACTOR_LOOP
                elif fac < _MIN_FACTOR_LOOP:
                    fac = _MIN_FACTOR_LOOP
                h *= fac
        else:
            n_rej += 1
            fac = _SAFETY_LOOP * enorm ** -0.2
            if fac < 0.1:
                fac = 0.1
            h *= fac
    return status, ts[:size].copy(), xs[:size].copy(), fs[:size].copy(), n_acc, n_rej


_SAFETY_LOOP = 0.9
_MIN_FACTOR_LOOP = 0.2
_MAX_FACTOR_LOOP = 5.0


def _integrate_loop_src(
    x0, t_end, rtol, atol, h0, max_steps,
    Y, D, kind, base, lo, hi, freq, phase, dwell, values,
):
    n = x0.shape[0]
    cap = 1024
    ts = np.empty(cap)
    xs = np.empty((cap, n))
    fs = np.empty((cap, n))
    f0 = _rhs_loops(0.0, x0, Y, D, kind, base, lo, hi, freq, phase, dwell, values)
    ok = True
    for i in range(n):
        if not math.isfinite(f0[i]):
            ok = False
    if not ok:
        return _STATUS_NONFINITE, ts[:0], xs[:0], fs[:0], 0, 0
    size = 1
    ts[0] = 0.0
    for i in range(n):
        xs[0, i] = x0[i]
        fs[0, i] = f0[i]
    t = 0.0
    x = x0.copy()
    h = h0
    n_acc = 0
    n_rej = 0
    status = _STATUS_OK
    while t < t_end:
        if n_acc + n_rej >= max_steps:
            status = _STATUS_MAXSTEPS
            break
        if h > t_end - t:
            h = t_end - t
        if t + h == t or h < 1e-300:
            status = _STATUS_UNDERFLOW
            break
        x5, err = _rk_step_loops(
            t, h, x, Y, D, kind, base, lo, hi, freq, phase, dwell, values
        )
        bad = False
        for i in range(n):
            if not math.isfinite(x5[i]) or not math.isfinite(err[i]) or x5[i] <= 0.0:
                bad = True
        if bad:
            n_rej += 1
            h *= 0.5
            continue
        acc = 0.0
        for i in range(n):
            ax = abs(x[i])
            a5 = abs(x5[i])
            big = ax if ax > a5 else a5
            w = err[i] / (atol + rtol * big)
            acc += w * w
        enorm = math.sqrt(acc / n)
        if enorm <= 1.0:
            t = t + h
            x = x5
            f_new = _rhs_loops(t, x, Y, D, kind, base, lo, hi, freq, phase, dwell, values)
            ok = True
            for i in range(n):
                if not math.isfinite(f_new[i]):
                    ok = False
            if not ok:
                status = _STATUS_NONFINITE
                break
            if size == cap:
                cap *= 2
                ts2 = np.empty(cap)
                xs2 = np.empty((cap, n))
                fs2 = np.empty((cap, n))
                for j in range(size):
                    ts2[j] = ts[j]
                    for i in range(n):
                        xs2[j, i] = xs[j, i]
                        fs2[j, i] = fs[j, i]
                ts = ts2
                xs = xs2
                fs = fs2
            ts[size] = t
            for i in range(n):
                xs[size, i] = x[i]
                fs[size, i] = f_new[i]
            size += 1
            n_acc += 1
            if enorm == 0.0:
                h *= _MAX_FACTOR_LOOP
            else:
                fac = _SAFETY_LOOP * enorm ** -0.2
                if fac > _MAX_FACTOR_LOOP:
                    fac = _MAX_FACTOR_LOOP
                elif fac < _MIN_FACTOR_LOOP:
                    fac = _MIN_FACTOR_LOOP
                h *= fac
        else:
            n_rej += 1
            fac = _SAFETY_LOOP * enorm ** -0.2
            if fac < 0.1:
                fac = 0.1
            h *= fac
    return status, ts[:size].copy(), xs[:size].copy(), fs[:size].copy(), n_acc, n_rej


def kappa_matrix(times, kind, base, lo, hi, freq, phase, dwell, values):
    """Rates at every time in `times` (vectorized numpy; post-processing
    helper, not a hot kernel): returns a (len(times), R) matrix."""
    times = np.asarray(times, dtype=np.float64)
    n_t = len(times)
    out = np.tile(base, (n_t, 1))
    sin_mask = kind == KIND_SINUSOID
    if sin_mask.any():
        half = base[sin_mask] - lo[sin_mask]
        out[:, sin_mask] = base[sin_mask][None, :] + half[None, :] * np.sin(
            times[:, None] * freq[sin_mask][None, :] + phase[sin_mask][None, :]
        )
    sw_mask = kind == KIND_SWITCH
    if sw_mask.any():
        rows = np.nonzero(sw_mask)[0]
        idx = np.minimum(
            (times[:, None] / dwell[rows][None, :]).astype(np.int64),
            values.shape[1] - 1,
        )
        out[:, rows] = values[rows[None, :], idx]
    return np.minimum(np.maximum(out, lo[None, :]), hi[None, :])


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

def _requested_backend() -> str:
    value = os.environ.get(ENV_VAR, "numba").strip().lower()
    return value if value in ("numba", "numpy") else "numba"


IMPLEMENTATIONS: dict[str, dict] = {
    "numpy": {
        "kappa": kappa_numpy,
        "rhs": rhs_numpy,
        "rk_step": rk_step_numpy,
        "integrate_loop": integrate_loop_numpy,
    }
}

_HAVE_NUMBA = False
try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    _njit = None

if _HAVE_NUMBA:
    _kappa_nb = _njit(cache=True, nogil=True)(_kappa_loops)
    _kappa_loops = _kappa_nb  # jitted rhs resolves this global at compile time
    _rhs_nb = _njit(cache=True, nogil=True)(_rhs_loops)
    _rhs_loops = _rhs_nb  # jitted rk step resolves this global at compile time
    _rk_nb = _njit(cache=True, nogil=True)(_rk_step_loops)
    _rk_step_loops = _rk_nb  # jitted loop resolves this global at compile time
    _loop_nb = _njit(cache=True, nogil=True)(_integrate_loop_src)
    IMPLEMENTATIONS["numba"] = {
        "kappa": _kappa_nb,
        "rhs": _rhs_nb,
        "rk_step": _rk_nb,
        "integrate_loop": _loop_nb,
    }

ACTIVE_BACKEND = _requested_backend() if _HAVE_NUMBA else "numpy"
if ACTIVE_BACKEND not in IMPLEMENTATIONS:
    ACTIVE_BACKEND = "numpy"

kappa_eval = IMPLEMENTATIONS[ACTIVE_BACKEND]["kappa"]
rhs_eval = IMPLEMENTATIONS[ACTIVE_BACKEND]["rhs"]
rk_step = IMPLEMENTATIONS[ACTIVE_BACKEND]["rk_step"]
integrate_loop = IMPLEMENTATIONS[ACTIVE_BACKEND]["integrate_loop"]

STATUS_OK = _STATUS_OK
STATUS_UNDERFLOW = _STATUS_UNDERFLOW
STATUS_NONFINITE = _STATUS_NONFINITE
STATUS_MAXSTEPS = _STATUS_MAXSTEPS


def kernel_backend() -> str:
    """Name of the backend in use ('numba' or 'numpy')."""
    return ACTIVE_BACKEND
