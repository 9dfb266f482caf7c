"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Two kernels dominate runtime:

* Liouvillian assembly, called once per sweep grid point.
* Adaptive Dormand-Prince 5(4) stepping of ``dy/dt = L y``, used for time
  evolution and for the regression-theorem propagation of ``a rho a^dag``.

``assemble_liouvillian`` and ``dopri5`` are the dispatching entry points; the
explicitly named variants stay importable so tests and the benchmark can run
both paths side by side.

Vectorization is column stacking: ``vec(X)[i + d*j] = X[i, j]`` so that
``vec(A X B) = (B^T kron A) vec(X)``.
"""

import numpy as np

from . import _accel


def liouvillian_numpy(H, collapse):
    """Assemble ``-i[H, .] + sum_c D[c]`` with Kronecker products.

    ``collapse`` is a ``(K, d, d)`` stack of already rate-scaled jump operators.
    """
    d = H.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for c in collapse:
        cdc = c.conj().T @ c
        L += np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    return L


def _liouvillian_loops(H, collapse):
    d = H.shape[0]
    K = collapse.shape[0]
    M = np.zeros((d, d), dtype=np.complex128)
    for c in range(K):
        C = collapse[c]
        for i in range(d):
            for k in range(d):
                acc = 0j
                for m in range(d):
                    acc += np.conj(C[m, i]) * C[m, k]
                M[i, k] += acc
    L = np.zeros((d * d, d * d), dtype=np.complex128)
    for j in range(d):
        for l in range(d):
            for i in range(d):
                row = i + d * j
                for k in range(d):
                    val = 0j
                    for c in range(K):
                        val += np.conj(collapse[c, j, l]) * collapse[c, i, k]
                    if j == l:
                        val += -1j * H[i, k] - 0.5 * M[i, k]
                    if i == k:
                        val += 1j * H[l, j] - 0.5 * M[l, j]
                    L[row, k + d * l] = val
    return L


def _dopri5_impl(L, y0, times, rtol, atol, max_steps):
    # Dormand-Prince 5(4) tableau, FSAL.
    a21 = 1.0 / 5.0
    a31, a32 = 3.0 / 40.0, 9.0 / 40.0
    a41, a42, a43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
    a51, a52, a53, a54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
    a61, a62, a63 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0
    a64, a65 = 49.0 / 176.0, -5103.0 / 18656.0
    b1, b3, b4 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0
    b5, b6 = -2187.0 / 6784.0, 11.0 / 84.0
    e1, e3, e4 = 71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0
    e5, e6, e7 = -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0

    m = times.shape[0]
    out = np.empty((m, y0.shape[0]), dtype=np.complex128)
    out[0] = y0
    y = y0.copy()
    t = times[0]
    k1 = L @ y

    scale = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((np.abs(y) / scale) ** 2))
    d1 = np.sqrt(np.mean((np.abs(k1) / scale) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1

    steps = 0
    for idx in range(1, m):
        t_end = times[idx]
        while t < t_end:
            if steps >= max_steps:
                return out, steps, False
            clipped = t + h >= t_end
            h_try = t_end - t if clipped else h

            k2 = L @ (y + h_try * (a21 * k1))
            k3 = L @ (y + h_try * (a31 * k1 + a32 * k2))
            k4 = L @ (y + h_try * (a41 * k1 + a42 * k2 + a43 * k3))
            k5 = L @ (y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4))
            k6 = L @ (y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5))
            y_new = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)
            k7 = L @ y_new
            err_vec = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)
            sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = np.sqrt(np.mean((np.abs(err_vec) / sc) ** 2))
            steps += 1

            if err <= 1.0:
                t = t_end if clipped else t + h_try
                y = y_new
                k1 = k7
                if err == 0.0:
                    fac = 10.0
                else:
                    fac = min(10.0, max(0.2, 0.9 * err ** -0.2))
                h_next = h_try * fac
                h = max(h, h_next) if clipped else h_next
            else:
                h = h_try * max(0.2, 0.9 * err ** -0.2)
        out[idx] = y
    return out, steps, True


dopri5_numpy = _dopri5_impl

if _accel.NUMBA_AVAILABLE:
    liouvillian_jit = _accel.njit(_liouvillian_loops)
    dopri5_jit = _accel.njit(_dopri5_impl)
else:  # pragma: no cover
    liouvillian_jit = None
    dopri5_jit = None

if _accel.USE_NUMBA:
    _liouvillian_impl = liouvillian_jit
    _dopri5_selected = dopri5_jit
else:
    _liouvillian_impl = liouvillian_numpy
    _dopri5_selected = dopri5_numpy


def backend():
    """Name of the active kernel path, ``"numba"`` or ``"numpy"``."""
    return "numba" if _accel.USE_NUMBA else "numpy"


def assemble_liouvillian(H, collapse):
    H = np.ascontiguousarray(H, dtype=np.complex128)
    d = H.shape[0]
    collapse = np.ascontiguousarray(np.asarray(collapse, dtype=np.complex128).reshape(-1, d, d))
    return _liouvillian_impl(H, collapse)


def dopri5(L, y0, times, rtol, atol, max_steps):
    """Integrate ``dy/dt = L y`` and sample at ``times``.

    Returns ``(samples, steps_taken, completed)``; ``completed`` is False when
    the step cap was reached before the last sample time.
    """
    return _dopri5_selected(
        np.ascontiguousarray(L, dtype=np.complex128),
        np.ascontiguousarray(y0, dtype=np.complex128),
        np.ascontiguousarray(times, dtype=np.float64),
        float(rtol),
        float(atol),
        int(max_steps),
    )
