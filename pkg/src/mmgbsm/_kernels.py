"""Hot numeric kernels with numba and pure-numpy implementations.

Two operations dominate runtime:

* ``ray_sum_series`` -- per-draw ray sums over a time grid, the inner loop
  of every Monte-Carlo estimator;
* ``triple_outer_sum`` -- rank-one accumulation of per-ray TX/RX/time
  phase factors into a full (rx, tx, time) gain tensor.

Dispatch between the two implementations is runtime-switchable via
:mod:`mmgbsm._backend`.  Accumulation order is identical in both paths, so
results agree to floating-point rounding.
"""

from __future__ import annotations

import numpy as np

from . import _backend

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


def _ray_sum_series_numpy(phase0, omega, times, chunk=2048):
    draws, _ = phase0.shape
    out = np.empty((draws, times.size), dtype=np.complex128)
    for lo in range(0, draws, chunk):
        hi = min(lo + chunk, draws)
        ph = phase0[lo:hi, :, None] + omega[lo:hi, :, None] * times[None, None, :]
        out[lo:hi] = np.exp(1j * ph).sum(axis=1)
    return out


def _triple_outer_sum_numpy(u_tx, v_rx, w_time):
    return np.einsum("mq,mp,mt->qpt", v_rx, u_tx, w_time, optimize=True)


if _HAVE_NUMBA:

    @njit(cache=True)
    def _ray_sum_series_numba(phase0, omega, times):  # pragma: no cover - jitted
        draws, rays = phase0.shape
        nt = times.size
        out = np.zeros((draws, nt), dtype=np.complex128)
        for r in range(draws):
            for m in range(rays):
                p0 = phase0[r, m]
                om = omega[r, m]
                for k in range(nt):
                    out[r, k] += np.exp(1j * (p0 + om * times[k]))
        return out

    @njit(cache=True)
    def _triple_outer_sum_numba(u_tx, v_rx, w_time):  # pragma: no cover - jitted
        # contract as one GEMM: out[q, (p,t)] = sum_m v[m,q] * (u[m,p]*w[m,t])
        rays, num_tx = u_tx.shape
        num_rx = v_rx.shape[1]
        nt = w_time.shape[1]
        panel = np.empty((rays, num_tx * nt), dtype=np.complex128)
        for m in range(rays):
            for p in range(num_tx):
                up = u_tx[m, p]
                base = p * nt
                for k in range(nt):
                    panel[m, base + k] = up * w_time[m, k]
        out = np.dot(v_rx.T.copy(), panel)
        return out.reshape(num_rx, num_tx, nt)


def ray_sum_series(phase0: np.ndarray, omega: np.ndarray, times: np.ndarray) -> np.ndarray:
    """``out[r, t] = sum_m exp(1j * (phase0[r, m] + omega[r, m] * times[t]))``."""
    phase0 = np.ascontiguousarray(phase0, dtype=np.float64)
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    if _backend.active_backend() == "numba":
        return _ray_sum_series_numba(phase0, omega, times)
    return _ray_sum_series_numpy(phase0, omega, times)


def triple_outer_sum(u_tx: np.ndarray, v_rx: np.ndarray, w_time: np.ndarray) -> np.ndarray:
    """``out[q, p, t] = sum_m v_rx[m, q] * u_tx[m, p] * w_time[m, t]``."""
    u_tx = np.ascontiguousarray(u_tx, dtype=np.complex128)
    v_rx = np.ascontiguousarray(v_rx, dtype=np.complex128)
    w_time = np.ascontiguousarray(w_time, dtype=np.complex128)
    if _backend.active_backend() == "numba":
        return _triple_outer_sum_numba(u_tx, v_rx, w_time)
    return _triple_outer_sum_numpy(u_tx, v_rx, w_time)


def warm_up():
    """Trigger JIT compilation of the numba kernels on tiny inputs."""
    if _backend.active_backend() != "numba":
        return
    ph = np.zeros((1, 1))
    t = np.zeros(1)
    ray_sum_series(ph, ph, t)
    one = np.ones((1, 1), dtype=np.complex128)
    triple_outer_sum(one, one, one)
