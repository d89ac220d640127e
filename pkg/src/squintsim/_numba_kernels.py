"""Numba-compiled twins of the hot kernels in ``kernels``.

Kept in lockstep with the numpy implementations; the backend-equivalence
tests pin both paths together.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _sinc(u):
    if u == 0.0:
        return 1.0
    x = np.pi * u
    return np.sin(x) / x


@njit(cache=True)
def _raised_cosine(u, rolloff):
    if rolloff == 0.0:
        return _sinc(u)
    den = 1.0 - (2.0 * rolloff * u) ** 2
    if abs(den) < 1e-8:
        return (np.pi / 4.0) * _sinc(1.0 / (2.0 * rolloff))
    return _sinc(u) * np.cos(np.pi * rolloff * u) / den


@njit(cache=True)
def pulse_taps(delays, n_taps, t_s, rolloff):
    out = np.empty((delays.size, n_taps))
    for l in range(delays.size):
        for d in range(n_taps):
            out[l, d] = _raised_cosine((d * t_s - delays[l]) / t_s, rolloff)
    return out


@njit(cache=True)
def _dirichlet(n, x):
    s = np.sin(np.pi * x)
    if abs(s) < 1e-12:
        m = int(round(x))
        return 1.0 if ((n - 1) * m) % 2 == 0 else -1.0
    return np.sin(n * np.pi * x) / (n * s)


@njit(cache=True)
def pattern_grid(n_h, spacing_h, n_v, spacing_v, offsets_h, offsets_v):
    gh = np.empty(offsets_h.size)
    gv = np.empty(offsets_v.size)
    for i in range(offsets_h.size):
        gh[i] = abs(_dirichlet(n_h, spacing_h * offsets_h[i]))
    for j in range(offsets_v.size):
        gv[j] = abs(_dirichlet(n_v, spacing_v * offsets_v[j]))
    out = np.empty((offsets_h.size, offsets_v.size))
    for i in range(offsets_h.size):
        for j in range(offsets_v.size):
            out[i, j] = gh[i] * gv[j]
    return out


@njit(cache=True)
def channel_matrices(weights, ratios, rx_h, rx_v, tx_h, tx_v,
                     n_rh, n_rv, sp_rh, sp_rv, n_th, n_tv, sp_th, sp_tv):
    n_paths, n_subc = weights.shape
    n_r = n_rh * n_rv
    n_t = n_th * n_tv
    inv_rh = 1.0 / np.sqrt(n_rh)
    inv_rv = 1.0 / np.sqrt(n_rv)
    inv_th = 1.0 / np.sqrt(n_th)
    inv_tv = 1.0 / np.sqrt(n_tv)
    out = np.zeros((n_subc, n_r, n_t), np.complex128)
    ar = np.empty(n_r, np.complex128)
    at = np.empty(n_t, np.complex128)
    ev = np.empty(max(n_rv, n_tv), np.complex128)
    two_pi = 2.0 * np.pi
    for k in range(n_subc):
        ratio = ratios[k]
        for l in range(n_paths):
            w = weights[l, k]
            ph = two_pi * sp_rh * ratio * rx_h[l]
            pv = two_pi * sp_rv * ratio * rx_v[l]
            for n in range(n_rv):
                ev[n] = np.exp(1j * (pv * n)) * inv_rv
            idx = 0
            for m in range(n_rh):
                eh = np.exp(1j * (ph * m)) * inv_rh
                for n in range(n_rv):
                    ar[idx] = eh * ev[n]
                    idx += 1
            ph = two_pi * sp_th * ratio * tx_h[l]
            pv = two_pi * sp_tv * ratio * tx_v[l]
            for n in range(n_tv):
                ev[n] = np.exp(1j * (pv * n)) * inv_tv
            idx = 0
            for m in range(n_th):
                eh = np.exp(1j * (ph * m)) * inv_th
                for n in range(n_tv):
                    at[idx] = eh * ev[n]
                    idx += 1
            for i in range(n_r):
                c = w * ar[i]
                for j in range(n_t):
                    out[k, i, j] += c * np.conj(at[j])
    return out
