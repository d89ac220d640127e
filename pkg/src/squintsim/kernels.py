"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is picked from the ``SQUINTSIM_BACKEND`` environment variable:
``"numba"`` (require the compiled path), ``"numpy"`` (force the fallback) or
``"auto"`` (default: numba when importable).  ``set_backend`` switches at
runtime; it exists for the benchmark script and the backend-equivalence
tests.  Both paths compute the same quantities in the same accumulation
order, so they agree to floating-point rounding.
"""

from __future__ import annotations

import os

import numpy as np

_VALID_BACKENDS = ("auto", "numba", "numpy")

_backend: str | None = None
_numba_impl = None


class BackendError(RuntimeError):
    """Requested kernel backend is unavailable or unknown."""


def _resolve(name: str) -> str:
    global _numba_impl
    if name == "numpy":
        return "numpy"
    try:
        from . import _numba_kernels

        _numba_impl = _numba_kernels
        return "numba"
    except ImportError:
        if name == "numba":
            raise BackendError(
                "SQUINTSIM_BACKEND=numba was requested but numba is not importable"
            ) from None
        return "numpy"


def active_backend() -> str:
    """Name of the backend in use ("numba" or "numpy")."""
    global _backend
    if _backend is None:
        name = os.environ.get("SQUINTSIM_BACKEND", "auto").lower()
        if name not in _VALID_BACKENDS:
            raise BackendError(
                f"unknown SQUINTSIM_BACKEND {name!r}; expected one of {_VALID_BACKENDS}"
            )
        _backend = _resolve(name)
    return _backend


def set_backend(name: str) -> None:
    """Force a backend ("numba", "numpy" or "auto") for the current process."""
    global _backend
    if name not in _VALID_BACKENDS:
        raise BackendError(f"unknown backend {name!r}; expected one of {_VALID_BACKENDS}")
    _backend = _resolve(name)


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def raised_cosine_values(t, t_s: float, rolloff: float):
    """Raised-cosine impulse response sampled at times ``t`` (vectorized).

    The removable singularities at t = +-t_s/(2*rolloff) take their analytic
    limit (pi/4) * sinc(1/(2*rolloff)).
    """
    u = np.asarray(t, dtype=np.float64) / t_s
    if rolloff == 0.0:
        return np.sinc(u)
    den = 1.0 - (2.0 * rolloff * u) ** 2
    near = np.abs(den) < 1e-8
    safe = np.where(near, 1.0, den)
    limit = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * rolloff))
    return np.where(near, limit, np.sinc(u) * np.cos(np.pi * rolloff * u) / safe)


def dirichlet_values(n: int, x):
    """sin(n*pi*x) / (n*sin(pi*x)) with integer-x singularities resolved to +-1."""
    x = np.asarray(x, dtype=np.float64)
    s = np.sin(np.pi * x)
    near = np.abs(s) < 1e-12
    m = np.rint(x).astype(np.int64)
    limit = np.where(((n - 1) * m) % 2 == 0, 1.0, -1.0)
    safe = np.where(near, 1.0, s)
    return np.where(near, limit, np.sin(n * np.pi * x) / (n * safe))


def steering_rows(
    n_h: int,
    spacing_h: float,
    n_v: int,
    spacing_v: float,
    coords_h,
    coords_v,
    ratio: float,
) -> np.ndarray:
    """Unit-norm planar-array response vectors, one row per direction.

    ``coords_h``/``coords_v`` are the horizontal/vertical spatial frequencies
    of each direction; ``ratio`` is the evaluation frequency divided by the
    carrier.  The horizontal factor varies slowest in the flattened index.
    """
    coords_h = np.asarray(coords_h, dtype=np.float64)
    coords_v = np.asarray(coords_v, dtype=np.float64)
    ah = np.exp(
        (2j * np.pi * spacing_h * ratio) * np.outer(coords_h, np.arange(n_h))
    ) / np.sqrt(n_h)
    av = np.exp(
        (2j * np.pi * spacing_v * ratio) * np.outer(coords_v, np.arange(n_v))
    ) / np.sqrt(n_v)
    return (ah[:, :, None] * av[:, None, :]).reshape(coords_h.size, n_h * n_v)


def _pulse_taps_numpy(delays, n_taps, t_s, rolloff):
    t = np.arange(n_taps)[None, :] * t_s - np.asarray(delays, dtype=np.float64)[:, None]
    return raised_cosine_values(t, t_s, rolloff)


def _pattern_grid_numpy(n_h, spacing_h, n_v, spacing_v, offsets_h, offsets_v):
    gh = np.abs(dirichlet_values(n_h, spacing_h * np.asarray(offsets_h, dtype=np.float64)))
    gv = np.abs(dirichlet_values(n_v, spacing_v * np.asarray(offsets_v, dtype=np.float64)))
    return np.outer(gh, gv)


def _channel_matrices_numpy(weights, ratios, rx_h, rx_v, tx_h, tx_v, rx_params, tx_params):
    n_rh, n_rv, sp_rh, sp_rv = rx_params
    n_th, n_tv, sp_th, sp_tv = tx_params
    n_subc = ratios.size
    out = np.empty((n_subc, n_rh * n_rv, n_th * n_tv), dtype=np.complex128)
    for k in range(n_subc):
        ar = steering_rows(n_rh, sp_rh, n_rv, sp_rv, rx_h, rx_v, ratios[k])
        at = steering_rows(n_th, sp_th, n_tv, sp_tv, tx_h, tx_v, ratios[k])
        out[k] = (weights[:, k, None] * ar).T @ np.conj(at)
    return out


# ---------------------------------------------------------------------------
# dispatching wrappers
# ---------------------------------------------------------------------------

def pulse_taps(delays, n_taps: int, t_s: float, rolloff: float) -> np.ndarray:
    """Pulse-shape samples p(d*t_s - delay) for d = 0..n_taps-1, one row per delay."""
    delays = np.ascontiguousarray(delays, dtype=np.float64)
    if active_backend() == "numba":
        return _numba_impl.pulse_taps(delays, n_taps, float(t_s), float(rolloff))
    return _pulse_taps_numpy(delays, n_taps, t_s, rolloff)


def pattern_grid(
    n_h: int,
    spacing_h: float,
    n_v: int,
    spacing_v: float,
    offsets_h,
    offsets_v,
) -> np.ndarray:
    """|D_nh(sp_h * off_h)| * |D_nv(sp_v * off_v)| over the offset grid (outer product)."""
    offsets_h = np.ascontiguousarray(offsets_h, dtype=np.float64)
    offsets_v = np.ascontiguousarray(offsets_v, dtype=np.float64)
    if active_backend() == "numba":
        return _numba_impl.pattern_grid(
            n_h, float(spacing_h), n_v, float(spacing_v), offsets_h, offsets_v
        )
    return _pattern_grid_numpy(n_h, spacing_h, n_v, spacing_v, offsets_h, offsets_v)


def channel_matrices(weights, ratios, rx_h, rx_v, tx_h, tx_v, rx_params, tx_params) -> np.ndarray:
    """Accumulate per-subcarrier channel matrices from weighted rank-one path terms.

    ``weights[l, k]`` multiplies the outer product of the receive and transmit
    steering vectors of path ``l`` at subcarrier ``k``; ``rx_params``/
    ``tx_params`` are (n_h, n_v, spacing_h, spacing_v) tuples.
    """
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    ratios = np.ascontiguousarray(ratios, dtype=np.float64)
    rx_h = np.ascontiguousarray(rx_h, dtype=np.float64)
    rx_v = np.ascontiguousarray(rx_v, dtype=np.float64)
    tx_h = np.ascontiguousarray(tx_h, dtype=np.float64)
    tx_v = np.ascontiguousarray(tx_v, dtype=np.float64)
    if active_backend() == "numba":
        n_rh, n_rv, sp_rh, sp_rv = rx_params
        n_th, n_tv, sp_th, sp_tv = tx_params
        return _numba_impl.channel_matrices(
            weights, ratios, rx_h, rx_v, tx_h, tx_v,
            n_rh, n_rv, float(sp_rh), float(sp_rv),
            n_th, n_tv, float(sp_th), float(sp_tv),
        )
    return _channel_matrices_numpy(weights, ratios, rx_h, rx_v, tx_h, tx_v, rx_params, tx_params)
