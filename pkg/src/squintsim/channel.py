"""Statistical tap-delay channel generation for wideband planar-array links.

Channels are built from a small number of scattering paths with circular
complex-normal gains, uniformly distributed delays inside the cyclic prefix,
and uniformly distributed arrival/departure angles.  Generation is pure
given (rng state, configuration), so independently seeded trials can run in
parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from . import kernels
from .arrays import ArrayGeometry, FrequencyGrid


@dataclass(frozen=True)
class PathSet:
    """Multipath parameters of one channel realization (one entry per path)."""

    gains: np.ndarray
    delays_s: np.ndarray
    arrival_azimuth: np.ndarray
    arrival_elevation: np.ndarray
    departure_azimuth: np.ndarray
    departure_elevation: np.ndarray

    def __post_init__(self):
        n = len(self.gains)
        if n < 1:
            raise ValueError("a path set needs at least one path")
        for field in (
            self.delays_s,
            self.arrival_azimuth,
            self.arrival_elevation,
            self.departure_azimuth,
            self.departure_elevation,
        ):
            if len(field) != n:
                raise ValueError("per-path arrays must share one length")
        if np.any(np.asarray(self.delays_s) < 0.0):
            raise ValueError("path delays must be nonnegative")

    @property
    def count(self) -> int:
        return len(self.gains)

    @property
    def arrival_spatial_h(self) -> np.ndarray:
        return np.sin(self.arrival_azimuth) * np.sin(self.arrival_elevation)

    @property
    def arrival_spatial_v(self) -> np.ndarray:
        return np.cos(self.arrival_azimuth)

    @property
    def departure_spatial_h(self) -> np.ndarray:
        return np.sin(self.departure_azimuth) * np.sin(self.departure_elevation)

    @property
    def departure_spatial_v(self) -> np.ndarray:
        return np.cos(self.departure_azimuth)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-subcarrier channel matrices plus the parameters that produced them."""

    matrices: np.ndarray  # (K, n_rx, n_tx) complex
    grid: FrequencyGrid
    paths: PathSet
    sample_period_s: float
    delay_taps: int
    rx_geometry: ArrayGeometry
    tx_geometry: ArrayGeometry

    @property
    def n_subcarriers(self) -> int:
        return self.matrices.shape[0]


def sample_paths(rng, count: int, delay_taps: int, sample_period_s: float) -> PathSet:
    """Draw one path set: CN(0,1) gains, delays uniform on the tap window,
    azimuths uniform on (-pi, pi), elevations uniform on (-pi/2, pi/2).

    Deterministic given the generator state; pass the same seed twice and the
    same paths come back.
    """
    if count < 1:
        raise ValueError("need at least one path")
    if delay_taps < 1:
        raise ValueError("need at least one delay tap")
    rng = np.random.default_rng(rng)
    re = rng.standard_normal(count)
    im = rng.standard_normal(count)
    gains = (re + 1j * im) / np.sqrt(2.0)
    delays = rng.uniform(0.0, (delay_taps - 1) * sample_period_s, count)
    arrival_az = rng.uniform(-np.pi, np.pi, count)
    arrival_el = rng.uniform(-np.pi / 2.0, np.pi / 2.0, count)
    departure_az = rng.uniform(-np.pi, np.pi, count)
    departure_el = rng.uniform(-np.pi / 2.0, np.pi / 2.0, count)
    return PathSet(gains, delays, arrival_az, arrival_el, departure_az, departure_el)


def raised_cosine(t, t_s: float, rolloff: float):
    """Raised-cosine impulse response at time ``t`` seconds (scalar or array).

    Peaks at 1 for t = 0, crosses zero at nonzero integer multiples of the
    sampling period, and resolves the removable singularities at
    t = +-t_s/(2*rolloff) analytically.
    """
    if t_s <= 0.0:
        raise ValueError("sampling period must be positive")
    if not 0.0 <= rolloff <= 1.0:
        raise ValueError("rolloff must lie in [0, 1]")
    values = kernels.raised_cosine_values(t, t_s, rolloff)
    if np.isscalar(t):
        return float(values)
    return values


def _path_weights(paths: PathSet, n_rx: int, n_tx: int) -> float:
    return np.sqrt(n_rx * n_tx / paths.count)


def delay_tap_matrix(
    d: int,
    k: int,
    paths: PathSet,
    rx_geometry: ArrayGeometry,
    tx_geometry: ArrayGeometry,
    grid: FrequencyGrid,
    rolloff: float = 1.0,
) -> np.ndarray:
    """Delay-d channel response matrix at subcarrier k (1-based).

    Sum over paths of gain * pulse(d*T_s - delay) * a_rx a_tx^H with both
    steering vectors evaluated at the subcarrier frequency.
    """
    if d < 0:
        raise ValueError("tap index must be nonnegative")
    if not 1 <= k <= grid.n_subcarriers:
        raise ValueError("subcarrier index out of range")
    t_s = grid.sample_period_s
    ratio = float(grid.subcarriers_hz[k - 1] / grid.carrier_hz)
    pulse = kernels.raised_cosine_values(d * t_s - paths.delays_s, t_s, rolloff)
    ar = kernels.steering_rows(
        rx_geometry.n_h,
        rx_geometry.spacing_h,
        rx_geometry.n_v,
        rx_geometry.spacing_v,
        paths.arrival_spatial_h,
        paths.arrival_spatial_v,
        ratio,
    )
    at = kernels.steering_rows(
        tx_geometry.n_h,
        tx_geometry.spacing_h,
        tx_geometry.n_v,
        tx_geometry.spacing_v,
        paths.departure_spatial_h,
        paths.departure_spatial_v,
        ratio,
    )
    scale = _path_weights(paths, rx_geometry.size, tx_geometry.size)
    weights = scale * paths.gains * pulse
    return (weights[:, None] * ar).T @ np.conj(at)


def frequency_channel(
    paths: PathSet,
    rx_geometry: ArrayGeometry,
    tx_geometry: ArrayGeometry,
    grid: FrequencyGrid,
    sample_period_s: float,
    delay_taps: int,
    rolloff: float = 1.0,
) -> ChannelRealization:
    """Frequency-domain channel at every subcarrier.

    Computed in the per-path form: each path contributes its steering outer
    product weighted by gain times the DFT (over delay taps) of its sampled
    pulse shape.  This is algebraically identical to summing the per-tap
    matrices with the tap DFT phases, which the tests verify.
    """
    if delay_taps < 1:
        raise ValueError("need at least one delay tap")
    n_subc = grid.n_subcarriers
    pulse = kernels.pulse_taps(paths.delays_s, delay_taps, sample_period_s, rolloff)
    k_index = np.arange(1, n_subc + 1, dtype=np.float64)
    dft = np.exp((-2j * np.pi / n_subc) * np.outer(np.arange(delay_taps), k_index))
    scale = _path_weights(paths, rx_geometry.size, tx_geometry.size)
    weights = scale * paths.gains[:, None] * (pulse @ dft)
    ratios = grid.subcarriers_hz / grid.carrier_hz
    matrices = kernels.channel_matrices(
        weights,
        ratios,
        paths.arrival_spatial_h,
        paths.arrival_spatial_v,
        paths.departure_spatial_h,
        paths.departure_spatial_v,
        rx_geometry.params(),
        tx_geometry.params(),
    )
    return ChannelRealization(
        matrices=matrices,
        grid=grid,
        paths=paths,
        sample_period_s=sample_period_s,
        delay_taps=delay_taps,
        rx_geometry=rx_geometry,
        tx_geometry=tx_geometry,
    )


def dump_channel(realization: ChannelRealization, stream: IO[str]) -> None:
    """Write a textual dump of the channel matrices (debugging aid).

    One header line, then per subcarrier a comment line followed by the
    matrix rows; each entry is a "re,im" pair and rows are space separated.
    """
    k_total, n_rx, n_tx = realization.matrices.shape
    stream.write(f"# channel dump subcarriers={k_total} n_rx={n_rx} n_tx={n_tx}\n")
    freqs = realization.grid.subcarriers_hz
    for k in range(k_total):
        stream.write(f"# subcarrier {k + 1} freq_hz={freqs[k]:.12g}\n")
        for row in realization.matrices[k]:
            stream.write(
                " ".join(f"{entry.real:.12g},{entry.imag:.12g}" for entry in row) + "\n"
            )
