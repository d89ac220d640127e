"""Planar-array geometry, frequency-dependent steering vectors, array gain,
and beam-squint severity metrics.

All functions are pure; the dataclasses are immutable and safe to share
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class ArrayGeometry:
    """A uniform planar array: antenna counts and carrier-normalized spacings.

    A uniform linear array is the degenerate case with one row or column.
    """

    n_h: int
    n_v: int
    spacing_h: float = 0.5
    spacing_v: float = 0.5

    def __post_init__(self):
        if self.n_h < 1 or self.n_v < 1:
            raise ValueError("antenna counts must be at least 1")
        if self.spacing_h <= 0.0 or self.spacing_v <= 0.0:
            raise ValueError("antenna spacings must be positive")

    @property
    def size(self) -> int:
        return self.n_h * self.n_v

    @property
    def aperture_h(self) -> float:
        """Horizontal aperture in carrier wavelengths (count times spacing)."""
        return self.n_h * self.spacing_h

    @property
    def aperture_v(self) -> float:
        return self.n_v * self.spacing_v

    def params(self) -> tuple[int, int, float, float]:
        return (self.n_h, self.n_v, self.spacing_h, self.spacing_v)


@dataclass(frozen=True)
class Direction:
    """A propagation direction given by azimuth and elevation in radians.

    The spatial frequencies seen by the two array axes are
    ``sin(azimuth)*sin(elevation)`` (horizontal) and ``cos(azimuth)``
    (vertical); both always land in [-1, 1].
    """

    azimuth: float
    elevation: float

    @property
    def spatial_h(self) -> float:
        return math.sin(self.azimuth) * math.sin(self.elevation)

    @property
    def spatial_v(self) -> float:
        return math.cos(self.azimuth)

    @classmethod
    def from_spatial(cls, spatial_h: float, spatial_v: float) -> "Direction":
        """Reconstruct a direction from its spatial frequencies.

        Only pairs inside the unit disc correspond to physical angles.
        """
        if spatial_h**2 + spatial_v**2 > 1.0 + 1e-12:
            raise ValueError("spatial frequencies outside the unit disc have no angle pair")
        azimuth = math.acos(max(-1.0, min(1.0, spatial_v)))
        sin_az = math.sin(azimuth)
        if sin_az < 1e-15:
            return cls(azimuth=azimuth, elevation=0.0)
        ratio = max(-1.0, min(1.0, spatial_h / sin_az))
        return cls(azimuth=azimuth, elevation=math.asin(ratio))


@dataclass(frozen=True)
class FrequencyGrid:
    """OFDM subcarrier frequencies around a carrier.

    Subcarrier k (1-based) sits at carrier + (k - (K+1)/2) * bandwidth / K.
    """

    carrier_hz: float
    bandwidth_hz: float
    n_subcarriers: int

    def __post_init__(self):
        if self.carrier_hz <= 0.0:
            raise ValueError("carrier frequency must be positive")
        if not 0.0 < self.bandwidth_hz < self.carrier_hz:
            raise ValueError("bandwidth must be positive and below the carrier")
        if self.n_subcarriers < 1:
            raise ValueError("need at least one subcarrier")

    @property
    def subcarriers_hz(self) -> np.ndarray:
        k = np.arange(1, self.n_subcarriers + 1, dtype=np.float64)
        step = self.bandwidth_hz / self.n_subcarriers
        return self.carrier_hz + (k - (self.n_subcarriers + 1) / 2.0) * step

    @property
    def fractional_bandwidth(self) -> float:
        return self.bandwidth_hz / self.carrier_hz

    @property
    def deviations(self) -> np.ndarray:
        """Relative frequency offsets f_k / carrier - 1, antisymmetric about the center."""
        return self.subcarriers_hz / self.carrier_hz - 1.0

    @property
    def min_hz(self) -> float:
        return float(self.subcarriers_hz[0])

    @property
    def max_hz(self) -> float:
        return float(self.subcarriers_hz[-1])

    @property
    def central_index(self) -> int:
        """1-based index of the subcarrier nearest the carrier (lower on ties)."""
        return (self.n_subcarriers + 1) // 2

    @property
    def sample_period_s(self) -> float:
        """Tap-delay sampling period, the reciprocal of the bandwidth."""
        return 1.0 / self.bandwidth_hz


def steering_vector(
    geometry: ArrayGeometry,
    direction: Direction,
    freq_hz: float,
    carrier_hz: float,
) -> np.ndarray:
    """Unit-norm array response vector at an arbitrary frequency.

    The horizontal and vertical phase ramps scale with freq_hz / carrier_hz,
    which is what makes beams squint away from their carrier-matched
    direction; the result is the Kronecker product of the two axis factors
    with the horizontal factor varying slowest.
    """
    if freq_hz <= 0.0 or carrier_hz <= 0.0:
        raise ValueError("frequencies must be positive")
    rows = kernels.steering_rows(
        geometry.n_h,
        geometry.spacing_h,
        geometry.n_v,
        geometry.spacing_v,
        np.array([direction.spatial_h]),
        np.array([direction.spatial_v]),
        freq_hz / carrier_hz,
    )
    return rows[0]


def normalized_array_gain(
    weights: np.ndarray,
    direction: Direction,
    freq_hz: float,
    geometry: ArrayGeometry,
    carrier_hz: float,
) -> float:
    """|w^H a(direction, f)| for a combining vector w; 1.0 at a matched beam."""
    w = np.asarray(weights)
    if w.shape != (geometry.size,):
        raise ValueError(
            f"weight vector of length {w.shape} does not match the {geometry.size}-element array"
        )
    a = steering_vector(geometry, direction, freq_hz, carrier_hz)
    return float(abs(np.vdot(w, a)))


def dirichlet_kernel(n: int, x):
    """sin(n*pi*x) / (n*sin(pi*x)), the normalized beam pattern of an n-element line.

    Removable singularities at integer x take their limit value (+-1; exactly
    1 at x = 0).  Accepts scalars or arrays.
    """
    if n < 1:
        raise ValueError("kernel order must be at least 1")
    values = kernels.dirichlet_values(n, x)
    if np.isscalar(x):
        return float(values)
    return values


def array_gain_closed_form(geometry: ArrayGeometry, direction: Direction, deviation: float) -> float:
    """Matched-beam array gain at relative frequency offset ``deviation``.

    Product of one Dirichlet-kernel factor per array axis; agrees with the
    steering-vector inner product.
    """
    gh = dirichlet_kernel(geometry.n_h, geometry.spacing_h * deviation * direction.spatial_h)
    gv = dirichlet_kernel(geometry.n_v, geometry.spacing_v * deviation * direction.spatial_v)
    return abs(gh) * abs(gv)


def bsr_closed_form(geometry: ArrayGeometry, fractional_bandwidth: float) -> float:
    """Closed-form beam squint ratio: (b / 8) * max horizontal/vertical aperture."""
    if fractional_bandwidth < 0.0:
        raise ValueError("fractional bandwidth must be nonnegative")
    return fractional_bandwidth / 8.0 * max(geometry.aperture_h, geometry.aperture_v)


def bsr_numerical(geometry: ArrayGeometry, grid: FrequencyGrid) -> float:
    """Beam squint ratio averaged over the finite subcarrier grid.

    Per subcarrier, the direction-averaged squint offset normalized by the
    half beamwidth is |deviation| * aperture / 2 on each axis; the worse axis
    counts.  Converges to the closed form as the subcarrier count grows.
    """
    dev = np.abs(grid.deviations)
    worst = np.maximum(dev * geometry.aperture_h, dev * geometry.aperture_v)
    return float(np.mean(worst) / 2.0)


def optimal_upa_shape(n_total: int) -> tuple[int, int]:
    """Most squint-robust factorization of a total antenna count.

    Minimizes the larger side over all integer factorizations (ties broken
    toward n_h >= n_v), which minimizes the closed-form beam squint ratio at
    equal spacings; exact squares come back as (sqrt, sqrt).
    """
    if n_total < 1:
        raise ValueError("total antenna count must be at least 1")
    best: tuple[int, int] | None = None
    best_key: tuple[int, int] | None = None
    for d in range(1, math.isqrt(n_total) + 1):
        if n_total % d:
            continue
        for pair in ((n_total // d, d), (d, n_total // d)):
            key = (max(pair), 0 if pair[0] >= pair[1] else 1)
            if best_key is None or key < best_key:
                best, best_key = pair, key
    assert best is not None
    return best


def beam_pattern_gain(
    geometry: ArrayGeometry,
    beam_spatial_h: float,
    beam_spatial_v: float,
    spatial_h,
    spatial_v,
    freq_ratio: float,
):
    """Gain of a carrier-matched beam toward arbitrary spatial frequencies.

    The beam points at (beam_spatial_h, beam_spatial_v) at the carrier;
    ``freq_ratio`` is the evaluation frequency over the carrier.  Vectorized
    over ``spatial_h``/``spatial_v`` (broadcasting applies).
    """
    off_h = freq_ratio * np.asarray(spatial_h, dtype=np.float64) - beam_spatial_h
    off_v = freq_ratio * np.asarray(spatial_v, dtype=np.float64) - beam_spatial_v
    gain = np.abs(kernels.dirichlet_values(geometry.n_h, geometry.spacing_h * off_h)) * np.abs(
        kernels.dirichlet_values(geometry.n_v, geometry.spacing_v * off_v)
    )
    if np.isscalar(spatial_h) and np.isscalar(spatial_v):
        return float(gain)
    return gain
