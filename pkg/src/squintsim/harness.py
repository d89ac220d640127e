"""Seeded Monte-Carlo orchestration: configuration, the three sweeps, the
gain-map utility, and CSV output.

Trials are independent work units; when a worker pool is used the rows are
re-sorted by a deterministic key afterwards, so output does not depend on
the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import kernels
from .arrays import ArrayGeometry, FrequencyGrid, bsr_closed_form, optimal_upa_shape
from .beamforming import LinkConfig, hbf_algorithm1, hbf_dcf, optimal_dbf
from .channel import frequency_channel, sample_paths

KNOWN_ALGORITHMS = ("dbf", "dcf", "proposed")

CSV_HEADER = "sweep,value,algorithm,trial,seed,avg_se_bits,r_opt_bits,normalized_se,bsr"


class ConfigError(ValueError):
    """Invalid experiment configuration (rejected before any computation)."""


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def _mix64(value: int) -> int:
    # splitmix64 finalizer: bijective on 64-bit words with full avalanche.
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_trial_seed(master_seed: int, sweep_index: int, trial_index: int) -> int:
    """Deterministic 64-bit seed for one (sweep point, trial) pair.

    Built by chaining a bijective 64-bit mixer, so two triples that differ in
    any component can never collide in the final stage.
    """
    if sweep_index < 0 or trial_index < 0:
        raise ValueError("indices must be nonnegative")
    h = _mix64(master_seed & _MASK64)
    h = _mix64(h ^ (sweep_index & _MASK64))
    return _mix64(h ^ (trial_index & _MASK64))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _parse_shape(text: str) -> tuple[int, int]:
    try:
        h, v = text.lower().split("x")
        return int(h), int(v)
    except ValueError:
        raise ConfigError(f"cannot parse array shape {text!r}; expected like '16x16'") from None


@dataclass
class ExperimentConfig:
    """All knobs of one experiment; desk-scale defaults.

    ``snr_db``/``bandwidth_hz`` are the operating point; the ``*_sweep``
    lists are the axes used by the corresponding sweep commands.
    """

    rx_total: int = 256
    rx_shape: str = "square"          # "square", "ula", or explicit like "16x16"
    rsi_widths: tuple[int, ...] = (1, 2, 4, 8, 16)
    rx_spacing: float = 0.5
    tx_shape: str = "4x4"
    tx_spacing: float = 0.5
    n_streams: int = 4
    n_rf: int = 4
    snr_db: float = 10.0
    snr_sweep_db: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    carrier_hz: float = 300e9
    bandwidth_hz: float = 30e9
    bandwidth_sweep_hz: tuple[float, ...] = (5e9, 15e9, 25e9, 35e9, 45e9)
    n_subcarriers: int = 64
    n_paths: int = 4
    delay_divisor: int = 4            # delay taps = subcarriers / divisor
    rolloff: float = 1.0
    trials: int = 50
    seed: int = 20260810
    algorithms: tuple[str, ...] = ("proposed", "dcf", "dbf")

    def rx_geometry(self, width: int | None = None) -> ArrayGeometry:
        if width is not None:
            if width < 1 or self.rx_total % width:
                raise ConfigError(f"width {width} does not factor the {self.rx_total}-antenna array")
            shape = (width, self.rx_total // width)
        elif self.rx_shape == "square":
            shape = optimal_upa_shape(self.rx_total)
        elif self.rx_shape == "ula":
            shape = (self.rx_total, 1)
        else:
            shape = _parse_shape(self.rx_shape)
            if shape[0] * shape[1] != self.rx_total:
                raise ConfigError(
                    f"explicit shape {self.rx_shape} does not match rx_total={self.rx_total}"
                )
        return ArrayGeometry(*shape, self.rx_spacing, self.rx_spacing)

    def tx_geometry(self) -> ArrayGeometry:
        return ArrayGeometry(*_parse_shape(self.tx_shape), self.tx_spacing, self.tx_spacing)

    def grid(self, bandwidth_hz: float | None = None) -> FrequencyGrid:
        return FrequencyGrid(
            self.carrier_hz,
            self.bandwidth_hz if bandwidth_hz is None else bandwidth_hz,
            self.n_subcarriers,
        )

    @property
    def delay_taps(self) -> int:
        return max(1, self.n_subcarriers // self.delay_divisor)

    def noise_var(self, snr_db: float | None = None) -> float:
        snr = self.snr_db if snr_db is None else snr_db
        return 10.0 ** (-snr / 10.0)

    def validate(self) -> None:
        rx = self.rx_geometry()
        tx = self.tx_geometry()
        if rx.size != self.rx_total:
            raise ConfigError("receive shape does not match the antenna total")
        for width in self.rsi_widths:
            self.rx_geometry(width)
        if self.n_streams < 1 or self.n_streams > self.n_rf:
            raise ConfigError("need 1 <= streams <= RF chains")
        if self.n_rf > min(rx.size, tx.size):
            raise ConfigError("RF chain count cannot exceed min(tx, rx) antennas")
        for b in (self.bandwidth_hz, *self.bandwidth_sweep_hz):
            if not 0.0 < b < self.carrier_hz:
                raise ConfigError("bandwidths must be positive and below the carrier")
        if self.n_subcarriers < 1:
            raise ConfigError("need at least one subcarrier")
        if self.n_paths < 1:
            raise ConfigError("need at least one path")
        if self.delay_divisor < 1:
            raise ConfigError("delay divisor must be at least 1")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ConfigError("rolloff must lie in [0, 1]")
        if self.trials < 1:
            raise ConfigError("need at least one trial")
        if not 0 <= self.seed < (1 << 64):
            raise ConfigError("seed must fit in 64 bits")
        unknown = set(self.algorithms) - set(KNOWN_ALGORITHMS)
        if unknown or not self.algorithms:
            raise ConfigError(f"unknown algorithms {sorted(unknown)}; pick from {KNOWN_ALGORITHMS}")

    def as_paper_scale(self, sweep: str) -> "ExperimentConfig":
        """Full-scale preset: more subcarriers and realizations; the SNR and
        bandwidth sweeps also move to the large square receive array."""
        cfg = replace(self, n_subcarriers=128, trials=1000)
        if sweep in ("snr", "bandwidth", "single"):
            cfg = replace(cfg, rx_total=4096, rx_shape="square")
        return cfg


_BOOL_FIELDS: set[str] = set()
_TUPLE_INT_FIELDS = {"rsi_widths"}
_TUPLE_FLOAT_FIELDS = {"snr_sweep_db", "bandwidth_sweep_hz"}
_TUPLE_STR_FIELDS = {"algorithms"}


def parse_config_file(path: str) -> dict[str, str]:
    """Read a flat key = value config file ('#' starts a comment)."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    return values


def config_from_values(values: dict[str, str]) -> ExperimentConfig:
    """Build a config from string key/value pairs (file contents or overrides)."""
    by_name = {f.name: f for f in fields(ExperimentConfig)}
    kwargs = {}
    for key, text in values.items():
        if key not in by_name:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            if key in _TUPLE_INT_FIELDS:
                kwargs[key] = tuple(int(part) for part in text.split(","))
            elif key in _TUPLE_FLOAT_FIELDS:
                kwargs[key] = tuple(float(part) for part in text.split(","))
            elif key in _TUPLE_STR_FIELDS:
                kwargs[key] = tuple(part.strip() for part in text.split(",") if part.strip())
            elif by_name[key].type == "int":
                kwargs[key] = int(text)
            elif by_name[key].type == "float":
                kwargs[key] = float(text)
            else:
                kwargs[key] = text
        except ValueError:
            raise ConfigError(f"cannot parse value for {key!r}: {text!r}") from None
    return ExperimentConfig(**kwargs)


# ---------------------------------------------------------------------------
# sweep execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    """One (sweep point, algorithm, trial) record."""

    sweep_name: str
    sweep_value: float
    algorithm: str
    trial_index: int
    seed_used: int
    average_se_bits: float
    r_opt_bits: float
    normalized_se: float
    bsr_closed_form: float


@dataclass(frozen=True)
class _SweepPoint:
    sweep_name: str
    sweep_value: float
    sweep_index: int
    rx_geom: ArrayGeometry
    tx_geom: ArrayGeometry
    grid: FrequencyGrid
    link: LinkConfig
    n_paths: int
    delay_taps: int
    rolloff: float
    master_seed: int
    algorithms: tuple[str, ...]
    bsr: float


def _run_trial(point: _SweepPoint, trial: int) -> list[SweepResult]:
    seed = derive_trial_seed(point.master_seed, point.sweep_index, trial)
    rng = np.random.default_rng(seed)
    t_s = point.grid.sample_period_s
    paths = sample_paths(rng, point.n_paths, point.delay_taps, t_s)
    channel = frequency_channel(
        paths, point.rx_geom, point.tx_geom, point.grid, t_s, point.delay_taps, point.rolloff
    )
    r_opt = optimal_dbf(channel, point.link)
    rows = []
    for algo in point.algorithms:
        if algo == "dbf":
            average = r_opt
        elif algo == "proposed":
            _, _, average = hbf_algorithm1(channel, point.link)
        elif algo == "dcf":
            _, average = hbf_dcf(channel, point.link)
        else:  # pragma: no cover - validated upstream
            raise ConfigError(f"unknown algorithm {algo!r}")
        rows.append(
            SweepResult(
                sweep_name=point.sweep_name,
                sweep_value=point.sweep_value,
                algorithm=algo,
                trial_index=trial,
                seed_used=seed,
                average_se_bits=average,
                r_opt_bits=r_opt,
                normalized_se=average / r_opt,
                bsr_closed_form=point.bsr,
            )
        )
    return rows


def _execute(points: list[_SweepPoint], trials: int, threads: int) -> list[SweepResult]:
    tasks = [(point, trial) for point in points for trial in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda args: _run_trial(*args), tasks))
    else:
        chunks = [_run_trial(point, trial) for point, trial in tasks]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.sweep_value, r.algorithm, r.trial_index))
    return rows


def _make_point(
    config: ExperimentConfig,
    sweep_name: str,
    sweep_value: float,
    sweep_index: int,
    rx_geom: ArrayGeometry,
    grid: FrequencyGrid,
    noise_var: float,
) -> _SweepPoint:
    link = LinkConfig(config.n_streams, config.n_rf, noise_var)
    return _SweepPoint(
        sweep_name=sweep_name,
        sweep_value=sweep_value,
        sweep_index=sweep_index,
        rx_geom=rx_geom,
        tx_geom=config.tx_geometry(),
        grid=grid,
        link=link,
        n_paths=config.n_paths,
        delay_taps=config.delay_taps,
        rolloff=config.rolloff,
        master_seed=config.seed,
        algorithms=config.algorithms,
        bsr=bsr_closed_form(rx_geom, grid.fractional_bandwidth),
    )


def run_rsi_sweep(config: ExperimentConfig, threads: int = 1) -> list[SweepResult]:
    """Sweep the receive-array aspect ratio at a fixed antenna total.

    Each configured width gives the shape (width, total/width); the sweep
    value is the width/length ratio (1 for a square, small for a near-ULA).
    """
    config.validate()
    grid = config.grid()
    points = []
    for index, width in enumerate(config.rsi_widths):
        geom = config.rx_geometry(width)
        rsi = min(geom.n_h, geom.n_v) / max(geom.n_h, geom.n_v)
        points.append(
            _make_point(config, "rsi", rsi, index, geom, grid, config.noise_var())
        )
    return _execute(points, config.trials, threads)


def run_snr_sweep(config: ExperimentConfig, threads: int = 1) -> list[SweepResult]:
    """Sweep the operating SNR (dB) at the configured receive shape."""
    config.validate()
    grid = config.grid()
    geom = config.rx_geometry()
    points = [
        _make_point(config, "snr", snr, index, geom, grid, config.noise_var(snr))
        for index, snr in enumerate(config.snr_sweep_db)
    ]
    return _execute(points, config.trials, threads)


def run_bandwidth_sweep(config: ExperimentConfig, threads: int = 1) -> list[SweepResult]:
    """Sweep the bandwidth list at the configured receive shape and spacing."""
    config.validate()
    geom = config.rx_geometry()
    points = [
        _make_point(
            config, "bandwidth", bw, index, geom, config.grid(bw), config.noise_var()
        )
        for index, bw in enumerate(config.bandwidth_sweep_hz)
    ]
    return _execute(points, config.trials, threads)


def run_single(config: ExperimentConfig, threads: int = 1) -> list[SweepResult]:
    """Run the configured operating point (no sweep axis)."""
    config.validate()
    point = _make_point(
        config, "single", config.snr_db, 0, config.rx_geometry(), config.grid(), config.noise_var()
    )
    return _execute([point], config.trials, threads)


# ---------------------------------------------------------------------------
# outputs
# ---------------------------------------------------------------------------

def emit_csv(results: list[SweepResult], path: str) -> None:
    """Write sweep rows as CSV with 12 significant digits, deterministically
    ordered by (sweep value, algorithm, trial)."""
    rows = sorted(results, key=lambda r: (r.sweep_value, r.algorithm, r.trial_index))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(CSV_HEADER + "\n")
            for r in rows:
                handle.write(
                    f"{r.sweep_name},{r.sweep_value:.12g},{r.algorithm},"
                    f"{r.trial_index},{r.seed_used},{r.average_se_bits:.12g},"
                    f"{r.r_opt_bits:.12g},{r.normalized_se:.12g},{r.bsr_closed_form:.12g}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write results to {path!r}: {exc}") from exc


GAIN_MAP_HEADER = "frequency,freq_hz,spatial_h,spatial_v,eff_spatial_h,eff_spatial_v,gain"

_FREQ_LABELS = ("min", "center", "max")


def gain_map_table(
    geometry: ArrayGeometry,
    resolution: int,
    grid: FrequencyGrid,
    frequencies: tuple[str, ...] = _FREQ_LABELS,
    beam_spatial: tuple[float, float] = (0.5, 0.5),
):
    """Tabulate the carrier-matched beam's gain over a uniform direction grid.

    Returns (coords, [(label, freq_hz, gain_matrix), ...]) where the gain
    matrix is indexed [horizontal, vertical] over the physical spatial
    coordinates in ``coords``; at frequencies off the carrier the mainlobe
    drifts away from the beam direction.
    """
    if resolution < 2:
        raise ConfigError("gain-map resolution must be at least 2")
    for label in frequencies:
        if label not in _FREQ_LABELS:
            raise ConfigError(f"unknown frequency label {label!r}; pick from {_FREQ_LABELS}")
    hz = {"min": grid.min_hz, "center": grid.carrier_hz, "max": grid.max_hz}
    coords = np.linspace(-1.0, 1.0, resolution)
    beam_h, beam_v = beam_spatial
    tables = []
    for label in frequencies:
        ratio = hz[label] / grid.carrier_hz
        gains = kernels.pattern_grid(
            geometry.n_h,
            geometry.spacing_h,
            geometry.n_v,
            geometry.spacing_v,
            ratio * coords - beam_h,
            ratio * coords - beam_v,
        )
        tables.append((label, hz[label], gains))
    return coords, tables


def write_gain_map_csv(coords: np.ndarray, tables, carrier_hz: float, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(GAIN_MAP_HEADER + "\n")
            for label, hz, gains in tables:
                ratio = hz / carrier_hz
                for i, sp_h in enumerate(coords):
                    for j, sp_v in enumerate(coords):
                        handle.write(
                            f"{label},{hz:.12g},{sp_h:.12g},{sp_v:.12g},"
                            f"{ratio * sp_h:.12g},{ratio * sp_v:.12g},{gains[i, j]:.12g}\n"
                        )
    except OSError as exc:
        raise OSError(f"cannot write gain map to {path!r}: {exc}") from exc
