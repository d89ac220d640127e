"""Wideband MIMO-OFDM link simulation for large planar arrays: beam-squint
metrics, channel generation, and hybrid beamforming designs."""

from .arrays import (
    ArrayGeometry,
    Direction,
    FrequencyGrid,
    array_gain_closed_form,
    beam_pattern_gain,
    bsr_closed_form,
    bsr_numerical,
    dirichlet_kernel,
    normalized_array_gain,
    optimal_upa_shape,
    steering_vector,
)
from .beamforming import (
    BeamformerSet,
    LinkConfig,
    analog_combiner,
    design_precoder,
    hbf_algorithm1,
    hbf_dcf,
    mmse_combiner,
    optimal_dbf,
    spectral_efficiency,
    waterfill,
)
from .channel import (
    ChannelRealization,
    PathSet,
    delay_tap_matrix,
    dump_channel,
    frequency_channel,
    raised_cosine,
    sample_paths,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    SweepResult,
    derive_trial_seed,
    emit_csv,
    gain_map_table,
    run_bandwidth_sweep,
    run_rsi_sweep,
    run_single,
    run_snr_sweep,
)
from .kernels import active_backend, set_backend

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "Direction",
    "FrequencyGrid",
    "array_gain_closed_form",
    "beam_pattern_gain",
    "bsr_closed_form",
    "bsr_numerical",
    "dirichlet_kernel",
    "normalized_array_gain",
    "optimal_upa_shape",
    "steering_vector",
    "BeamformerSet",
    "LinkConfig",
    "analog_combiner",
    "design_precoder",
    "hbf_algorithm1",
    "hbf_dcf",
    "mmse_combiner",
    "optimal_dbf",
    "spectral_efficiency",
    "waterfill",
    "ChannelRealization",
    "PathSet",
    "delay_tap_matrix",
    "dump_channel",
    "frequency_channel",
    "raised_cosine",
    "sample_paths",
    "ConfigError",
    "ExperimentConfig",
    "SweepResult",
    "derive_trial_seed",
    "emit_csv",
    "gain_map_table",
    "run_bandwidth_sweep",
    "run_rsi_sweep",
    "run_single",
    "run_snr_sweep",
    "active_backend",
    "set_backend",
]
