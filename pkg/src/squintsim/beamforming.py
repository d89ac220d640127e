"""Spectral efficiency and beamformer design for hybrid-combining links.

The receive side cascades a frequency-flat constant-modulus analog combiner
with per-subcarrier digital combiners; the transmit side uses per-subcarrier
water-filled digital precoders.  All design operations are pure functions of
the channel realization and link configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class LinkConfig:
    """Stream/RF-chain counts and the power and noise levels of one link."""

    n_streams: int
    n_rf: int
    noise_var: float
    power_per_subcarrier: float = 1.0

    def __post_init__(self):
        if self.n_streams < 1:
            raise ValueError("need at least one stream")
        if self.n_streams > self.n_rf:
            raise ValueError("stream count cannot exceed the RF chain count")
        if self.noise_var <= 0.0 or self.power_per_subcarrier <= 0.0:
            raise ValueError("noise variance and power budget must be positive")

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.power_per_subcarrier / self.noise_var)


@dataclass(frozen=True)
class BeamformerSet:
    """One link design: per-subcarrier precoders and digital combiners plus
    the shared frequency-flat analog combiner."""

    precoders: np.ndarray            # (K, n_tx, n_streams)
    analog_combiner: np.ndarray      # (n_rx, n_rf)
    digital_combiners: np.ndarray    # (K, n_rf, n_streams)


def spectral_efficiency(channel_matrix, precoder, combiner, noise_var: float) -> float:
    """Achievable rate in bits/s/Hz of one subcarrier for a given design.

    log2 det(I + W^+ H F F^H H^H W / noise_var) with W^+ the pseudo-inverse
    of the composite receive matrix; the combiner must have full column rank.
    """
    h = np.asarray(channel_matrix)
    f = np.asarray(precoder)
    w = np.asarray(combiner)
    if w.shape[0] != h.shape[0] or f.shape[0] != h.shape[1]:
        raise ValueError("combiner/precoder dimensions do not match the channel")
    sv = np.linalg.svd(w, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] / sv[-1] > _COND_LIMIT:
        raise ValueError("combiner is rank deficient")
    gram = w.conj().T @ w
    cross = w.conj().T @ (h @ f)
    shifted = gram + (cross @ cross.conj().T) / noise_var
    _, logdet_shifted = np.linalg.slogdet(shifted)
    _, logdet_gram = np.linalg.slogdet(gram)
    return max((logdet_shifted - logdet_gram) / np.log(2.0), 0.0)


def waterfill(gains, budget: float, noise_var: float) -> np.ndarray:
    """Water-filling power allocation over parallel streams.

    Each power is max(level - noise_var/gain, 0) with the level chosen so the
    powers sum exactly to the budget; zero-gain streams get zero power.
    Solved by the exact active-set method (sort, close streams one at a
    time), so there is no tolerance parameter.
    """
    lam = np.atleast_1d(np.asarray(gains, dtype=np.float64))
    if budget <= 0.0:
        raise ValueError("power budget must be positive")
    if not np.any(lam > 0.0):
        raise ValueError("no usable stream: all gains are zero")
    order = np.argsort(-lam, kind="stable")
    lam_sorted = lam[order]
    n_pos = int(np.count_nonzero(lam_sorted > 0.0))
    floor = np.zeros_like(lam_sorted)
    floor[:n_pos] = noise_var / lam_sorted[:n_pos]
    powers_sorted = np.zeros_like(lam_sorted)
    for active in range(n_pos, 0, -1):
        level = (budget + floor[:active].sum()) / active
        if level - floor[active - 1] >= 0.0:
            powers_sorted[:active] = level - floor[:active]
            break
    powers = np.empty_like(powers_sorted)
    powers[order] = powers_sorted
    return powers


def design_precoder(h_eff, link: LinkConfig) -> np.ndarray:
    """Water-filled eigenmode precoder for an effective channel.

    Columns are the dominant right-singular vectors of ``h_eff`` scaled by
    the square roots of the water-filled powers; the Frobenius norm squared
    equals the per-subcarrier budget.
    """
    h_eff = np.asarray(h_eff)
    _, sv, vh = np.linalg.svd(h_eff, full_matrices=False)
    ns = link.n_streams
    if sv.size < ns:
        raise ValueError("effective channel is too small for the stream count")
    powers = waterfill(sv[:ns] ** 2, link.power_per_subcarrier, link.noise_var)
    return vh[:ns].conj().T * np.sqrt(powers)


def mmse_combiner(analog, channel_matrix, precoder, noise_var: float) -> np.ndarray:
    """MMSE digital combiner behind a fixed analog combiner."""
    analog = np.asarray(analog)
    j = analog.conj().T @ (np.asarray(channel_matrix) @ np.asarray(precoder))
    gram = analog.conj().T @ analog
    system = j @ j.conj().T + noise_var * gram
    if np.linalg.cond(system) > _COND_LIMIT:
        raise ValueError("combiner system matrix is singular")
    return np.linalg.solve(system, j)


def analog_combiner(
    channels: ChannelRealization,
    precoders: np.ndarray,
    n_rf: int,
    *,
    subcarrier_indices=None,
) -> np.ndarray:
    """Constant-modulus analog combiner from the averaged dominant subspaces.

    Per subcarrier the dominant left-singular subspace of H F is extracted;
    the rank-one sums of those bases are averaged over the requested
    subcarriers (all by default) and the top eigenvectors of the average are
    projected entrywise onto the constant-modulus feasible set.

    The eigenvectors are computed from the singular decomposition of the
    horizontal stack of the subspace bases rather than by forming the
    n_rx x n_rx average explicitly; both give the same eigenvectors.
    """
    h = channels.matrices
    k_total, n_rx, _ = h.shape
    if n_rf > n_rx:
        raise ValueError("RF chain count cannot exceed the receive antenna count")
    if subcarrier_indices is None:
        subcarrier_indices = range(1, k_total + 1)
    blocks = []
    for k in subcarrier_indices:
        u, _, _ = np.linalg.svd(h[k - 1] @ precoders[k - 1], full_matrices=False)
        blocks.append(u)
    stack = np.concatenate(blocks, axis=1) / np.sqrt(len(blocks))
    u_avg, _, _ = np.linalg.svd(stack, full_matrices=n_rf > stack.shape[1])
    top = u_avg[:, :n_rf]
    return np.exp(1j * np.angle(top)) / np.sqrt(n_rx)


def _active_streams(precoder: np.ndarray) -> np.ndarray:
    # Streams closed by water-filling have exactly-zero precoder columns.
    return np.linalg.norm(precoder, axis=0) > 0.0


def _hbf_pipeline(channels: ChannelRealization, link: LinkConfig, subcarrier_indices):
    h = channels.matrices
    k_total, _, n_tx = h.shape
    ns = link.n_streams
    precoders = np.empty((k_total, n_tx, ns), dtype=np.complex128)
    for k in range(k_total):
        u, _, _ = np.linalg.svd(h[k], full_matrices=False)
        w_init = u[:, :ns]
        h_eff = w_init @ (w_init.conj().T @ h[k])
        precoders[k] = design_precoder(h_eff, link)
    w_rf = analog_combiner(channels, precoders, link.n_rf, subcarrier_indices=subcarrier_indices)
    digital = np.empty((k_total, link.n_rf, ns), dtype=np.complex128)
    rates = np.empty(k_total)
    for k in range(k_total):
        digital[k] = mmse_combiner(w_rf, h[k], precoders[k], link.noise_var)
        composite = w_rf @ digital[k]
        active = _active_streams(precoders[k])
        rates[k] = spectral_efficiency(
            h[k], precoders[k][:, active], composite[:, active], link.noise_var
        )
    design = BeamformerSet(precoders, w_rf, digital)
    return design, rates, float(rates.mean())


def hbf_algorithm1(channels: ChannelRealization, link: LinkConfig):
    """Full hybrid beamforming design averaging subspaces over all subcarriers.

    Pipeline: per-subcarrier optimal-combiner initialization, water-filled
    precoders on the projected channels, the averaged-subspace analog
    combiner, then MMSE digital combiners.  Returns the beamformer set, the
    per-subcarrier rates, and their average.
    """
    return _hbf_pipeline(channels, link, None)


def hbf_dcf(channels: ChannelRealization, link: LinkConfig):
    """Baseline design that builds the analog combiner from the central
    subcarrier only; otherwise identical to the full pipeline.  Returns the
    beamformer set and the average rate."""
    central = channels.grid.central_index
    design, _, average = _hbf_pipeline(channels, link, [central])
    return design, average


def optimal_dbf(channels: ChannelRealization, link: LinkConfig) -> float:
    """Average rate of unconstrained digital beamforming (the upper bound).

    Per subcarrier: eigenmode transmission with water-filling over the top
    singular values of the channel.
    """
    total = 0.0
    for hk in channels.matrices:
        sv = np.linalg.svd(hk, compute_uv=False)
        lam = sv[: link.n_streams] ** 2
        powers = waterfill(lam, link.power_per_subcarrier, link.noise_var)
        total += float(np.sum(np.log2(1.0 + lam * powers / link.noise_var)))
    return total / channels.matrices.shape[0]
