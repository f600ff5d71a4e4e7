"""Time-varying wideband channel synthesis.

Assembles the per-tap complex gain tensor ``h[q, p, tap, t]`` from a
scenario: the LOS tap is a single constant-modulus cisoid per antenna
pair, each cluster tap sums its rays with planar + parabolic phase terms
and per-ray Doppler, and both are scaled by the per-antenna large-scale
tracks.  Synthesis can be restricted to antenna subsets, which the
Monte-Carlo estimators use heavily; restricted tracks keep the exact
joint law of the full-array processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import ray_sum_series, triple_outer_sum
from .geometry import TWO_PI, doppler_los, doppler_nlos, element_offset
from .largescale import (
    LargeScaleTrack,
    lognormal_track,
    sample_correlated_gaussian_at,
    sample_visibility_at,
)
from .scenario import Cluster, Scenario

DEFAULT_TENSOR_BUDGET = 2 << 30
"""Refuse to allocate gain tensors larger than this many bytes."""


class TensorBudgetError(RuntimeError):
    """Requested gain tensor exceeds the configured memory budget."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid: start (s), step (s), number of samples."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"step must be > 0, got {self.step}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    @property
    def times(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def span(self) -> float:
        return self.step * (self.count - 1)


def default_time_grid(scenario_or_config) -> TimeGrid:
    """256 samples at 8x oversampling of the maximum Doppler; one sample if static."""
    config = getattr(scenario_or_config, "config", scenario_or_config)
    f_max = config.max_doppler
    if f_max <= 0:
        return TimeGrid(start=0.0, step=1.0, count=1)
    return TimeGrid(start=0.0, step=1.0 / (8.0 * f_max), count=256)


@dataclass(frozen=True)
class TrackSet:
    """Large-scale tracks for the LOS path and every cluster.

    ``tx_antennas`` are the 1-based BS element indices the tracks cover
    (ascending); full-array track sets cover ``1..M_t``.
    """

    tx_antennas: np.ndarray
    los: LargeScaleTrack
    clusters: list[LargeScaleTrack] = field(default_factory=list)

    def track_for_tap(self, tap: int) -> LargeScaleTrack:
        return self.los if tap == 0 else self.clusters[tap - 1]


def draw_tracks(
    scenario: Scenario,
    rng: np.random.Generator,
    tx_antennas: np.ndarray | None = None,
) -> TrackSet:
    """Draw the LOS and per-cluster tracks at the given BS elements.

    Consumes the stream in a fixed order (LOS first, then clusters; for
    each path the lognormal track before the visibility track).
    """
    tx_array = scenario.config.tx_array
    if tx_antennas is None:
        tx_antennas = np.arange(1, tx_array.num_elements + 1)
    tx_antennas = np.asarray(tx_antennas, dtype=int)
    positions = element_offset(tx_array, tx_antennas)

    def one(shadow, vis):
        nu = sample_correlated_gaussian_at(positions, shadow.decorr_distance, rng)
        xi = lognormal_track(np.atleast_1d(nu), shadow)
        pi = sample_visibility_at(positions, vis, rng)
        return LargeScaleTrack(xi=xi, pi=np.atleast_1d(pi).astype(float))

    los = one(scenario.los.shadow, scenario.los.visibility)
    clusters = [one(c.shadow, c.visibility) for c in scenario.clusters]
    return TrackSet(tx_antennas=tx_antennas, los=los, clusters=clusters)


@dataclass(frozen=True)
class ChannelRealization:
    """One synthesized channel: gains indexed ``[q, p, tap, t]``.

    Tap 0 is the LOS path, taps ``1..C`` the clusters in delay order.
    ``rx_antennas`` / ``tx_antennas`` map the q/p axes to 1-based global
    element indices.
    """

    gains: np.ndarray
    delays: np.ndarray
    tracks: TrackSet
    grid: TimeGrid
    rx_antennas: np.ndarray
    tx_antennas: np.ndarray
    tx_offsets: np.ndarray
    wavelength: float
    scenario_ref: str

    @property
    def num_taps(self) -> int:
        return self.gains.shape[2]

    def tx_index(self, p: int) -> int:
        hits = np.nonzero(self.tx_antennas == p)[0]
        if hits.size == 0:
            raise ValueError(f"TX antenna {p} not present in this realization")
        return int(hits[0])

    def rx_index(self, q: int) -> int:
        hits = np.nonzero(self.rx_antennas == q)[0]
        if hits.size == 0:
            raise ValueError(f"RX antenna {q} not present in this realization")
        return int(hits[0])

    def tap_series(self, q: int, p: int, tap: int) -> np.ndarray:
        """Gain time series of one tap for a global antenna pair."""
        return self.gains[self.rx_index(q), self.tx_index(p), tap, :]

    def composite(self, q: int) -> np.ndarray:
        """Sum over taps for one RX element: shape (num_tx, num_times)."""
        return self.gains[self.rx_index(q)].sum(axis=1)


def _cluster_phase_factors(scenario: Scenario, cluster: Cluster, tx_off, rx_off):
    """Per-ray complex TX/RX phase factors (planar + parabolic on TX side)."""
    cfg = scenario.config
    kappa = TWO_PI / cfg.wavelength
    rel_t = cluster.ray_aods[:, None] - cfg.tx_array.tilt
    rel_r = cluster.ray_aoas[:, None] - cfg.rx_array.tilt
    tx_phase = kappa * (
        tx_off[None, :] * np.cos(rel_t)
        - tx_off[None, :] ** 2 * np.sin(rel_t) ** 2 / (2.0 * cluster.placement.range_m)
    )
    rx_phase = kappa * rx_off[None, :] * np.cos(rel_r)
    return np.exp(1j * tx_phase), np.exp(1j * rx_phase)


def synthesize_cluster(
    scenario: Scenario,
    cluster: Cluster,
    track: LargeScaleTrack,
    grid: TimeGrid,
    rx_antennas: np.ndarray,
    tx_antennas: np.ndarray,
) -> np.ndarray:
    """Gain tensor (q, p, t) of one cluster tap.

    Sum over rays of ``exp(j*(theta_m + planar + parabolic + 2*pi*f_m*t))``
    scaled by ``sqrt(P_c / M_c) * xi_p * pi_p``.
    """
    cfg = scenario.config
    tx_off = element_offset(cfg.tx_array, tx_antennas)
    rx_off = element_offset(cfg.rx_array, rx_antennas)
    u_tx, v_rx = _cluster_phase_factors(scenario, cluster, tx_off, rx_off)
    dopplers = doppler_nlos(cluster.ray_aoas, cfg.motion, cfg.wavelength)
    w_time = np.exp(
        1j
        * (
            cluster.ray_phases[:, None]
            + TWO_PI * dopplers[:, None] * grid.times[None, :]
        )
    )
    gains = triple_outer_sum(u_tx, v_rx, w_time)
    m_c = len(cluster.ray_aods)
    amp = np.sqrt(cluster.mean_power / m_c) * track.xi * track.pi
    return gains * amp[None, :, None]


def synthesize_los(
    scenario: Scenario,
    track: LargeScaleTrack,
    grid: TimeGrid,
    rx_antennas: np.ndarray,
    tx_antennas: np.ndarray,
) -> np.ndarray:
    """Gain tensor (q, p, t) of the LOS tap: constant modulus in time."""
    cfg = scenario.config
    los = scenario.los.placement
    kappa = TWO_PI / cfg.wavelength
    tx_off = element_offset(cfg.tx_array, tx_antennas)
    rx_off = element_offset(cfg.rx_array, rx_antennas)
    rel_t = los.azimuth_tx - cfg.tx_array.tilt
    tx_phase = kappa * (
        tx_off * np.cos(rel_t) - tx_off**2 * np.sin(rel_t) ** 2 / (2.0 * cfg.d_tr)
    )
    rx_phase = kappa * rx_off * np.cos(los.azimuth_rx - cfg.rx_array.tilt)
    omega = TWO_PI * doppler_los(
        los.azimuth_tx, cfg.tx_array, tx_antennas, cfg.d_tr, cfg.motion, cfg.wavelength
    )
    amp = track.xi * track.pi
    tx_time = (amp * np.exp(1j * tx_phase))[:, None] * np.exp(
        1j * omega[:, None] * grid.times[None, :]
    )
    return np.exp(1j * rx_phase)[:, None, None] * tx_time[None, :, :]


def synthesize(
    scenario: Scenario,
    grid: TimeGrid | None = None,
    tracks: TrackSet | None = None,
    rng: np.random.Generator | None = None,
    rx_antennas: np.ndarray | None = None,
    tx_antennas: np.ndarray | None = None,
    max_bytes: int = DEFAULT_TENSOR_BUDGET,
) -> ChannelRealization:
    """Synthesize a channel realization.

    Either pass pre-drawn ``tracks`` or an ``rng`` to draw them here.  The
    result is deterministic given the scenario and the track draws (ray
    phases live in the scenario).
    """
    cfg = scenario.config
    if grid is None:
        grid = default_time_grid(scenario)
    if rx_antennas is None:
        rx_antennas = np.arange(1, cfg.rx_elements + 1)
    if tx_antennas is None:
        tx_antennas = np.arange(1, cfg.tx_elements + 1)
    rx_antennas = np.asarray(rx_antennas, dtype=int)
    tx_antennas = np.asarray(tx_antennas, dtype=int)

    if tracks is None:
        if rng is None:
            raise ValueError("either tracks or rng must be provided")
        tracks = draw_tracks(scenario, rng, tx_antennas)
    elif not np.array_equal(tracks.tx_antennas, tx_antennas):
        raise ValueError("tracks cover different TX antennas than requested")

    shape = (rx_antennas.size, tx_antennas.size, scenario.num_taps, grid.count)
    nbytes = int(np.prod(shape)) * 16
    if nbytes > max_bytes:
        raise TensorBudgetError(
            f"gain tensor {shape} needs {nbytes} bytes, budget is {max_bytes}"
        )

    gains = np.empty(shape, dtype=np.complex128)
    gains[:, :, 0, :] = synthesize_los(scenario, tracks.los, grid, rx_antennas, tx_antennas)
    for c, cluster in enumerate(scenario.clusters):
        gains[:, :, c + 1, :] = synthesize_cluster(
            scenario, cluster, tracks.clusters[c], grid, rx_antennas, tx_antennas
        )
    return ChannelRealization(
        gains=gains,
        delays=scenario.tap_delays,
        tracks=tracks,
        grid=grid,
        rx_antennas=rx_antennas,
        tx_antennas=tx_antennas,
        tx_offsets=np.atleast_1d(element_offset(cfg.tx_array, tx_antennas)),
        wavelength=cfg.wavelength,
        scenario_ref=scenario.provenance,
    )
