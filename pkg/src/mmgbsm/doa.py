"""MUSIC angle-of-departure power spectrum over a sliding antenna window.

A short window of consecutive BS elements is small enough for a local
plane-wave model even though the global wavefront is parabolic; sliding
the window along the array therefore turns wavefront curvature into a
visible linear drift of the estimated departure angles, and cluster
(dis)appearance into missing peaks.

Grid angles are measured from the BS array axis, on (0, pi), where a
linear array is unambiguous for sources on one side; a source at global
azimuth ``phi`` below the array tilt peaks at ``tilt - phi``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .geometry import TWO_PI

DEFAULT_GRID_STEP_DEG = 0.25


def default_angle_grid(step_deg: float = DEFAULT_GRID_STEP_DEG) -> np.ndarray:
    """Uniform grid on the open interval (0, pi), in radians."""
    step = np.deg2rad(step_deg)
    n = int(np.floor(np.pi / step - 1e-9))
    return step * np.arange(1, n + 1)


@dataclass(frozen=True)
class MusicConfig:
    """Sliding-window MUSIC settings."""

    window_size: int = 12
    window_step: int = 1
    angle_grid: np.ndarray = field(default_factory=default_angle_grid)
    num_sources: int | str = "auto"
    snapshots: int | None = None
    source_threshold: float = 1e-3
    diag_loading: float = 1e-6

    def __post_init__(self):
        if self.window_size < 2:
            raise ValueError(f"window_size must be >= 2, got {self.window_size}")
        if self.window_step < 1:
            raise ValueError(f"window_step must be >= 1, got {self.window_step}")
        grid = np.asarray(self.angle_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("angle_grid must be strictly increasing")
        object.__setattr__(self, "angle_grid", grid)


@dataclass(frozen=True)
class ApsResult:
    """Sliding-window angle power spectrum, dB-normalized to a 0 dB maximum."""

    spectrum_db: np.ndarray
    window_positions: np.ndarray
    angle_grid: np.ndarray
    meta: dict = field(default_factory=dict)

    def peak_angles(self) -> np.ndarray:
        """Grid angle of the global spectrum peak in every window."""
        return self.angle_grid[np.argmax(self.spectrum_db, axis=1)]


def window_covariance(
    realization: ChannelRealization,
    q: int,
    window_start: int,
    cfg: MusicConfig,
    tap: int | None = None,
) -> np.ndarray:
    """Sample covariance of the windowed per-element signal.

    The signal is the composite over taps (or one tap); snapshots are the
    time samples.  Hermitian positive semidefinite by construction; reads
    only the elements inside the window.
    """
    qi = realization.rx_index(q)
    lo = realization.tx_index(window_start)
    window = realization.tx_antennas[lo : lo + cfg.window_size]
    if window.size < cfg.window_size or window[-1] != window_start + cfg.window_size - 1:
        raise ValueError(
            f"window of {cfg.window_size} contiguous elements starting at "
            f"{window_start} is not covered by this realization"
        )
    block = realization.gains[qi, lo : lo + cfg.window_size]
    signal = block.sum(axis=1) if tap is None else block[:, tap, :]
    n_snap = signal.shape[1] if cfg.snapshots is None else min(cfg.snapshots, signal.shape[1])
    if n_snap < cfg.window_size:
        warnings.warn(
            f"{n_snap} snapshots for a {cfg.window_size}-element window: "
            "covariance is rank deficient",
            stacklevel=2,
        )
    x = signal[:, :n_snap]
    cov = x @ x.conj().T / n_snap
    return (cov + cov.conj().T) / 2.0


def steering_matrix(offsets, angle_grid, wavelength: float) -> np.ndarray:
    """Plane-wave steering vectors on the window aperture.

    ``a[k, i] = exp(j * kappa * offsets[i] * cos(angle_grid[k]))`` with the
    signed element offsets of the window elements, so grid angles share
    the orientation of the synthesized phases.
    """
    kappa = TWO_PI / wavelength
    offsets = np.asarray(offsets, dtype=float)
    return np.exp(1j * kappa * np.cos(angle_grid)[:, None] * offsets[None, :])


def music_spectrum(cov: np.ndarray, steering: np.ndarray, cfg: MusicConfig) -> np.ndarray:
    """Noise-subspace spectrum ``1 / ||E_n^H a(theta)||^2`` on the angle grid.

    The source count is either fixed or, in auto mode, the number of
    eigenvalues above ``source_threshold`` times the largest (capped one
    below the window size so a noise subspace always remains).
    """
    size = cov.shape[0]
    if cov.shape != (size, size):
        raise ValueError(f"covariance must be square, got {cov.shape}")
    if steering.shape[1] != size:
        raise ValueError("steering matrix width must match the window size")
    loaded = cov + cfg.diag_loading * max(np.trace(cov).real, 1.0) / size * np.eye(size)
    eigvals, eigvecs = np.linalg.eigh(loaded)
    if cfg.num_sources == "auto":
        num_sources = int(np.sum(eigvals > cfg.source_threshold * eigvals[-1]))
        num_sources = min(num_sources, size - 1)
    else:
        num_sources = int(cfg.num_sources)
        if num_sources >= size:
            raise ValueError(
                f"num_sources {num_sources} must be below window size {size}"
            )
    noise = eigvecs[:, : size - num_sources]
    proj = steering.conj() @ noise
    denom = np.einsum("ki,ki->k", proj, proj.conj()).real
    return 1.0 / np.maximum(denom, np.finfo(float).tiny)


def sliding_aps(
    realization: ChannelRealization,
    q: int = 1,
    cfg: MusicConfig | None = None,
    tap: int | None = None,
) -> ApsResult:
    """MUSIC spectrum at every window position, globally normalized to 0 dB."""
    if cfg is None:
        cfg = MusicConfig()
    tx = realization.tx_antennas
    if cfg.window_size > tx.size:
        raise ValueError(
            f"window_size {cfg.window_size} exceeds {tx.size} synthesized elements"
        )
    starts = np.arange(int(tx[0]), int(tx[-1]) - cfg.window_size + 2, cfg.window_step)
    spectra = np.empty((starts.size, cfg.angle_grid.size))
    for i, start in enumerate(starts):
        cov = window_covariance(realization, q, int(start), cfg, tap=tap)
        lo = realization.tx_index(int(start))
        steering = steering_matrix(
            realization.tx_offsets[lo : lo + cfg.window_size],
            cfg.angle_grid,
            realization.wavelength,
        )
        spectra[i] = music_spectrum(cov, steering, cfg)
    spectrum_db = 10.0 * np.log10(spectra / spectra.max())
    return ApsResult(
        spectrum_db=spectrum_db,
        window_positions=starts,
        angle_grid=cfg.angle_grid,
        meta={
            "q": q,
            "tap": "composite" if tap is None else tap,
            "window_size": cfg.window_size,
            "window_step": cfg.window_step,
            "snapshots": cfg.snapshots or realization.grid.count,
        },
    )
