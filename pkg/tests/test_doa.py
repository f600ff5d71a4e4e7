import math

import numpy as np
import pytest

from mmgbsm import synthesize
from mmgbsm.channel import TimeGrid
from mmgbsm.doa import (
    ApsResult,
    MusicConfig,
    default_angle_grid,
    music_spectrum,
    sliding_aps,
    steering_matrix,
    window_covariance,
)
from mmgbsm.largescale import LargeScaleTrack
from mmgbsm.channel import TrackSet

from conftest import make_single_cluster_scenario, unit_tracks

WAVELENGTH = 0.11530479153846154
HALF = WAVELENGTH / 2


def window_offsets(size=12):
    # descending offsets, like consecutive elements of a larger array
    return -HALF * np.arange(size, dtype=float)


def unit_steering(angle, size=12):
    kappa = 2 * np.pi / WAVELENGTH
    return np.exp(1j * kappa * window_offsets(size) * math.cos(angle))


def cov_from_signals(signals):
    cov = signals @ signals.conj().T / signals.shape[1]
    return (cov + cov.conj().T) / 2


def test_default_angle_grid():
    grid = default_angle_grid()
    assert grid.size == 719
    assert grid[0] == pytest.approx(np.deg2rad(0.25))
    assert grid[-1] < np.pi


def test_music_config_validation():
    with pytest.raises(ValueError):
        MusicConfig(window_size=1)
    with pytest.raises(ValueError):
        MusicConfig(angle_grid=np.array([0.3, 0.2]))


def test_single_plane_wave_recovery():
    cfg = MusicConfig()
    grid = cfg.angle_grid
    target = np.deg2rad(30.0)
    a = unit_steering(target)
    # a few snapshots with varying complex amplitude
    rng = np.random.default_rng(0)
    amps = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    cov = cov_from_signals(np.outer(a, amps))
    steering = steering_matrix(window_offsets(), grid, WAVELENGTH)
    spectrum = music_spectrum(cov, steering, cfg)
    peak = grid[np.argmax(spectrum)]
    assert abs(peak - target) <= np.deg2rad(0.25) + 1e-12


def test_two_plane_waves_recovery():
    cfg = MusicConfig()
    grid = cfg.angle_grid
    rng = np.random.default_rng(1)
    a1 = unit_steering(np.deg2rad(40.0))
    a2 = unit_steering(np.deg2rad(60.0))
    s1 = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    s2 = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    cov = cov_from_signals(np.outer(a1, s1) + np.outer(a2, s2))
    steering = steering_matrix(window_offsets(), grid, WAVELENGTH)
    spectrum = music_spectrum(cov, steering, cfg)
    # the two local maxima sit on the true angles
    db = 10 * np.log10(spectrum / spectrum.max())
    is_peak = np.r_[False, (db[1:-1] > db[:-2]) & (db[1:-1] > db[2:]), False]
    peaks = grid[is_peak & (db > -30)]
    assert peaks.size == 2
    assert abs(peaks[0] - np.deg2rad(40.0)) <= np.deg2rad(0.25) + 1e-12
    assert abs(peaks[1] - np.deg2rad(60.0)) <= np.deg2rad(0.25) + 1e-12


def test_zero_sources_flat_spectrum():
    cfg = MusicConfig(num_sources=0)
    rng = np.random.default_rng(2)
    signals = rng.standard_normal((12, 64)) + 1j * rng.standard_normal((12, 64))
    cov = cov_from_signals(signals)
    steering = steering_matrix(window_offsets(), cfg.angle_grid, WAVELENGTH)
    spectrum = music_spectrum(cov, steering, cfg)
    db = 10 * np.log10(spectrum / np.median(spectrum))
    assert np.all(db < 3.0)


def test_num_sources_bounds():
    cfg = MusicConfig(num_sources=12)
    cov = np.eye(12, dtype=complex)
    steering = steering_matrix(window_offsets(), cfg.angle_grid, WAVELENGTH)
    with pytest.raises(ValueError, match="below window size"):
        music_spectrum(cov, steering, cfg)


def test_music_invariant_under_scaling_and_phase():
    cfg = MusicConfig()
    rng = np.random.default_rng(3)
    a = unit_steering(np.deg2rad(72.0))
    amps = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    base = np.outer(a, amps)
    steering = steering_matrix(window_offsets(), cfg.angle_grid, WAVELENGTH)
    s1 = music_spectrum(cov_from_signals(base), steering, cfg)
    s2 = music_spectrum(cov_from_signals(5.0 * np.exp(0.7j) * base), steering, cfg)
    assert np.allclose(s1 / s1.max(), s2 / s2.max(), rtol=1e-9)


def test_covariance_properties(full_realization):
    cfg = MusicConfig()
    cov = window_covariance(full_realization, q=1, window_start=17, cfg=cfg)
    assert cov.shape == (12, 12)
    assert np.allclose(cov, cov.conj().T, atol=1e-12)
    eigvals = np.linalg.eigvalsh(cov)
    assert eigvals.min() > -1e-10
    # single-cisoid input: rank one, trace equals the window size
    scenario = make_single_cluster_scenario(range_m=1e9, rays=1)
    r = synthesize(
        scenario,
        grid=TimeGrid(0.0, 1e-3, 64),
        tracks=unit_tracks(scenario),
        rx_antennas=np.array([1]),
    )
    cov1 = window_covariance(r, q=1, window_start=1, cfg=cfg, tap=1)
    assert np.trace(cov1).real == pytest.approx(12.0, rel=1e-9)
    eig = np.linalg.eigvalsh(cov1)
    assert eig[-1] == pytest.approx(12.0, rel=1e-9)
    assert np.all(np.abs(eig[:-1]) < 1e-9)


def test_window_reads_only_window_antennas(full_realization):
    cfg = MusicConfig()
    poisoned = full_realization.gains.copy()
    poisoned[:, :30, :, :] = np.nan
    poisoned[:, 42:, :, :] = np.nan
    import dataclasses

    r = dataclasses.replace(full_realization, gains=poisoned)
    cov = window_covariance(r, q=1, window_start=31, cfg=cfg)
    assert np.all(np.isfinite(cov))
    with pytest.raises(ValueError, match="not covered"):
        window_covariance(r, q=1, window_start=120, cfg=MusicConfig(window_size=12))


def test_covariance_rank_warning():
    scenario = make_single_cluster_scenario(rays=3, asd=0.1, seed=2)
    r = synthesize(
        scenario,
        grid=TimeGrid(0.0, 1e-3, 4),
        tracks=unit_tracks(scenario),
        rx_antennas=np.array([1]),
    )
    with pytest.warns(UserWarning, match="rank deficient"):
        window_covariance(r, q=1, window_start=1, cfg=MusicConfig())


def drift_peaks(range_m, grid_step_deg=0.05):
    scenario = make_single_cluster_scenario(
        range_m=range_m, aod=0.0, aoa=1.0, rays=1
    )
    r = synthesize(
        scenario,
        tracks=unit_tracks(scenario),
        rx_antennas=np.array([1]),
    )
    cfg = MusicConfig(angle_grid=default_angle_grid(grid_step_deg))
    aps = sliding_aps(r, q=1, cfg=cfg, tap=1)
    return aps


def test_far_cluster_peak_is_window_invariant():
    aps = drift_peaks(1e6, grid_step_deg=0.25)
    peaks = aps.peak_angles()
    assert peaks.max() - peaks.min() <= np.deg2rad(0.25) + 1e-12


def test_near_cluster_peak_drifts_linearly():
    aps = drift_peaks(20.0)
    peaks = aps.peak_angles()
    w = np.arange(peaks.size, dtype=float)
    coef = np.polyfit(w, peaks, 1)
    fit = np.polyval(coef, w)
    r2 = 1 - ((peaks - fit) ** 2).sum() / ((peaks - peaks.mean()) ** 2).sum()
    assert r2 > 0.99
    # drift per one-element window shift: spacing * sin(axis angle) / range
    expected = -HALF * math.sin(np.pi / 2) / 20.0
    assert coef[0] == pytest.approx(expected, rel=0.02)


def test_drift_slope_scales_inversely_with_range():
    slopes = {}
    for range_m in (20.0, 50.0):
        peaks = drift_peaks(range_m).peak_angles()
        w = np.arange(peaks.size, dtype=float)
        slopes[range_m] = np.polyfit(w, peaks, 1)[0]
    assert slopes[20.0] / slopes[50.0] == pytest.approx(50.0 / 20.0, rel=0.05)


def test_aps_result_contract(full_realization):
    cfg = MusicConfig(angle_grid=default_angle_grid(1.0))
    aps = sliding_aps(full_realization, q=1, cfg=cfg)
    assert aps.window_positions.size == 117  # 128 elements, window 12, step 1
    assert aps.spectrum_db.max() == pytest.approx(0.0, abs=1e-12)
    assert np.all(aps.spectrum_db <= 0.0)
    assert aps.spectrum_db.shape == (117, cfg.angle_grid.size)
    wide = sliding_aps(full_realization, q=1, cfg=MusicConfig(
        window_size=12, window_step=4, angle_grid=default_angle_grid(1.0)))
    assert wide.window_positions.size == 30


def test_invisible_span_drops_cluster_peak():
    # two clusters, the second forced invisible over a span of elements:
    # its angular neighborhood collapses by tens of dB in windows inside
    # the span
    from mmgbsm.scenario import Scenario
    from dataclasses import replace

    base = make_single_cluster_scenario(range_m=300.0, aod=np.pi / 6, aoa=1.0, rays=1)
    second = replace(
        base.clusters[0],
        index=2,
        placement=replace(base.clusters[0].placement, azimuth_tx=-np.pi / 6),
        ray_aods=np.array([-np.pi / 6]),
        ray_aoas=np.array([-0.4]),
        ray_phases=np.array([1.2]),
        mean_power=0.5,
    )
    first = replace(base.clusters[0], mean_power=0.5)
    scenario = Scenario(config=base.config, los=base.los, clusters=[first, second])

    m = 128
    pi_gap = np.ones(m)
    pi_gap[50:90] = 0.0
    tracks = TrackSet(
        tx_antennas=np.arange(1, m + 1),
        los=LargeScaleTrack(xi=np.ones(m), pi=np.ones(m)),
        clusters=[
            LargeScaleTrack(xi=np.ones(m), pi=np.ones(m)),
            LargeScaleTrack(xi=np.ones(m), pi=pi_gap),
        ],
    )
    r = synthesize(scenario, tracks=tracks, rx_antennas=np.array([1]))
    cfg = MusicConfig()
    aps = sliding_aps(r, q=1, cfg=cfg)
    # angular neighborhood of the second cluster (axis-referenced)
    axis_angle = np.pi / 2 + np.pi / 6
    sel = np.abs(cfg.angle_grid - axis_angle) < np.deg2rad(3.0)
    visible_level = aps.spectrum_db[0, sel].max()  # window fully before the gap
    hidden_level = aps.spectrum_db[55, sel].max()  # window fully inside the gap
    assert hidden_level < visible_level - 20.0
