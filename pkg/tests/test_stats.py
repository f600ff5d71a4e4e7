import math

import numpy as np
import pytest

from mmgbsm import ScenarioConfig, build_scenario
from mmgbsm.channel import TimeGrid, default_time_grid
from mmgbsm.largescale import VisibilityParams
from mmgbsm.stats import (
    ComplexEstimates,
    StatSeries,
    acf_analytic,
    acf_empirical,
    acf_monte_carlo,
    ccf_analytic,
    ccf_curve_analytic,
    ccf_empirical,
    ccf_monte_carlo,
    ensemble_realizations,
    k_factor_track,
    kahan_sum,
    override_shadow_sigma,
    power_track,
    second_moment_monte_carlo,
    tap_mean_power,
    wrapped_gaussian_quadrature,
)

from conftest import make_single_cluster_scenario, unit_tracks


def test_stat_series_validation():
    with pytest.raises(ValueError):
        StatSeries(axis="x", grid=np.arange(3), values=np.arange(2))


def test_kahan_sum_matches_fsum():
    rng = np.random.default_rng(0)
    chunks = [rng.uniform(-1, 1, 4) * 10.0**k for k in range(-8, 9)]
    ours = kahan_sum(chunks)
    exact = np.array([math.fsum(c[i] for c in chunks) for i in range(4)])
    assert np.allclose(ours, exact, rtol=1e-15)


def test_wrapped_gaussian_quadrature_moments():
    offsets, weights = wrapped_gaussian_quadrature(0.0)
    assert offsets.tolist() == [0.0] and weights.tolist() == [1.0]
    for std in (0.1, np.pi / 12, np.pi / 3, 1.5):
        offsets, weights = wrapped_gaussian_quadrature(std)
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)
        # characteristic function of a wrapped normal at integer argument
        assert weights @ np.cos(offsets) == pytest.approx(
            math.exp(-(std**2) / 2.0), abs=1e-6
        )
        assert weights @ np.sin(offsets) == pytest.approx(0.0, abs=1e-12)


def test_acf_analytic_zero_lag(default_scenario):
    for tap in (0, 1, 20):
        series = acf_analytic(default_scenario, p=3, q=1, lags=[0.0], tap=tap)
        value = series.values[0]
        assert value.imag == pytest.approx(0.0, abs=1e-12)
        assert value.real > 0
        assert value.real == pytest.approx(tap_mean_power(default_scenario, tap))


def test_acf_analytic_static_channel():
    scenario = make_single_cluster_scenario(rays=8, asd=0.2, speed=0.0)
    lags = np.linspace(0, 1, 5)
    series = acf_analytic(scenario, p=1, q=1, lags=lags, tap=1)
    assert np.allclose(series.values, series.values[0])


def test_acf_analytic_single_far_ray_is_cisoid():
    scenario = make_single_cluster_scenario(range_m=1e6, rays=1, asd=0.0)
    lags = np.linspace(0, 0.05, 9)
    series = acf_analytic(scenario, p=1, q=1, lags=lags, tap=1)
    expected = tap_mean_power(scenario, 1)
    assert np.allclose(np.abs(series.values), expected, rtol=1e-12)


def test_acf_hermitian_symmetry(default_scenario):
    grid = default_time_grid(default_scenario)
    lags = grid.step * np.arange(-6, 7)
    ana = acf_analytic(default_scenario, p=2, q=1, lags=lags, tap=1)
    assert np.allclose(ana.values, np.conj(ana.values[::-1]), rtol=1e-12)
    reals = list(
        ensemble_realizations(
            default_scenario, 4, seed=50, grid=grid,
            rx_antennas=np.array([1]), tx_antennas=np.array([2]),
        )
    )
    emp = acf_empirical(reals, p=2, q=1, tap=1, lags=lags)
    assert np.allclose(emp.values, np.conj(emp.values[::-1]), rtol=1e-12)


def test_acf_monte_carlo_matches_analytic(default_scenario):
    grid = default_time_grid(default_scenario)
    lags = grid.step * np.array([0, 3, 8, 15])
    for tap in (0, 1, 20):
        ana = acf_analytic(default_scenario, p=5, q=2, lags=lags, tap=tap)
        mc = acf_monte_carlo(
            default_scenario, p=5, q=2, lags=lags, tap=tap,
            runs=2500, seed=31, grid=grid,
        )
        diff = np.abs(mc.values - ana.values)
        combined = np.hypot(mc.stderr.real, mc.stderr.imag)
        assert np.all(diff <= 3.5 * np.maximum(combined, 1e-12))


def test_acf_monte_carlo_jobs_deterministic(default_scenario):
    grid = default_time_grid(default_scenario)
    lags = grid.step * np.array([0, 5])
    serial = acf_monte_carlo(
        default_scenario, 1, 1, lags, tap=1, runs=600, seed=9, grid=grid, jobs=1
    )
    parallel = acf_monte_carlo(
        default_scenario, 1, 1, lags, tap=1, runs=600, seed=9, grid=grid, jobs=2
    )
    assert np.array_equal(serial.values, parallel.values)
    assert np.array_equal(serial.stderr, parallel.stderr)


def test_acf_monte_carlo_validation(default_scenario):
    grid = default_time_grid(default_scenario)
    with pytest.raises(ValueError, match="multiple"):
        acf_monte_carlo(default_scenario, 1, 1, [grid.step / 3], runs=10, seed=0, grid=grid)
    with pytest.raises(ValueError, match="at least 2"):
        acf_monte_carlo(default_scenario, 1, 1, [0.0], runs=1, seed=0, grid=grid)


def test_second_moment_monte_carlo(default_scenario):
    mean, se = second_moment_monte_carlo(default_scenario, p=1, q=1, tap=1, runs=2000, seed=3)
    assert abs(mean - tap_mean_power(default_scenario, 1)) < 3.5 * se


def test_ccf_zero_separation_equals_zero_lag_acf(default_scenario):
    for tap in (0, 1, 20):
        ccf = ccf_analytic(default_scenario, 4, 4, 2, 2, t=0.0, tap=tap)
        acf0 = acf_analytic(default_scenario, p=4, q=2, lags=[0.0], tap=tap).values[0]
        assert ccf == pytest.approx(acf0, rel=1e-12)
        assert ccf.imag == pytest.approx(0.0, abs=1e-12)


def test_ccf_los_time_phase_rotation(default_scenario):
    from mmgbsm.stats import _los_doppler

    p, p2 = 1, 64
    t = 0.1
    base = ccf_analytic(default_scenario, p, p2, 1, 1, t=0.0, tap=0)
    later = ccf_analytic(default_scenario, p, p2, 1, 1, t=t, tap=0)
    expected = 2 * np.pi * t * (
        _los_doppler(default_scenario, p) - _los_doppler(default_scenario, p2)
    )
    measured = np.angle(later / base)
    assert measured == pytest.approx(
        (expected + np.pi) % (2 * np.pi) - np.pi, abs=1e-12
    )
    # cluster taps carry no absolute-time dependence
    assert ccf_analytic(default_scenario, p, p2, 1, 1, t=0.0, tap=1) == pytest.approx(
        ccf_analytic(default_scenario, p, p2, 1, 1, t=0.7, tap=1), rel=1e-12
    )


def test_ccf_monte_carlo_matches_analytic(default_scenario):
    pairs = [(1, 11, 1, 1), (64, 74, 1, 1), (1, 11, 1, 2)]
    for tap in (0, 1):
        est = ccf_monte_carlo(default_scenario, pairs, t=0.0, tap=tap, runs=3000, seed=8)
        for k, pair in enumerate(pairs):
            ana = ccf_analytic(default_scenario, *pair, t=0.0, tap=tap)
            diff = abs(est.values[k] - ana)
            se = est.se_components()[k]
            combined = max(math.hypot(se.real, se.imag), 1e-12)
            assert diff <= 3.5 * combined, (tap, pair, diff / combined)


def test_ccf_empirical_consistency(default_scenario):
    grid = TimeGrid(0.0, 1e-3, 2)
    reals = list(
        ensemble_realizations(
            default_scenario, 400, seed=77, grid=grid,
            rx_antennas=np.array([1]), tx_antennas=np.array([1, 11]),
        )
    )
    mean, se = ccf_empirical(reals, 1, 11, 1, 1, tap=1, t=0.0)
    ana = ccf_analytic(default_scenario, 1, 11, 1, 1, t=0.0, tap=1)
    assert abs(mean - ana) <= 3.5 * math.hypot(se.real, se.imag)
    with pytest.raises(ValueError, match="at least 2"):
        ccf_empirical(reals[:1], 1, 11, 1, 1, tap=1, t=0.0)
    with pytest.raises(ValueError, match="not on the realization grid"):
        ccf_empirical(reals, 1, 11, 1, 1, tap=1, t=0.0005)


def test_acf_empirical_consistency(default_scenario):
    grid = default_time_grid(default_scenario)
    lags = grid.step * np.array([0, 4])
    reals = list(
        ensemble_realizations(
            default_scenario, 400, seed=21, grid=grid,
            rx_antennas=np.array([1]), tx_antennas=np.array([3]),
        )
    )
    emp = acf_empirical(reals, p=3, q=1, tap=1, lags=lags)
    ana = acf_analytic(default_scenario, p=3, q=1, lags=lags, tap=1)
    diff = np.abs(emp.values - ana.values)
    combined = np.hypot(emp.stderr.real, emp.stderr.imag)
    assert np.all(diff <= 3.5 * combined)


def test_spatial_nonstationarity_analytic_witness():
    # near cluster: correlation curves depend on the anchor antenna;
    # far cluster: they collapse onto one curve.  The cluster sits off
    # broadside: exactly broadside the curvature term is stationary to
    # first order in the ray offsets and the anchor effect degenerates.
    near = make_single_cluster_scenario(range_m=20.0, aod=np.pi / 4, aoa=1.0,
                                        rays=20, asd=np.pi / 12)
    far = make_single_cluster_scenario(range_m=1e6, aod=np.pi / 4, aoa=1.0,
                                       rays=20, asd=np.pi / 12)
    spacings = np.arange(1, 21)
    near_1 = np.abs(ccf_curve_analytic(near, 1, spacings, tap=1))
    near_64 = np.abs(ccf_curve_analytic(near, 64, spacings, tap=1))
    far_1 = np.abs(ccf_curve_analytic(far, 1, spacings, tap=1))
    far_64 = np.abs(ccf_curve_analytic(far, 64, spacings, tap=1))
    assert np.max(np.abs(near_1 - near_64)) > 0.05
    assert np.allclose(far_1, far_64, atol=1e-5)


def test_power_and_k_factor_track_examples(default_scenario):
    tracks = unit_tracks(default_scenario)
    power = power_track(default_scenario, tracks)
    assert np.allclose(power.values, 2.0)  # LOS unit power + unit cluster sum
    k = k_factor_track(default_scenario, tracks)
    assert np.allclose(k.values, 1.0)

    # all clusters invisible: LOS-only power, infinite K
    invisible = unit_tracks(default_scenario)
    for track in invisible.clusters:
        track.pi[:] = 0.0
    power = power_track(default_scenario, invisible)
    assert np.allclose(power.values, 1.0)
    k = k_factor_track(default_scenario, invisible)
    assert np.all(np.isinf(k.values))

    # no LOS: K is zero even where clusters are also invisible
    dark = unit_tracks(default_scenario)
    dark.los.pi[:] = 0.0
    for track in dark.clusters:
        track.pi[:] = 0.0
    k = k_factor_track(default_scenario, dark)
    assert np.all(k.values == 0.0)


def test_track_statistics_cluster_permutation_invariant(default_scenario):
    rng = np.random.default_rng(5)
    from mmgbsm.channel import draw_tracks

    tracks = draw_tracks(default_scenario, rng)
    power = power_track(default_scenario, tracks).values
    k = k_factor_track(default_scenario, tracks).values

    order = rng.permutation(len(default_scenario.clusters))
    from mmgbsm.channel import TrackSet
    from mmgbsm.scenario import Scenario

    shuffled = Scenario(
        config=default_scenario.config,
        los=default_scenario.los,
        clusters=[default_scenario.clusters[i] for i in order],
    )
    shuffled_tracks = TrackSet(
        tx_antennas=tracks.tx_antennas,
        los=tracks.los,
        clusters=[tracks.clusters[i] for i in order],
    )
    assert np.allclose(power, power_track(shuffled, shuffled_tracks).values)
    assert np.allclose(k, k_factor_track(shuffled, shuffled_tracks).values)


def test_power_dynamic_range_grows_with_shadow_spread(default_scenario):
    from mmgbsm.channel import draw_tracks

    medians = []
    for sigma_db in (2.0, 4.0, 8.0):
        scenario = override_shadow_sigma(default_scenario, sigma_db)
        ranges = []
        for draw in range(30):
            rng = np.random.default_rng(np.random.SeedSequence((14, draw)))
            tracks = draw_tracks(scenario, rng)
            power_db = 10 * np.log10(power_track(scenario, tracks).values)
            ranges.append(power_db.max() - power_db.min())
        medians.append(np.median(ranges))
    assert medians[0] < medians[1] < medians[2]


def test_complex_estimates_helpers():
    est = ComplexEstimates(
        values=np.array([3.0 + 4.0j]),
        cov=np.array([[[0.04, 0.0], [0.0, 0.01]]]),
        runs=100,
    )
    assert est.se_components()[0] == pytest.approx(0.2 + 0.1j)
    # radial unit vector is (0.6, 0.8)
    expected = math.sqrt(0.36 * 0.04 + 0.64 * 0.01)
    assert est.se_abs()[0] == pytest.approx(expected)
    assert est.se_phase()[0] > 0
