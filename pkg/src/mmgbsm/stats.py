"""Analytical statistics and Monte-Carlo estimators.

Time autocorrelation, spatial cross-correlation, per-antenna total power
and Rician K-factor.  Analytical forms are exact expectations of the
synthesized channel: large-scale moments in closed form, ray-angle
expectations by deterministic quadrature over the wrapped-Gaussian offset
law.  Monte-Carlo estimators redraw all per-realization randomness (ray
angles, ray phases, lognormal and visibility tracks) and report standard
errors; they restrict synthesis to the antennas actually probed, which
leaves the joint law untouched.

Tap convention everywhere: tap 0 is the LOS path, taps 1..C the clusters.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import ray_sum_series
from .geometry import TWO_PI, doppler_los, element_offset
from .largescale import (
    lognormal_acf,
    lognormal_mean_square,
    markov_pair_moment,
    markov_transition,
    sample_correlated_gaussian_at,
)
from .scenario import Scenario, draw_rays

DEFAULT_CHUNK = 500

_QUAD_POINTS = 1024
_QUAD_WRAPS = 8


@dataclass(frozen=True)
class StatSeries:
    """A labeled 1D statistic: grid, values, optional standard errors.

    ``stderr`` for complex-valued series packs the per-component standard
    errors as ``se_re + 1j*se_im``.  ``meta`` records estimator type and
    sample counts.
    """

    axis: str
    grid: np.ndarray
    values: np.ndarray
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if self.stderr is not None and len(self.stderr) != len(self.values):
            raise ValueError("stderr length must match values")


@dataclass(frozen=True)
class ComplexEstimates:
    """Monte-Carlo estimates of complex means with component covariance.

    ``cov[k]`` is the 2x2 covariance of (Re, Im) of the k-th *mean*.
    """

    values: np.ndarray
    cov: np.ndarray
    runs: int

    def se_components(self) -> np.ndarray:
        """Standard errors of (Re, Im), packed as ``se_re + 1j*se_im``."""
        return np.sqrt(self.cov[:, 0, 0]) + 1j * np.sqrt(self.cov[:, 1, 1])

    def se_abs(self) -> np.ndarray:
        """Delta-method standard error of ``|mean|``."""
        theta = np.angle(self.values)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        var = np.einsum("ki,kij,kj->k", u, self.cov, u)
        return np.sqrt(np.maximum(var, 0.0))

    def se_phase(self) -> np.ndarray:
        """Delta-method standard error of ``angle(mean)``."""
        theta = np.angle(self.values)
        v = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
        var = np.einsum("ki,kij,kj->k", v, self.cov, v)
        return np.sqrt(np.maximum(var, 0.0)) / np.abs(self.values)


def kahan_sum(chunks) -> np.ndarray:
    """Compensated elementwise sum of equally shaped arrays, in given order."""
    it = iter(chunks)
    total = np.array(next(it), dtype=float, copy=True)
    comp = np.zeros_like(total)
    for arr in it:
        y = np.asarray(arr, dtype=float) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def wrapped_gaussian_quadrature(std: float, n: int = _QUAD_POINTS):
    """Midpoint rule for the wrapped-Gaussian offset law on (-pi, pi].

    Returns offsets and weights summing to one; a point mass at zero when
    the spread is zero.
    """
    if std < 0:
        raise ValueError(f"std must be >= 0, got {std}")
    if std == 0.0:
        return np.zeros(1), np.ones(1)
    step = TWO_PI / n
    offsets = -np.pi + (np.arange(n) + 0.5) * step
    wraps = np.arange(-_QUAD_WRAPS, _QUAD_WRAPS + 1)
    dens = np.exp(
        -0.5 * ((offsets[:, None] + TWO_PI * wraps[None, :]) / std) ** 2
    ).sum(axis=1)
    weights = dens / dens.sum()
    return offsets, weights


# ---------------------------------------------------------------------------
# per-tap parameter access


def _tap_params(scenario: Scenario, tap: int):
    if tap == 0:
        los = scenario.los
        return los.shadow, los.visibility, 1.0
    cluster = scenario.clusters[tap - 1]
    return cluster.shadow, cluster.visibility, cluster.mean_power


def tap_mean_power(scenario: Scenario, tap: int) -> float:
    """Ensemble-average tap power ``E[xi^2] * p_visible * P`` (zero-lag ACF)."""
    shadow, vis, power = _tap_params(scenario, tap)
    return lognormal_mean_square(shadow) * vis.p_visible * power


def _tx_phase(scenario: Scenario, tap: int, p, angle):
    """Planar + parabolic TX phase at BS element(s) p for departure angle(s)."""
    cfg = scenario.config
    rng_m = cfg.d_tr if tap == 0 else scenario.clusters[tap - 1].placement.range_m
    kappa = TWO_PI / cfg.wavelength
    off = element_offset(cfg.tx_array, p)
    rel = np.asarray(angle) - cfg.tx_array.tilt
    return kappa * (off * np.cos(rel) - off**2 * np.sin(rel) ** 2 / (2.0 * rng_m))


def _rx_phase(scenario: Scenario, q, angle):
    cfg = scenario.config
    kappa = TWO_PI / cfg.wavelength
    off = element_offset(cfg.rx_array, q)
    return kappa * off * np.cos(np.asarray(angle) - cfg.rx_array.tilt)


def _los_doppler(scenario: Scenario, p):
    cfg = scenario.config
    return doppler_los(
        scenario.los.placement.azimuth_tx,
        cfg.tx_array,
        p,
        cfg.d_tr,
        cfg.motion,
        cfg.wavelength,
    )


# ---------------------------------------------------------------------------
# analytical forms


def acf_analytic(scenario: Scenario, p: int, q: int, lags, tap: int = 0) -> StatSeries:
    """Time ACF ``E[h(t) h*(t + lag)]`` of one tap.

    LOS: ``E[xi^2] p_v exp(-j 2 pi f_(L,p) lag)``.  Cluster: ``E[xi^2] p_v
    P_c`` times the ray-angle expectation of ``exp(-j 2 pi f lag)``
    evaluated by quadrature.  Independent of q and of absolute time.
    """
    lags = np.asarray(lags, dtype=float)
    shadow, vis, power = _tap_params(scenario, tap)
    scale = lognormal_mean_square(shadow) * vis.p_visible * power
    cfg = scenario.config
    if tap == 0:
        f_l = _los_doppler(scenario, p)
        values = scale * np.exp(-1j * TWO_PI * f_l * lags)
    else:
        cluster = scenario.clusters[tap - 1]
        offsets, weights = wrapped_gaussian_quadrature(cfg.cluster_asd)
        f = cfg.max_doppler * np.cos(
            cluster.placement.azimuth_rx + offsets - cfg.motion.heading
        )
        ray_expect = np.exp(-1j * TWO_PI * f[:, None] * lags[None, :])
        values = scale * (weights[:, None] * ray_expect).sum(axis=0)
    return StatSeries(
        axis="lag_s",
        grid=lags,
        values=values,
        meta={"estimator": "analytic", "tap": tap, "p": p, "q": q},
    )


def ccf_analytic(
    scenario: Scenario, p: int, p2: int, q: int, q2: int, t: float = 0.0, tap: int = 0
) -> complex:
    """Spatial CCF ``E[h_qp(t) h_q'p'*(t)]`` of one tap.

    Factorizes into the lognormal pair moment, the exact visibility pair
    moment of the sampled chain, and the phase-difference expectation.
    Only the LOS term depends on absolute time (element-dependent Doppler).
    """
    cfg = scenario.config
    shadow, vis, power = _tap_params(scenario, tap)
    lag = abs(p - p2)
    spacing = cfg.tx_array.spacing
    ls = lognormal_acf(lag, spacing, shadow) * markov_pair_moment(lag, spacing, vis)
    if tap == 0:
        los = scenario.los.placement
        dphi = (
            _tx_phase(scenario, 0, p, los.azimuth_tx)
            - _tx_phase(scenario, 0, p2, los.azimuth_tx)
            + _rx_phase(scenario, q, los.azimuth_rx)
            - _rx_phase(scenario, q2, los.azimuth_rx)
        )
        dfreq = _los_doppler(scenario, p) - _los_doppler(scenario, p2)
        return complex(ls * np.exp(1j * (dphi + TWO_PI * t * dfreq)))
    cluster = scenario.clusters[tap - 1]
    offsets, weights = wrapped_gaussian_quadrature(cfg.cluster_asd)
    aod = cluster.placement.azimuth_tx + offsets
    aoa = cluster.placement.azimuth_rx + offsets
    tx_factor = weights @ np.exp(
        1j * (_tx_phase(scenario, tap, p, aod) - _tx_phase(scenario, tap, p2, aod))
    )
    rx_factor = weights @ np.exp(
        1j * (_rx_phase(scenario, q, aoa) - _rx_phase(scenario, q2, aoa))
    )
    return complex(ls * power * tx_factor * rx_factor)


def power_track(scenario: Scenario, tracks) -> StatSeries:
    """Total received power per BS element: LOS plus weighted cluster powers."""
    total = tracks.los.power_factor.copy()
    for cluster, track in zip(scenario.clusters, tracks.clusters):
        total = total + cluster.mean_power * track.power_factor
    return StatSeries(
        axis="antenna",
        grid=tracks.tx_antennas.astype(float),
        values=total,
        meta={"estimator": "track", "kind": "power"},
    )


def k_factor_track(scenario: Scenario, tracks) -> StatSeries:
    """Rician K-factor per BS element; +inf where no cluster is visible.

    A zero LOS term wins over a zero denominator: no LOS power means K=0.
    """
    num = tracks.los.power_factor
    den = np.zeros_like(num)
    for cluster, track in zip(scenario.clusters, tracks.clusters):
        den = den + cluster.mean_power * track.power_factor
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(num == 0.0, 0.0, np.where(den == 0.0, np.inf, num / den))
    return StatSeries(
        axis="antenna",
        grid=tracks.tx_antennas.astype(float),
        values=k,
        meta={"estimator": "track", "kind": "k_factor"},
    )


def override_shadow_sigma(scenario: Scenario, sigma_db: float) -> Scenario:
    """Scenario copy with every path's shadow standard deviation replaced."""
    los = replace(scenario.los, shadow=replace(scenario.los.shadow, sigma_db=sigma_db))
    clusters = [
        replace(c, shadow=replace(c.shadow, sigma_db=sigma_db))
        for c in scenario.clusters
    ]
    return Scenario(config=scenario.config, los=los, clusters=clusters)


# ---------------------------------------------------------------------------
# Monte-Carlo machinery


def _chunk_sizes(runs: int, chunk: int) -> list[int]:
    if runs < 2:
        raise ValueError(f"need at least 2 runs, got {runs}")
    full, rest = divmod(runs, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _pair_track_draws(scenario, tap, positions, rng, n):
    """Joint (xi * pi) draws at the given element positions, shape (n, npos)."""
    shadow, vis, _ = _tap_params(scenario, tap)
    nu = sample_correlated_gaussian_at(positions, shadow.decorr_distance, rng, n)
    xi = 10.0 ** ((shadow.sigma_db * nu + shadow.mean_db) / 20.0)
    gaps = np.abs(np.diff(positions))
    u = rng.random((n, positions.size))
    states = np.empty((n, positions.size), dtype=np.int8)
    states[:, 0] = u[:, 0] < vis.p_visible
    for k, gap in enumerate(gaps, start=1):
        trans = markov_transition(float(gap), vis)
        p_next = np.where(states[:, k - 1] == 1, trans[1, 1], trans[0, 1])
        states[:, k] = u[:, k] < p_next
    return xi * states


def _cluster_ray_draws(scenario, tap, rng, n):
    """Fresh per-run ray angles and phases for one cluster tap."""
    cfg = scenario.config
    cluster = scenario.clusters[tap - 1]
    m_c = cfg.rays_per_cluster
    aod = cluster.placement.azimuth_tx + cfg.cluster_asd * rng.standard_normal((n, m_c))
    aoa = cluster.placement.azimuth_rx + cfg.cluster_asd * rng.standard_normal((n, m_c))
    theta = rng.uniform(0.0, TWO_PI, (n, m_c))
    return aod, aoa, theta


class _TapDraws:
    """One chunk of fresh tap randomness, shared across probed antennas.

    Tracks are drawn jointly at the probed TX element positions; cluster
    taps additionally carry per-run ray angles and phases.  ``series``
    evaluates the tap gain for any probed (p, q) on those shared draws.
    """

    def __init__(self, scenario, tap, p_list, rng, n):
        cfg = scenario.config
        self.scenario = scenario
        self.tap = tap
        p_arr = np.asarray(sorted({int(p) for p in p_list}), dtype=int)
        self._col = {int(p): j for j, p in enumerate(p_arr)}
        positions = element_offset(cfg.tx_array, p_arr)
        order = np.argsort(positions)
        amp = np.empty((n, p_arr.size))
        amp[:, order] = _pair_track_draws(scenario, tap, positions[order], rng, n)
        self.amp = amp
        if tap != 0:
            aod, aoa, theta = _cluster_ray_draws(scenario, tap, rng, n)
            self.aod, self.aoa, self.theta = aod, aoa, theta
            self.omega = TWO_PI * cfg.max_doppler * np.cos(aoa - cfg.motion.heading)

    def series(self, p: int, q: int, times) -> np.ndarray:
        """Gain time series (n_runs, n_times) at TX element p, RX element q."""
        scenario, tap = self.scenario, self.tap
        amp = self.amp[:, self._col[int(p)]]
        if tap == 0:
            los = scenario.los.placement
            phase = _tx_phase(scenario, 0, p, los.azimuth_tx) + _rx_phase(
                scenario, q, los.azimuth_rx
            )
            omega = TWO_PI * _los_doppler(scenario, p)
            return amp[:, None] * np.exp(1j * (phase + omega * times)[None, :])
        _, _, power = _tap_params(scenario, tap)
        phase0 = (
            self.theta
            + _tx_phase(scenario, tap, p, self.aod)
            + _rx_phase(scenario, q, self.aoa)
        )
        scale = math.sqrt(power / scenario.config.rays_per_cluster)
        return (scale * amp)[:, None] * ray_sum_series(phase0, self.omega, times)


def _acf_chunk(args):
    scenario, p, q, tap, shifts, times, seed_key, n = args
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    series = _TapDraws(scenario, tap, [p], rng, n).series(p, q, times)
    nt = times.size
    sums = []
    for shift in shifts:
        if shift >= 0:
            prod = series[:, : nt - shift] * np.conj(series[:, shift:])
        else:
            prod = series[:, -shift:] * np.conj(series[:, : nt + shift])
        per_run = prod.mean(axis=1)
        sums.append(
            [
                per_run.real.sum(),
                per_run.imag.sum(),
                (per_run.real**2).sum(),
                (per_run.imag**2).sum(),
            ]
        )
    return np.asarray(sums)


def _lags_to_shifts(lags, step: float) -> list[int]:
    shifts = []
    for lag in np.asarray(lags, dtype=float):
        shift = round(lag / step)
        if abs(shift * step - lag) > 1e-9 * max(step, abs(lag)):
            raise ValueError(f"lag {lag} is not a multiple of the grid step {step}")
        shifts.append(shift)
    return shifts


def acf_monte_carlo(
    scenario: Scenario,
    p: int,
    q: int,
    lags,
    tap: int = 0,
    runs: int = 10_000,
    seed: int = 0,
    grid=None,
    jobs: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> StatSeries:
    """Fresh-draw ensemble estimate of the tap ACF with standard errors.

    Each run redraws ray angles, ray phases and large-scale factors, then
    averages ``h(t) h*(t+lag)`` over admissible time origins.  Chunked
    accumulation with a fixed combine order keeps results independent of
    ``jobs``.
    """
    from .channel import default_time_grid

    if grid is None:
        grid = default_time_grid(scenario)
    lags = np.asarray(lags, dtype=float)
    shifts = _lags_to_shifts(lags, grid.step)
    if max(abs(s) for s in shifts) >= grid.count:
        raise ValueError("largest lag exceeds the time-grid span")
    times = grid.times
    tasks = [
        (scenario, p, q, tap, shifts, times, (seed, 11, tap, i), n)
        for i, n in enumerate(_chunk_sizes(runs, chunk))
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            partials = list(pool.map(_acf_chunk, tasks))
    else:
        partials = [_acf_chunk(t) for t in tasks]
    sums = kahan_sum(partials)
    mean = (sums[:, 0] + 1j * sums[:, 1]) / runs
    var_re = np.maximum(sums[:, 2] / runs - (sums[:, 0] / runs) ** 2, 0.0)
    var_im = np.maximum(sums[:, 3] / runs - (sums[:, 1] / runs) ** 2, 0.0)
    se = np.sqrt(var_re / (runs - 1)) + 1j * np.sqrt(var_im / (runs - 1))
    return StatSeries(
        axis="lag_s",
        grid=lags,
        values=mean,
        stderr=se,
        meta={"estimator": "monte-carlo", "runs": runs, "seed": seed, "tap": tap,
              "p": p, "q": q},
    )


def second_moment_monte_carlo(
    scenario: Scenario, p: int, q: int, tap: int, runs: int, seed: int = 0
) -> tuple[float, float]:
    """Monte-Carlo ``E[|h|^2]`` of one tap with its standard error."""
    from .channel import TimeGrid

    series = acf_monte_carlo(
        scenario, p, q, [0.0], tap=tap, runs=runs, seed=seed,
        grid=TimeGrid(0.0, 1.0, 1),
    )
    return float(series.values[0].real), float(series.stderr[0].real)


def _ccf_chunk(args):
    scenario, pairs, t, tap, seed_key, n = args
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    times = np.array([t])
    p_list = sorted({p for p, _, _, _ in pairs} | {p2 for _, p2, _, _ in pairs})
    draws = _TapDraws(scenario, tap, p_list, rng, n)
    cache: dict[tuple[int, int], np.ndarray] = {}

    def leg(p, q):
        if (p, q) not in cache:
            cache[(p, q)] = draws.series(p, q, times)[:, 0]
        return cache[(p, q)]

    sums = []
    for p, p2, q, q2 in pairs:
        prod = leg(p, q) * np.conj(leg(p2, q2))
        sums.append(
            [
                prod.real.sum(),
                prod.imag.sum(),
                (prod.real**2).sum(),
                (prod.imag**2).sum(),
                (prod.real * prod.imag).sum(),
            ]
        )
    return np.asarray(sums)


def ccf_monte_carlo(
    scenario: Scenario,
    pairs,
    t: float = 0.0,
    tap: int = 0,
    runs: int = 10_000,
    seed: int = 0,
    jobs: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> ComplexEstimates:
    """Fresh-draw ensemble estimate of ``E[h_qp(t) h_q'p'*(t)]``.

    ``pairs`` is a sequence of ``(p, p2, q, q2)``; all pairs of one call
    share the per-run draws, so differences between them are estimated on
    common random numbers.  Evaluated at the fixed absolute time ``t``.
    """
    pairs = [tuple(int(v) for v in pair) for pair in pairs]
    tasks = [
        (scenario, pairs, t, tap, (seed, 12, tap, i), n)
        for i, n in enumerate(_chunk_sizes(runs, chunk))
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            partials = list(pool.map(_ccf_chunk, tasks))
    else:
        partials = [_ccf_chunk(t_) for t_ in tasks]
    sums = kahan_sum(partials)
    mean_re = sums[:, 0] / runs
    mean_im = sums[:, 1] / runs
    var_re = np.maximum(sums[:, 2] / runs - mean_re**2, 0.0)
    var_im = np.maximum(sums[:, 3] / runs - mean_im**2, 0.0)
    cov_ri = sums[:, 4] / runs - mean_re * mean_im
    cov = np.empty((len(pairs), 2, 2))
    cov[:, 0, 0] = var_re / (runs - 1)
    cov[:, 1, 1] = var_im / (runs - 1)
    cov[:, 0, 1] = cov[:, 1, 0] = cov_ri / (runs - 1)
    return ComplexEstimates(values=mean_re + 1j * mean_im, cov=cov, runs=runs)


def ccf_curve_monte_carlo(
    scenario: Scenario,
    p_ref: int,
    spacings,
    q: int = 1,
    direction: int = 1,
    t: float = 0.0,
    tap: int = 0,
    runs: int = 10_000,
    seed: int = 0,
    jobs: int = 1,
) -> ComplexEstimates:
    """CCF of ``(p_ref, p_ref + direction*s)`` for each spacing ``s``."""
    pairs = [(p_ref, p_ref + direction * int(s), q, q) for s in spacings]
    return ccf_monte_carlo(
        scenario, pairs, t=t, tap=tap, runs=runs, seed=seed, jobs=jobs
    )


def ccf_curve_analytic(
    scenario: Scenario,
    p_ref: int,
    spacings,
    q: int = 1,
    direction: int = 1,
    t: float = 0.0,
    tap: int = 0,
) -> np.ndarray:
    """Analytic counterpart of :func:`ccf_curve_monte_carlo`."""
    return np.array(
        [
            ccf_analytic(scenario, p_ref, p_ref + direction * int(s), q, q, t, tap)
            for s in spacings
        ]
    )


# ---------------------------------------------------------------------------
# realization-set estimators


def acf_empirical(realizations, p: int, q: int, tap: int, lags) -> StatSeries:
    """Ensemble ACF from a set of channel realizations.

    Every realization contributes its time-averaged lag products; the
    returned standard errors come from the scatter across realizations.
    """
    realizations = list(realizations)
    if len(realizations) < 2:
        raise ValueError("need at least 2 realizations")
    grid = realizations[0].grid
    shifts = _lags_to_shifts(lags, grid.step)
    nt = grid.count
    if max(abs(s) for s in shifts) >= nt:
        raise ValueError("largest lag exceeds the time-grid span")
    per_run = np.empty((len(realizations), len(shifts)), dtype=np.complex128)
    for i, realization in enumerate(realizations):
        series = realization.tap_series(q, p, tap)
        for k, shift in enumerate(shifts):
            if shift >= 0:
                prod = series[: nt - shift] * np.conj(series[shift:])
            else:
                prod = series[-shift:] * np.conj(series[: nt + shift])
            per_run[i, k] = prod.mean()
    mean = per_run.mean(axis=0)
    n = len(realizations)
    se = per_run.real.std(axis=0, ddof=1) / math.sqrt(n) + 1j * per_run.imag.std(
        axis=0, ddof=1
    ) / math.sqrt(n)
    return StatSeries(
        axis="lag_s",
        grid=np.asarray(lags, dtype=float),
        values=mean,
        stderr=se,
        meta={"estimator": "empirical", "samples": n, "tap": tap, "p": p, "q": q},
    )


def ccf_empirical(
    realizations, p: int, p2: int, q: int, q2: int, tap: int, t: float
) -> tuple[complex, complex]:
    """Ensemble CCF at absolute time ``t`` from channel realizations.

    Returns (mean, se) with the standard error packed per component.
    """
    realizations = list(realizations)
    if len(realizations) < 2:
        raise ValueError("need at least 2 realizations")
    grid = realizations[0].grid
    idx = round((t - grid.start) / grid.step)
    if not 0 <= idx < grid.count or abs(grid.start + idx * grid.step - t) > 1e-9:
        raise ValueError(f"time {t} is not on the realization grid")
    prods = np.array(
        [
            r.tap_series(q, p, tap)[idx] * np.conj(r.tap_series(q2, p2, tap)[idx])
            for r in realizations
        ]
    )
    n = len(realizations)
    se = prods.real.std(ddof=1) / math.sqrt(n) + 1j * prods.imag.std(ddof=1) / math.sqrt(n)
    return complex(prods.mean()), complex(se)


def ensemble_realizations(
    scenario: Scenario,
    count: int,
    seed: int,
    grid=None,
    rx_antennas=None,
    tx_antennas=None,
):
    """Yield realizations with fresh ray and track draws per element.

    Cluster structure (delays, powers, placements, large-scale parameters)
    stays fixed; ray angles, ray phases and tracks are redrawn, matching
    the expectations the analytical statistics take.
    """
    from .channel import default_time_grid, synthesize

    if grid is None:
        grid = default_time_grid(scenario)
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence((seed, 13, i)))
        fresh = redraw_rays(scenario, rng)
        yield synthesize(
            fresh,
            grid=grid,
            rng=rng,
            rx_antennas=rx_antennas,
            tx_antennas=tx_antennas,
        )


def redraw_rays(scenario: Scenario, rng: np.random.Generator) -> Scenario:
    """Scenario copy with fresh ray angles and phases for every cluster."""
    cfg = scenario.config
    clusters = []
    for cluster in scenario.clusters:
        aods, aoas, phases = draw_rays(
            cluster.placement.azimuth_tx,
            cluster.placement.azimuth_rx,
            cfg.rays_per_cluster,
            cfg.cluster_asd,
            rng,
        )
        clusters.append(
            replace(cluster, ray_aods=aods, ray_aoas=aoas, ray_phases=phases)
        )
    return Scenario(config=cfg, los=scenario.los, clusters=clusters)
