"""Large-scale processes along the BS array.

Each cluster (and the LOS path) carries two independent per-antenna
processes: a correlated lognormal amplitude ``xi`` modelling smooth power
variation, and a two-state Markov visibility ``pi`` modelling cluster
(dis)appearance.  Both are sampled versions of continuous spatial
processes evaluated at the element positions, so all correlation
functions below take lags in antennas or meters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LN10_OVER_20 = np.log(10.0) / 20.0

_JITTER_START = 1e-10
_JITTER_MAX = 1e-6


@dataclass(frozen=True)
class ShadowParams:
    """Lognormal shadowing: std and area mean in dB, decorrelation distance in m."""

    sigma_db: float
    mean_db: float
    decorr_distance: float

    def __post_init__(self):
        if self.sigma_db < 0:
            raise ValueError(f"sigma_db must be >= 0, got {self.sigma_db}")
        if self.decorr_distance <= 0:
            raise ValueError(
                f"decorr_distance must be > 0, got {self.decorr_distance}"
            )

    @property
    def natural(self) -> tuple[float, float]:
        """(mean, std) of ``ln(xi)``: the dB parameters scaled by ln(10)/20."""
        return self.mean_db * LN10_OVER_20, self.sigma_db * LN10_OVER_20


@dataclass(frozen=True)
class VisibilityParams:
    """Two-state visibility: region-length intensities in 1/m.

    ``rate_visible`` and ``rate_invisible`` are the exponential intensities
    of the visible and invisible region lengths.  The stationary visible
    probability used throughout is ``rate_visible / (rate_visible +
    rate_invisible)``, matching the transition-matrix convention below.
    """

    rate_visible: float
    rate_invisible: float

    def __post_init__(self):
        if self.rate_visible <= 0 or self.rate_invisible <= 0:
            raise ValueError(
                "visibility rates must be > 0, got "
                f"({self.rate_visible}, {self.rate_invisible})"
            )

    @property
    def rate_total(self) -> float:
        return self.rate_visible + self.rate_invisible

    @property
    def p_visible(self) -> float:
        return self.rate_visible / self.rate_total


@dataclass(frozen=True)
class LargeScaleTrack:
    """Per-antenna lognormal amplitudes and 0/1 visibility for one path."""

    xi: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if xi.shape != pi.shape:
            raise ValueError(f"xi/pi shape mismatch: {xi.shape} vs {pi.shape}")
        if np.any(xi <= 0):
            raise ValueError("xi must be strictly positive")
        if not np.all((pi == 0) | (pi == 1)):
            raise ValueError("pi must be 0/1 valued")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "pi", pi)

    @property
    def power_factor(self) -> np.ndarray:
        """Per-antenna multiplicative power factor ``(xi * pi)**2``."""
        return (self.xi * self.pi) ** 2


def gaussian_acf(lag, decorr_distance: float):
    """Gaussian spatial ACF ``exp(-(lag / D)^2)`` of the underlying normal process."""
    if decorr_distance <= 0:
        raise ValueError(f"decorr_distance must be > 0, got {decorr_distance}")
    return np.exp(-((np.asarray(lag) / decorr_distance) ** 2))


def correlation_matrix(num_antennas: int, spacing: float, decorr_distance: float) -> np.ndarray:
    """Covariance of the unit-variance Gaussian process at the element positions."""
    lags = np.arange(num_antennas) * spacing
    row = gaussian_acf(lags, decorr_distance)
    idx = np.abs(np.subtract.outer(np.arange(num_antennas), np.arange(num_antennas)))
    return row[idx]


def _cholesky_with_jitter(cov: np.ndarray) -> np.ndarray:
    # The Gaussian-shaped covariance is near-singular for closely spaced
    # elements; climb a jitter ladder instead of failing outright.
    jitter = 0.0
    while True:
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError:
            jitter = _JITTER_START if jitter == 0.0 else jitter * 10.0
            if jitter > _JITTER_MAX:
                raise RuntimeError(
                    "covariance factorization failed even with maximum "
                    f"diagonal jitter {_JITTER_MAX:g}"
                ) from None


def sample_correlated_gaussian(
    num_antennas: int,
    spacing: float,
    decorr_distance: float,
    rng: np.random.Generator,
    num_tracks: int | None = None,
) -> np.ndarray:
    """Draw zero-mean unit-variance Gaussian tracks with the Gaussian spatial ACF.

    Returns shape ``(num_antennas,)`` or ``(num_tracks, num_antennas)``.
    """
    if num_antennas < 1:
        raise ValueError(f"num_antennas must be >= 1, got {num_antennas}")
    n = 1 if num_tracks is None else int(num_tracks)
    if num_antennas == 1:
        draws = rng.standard_normal((n, 1))
    else:
        chol = _cholesky_with_jitter(
            correlation_matrix(num_antennas, spacing, decorr_distance)
        )
        draws = rng.standard_normal((n, num_antennas)) @ chol.T
    return draws[0] if num_tracks is None else draws


def sample_correlated_gaussian_at(
    positions,
    decorr_distance: float,
    rng: np.random.Generator,
    num_tracks: int | None = None,
) -> np.ndarray:
    """Like :func:`sample_correlated_gaussian` at arbitrary axis positions.

    Restricting the process to a subset of element positions this way has
    exactly the joint law of the full-array track at those positions.
    """
    positions = np.asarray(positions, dtype=float)
    n = 1 if num_tracks is None else int(num_tracks)
    if positions.size == 1:
        draws = rng.standard_normal((n, 1))
    else:
        cov = gaussian_acf(
            np.abs(positions[:, None] - positions[None, :]), decorr_distance
        )
        chol = _cholesky_with_jitter(cov)
        draws = rng.standard_normal((n, positions.size)) @ chol.T
    return draws[0] if num_tracks is None else draws


def lognormal_track(nu, shadow: ShadowParams) -> np.ndarray:
    """Map a Gaussian track to lognormal amplitudes ``10**((sigma*nu + mean)/20)``."""
    nu = np.asarray(nu, dtype=float)
    if not np.all(np.isfinite(nu)):
        raise ValueError("nu must be finite")
    return 10.0 ** ((shadow.sigma_db * nu + shadow.mean_db) / 20.0)


def lognormal_acf(lag_antennas, spacing: float, shadow: ShadowParams):
    """Second moment ``E[xi_p xi_p']`` at an antenna lag.

    Evaluated with the natural-log parameters of the dB-domain generator:
    ``exp(2*m + s^2 * (1 + r_nu))`` where ``m = mean_db*ln(10)/20``,
    ``s = sigma_db*ln(10)/20`` and ``r_nu`` is the Gaussian ACF at the lag.
    At lag 0 this is ``E[xi^2]``; for large lags it tends to ``E[xi]^2``.
    """
    m_nat, s_nat = shadow.natural
    r_nu = gaussian_acf(
        np.abs(np.asarray(lag_antennas)) * spacing, shadow.decorr_distance
    )
    return np.exp(2.0 * m_nat + s_nat**2 * (1.0 + r_nu))


def lognormal_mean_square(shadow: ShadowParams) -> float:
    """``E[xi^2]`` of the lognormal amplitude."""
    return float(lognormal_acf(0, 1.0, shadow))


def markov_transition(gap: float, vis: VisibilityParams) -> np.ndarray:
    """Transition matrix of the visibility chain over a displacement ``gap``.

    State 0 is invisible, state 1 visible.  Rows are the from-state and
    sum to one; ``gap=0`` gives the identity and large gaps relax both
    rows to the stationary distribution ``[p_invisible, p_visible]``.
    """
    if gap < 0:
        raise ValueError(f"gap must be >= 0, got {gap}")
    lv, li = vis.rate_visible, vis.rate_invisible
    lt = vis.rate_total
    decay = np.exp(-lt * gap)
    return (
        np.array(
            [
                [li + lv * decay, lv - lv * decay],
                [li - li * decay, lv + li * decay],
            ]
        )
        / lt
    )


def markov_acf(lag_antennas, spacing: float, vis: VisibilityParams):
    """Rate-based exponential visibility correlation model.

    ``p_visible * exp(-rate_total * spacing * |lag|)``.  Uses the absolute
    lag so the result is an even function.  Coincides with the exact pair
    moment of the sampled chain (:func:`markov_pair_moment`) at lag 0 and
    in the sparse-visibility limit ``p_visible -> 0``.
    """
    lag = np.abs(np.asarray(lag_antennas))
    return vis.p_visible * np.exp(-vis.rate_total * spacing * lag)


def markov_pair_moment(lag_antennas, spacing: float, vis: VisibilityParams):
    """Exact ``E[pi_p pi_p']`` of the stationary sampled chain.

    ``p_v * (p_v + p_i * exp(-rate_total * spacing * |lag|))``: the
    visible probability times the visible-to-visible transition entry at
    the lag distance.
    """
    lag = np.abs(np.asarray(lag_antennas))
    p_v = vis.p_visible
    p_i = 1.0 - p_v
    return p_v * (p_v + p_i * np.exp(-vis.rate_total * spacing * lag))


def sample_visibility_track(
    num_antennas: int,
    spacing: float,
    vis: VisibilityParams,
    rng: np.random.Generator,
    num_tracks: int | None = None,
) -> np.ndarray:
    """Draw 0/1 visibility tracks: stationary start, per-element transitions.

    Returns shape ``(num_antennas,)`` or ``(num_tracks, num_antennas)``.
    """
    if num_antennas < 1:
        raise ValueError(f"num_antennas must be >= 1, got {num_antennas}")
    n = 1 if num_tracks is None else int(num_tracks)
    trans = markov_transition(spacing, vis)
    u = rng.random((n, num_antennas))
    states = np.empty((n, num_antennas), dtype=np.int8)
    states[:, 0] = u[:, 0] < vis.p_visible
    p_stay, p_appear = trans[1, 1], trans[0, 1]
    for k in range(1, num_antennas):
        p_next = np.where(states[:, k - 1] == 1, p_stay, p_appear)
        states[:, k] = u[:, k] < p_next
    return states[0] if num_tracks is None else states


def sample_visibility_at(
    positions,
    vis: VisibilityParams,
    rng: np.random.Generator,
    num_tracks: int | None = None,
) -> np.ndarray:
    """Visibility states at arbitrary axis positions (stationary start).

    Positions need not be equally spaced; each step uses the transition
    matrix for the actual gap, so this is the exact restriction of the
    continuous chain to those positions.
    """
    positions = np.asarray(positions, dtype=float)
    n = 1 if num_tracks is None else int(num_tracks)
    gaps = np.abs(np.diff(positions))
    u = rng.random((n, positions.size))
    states = np.empty((n, positions.size), dtype=np.int8)
    states[:, 0] = u[:, 0] < vis.p_visible
    for k, gap in enumerate(gaps, start=1):
        trans = markov_transition(float(gap), vis)
        p_next = np.where(states[:, k - 1] == 1, trans[1, 1], trans[0, 1])
        states[:, k] = u[:, k] < p_next
    return states[0] if num_tracks is None else states


def draw_track(
    num_antennas: int,
    spacing: float,
    shadow: ShadowParams,
    vis: VisibilityParams,
    rng: np.random.Generator,
) -> LargeScaleTrack:
    """Draw the (independent) lognormal and visibility tracks for one path."""
    nu = sample_correlated_gaussian(
        num_antennas, spacing, shadow.decorr_distance, rng
    )
    xi = lognormal_track(nu, shadow)
    pi = sample_visibility_track(num_antennas, spacing, vis, rng)
    return LargeScaleTrack(xi=xi, pi=pi.astype(float))
