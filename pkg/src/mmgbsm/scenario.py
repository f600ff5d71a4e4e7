"""Stochastic scenario generation.

Draws a complete urban-macro style scenario: cluster delays and mean
powers (exponential delay/power profile), cluster positions, per-ray
angles and phases, and the large-scale shadowing/visibility parameters of
every cluster and of the LOS path.  A scenario is fully determined by its
config (including the seed) and is the immutable input to channel
synthesis and to the analytical statistics.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import SPEED_OF_LIGHT, ArraySpec, Motion, Placement, wrap_angle
from .largescale import LN10_OVER_20, ShadowParams, VisibilityParams

COMPOSITE_SPREAD_FACTOR = np.sqrt(3.0)
"""Half-width of the uniform cluster-azimuth window in units of composite
angular spread (a uniform law on +-sqrt(3)*s has standard deviation s)."""


@dataclass(frozen=True)
class ScenarioConfig:
    """All knobs of a simulation run; the single source of truth.

    ``tx_spacing`` / ``rx_spacing`` default to half a wavelength when left
    ``None``.  ``shadow_sigma_units`` selects whether ``shadow_sigma`` is a
    dB standard deviation or a natural-log one (``"linear"``); the latter
    is handy for gentle power ripples of order a few percent.
    """

    carrier_frequency: float = 2.6e9
    tx_elements: int = 128
    rx_elements: int = 10
    tx_spacing: float | None = None
    rx_spacing: float | None = None
    tx_tilt: float = np.pi / 2
    rx_tilt: float = np.pi / 4
    d_tr: float = 50.0
    los_aod: float = 0.0
    los_aoa: float = np.pi
    speed: float = 10.0
    heading: float = 0.0
    num_clusters: int = 20
    rays_per_cluster: int = 20
    delay_ratio: float = 2.3
    delay_spread: float = 2.34e-7
    cluster_asd: float = np.pi / 12
    composite_asd: float = np.pi / 3
    cluster_range_mean: float = 15.0
    cluster_range_min: float = 20.0
    power_shadow_sigma_db: float = 0.0
    shadow_sigma: float = 0.2
    shadow_sigma_units: str = "linear"
    shadow_decorr: float = 0.6
    markov_rate_strong: float = 0.01
    markov_rate_weak: float = 0.5
    area_mean_coupling: float = 1.0
    seed: int = 1

    def __post_init__(self):
        positive = {
            "carrier_frequency": self.carrier_frequency,
            "d_tr": self.d_tr,
            "delay_spread": self.delay_spread,
            "cluster_range_mean": self.cluster_range_mean,
            "cluster_range_min": self.cluster_range_min,
            "shadow_decorr": self.shadow_decorr,
            "markov_rate_strong": self.markov_rate_strong,
            "markov_rate_weak": self.markov_rate_weak,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.num_clusters < 1:
            raise ValueError(f"num_clusters must be >= 1, got {self.num_clusters}")
        if self.rays_per_cluster < 1:
            raise ValueError(
                f"rays_per_cluster must be >= 1, got {self.rays_per_cluster}"
            )
        if self.delay_ratio <= 1:
            raise ValueError(f"delay_ratio must be > 1, got {self.delay_ratio}")
        if self.speed < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        if self.cluster_asd < 0 or self.composite_asd < 0:
            raise ValueError("angular spreads must be >= 0")
        if self.shadow_sigma < 0:
            raise ValueError(f"shadow_sigma must be >= 0, got {self.shadow_sigma}")
        if self.shadow_sigma_units not in ("db", "linear"):
            raise ValueError(
                "shadow_sigma_units must be 'db' or 'linear', "
                f"got {self.shadow_sigma_units!r}"
            )
        if self.power_shadow_sigma_db < 0:
            raise ValueError("power_shadow_sigma_db must be >= 0")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def tx_array(self) -> ArraySpec:
        spacing = self.tx_spacing if self.tx_spacing is not None else self.wavelength / 2
        return ArraySpec(self.tx_elements, spacing, self.tx_tilt)

    @property
    def rx_array(self) -> ArraySpec:
        spacing = self.rx_spacing if self.rx_spacing is not None else self.wavelength / 2
        return ArraySpec(self.rx_elements, spacing, self.rx_tilt)

    @property
    def motion(self) -> Motion:
        return Motion(self.speed, self.heading)

    @property
    def max_doppler(self) -> float:
        return self.speed / self.wavelength

    @property
    def los_delay(self) -> float:
        return self.d_tr / SPEED_OF_LIGHT

    @property
    def shadow_sigma_db(self) -> float:
        """Shadow standard deviation converted to dB."""
        if self.shadow_sigma_units == "db":
            return self.shadow_sigma
        return self.shadow_sigma / LN10_OVER_20

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            out[name] = value if not isinstance(value, np.floating) else float(value)
        return out

    def digest(self) -> str:
        """Short stable hash of the resolved configuration."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class Cluster:
    """One scatterer cluster: geometry, delay, mean power, rays, LS params."""

    index: int
    placement: Placement
    delay: float
    mean_power: float
    ray_aods: np.ndarray
    ray_aoas: np.ndarray
    ray_phases: np.ndarray
    shadow: ShadowParams
    visibility: VisibilityParams

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError(f"delay must be >= 0, got {self.delay}")
        if self.mean_power < 0:
            raise ValueError(f"mean_power must be >= 0, got {self.mean_power}")
        m = len(self.ray_aods)
        if not (len(self.ray_aoas) == len(self.ray_phases) == m):
            raise ValueError("ray vectors must share a common length")


@dataclass(frozen=True)
class LosPath:
    """Line-of-sight leg: geometry plus its own large-scale parameters."""

    placement: Placement
    delay: float
    shadow: ShadowParams
    visibility: VisibilityParams


@dataclass(frozen=True)
class Scenario:
    """A drawn scenario: LOS path, clusters, and the config that produced it."""

    config: ScenarioConfig
    los: LosPath
    clusters: list[Cluster] = field(default_factory=list)

    @property
    def num_taps(self) -> int:
        return 1 + len(self.clusters)

    @property
    def tap_delays(self) -> np.ndarray:
        return np.array([self.los.delay] + [c.delay for c in self.clusters])

    @property
    def provenance(self) -> str:
        return f"scenario-{self.config.digest()}-seed{self.config.seed}"


def cluster_power_winner(
    delay: float, r_tau: float, sigma_tau: float, shadow_draw_db: float = 0.0
) -> float:
    """Exponential delay/power profile with optional per-cluster dB shadowing.

    ``exp(-delay * (r_tau - 1) / (r_tau * sigma_tau)) * 10**(-shadow/10)``.
    ``shadow_draw_db`` is zero in the large-array mode, where per-antenna
    processes replace the per-cluster power randomization.
    """
    if r_tau <= 1:
        raise ValueError(f"r_tau must be > 1, got {r_tau}")
    if sigma_tau <= 0:
        raise ValueError(f"sigma_tau must be > 0, got {sigma_tau}")
    return float(
        np.exp(-delay * (r_tau - 1.0) / (r_tau * sigma_tau))
        * 10.0 ** (-shadow_draw_db / 10.0)
    )


def normalize_powers(powers) -> np.ndarray:
    """Scale nonnegative powers to sum to one."""
    powers = np.asarray(powers, dtype=float)
    total = powers.sum()
    if total <= 0:
        raise ValueError("powers must contain at least one positive entry")
    return powers / total


def draw_cluster_geometry(config: ScenarioConfig, rng: np.random.Generator) -> Placement:
    """Draw one cluster position.

    Range: minimum distance plus an exponential excess.  Departure
    azimuth: uniform in a window of half-width sqrt(3)*composite_asd
    around the LOS departure angle.  Arrival azimuth: uniform on the
    circle.
    """
    range_m = config.cluster_range_min + rng.exponential(config.cluster_range_mean)
    half_width = COMPOSITE_SPREAD_FACTOR * config.composite_asd
    aod = config.los_aod + rng.uniform(-half_width, half_width)
    aoa = rng.uniform(-np.pi, np.pi)
    return Placement(range_m=range_m, azimuth_tx=aod, azimuth_rx=aoa)


def draw_rays(
    cluster_center_aod: float,
    cluster_center_aoa: float,
    m_c: int,
    cluster_asd: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw per-ray angles and phases for one cluster.

    Ray departure/arrival angles are the cluster center plus independent
    wrapped-Gaussian offsets with standard deviation ``cluster_asd``;
    phases are i.i.d. uniform on [0, 2*pi).
    """
    if m_c < 1:
        raise ValueError(f"m_c must be >= 1, got {m_c}")
    aods = wrap_angle(cluster_center_aod + cluster_asd * rng.standard_normal(m_c))
    aoas = wrap_angle(cluster_center_aoa + cluster_asd * rng.standard_normal(m_c))
    phases = rng.uniform(0.0, 2.0 * np.pi, m_c)
    return aods, aoas, phases


def assign_large_scale_params(
    powers, config: ScenarioConfig
) -> list[tuple[ShadowParams, VisibilityParams]]:
    """Per-cluster shadowing and visibility parameters from normalized powers.

    Clusters at or above the median power persist (slow rates); weaker
    ones blink (fast rates).  The lognormal area mean couples to the
    cluster power: ``mean_db = area_mean_coupling * power``.
    """
    powers = np.asarray(powers, dtype=float)
    median = np.median(powers)
    out = []
    for p_c in powers:
        rate = config.markov_rate_strong if p_c >= median else config.markov_rate_weak
        shadow = ShadowParams(
            sigma_db=config.shadow_sigma_db,
            mean_db=config.area_mean_coupling * float(p_c),
            decorr_distance=config.shadow_decorr,
        )
        out.append((shadow, VisibilityParams(rate, rate)))
    return out


def _draw_delays(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Sorted excess delays (first cluster at zero)."""
    raw = rng.exponential(config.delay_ratio * config.delay_spread, config.num_clusters)
    raw.sort()
    return raw - raw[0]


def build_scenario(config: ScenarioConfig) -> Scenario:
    """Draw a complete scenario, deterministic in ``config.seed``.

    Random draws consume the stream in a fixed order: delays, optional
    power shadowing, then per cluster its geometry followed by its rays.
    """
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0)))
    excess = _draw_delays(config, rng)
    if config.power_shadow_sigma_db > 0:
        shadow_db = rng.normal(0.0, config.power_shadow_sigma_db, config.num_clusters)
    else:
        shadow_db = np.zeros(config.num_clusters)
    raw_powers = np.array(
        [
            cluster_power_winner(
                tau, config.delay_ratio, config.delay_spread, nu
            )
            for tau, nu in zip(excess, shadow_db)
        ]
    )
    powers = normalize_powers(raw_powers)

    placements = [draw_cluster_geometry(config, rng) for _ in range(config.num_clusters)]
    rays = [
        draw_rays(
            placements[c].azimuth_tx,
            placements[c].azimuth_rx,
            config.rays_per_cluster,
            config.cluster_asd,
            rng,
        )
        for c in range(config.num_clusters)
    ]
    ls_params = assign_large_scale_params(powers, config)

    clusters = []
    for c in range(config.num_clusters):
        aods, aoas, phases = rays[c]
        shadow, vis = ls_params[c]
        clusters.append(
            Cluster(
                index=c + 1,
                placement=placements[c],
                delay=config.los_delay + float(excess[c]),
                mean_power=float(powers[c]),
                ray_aods=aods,
                ray_aoas=aoas,
                ray_phases=phases,
                shadow=shadow,
                visibility=vis,
            )
        )

    los = LosPath(
        placement=Placement(
            range_m=config.d_tr,
            azimuth_tx=config.los_aod,
            azimuth_rx=config.los_aoa,
        ),
        delay=config.los_delay,
        shadow=ShadowParams(
            sigma_db=config.shadow_sigma_db,
            mean_db=0.0,
            decorr_distance=config.shadow_decorr,
        ),
        visibility=VisibilityParams(
            config.markov_rate_strong, config.markov_rate_strong
        ),
    )
    return Scenario(config=config, los=los, clusters=clusters)
