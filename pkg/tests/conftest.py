import numpy as np
import pytest

from mmgbsm import ScenarioConfig, build_scenario, synthesize
from mmgbsm._kernels import warm_up
from mmgbsm.channel import TrackSet
from mmgbsm.geometry import Placement
from mmgbsm.largescale import LargeScaleTrack, ShadowParams, VisibilityParams
from mmgbsm.scenario import Cluster, Scenario

ALWAYS_VISIBLE = VisibilityParams(1.0, 1e-12)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # JIT compilation happens once here, outside any timed test body.
    warm_up()


@pytest.fixture(scope="session")
def default_config():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def default_scenario(default_config):
    return build_scenario(default_config)


@pytest.fixture(scope="session")
def full_realization(default_scenario):
    rng = np.random.default_rng(np.random.SeedSequence((1, 1)))
    return synthesize(default_scenario, rng=rng)


def make_single_cluster_scenario(
    range_m=20.0,
    aod=0.0,
    aoa=1.0,
    rays=1,
    asd=0.0,
    phases=None,
    sigma_db=0.0,
    visibility=ALWAYS_VISIBLE,
    seed=1,
    **config_kwargs,
):
    """One-cluster scenario with explicit geometry and large-scale params.

    The config's ray count and angular spread are kept consistent with the
    cluster so analytical statistics and estimators see the same law.
    """
    config = ScenarioConfig(
        num_clusters=1,
        rays_per_cluster=rays,
        cluster_asd=asd,
        shadow_sigma=sigma_db,
        shadow_sigma_units="db",
        seed=seed,
        **config_kwargs,
    )
    base = build_scenario(config)
    rng = np.random.default_rng(seed)
    ray_aods = aod + (asd * rng.standard_normal(rays) if asd else np.zeros(rays))
    ray_aoas = aoa + (asd * rng.standard_normal(rays) if asd else np.zeros(rays))
    cluster = Cluster(
        index=1,
        placement=Placement(range_m=range_m, azimuth_tx=aod, azimuth_rx=aoa),
        delay=base.clusters[0].delay,
        mean_power=1.0,
        ray_aods=ray_aods,
        ray_aoas=ray_aoas,
        ray_phases=np.zeros(rays) if phases is None else np.asarray(phases, float),
        shadow=ShadowParams(
            sigma_db=sigma_db, mean_db=0.0, decorr_distance=config.shadow_decorr
        ),
        visibility=visibility,
    )
    return Scenario(config=config, los=base.los, clusters=[cluster])


def unit_tracks(scenario, tx_antennas=None):
    """All-visible, unit-amplitude tracks for every path (independent arrays)."""
    m = scenario.config.tx_elements
    if tx_antennas is None:
        tx_antennas = np.arange(1, m + 1)
    tx_antennas = np.asarray(tx_antennas, dtype=int)

    def ones():
        return LargeScaleTrack(
            xi=np.ones(tx_antennas.size), pi=np.ones(tx_antennas.size)
        )

    return TrackSet(
        tx_antennas=tx_antennas,
        los=ones(),
        clusters=[ones() for _ in scenario.clusters],
    )
