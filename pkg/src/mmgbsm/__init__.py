"""Non-stationary wideband massive-MIMO channel simulator.

Geometry-based stochastic channel model with parabolic wavefronts across
a large BS array, per-cluster lognormal shadowing and Markov visibility
along the array, analytical and Monte-Carlo channel statistics, and a
sliding-window MUSIC angle-of-departure spectrum.
"""

__version__ = "0.1.0"

from ._backend import active_backend, set_backend
from .channel import (
    ChannelRealization,
    TimeGrid,
    TrackSet,
    default_time_grid,
    draw_tracks,
    synthesize,
)
from .geometry import ArraySpec, Motion, Placement
from .largescale import LargeScaleTrack, ShadowParams, VisibilityParams
from .scenario import Cluster, Scenario, ScenarioConfig, build_scenario

__all__ = [
    "ArraySpec",
    "ChannelRealization",
    "Cluster",
    "LargeScaleTrack",
    "Motion",
    "Placement",
    "Scenario",
    "ScenarioConfig",
    "ShadowParams",
    "TimeGrid",
    "TrackSet",
    "VisibilityParams",
    "active_backend",
    "build_scenario",
    "default_time_grid",
    "draw_tracks",
    "set_backend",
    "synthesize",
    "__version__",
]
