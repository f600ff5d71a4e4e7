"""YAML configuration files.

A run is configured by a nested human-editable YAML document, versioned
with a ``schema_version`` key.  ``carrier_frequency`` is mandatory;
everything else falls back to the urban-macro defaults of
:class:`~mmgbsm.scenario.ScenarioConfig`.  Validation errors carry the
dotted key path and the expected type.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from .scenario import ScenarioConfig

CONFIG_SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """A configuration file problem the user has to fix."""


_NUMBER = (int, float)

# (dotted yaml path, ScenarioConfig field, type, required)
_FIELDS = [
    ("carrier_frequency", "carrier_frequency", _NUMBER, True),
    ("seed", "seed", int, False),
    ("arrays.tx.elements", "tx_elements", int, False),
    ("arrays.tx.spacing", "tx_spacing", _NUMBER, False),
    ("arrays.tx.tilt", "tx_tilt", _NUMBER, False),
    ("arrays.rx.elements", "rx_elements", int, False),
    ("arrays.rx.spacing", "rx_spacing", _NUMBER, False),
    ("arrays.rx.tilt", "rx_tilt", _NUMBER, False),
    ("link.d_tr", "d_tr", _NUMBER, False),
    ("link.los_aod", "los_aod", _NUMBER, False),
    ("link.los_aoa", "los_aoa", _NUMBER, False),
    ("motion.speed", "speed", _NUMBER, False),
    ("motion.heading", "heading", _NUMBER, False),
    ("clusters.count", "num_clusters", int, False),
    ("clusters.rays", "rays_per_cluster", int, False),
    ("clusters.delay_ratio", "delay_ratio", _NUMBER, False),
    ("clusters.delay_spread", "delay_spread", _NUMBER, False),
    ("clusters.asd", "cluster_asd", _NUMBER, False),
    ("clusters.composite_asd", "composite_asd", _NUMBER, False),
    ("clusters.range_mean", "cluster_range_mean", _NUMBER, False),
    ("clusters.range_min", "cluster_range_min", _NUMBER, False),
    ("clusters.power_shadow_sigma_db", "power_shadow_sigma_db", _NUMBER, False),
    ("shadowing.sigma", "shadow_sigma", _NUMBER, False),
    ("shadowing.units", "shadow_sigma_units", str, False),
    ("shadowing.decorr", "shadow_decorr", _NUMBER, False),
    ("shadowing.area_mean_coupling", "area_mean_coupling", _NUMBER, False),
    ("visibility.rate_strong", "markov_rate_strong", _NUMBER, False),
    ("visibility.rate_weak", "markov_rate_weak", _NUMBER, False),
]


def _lookup(tree: dict, dotted: str):
    node = tree
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return None, False
        node = node[part]
    return node, True


def _type_name(expected) -> str:
    if expected is _NUMBER:
        return "number"
    return expected.__name__


def config_from_dict(tree: dict) -> ScenarioConfig:
    """Validate a parsed YAML tree and build a :class:`ScenarioConfig`."""
    if not isinstance(tree, dict):
        raise ConfigError("config root must be a mapping")
    version = tree.get("schema_version")
    if version is None:
        raise ConfigError("missing required key 'schema_version'")
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r}, expected {CONFIG_SCHEMA_VERSION}"
        )
    kwargs = {}
    for dotted, field, expected, required in _FIELDS:
        value, present = _lookup(tree, dotted)
        if not present or value is None:
            if required:
                raise ConfigError(f"missing required key '{dotted}'")
            continue
        if expected is int and isinstance(value, bool):
            raise ConfigError(f"config key '{dotted}': expected int, got bool")
        if not isinstance(value, expected):
            raise ConfigError(
                f"config key '{dotted}': expected {_type_name(expected)}, "
                f"got {type(value).__name__}"
            )
        kwargs[field] = value
    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    """Load and validate a YAML config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return config_from_dict(tree)


def config_to_dict(config: ScenarioConfig) -> dict:
    """Nested YAML-shaped dict for a config (round-trips through load)."""

    def num(x):
        if x is None:
            return None
        if isinstance(x, (int, np.integer)):
            return int(x)
        return float(x)

    return {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "carrier_frequency": num(config.carrier_frequency),
        "seed": int(config.seed),
        "arrays": {
            "tx": {
                "elements": config.tx_elements,
                "spacing": num(config.tx_spacing),
                "tilt": num(config.tx_tilt),
            },
            "rx": {
                "elements": config.rx_elements,
                "spacing": num(config.rx_spacing),
                "tilt": num(config.rx_tilt),
            },
        },
        "link": {
            "d_tr": num(config.d_tr),
            "los_aod": num(config.los_aod),
            "los_aoa": num(config.los_aoa),
        },
        "motion": {"speed": num(config.speed), "heading": num(config.heading)},
        "clusters": {
            "count": config.num_clusters,
            "rays": config.rays_per_cluster,
            "delay_ratio": num(config.delay_ratio),
            "delay_spread": num(config.delay_spread),
            "asd": num(config.cluster_asd),
            "composite_asd": num(config.composite_asd),
            "range_mean": num(config.cluster_range_mean),
            "range_min": num(config.cluster_range_min),
            "power_shadow_sigma_db": num(config.power_shadow_sigma_db),
        },
        "shadowing": {
            "sigma": num(config.shadow_sigma),
            "units": config.shadow_sigma_units,
            "decorr": num(config.shadow_decorr),
            "area_mean_coupling": num(config.area_mean_coupling),
        },
        "visibility": {
            "rate_strong": num(config.markov_rate_strong),
            "rate_weak": num(config.markov_rate_weak),
        },
    }


def dump_config(config: ScenarioConfig, path) -> None:
    Path(path).write_text(
        yaml.safe_dump(config_to_dict(config), sort_keys=False), encoding="utf-8"
    )
