"""Command-line front end.

Subcommands::

    generate  synthesize a channel realization and dump the gain tensor
    stats     acf | ccf | power | kfactor  (analytic or Monte-Carlo CSVs)
    aps       sliding-window MUSIC angle power spectrum CSV
    evolve    per-cluster visibility/power along the array CSV

Every run writes its artifacts plus a ``manifest.json`` snapshot (config,
seed, argv, artifact list); re-running the recorded argv reproduces the
artifacts byte for byte.  Seeds derive per purpose from the run seed:
``(seed, 0)`` scenario draws, ``(seed, 1)`` track draws, ``(seed, 11|12,
tap, chunk)`` Monte-Carlo chunks, ``(seed, 14, index)`` per-sigma tracks.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .channel import default_time_grid, draw_tracks, synthesize
from .config import ConfigError, config_to_dict, load_config
from .doa import MusicConfig, default_angle_grid, sliding_aps
from .scenario import ScenarioConfig, build_scenario
from .stats import (
    acf_analytic,
    acf_monte_carlo,
    ccf_curve_analytic,
    ccf_curve_monte_carlo,
    k_factor_track,
    override_shadow_sigma,
    power_track,
)
from .tensorio import write_csv, write_tensor


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints: {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmgbsm",
        description="Non-stationary massive-MIMO channel simulator",
    )
    parser.add_argument("--version", action="version", version=f"mmgbsm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="YAML config file (defaults used if omitted)")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--jobs", type=int, default=1, help="parallel Monte-Carlo workers")

    gen = sub.add_parser("generate", help="synthesize and dump a channel realization")
    common(gen)
    gen.add_argument("--dtype", choices=["complex64", "complex128"], default="complex64")

    stats = sub.add_parser("stats", help="analytic / Monte-Carlo statistics CSVs")
    stats_sub = stats.add_subparsers(dest="kind", required=True)

    acf = stats_sub.add_parser("acf", help="time autocorrelation of one tap")
    common(acf)
    acf.add_argument("--p", type=int, default=1)
    acf.add_argument("--q", type=int, default=1)
    acf.add_argument("--tap", type=int, default=0)
    acf.add_argument("--num-lags", type=int, default=21)
    acf.add_argument("--runs", type=int, default=10_000)
    mode = acf.add_mutually_exclusive_group()
    mode.add_argument("--empirical", action="store_true")
    mode.add_argument("--analytic", action="store_true")

    ccf = stats_sub.add_parser("ccf", help="spatial cross-correlation curves")
    common(ccf)
    ccf.add_argument("--ref-antennas", type=_int_list, default=[1, 64, 128])
    ccf.add_argument("--max-spacing", type=int, default=20)
    ccf.add_argument("--q", type=int, default=1)
    ccf.add_argument("--tap", type=int, default=1)
    ccf.add_argument("--t", type=float, default=0.0)
    ccf.add_argument("--runs", type=int, default=10_000)
    mode = ccf.add_mutually_exclusive_group()
    mode.add_argument("--empirical", action="store_true")
    mode.add_argument("--analytic", action="store_true")

    power = stats_sub.add_parser("power", help="per-antenna power tracks")
    common(power)
    power.add_argument("--sigma-db", type=_float_list, default=[2.0, 4.0, 8.0])

    kfactor = stats_sub.add_parser("kfactor", help="per-antenna Rician K-factor tracks")
    common(kfactor)
    kfactor.add_argument("--sigma-db", type=_float_list, default=[2.0, 4.0, 8.0])

    aps = sub.add_parser("aps", help="sliding-window MUSIC AoD power spectrum")
    common(aps)
    aps.add_argument("--q", type=int, default=1)
    aps.add_argument("--tap", type=int, default=None)
    aps.add_argument("--window", type=int, default=12)
    aps.add_argument("--step", type=int, default=1)
    aps.add_argument("--grid-step-deg", type=float, default=0.25)

    evolve = sub.add_parser("evolve", help="cluster visibility/power along the array")
    common(evolve)
    evolve.add_argument("--all-visible", action="store_true")

    return parser


def _resolve_config(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def _write_manifest(out_dir: Path, argv, config: ScenarioConfig, artifacts, started):
    manifest = {
        "schema_version": 1,
        "argv": list(argv),
        "config": config_to_dict(config),
        "config_hash": config.digest(),
        "seed": config.seed,
        "artifacts": [str(p.name) for p in artifacts],
        "wall_clock_s": time.time() - started,
        "version": __version__,
    }
    path = out_dir / "manifest.json"
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    tmp.replace(path)
    return path


def _csv_comments(config: ScenarioConfig, **extra) -> dict:
    out = {"seed": config.seed, "config_hash": config.digest()}
    out.update(extra)
    return out


def _fmt(x) -> str:
    return repr(float(x))


def cmd_generate(args, argv) -> list[Path]:
    config = _resolve_config(args)
    scenario = build_scenario(config)
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 1)))
    realization = synthesize(scenario, rng=rng)
    header = {
        "kind": "channel_gains",
        "axes": ["rx", "tx", "tap", "time"],
        "delays_s": [float(d) for d in realization.delays],
        "grid": {
            "start": realization.grid.start,
            "step": realization.grid.step,
            "count": realization.grid.count,
        },
        "seed": config.seed,
        "config_hash": config.digest(),
        "scenario_ref": realization.scenario_ref,
        "wavelength_m": realization.wavelength,
    }
    path = args.out / "cir_tensor.bin"
    write_tensor(path, realization.gains, header, dtype=args.dtype)
    return [path]


def cmd_stats_acf(args, argv) -> list[Path]:
    config = _resolve_config(args)
    scenario = build_scenario(config)
    grid = default_time_grid(scenario)
    lags = grid.step * np.arange(args.num_lags)
    if args.empirical:
        series = acf_monte_carlo(
            scenario, args.p, args.q, lags, tap=args.tap,
            runs=args.runs, seed=config.seed, grid=grid, jobs=args.jobs,
        )
        estimator, runs = "monte-carlo", args.runs
    else:
        series = acf_analytic(scenario, args.p, args.q, lags, tap=args.tap)
        estimator, runs = "analytic", 0
    se = series.stderr if series.stderr is not None else np.zeros_like(lags) * 1j
    rows = [
        [_fmt(lag), _fmt(v.real), _fmt(v.imag), _fmt(s.real), _fmt(s.imag)]
        for lag, v, s in zip(lags, series.values, se)
    ]
    path = args.out / "acf.csv"
    write_csv(
        path,
        _csv_comments(config, estimator=estimator, samples=runs, tap=args.tap,
                      p=args.p, q=args.q, axis="lag_s"),
        ["lag_s", "re", "im", "se_re", "se_im"],
        rows,
    )
    return [path]


def cmd_stats_ccf(args, argv) -> list[Path]:
    config = _resolve_config(args)
    scenario = build_scenario(config)
    spacings = np.arange(1, args.max_spacing + 1)
    rows = []
    for ref in args.ref_antennas:
        direction = 1 if ref + args.max_spacing <= config.tx_elements else -1
        if args.empirical:
            est = ccf_curve_monte_carlo(
                scenario, ref, spacings, q=args.q, direction=direction,
                t=args.t, tap=args.tap, runs=args.runs, seed=config.seed,
                jobs=args.jobs,
            )
            values, se_abs = est.values, est.se_abs()
        else:
            values = ccf_curve_analytic(
                scenario, ref, spacings, q=args.q, direction=direction,
                t=args.t, tap=args.tap,
            )
            se_abs = np.zeros(spacings.size)
        for s, v, se in zip(spacings, values, se_abs):
            rows.append(
                [ref, ref + direction * int(s), int(s), _fmt(abs(v)), _fmt(se)]
            )
    path = args.out / "ccf.csv"
    estimator = "monte-carlo" if args.empirical else "analytic"
    write_csv(
        path,
        _csv_comments(config, estimator=estimator, samples=args.runs if args.empirical else 0,
                      tap=args.tap, q=args.q, t=args.t, axis="spacing"),
        ["ref_antenna", "partner_antenna", "spacing", "abs_value", "se_abs"],
        rows,
    )
    return [path]


def _sigma_tracks(config: ScenarioConfig, sigma_db: float):
    # Common random numbers across sigma values: same track seed for each,
    # so curves differ only through the shadow amplitude.
    scenario = override_shadow_sigma(build_scenario(config), sigma_db)
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 14, 0)))
    return scenario, draw_tracks(scenario, rng)


def _db10(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(values)


def cmd_stats_power(args, argv) -> list[Path]:
    config = _resolve_config(args)
    rows = []
    for sigma_db in args.sigma_db:
        scenario, tracks = _sigma_tracks(config, sigma_db)
        los_db = _db10(tracks.los.power_factor)
        nlos = np.zeros_like(tracks.los.power_factor)
        for cluster, track in zip(scenario.clusters, tracks.clusters):
            nlos = nlos + cluster.mean_power * track.power_factor
        nlos_db = _db10(nlos)
        total_db = _db10(power_track(scenario, tracks).values)
        for i, antenna in enumerate(tracks.tx_antennas):
            rows.append(
                [_fmt(sigma_db), int(antenna), _fmt(los_db[i]), _fmt(nlos_db[i]),
                 _fmt(total_db[i])]
            )
    path = args.out / "power.csv"
    write_csv(
        path,
        _csv_comments(config, estimator="track", kind="power", axis="antenna"),
        ["sigma_db", "antenna", "los_db", "nlos_db", "total_db"],
        rows,
    )
    return [path]


def cmd_stats_kfactor(args, argv) -> list[Path]:
    config = _resolve_config(args)
    rows = []
    for sigma_db in args.sigma_db:
        scenario, tracks = _sigma_tracks(config, sigma_db)
        k = k_factor_track(scenario, tracks).values
        for i, antenna in enumerate(tracks.tx_antennas):
            rows.append([_fmt(sigma_db), int(antenna), _fmt(k[i])])
    path = args.out / "kfactor.csv"
    write_csv(
        path,
        _csv_comments(config, estimator="track", kind="k_factor", axis="antenna"),
        ["sigma_db", "antenna", "k_linear"],
        rows,
    )
    return [path]


def cmd_aps(args, argv) -> list[Path]:
    config = _resolve_config(args)
    scenario = build_scenario(config)
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 1)))
    realization = synthesize(scenario, rng=rng, rx_antennas=np.array([args.q]))
    cfg = MusicConfig(
        window_size=args.window,
        window_step=args.step,
        angle_grid=default_angle_grid(args.grid_step_deg),
    )
    result = sliding_aps(realization, q=args.q, cfg=cfg, tap=args.tap)
    aod_deg = np.degrees(config.tx_tilt - result.angle_grid)
    rows = []
    for i, start in enumerate(result.window_positions):
        for k in range(result.angle_grid.size):
            rows.append(
                [int(start), _fmt(aod_deg[k]), _fmt(result.spectrum_db[i, k])]
            )
    path = args.out / "aps.csv"
    write_csv(
        path,
        _csv_comments(
            config, estimator="music", q=args.q,
            tap="composite" if args.tap is None else args.tap,
            window=args.window, step=args.step,
            angle="global AoD in degrees (tilt minus axis angle)",
        ),
        ["window_start", "angle_deg", "power_db"],
        rows,
    )
    return [path]


def cmd_evolve(args, argv) -> list[Path]:
    config = _resolve_config(args)
    scenario = build_scenario(config)
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 1)))
    tracks = draw_tracks(scenario, rng)
    rows = []
    for c, (cluster, track) in enumerate(zip(scenario.clusters, tracks.clusters), start=1):
        visible = np.ones_like(track.pi) if args.all_visible else track.pi
        power_db = _db10(cluster.mean_power * (track.xi * visible) ** 2)
        for i, antenna in enumerate(tracks.tx_antennas):
            rows.append([c, int(antenna), int(visible[i]), _fmt(power_db[i])])
    path = args.out / "evolve.csv"
    write_csv(
        path,
        _csv_comments(config, estimator="track", kind="evolution",
                      all_visible=int(args.all_visible)),
        ["cluster", "antenna", "visible", "power_db"],
        rows,
    )
    return [path]


_COMMANDS = {
    ("generate", None): cmd_generate,
    ("stats", "acf"): cmd_stats_acf,
    ("stats", "ccf"): cmd_stats_ccf,
    ("stats", "power"): cmd_stats_power,
    ("stats", "kfactor"): cmd_stats_kfactor,
    ("aps", None): cmd_aps,
    ("evolve", None): cmd_evolve,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    handler = _COMMANDS[(args.command, getattr(args, "kind", None))]
    written: list[Path] = []
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        written = handler(args, argv)
        config = _resolve_config(args)
        _write_manifest(args.out, argv, config, written, started)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
