"""Command-line surface: synth | solve | path | ensemble | oracle | plot.

Every command resolves one declarative config (file plus ``--set`` dotted
overrides, flags win), writes deterministic outputs that embed the config
hash, and prints a single machine-readable JSON summary line on success.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 timeout or
unreachable target.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import geojson, gridio
from .config import (
    build_disc,
    build_grid,
    build_model,
    build_path_options,
    build_solver_options,
    config_hash,
    load_config,
    require_point,
)
from .ensemble import StartRegion, run_ensemble
from .errors import (
    ConfigError,
    DegenerateMomentumError,
    IngestionError,
    NoInterfaceError,
    NumericalBlowupError,
    OutOfDomainError,
    ParameterError,
    UnreachableError,
)
from .levelset import init_run, run_until_point
from .oracle import dijkstra_path, dijkstra_times
from .path import extract_path, path_length_time
from .svgplot import PATH_COLORS, ScenePlot
from .terrain import load_esri_ascii, write_esri_ascii

_CONFIG_EXIT = (ConfigError, IngestionError, ParameterError, OutOfDomainError)
_NUMERIC_EXIT = (NumericalBlowupError, NoInterfaceError, DegenerateMomentumError)


def _out_dir(cfg) -> Path:
    out = Path(cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(summary: dict) -> None:
    print(json.dumps(summary, sort_keys=True))


def _solve_forward(cfg):
    grid = build_grid(cfg)
    model = build_model(cfg)
    disc = build_disc(cfg)
    a = require_point(cfg, "a")
    b = require_point(cfg, "b")
    delta = cfg["solver"]["delta"]
    run = init_run(grid, model, disc, "forward", a,
                   delta=None if delta is None else float(delta),
                   options=build_solver_options(cfg))
    t_star = run_until_point(run, b)
    return grid, model, disc, run, a, b, t_star


def _write_snapshots(cfg, run, out, chash):
    stride = int(cfg["output"]["snapshot_stride"])
    written = []
    if stride > 0:
        for idx in range(0, len(run.snapshots), stride):
            t, fld = run.snapshots[idx]
            p = out / f"phi_{idx:05d}.csv"
            gridio.write_grid_csv(p, run.grid, fld, {"time": f"{t:.12g}", "config": chash})
            written.append(str(p))
    return written


def cmd_synth(cfg) -> dict:
    grid = build_grid(cfg)
    out = _out_dir(cfg)
    chash = config_hash(cfg)
    path = out / "terrain.asc"
    write_esri_ascii(grid, path)
    # .asc has no comment syntax; provenance goes in a sidecar
    (out / "terrain.asc.meta").write_text(f"config={chash}\n")
    return {"command": "synth", "config": chash, "file": str(path),
            "nx": grid.nx, "ny": grid.ny,
            "elevation_range": [float(grid.elevation.min()), float(grid.elevation.max())]}


def cmd_solve(cfg) -> dict:
    grid, model, disc, run, a, b, t_star = _solve_forward(cfg)
    out = _out_dir(cfg)
    chash = config_hash(cfg)
    arrival_path = out / "arrival.csv"
    gridio.write_grid_csv(arrival_path, grid, run.arrival,
                          {"time": f"{run.time:.12g}", "config": chash})
    snaps = _write_snapshots(cfg, run, out, chash)
    return {"command": "solve", "config": chash, "t_star": t_star,
            "steps": run.steps_taken, "arrival_csv": str(arrival_path),
            "snapshots": snaps}


def cmd_path(cfg) -> dict:
    grid, model, disc, run, a, b, t_star = _solve_forward(cfg)
    trace = extract_path(run, b, t_star, build_path_options(cfg))
    length, _ = path_length_time(trace)
    out = _out_dir(cfg)
    chash = config_hash(cfg)
    gj = out / "path.geojson"
    geojson.write(gj, geojson.feature_collection(
        [geojson.trace_feature(trace)], {"config": chash}))
    csv_path = out / "path.csv"
    with open(csv_path, "w") as f:
        f.write(f"# config={chash}\n")
        f.write("tau,x,y,p_x,p_y\n")
        for tau, xy, p in zip(trace.taus, trace.points, trace.momenta):
            f.write(f"{tau:.12g},{xy[0]:.12g},{xy[1]:.12g},{p[0]:.12g},{p[1]:.12g}\n")
    snaps = _write_snapshots(cfg, run, out, chash)
    return {"command": "path", "config": chash, "t_star": t_star,
            "terminus": trace.terminus, "arc_length": length,
            "geojson": str(gj), "csv": str(csv_path), "snapshots": snaps}


def cmd_ensemble(cfg) -> dict:
    grid = build_grid(cfg)
    model = build_model(cfg)
    disc = build_disc(cfg)
    b = require_point(cfg, "b")
    reg = cfg["region"]
    if reg["center"] is None:
        raise ConfigError("region.center is required for ensemble")
    region = StartRegion(center=(float(reg["center"][0]), float(reg["center"][1])),
                         radius=float(reg["radius"]))
    ens = cfg["ensemble"]
    delta = cfg["solver"]["delta"]
    result = run_ensemble(
        grid, model, disc, b, region,
        n=int(ens["n"]), k=int(ens["k"]), L=int(ens["resample"]),
        seed=int(ens["seed"]), delta=None if delta is None else float(delta),
        solver_options=build_solver_options(cfg),
        path_options=build_path_options(cfg),
    )
    out = _out_dir(cfg)
    chash = config_hash(cfg)

    features = []
    for idx, trace in enumerate(result.traces):
        if trace is None:
            continue
        features.append(geojson.trace_feature(
            trace, {"kind": "path", "index": idx, "cluster": int(result.labels[idx])}))
    for c in range(result.representatives.shape[0]):
        features.append(geojson.linestring_feature(
            result.representatives[c],
            {"kind": "representative", "cluster": c}))
    gj = out / "paths.geojson"
    geojson.write(gj, geojson.feature_collection(features, {"config": chash}))

    csv_path = out / "summary.csv"
    arrival_ts = [tr.t_star if tr is not None else float("nan") for tr in result.traces]
    with open(csv_path, "w") as f:
        f.write(f"# config={chash}\n")
        f.write("start_x,start_y,t_star,label\n")
        for (sx, sy), ts, lab in zip(result.starts, arrival_ts, result.labels):
            f.write(f"{sx:.12g},{sy:.12g},{ts:.12g},{int(lab)}\n")

    fr_path = out / "fractions.json"
    with open(fr_path, "w") as f:
        f.write(json.dumps({
            "config": chash,
            "fractions": [float(x) for x in result.fractions],
            "counts": [int((result.labels == c).sum())
                       for c in range(result.representatives.shape[0])],
            "n_failed": result.n_failed,
            "seed": result.seed,
        }, sort_keys=True) + "\n")

    return {"command": "ensemble", "config": chash,
            "fractions": [float(x) for x in result.fractions],
            "n_failed": result.n_failed, "geojson": str(gj),
            "summary_csv": str(csv_path), "fractions_json": str(fr_path)}


def cmd_oracle(cfg) -> dict:
    grid = build_grid(cfg)
    model = build_model(cfg)
    a = require_point(cfg, "a")
    b = require_point(cfg, "b")
    stencil = cfg["oracle"]["stencil"]
    src = grid.nearest_node(a)
    tgt = grid.nearest_node(b)
    times = dijkstra_times(grid, model, src, stencil)
    _, t_oracle = dijkstra_path(grid, model, src, tgt, stencil)

    grid_, model_, disc, run, a_, b_, t_hjb = _solve_forward(cfg)
    out = _out_dir(cfg)
    chash = config_hash(cfg)
    times_path = out / "oracle_times.csv"
    gridio.write_grid_csv(times_path, grid, times,
                          {"stencil": stencil, "config": chash})
    delta_rel = (t_hjb - t_oracle) / t_oracle
    report = {"config": chash, "stencil": stencil, "t_oracle": t_oracle,
              "t_hjb": t_hjb, "delta_rel": delta_rel}
    report_path = out / "oracle_report.json"
    with open(report_path, "w") as f:
        f.write(json.dumps(report, sort_keys=True) + "\n")
    return {"command": "oracle", **report,
            "times_csv": str(times_path), "report": str(report_path)}


def cmd_plot(args) -> dict:
    inputs = [args.terrain] + list(args.snapshots or ()) + ([args.paths] if args.paths else [])
    if args.terrain is None:
        raise ConfigError("plot needs at least --terrain")
    for p in inputs:
        if p and not Path(p).exists():
            raise ConfigError(f"plot input {p} does not exist")
    chash = config_hash({"terrain": args.terrain, "snapshots": list(args.snapshots or ()),
                         "paths": args.paths})
    grid = load_esri_ascii(args.terrain)
    scene = ScenePlot(grid.bounds, config_hash=chash)
    scene.elevation_contours(grid)
    for snap in args.snapshots or ():
        _, fld = gridio.read_grid_csv(snap)
        scene.front(grid, fld)
    if args.paths:
        with open(args.paths) as f:
            fc = json.load(f)
        for feat in fc.get("features", ()):
            geom = feat.get("geometry", {})
            if geom.get("type") != "LineString":
                continue
            props = feat.get("properties", {})
            cluster = int(props.get("cluster", 0))
            color = PATH_COLORS[cluster % len(PATH_COLORS)] if cluster >= 0 else "#444444"
            width = 2.5 if props.get("kind") == "representative" else 1.0
            scene.polyline(geom["coordinates"], color, width)
    out_path = Path(args.out or "plot.svg")
    scene.write(out_path)
    return {"command": "plot", "config": chash, "svg": str(out_path)}


def _add_config_args(sub):
    sub.add_argument("-c", "--config", default=None, help="YAML config file")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY.PATH=VALUE", help="override a config value (repeatable)")
    sub.add_argument("-o", "--output-dir", default=None, help="override output.dir")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="walkfront",
        description="Terrain-aware optimal walking paths via level-set fronts",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("synth", "solve", "path", "ensemble", "oracle"):
        _add_config_args(subs.add_parser(name))
    plot = subs.add_parser("plot")
    plot.add_argument("--terrain", default=None, help="ESRI ASCII terrain file")
    plot.add_argument("--snapshot", dest="snapshots", action="append", default=[],
                      metavar="CSV", help="phi snapshot CSV (repeatable)")
    plot.add_argument("--paths", default=None, help="paths GeoJSON file")
    plot.add_argument("--out", default=None, help="output SVG path")

    args = parser.parse_args(argv)
    try:
        if args.command == "plot":
            summary = cmd_plot(args)
        else:
            overrides = list(args.overrides)
            if args.output_dir:
                overrides.append(f"output.dir={args.output_dir}")
            cfg = load_config(args.config, overrides)
            summary = {
                "synth": cmd_synth,
                "solve": cmd_solve,
                "path": cmd_path,
                "ensemble": cmd_ensemble,
                "oracle": cmd_oracle,
            }[args.command](cfg)
    except _CONFIG_EXIT as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_EXIT as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except UnreachableError as exc:
        print(f"unreachable: {exc}", file=sys.stderr)
        return 4
    _emit(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
