"""GeoJSON emission for paths and ensembles.

Output is deterministic: keys are sorted and floats use repr, so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .path import PathTrace

__all__ = [
    "trace_feature",
    "linestring_feature",
    "point_feature",
    "feature_collection",
    "dumps",
    "write",
]


def _coords(points) -> list:
    return [[float(x), float(y)] for x, y in np.asarray(points)]


def linestring_feature(points, properties: dict | None = None) -> dict:
    return {
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": _coords(points)},
        "properties": properties or {},
    }


def point_feature(point, properties: dict | None = None) -> dict:
    return {
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [float(point[0]), float(point[1])]},
        "properties": properties or {},
    }


def trace_feature(trace: PathTrace, properties: dict | None = None) -> dict:
    props = {"t_star": float(trace.t_star), "terminus": trace.terminus}
    props.update(properties or {})
    return linestring_feature(trace.points, props)


def feature_collection(features, properties: dict | None = None) -> dict:
    fc = {"type": "FeatureCollection", "features": list(features)}
    if properties:
        fc["properties"] = properties
    return fc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write(path, obj) -> None:
    with open(path, "w") as f:
        f.write(dumps(obj))
