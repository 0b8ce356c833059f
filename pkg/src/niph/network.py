"""GeoJSON road networks and length-proportional point sampling."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

EARTH_RADIUS_M = 6_371_000.0


@dataclass
class LineNetwork:
    """Polylines with per-segment road-type tags (projected planar units)."""

    segments: list
    tags: list
    projected: bool = False  # True when lon/lat input was projected to meters

    def __post_init__(self):
        if len(self.segments) != len(self.tags):
            raise DataError("segments and tags must have equal length")
        cleaned = []
        for seg in self.segments:
            a = np.asarray(seg, dtype=float)
            if a.ndim != 2 or a.shape[0] < 2 or a.shape[1] != 2:
                raise DataError("each polyline needs >= 2 two-dimensional vertices")
            if not np.all(np.isfinite(a)):
                raise DataError("polyline contains non-finite coordinates")
            cleaned.append(a)
        self.segments = cleaned


def _looks_like_lonlat(segments):
    for seg in segments:
        if np.abs(seg).max() > 180.0:
            return False
    return True


def _project_equirectangular(segments):
    allpts = np.vstack(segments)
    lon0, lat0 = allpts.mean(axis=0)
    k = math.pi / 180.0
    cos0 = math.cos(lat0 * k)
    return [
        np.column_stack(
            [
                EARTH_RADIUS_M * cos0 * (seg[:, 0] - lon0) * k,
                EARTH_RADIUS_M * (seg[:, 1] - lat0) * k,
            ]
        )
        for seg in segments
    ]


def load_geojson(path) -> LineNetwork:
    """Read a FeatureCollection of LineString / MultiLineString features.

    The road type is taken from ``properties.highway``.  When all
    coordinates fit into [-180, 180] they are interpreted as lon/lat and
    projected to meters with an equirectangular projection around the
    dataset centroid; the network records that this happened.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"could not read GeoJSON {path}: {exc}") from exc
    feats = doc.get("features")
    if feats is None:
        raise DataError("GeoJSON must be a FeatureCollection with 'features'")
    segments, tags = [], []
    for feat in feats:
        geom = feat.get("geometry") or {}
        tag = (feat.get("properties") or {}).get("highway")
        gtype = geom.get("type")
        coords = geom.get("coordinates", [])
        if gtype == "LineString":
            parts = [coords]
        elif gtype == "MultiLineString":
            parts = coords
        else:
            continue
        for part in parts:
            if len(part) >= 2:
                segments.append(np.asarray(part, dtype=float))
                tags.append(tag)
    if not segments:
        raise DataError("no LineString features found")
    projected = False
    if _looks_like_lonlat(segments):
        segments = _project_equirectangular(segments)
        projected = True
    return LineNetwork(segments=segments, tags=tags, projected=projected)


def sample_network(net: LineNetwork, road_filter=None, count=1000, seed=0):
    """Sample points uniformly by length over the filtered polylines.

    A point is placed by drawing a straight piece with probability
    proportional to its length, then a uniform position along it.
    """
    if count < 1:
        raise DataError("count must be >= 1")
    if road_filter is not None:
        allowed = set(road_filter)
        segs = [s for s, t in zip(net.segments, net.tags) if t in allowed]
    else:
        segs = net.segments
    if not segs:
        raise DataError("road filter matched no segments")
    starts, ends = [], []
    for seg in segs:
        starts.append(seg[:-1])
        ends.append(seg[1:])
    starts = np.vstack(starts)
    ends = np.vstack(ends)
    lengths = np.linalg.norm(ends - starts, axis=1)
    total = lengths.sum()
    if total <= 0:
        raise DataError("filtered network has zero total length")
    rng = np.random.default_rng(seed)
    piece = rng.choice(len(lengths), size=count, p=lengths / total)
    t = rng.uniform(0.0, 1.0, count)[:, None]
    return starts[piece] * (1.0 - t) + ends[piece] * t
