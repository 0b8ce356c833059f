import json
import math
from pathlib import Path

import numpy as np
import pytest

from niph.errors import DataError
from niph.network import LineNetwork, load_geojson, sample_network

DATA = Path(__file__).parent / "data"


def write_geojson(path, features):
    path.write_text(json.dumps({"type": "FeatureCollection", "features": features}))


def line(coords, highway=None):
    return {
        "type": "Feature",
        "properties": {"highway": highway},
        "geometry": {"type": "LineString", "coordinates": coords},
    }


def test_load_planar(tmp_path):
    p = tmp_path / "net.geojson"
    write_geojson(p, [line([[0, 0], [1000, 0]], "residential")])
    net = load_geojson(p)
    assert not net.projected
    assert net.tags == ["residential"]
    assert np.allclose(net.segments[0], [[0, 0], [1000, 0]])


def test_load_lonlat_projects_to_meters(tmp_path):
    p = tmp_path / "net.geojson"
    # ~1 degree of longitude at the equator is ~111 km
    write_geojson(p, [line([[10.0, 0.0], [11.0, 0.0]])])
    net = load_geojson(p)
    assert net.projected
    length = np.linalg.norm(net.segments[0][1] - net.segments[0][0])
    assert length == pytest.approx(111_195.0, rel=0.01)


def test_multilinestring(tmp_path):
    p = tmp_path / "net.geojson"
    feat = {
        "type": "Feature",
        "properties": {"highway": "service"},
        "geometry": {
            "type": "MultiLineString",
            "coordinates": [[[0, 0], [500, 0]], [[0, 200], [0, 900]]],
        },
    }
    write_geojson(p, [feat])
    net = load_geojson(p)
    assert len(net.segments) == 2
    assert net.tags == ["service", "service"]


def test_load_errors(tmp_path):
    missing = tmp_path / "nope.geojson"
    with pytest.raises(DataError):
        load_geojson(missing)
    empty = tmp_path / "empty.geojson"
    write_geojson(empty, [])
    with pytest.raises(DataError):
        load_geojson(empty)
    bad = tmp_path / "bad.geojson"
    bad.write_text("{not json")
    with pytest.raises(DataError):
        load_geojson(bad)


def test_network_validation():
    with pytest.raises(DataError):
        LineNetwork(segments=[np.zeros((2, 2))], tags=[])
    with pytest.raises(DataError):
        LineNetwork(segments=[np.zeros((1, 2))], tags=[None])


def test_length_proportional_sampling(tmp_path):
    p = tmp_path / "net.geojson"
    # two pieces with lengths 300 and 900: expect a 1:3 split within 1%
    write_geojson(p, [line([[0, 0], [300, 0]]), line([[0, 500], [900, 500]])])
    net = load_geojson(p)
    X = sample_network(net, count=100_000, seed=0)
    on_long = np.abs(X[:, 1] - 500.0) < 1e-9
    frac_long = float(on_long.mean())
    assert abs(frac_long - 0.75) <= 0.01
    # positions along a piece are uniform
    t = X[on_long, 0] / 900.0
    assert abs(t.mean() - 0.5) < 0.01


def test_road_filter(tmp_path):
    p = tmp_path / "net.geojson"
    write_geojson(p, [
        line([[0, 0], [1000, 0]], "residential"),
        line([[0, 300], [1000, 300]], "motorway"),
    ])
    net = load_geojson(p)
    X = sample_network(net, road_filter=["residential"], count=500, seed=1)
    assert np.all(X[:, 1] == 0.0)
    with pytest.raises(DataError):
        sample_network(net, road_filter=["footway"], count=10)


def test_sampling_determinism(tmp_path):
    p = tmp_path / "net.geojson"
    write_geojson(p, [line([[0, 0], [1000, 0]]), line([[0, 0], [0, 1000]])])
    net = load_geojson(p)
    a = sample_network(net, count=100, seed=5)
    b = sample_network(net, count=100, seed=5)
    assert np.array_equal(a, b)


def test_bundled_fixtures_load():
    grid = load_geojson(DATA / "grid_city.geojson")
    radial = load_geojson(DATA / "radial_city.geojson")
    assert not grid.projected and not radial.projected
    assert len(grid.segments) == 14
    assert "residential" in grid.tags and "secondary" in grid.tags
    assert len(radial.segments) == 26
