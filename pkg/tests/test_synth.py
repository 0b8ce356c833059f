import math

import numpy as np
import pytest

from niph.errors import DataError
from niph.geometry import rotate_cloud
from niph.synth import (
    GridSpec,
    ShapeFieldSpec,
    gen_grid,
    gen_shape_field,
    sample_shape_boundary,
)


def test_grid_spec_validation():
    with pytest.raises(DataError):
        GridSpec(n1=1, n2=3, d1=1.0, d2=2.0)
    with pytest.raises(DataError):
        GridSpec(n1=3, n2=3, d1=2.0, d2=1.0)
    with pytest.raises(DataError):
        GridSpec(n1=3, n2=3, d1=1.0, d2=2.0, noise_bound=-0.1)
    with pytest.raises(DataError):
        GridSpec(n1=3, n2=3, d1=1.0, d2=2.0, noise_model="poisson")


def test_clean_grid_positions():
    spec = GridSpec(n1=3, n2=2, d1=1.0, d2=2.5, phi=0.3)
    X = gen_grid(spec)
    expect = rotate_cloud(
        np.array([[i * 1.0, j * 2.5] for i in range(3) for j in range(2)]), 0.3
    )
    assert X.shape == (6, 2)
    assert np.allclose(np.sort(X, axis=0), np.sort(expect, axis=0), atol=1e-12)


def test_grid_noise_bound_per_coordinate():
    clean = gen_grid(GridSpec(n1=6, n2=6, d1=1.0, d2=2.0))
    noisy = gen_grid(GridSpec(n1=6, n2=6, d1=1.0, d2=2.0, noise_bound=0.05, seed=3))
    delta = noisy - clean
    assert np.abs(delta).max() <= 0.05
    assert np.abs(delta).max() > 0.0


def test_grid_determinism():
    spec = GridSpec(n1=4, n2=4, d1=1.0, d2=2.0, noise_bound=0.1, seed=7)
    assert np.array_equal(gen_grid(spec), gen_grid(spec))
    other = GridSpec(n1=4, n2=4, d1=1.0, d2=2.0, noise_bound=0.1, seed=8)
    assert not np.array_equal(gen_grid(spec), gen_grid(other))


def test_ellipse_boundary_equation(rng):
    center = np.array([2.0, -1.0])
    theta = 0.6
    pts = sample_shape_boundary(center, 1.0, theta, 3.0, 200, rng, "ellipse")
    local = rotate_cloud(pts - center, -theta)
    a, b = 3.0 * 0.5, 0.5
    assert np.allclose((local[:, 0] / a) ** 2 + (local[:, 1] / b) ** 2, 1.0, atol=1e-10)


def test_rectangle_boundary_equation(rng):
    pts = sample_shape_boundary(np.zeros(2), 1.0, 0.0, 2.0, 400, rng, "rectangle")
    a, b = 1.0, 0.5
    on_edge = np.maximum(np.abs(pts[:, 0]) / a, np.abs(pts[:, 1]) / b)
    assert np.allclose(on_edge, 1.0, atol=1e-10)
    assert np.all(np.abs(pts[:, 0]) <= a + 1e-10)
    assert np.all(np.abs(pts[:, 1]) <= b + 1e-10)


def test_rectangle_length_uniform(rng):
    # sides a:b = 2:1, so long-side hits should be about twice short-side hits
    pts = sample_shape_boundary(np.zeros(2), 1.0, 0.0, 2.0, 40_000, rng, "rectangle")
    a, b = 1.0, 0.5
    on_long = np.abs(np.abs(pts[:, 1]) - b) < 1e-9
    frac_long = on_long.mean()
    assert abs(frac_long - 2.0 / 3.0) < 0.01


def test_circle_forces_unit_ratio(rng):
    pts = sample_shape_boundary(np.zeros(2), 1.0, 0.0, 5.0, 100, rng, "circle")
    assert np.allclose(np.linalg.norm(pts, axis=1), 0.5, atol=1e-10)


def test_shape_field_spec_validation():
    with pytest.raises(DataError):
        ShapeFieldSpec(count=0)
    with pytest.raises(DataError):
        ShapeFieldSpec(count=3, s=0.5)
    with pytest.raises(DataError):
        ShapeFieldSpec(count=3, var=-1.0)
    with pytest.raises(DataError):
        ShapeFieldSpec(count=3, size_range=(0.0, 1.0))
    with pytest.raises(DataError):
        ShapeFieldSpec(count=3, shape="triangle")


def test_shape_field_meta_and_determinism():
    spec = ShapeFieldSpec(count=5, phi=0.4, var=0.0, s=2.0,
                          points_per_shape=30, region=100.0, seed=11)
    X1, meta = gen_shape_field(spec, return_meta=True)
    X2 = gen_shape_field(spec)
    assert np.array_equal(X1, X2)
    assert X1.shape == (150, 2)
    assert np.all(meta["orientations"] == 0.4)
    assert np.all((meta["centers"] >= 0) & (meta["centers"] <= 100.0))
    lo, hi = spec.size_range
    assert np.all((meta["sizes"] >= lo) & (meta["sizes"] <= hi))


def test_shape_field_orientation_variance():
    spec = ShapeFieldSpec(count=400, phi=1.0, var=0.04, s=2.0,
                          points_per_shape=1, region=1000.0, seed=2)
    _, meta = gen_shape_field(spec, return_meta=True)
    spread = meta["orientations"] - 1.0
    assert abs(spread.mean()) < 0.05
    assert abs(spread.std() - 0.2) < 0.03


def test_shape_field_per_shape_streams():
    # the k-th shape must not depend on how many shapes precede it
    small = ShapeFieldSpec(count=2, phi=0.0, s=2.0, points_per_shape=10,
                           region=50.0, seed=9)
    large = ShapeFieldSpec(count=6, phi=0.0, s=2.0, points_per_shape=10,
                           region=50.0, seed=9)
    Xs = gen_shape_field(small)
    Xl = gen_shape_field(large)
    assert np.array_equal(Xs, Xl[: len(Xs)])
