"""Synthetic point-cloud generators: rotated noisy grids and oriented shape fields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .geometry import rotate_cloud, validate_cloud


@dataclass(frozen=True)
class GridSpec:
    """Rotated n1 x n2 grid with spacings d1 < d2 and bounded additive noise."""

    n1: int
    n2: int
    d1: float
    d2: float
    phi: float = 0.0
    noise_bound: float = 0.0
    seed: int = 0
    noise_model: str = "uniform"  # gaussian available, excluded from guarantees

    def __post_init__(self):
        if self.n1 <= 1 or self.n2 <= 1:
            raise DataError("grid counts n1, n2 must be > 1")
        if not (0 < self.d1 < self.d2):
            raise DataError("grid spacings must satisfy 0 < d1 < d2")
        if self.noise_bound < 0:
            raise DataError("noise_bound must be >= 0")
        if self.noise_model not in ("uniform", "gaussian"):
            raise DataError(f"unknown noise model {self.noise_model!r}")


def gen_grid(spec: GridSpec):
    """Grid points (i d1, j d2), perturbed by per-coordinate noise, then rotated.

    Uniform noise is drawn from [-noise_bound, noise_bound] per coordinate so
    that the noisy-grid guarantee bounds apply; the gaussian model uses the
    bound as standard deviation and carries no guarantee.
    """
    ii, jj = np.meshgrid(
        np.arange(spec.n1) * spec.d1, np.arange(spec.n2) * spec.d2, indexing="ij"
    )
    pts = np.column_stack([ii.ravel(), jj.ravel()])
    if spec.noise_bound > 0:
        rng = np.random.default_rng(spec.seed)
        if spec.noise_model == "uniform":
            pts = pts + rng.uniform(-spec.noise_bound, spec.noise_bound, pts.shape)
        else:
            pts = pts + rng.normal(0.0, spec.noise_bound, pts.shape)
    if spec.phi != 0.0:
        pts = rotate_cloud(pts, spec.phi)
    return pts


@dataclass(frozen=True)
class ShapeFieldSpec:
    """Field of oriented shapes with mean orientation phi and variance var.

    ``s`` is the long-axis / short-axis ratio, ``size_range`` the short-axis
    lengths, ``region`` the side of the square holding the shape centers.
    """

    count: int
    phi: float = 0.0
    var: float = 0.0
    s: float = 1.0
    size_range: tuple = (0.2, 2.0)
    points_per_shape: int = 100
    region: float = 3000.0
    shape: str = "ellipse"
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise DataError("count must be >= 1")
        if self.s < 1:
            raise DataError("scaling factor s must be >= 1")
        if self.var < 0:
            raise DataError("orientational variance must be >= 0")
        lo, hi = self.size_range
        if not (0 < lo <= hi):
            raise DataError("size_range must satisfy 0 < low <= high")
        if self.points_per_shape < 1:
            raise DataError("points_per_shape must be >= 1")
        if self.region <= 0:
            raise DataError("region side must be > 0")
        if self.shape not in ("ellipse", "rectangle", "circle"):
            raise DataError(f"unknown shape {self.shape!r}")


def sample_shape_boundary(center, short_axis, orientation, s, n_points, rng,
                          shape="ellipse"):
    """Sample n_points on the boundary of one oriented shape.

    Ellipses are sampled uniformly in the angle parameter; rectangles
    uniformly by perimeter length (the rectangle model underlying the
    expected-peak formulas assumes length-uniform boundaries).
    """
    center = np.asarray(center, dtype=float)
    b = short_axis / 2.0
    a = s * b
    if shape in ("ellipse", "circle"):
        if shape == "circle":
            a = b
        t = rng.uniform(0.0, 2.0 * math.pi, n_points)
        local = np.column_stack([a * np.cos(t), b * np.sin(t)])
    else:
        sides = np.array([2 * a, 2 * b, 2 * a, 2 * b])
        edges = np.concatenate([[0.0], np.cumsum(sides)])
        t = rng.uniform(0.0, edges[-1], n_points)
        side = np.searchsorted(edges, t, side="right") - 1
        side = np.clip(side, 0, 3)
        u = t - edges[side]
        local = np.empty((n_points, 2))
        for k, (x0, y0, dx, dy) in enumerate(
            [(-a, -b, 1, 0), (a, -b, 0, 1), (a, b, -1, 0), (-a, b, 0, -1)]
        ):
            m = side == k
            local[m, 0] = x0 + dx * u[m]
            local[m, 1] = y0 + dy * u[m]
    c, sn = math.cos(orientation), math.sin(orientation)
    R = np.array([[c, -sn], [sn, c]])
    return local @ R.T + center


def gen_shape_field(spec: ShapeFieldSpec, return_meta=False):
    """Generate a shape field; per-shape RNG streams keyed on (seed, index).

    With ``return_meta`` also returns a dict of per-shape centers,
    orientations, and short-axis lengths.
    """
    s = 1.0 if spec.shape == "circle" else spec.s
    clouds = []
    centers = np.empty((spec.count, 2))
    orientations = np.empty(spec.count)
    sizes = np.empty(spec.count)
    lo, hi = spec.size_range
    for k in range(spec.count):
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, k]))
        center = rng.uniform(0.0, spec.region, 2)
        orientation = spec.phi + rng.normal(0.0, math.sqrt(spec.var)) if spec.var > 0 \
            else spec.phi
        size = rng.uniform(lo, hi)
        centers[k] = center
        orientations[k] = orientation
        sizes[k] = size
        clouds.append(
            sample_shape_boundary(center, size, orientation, s,
                                  spec.points_per_shape, rng, spec.shape)
        )
    X = validate_cloud(np.vstack(clouds))
    if return_meta:
        return X, {"centers": centers, "orientations": orientations, "sizes": sizes}
    return X
