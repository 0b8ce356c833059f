"""Point clouds, direction-scaled metrics, rotations, and dissimilarity matrices.

A point cloud is a plain ``(m, n)`` float array.  The direction-scaled
metric stretches distances along a unit direction ``u`` by a factor
``alpha`` and leaves the orthogonal complement untouched; it is realised
by the linear map ``U^-1 diag(alpha, 1, ..., 1) U`` where ``U`` changes
basis so that ``u`` becomes the first axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DataError, InvalidProbeError, ResourceBudgetError

DEFAULT_POINT_CAP = 20_000
UNIT_NORM_TOL = 1e-12


def validate_cloud(points, min_points=1):
    """Coerce to a finite float (m, n) array with n >= 2.

    Raises DataError on ragged, non-finite, too-small, or mis-shaped input.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1 and X.size == 0:
        raise DataError("empty point cloud")
    if X.ndim != 2:
        raise DataError(f"point cloud must be a 2d array, got ndim={X.ndim}")
    if X.shape[1] < 2:
        raise DataError(f"points must have dimension >= 2, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise DataError("point cloud contains non-finite coordinates")
    if X.shape[0] < min_points:
        raise DataError(f"need at least {min_points} points, got {X.shape[0]}")
    return X


def canonical_angle(psi):
    """Reduce an angle to [0, pi); a direction and its negation coincide."""
    return float(np.mod(psi, np.pi))


@dataclass(frozen=True)
class ProbeSpec:
    """A probing deformation: unit direction and scaling factor alpha > 0."""

    direction: np.ndarray
    factor: float

    def __post_init__(self):
        u = np.asarray(self.direction, dtype=float)
        if u.ndim != 1 or u.size < 2 or not np.all(np.isfinite(u)):
            raise InvalidProbeError(f"probe direction must be a finite vector, got {u!r}")
        if abs(np.linalg.norm(u) - 1.0) > UNIT_NORM_TOL:
            raise InvalidProbeError(
                f"probe direction must be a unit vector (|u|={np.linalg.norm(u)!r})"
            )
        if not (np.isfinite(self.factor) and self.factor > 0):
            raise InvalidProbeError(f"probe factor must be > 0, got {self.factor}")
        u = u.copy()
        u.flags.writeable = False
        object.__setattr__(self, "direction", u)
        object.__setattr__(self, "factor", float(self.factor))

    @classmethod
    def from_angle(cls, psi, factor):
        """2d probe from an angle (canonicalised mod pi)."""
        psi = canonical_angle(psi)
        return cls(np.array([math.cos(psi), math.sin(psi)]), factor)

    @property
    def dim(self):
        return self.direction.size

    @property
    def angle(self):
        """Direction angle in [0, pi); 2d probes only."""
        if self.dim != 2:
            raise DataError("angle is only defined for 2d probes")
        return canonical_angle(math.atan2(self.direction[1], self.direction[0]))


def scaling_map(probe: ProbeSpec) -> np.ndarray:
    """Matrix of the scaling x -> U^-1 diag(alpha,1,...,1) U x.

    The orthonormal completion of the direction is built from a single
    Householder reflection swapping e1 and u, which makes the map
    deterministic; independence from the choice of completion is a tested
    property, not an assumption.
    """
    u = probe.direction
    n = u.size
    e1 = np.zeros(n)
    e1[0] = 1.0
    v = e1 - u
    vv = float(v @ v)
    if vv < 1e-30:
        H = np.eye(n)
    else:
        H = np.eye(n) - 2.0 * np.outer(v, v) / vv
    d = np.ones(n)
    d[0] = probe.factor
    # H is symmetric orthogonal with H e1 = u, so H == U^-1 and H == U^T.
    return H @ (d[:, None] * H)


def scale_points(X, probe: ProbeSpec):
    """Apply the probe's anisotropic scaling to every point."""
    X = validate_cloud(X, min_points=1)
    if X.shape[1] != probe.dim:
        raise DataError(
            f"dimension mismatch: points are {X.shape[1]}d, probe is {probe.dim}d"
        )
    return X @ scaling_map(probe).T


def anisotropic_distance(x, y, probe: ProbeSpec):
    """Distance between two points under the probe's scaled metric."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size != probe.dim:
        raise DataError("points and probe direction must share one dimension")
    return float(np.linalg.norm(scaling_map(probe) @ (x - y)))


def distance_matrix(X, probe: ProbeSpec | None = None, point_cap=DEFAULT_POINT_CAP):
    """Dense symmetric pairwise distance matrix, optionally under a probe.

    Refuses clouds above ``point_cap`` points: a dense matrix for very
    large clouds would exhaust memory, and the 0-dimensional path can run
    threshold-free on coordinates instead.
    """
    X = validate_cloud(X, min_points=2)
    if X.shape[0] > point_cap:
        raise ResourceBudgetError(
            f"cloud has {X.shape[0]} points, above the dense-matrix cap of "
            f"{point_cap}; raise point_cap or subsample"
        )
    Y = scale_points(X, probe) if probe is not None else X
    return squareform(pdist(Y))


def validate_dissimilarity(D):
    """Check symmetry, zero diagonal, nonnegativity, finiteness."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DataError("dissimilarity matrix must be square")
    if not np.all(np.isfinite(D)):
        raise DataError("dissimilarity matrix contains non-finite entries")
    if np.any(np.diag(D) != 0):
        raise DataError("dissimilarity matrix must have a zero diagonal")
    if not np.allclose(D, D.T, rtol=0, atol=1e-12):
        raise DataError("dissimilarity matrix must be symmetric")
    if np.any(D < 0):
        raise DataError("dissimilarity matrix must be nonnegative")
    return D


def rotate_cloud(X, theta):
    """Rotate a 2d cloud by theta radians about the origin."""
    X = validate_cloud(X, min_points=1)
    if X.shape[1] != 2:
        raise DataError("rotate_cloud requires a 2d cloud")
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    return X @ R.T


def outlier_dissimilarity(X, delta):
    """Density-rescaled dissimilarity d_mu(x,y) = 2 d(x,y) / (mu(x) + mu(y)).

    Local weights are mu(x) = f(x) |X| / sum_y f(y) with
    f(x) = sum_{y != x} exp(-d(x,y)^2 / delta).  As delta -> 0 the weights
    tend to one and the Euclidean matrix is recovered.  Only symmetry and
    the zero diagonal are guaranteed; this is a dissimilarity, not a
    verified metric.
    """
    if not (np.isfinite(delta) and delta > 0):
        raise DataError(f"delta must be > 0, got {delta}")
    D = distance_matrix(X)
    m = D.shape[0]
    K = np.exp(-(D ** 2) / delta)
    f = K.sum(axis=1) - 1.0  # remove the y == x term (exp(0) == 1)
    total = f.sum()
    if total <= 0:
        # All kernel mass underflowed; the delta -> 0 limit is the plain metric.
        mu = np.ones(m)
    else:
        mu = f * m / total
    denom = mu[:, None] + mu[None, :]
    off = ~np.eye(m, dtype=bool)
    if np.any(denom[off] <= 0):
        raise DataError(
            "degenerate density weights (some mu(x) + mu(y) <= 0); increase delta"
        )
    out = np.zeros_like(D)
    out[off] = 2.0 * D[off] / denom[off]
    return out


def save_cloud_csv(path, X, header=True):
    """Write a cloud as comma-separated rows with 9 significant digits."""
    X = validate_cloud(X, min_points=1)
    with open(path, "w") as fh:
        if header:
            fh.write("# " + ",".join(f"x{i}" for i in range(X.shape[1])) + "\n")
        for row in X:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


def load_cloud_csv(path):
    """Read a point-cloud CSV (optional single '#' header line)."""
    try:
        X = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise DataError(f"could not parse point-cloud CSV {path}: {exc}") from exc
    return validate_cloud(X, min_points=1)
