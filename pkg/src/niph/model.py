"""Closed-form expected-peak model, parameter fitting, and the PCA baseline.

The model predicts the peak of a multiplicative shift diagram for data
drawn from oriented rectangles (1-dim homology) or grids (0-dim) with
orientation phi, orientational variance V, and axis ratio s, probed in
direction psi with factor S.  Nonzero variance folds the closed form with
a Gaussian over orientation jitter, approximated by the weighted integral
of the zero-variance peaks (Gauss-Hermite quadrature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import dual_annealing, minimize

from .errors import DataError
from .geometry import ProbeSpec, canonical_angle, validate_cloud

GAUSS_HERMITE_NODES = 33
DEFAULT_V_MAX = 1.0
DEFAULT_S_MAX = 10.0


@lru_cache(maxsize=8)
def _hermite(nodes):
    x, w = np.polynomial.hermite.hermgauss(nodes)
    return x, w


def _peak_1d_zero(delta, S, s):
    c2 = np.cos(delta) ** 2
    s2 = np.sin(delta) ** 2
    g = S * S - 1.0
    return np.minimum(
        S / np.sqrt(1.0 + g * c2), s * S / np.sqrt(1.0 + g * s2)
    )


def _peak_0d_zero(delta, S, s):
    c2 = np.cos(delta) ** 2
    s2 = np.sin(delta) ** 2
    return np.minimum(np.sqrt(S * S * c2 + s2), s)


def _folded(zero_form, psi, S, phi, V, s, nodes):
    psi = np.asarray(psi, dtype=float)
    S = np.asarray(S, dtype=float)
    if np.any(S <= 0):
        raise DataError("probe factor S must be > 0")
    if s < 1:
        raise DataError("scaling factor s must be >= 1")
    if V < 0:
        raise DataError("orientational variance must be >= 0")
    if V == 0:
        return zero_form(phi - psi, S, s)
    x, w = _hermite(nodes)
    t = x * math.sqrt(2.0 * V)
    vals = zero_form(phi + t[:, None] - psi[None, ...], S, s)
    out = (w @ vals.reshape(len(w), -1)).reshape(psi.shape) / math.sqrt(math.pi)
    return out if out.shape else float(out)


def expected_peak_1d(psi, S, phi, V, s, nodes=GAUSS_HERMITE_NODES):
    """Expected shift-diagram peak for 1-dim homology (rectangle model)."""
    return _folded(_peak_1d_zero, psi, S, phi, V, s, nodes)


def expected_peak_0d(psi, S, phi, V, s, nodes=GAUSS_HERMITE_NODES):
    """Expected shift-diagram peak for 0-dim homology (grid model)."""
    return _folded(_peak_0d_zero, psi, S, phi, V, s, nodes)


def angular_error(a, b):
    """Distance between two angles modulo pi, in degrees (range [0, 90])."""
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DataError("angles must be finite")
    d = abs(a - b) % math.pi
    return math.degrees(min(d, math.pi - d))


@dataclass(frozen=True)
class PeakObservation:
    probe: ProbeSpec
    peak: float
    dim: int

    def __post_init__(self):
        if not (np.isfinite(self.peak) and self.peak > 0):
            raise DataError(f"observed peak must be > 0, got {self.peak}")
        if self.dim not in (0, 1):
            raise DataError("homology dimension must be 0 or 1")


@dataclass(frozen=True)
class FitResult:
    phi: float
    var: float
    s: float
    residual: float
    evaluations: int

    @property
    def sqrt_var(self):
        return math.sqrt(self.var)

    def to_dict(self):
        return {
            "phi_rad": self.phi,
            "phi_deg": math.degrees(self.phi),
            "sqrt_var": self.sqrt_var,
            "s": self.s,
            "residual": self.residual,
            "evaluations": self.evaluations,
        }


def fit_parameters(observations, v_max=DEFAULT_V_MAX, s_max=DEFAULT_S_MAX,
                   seed=0, maxfun=5000) -> FitResult:
    """Recover (phi, V, s) from peak observations.

    Globally minimises the sum of squared differences between observed and
    model peaks with seeded dual annealing over the box
    phi in [0, pi) x V in [0, v_max] x s in [1, s_max], then polishes with
    derivative-free simplex descent.
    """
    obs = list(observations)
    if len(obs) < 3:
        raise DataError("need at least 3 peak observations")
    dims = {o.dim for o in obs}
    if len(dims) != 1:
        raise DataError("all observations must share one homology dimension")
    dim = dims.pop()
    psis = np.array([o.probe.angle for o in obs])
    Ss = np.array([o.probe.factor for o in obs])
    peaks = np.array([o.peak for o in obs])
    if len(np.unique(np.round(psis, 12))) < 2:
        raise DataError("observations must span at least 2 distinct directions")
    if not (v_max > 0 and s_max > 1):
        raise DataError("empty optimisation bounds")
    model = expected_peak_1d if dim == 1 else expected_peak_0d

    n_eval = 0

    def objective(theta):
        nonlocal n_eval
        n_eval += 1
        phi, V, s = theta
        r = model(psis, Ss, phi, V, s) - peaks
        return float(r @ r)

    bounds = [(0.0, math.pi), (0.0, v_max), (1.0, s_max)]
    best = dual_annealing(objective, bounds=bounds, seed=seed, maxfun=maxfun)
    polish = minimize(
        objective,
        best.x,
        method="Nelder-Mead",
        bounds=bounds,
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
    )
    x = polish.x if polish.fun <= best.fun else best.x
    fun = min(float(polish.fun), float(best.fun))
    return FitResult(
        phi=canonical_angle(x[0]),
        var=float(max(x[1], 0.0)),
        s=float(max(x[2], 1.0)),
        residual=fun,
        evaluations=n_eval,
    )


def pca_orientation(X):
    """Angle (mod pi) of the leading covariance eigenvector and the
    eigenvalue ratio lambda1 / lambda2 (inf for collinear clouds)."""
    X = validate_cloud(X, min_points=2)
    if X.shape[1] != 2:
        raise DataError("pca_orientation requires a 2d cloud")
    C = np.cov(X.T)
    vals, vecs = np.linalg.eigh(C)
    lam2, lam1 = float(vals[0]), float(vals[1])
    if lam1 <= 0:
        raise DataError("zero covariance: all points coincide")
    lead = vecs[:, 1]
    angle = canonical_angle(math.atan2(lead[1], lead[0]))
    ratio = math.inf if lam2 <= 0 else lam1 / lam2
    return angle, ratio
