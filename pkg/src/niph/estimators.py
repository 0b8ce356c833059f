"""scikit-learn style estimators wrapping the pipeline.

Both estimators consume an (m, 2) point-cloud array through ``fit`` and
expose the recovered orientation parameters as fitted attributes, so they
compose with sklearn tooling (``get_params`` / ``set_params`` / ``clone``).
"""

from __future__ import annotations

import math

from sklearn.base import BaseEstimator

from .geometry import validate_cloud
from .model import pca_orientation
from .pipeline import NiphConfig, ProbePlan, run_niph


class NiphOrientation(BaseEstimator):
    """Estimate orientation, orientational variance, and axis scaling of a
    2d point cloud from shifts of persistent homology under direction-scaled
    metrics.

    Parameters mirror the pipeline: ``n_directions`` evenly spaced probe
    angles, one or more ``scales`` (> 1), the homology ``dim`` (0 or 1,
    dim 1 requires ``r_max``), and the death-distribution ``weighting``.
    """

    def __init__(self, n_directions=8, scales=(2.0,), dim=1,
                 weighting="persistence-diff", r_max=None, seed=0,
                 threads=None, v_max=1.0, s_max=10.0, fit_maxfun=5000):
        self.n_directions = n_directions
        self.scales = scales
        self.dim = dim
        self.weighting = weighting
        self.r_max = r_max
        self.seed = seed
        self.threads = threads
        self.v_max = v_max
        self.s_max = s_max
        self.fit_maxfun = fit_maxfun

    def fit(self, X, y=None):
        X = validate_cloud(X, min_points=2)
        plan = ProbePlan(
            n_directions=self.n_directions,
            factors=tuple(self.scales),
            dim=self.dim,
            weighting=self.weighting,
        )
        cfg = NiphConfig(
            r_max=self.r_max,
            seed=self.seed,
            threads=self.threads,
            v_max=self.v_max,
            s_max=self.s_max,
            fit_maxfun=self.fit_maxfun,
        )
        report = run_niph(X, plan, cfg)
        self.report_ = report
        self.phi_ = report.fit.phi
        self.var_ = report.fit.var
        self.s_ = report.fit.s
        self.residual_ = report.fit.residual
        return self

    @property
    def phi_deg_(self):
        return math.degrees(self.phi_)


class PcaOrientation(BaseEstimator):
    """Global-covariance orientation baseline: leading eigenvector angle
    (mod pi) and eigenvalue anisotropy ratio."""

    def fit(self, X, y=None):
        angle, ratio = pca_orientation(validate_cloud(X, min_points=2))
        self.angle_ = angle
        self.ratio_ = ratio
        return self
