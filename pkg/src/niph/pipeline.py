"""Full pipeline orchestration: probe plans, per-probe shift diagrams, fit.

The base persistence diagram is computed once; every probe then computes
persistence under its scaled metric, matches death distributions by exact
1d optimal transport, extracts the multiplicative-shift peak, and the
collected peaks feed the expected-peak model fit.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataError, NiphError, PipelineError
from .geometry import ProbeSpec, distance_matrix, validate_cloud, DEFAULT_POINT_CAP
from .model import FitResult, PeakObservation, fit_parameters
from .persistence import (
    DEFAULT_TRIANGLE_BUDGET,
    death_distribution,
    death_edge_orientations,
    vr_persistence_0,
    vr_persistence_1,
)
from .transport import MultShiftDiagram, mult_shifts, ot_1d, shift_diagram


@dataclass(frozen=True)
class ProbePlan:
    """Evenly spaced probing directions with one or more scaling factors."""

    n_directions: int = 8
    factors: tuple = (2.0,)
    dim: int = 1
    weighting: str = "unit"

    def __post_init__(self):
        if self.n_directions < 2:
            raise DataError("a plan needs at least 2 directions")
        if any(f <= 1 for f in self.factors) or not self.factors:
            raise DataError("all probe factors must be > 1")
        if self.dim not in (0, 1):
            raise DataError("homology dimension must be 0 or 1")
        object.__setattr__(self, "factors", tuple(float(f) for f in self.factors))

    @property
    def angles(self):
        return np.arange(self.n_directions) * math.pi / self.n_directions

    @property
    def probes(self):
        return [
            ProbeSpec.from_angle(psi, f)
            for psi in self.angles
            for f in self.factors
        ]

    @classmethod
    def road_default(cls):
        """15 directions x 9 factors in [1.2, 2.5]; 0-dim, unit weights."""
        return cls(
            n_directions=15,
            factors=tuple(np.linspace(1.2, 2.5, 9)),
            dim=0,
            weighting="unit",
        )

    @classmethod
    def synthetic_default(cls, dim=1, weighting="persistence-diff"):
        """8 directions with factor 2.0, the synthetic-recovery setup."""
        return cls(n_directions=8, factors=(2.0,), dim=dim, weighting=weighting)


@dataclass(frozen=True)
class NiphConfig:
    r_max: float | None = None          # required for dim 1
    seed: int = 0
    threads: int | None = None          # None -> NIPH_THREADS env -> 1
    kde_points: int = 512
    point_cap: int = DEFAULT_POINT_CAP
    triangle_budget: int = DEFAULT_TRIANGLE_BUDGET
    v_max: float = 1.0
    s_max: float = 10.0
    fit_maxfun: int = 5000
    track_death_edges: bool = False

    def resolved_threads(self):
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get("NIPH_THREADS")
        return max(1, int(env)) if env else 1


@dataclass(frozen=True)
class ProbeResult:
    probe: ProbeSpec
    diagram: MultShiftDiagram
    n_atoms: int
    truncated: int


@dataclass
class NiphReport:
    fingerprint: str
    plan: ProbePlan
    probe_results: list
    fit: FitResult
    death_edge_angles: tuple | None = None
    elapsed_s: float = 0.0

    @property
    def observations(self):
        return [
            PeakObservation(r.probe, r.diagram.peak, self.plan.dim)
            for r in self.probe_results
        ]

    def to_dict(self, include_timing=False):
        out = {
            "input_sha256": self.fingerprint,
            "plan": {
                "n_directions": self.plan.n_directions,
                "factors": list(self.plan.factors),
                "dim": self.plan.dim,
                "weighting": self.plan.weighting,
            },
            "probes": [
                {
                    "psi_rad": r.probe.angle,
                    "alpha": r.probe.factor,
                    "peak": r.diagram.peak,
                    "weight_mass": float(r.diagram.weights.sum()),
                    "n_atoms": r.n_atoms,
                    "truncated": r.truncated,
                }
                for r in self.probe_results
            ],
            "fit": self.fit.to_dict(),
        }
        if self.death_edge_angles is not None:
            angles, weights = self.death_edge_angles
            out["death_edge_angles"] = {
                "angles_rad": list(map(float, angles)),
                "weights": list(map(float, weights)),
            }
        if include_timing:
            out["elapsed_s"] = self.elapsed_s
        return out

    def to_json(self, include_timing=False, indent=2):
        # 9-significant-digit float formatting keeps report JSON bit-stable
        # across runs with identical inputs and seeds.
        return json.dumps(
            _round_floats(self.to_dict(include_timing=include_timing)),
            indent=indent,
        )


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def _cloud_fingerprint(X):
    return hashlib.sha256(np.ascontiguousarray(X).tobytes()).hexdigest()


def _persistence(dist, dim, r_max, triangle_budget):
    if dim == 0:
        return vr_persistence_0(dist)
    return vr_persistence_1(dist, r_max, triangle_budget=triangle_budget)


def run_niph(X, plan: ProbePlan, cfg: NiphConfig = NiphConfig()) -> NiphReport:
    """Run the full pipeline and fit (phi, V, s) from the probe peaks.

    Peaks from every (direction, factor) pair enter the fit jointly.  A
    probe whose persistence or transport computation fails aborts the run;
    the raised PipelineError carries the probes completed so far.
    """
    t0 = time.perf_counter()
    X = validate_cloud(X, min_points=2)
    if plan.dim == 1 and cfg.r_max is None:
        raise DataError("dim-1 runs require r_max in the config")
    base_P = _persistence(
        distance_matrix(X, point_cap=cfg.point_cap),
        plan.dim,
        cfg.r_max,
        cfg.triangle_budget,
    )
    base_D = death_distribution(base_P, plan.weighting)

    def one_probe(probe: ProbeSpec) -> ProbeResult:
        # The radius cap grows with the probe factor: a class dying at d in
        # the base metric dies at up to alpha * d in the scaled one.
        r_max = cfg.r_max * probe.factor if cfg.r_max is not None else None
        dist = distance_matrix(X, probe, point_cap=cfg.point_cap)
        P = _persistence(dist, plan.dim, r_max, cfg.triangle_budget)
        D = death_distribution(P, plan.weighting)
        ot_plan = ot_1d(base_D, D)
        shifts, kept = mult_shifts(ot_plan, base_D, D)
        sd = shift_diagram(
            shifts, base_D.weights[kept], probe, grid_points=cfg.kde_points
        )
        return ProbeResult(
            probe=probe, diagram=sd, n_atoms=len(shifts), truncated=P.truncated
        )

    probes = plan.probes
    results = []
    threads = cfg.resolved_threads()
    try:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [pool.submit(one_probe, p) for p in probes]
                for fut in futures:
                    results.append(fut.result())
        else:
            for probe in probes:
                results.append(one_probe(probe))
    except NiphError as exc:
        raise PipelineError(
            f"probe computation failed ({exc}); {len(results)} of "
            f"{len(probes)} probes completed",
            completed=results,
        ) from exc

    observations = [
        PeakObservation(r.probe, r.diagram.peak, plan.dim) for r in results
    ]
    fit = fit_parameters(
        observations,
        v_max=cfg.v_max,
        s_max=cfg.s_max,
        seed=cfg.seed,
        maxfun=cfg.fit_maxfun,
    )
    edge_angles = None
    if cfg.track_death_edges and X.shape[1] == 2:
        edge_angles = death_edge_orientations(base_P, X, plan.weighting)
    return NiphReport(
        fingerprint=_cloud_fingerprint(X),
        plan=plan,
        probe_results=results,
        fit=fit,
        death_edge_angles=edge_angles,
        elapsed_s=time.perf_counter() - t0,
    )
