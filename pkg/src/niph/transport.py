"""Optimal transport between weighted death distributions and the
multiplicative death-shift statistic.

On the line, the monotone (quantile) coupling is optimal simultaneously
for every convex cost of the difference, so the exact plan is computed by
a north-west-corner sweep over the sorted supports.  An entropic variant
is available for robustness experiments but is never the default.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .density import DensityCurve, find_peak, kde, scott_bandwidth, weighted_std
from .errors import DataError, DegenerateDistributionError
from .geometry import ProbeSpec
from .persistence import WeightedDeaths

_MASS_EPS = 1e-15


@dataclass(frozen=True)
class TransportPlan:
    """Sparse coupling between two normalized discrete measures."""

    rows: int
    cols: int
    i: np.ndarray
    j: np.ndarray
    mass: np.ndarray
    source_mass: np.ndarray
    target_mass: np.ndarray

    def to_dense(self):
        T = np.zeros((self.rows, self.cols))
        np.add.at(T, (self.i, self.j), self.mass)
        return T

    def row_sums(self):
        r = np.zeros(self.rows)
        np.add.at(r, self.i, self.mass)
        return r

    def col_sums(self):
        c = np.zeros(self.cols)
        np.add.at(c, self.j, self.mass)
        return c

    def to_json(self):
        return json.dumps(
            [
                {"i": int(a), "j": int(b), "mass": float(m)}
                for a, b, m in zip(self.i, self.j, self.mass)
            ]
        )


def _normalized(weights):
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if total <= 0:
        raise DataError("distribution has no positive mass")
    return w / total


def ot_1d(mu: WeightedDeaths, nu: WeightedDeaths) -> TransportPlan:
    """Exact optimal plan between two 1d weighted distributions.

    Weights are normalized to probability mass first.  The plan is the
    monotone coupling: both supports sorted ascending, mass matched by a
    north-west-corner sweep; no transported pair ever crosses another.
    """
    wa = _normalized(mu.weights)
    wb = _normalized(nu.weights)
    oa = np.argsort(mu.deaths, kind="stable")
    ob = np.argsort(nu.deaths, kind="stable")
    ii, jj, mm = [], [], []
    a = b = 0
    ra, rb = wa[oa[0]], wb[ob[0]]
    while a < len(oa) and b < len(ob):
        m = min(ra, rb)
        if m > 0:
            ii.append(oa[a])
            jj.append(ob[b])
            mm.append(m)
        ra -= m
        rb -= m
        if ra <= _MASS_EPS:
            a += 1
            if a < len(oa):
                ra = wa[oa[a]]
        if rb <= _MASS_EPS:
            b += 1
            if b < len(ob):
                rb = wb[ob[b]]
    return TransportPlan(
        rows=len(wa),
        cols=len(wb),
        i=np.array(ii, dtype=np.int64),
        j=np.array(jj, dtype=np.int64),
        mass=np.array(mm, dtype=float),
        source_mass=wa,
        target_mass=wb,
    )


def transport_cost(plan: TransportPlan, mu: WeightedDeaths, nu: WeightedDeaths):
    """Total squared-difference cost of a plan."""
    return float(np.sum(plan.mass * (mu.deaths[plan.i] - nu.deaths[plan.j]) ** 2))


def sinkhorn_1d(mu: WeightedDeaths, nu: WeightedDeaths, reg=1e-2,
                max_iter=10_000, tol=1e-9):
    """Entropically regularised plan (robustness experiments only)."""
    if reg <= 0:
        raise DataError("regularisation strength must be > 0")
    a = _normalized(mu.weights)
    b = _normalized(nu.weights)
    C = (mu.deaths[:, None] - nu.deaths[None, :]) ** 2
    K = np.exp(-C / reg)
    u = np.ones_like(a)
    for _ in range(max_iter):
        v = b / (K.T @ u)
        u = a / (K @ v)
        T = u[:, None] * K * v[None, :]
        err = max(
            np.abs(T.sum(axis=1) - a).max(), np.abs(T.sum(axis=0) - b).max()
        )
        if err < tol:
            break
    ii, jj = np.nonzero(T > 0)
    return TransportPlan(
        rows=len(a), cols=len(b), i=ii, j=jj, mass=T[ii, jj],
        source_mass=a, target_mass=b,
    )


def mult_shifts(plan: TransportPlan, D: WeightedDeaths, Dp: WeightedDeaths):
    """Per-source-atom multiplicative shifts under the plan.

    Each shift is the weighted geometric mean of destination/source death
    ratios, the rows of the plan being renormalised to sum to one.
    Returns (shifts, source_indices); atoms with zero marginal mass are
    dropped with a warning.
    """
    if plan.rows != len(D.deaths) or plan.cols != len(Dp.deaths):
        raise DataError("plan shape does not match the death distributions")
    if np.any(D.deaths <= 0) or np.any(Dp.deaths <= 0):
        raise DataError("multiplicative shifts require strictly positive deaths")
    rs = plan.row_sums()
    keep = np.flatnonzero(rs > 0)
    if keep.size < plan.rows:
        warnings.warn(
            f"{plan.rows - keep.size} source atoms carry no transport mass "
            "and were dropped",
            stacklevel=2,
        )
    logacc = np.zeros(plan.rows)
    np.add.at(
        logacc, plan.i, plan.mass * np.log(Dp.deaths[plan.j] / D.deaths[plan.i])
    )
    shifts = np.exp(logacc[keep] / rs[keep])
    return shifts, keep


@dataclass(frozen=True)
class MultShiftDiagram:
    """Shifts with weights, their density curve, and the peak location."""

    shifts: np.ndarray
    weights: np.ndarray
    density: DensityCurve
    peak: float
    probe: ProbeSpec


def shift_diagram(shifts, weights, probe: ProbeSpec,
                  grid_points=512) -> MultShiftDiagram:
    """KDE over the shifts with the diagram weights; peak = density argmax.

    A zero-variance shift set short-circuits: the peak is the unique atom
    and the curve is a narrow kernel around it for plotting.
    """
    shifts = np.asarray(shifts, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if shifts.size == 0:
        raise DataError("empty shift set")
    if np.any(shifts <= 0):
        raise DataError("shifts must be strictly positive")
    if np.any(weights < 0) or weights.sum() <= 0:
        raise DataError("shift weights must be >= 0 with positive total")
    try:
        h = scott_bandwidth(shifts, weights)
    except DegenerateDistributionError:
        atom = float(shifts[np.argmax(weights)])
        h = max(abs(atom) * 1e-3, 1e-9)
        curve = kde(shifts, weights, bandwidth=h, grid_points=grid_points)
        return MultShiftDiagram(shifts, weights, curve, atom, probe)
    curve = kde(shifts, weights, bandwidth=h, grid_points=grid_points)
    peak = float(np.clip(find_peak(curve), shifts.min(), shifts.max()))
    return MultShiftDiagram(shifts, weights, curve, peak, probe)


def shift_diagram_to_csv(path, diagram: MultShiftDiagram):
    with open(path, "w") as fh:
        fh.write("# shift,weight\n")
        for s, w in zip(diagram.shifts, diagram.weights):
            fh.write(f"{s:.9g},{w:.9g}\n")
