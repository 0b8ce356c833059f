"""Vietoris-Rips persistent homology in dimensions 0 and 1.

Dimension 0 is computed as a minimum spanning tree of the complete
distance graph: the finite death times are exactly the MST edge lengths.
Dimension 1 reduces the triangle boundary matrix over GF(2), restricted
to simplices of diameter <= r_max, with the filtration ordered by
(diameter, dimension, lexicographic vertex order).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree

from ._reduction import reduce_triangle_columns
from .errors import DataError, InvalidWeightingError, ResourceBudgetError
from .geometry import distance_matrix, validate_cloud, validate_dissimilarity

DEFAULT_TRIANGLE_BUDGET = 50_000_000
WEIGHTINGS = ("unit", "persistence-diff", "persistence-ratio")


@dataclass(frozen=True)
class PersistencePair:
    birth: float
    death: float  # math.inf for essential / truncated classes
    dim: int
    death_edge: tuple | None = None

    @property
    def finite(self):
        return math.isfinite(self.death)

    @property
    def persistence(self):
        return self.death - self.birth


@dataclass
class PersistenceDiagram:
    pairs: list
    dim: int
    truncated: int = 0      # 1-cycles alive past r_max (reported as death=inf)
    no_edges: bool = False  # r_max below the shortest pairwise distance

    def finite_pairs(self):
        return [p for p in self.pairs if p.finite]

    def to_json(self):
        return json.dumps(
            [
                {
                    "birth": p.birth,
                    "death": "inf" if not p.finite else p.death,
                    "dim": p.dim,
                    "death_edge": list(p.death_edge) if p.death_edge else None,
                }
                for p in self.pairs
            ]
        )

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("# birth,death,dim,edge_i,edge_j\n")
            for p in self.pairs:
                d = "inf" if not p.finite else f"{p.death:.9g}"
                i, j = p.death_edge if p.death_edge else ("", "")
                fh.write(f"{p.birth:.9g},{d},{p.dim},{i},{j}\n")


@dataclass(frozen=True)
class WeightedDeaths:
    """Finite death times with nonnegative weights; the transport atoms."""

    deaths: np.ndarray
    weights: np.ndarray
    pair_refs: np.ndarray  # indices into the source diagram's pair list

    def __post_init__(self):
        if not (len(self.deaths) == len(self.weights) == len(self.pair_refs)):
            raise DataError("deaths, weights, pair_refs must have equal length")
        if len(self.deaths) == 0:
            raise DataError("empty death distribution")
        if np.any(self.deaths <= 0) or not np.all(np.isfinite(self.deaths)):
            raise DataError("death times must be finite and > 0")
        if np.any(self.weights < 0) or self.weights.sum() <= 0:
            raise DataError("weights must be >= 0 with positive total")


def _as_dissimilarity(data):
    """Accept either a point cloud or a precomputed dissimilarity matrix.

    A square symmetric nonnegative array with zero diagonal is treated as
    a matrix; anything else as point coordinates.
    """
    A = np.asarray(data, dtype=float)
    if (
        A.ndim == 2
        and A.shape[0] == A.shape[1]
        and np.all(np.isfinite(A))
        and np.all(np.diag(A) == 0)
        and np.all(A >= 0)
        and np.allclose(A, A.T, rtol=0, atol=1e-12)
    ):
        return validate_dissimilarity(A)
    return distance_matrix(validate_cloud(A, min_points=2))


def vr_persistence_0(data):
    """0-dimensional diagram: |X| - 1 finite pairs (MST edge lengths) plus
    the one essential class.

    The tree topology comes from a sorted-edge MST; death values are read
    back from the input matrix so they match it bit for bit.  Zero-length
    edges (duplicate points) would give zero-persistence pairs and are
    dropped.
    """
    D = _as_dissimilarity(data)
    m = D.shape[0]
    if m < 2:
        raise DataError("persistence needs at least 2 points")
    # Shift weights so zero distances are not treated as missing edges;
    # the ordering (hence the tree) is unchanged.
    tree = minimum_spanning_tree(csr_matrix(D + 1.0 - np.eye(m)))
    ii, jj = tree.nonzero()
    deaths = D[ii, jj]
    order = np.lexsort((jj, ii, deaths))
    pairs = [
        PersistencePair(0.0, float(deaths[k]), 0, (int(ii[k]), int(jj[k])))
        for k in order
        if deaths[k] > 0
    ]
    pairs.append(PersistencePair(0.0, math.inf, 0, None))
    return PersistenceDiagram(pairs=pairs, dim=0)


def _component_h1(D, idx, r_max, budget_left):
    """Reduce one connected component; returns (pairs, truncated_pairs, n_triangles)."""
    sub = D[np.ix_(idx, idx)]
    m = len(idx)
    adj = (sub <= r_max) & ~np.eye(m, dtype=bool)
    li, lj = np.nonzero(np.triu(adj, 1))
    if li.size == 0:
        return [], [], 0
    ew = sub[li, lj]
    gi, gj = idx[li], idx[lj]
    order = np.lexsort((gj, gi, ew))
    li, lj, ew, gi, gj = li[order], lj[order], ew[order], gi[order], gj[order]
    n_edges = li.size
    rank = np.full((m, m), -1, dtype=np.int64)
    rank[li, lj] = np.arange(n_edges)
    rank[lj, li] = np.arange(n_edges)

    tris_i, tris_j, tris_k = [], [], []
    loc = np.arange(m)
    for e in range(n_edges):
        a, b = li[e], lj[e]
        common = loc[(adj[a] & adj[b]) & (loc > b)]
        if common.size:
            tris_i.append(np.full(common.size, a))
            tris_j.append(np.full(common.size, b))
            tris_k.append(common)
    if not tris_i:
        n_tri = 0
        ti = tj = tk = np.empty(0, dtype=np.int64)
    else:
        ti = np.concatenate(tris_i)
        tj = np.concatenate(tris_j)
        tk = np.concatenate(tris_k)
        n_tri = ti.size
    if n_tri > budget_left:
        raise ResourceBudgetError(
            f"triangle budget exceeded: component needs {n_tri} triangles with "
            f"only {budget_left} left of the configured budget"
        )

    pairs = []
    n_paired = 0
    if n_tri:
        er = np.stack([rank[ti, tj], rank[ti, tk], rank[tj, tk]], axis=1)
        max_rank = er.max(axis=1)
        diam = ew[max_rank]
        t_order = np.lexsort((idx[tk], idx[tj], idx[ti], diam))
        er = np.sort(er[t_order], axis=1).astype(np.int64)
        max_rank = max_rank[t_order]
        diam = diam[t_order]
        pair_edge = reduce_triangle_columns(np.ascontiguousarray(er), n_edges)
        paired_mask = pair_edge >= 0
        n_paired = int(paired_mask.sum())
        for t in np.flatnonzero(paired_mask):
            piv = pair_edge[t]
            birth = float(ew[piv])
            death = float(diam[t])
            if death > birth:
                e = max_rank[t]
                pairs.append(
                    PersistencePair(birth, death, 1, (int(gi[e]), int(gj[e])))
                )

    # Cycle-creating edges never hit by a pivot are 1-cycles still alive at
    # r_max; report them truncated rather than dropping them.
    parent = np.arange(m)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    positive = []
    for e in range(n_edges):
        ra, rb = find(li[e]), find(lj[e])
        if ra == rb:
            positive.append(e)
        else:
            parent[ra] = rb
    paired_ranks = set(int(r) for r in pair_edge[pair_edge >= 0]) if n_tri else set()
    truncated = [
        PersistencePair(float(ew[e]), math.inf, 1, None)
        for e in positive
        if e not in paired_ranks
    ]
    return pairs, truncated, n_tri


def vr_persistence_1(data, r_max, triangle_budget=DEFAULT_TRIANGLE_BUDGET):
    """1-dimensional diagram of the VR filtration capped at radius r_max.

    Classes whose death exceeds r_max are reported with death = inf and
    counted in ``truncated``.  The filtration order is deterministic:
    (diameter, dimension, lexicographic vertex order).
    """
    if not (np.isfinite(r_max) and r_max > 0):
        raise DataError(f"r_max must be finite and > 0, got {r_max}")
    D = _as_dissimilarity(data)
    m = D.shape[0]
    if m < 2:
        raise DataError("persistence needs at least 2 points")
    adj = (D <= r_max) & ~np.eye(m, dtype=bool)
    if not adj.any():
        return PersistenceDiagram(pairs=[], dim=1, no_edges=True)
    n_comp, labels = connected_components(csr_matrix(adj), directed=False)
    pairs, truncated = [], []
    budget_left = triangle_budget
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        if idx.size < 3:
            continue
        p, t, n_tri = _component_h1(D, idx, r_max, budget_left)
        budget_left -= n_tri
        pairs.extend(p)
        truncated.extend(t)
    pairs.sort(key=lambda p: (p.birth, p.death, p.death_edge or ()))
    truncated.sort(key=lambda p: p.birth)
    return PersistenceDiagram(
        pairs=pairs + truncated, dim=1, truncated=len(truncated)
    )


def death_distribution(diagram: PersistenceDiagram, weighting="unit"):
    """Finite death times with weights: unit, death - birth, or death / birth."""
    if weighting not in WEIGHTINGS:
        raise InvalidWeightingError(f"unknown weighting {weighting!r}")
    finite = [(k, p) for k, p in enumerate(diagram.pairs) if p.finite]
    if not finite:
        raise DataError("diagram has no finite pairs")
    refs = np.array([k for k, _ in finite], dtype=np.int64)
    deaths = np.array([p.death for _, p in finite])
    births = np.array([p.birth for _, p in finite])
    if weighting == "unit":
        weights = np.ones_like(deaths)
    elif weighting == "persistence-diff":
        weights = deaths - births
    else:
        if diagram.dim == 0:
            raise InvalidWeightingError(
                "persistence-ratio is undefined for dimension 0 (birth = 0)"
            )
        if np.any(births <= 0):
            raise DataError("persistence-ratio requires strictly positive births")
        weights = deaths / births
    return WeightedDeaths(deaths=deaths, weights=weights, pair_refs=refs)


def death_edge_orientations(diagram: PersistenceDiagram, X, weighting="unit"):
    """Angles (mod pi) of the death edges, with distribution weights.

    Returns (angles, weights) arrays over the finite pairs.
    """
    X = validate_cloud(X, min_points=2)
    if X.shape[1] != 2:
        raise DataError("death-edge orientations require a 2d cloud")
    wd = death_distribution(diagram, weighting)
    angles = np.empty(len(wd.deaths))
    for out, ref in enumerate(wd.pair_refs):
        p = diagram.pairs[ref]
        if p.death_edge is None:
            raise DataError("finite pair without a death edge")
        i, j = p.death_edge
        d = X[j] - X[i]
        angles[out] = np.mod(math.atan2(d[1], d[0]), math.pi)
    return angles, wd.weights.copy()
