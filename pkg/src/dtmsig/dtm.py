"""Distance to a measure (DTM) for finite, possibly weighted, measures.

The DTM at ``x`` with mass ``m`` is the average over ``l`` in ``[0, m]`` of
the smallest radius whose closed ball around ``x`` carries mass strictly
above ``l``.  For a finite measure that integral is a finite sum over the
sorted distances, evaluated here exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .measure_space import FiniteMeasureSpace, MeasureSpaceError

KDTREE_MAX_DIM = 16
_BRUTE_CHUNK = 256
# mN within this of an integer is treated as the integer (k-NN mean path)
_INT_MASS_TOL = 1e-9


def check_mass(m: float) -> float:
    m = float(m)
    if not 0.0 < m <= 1.0:
        raise ValueError(f"mass parameter out of (0,1]: {m!r}")
    return m


@dataclass(frozen=True)
class DTMField:
    """DTM values at a batch of query points."""

    values: np.ndarray
    mass: float
    source: FiniteMeasureSpace

    def __len__(self) -> int:
        return self.values.shape[0]


def _canonical_order(d: np.ndarray, w: np.ndarray) -> np.ndarray:
    # sort by distance, ties by weight: summation order depends only on the (d, w) multiset
    return np.lexsort((w, d))


def pseudo_distance_at(space: FiniteMeasureSpace, query, l: float) -> float:
    """Smallest radius r such that the closed ball B(query, r) has mass > l."""
    l = float(l)
    if not 0.0 <= l < 1.0:
        raise ValueError(f"level must lie in [0, 1), got {l!r}")
    d = space.distances_to(query)
    radii, cum = _ball_masses(d, space.weights)
    k = int(np.searchsorted(cum, l, side="right"))
    return float(radii[min(k, radii.size - 1)])


def _ball_masses(d: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct radii and the mass of the closed ball at each radius."""
    order = _canonical_order(d, w)
    d, w = d[order], w[order]
    cum = np.cumsum(w)
    last = np.r_[d[1:] != d[:-1], True]
    radii, cum = d[last], cum[last]
    cum[-1] = 1.0
    return radii, cum


def _dtm_sorted(d: np.ndarray, w: np.ndarray, m: float) -> float:
    """Segment integral for distances ``d`` and weights ``w`` already in canonical order."""
    cum = np.cumsum(w)
    prev = np.r_[0.0, cum[:-1]]
    seg = np.clip(np.minimum(cum, m) - prev, 0.0, None)
    return float(np.dot(d, seg) / m)


def _dtm_uniform_sorted(d: np.ndarray, n_total: int, m: float) -> float:
    """Uniform weights 1/N: mean of the k nearest distances, fractional last term."""
    mass_count = m * n_total
    k = round(mass_count)
    if abs(mass_count - k) <= _INT_MASS_TOL * max(1.0, mass_count) and k >= 1:
        return float(np.sum(d[:k]) / k)
    k = int(np.floor(mass_count))
    frac = mass_count - k
    return float((np.sum(d[:k]) + frac * d[k]) / mass_count)


def dtm_at(space: FiniteMeasureSpace, query, m: float) -> float:
    """Exact DTM of ``space``'s measure at a single query (index or point)."""
    m = check_mass(m)
    d = space.distances_to(query)
    if space.is_uniform:
        return _dtm_uniform_sorted(np.sort(d), space.n_points, m)
    order = _canonical_order(d, space.weights)
    return _dtm_sorted(d[order], space.weights[order], m)


def neighbors_needed(space: FiniteMeasureSpace, m: float) -> int:
    """A neighbor count whose nearest points always carry mass >= m."""
    n = space.n_points
    if space.is_uniform:
        return min(n, int(np.ceil(m * n - _INT_MASS_TOL * max(1.0, m * n))) + 1)
    wmin = space.weights.min()
    if wmin <= 0:
        return n
    return min(n, int(np.ceil(m / wmin)) + 1)


def _knn(space: FiniteMeasureSpace, queries: np.ndarray | None, k: int,
         workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest support points (distances, indices), ascending.

    ``queries=None`` means all support points.
    """
    if space.is_matrix:
        D = space.distances
        if queries is not None:
            D = D[np.asarray(queries, dtype=np.intp)]
        return _select_rows(D, k)
    Y = space.coords if queries is None else np.asarray(queries, dtype=np.float64)
    if space.dim <= KDTREE_MAX_DIM:
        tree = cKDTree(space.coords)
        dist, idx = tree.query(Y, k=k, workers=workers)
        if k == 1:
            dist, idx = dist[:, None], idx[:, None]
        return dist, idx
    out_d = np.empty((Y.shape[0], k))
    out_i = np.empty((Y.shape[0], k), dtype=np.intp)
    X = space.coords
    for s in range(0, Y.shape[0], _BRUTE_CHUNK):
        block = Y[s:s + _BRUTE_CHUNK]
        D = np.sqrt(np.sum((block[:, None, :] - X[None, :, :]) ** 2, axis=-1))
        out_d[s:s + _BRUTE_CHUNK], out_i[s:s + _BRUTE_CHUNK] = _select_rows(D, k)
    return out_d, out_i


def _select_rows(D: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    if k < D.shape[1]:
        idx = np.argpartition(D, k - 1, axis=1)[:, :k]
    else:
        idx = np.broadcast_to(np.arange(D.shape[1]), D.shape).copy()
    d = np.take_along_axis(D, idx, axis=1)
    order = np.argsort(d, axis=1, kind="stable")
    return np.take_along_axis(d, order, axis=1), np.take_along_axis(idx, order, axis=1)


def _dtm_from_knn(space: FiniteMeasureSpace, dist: np.ndarray, idx: np.ndarray, m: float) -> np.ndarray:
    n = space.n_points
    if space.is_uniform:
        mass_count = m * n
        k = round(mass_count)
        if abs(mass_count - k) <= _INT_MASS_TOL * max(1.0, mass_count) and k >= 1:
            return dist[:, :k].sum(axis=1) / k
        k = int(np.floor(mass_count))
        return (dist[:, :k].sum(axis=1) + (mass_count - k) * dist[:, k]) / mass_count
    out = np.empty(dist.shape[0])
    w_all = space.weights
    for r in range(dist.shape[0]):
        d, w = dist[r], w_all[idx[r]]
        order = _canonical_order(d, w)
        out[r] = _dtm_sorted(d[order], w[order], m)
    return out


def dtm_values(space: FiniteMeasureSpace, m: float, queries=None, workers: int = 1) -> np.ndarray:
    """DTM at every support point (``queries=None``) or at given query points/indices."""
    m = check_mass(m)
    if queries is not None:
        queries = np.asarray(queries)
        if space.is_matrix:
            if queries.ndim != 1 or not np.issubdtype(queries.dtype, np.integer):
                raise MeasureSpaceError("matrix-form spaces accept only index queries")
            if queries.size and (queries.min() < 0 or queries.max() >= space.n_points):
                raise IndexError("query index out of range")
        else:
            if np.issubdtype(queries.dtype, np.integer) and queries.ndim == 1:
                queries = space.coords[queries]
            queries = np.atleast_2d(queries.astype(np.float64))
            if queries.shape[1] != space.dim:
                raise MeasureSpaceError(f"queries have dimension {queries.shape[1]}, space has {space.dim}")
    k = neighbors_needed(space, m)
    dist, idx = _knn(space, queries, k, workers=workers)
    return _dtm_from_knn(space, dist, idx, m)


def dtm_field(space: FiniteMeasureSpace, m: float, queries=None, workers: int = 1) -> DTMField:
    """DTM evaluated over the support (default) or a batch of queries.

    A query that coincides with a support point counts that atom at distance 0.
    """
    values = dtm_values(space, m, queries=queries, workers=workers)
    values.setflags(write=False)
    return DTMField(values=values, mass=float(m), source=space)

