"""Finite metric-measure spaces and their CSV ingestion."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

WEIGHT_TOL = 1e-12
SYMMETRY_TOL = 1e-12
ASYMMETRY_REJECT = 1e-9


class MeasureSpaceError(ValueError):
    """Raised when input data does not describe a valid finite mm-space."""


class FiniteMeasureSpace:
    """A finite metric-measure space.

    Exactly one of ``coords`` (N x d, Euclidean metric) or ``distances``
    (N x N dissimilarity matrix) is set.  ``weights`` is a probability
    vector; ``None`` means uniform.  Instances are read-only.

    Parameters
    ----------
    coords : array-like of shape (N, d), optional
    distances : array-like of shape (N, N), optional
    weights : array-like of shape (N,), optional
    labels : sequence of str, optional
    strict_metric : bool
        Also check the triangle inequality of a distance matrix (O(N^3)).
    """

    def __init__(self, coords=None, distances=None, weights=None, labels=None,
                 strict_metric: bool = False):
        if (coords is None) == (distances is None):
            raise MeasureSpaceError("give exactly one of coords or distances")

        if coords is not None:
            X = np.array(coords, dtype=np.float64)
            if X.ndim == 1:
                X = X[:, None]
            if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
                raise MeasureSpaceError(f"coords must be a non-empty N x d matrix, got shape {X.shape}")
            if not np.all(np.isfinite(X)):
                raise MeasureSpaceError("coords contain non-finite values")
            X.setflags(write=False)
            self._coords = X
            self._distances = None
            n = X.shape[0]
        else:
            D = np.array(distances, dtype=np.float64)
            _validate_distance_matrix(D)
            if strict_metric:
                check_triangle_inequality(D)
            D.setflags(write=False)
            self._coords = None
            self._distances = D
            n = D.shape[0]

        if weights is None:
            w = np.full(n, 1.0 / n)
            self._uniform = True
        else:
            w = np.array(weights, dtype=np.float64).ravel()
            if w.shape != (n,):
                raise MeasureSpaceError(f"expected {n} weights, got {w.shape[0]}")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise MeasureSpaceError("weights must be finite and nonnegative")
            if abs(w.sum() - 1.0) > WEIGHT_TOL:
                raise MeasureSpaceError(f"weights sum to {w.sum()!r}, not 1")
            self._uniform = bool(np.all(w == w[0]))
        w.setflags(write=False)
        self._weights = w

        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise MeasureSpaceError(f"expected {n} labels, got {len(labels)}")
        self._labels = labels

    @classmethod
    def from_unnormalized(cls, weights, **kwargs) -> "FiniteMeasureSpace":
        """Build a space after dividing ``weights`` by their sum."""
        w = np.asarray(weights, dtype=np.float64)
        if np.any(w < 0):
            raise MeasureSpaceError("negative weight")
        total = w.sum()
        if not total > 0:
            raise MeasureSpaceError("weights must have a positive sum")
        return cls(weights=w / total, **kwargs)

    @property
    def coords(self) -> np.ndarray | None:
        return self._coords

    @property
    def distances(self) -> np.ndarray | None:
        return self._distances

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    @property
    def is_matrix(self) -> bool:
        return self._distances is not None

    @property
    def is_uniform(self) -> bool:
        return self._uniform

    @property
    def n_points(self) -> int:
        return self._weights.shape[0]

    @property
    def dim(self) -> int | None:
        return None if self._coords is None else self._coords.shape[1]

    def __len__(self) -> int:
        return self.n_points

    def __repr__(self) -> str:
        form = "matrix" if self.is_matrix else f"coords, d={self.dim}"
        return f"FiniteMeasureSpace(N={self.n_points}, {form}, uniform={self.is_uniform})"

    def distances_to(self, query) -> np.ndarray:
        """Distances from ``query`` to every support point.

        ``query`` is a support index (int) or, for coordinate spaces,
        a point of dimension d.
        """
        if _is_index(query):
            i = self._check_index(query)
            if self._distances is not None:
                return self._distances[i].copy()
            x = self._coords[i]
        else:
            if self._coords is None:
                raise MeasureSpaceError("matrix-form spaces accept only index queries")
            x = np.asarray(query, dtype=np.float64).ravel()
            if x.shape[0] != self.dim:
                raise MeasureSpaceError(f"query has dimension {x.shape[0]}, space has {self.dim}")
        return np.sqrt(np.sum((self._coords - x) ** 2, axis=1))

    def scaled(self, factor: float) -> "FiniteMeasureSpace":
        """Same measure, all distances multiplied by ``factor`` > 0."""
        if not factor > 0:
            raise MeasureSpaceError("scale factor must be positive")
        if self._coords is not None:
            return FiniteMeasureSpace(coords=self._coords * factor, weights=self._weights,
                                      labels=self._labels)
        return FiniteMeasureSpace(distances=self._distances * factor, weights=self._weights,
                                  labels=self._labels)

    def permuted(self, perm) -> "FiniteMeasureSpace":
        """Relabel support points: new point ``k`` is old point ``perm[k]``."""
        perm = np.asarray(perm, dtype=np.intp)
        if sorted(perm.tolist()) != list(range(self.n_points)):
            raise MeasureSpaceError("not a permutation of the support")
        labels = None if self._labels is None else [self._labels[k] for k in perm]
        if self._coords is not None:
            return FiniteMeasureSpace(coords=self._coords[perm], weights=self._weights[perm],
                                      labels=labels)
        D = self._distances[np.ix_(perm, perm)]
        return FiniteMeasureSpace(distances=D, weights=self._weights[perm], labels=labels)

    def with_weights(self, weights) -> "FiniteMeasureSpace":
        if self._coords is not None:
            return FiniteMeasureSpace(coords=self._coords, weights=weights, labels=self._labels)
        return FiniteMeasureSpace(distances=self._distances, weights=weights, labels=self._labels)

    def distance_matrix(self) -> np.ndarray:
        """Full N x N matrix; materialized on demand for coordinate spaces."""
        if self._distances is not None:
            return self._distances
        X = self._coords
        return np.sqrt(np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=-1))

    def _check_index(self, i) -> int:
        i = int(i)
        if not 0 <= i < self.n_points:
            raise IndexError(f"index {i} out of range for N={self.n_points}")
        return i


class SubsampleIndex:
    """Distinct indices into a parent space of size ``parent_size``."""

    def __init__(self, indices: Sequence[int], parent_size: int):
        idx = np.asarray(indices, dtype=np.intp).ravel()
        if idx.size == 0:
            raise MeasureSpaceError("empty subsample")
        if idx.size > parent_size:
            raise MeasureSpaceError(f"subsample of size {idx.size} exceeds parent size {parent_size}")
        if np.any(idx < 0) or np.any(idx >= parent_size):
            raise MeasureSpaceError("subsample index out of range")
        if np.unique(idx).size != idx.size:
            raise MeasureSpaceError("subsample indices must be distinct")
        idx.setflags(write=False)
        self.indices = idx
        self.parent_size = int(parent_size)

    @classmethod
    def draw(cls, parent_size: int, n: int, rng: np.random.Generator) -> "SubsampleIndex":
        """Uniform draw of ``n`` indices without replacement."""
        return cls(rng.choice(parent_size, size=n, replace=False), parent_size)

    @classmethod
    def full(cls, parent_size: int) -> "SubsampleIndex":
        return cls(np.arange(parent_size), parent_size)

    def __len__(self) -> int:
        return self.indices.size

    def __repr__(self) -> str:
        return f"SubsampleIndex(n={len(self)}, parent_size={self.parent_size})"


def pairwise_distance(space: FiniteMeasureSpace, i: int, j: int) -> float:
    """Distance between support points ``i`` and ``j``."""
    i = space._check_index(i)
    j = space._check_index(j)
    if space.is_matrix:
        return float(space.distances[i, j])
    if i == j:
        return 0.0
    diff = space.coords[i] - space.coords[j]
    return float(np.sqrt(np.dot(diff, diff)))


def check_triangle_inequality(D: np.ndarray, tol: float = 1e-12) -> None:
    D = np.asarray(D, dtype=np.float64)
    for k in range(D.shape[0]):
        # D[i, j] <= D[i, k] + D[k, j] for all i, j at pivot k
        if np.any(D > D[:, k, None] + D[None, k, :] + tol):
            raise MeasureSpaceError(f"triangle inequality violated through point {k}")


def _validate_distance_matrix(D: np.ndarray) -> None:
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 1:
        raise MeasureSpaceError(f"distance matrix must be square and non-empty, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise MeasureSpaceError("distance matrix contains non-finite values")
    if np.any(D < 0):
        raise MeasureSpaceError("distance matrix has a negative entry")
    if np.any(np.abs(np.diag(D)) > SYMMETRY_TOL):
        raise MeasureSpaceError("distance matrix has a nonzero diagonal")
    if np.max(np.abs(D - D.T)) > SYMMETRY_TOL:
        raise MeasureSpaceError("distance matrix is not symmetric")


def _is_index(query) -> bool:
    return isinstance(query, (int, np.integer))


def _parse_float(field: str, row: int) -> float:
    try:
        return float(field)
    except ValueError:
        raise MeasureSpaceError(f"row {row}: non-numeric field {field!r}") from None


def _read_rows(path) -> list[list[str]]:
    path = Path(path)
    if not path.is_file():
        raise MeasureSpaceError(f"no such file: {path}")
    with path.open(newline="") as fh:
        return [[f.strip() for f in row] for row in csv.reader(fh) if row and any(f.strip() for f in row)]


def _looks_like_header(row: list[str]) -> bool:
    for field in row:
        try:
            float(field)
        except ValueError:
            return True
    return False


def load_point_cloud(path, format: str = "csv") -> FiniteMeasureSpace:
    """Read a point cloud from CSV.

    An optional header row is recognized when any field is non-numeric;
    a column named ``weight`` is then taken as (unnormalized) weights.
    """
    if format != "csv":
        raise MeasureSpaceError(f"unsupported format {format!r}")
    rows = _read_rows(path)
    if not rows:
        raise MeasureSpaceError(f"{path}: no data rows")
    weight_col = None
    start = 0
    if _looks_like_header(rows[0]):
        header = [h.lower() for h in rows[0]]
        if "weight" in header:
            weight_col = header.index("weight")
        start = 1
    data = rows[start:]
    if not data:
        raise MeasureSpaceError(f"{path}: no data rows")
    width = len(data[0])
    values = []
    for r, row in enumerate(data, start=start + 1):
        if len(row) != width:
            raise MeasureSpaceError(f"row {r}: expected {width} fields, got {len(row)}")
        values.append([_parse_float(f, r) for f in row])
    A = np.array(values, dtype=np.float64)
    if weight_col is None:
        return FiniteMeasureSpace(coords=A)
    coords = np.delete(A, weight_col, axis=1)
    if coords.shape[1] == 0:
        raise MeasureSpaceError("no coordinate columns besides the weight column")
    return FiniteMeasureSpace.from_unnormalized(A[:, weight_col], coords=coords)


def load_distance_matrix(path, strict_metric: bool = False) -> FiniteMeasureSpace:
    """Read an N x N distance matrix (no header) from CSV.

    Asymmetry below 1e-9 is repaired by averaging with the transpose.
    """
    rows = _read_rows(path)
    if not rows:
        raise MeasureSpaceError(f"{path}: empty matrix")
    values = []
    for r, row in enumerate(rows, start=1):
        if len(row) != len(rows):
            raise MeasureSpaceError(f"row {r}: expected {len(rows)} fields for a square matrix, got {len(row)}")
        values.append([_parse_float(f, r) for f in row])
    M = np.array(values, dtype=np.float64)
    if np.max(np.abs(M - M.T)) >= ASYMMETRY_REJECT:
        raise MeasureSpaceError("distance matrix is asymmetric")
    if np.any(M < 0):
        raise MeasureSpaceError("distance matrix has a negative entry")
    if np.any(np.abs(np.diag(M)) > SYMMETRY_TOL):
        raise MeasureSpaceError("distance matrix has a nonzero diagonal")
    M = (M + M.T) / 2.0
    np.fill_diagonal(M, 0.0)
    return FiniteMeasureSpace(distances=M, strict_metric=strict_metric)


def save_point_cloud(space: FiniteMeasureSpace, path) -> None:
    if space.is_matrix:
        raise MeasureSpaceError("space has no coordinates; use save_distance_matrix")
    d = space.dim
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{k}" for k in range(d)] + ["weight"])
        for x, wt in zip(space.coords, space.weights):
            w.writerow([repr(float(v)) for v in x] + [repr(float(wt))])


def save_distance_matrix(space: FiniteMeasureSpace, path) -> None:
    D = space.distance_matrix()
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        for row in D:
            w.writerow([repr(float(v)) for v in row])


def load_weights(path) -> np.ndarray:
    """Read a one-column weight file (optional ``weight`` header) and normalize it."""
    rows = _read_rows(path)
    if rows and _looks_like_header(rows[0]):
        rows = rows[1:]
    if not rows or any(len(r) != 1 for r in rows):
        raise MeasureSpaceError(f"{path}: expected a single column of weights")
    w = np.array([_parse_float(r[0], k) for k, r in enumerate(rows, start=1)])
    if np.any(w < 0):
        raise MeasureSpaceError("negative weight")
    if not w.sum() > 0:
        raise MeasureSpaceError("weights must have a positive sum")
    return w / w.sum()


def save_weights(space: FiniteMeasureSpace, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["weight"])
        for wt in space.weights:
            w.writerow([repr(float(wt))])
