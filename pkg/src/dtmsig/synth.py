"""Seeded generators: noisy spirals, uniform shapes, Gaussian mixtures, and the
weighted 9-vertex graph pair whose DTM-signatures coincide."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analytic import UniformShape
from .measure_space import FiniteMeasureSpace

SPIRAL_NOISE = 0.03

_F = Fraction
GRAPH_WEIGHTS = {
    "mu": ((_F(23, 140), _F(1, 105), _F(67, 420)),
           (_F(3, 28), _F(1, 28), _F(4, 21)),
           (_F(2, 15), _F(1, 15), _F(2, 15))),
    "nu": ((_F(3, 28), _F(1, 15), _F(67, 420)),
           (_F(2, 15), _F(4, 21), _F(1, 105)),
           (_F(23, 140), _F(2, 15), _F(1, 28))),
}

KINDS = ("spiral", "uniform_shape", "graph_example", "gaussian_mixture")


@dataclass(frozen=True)
class GeneratorSpec:
    """What to sample.

    ``params`` by kind:

    * spiral: ``v`` (angular speed), ``sigma`` (noise, default 0.03)
    * uniform_shape: ``shape`` (a :class:`UniformShape`)
    * graph_example: ``which`` in {"mu", "nu"}; ``n`` is ignored (always 9)
    * gaussian_mixture: ``means`` (k x d), ``sigma`` (scalar or length k),
      ``proportions`` (length k, optional)
    """

    kind: str
    n: int = 2000
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; choose from {KINDS}")
        if self.n < 1:
            raise ValueError("sample size must be >= 1")
        sigma = self.params.get("sigma", 0.0)
        if np.any(np.asarray(sigma) < 0):
            raise ValueError("noise sigma must be >= 0")

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.kind, self.n, seed, dict(self.params))

    def describe(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "seed": self.seed}
        for k, v in self.params.items():
            out[k] = v.describe() if isinstance(v, UniformShape) else _jsonable(v)
        return out


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def spiral_points(radii: np.ndarray, v: float, sigma: float = SPIRAL_NOISE,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """(R sin(vR) + sigma*N, R cos(vR) + sigma*N') for the given radii."""
    radii = np.asarray(radii, dtype=np.float64)
    pts = np.column_stack([radii * np.sin(v * radii), radii * np.cos(v * radii)])
    if sigma > 0:
        if rng is None:
            raise ValueError("noisy spiral needs an rng")
        pts = pts + sigma * rng.standard_normal(pts.shape)
    return pts


def sample_spiral(n: int, v: float, sigma: float = SPIRAL_NOISE,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    rng = np.random.default_rng() if rng is None else rng
    return spiral_points(rng.uniform(0.0, 1.0, n), v, sigma, rng)


def sample_uniform_shape(shape: UniformShape, n: int, rng: np.random.Generator) -> np.ndarray:
    d = shape.dim
    if shape.kind == "cube":
        return rng.uniform(0.0, shape.side, (n, d))
    direction = rng.standard_normal((n, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    u = rng.uniform(0.0, 1.0, n)
    if shape.kind == "ball":
        r = shape.radius * u ** (1.0 / d)
    else:
        lo, hi = shape.inner ** d, shape.outer ** d
        r = (lo + u * (hi - lo)) ** (1.0 / d)
    return direction * r[:, None]


def sample_gaussian_mixture(n: int, means, sigma, proportions, rng: np.random.Generator) -> np.ndarray:
    means = np.atleast_2d(np.asarray(means, dtype=np.float64))
    k = means.shape[0]
    sigma = np.broadcast_to(np.asarray(sigma, dtype=np.float64), (k,))
    p = np.full(k, 1.0 / k) if proportions is None else np.asarray(proportions, dtype=np.float64)
    p = p / p.sum()
    comp = rng.choice(k, size=n, p=p)
    return means[comp] + sigma[comp, None] * rng.standard_normal((n, means.shape[1]))


def graph_distance_matrix() -> np.ndarray:
    """Three clusters of three vertices: distance 1 within a cluster, 2 across."""
    cluster = np.repeat(np.arange(3), 3)
    D = np.where(cluster[:, None] == cluster[None, :], 1.0, 2.0)
    np.fill_diagonal(D, 0.0)
    return D


def graph_weights(which: str) -> np.ndarray:
    if which not in GRAPH_WEIGHTS:
        raise ValueError(f"graph example is 'mu' or 'nu', got {which!r}")
    return np.array([float(w) for cl in GRAPH_WEIGHTS[which] for w in cl])


def graph_space(which: str) -> FiniteMeasureSpace:
    w = graph_weights(which)
    labels = [f"c{c}v{k}" for c in range(3) for k in range(3)]
    return FiniteMeasureSpace(distances=graph_distance_matrix(), weights=w, labels=labels)


def graph_pair() -> tuple[FiniteMeasureSpace, FiniteMeasureSpace]:
    """Two non-isomorphic weighted graphs with identical DTM-signatures."""
    return graph_space("mu"), graph_space("nu")


def sample(spec: GeneratorSpec) -> FiniteMeasureSpace:
    """Draw a finite space from ``spec``; deterministic in ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    p = spec.params
    if spec.kind == "spiral":
        if "v" not in p:
            raise ValueError("spiral generator needs parameter 'v'")
        pts = sample_spiral(spec.n, float(p["v"]), float(p.get("sigma", SPIRAL_NOISE)), rng)
    elif spec.kind == "uniform_shape":
        shape = p.get("shape")
        if not isinstance(shape, UniformShape):
            raise ValueError("uniform_shape generator needs a UniformShape 'shape'")
        pts = sample_uniform_shape(shape, spec.n, rng)
    elif spec.kind == "gaussian_mixture":
        if "means" not in p:
            raise ValueError("gaussian_mixture generator needs 'means'")
        pts = sample_gaussian_mixture(spec.n, p["means"], p.get("sigma", 1.0),
                                      p.get("proportions"), rng)
    else:
        return graph_space(p.get("which", "mu"))
    return FiniteMeasureSpace(coords=pts)
