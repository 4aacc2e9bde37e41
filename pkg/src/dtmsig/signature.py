"""DTM-signatures: the law of the DTM value at a random point of the measure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dtm import check_mass, dtm_values
from .measure_space import FiniteMeasureSpace, MeasureSpaceError, SubsampleIndex
from .wasserstein1d import Discrete1D


@dataclass(frozen=True)
class Signature1D:
    dist: Discrete1D
    mass: float
    source_size: int
    eval_size: int

    def mean(self) -> float:
        return self.dist.mean()


class DTMCache:
    """DTM values of a space at its own support points, computed once.

    Subsample signatures and bootstrap resamples index into ``values``.
    """

    def __init__(self, space: FiniteMeasureSpace, m: float, workers: int = 1):
        self.mass = check_mass(m)
        values = dtm_values(space, self.mass, workers=workers)
        values.setflags(write=False)
        self.values = values
        self.weights = space.weights

    def __len__(self) -> int:
        return self.values.size

    def canonical(self) -> "DTMCache":
        """Copy with values sorted ascending (and weights permuted alike).

        Indexing into the sorted copy makes any index-based draw a function
        of the DTM value multiset only, hence blind to point labels.
        """
        order = np.lexsort((self.weights, self.values))
        out = object.__new__(DTMCache)
        out.mass = self.mass
        out.values = self.values[order]
        out.weights = self.weights[order]
        return out

    def full(self) -> Signature1D:
        return Signature1D(Discrete1D(self.values, self.weights), self.mass, len(self), len(self))

    def subsample(self, sub: SubsampleIndex) -> Signature1D:
        if sub.parent_size != len(self):
            raise MeasureSpaceError(
                f"subsample drawn from a space of size {sub.parent_size}, not {len(self)}")
        return Signature1D(Discrete1D.from_samples(self.values[sub.indices]), self.mass,
                           len(self), len(sub))


def signature_full(space: FiniteMeasureSpace, m: float, workers: int = 1) -> Signature1D:
    """Law of d_{mu,m}(X) for X drawn from the space's own measure."""
    return DTMCache(space, m, workers=workers).full()


def signature_subsample(space: FiniteMeasureSpace, sub: SubsampleIndex, m: float,
                        workers: int = 1) -> Signature1D:
    """Uniform law over the DTM values at the subsample points.

    The DTM is always taken with respect to the whole space, never the
    subsample alone.
    """
    return DTMCache(space, m, workers=workers).subsample(sub)


def rigid_motion(coords: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Apply a random orthogonal map and translation (test helper)."""
    coords = np.asarray(coords, dtype=np.float64)
    d = coords.shape[1]
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    return coords @ q.T + rng.standard_normal(d)
