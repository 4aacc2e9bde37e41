"""Closed-form DTM quantities for uniform measures on simple open sets of R^d.

Shapes: the ball B(0, r), the cube (0, s)^d and the annulus r < |x| < R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dtm import check_mass

SHAPE_KINDS = ("ball", "cube", "annulus")


def unit_ball_volume(d: int) -> float:
    """Lebesgue volume of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


@dataclass(frozen=True)
class UniformShape:
    kind: str
    dim: int
    radius: float = 1.0      # ball
    side: float = 1.0        # cube
    inner: float = 0.0       # annulus
    outer: float = 1.0       # annulus

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unsupported shape {self.kind!r}; choose from {SHAPE_KINDS}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dimension must be a positive integer")
        if self.kind == "ball" and not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if self.kind == "cube" and not self.side > 0:
            raise ValueError("cube side must be positive")
        if self.kind == "annulus" and not 0 <= self.inner < self.outer:
            raise ValueError("annulus needs 0 <= inner < outer")

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0) -> "UniformShape":
        return cls("ball", dim, radius=radius)

    @classmethod
    def cube(cls, dim: int, side: float = 1.0) -> "UniformShape":
        return cls("cube", dim, side=side)

    @classmethod
    def annulus(cls, dim: int, inner: float, outer: float) -> "UniformShape":
        return cls("annulus", dim, inner=inner, outer=outer)

    @property
    def volume(self) -> float:
        d = self.dim
        if self.kind == "ball":
            return unit_ball_volume(d) * self.radius ** d
        if self.kind == "cube":
            return self.side ** d
        return unit_ball_volume(d) * (self.outer ** d - self.inner ** d)

    @property
    def diameter(self) -> float:
        if self.kind == "ball":
            return 2.0 * self.radius
        if self.kind == "cube":
            return self.side * math.sqrt(self.dim)
        return 2.0 * self.outer

    @property
    def reach(self) -> float:
        """Distance from the boundary to the medial axis."""
        if self.kind == "ball":
            return self.radius
        if self.kind == "cube":
            # the medial axis of a d >= 2 cube runs into its corners
            return self.side / 2 if self.dim == 1 else 0.0
        if self.inner == 0.0:
            # punctured ball: the centre is a boundary point
            return 0.0
        return (self.outer - self.inner) / 2

    @property
    def inradius(self) -> float:
        """Largest eps with a non-empty inner set {x : d(x, boundary) >= eps}."""
        if self.kind == "ball":
            return self.radius
        if self.kind == "cube":
            return self.side / 2
        return (self.outer - self.inner) / 2

    def inner_mass(self, eps: float) -> float:
        """Uniform mass of {x in O : d(x, boundary) >= eps}."""
        if eps < 0:
            raise ValueError("eps must be nonnegative")
        if eps > self.inradius:
            return 0.0
        d = self.dim
        if self.kind == "ball":
            return ((self.radius - eps) / self.radius) ** d
        if self.kind == "cube":
            return ((self.side - 2 * eps) / self.side) ** d
        lo, hi = self.inner + eps, self.outer - eps
        return (hi ** d - lo ** d) / (self.outer ** d - self.inner ** d)

    def contains(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.kind == "cube":
            return np.all((X >= 0) & (X <= self.side), axis=1)
        r = np.linalg.norm(X, axis=1)
        if self.kind == "ball":
            return r <= self.radius
        return (r >= self.inner) & (r <= self.outer)

    def describe(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.kind == "ball":
            out["radius"] = self.radius
        elif self.kind == "cube":
            out["side"] = self.side
        else:
            out.update(inner=self.inner, outer=self.outer)
        out.update(volume=self.volume, reach=self.reach, diameter=self.diameter)
        return out


def epsilon_m(shape: UniformShape, m: float) -> float:
    """Radius of a ball of volume m * Leb(O), i.e. of uniform mass m when inside O."""
    m = check_mass(m)
    return (m * shape.volume / unit_ball_volume(shape.dim)) ** (1.0 / shape.dim)


def _require_inner_set(shape: UniformShape, m: float) -> float:
    eps = epsilon_m(shape, m)
    if eps > shape.inradius:
        raise ValueError(
            f"m={m} too large for this {shape.kind}: eps={eps:.6g} exceeds the inradius {shape.inradius:.6g}")
    return eps


def dtm_min(shape: UniformShape, m: float) -> float:
    """Minimum over R^d of the DTM of the uniform measure on ``shape``."""
    eps = _require_inner_set(shape, m)
    d = shape.dim
    return d / (d + 1) * eps


def uniform_volume_lower_bound(shape_a: UniformShape, shape_b: UniformShape, m: float) -> float:
    """Lower bound on W1 between the DTM-signatures of two uniform measures."""
    if shape_a.dim != shape_b.dim:
        raise ValueError("shapes live in different dimensions")
    d = shape_a.dim
    mass_a = shape_a.inner_mass(_require_inner_set(shape_a, m))
    mass_b = shape_b.inner_mass(_require_inner_set(shape_b, m))
    gap = abs(shape_a.volume ** (1.0 / d) - shape_b.volume ** (1.0 / d))
    return min(mass_a, mass_b) * d / (d + 1) * (m / unit_ball_volume(d)) ** (1.0 / d) * gap


def standardness_constant(shape: UniformShape) -> tuple[float, int]:
    """(a, b) such that mu(B(x, r)) >= min(1, a r^b) on the support."""
    if not shape.reach > 0:
        raise ValueError(f"{shape.kind} in dimension {shape.dim} has zero reach")
    d = shape.dim
    a = unit_ball_volume(d) / shape.volume * (shape.reach / shape.diameter) ** d
    return a, d


def dilation_distance(sig, lam: float) -> float:
    """W1 between a signature and its image under the dilation x -> lam * x."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    dist = getattr(sig, "dist", sig)
    return abs(1.0 - lam) * dist.mean()
