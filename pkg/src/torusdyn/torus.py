"""Geometry of the unit flat torus, the square [0,1)^2 with opposite sides glued.

Everything downstream lives on this surface.  The flat model is the one
closed surface where the metric objects used by the estimators are exact
closed forms: the distance is the minimum over integer translates of the
Euclidean distance, balls of radius r <= 1/2 have area exactly pi*r^2,
and the injectivity radius is exactly 1/2.  No tolerances are attached
to these constants.

All functions are pure; random sampling takes an explicit seed, so
concurrent callers never share generator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

INJECTIVITY_RADIUS = 0.5
BALL_AREA_CONSTANT = math.pi  # area(B(p, r)) = pi * r^2 for r <= 1/2
TOTAL_AREA = 1.0
MAX_DISTANCE = math.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class TorusPoint:
    """A point of the torus; both coordinates are reduced mod 1 into [0, 1)."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x) % 1.0)
        object.__setattr__(self, "y", float(self.y) % 1.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def as_xy(p) -> np.ndarray:
    """Coerce a TorusPoint, pair, or array to a wrapped coordinate array."""
    if isinstance(p, TorusPoint):
        return p.as_array()
    return np.asarray(p, dtype=float) % 1.0


def wrap(xy) -> np.ndarray:
    """Reduce coordinates mod 1 into [0, 1), elementwise."""
    return np.asarray(xy, dtype=float) % 1.0


def wrap_displacement(a, b) -> np.ndarray:
    """Representative of a - b with components in [-1/2, 1/2).

    This is the shortest displacement vector between the two points; its
    Euclidean norm is the torus distance.
    """
    return (np.asarray(a, dtype=float) - np.asarray(b, dtype=float) + 0.5) % 1.0 - 0.5


def torus_distance(p, q) -> float:
    """Distance on the flat torus.

    The two coordinates separate, so the componentwise minimum over
    integer translates equals the minimum over the nine neighbouring
    translates of the difference vector; the result is exact, with no
    iteration.  Bounded above by sqrt(2)/2.
    """
    d = wrap_displacement(as_xy(p), as_xy(q))
    return float(math.hypot(d[0], d[1]))


def distance_array(P, Q) -> np.ndarray:
    """Elementwise torus distance between two (..., 2) coordinate arrays."""
    d = wrap_displacement(P, Q)
    return np.hypot(d[..., 0], d[..., 1])


def ball_area(r: float) -> float:
    """Area of a metric ball of radius r, exact for r <= 1/2."""
    if r < 0.0:
        raise GeometryError(f"ball radius must be nonnegative, got {r}")
    if r > INJECTIVITY_RADIUS:
        raise GeometryError(
            f"radius {r} exceeds the injectivity radius {INJECTIVITY_RADIUS}; "
            "the closed-form ball area only holds below it"
        )
    return BALL_AREA_CONSTANT * r * r


def grid_points(m: int) -> np.ndarray:
    """The m-by-m lattice {(i/m, j/m)} as an (m*m, 2) array, row-major in i."""
    if m < 1:
        raise GeometryError(f"grid size must be >= 1, got {m}")
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    return np.stack([i.ravel(), j.ravel()], axis=-1) / float(m)


def random_points(count: int, seed: int) -> np.ndarray:
    """Uniform points, deterministic for a given seed; shape (count, 2)."""
    if count < 1:
        raise GeometryError(f"sample count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    return rng.random((count, 2))


def jittered_grid(m: int, seed: int) -> np.ndarray:
    """Stratified sample: one uniform point per cell of the m-by-m grid.

    Used for separated-set candidates, where a bare lattice aligned with
    the eigendirections of a linear map undercounts.
    """
    if m < 1:
        raise GeometryError(f"grid size must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    base = np.stack([i.ravel(), j.ravel()], axis=-1).astype(float)
    return ((base + rng.random((m * m, 2))) / float(m)) % 1.0
