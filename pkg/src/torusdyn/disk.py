"""Geometry of the open unit disk with the Poincare metric.

The distance is normalized so the length element is 2|dz|/(1-|z|^2);
with this choice the distance from the origin to a Beltrami coefficient
mu equals log K, where K = (1+|mu|)/(1-|mu|) is the dilatation.  The
disk Mobius maps T_a(z) = (a+z)/(1+conj(a)z) are isometries, and
``lipschitz_constants`` produces the explicit constants controlling how
T_a(z) moves when a moves inside a compact subdisk.

Values are immutable; every function here is pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import BoundaryError, GeometryError

UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class DiskCoeff:
    """A point strictly inside the unit disk; construction rejects |z| >= 1."""

    re: float
    im: float

    def __post_init__(self):
        object.__setattr__(self, "re", float(self.re))
        object.__setattr__(self, "im", float(self.im))
        if math.hypot(self.re, self.im) >= 1.0:
            raise BoundaryError(
                f"({self.re}, {self.im}) has modulus >= 1; not a disk point"
            )

    @classmethod
    def from_complex(cls, z: complex) -> "DiskCoeff":
        return cls(z.real, z.imag)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def modulus(self) -> float:
        return math.hypot(self.re, self.im)


@dataclass(frozen=True)
class UnitModulus:
    """A unit-modulus complex factor, renormalized exactly on construction.

    Inputs whose modulus deviates from 1 by more than ``UNIT_MODULUS_TOL``
    are rejected rather than silently rescaled.
    """

    re: float
    im: float

    def __post_init__(self):
        r = math.hypot(float(self.re), float(self.im))
        if abs(r - 1.0) > UNIT_MODULUS_TOL:
            raise BoundaryError(f"modulus {r} is not within {UNIT_MODULUS_TOL} of 1")
        object.__setattr__(self, "re", float(self.re) / r)
        object.__setattr__(self, "im", float(self.im) / r)

    @classmethod
    def from_complex(cls, z: complex) -> "UnitModulus":
        return cls(z.real, z.imag)

    @classmethod
    def from_angle(cls, phi: float) -> "UnitModulus":
        return cls(math.cos(phi), math.sin(phi))

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def angle(self) -> float:
        return math.atan2(self.im, self.re)


def _as_complex(z) -> complex:
    if isinstance(z, (DiskCoeff, UnitModulus)):
        return z.value
    return complex(z)


def hyp_dist(z, w) -> float:
    """Poincare distance log((1+t)/(1-t)) with t = |(z-w)/(1-conj(w)z)|.

    Accepts DiskCoeff or plain complex values strictly inside the disk.
    Symmetric, zero iff z == w; the distance from 0 to mu is exactly
    log((1+|mu|)/(1-|mu|)).
    """
    zc, wc = _as_complex(z), _as_complex(w)
    num = abs(zc - wc)
    den = abs(1.0 - wc.conjugate() * zc)
    if den == 0.0 or num >= den:
        raise BoundaryError("hyperbolic distance undefined: points not both inside the disk")
    t = num / den
    # log((1+t)/(1-t)) via log1p to keep precision for small separations
    return math.log1p(2.0 * t / (1.0 - t))


def mobius(a: complex, z: complex) -> complex:
    """Raw disk Mobius map (a+z)/(1+conj(a)z) on complex values."""
    return (a + z) / (1.0 + a.conjugate() * z)


def mobius_T(a, z) -> DiskCoeff:
    """Disk Mobius isometry T_a(z) = (a+z)/(1+conj(a)z).

    T_0 is the identity, T_a(0) = a, T_a(-a) = 0, and hyp_dist is
    preserved.  The result is strictly inside the disk whenever the
    inputs are.
    """
    return DiskCoeff.from_complex(mobius(_as_complex(a), _as_complex(z)))


def delta_from_beta(beta: float) -> float:
    """Euclidean radius (beta^2-1)/(beta^2+1) of the disk where K <= beta^2.

    A coefficient mu satisfies (1+|mu|)/(1-|mu|) <= beta^2 exactly when
    |mu| is at most this value.
    """
    if beta < 1.0:
        raise GeometryError(f"beta must be >= 1, got {beta}")
    b2 = beta * beta
    return (b2 - 1.0) / (b2 + 1.0)


@dataclass(frozen=True)
class LipschitzConstants:
    """Constants controlling a -> T_a(z) for a in B(delta'), z in B(delta).

    ``q1`` bounds the denominator |(1+conj(a)z)(1+conj(b)z)| from below,
    ``q2 = 2*delta_prime`` bounds |a*conj(b) - conj(a)*b| / |a-b|, and
    ``c1_euclidean = (1+3*delta_prime^2)/q1`` is the resulting Euclidean
    Lipschitz constant of a -> T_a(z).  ``delta_dprime`` is the sharp
    Euclidean radius bound for T_a(z), and ``c1`` converts the Euclidean
    constant to the hyperbolic metric via the maximal conformal factor
    2/(1-dbar^2) on the enclosing disk of radius dbar.
    """

    delta: float
    delta_prime: float
    delta_dprime: float
    q1: float
    q2: float
    c1_euclidean: float
    c1: float


def lipschitz_constants(beta: float, delta_prime: float) -> LipschitzConstants:
    """Assemble the explicit constants for the Mobius Lipschitz bound."""
    if not 0.0 <= delta_prime < 1.0:
        raise GeometryError(f"delta_prime must lie in [0, 1), got {delta_prime}")
    delta = delta_from_beta(beta)
    delta_dprime = (delta + delta_prime) / (1.0 + delta * delta_prime)
    q1 = (1.0 - delta_prime * delta) ** 2
    q2 = 2.0 * delta_prime
    c1_euclidean = (1.0 + 3.0 * delta_prime * delta_prime) / q1
    dbar = max(delta, delta_prime, delta_dprime)
    c1 = c1_euclidean * 2.0 / (1.0 - dbar * dbar)
    return LipschitzConstants(
        delta=delta,
        delta_prime=delta_prime,
        delta_dprime=delta_dprime,
        q1=q1,
        q2=q2,
        c1_euclidean=c1_euclidean,
        c1=c1,
    )


def radial_distance_quadrature(r: float, intervals: int = 20000) -> float:
    """Independent check value: integrate the length element 2/(1-t^2) on [0, r].

    Composite Simpson quadrature along the straight radial path.  Used by
    tests as an oracle for ``hyp_dist(0, r)``; not a production path.
    """
    if not 0.0 <= r < 1.0:
        raise GeometryError(f"radial endpoint must lie in [0, 1), got {r}")
    if intervals % 2:
        intervals += 1
    t = [r * i / intervals for i in range(intervals + 1)]
    f = [2.0 / (1.0 - x * x) for x in t]
    h = r / intervals
    s = f[0] + f[-1] + 4.0 * sum(f[1:-1:2]) + 2.0 * sum(f[2:-1:2])
    return s * h / 3.0


def rotate(phi: float, z) -> complex:
    """Rotation e^{i phi} z, an isometry of the disk."""
    return cmath.exp(1j * phi) * _as_complex(z)
