"""Catalog of torus diffeomorphisms with exact Jacobians and inverses.

Five families are provided: rigid translations, orientation-preserving
integer linear automorphisms (determinant +1), sheared translations,
the standard (kicked-rotor) map written additively on the unit torus,
and a translation composed with a compactly supported smooth radial
twist.  Every entry is real-analytic except the twist, which is C-inf,
and every entry has an exact closed-form inverse: the twist preserves
distance to its own center, so its inverse is the twist with the
opposite angle profile.

Maps are immutable after construction; evaluation, Jacobians, and
inverses accept a single point (TorusPoint or length-2 sequence) or an
(m, 2) coordinate array, and arrays are the fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GeometryError, InversionError
from .svd2 import singular_values_array
from .torus import INJECTIVITY_RADIUS, TorusPoint, as_xy, wrap, wrap_displacement

_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _dispatch(fn, p):
    """Run an (m,2)->(m,2) array function on a point or an array."""
    if isinstance(p, TorusPoint):
        out = fn(p.as_array()[None, :])[0]
        return TorusPoint(out[0], out[1])
    a = np.asarray(p, dtype=float)
    if a.ndim == 1:
        return fn(a[None, :])[0]
    return fn(a)


def _dispatch_jac(fn, p):
    if isinstance(p, TorusPoint):
        return fn(p.as_array()[None, :])[0]
    a = np.asarray(p, dtype=float)
    if a.ndim == 1:
        return fn(a[None, :])[0]
    return fn(a)


class TorusMap:
    """Base class: concrete maps implement the three ``_xy`` array methods."""

    kind: str = ""

    def __call__(self, p):
        return _dispatch(lambda xy: wrap(self._eval_xy(wrap(xy))), p)

    def jacobian(self, p):
        """Derivative matrix [[du/dx, du/dy], [dv/dx, dv/dy]] at p."""
        return _dispatch_jac(lambda xy: self._jacobian_xy(wrap(xy)), p)

    def inverse(self, q):
        """Preimage of q; exact closed form for every catalog kind."""
        return _dispatch(lambda xy: wrap(self._inverse_xy(wrap(xy))), q)

    def _eval_xy(self, xy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _jacobian_xy(self, xy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inverse_xy(self, xy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Translation(TorusMap):
    """p -> p + omega mod 1; an isometry with identity derivative."""

    omega: tuple[float, float]
    kind: str = field(default="translation", init=False)

    def _eval_xy(self, xy):
        return xy + np.asarray(self.omega)

    def _jacobian_xy(self, xy):
        return np.broadcast_to(np.eye(2), (xy.shape[0], 2, 2)).copy()

    def _inverse_xy(self, xy):
        return xy - np.asarray(self.omega)

    def descriptor(self):
        return {"kind": self.kind, "omega": [float(self.omega[0]), float(self.omega[1])]}


@dataclass(frozen=True)
class LinearAutomorphism(TorusMap):
    """Integer matrix action p -> M p mod 1, restricted to determinant +1."""

    matrix: tuple[tuple[int, int], tuple[int, int]]
    kind: str = field(default="linear", init=False)

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if M.shape != (2, 2) or not np.all(M == np.round(M)):
            raise GeometryError(f"linear map needs an integer 2x2 matrix, got {self.matrix}")
        det = int(round(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]))
        if det != 1:
            raise GeometryError(f"linear map determinant must be +1, got {det}")
        object.__setattr__(
            self, "matrix", tuple(tuple(int(v) for v in row) for row in M)
        )

    def _mat(self):
        return np.asarray(self.matrix, dtype=float)

    def _eval_xy(self, xy):
        return xy @ self._mat().T

    def _jacobian_xy(self, xy):
        return np.broadcast_to(self._mat(), (xy.shape[0], 2, 2)).copy()

    def _inverse_xy(self, xy):
        (a, b), (c, d) = self.matrix
        inv = np.array([[d, -b], [-c, a]], dtype=float)  # adjugate; det is 1
        return xy @ inv.T

    def descriptor(self):
        return {"kind": self.kind, "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class SkewShear(TorusMap):
    """x -> x + omega1, y -> y + omega2 + amplitude*sin(2*pi*frequency*x)."""

    omega: tuple[float, float]
    amplitude: float
    frequency: int
    kind: str = field(default="skew", init=False)

    def __post_init__(self):
        if int(self.frequency) < 1:
            raise GeometryError(f"skew frequency must be a positive integer, got {self.frequency}")
        object.__setattr__(self, "frequency", int(self.frequency))

    def _eval_xy(self, xy):
        out = xy + np.asarray(self.omega)
        out[:, 1] += self.amplitude * np.sin(2.0 * math.pi * self.frequency * xy[:, 0])
        return out

    def _jacobian_xy(self, xy):
        m = xy.shape[0]
        J = np.broadcast_to(np.eye(2), (m, 2, 2)).copy()
        J[:, 1, 0] = (
            2.0 * math.pi * self.frequency * self.amplitude
            * np.cos(2.0 * math.pi * self.frequency * xy[:, 0])
        )
        return J

    def _inverse_xy(self, xy):
        x0 = xy[:, 0] - self.omega[0]
        y0 = xy[:, 1] - self.omega[1] - self.amplitude * np.sin(
            2.0 * math.pi * self.frequency * (x0 % 1.0)
        )
        return np.stack([x0, y0], axis=-1)

    def descriptor(self):
        return {
            "kind": self.kind,
            "omega": [float(self.omega[0]), float(self.omega[1])],
            "amplitude": float(self.amplitude),
            "frequency": self.frequency,
        }


@dataclass(frozen=True)
class StandardMap(TorusMap):
    """x' = x + y + (k/2pi) sin(2pi x), y' = y + (k/2pi) sin(2pi x); area-preserving."""

    k: float
    kind: str = field(default="standard_map", init=False)

    def _eval_xy(self, xy):
        kick = (self.k / (2.0 * math.pi)) * np.sin(2.0 * math.pi * xy[:, 0])
        return np.stack([xy[:, 0] + xy[:, 1] + kick, xy[:, 1] + kick], axis=-1)

    def _jacobian_xy(self, xy):
        m = xy.shape[0]
        c = self.k * np.cos(2.0 * math.pi * xy[:, 0])
        J = np.empty((m, 2, 2))
        J[:, 0, 0] = 1.0 + c
        J[:, 0, 1] = 1.0
        J[:, 1, 0] = c
        J[:, 1, 1] = 1.0
        return J

    def _inverse_xy(self, xy):
        # x' - y' recovers x exactly, then the kick is known
        x0 = (xy[:, 0] - xy[:, 1]) % 1.0
        y0 = xy[:, 1] - (self.k / (2.0 * math.pi)) * np.sin(2.0 * math.pi * x0)
        return np.stack([x0, y0], axis=-1)

    def descriptor(self):
        return {"kind": self.kind, "k": float(self.k)}


@dataclass(frozen=True)
class PerturbedTranslation(TorusMap):
    """Translation composed (twist first) with a smooth radial twist in B(center, radius).

    Inside the bump, a point at distance d from the center is rotated
    about the center by the angle strength * exp(1 - 1/(1 - (d/radius)^2));
    outside it is untouched.  The twist preserves the distance to the
    center, so it is area-preserving, exactly permutes any disk family
    disjoint from its support, and inverts by rotating the other way.
    """

    omega: tuple[float, float]
    center: tuple[float, float]
    radius: float
    strength: float
    kind: str = field(default="perturbed_translation", init=False)

    def __post_init__(self):
        if not 0.0 < self.radius < INJECTIVITY_RADIUS:
            raise GeometryError(
                f"bump radius must lie in (0, {INJECTIVITY_RADIUS}), got {self.radius}"
            )
        object.__setattr__(self, "center", (float(self.center[0]) % 1.0, float(self.center[1]) % 1.0))

    def _twist_angle(self, d: np.ndarray) -> np.ndarray:
        t2 = (d / self.radius) ** 2
        return self.strength * np.exp(1.0 - 1.0 / (1.0 - t2))

    def _twist(self, xy, sign=1.0):
        u = wrap_displacement(xy, np.asarray(self.center))
        d = np.hypot(u[:, 0], u[:, 1])
        out = xy.copy()
        inside = d < self.radius
        if np.any(inside):
            phi = sign * self._twist_angle(d[inside])
            co, si = np.cos(phi), np.sin(phi)
            ux, uy = u[inside, 0], u[inside, 1]
            rot = np.stack([co * ux - si * uy, si * ux + co * uy], axis=-1)
            out[inside] = np.asarray(self.center) + rot
        return out

    def _eval_xy(self, xy):
        return self._twist(xy) + np.asarray(self.omega)

    def _inverse_xy(self, xy):
        # the twist preserves |u|, so the preimage rotates back by the
        # same radial profile: no iteration needed
        return self._twist(xy - np.asarray(self.omega), sign=-1.0)

    def _jacobian_xy(self, xy):
        m = xy.shape[0]
        J = np.broadcast_to(np.eye(2), (m, 2, 2)).copy()
        u = wrap_displacement(xy, np.asarray(self.center))
        d = np.hypot(u[:, 0], u[:, 1])
        inside = d < self.radius
        if not np.any(inside):
            return J
        ui = u[inside]
        t2 = (d[inside] / self.radius) ** 2
        g = np.exp(1.0 - 1.0 / (1.0 - t2))
        phi = self.strength * g
        # d(phi)/dd divided by d stays finite at the center: the u u^T
        # factor supplies the vanishing d^2
        pref = self.strength * g * (-2.0 / (self.radius**2 * (1.0 - t2) ** 2))
        co, si = np.cos(phi), np.sin(phi)
        R = np.empty((inside.sum(), 2, 2))
        R[:, 0, 0] = co
        R[:, 0, 1] = -si
        R[:, 1, 0] = si
        R[:, 1, 1] = co
        uuT = ui[:, :, None] * ui[:, None, :]
        J[inside] = R + pref[:, None, None] * (_ROT90 @ R @ uuT)
        return J

    def descriptor(self):
        return {
            "kind": self.kind,
            "omega": [float(self.omega[0]), float(self.omega[1])],
            "center": [float(self.center[0]), float(self.center[1])],
            "radius": float(self.radius),
            "strength": float(self.strength),
        }


@dataclass(frozen=True)
class OrbitDerivative:
    """Overflow-safe derivative of an iterate: Df^n = exp(log_scale) * matrix.

    ``matrix`` is renormalized to unit largest singular value after every
    chain-rule factor, so iterates in the thousands stay representable.
    ``log_det`` accumulates the log determinants of the factors, which
    the normalized entries stop carrying once the singular value ratio
    passes 1/eps; the determinant of Df^n is exp(log_det) at any depth.
    """

    matrix: np.ndarray
    log_scale: float
    log_det: float

    def reconstruct(self) -> np.ndarray:
        return math.exp(self.log_scale) * self.matrix


def orbit_product_scan(f: TorusMap, xy: np.ndarray, n_max: int):
    """Yield (n, matrices, log_scales, log_dets, positions) for n = 1 .. n_max.

    ``matrices`` holds the chain-rule products along the orbits of the
    rows of ``xy``, each divided by its largest singular value after
    every factor; ``log_scales`` accumulates the logs of those factors
    and ``log_dets`` the log determinants of the one-step derivatives,
    each taken at O(1) scale where it is exact.  ``positions`` is f^n of
    the inputs, used to continue the recursion.
    """
    cur = wrap(np.asarray(xy, dtype=float))
    m = cur.shape[0]
    acc = np.broadcast_to(np.eye(2), (m, 2, 2)).copy()
    log_s = np.zeros(m)
    log_det = np.zeros(m)
    for n in range(1, n_max + 1):
        J = f.jacobian(cur)
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        if np.any(det <= 0.0):
            raise InversionError("orbit derivative factor is not orientation-preserving")
        log_det = log_det + np.log(det)
        acc = J @ acc
        s1, _ = singular_values_array(acc)
        if np.any(s1 <= 0.0):
            raise InversionError("orbit derivative collapsed to a singular matrix")
        acc = acc / s1[:, None, None]
        log_s = log_s + np.log(s1)
        cur = f(cur)
        yield n, acc, log_s, log_det, cur


def orbit_jacobian(f: TorusMap, p, n: int) -> OrbitDerivative:
    """Derivative of f^n at p as a renormalized cocycle product."""
    if n < 1:
        raise GeometryError(f"iterate depth must be >= 1, got {n}")
    xy = as_xy(p)[None, :]
    for _, acc, log_s, log_det, _ in orbit_product_scan(f, xy, n):
        pass
    return OrbitDerivative(
        matrix=acc[0], log_scale=float(log_s[0]), log_det=float(log_det[0])
    )


def iterate_point(f: TorusMap, p, n: int):
    """f^n(p); n = 0 returns p unchanged."""
    cur = p
    for _ in range(n):
        cur = f(cur)
    return cur


def finite_difference_jacobian(f: TorusMap, p, step: float = 1e-5) -> np.ndarray:
    """Central-difference derivative, for cross-validation only.

    The image differences are taken with torus wrapping so points near
    the seam do not produce O(1) artifacts.  Step 1e-5 balances
    truncation against roundoff at double precision.
    """
    xy = as_xy(p)
    J = np.empty((2, 2))
    for a in range(2):
        e = np.zeros(2)
        e[a] = step
        plus = as_xy(f(wrap(xy + e)))
        minus = as_xy(f(wrap(xy - e)))
        J[:, a] = wrap_displacement(plus, minus) / (2.0 * step)
    return J


_KINDS = {
    "translation": Translation,
    "linear": LinearAutomorphism,
    "skew": SkewShear,
    "standard_map": StandardMap,
    "perturbed_translation": PerturbedTranslation,
}


def map_from_descriptor(desc: dict) -> TorusMap:
    """Build a catalog map from a config-style descriptor dict."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError(f"map descriptor must be a dict with a 'kind' field, got {desc!r}")
    kind = desc["kind"]
    if kind not in _KINDS:
        raise ConfigError(
            f"unknown map kind {kind!r}; expected one of {sorted(_KINDS)}"
        )
    params = {k: v for k, v in desc.items() if k != "kind"}
    try:
        if kind == "translation":
            return Translation(omega=tuple(params.pop("omega")), **params)
        if kind == "linear":
            return LinearAutomorphism(
                matrix=tuple(tuple(r) for r in params.pop("matrix")), **params
            )
        if kind == "skew":
            return SkewShear(omega=tuple(params.pop("omega")), **params)
        if kind == "standard_map":
            return StandardMap(**params)
        return PerturbedTranslation(
            omega=tuple(params.pop("omega")), center=tuple(params.pop("center")), **params
        )
    except (TypeError, KeyError, IndexError, GeometryError) as exc:
        raise ConfigError(f"bad parameters for map kind {kind!r}: {exc}") from exc
