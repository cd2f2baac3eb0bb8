"""Beltrami coefficients and dilatation of torus maps.

Wirtinger derivatives are taken in the global conformal coordinate
z = x + iy of the flat torus, so the 2x2 real derivative at a point
carries everything: for J = [[a, b], [c, d]],

    f_z    = ((a + d) + i(c - b)) / 2
    f_zbar = ((a - d) + i(c + b)) / 2

The Beltrami coefficient is mu = f_zbar / f_z (inside the unit disk for
orientation-preserving maps), the rotation factor is
theta = conj(f_z)/f_z, and the dilatation K = (1+|mu|)/(1-|mu|) equals
the singular-value ratio of J.  Composition acts on mu by a disk Mobius
map, which is what every estimate downstream leans on.

Scalar entry points validate and return the typed values; the *_array
helpers are the unchecked vectorized fast paths.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .disk import DiskCoeff, UnitModulus, hyp_dist, mobius
from .errors import BoundaryError, DegenerateMatrixError, GeometryError, OrientationError
from .maps import OrbitDerivative, TorusMap
from .svd2 import singular_values, singular_values_array
from .torus import as_xy, distance_array, grid_points

# Constructing a coefficient this close to the unit circle means the map
# has left the diffeomorphism regime at working precision.
MU_MODULUS_LIMIT = 1.0 - 1e-12


@dataclass(frozen=True)
class BeltramiSample:
    """Beltrami coefficient and rotation factor of a map at one point."""

    mu: DiskCoeff
    theta: UnitModulus


@dataclass(frozen=True)
class HolderEstimate:
    """Empirical Holder constants of the coefficient fields.

    The constants are suprema over sampled pairs, hence lower bounds of
    the true constants; checks that need an upper bound multiply by a
    declared safety factor.
    """

    alpha: float
    c_mu: float
    c_theta: float
    sample_count: int


def wirtinger(J) -> tuple[complex, complex]:
    """(f_z, f_zbar) of a 2x2 real derivative matrix."""
    a, b, c, d = float(J[0][0]), float(J[0][1]), float(J[1][0]), float(J[1][1])
    return complex(a + d, c - b) / 2.0, complex(a - d, c + b) / 2.0


def jacobian_from_wirtinger(fz: complex, fzb: complex) -> np.ndarray:
    """Rebuild the real 2x2 matrix from its Wirtinger pair."""
    s, t = fz + fzb, fz - fzb  # s = a + ic, t = d - ib
    return np.array([[s.real, -t.imag], [s.imag, t.real]])


def beltrami_from_jacobian(J) -> BeltramiSample:
    """mu = f_zbar/f_z and theta = conj(f_z)/f_z of a derivative matrix.

    Requires positive determinant; rejects |mu| >= 1 - 1e-12 as a
    numerically degenerate (no longer quasiconformal) sample.
    """
    a, b, c, d = float(J[0][0]), float(J[0][1]), float(J[1][0]), float(J[1][1])
    if a * d - b * c <= 0.0:
        raise OrientationError(
            f"derivative determinant {a * d - b * c} is not positive"
        )
    fz, fzb = wirtinger(J)
    mu = fzb / fz
    if abs(mu) >= MU_MODULUS_LIMIT:
        raise BoundaryError(
            f"|mu| = {abs(mu)} is beyond {MU_MODULUS_LIMIT}: matrix is "
            "numerically degenerate at double precision"
        )
    return BeltramiSample(
        mu=DiskCoeff.from_complex(mu),
        theta=UnitModulus.from_complex(fz.conjugate() / fz),
    )


def beltrami_of_map(f: TorusMap, p) -> BeltramiSample:
    return beltrami_from_jacobian(f.jacobian(p))


def mu_theta_array(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (mu, theta) over an (..., 2, 2) stack; no validation."""
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    fz = ((a + d) + 1j * (c - b)) / 2.0
    fzb = ((a - d) + 1j * (c + b)) / 2.0
    return fzb / fz, np.conj(fz) / fz


def hyp_dist_array(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Vectorized Poincare distance for complex arrays inside the disk."""
    t = np.abs(z - w) / np.abs(1.0 - np.conj(w) * z)
    return np.log1p(2.0 * t / (1.0 - t))


def K_from_mu(sample) -> float:
    """Dilatation (1+|mu|)/(1-|mu|) of a sample, coefficient, or complex."""
    if isinstance(sample, BeltramiSample):
        m = sample.mu.modulus()
    elif isinstance(sample, DiskCoeff):
        m = sample.modulus()
    else:
        m = abs(complex(sample))
    if m >= 1.0:
        raise BoundaryError(f"|mu| = {m} is not inside the disk")
    return (1.0 + m) / (1.0 - m)


def K_from_singular(J) -> float:
    """Dilatation as the singular value ratio of the derivative matrix."""
    a, b, c, d = float(J[0][0]), float(J[0][1]), float(J[1][0]), float(J[1][1])
    if a * d - b * c <= 0.0:
        raise OrientationError(f"determinant {a * d - b * c} is not positive")
    s1, s2 = singular_values(J)
    if s2 <= 0.0:
        raise DegenerateMatrixError("singular matrix has no dilatation ratio")
    return s1 / s2


def compose_beltrami(f_at_p: BeltramiSample, g_at_fp: BeltramiSample) -> DiskCoeff:
    """Coefficient of the composite g o f at p from the two pointwise samples.

    Evaluates (mu_f + theta_f mu_g)/(1 + conj(mu_f) theta_f mu_g); the
    same value is the disk Mobius map with parameter mu_f applied to
    theta_f * mu_g, which tests use as the second route.
    """
    muf = f_at_p.mu.value
    w = f_at_p.theta.value * g_at_fp.mu.value
    return DiskCoeff.from_complex((muf + w) / (1.0 + muf.conjugate() * w))


def _mu_iterate_complex(f: TorusMap, p, n: int) -> complex:
    """Coefficient of f^n at p by folding the one-step recursion; n = 0 gives 0."""
    if n == 0:
        return 0j
    xy = as_xy(p)
    samples = []
    for _ in range(n):
        samples.append(beltrami_from_jacobian(f.jacobian(xy)))
        xy = f(xy)
    nu = samples[-1].mu.value
    for s in range(n - 2, -1, -1):
        muf = samples[s].mu.value
        w = samples[s].theta.value * nu
        nu = (muf + w) / (1.0 + muf.conjugate() * w)
    return nu


def iterate_beltrami(f: TorusMap, p, n: int) -> DiskCoeff:
    """Beltrami coefficient of the n-th iterate at p via the composition recursion.

    For strongly expanding maps |mu| approaches 1 like 1 - O(K^-1); once
    that gap falls below double-precision resolution the recursion cannot
    represent the value and construction raises BoundaryError.  The
    renormalized orbit-derivative route keeps log K available at any
    depth; this entry point is the independent cross-check of it.
    """
    if n < 1:
        raise GeometryError(f"iterate depth must be >= 1, got {n}")
    return DiskCoeff.from_complex(_mu_iterate_complex(f, p, n))


def log_K_identity_check(
    g_at_p: BeltramiSample, f_at_p: BeltramiSample
) -> tuple[float, float]:
    """Both sides of log K_{g o f^{-1}}(f(p)) = hyp_dist(mu_g(p), mu_f(p)).

    The left side rebuilds unit-f_z representative matrices from the two
    samples (mu and theta determine the derivative up to scale and sign,
    neither of which moves K), forms J_g J_f^{-1}, and takes log of the
    singular-value ratio.  The right side is the hyperbolic distance of
    the two coefficients.  The routes share no code.
    """
    def representative(s: BeltramiSample) -> np.ndarray:
        fz = cmath.exp(-1j * s.theta.angle / 2.0)
        return jacobian_from_wirtinger(fz, s.mu.value * fz)

    Jg = representative(g_at_p)
    Jf = representative(f_at_p)
    lhs = math.log(K_from_singular(Jg @ np.linalg.inv(Jf)))
    rhs = hyp_dist(g_at_p.mu, f_at_p.mu)
    return lhs, rhs


@dataclass(frozen=True)
class ExteriorNorms:
    """Expansion factors of 1- and 2-dimensional volume under a linear map."""

    norm1: float  # largest singular value
    norm2: float  # determinant (product of singular values)
    full: float   # max of the two


def exterior_norm(J) -> ExteriorNorms:
    """Exterior-power norms of a positive-determinant 2x2 matrix.

    norm1 is the top singular value, which equals sqrt(K * det); norm2 is
    the determinant; full is their maximum.
    """
    a, b, c, d = float(J[0][0]), float(J[0][1]), float(J[1][0]), float(J[1][1])
    det = a * d - b * c
    if det <= 0.0:
        raise OrientationError(f"determinant {det} is not positive")
    s1, _ = singular_values(J)
    return ExteriorNorms(norm1=s1, norm2=det, full=max(s1, det))


def log_norms_from_normalized(
    mats: np.ndarray, log_scales: np.ndarray, log_dets: np.ndarray
):
    """Log-space dilatation and exterior norms of renormalized orbit derivatives.

    The true derivative is exp(log_scale) * matrix with det exp(log_det),
    so log norm1 = log_scale + log s1(matrix), log norm2 = log_det, and
    log K = 2 log norm1 - log norm2.  The entries of a normalized product
    stop carrying the determinant once the singular value ratio passes
    1/eps, so the smaller singular value is always recovered from the
    separately accumulated log_det; nothing here can overflow or cancel,
    whatever the iterate depth.
    """
    s1, _ = singular_values_array(mats)
    log_norm1 = log_scales + np.log(s1)
    log_norm2 = np.asarray(log_dets, dtype=float)
    log_K = 2.0 * log_norm1 - log_norm2
    log_full = np.maximum(log_norm1, log_norm2)
    return log_K, log_norm1, log_norm2, log_full


def log_K_of_orbit(od: OrbitDerivative) -> float:
    """log of the dilatation of a renormalized orbit derivative."""
    s1, _ = singular_values(od.matrix)
    if s1 <= 0.0:
        raise DegenerateMatrixError("orbit derivative is numerically singular")
    return 2.0 * (od.log_scale + math.log(s1)) - od.log_det


def iterated_distance_chain(f: TorusMap, p0, q0, n: int):
    """Stepwise Mobius bound for the distance between iterated coefficients.

    Returns (lhs, terms) where lhs is the hyperbolic distance between the
    coefficients of f^(n+1) at p0 and q0 and terms[s], s = 0..n, is the
    distance between the two Mobius images built from the one-step data
    along the orbits, with the deeper coefficient evaluated at the
    forward image of q.  The triangle inequality gives lhs <= sum(terms);
    both sides are computed explicitly, term by term.
    """
    if n < 0:
        raise GeometryError(f"chain depth must be >= 0, got {n}")
    p_orbit = [as_xy(p0)]
    q_orbit = [as_xy(q0)]
    for _ in range(n):
        p_orbit.append(f(p_orbit[-1]))
        q_orbit.append(f(q_orbit[-1]))
    q_next = f(q_orbit[-1])

    lhs = hyp_dist(
        _mu_iterate_complex(f, p_orbit[0], n + 1),
        _mu_iterate_complex(f, q_orbit[0], n + 1),
    )
    terms = []
    for s in range(n + 1):
        fp = beltrami_from_jacobian(f.jacobian(p_orbit[s]))
        fq = beltrami_from_jacobian(f.jacobian(q_orbit[s]))
        start = q_orbit[s + 1] if s + 1 <= n else q_next
        inner = _mu_iterate_complex(f, start, n - s)
        left = mobius(fp.mu.value, fp.theta.value * inner)
        right = mobius(fq.mu.value, fq.theta.value * inner)
        terms.append(hyp_dist(left, right))
    return lhs, terms


def holder_estimate(
    f: TorusMap, alpha: float, sample_count: int, seed: int
) -> HolderEstimate:
    """Empirical Holder constants of mu and of the rotation angle of theta.

    Half the pairs are independent uniform points, half are local pairs
    at log-uniform offsets down to 1e-3, so both the global oscillation
    and the small-scale ratio contribute to the supremum.  Deterministic
    for a given seed.
    """
    if not 0.0 < alpha <= 1.0:
        raise GeometryError(f"alpha must lie in (0, 1], got {alpha}")
    if sample_count < 1:
        raise GeometryError(f"sample_count must be >= 1, got {sample_count}")
    rng = np.random.default_rng(seed)
    half = (sample_count + 1) // 2
    P = rng.random((sample_count, 2))
    Q = np.empty_like(P)
    Q[:half] = rng.random((half, 2))
    scales = 10.0 ** rng.uniform(-3, np.log10(0.25), sample_count - half)
    angles = rng.uniform(0.0, 2.0 * math.pi, sample_count - half)
    Q[half:] = (
        P[half:] + scales[:, None] * np.stack([np.cos(angles), np.sin(angles)], -1)
    ) % 1.0

    d = distance_array(P, Q)
    keep = d > 0.0
    P, Q, d = P[keep], Q[keep], d[keep]
    mu_p, th_p = mu_theta_array(f.jacobian(P))
    mu_q, th_q = mu_theta_array(f.jacobian(Q))
    denom = d**alpha
    c_mu = float(np.max(hyp_dist_array(mu_p, mu_q) / denom, initial=0.0))
    dang = np.abs(np.angle(th_p * np.conj(th_q)))
    c_theta = float(np.max(dang / denom, initial=0.0))
    return HolderEstimate(
        alpha=alpha, c_mu=c_mu, c_theta=c_theta, sample_count=int(keep.sum())
    )


def mu_supremum(f: TorusMap, nodes: np.ndarray) -> float:
    """max |mu_f| over the given sample points (a lower bound of the true sup)."""
    mu, _ = mu_theta_array(f.jacobian(nodes))
    return float(np.max(np.abs(mu)))


def mu_field_rows(f: TorusMap, m: int) -> np.ndarray:
    """Grid dump (x, y, mu_re, mu_im, theta_arg, K) over the m-by-m lattice."""
    if m < 1:
        raise GeometryError(f"field grid size must be >= 1, got {m}")
    pts = grid_points(m)
    mu, th = mu_theta_array(f.jacobian(pts))
    am = np.abs(mu)
    K = (1.0 + am) / (1.0 - am)
    return np.column_stack([pts[:, 0], pts[:, 1], mu.real, mu.imag, np.angle(th), K])


MU_FIELD_COLUMNS = ("x", "y", "mu_re", "mu_im", "theta_arg", "K")
