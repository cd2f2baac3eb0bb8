"""Finite families of permuted domains and their geometry diagnostics.

A domain is modeled as a sandwich: a center with an inscribed radius, a
circumscribed radius, a recorded diameter, and sample points on the
circumscribed circle (images of a domain under a nonlinear map are
re-sandwiched from the mapped samples).  A collection adds a labeling
permutation and a Holder exponent.

The defining conditions of a permuted dense family are infinite
(density, disjointness of all iterates) and cannot hold for a finite
collection.  Every report therefore states its truncation explicitly
and checks the strongest finite analogue: pairwise disjointness is
verified exactly and brute force, orbit distinctness within the
truncation, density only as a reported covering radius, never an
assertion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dilatation import (
    holder_estimate,
    iterate_beltrami,
    log_norms_from_normalized,
    mu_supremum,
)
from .disk import delta_from_beta, hyp_dist, lipschitz_constants
from .errors import FamilyError, GeometryError
from .maps import TorusMap, orbit_product_scan
from .torus import (
    BALL_AREA_CONSTANT,
    INJECTIVITY_RADIUS,
    TOTAL_AREA,
    TorusPoint,
    as_xy,
    distance_array,
    grid_points,
    random_points,
    wrap,
)

FAMILY_SCHEMA_VERSION = "torusdyn-family-v1"

# Safety factor applied to empirical Holder constants wherever an upper
# bound is needed; recorded in every report that uses them.
HOLDER_SAFETY_FACTOR = 2.0


@dataclass(frozen=True)
class Domain:
    """One domain of a family, as a center-and-radii sandwich."""

    label: int
    center: TorusPoint
    inradius: float
    circumradius: float
    diameter: float
    boundary_samples: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.inradius <= self.circumradius:
            raise GeometryError(
                f"domain {self.label}: need 0 < inradius <= circumradius, "
                f"got ({self.inradius}, {self.circumradius})"
            )
        if self.circumradius > INJECTIVITY_RADIUS:
            raise GeometryError(
                f"domain {self.label}: circumradius {self.circumradius} exceeds "
                f"the injectivity radius {INJECTIVITY_RADIUS}, so the "
                "circumscribed ball is not an embedded disk"
            )
        if not self.inradius <= self.diameter <= 2.0 * self.circumradius:
            raise GeometryError(
                f"domain {self.label}: diameter {self.diameter} incompatible with "
                f"radii ({self.inradius}, {self.circumradius})"
            )

    @classmethod
    def round_disk(
        cls, label: int, center, radius: float, sample_count: int = 64
    ) -> "Domain":
        """A metric disk: inradius = circumradius = radius, diameter = 2*radius."""
        c = as_xy(center)
        angles = 2.0 * math.pi * np.arange(sample_count) / sample_count
        samples = wrap(c + radius * np.stack([np.cos(angles), np.sin(angles)], -1))
        return cls(
            label=int(label),
            center=TorusPoint(c[0], c[1]),
            inradius=float(radius),
            circumradius=float(radius),
            diameter=2.0 * float(radius),
            boundary_samples=samples,
        )


@dataclass(frozen=True)
class DomainCollection:
    """A labeled family with the permutation induced by the map.

    The permutation maps each label to the label of its image domain; it
    is left undefined at the end of a truncated chain rather than
    wrapped, since wrapping would make some iterate of a domain return
    to itself.
    """

    domains: tuple[Domain, ...]
    permutation: dict[int, int]
    alpha: float
    truncation_note: str

    def __post_init__(self):
        labels = [d.label for d in self.domains]
        if len(set(labels)) != len(labels):
            raise FamilyError("domain labels must be unique")
        known = set(labels)
        values = list(self.permutation.values())
        if len(set(values)) != len(values):
            raise FamilyError("permutation must be injective on present labels")
        for k, v in self.permutation.items():
            if k not in known or v not in known:
                raise FamilyError(f"permutation entry {k} -> {v} uses unknown labels")

    def by_label(self) -> dict[int, Domain]:
        return {d.label: d for d in self.domains}

    def centers(self) -> np.ndarray:
        return np.array([d.center.as_array() for d in self.domains])

    def diameters(self) -> np.ndarray:
        return np.array([d.diameter for d in self.domains])


# ---------------------------------------------------------------------------
# verification reports


@dataclass(frozen=True)
class CollectionReport:
    disjointness_violations: tuple
    orbit_repeats: tuple
    covering_radius: float
    truncation_note: str

    @property
    def passed(self) -> bool:
        # covering radius is reported, never asserted: finite families
        # are never dense
        return not self.disjointness_violations and not self.orbit_repeats


def verify_collection(c: DomainCollection, grid_m: int = 100) -> CollectionReport:
    """Disjointness (exact, pairwise), orbit distinctness, density proxy.

    Disjoint closures are certified by d(p_j, p_k) > R_j + R_k for every
    pair, checked brute force; the covering radius is the worst distance
    from a probe grid to the nearest circumscribed ball.
    """
    centers = c.centers()
    R = np.array([d.circumradius for d in c.domains])
    labels = [d.label for d in c.domains]
    n = len(c.domains)
    violations = []
    if n > 1:
        D = distance_array(centers[:, None, :], centers[None, :, :])
        lim = R[:, None] + R[None, :]
        iu = np.triu_indices(n, 1)
        bad = np.nonzero(D[iu] <= lim[iu])[0]
        for b in bad:
            i, j = iu[0][b], iu[1][b]
            violations.append((labels[i], labels[j], float(D[i, j])))

    repeats = []
    for start in c.permutation:
        seen = {start}
        cur = start
        while cur in c.permutation:
            cur = c.permutation[cur]
            if cur in seen:
                repeats.append((start, cur))
                break
            seen.add(cur)

    probes = grid_points(grid_m)
    gap = distance_array(probes[:, None, :], centers[None, :, :]) - R[None, :]
    covering_radius = float(np.max(np.min(np.maximum(gap, 0.0), axis=1)))

    return CollectionReport(
        disjointness_violations=tuple(violations),
        orbit_repeats=tuple(repeats),
        covering_radius=covering_radius,
        truncation_note=c.truncation_note,
    )


def beta_of(c: DomainCollection) -> float:
    """Worst circumradius/inradius ratio of the family."""
    if not c.domains:
        raise FamilyError("beta of an empty collection is undefined")
    return float(max(d.circumradius / d.inradius for d in c.domains))


@dataclass(frozen=True)
class PermutationReport:
    checked: int
    tol: float
    failures: tuple

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures


def verify_permutation(
    f: TorusMap, c: DomainCollection, tol: float, labels=None
) -> PermutationReport:
    """Check that f carries each domain onto its labeled successor.

    For each tested label the image of the center must land within tol
    of the successor center, and the mapped circumscribed-circle samples
    must stay inside the successor's circumscribed ball inflated by tol.
    ``labels=None`` tests every label the permutation is defined on;
    passing labels explicitly makes a missing permutation entry an error.
    """
    by_label = c.by_label()
    if labels is None:
        labels = sorted(c.permutation)
    failures = []
    for k in labels:
        if k not in c.permutation:
            raise FamilyError(f"permutation is not defined at label {k}")
        src = by_label[k]
        dst = by_label[c.permutation[k]]
        img_center = f(src.center.as_array())
        center_offset = float(distance_array(img_center, dst.center.as_array()))
        img_boundary = f(src.boundary_samples)
        excess = float(
            np.max(distance_array(img_boundary, dst.center.as_array()[None, :]))
            - dst.circumradius
        )
        if center_offset > tol or excess > tol:
            failures.append(
                {
                    "label": k,
                    "target": dst.label,
                    "center_offset": center_offset,
                    "boundary_excess": excess,
                }
            )
    return PermutationReport(checked=len(labels), tol=tol, failures=tuple(failures))


@dataclass(frozen=True)
class AreaBudgetReport:
    epsilon: float
    count_at_or_above: int
    area_sum: float
    within_budget: bool


def null_sequence_check(c: DomainCollection, epsilon: float) -> AreaBudgetReport:
    """Count large domains and check the inscribed-area budget.

    Any finite family has finitely many diameters above epsilon, so the
    meaningful check is quantitative: the inscribed balls are disjoint,
    hence pi * sum(r_k^2) can never exceed the total area 1.  A violation
    is a geometric impossibility in the declared radii.
    """
    big = sum(1 for d in c.domains if d.diameter >= epsilon)
    area = float(BALL_AREA_CONSTANT * sum(d.inradius**2 for d in c.domains))
    return AreaBudgetReport(
        epsilon=epsilon,
        count_at_or_above=big,
        area_sum=area,
        within_budget=area <= TOTAL_AREA,
    )


@dataclass(frozen=True)
class DensityProbe:
    scale: float
    satisfied: bool
    witness_label: int | None
    witness_distance: float | None


def density_diagnostic(c: DomainCollection, probe, scales) -> list[DensityProbe]:
    """Do small domains accumulate near the probe point, scale by scale?

    The probe must lie in the complement of the family.  For each scale s
    the report says whether some domain of diameter below s sits within
    distance s of the probe.  This is a finite-resolution diagnostic of
    the accumulation property, not an assertion of the limit statement.
    """
    p = as_xy(probe)
    centers = c.centers()
    dist_to_center = distance_array(p[None, :], centers)
    for d, dom in zip(dist_to_center, c.domains):
        if d < dom.inradius:
            raise GeometryError(
                f"probe lies inside domain {dom.label}; it must be a point "
                "of the complement"
            )
    R = np.array([d.circumradius for d in c.domains])
    gap = np.maximum(dist_to_center - R, 0.0)
    ell = c.diameters()
    labels = [d.label for d in c.domains]
    out = []
    for s in scales:
        ok = (ell < s) & (gap <= s)
        if np.any(ok):
            idx = int(np.argmin(np.where(ok, gap, np.inf)))
            out.append(DensityProbe(float(s), True, labels[idx], float(gap[idx])))
        else:
            out.append(DensityProbe(float(s), False, None, None))
    return out


def max_power_sum_lengths(lengths, alpha: float, n: int) -> float:
    """Largest possible sum of length^alpha over n+1 distinct entries.

    alpha = 0 is allowed (each term is then 1, so the sum is n+1): this
    is the regime where the sum grows linearly and the per-n rate does
    not decay, the failure mode the estimators are meant to exhibit.
    """
    if alpha < 0.0:
        raise GeometryError(f"alpha must be >= 0, got {alpha}")
    vals = np.asarray(lengths, dtype=float)
    if vals.size < n + 1:
        raise FamilyError(
            f"need at least {n + 1} domains for depth {n}, have {vals.size}"
        )
    top = np.sort(vals)[::-1][: n + 1]
    return float(np.sum(top**alpha))


def max_power_sum(c: DomainCollection, alpha: float, n: int) -> float:
    return max_power_sum_lengths(c.diameters(), alpha, n)


def assemble_chain_constants(
    f: TorusMap,
    c: DomainCollection,
    alpha: float,
    seed: int = 0,
    holder_samples: int = 4000,
    scan_grid: int = 48,
    safety_factor: float = HOLDER_SAFETY_FACTOR,
) -> dict:
    """Explicit constants for the diameter-sum estimates.

    The Mobius term multiplies the hyperbolic Lipschitz constant of
    a -> T_a(z) by the (safety-factored) Holder constant of the
    coefficient field; the rotation term converts the Holder constant of
    the rotation angle through the maximal conformal factor on the disk
    where the deep coefficients live.  The additive constant bounds the
    distance from any such coefficient to any depth-1 coefficient via
    the two radial bounds 2*log(beta) and sup log K_f.
    """
    beta = beta_of(c)
    delta = delta_from_beta(beta)
    delta_prime = mu_supremum(f, grid_points(scan_grid))
    lips = lipschitz_constants(beta, delta_prime)
    hold = holder_estimate(f, alpha, holder_samples, seed) if alpha > 0 else None
    c_mu_upper = safety_factor * (hold.c_mu if hold else 0.0)
    c_theta_upper = safety_factor * (hold.c_theta if hold else 0.0)
    mobius_term = lips.c1 * c_mu_upper
    conformal = 2.0 / (1.0 - delta * delta)
    rotation_term = conformal * delta * c_theta_upper
    c_prime = 2.0 * math.log(beta) + math.log((1.0 + delta_prime) / (1.0 - delta_prime))
    return {
        "alpha": alpha,
        "beta": beta,
        "delta": delta,
        "delta_prime": delta_prime,
        "c1": lips.c1,
        "c1_euclidean": lips.c1_euclidean,
        "holder_c_mu": hold.c_mu if hold else 0.0,
        "holder_c_theta": hold.c_theta if hold else 0.0,
        "safety_factor": safety_factor,
        "mobius_term": mobius_term,
        "rotation_term": rotation_term,
        "c_total": mobius_term + rotation_term,
        "c_prime": c_prime,
    }


@dataclass(frozen=True)
class SumDiamReport:
    start_label: int
    depth: int
    lhs: float
    rhs: float
    margin: float
    constants: dict

    @property
    def passed(self) -> bool:
        return self.margin >= -1e-10


def sum_diam_check(
    f: TorusMap,
    c: DomainCollection,
    alpha: float,
    n: int,
    t: int,
    seed: int = 0,
) -> SumDiamReport:
    """Distance between deep coefficients at a domain center and boundary
    point against the constant times the chain's diameter-power sum.

    Follows the labeled chain t -> sigma(t) -> ... for n steps; a missing
    link is an error.  The left side evaluates the iterated coefficients
    at depth n+1; the right side multiplies the assembled constant by the
    sum of diameter^alpha along the chain.
    """
    by_label = c.by_label()
    if t not in by_label:
        raise FamilyError(f"start label {t} not present")
    chain = [t]
    for _ in range(n):
        cur = chain[-1]
        if cur not in c.permutation:
            raise FamilyError(
                f"sigma chain broken at label {cur}: need {n} steps from {t}"
            )
        chain.append(c.permutation[cur])
    src = by_label[t]
    p = src.center.as_array()
    q = src.boundary_samples[0]
    lhs = hyp_dist(
        iterate_beltrami(f, p, n + 1).value, iterate_beltrami(f, q, n + 1).value
    )
    constants = assemble_chain_constants(f, c, alpha, seed=seed)
    rhs = constants["c_total"] * sum(by_label[k].diameter ** alpha for k in chain)
    return SumDiamReport(
        start_label=t,
        depth=n,
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(rhs - lhs),
        constants=constants,
    )


@dataclass(frozen=True)
class DilatationCapReport:
    n_max: int
    sample_count: int
    max_log_K: float
    max_K: float
    beta_sq: float
    tol: float

    @property
    def within_cap(self) -> bool:
        return self.max_log_K <= math.log(self.beta_sq + self.tol)


def bounded_dilatation_diagnostic(
    f: TorusMap,
    c: DomainCollection,
    n_max: int,
    samples_in_S: int,
    seed: int,
    tol: float = 1e-6,
) -> DilatationCapReport:
    """Worst iterate dilatation on the complement versus beta squared.

    Sample points are drawn uniformly and rejected unless they lie
    outside every circumscribed ball, so they are certainly in the
    complement.  For a map that genuinely permutes the family the
    maximum over samples and depths up to n_max must not exceed
    beta^2 (plus tol for exact constructions); the comparison runs in
    log space so expanding maps cannot overflow it.
    """
    if n_max < 1 or samples_in_S < 1:
        raise GeometryError("n_max and samples_in_S must be >= 1")
    candidates = random_points(max(20 * samples_in_S, 64), seed)
    centers = c.centers()
    R = np.array([d.circumradius for d in c.domains])
    gap = distance_array(candidates[:, None, :], centers[None, :, :]) - R[None, :]
    outside = np.all(gap > 0.0, axis=1)
    pts = candidates[outside][:samples_in_S]
    if pts.shape[0] == 0:
        raise FamilyError(
            "no sample point lands in the complement: the domains cover the draw"
        )
    worst = -math.inf
    for _, mats, log_s, log_det, _ in orbit_product_scan(f, pts, n_max):
        log_K, _, _, _ = log_norms_from_normalized(mats, log_s, log_det)
        worst = max(worst, float(np.max(log_K)))
    beta_sq = beta_of(c) ** 2
    return DilatationCapReport(
        n_max=n_max,
        sample_count=pts.shape[0],
        max_log_K=worst,
        max_K=math.exp(worst) if worst < 700.0 else math.inf,
        beta_sq=beta_sq,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# construction


def _rational_by_continued_fraction(
    x: float, tol: float = 1e-12, max_den: int = 10_000
) -> bool:
    """Does x admit a rational approximation p/q, q <= max_den, within tol?

    Convergents of the continued fraction are the best approximations,
    so scanning them up to the denominator cap is a complete test at
    this resolution.  The cap keeps irrationals like sqrt(2)-1 from
    being flagged merely because doubles are rational.
    """
    x = float(x) % 1.0
    p0, q0, p1, q1 = 0, 1, 1, 0
    val = x
    for _ in range(64):
        a = math.floor(val)
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        if q1 > max_den:
            return False
        if abs(x - p1 / q1) <= tol:
            return True
        frac = val - a
        if frac <= tol:
            return False
        val = 1.0 / frac
    return False


def build_translation_family(
    omega,
    count: int,
    c: float,
    rho: float,
    start=(0.0, 0.0),
    alpha: float = 0.5,
    boundary_count: int = 64,
    margin_factor: float = 0.05,
) -> DomainCollection:
    """Round disks along a translation orbit, permuted exactly by it.

    Centers are start + k*omega mod 1 for k = 0..count-1 and every disk
    gets the same radius, since the translation is an isometry and must
    carry each disk onto the next exactly.  The radius starts at c and
    is shrunk by the factor rho until every pair of disks clears
    d > (r_j + r_k)(1 + margin_factor); if it drops below 1e-9 the
    construction fails.  Rationally dependent omega (either coordinate
    rational at tolerance 1e-12, detected through continued-fraction
    convergents) is rejected: its orbit revisits points and disjointness
    is structurally impossible at this count.
    """
    if count < 1:
        raise FamilyError(f"count must be >= 1, got {count}")
    if not 0.0 < rho < 1.0:
        raise FamilyError(f"shrink factor rho must lie in (0, 1), got {rho}")
    ox, oy = float(omega[0]), float(omega[1])
    if _rational_by_continued_fraction(ox) or _rational_by_continued_fraction(oy):
        raise FamilyError(
            f"omega {omega} is rationally dependent at tolerance 1e-12; "
            "its orbit is periodic and cannot carry disjoint disks"
        )
    ks = np.arange(count)
    centers = wrap(np.asarray(start, dtype=float) + ks[:, None] * np.array([ox, oy]))

    if count > 1:
        D = distance_array(centers[:, None, :], centers[None, :, :])
        iu = np.triu_indices(count, 1)
        min_dist = float(np.min(D[iu]))
    else:
        min_dist = math.inf

    radius = float(c)
    while 2.0 * radius * (1.0 + margin_factor) >= min_dist:
        radius *= rho
        if radius < 1e-9:
            raise FamilyError(
                f"cannot fit {count} disjoint disks on this orbit even at "
                "radius 1e-9"
            )

    domains = tuple(
        Domain.round_disk(int(k), centers[k], radius, boundary_count) for k in ks
    )
    family = DomainCollection(
        domains=domains,
        permutation={int(k): int(k) + 1 for k in range(count - 1)},
        alpha=float(alpha),
        truncation_note=(
            f"finite truncation: {count} domains along one orbit; the "
            "permutation is undefined at the last label"
        ),
    )
    report = verify_collection(family)
    if not report.passed:
        raise FamilyError(f"constructed family fails verification: {report}")
    return family


# ---------------------------------------------------------------------------
# serialization


def family_to_dict(c: DomainCollection) -> dict:
    return {
        "schema_version": FAMILY_SCHEMA_VERSION,
        "alpha": c.alpha,
        "truncation_note": c.truncation_note,
        "boundary_count": int(c.domains[0].boundary_samples.shape[0]) if c.domains else 64,
        "domains": [
            {
                "label": d.label,
                "center": [d.center.x, d.center.y],
                "inradius": d.inradius,
                "circumradius": d.circumradius,
                "diameter": d.diameter,
            }
            for d in c.domains
        ],
        "permutation": {str(k): int(v) for k, v in sorted(c.permutation.items())},
    }


def family_from_dict(data: dict) -> DomainCollection:
    """Rebuild a collection; boundary samples are regenerated on the
    circumscribed circles."""
    try:
        count = int(data.get("boundary_count", 64))
        domains = []
        for entry in data["domains"]:
            center = as_xy(entry["center"])
            angles = 2.0 * math.pi * np.arange(count) / count
            samples = wrap(
                center
                + float(entry["circumradius"])
                * np.stack([np.cos(angles), np.sin(angles)], -1)
            )
            domains.append(
                Domain(
                    label=int(entry["label"]),
                    center=TorusPoint(center[0], center[1]),
                    inradius=float(entry["inradius"]),
                    circumradius=float(entry["circumradius"]),
                    diameter=float(entry["diameter"]),
                    boundary_samples=samples,
                )
            )
        permutation = {int(k): int(v) for k, v in data.get("permutation", {}).items()}
        return DomainCollection(
            domains=tuple(domains),
            permutation=permutation,
            alpha=float(data.get("alpha", 0.5)),
            truncation_note=str(data.get("truncation_note", "finite truncation")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FamilyError(f"malformed family document: {exc}") from exc
