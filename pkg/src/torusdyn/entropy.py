"""Separated-set entropy estimation and integral upper bounds on entropy.

The orbit metric used throughout is
``d_n(x, y) = max over i = 1..n of d(f^i x, f^i y)`` (the index starts at
1, not 0; this is immaterial for growth rates and is applied literally).
Separated sets are built greedily in candidate order, which yields a
maximal but not maximum set: the counts are lower bounds for the true
separation numbers.  Since every inequality tested here bounds entropy
from above, a lower-bound estimator is the honest side to probe them
with, and every report carries that note.

The two integral bounds average the dilatation (exponent 1/2n) and the
largest exterior-power norm (exponent 1/n) of the iterate derivatives
over a quadrature grid.  Both integrands grow exponentially in n, so all
accumulation happens in log space through the renormalized cocycle
products; nothing is ever materialized linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dilatation import log_norms_from_normalized
from .errors import FitError, GeometryError
from .maps import TorusMap, orbit_product_scan
from .torus import as_xy, distance_array, grid_points, jittered_grid, wrap

ESTIMATOR_NOTE = (
    "separated counts are greedy maximal-set sizes: lower bounds for the "
    "true separation numbers"
)


@dataclass(frozen=True)
class SeparatedReport:
    """Result of one greedy separated-set pass."""

    n: int
    epsilon: float
    count: int
    candidate_count: int
    seed: int | None = None


def bowen_distance(f: TorusMap, p, q, n: int) -> float:
    """max over i = 1..n of the torus distance between the i-th images."""
    if n < 1:
        raise GeometryError(f"iterate depth must be >= 1, got {n}")
    a, b = as_xy(p), as_xy(q)
    worst = 0.0
    for _ in range(n):
        a, b = f(a), f(b)
        worst = max(worst, float(distance_array(a, b)))
    return worst


def orbit_table(f: TorusMap, xy: np.ndarray, n: int) -> np.ndarray:
    """Iterates f^1..f^n of each row of xy, shape (m, n, 2)."""
    cur = wrap(np.asarray(xy, dtype=float))
    out = np.empty((cur.shape[0], n, 2))
    for i in range(n):
        cur = f(cur)
        out[:, i, :] = cur
    return out


def _greedy_count(orbits: np.ndarray, epsilon: float) -> int:
    """Greedy maximal separated set over precomputed orbits.

    A candidate is rejected iff some retained point is within epsilon at
    every iterate; the conflict set is filtered one iterate at a time,
    which usually empties after two or three stages.
    """
    m, n, _ = orbits.shape
    eps2 = epsilon * epsilon
    kept = np.empty((m, n, 2))
    nk = 0
    for i in range(m):
        x = orbits[i]
        if nk:
            d = np.abs(kept[:nk, 0, :] - x[0])
            d = np.minimum(d, 1.0 - d)
            sel = np.nonzero(d[:, 0] ** 2 + d[:, 1] ** 2 < eps2)[0]
            j = 1
            while sel.size and j < n:
                d = np.abs(kept[sel, j, :] - x[j])
                d = np.minimum(d, 1.0 - d)
                sel = sel[d[:, 0] ** 2 + d[:, 1] ** 2 < eps2]
                j += 1
            if sel.size:
                continue
        kept[nk] = x
        nk += 1
    return nk


def separated_count(
    f: TorusMap, n: int, epsilon: float, candidates: np.ndarray, seed: int | None = None
) -> SeparatedReport:
    """Greedy separated set retained from the candidates, in their order.

    Deterministic for a fixed candidate order.  The result is maximal,
    so ``count`` lower-bounds the maximum cardinality at this (n, eps).
    """
    if epsilon <= 0.0:
        raise GeometryError(f"epsilon must be positive, got {epsilon}")
    cand = np.asarray(candidates, dtype=float)
    if cand.ndim != 2 or cand.shape[0] == 0:
        raise GeometryError("candidate set must be a nonempty (m, 2) array")
    count = _greedy_count(orbit_table(f, cand, n), epsilon)
    return SeparatedReport(
        n=n, epsilon=epsilon, count=count, candidate_count=cand.shape[0], seed=seed
    )


@dataclass(frozen=True)
class EntropyFit:
    """Least-squares slope of log count against n, with the raw counts."""

    epsilon: float
    slope: float
    reports: tuple[SeparatedReport, ...]


def entropy_estimate(
    f: TorusMap,
    epsilon: float,
    n_range,
    candidates: np.ndarray,
    seed: int | None = None,
) -> EntropyFit:
    """Fit the growth rate of the greedy counts over n_range.

    Replaces the double limit by a slope over a finite window; the
    epsilon limit is probed by running several epsilons side by side.
    """
    ns = sorted(int(n) for n in n_range)
    if len(ns) < 3:
        raise FitError(f"n_range needs at least 3 values, got {ns}")
    cand = np.asarray(candidates, dtype=float)
    if cand.ndim != 2 or cand.shape[0] == 0:
        raise GeometryError("candidate set must be a nonempty (m, 2) array")
    orbits = orbit_table(f, cand, max(ns))
    reports = []
    for n in ns:
        count = _greedy_count(orbits[:, :n, :], epsilon)
        if count == 0:
            raise FitError(f"zero separated count at n={n}; slope fit is degenerate")
        reports.append(
            SeparatedReport(
                n=n, epsilon=epsilon, count=count,
                candidate_count=cand.shape[0], seed=seed,
            )
        )
    slope = float(np.polyfit(ns, np.log([r.count for r in reports]), 1)[0])
    return EntropyFit(epsilon=epsilon, slope=slope, reports=tuple(reports))


def _log_mean_exp(x: np.ndarray) -> float:
    """log of the mean of exp(x), max-shifted so huge exponents never overflow."""
    x = np.asarray(x, dtype=float)
    mx = float(np.max(x))
    return mx + math.log(float(np.mean(np.exp(x - mx))))


def integral_bounds(f: TorusMap, n_values, nodes: np.ndarray) -> dict[int, tuple[float, float]]:
    """Both integral bounds for every requested n, in one orbit sweep.

    Returns ``{n: (dilatation_bound, przytycki_bound)}`` where the first
    is (1/2n) log of the quadrature average of the iterate dilatation and
    the second is (1/n) log of the average largest exterior-power norm.
    The total measure is 1, so the midpoint-rule average is the integral.
    """
    wanted = sorted(set(int(n) for n in n_values))
    if wanted[0] < 1:
        raise GeometryError(f"iterate depths must be >= 1, got {wanted}")
    nodes = np.asarray(nodes, dtype=float)
    out: dict[int, tuple[float, float]] = {}
    for n, mats, log_s, log_det, _ in orbit_product_scan(f, nodes, wanted[-1]):
        if n in wanted:
            log_K, _, _, log_full = log_norms_from_normalized(mats, log_s, log_det)
            out[n] = (
                _log_mean_exp(log_K) / (2.0 * n),
                _log_mean_exp(log_full) / n,
            )
    return out


def dilatation_bound(f: TorusMap, n: int, nodes: np.ndarray) -> float:
    """(1/2n) log of the average dilatation of f^n over the nodes."""
    return integral_bounds(f, [n], nodes)[n][0]


def przytycki_bound(f: TorusMap, n: int, nodes: np.ndarray) -> float:
    """(1/n) log of the average largest exterior-power norm of Df^n.

    For area-preserving maps the norm is the top singular value, i.e.
    sqrt of the dilatation, tying this bound to ``dilatation_bound``.
    """
    return integral_bounds(f, [n], nodes)[n][1]


@dataclass(frozen=True)
class ChainParams:
    """Run parameters for a bound chain."""

    n_range: tuple[int, ...]
    epsilons: tuple[float, ...]
    quadrature: int = 64
    candidate_grid: int = 200
    seed: int = 0
    slack_scale: float = 2.0  # statistical slack per n is slack_scale*log(2)/n

    def slack(self, n: int) -> float:
        return self.slack_scale * math.log(2.0) / n


@dataclass
class ChainRecord:
    """Per-n entries of a bound chain.

    ``rate_raw`` is log(count)/n; ``entropy_rate`` is the growth rate of
    log count anchored at the smallest n of the range (None there), which
    is the quantity comparable to the bounds at finite depth.
    """

    n: int
    counts: dict
    rate_raw: dict
    entropy_rate: dict
    dilatation_bound: float
    przytycki_bound: float
    xi_rate: float | None = None
    max_log_K: float | None = None
    power_sum_bound: float | None = None


@dataclass
class BoundChain:
    map_descriptor: dict
    params: ChainParams
    records: list[ChainRecord]
    flags: list[dict]
    constants: dict | None = None
    estimator_note: str = field(default=ESTIMATOR_NOTE)


def bound_chain(f: TorusMap, params: ChainParams, collection=None) -> BoundChain:
    """Assemble per-n entropy rates, both integral bounds, and flags.

    A record is flagged when its anchored entropy rate exceeds a bound
    plus the statistical slack.  With a domain collection attached, the
    maximal log-dilatation over the forward images of the domain centers
    is compared per n against C * powersum(n) + C', with C assembled from
    the Mobius Lipschitz constants and the empirical Holder constants
    (times their safety factor) and C' from the depth-1 dilatation
    supremum; exceeding that is flagged as well.
    """
    ns = sorted(set(int(n) for n in params.n_range))
    if not ns or ns[0] < 1:
        raise GeometryError(f"n_range must contain positive depths, got {params.n_range}")
    candidates = jittered_grid(params.candidate_grid, params.seed)
    nodes = grid_points(params.quadrature)
    bounds = integral_bounds(f, ns, nodes)

    counts: dict[float, dict[int, int]] = {}
    orbits = orbit_table(f, candidates, max(ns))
    for eps in params.epsilons:
        counts[eps] = {n: _greedy_count(orbits[:, :n, :], eps) for n in ns}

    constants = None
    center_log_K: dict[int, float] = {}
    if collection is not None:
        # deferred import: domains builds on this module's inputs, not on
        # bound chains, so the dependency only exists at call time
        from .domains import assemble_chain_constants, max_power_sum_lengths

        constants = assemble_chain_constants(
            f, collection, collection.alpha, seed=params.seed
        )
        centers = np.array([d.center.as_array() for d in collection.domains])
        images = f(centers)
        for n, mats, log_s, log_det, _ in orbit_product_scan(f, images, max(ns)):
            if n in ns:
                log_K, _, _, _ = log_norms_from_normalized(mats, log_s, log_det)
                center_log_K[n] = float(np.max(log_K))

    records: list[ChainRecord] = []
    flags: list[dict] = []
    n0 = ns[0]
    for n in ns:
        rec = ChainRecord(
            n=n,
            counts={eps: counts[eps][n] for eps in params.epsilons},
            rate_raw={
                eps: math.log(counts[eps][n]) / n if counts[eps][n] > 0 else float("-inf")
                for eps in params.epsilons
            },
            entropy_rate={},
            dilatation_bound=bounds[n][0],
            przytycki_bound=bounds[n][1],
        )
        for eps in params.epsilons:
            if n == n0 or counts[eps][n] == 0 or counts[eps][n0] == 0:
                rec.entropy_rate[eps] = None
                continue
            rate = (math.log(counts[eps][n]) - math.log(counts[eps][n0])) / (n - n0)
            rec.entropy_rate[eps] = rate
            slack = params.slack(n)
            if rate > rec.dilatation_bound + slack:
                flags.append(
                    {"n": n, "epsilon": eps, "kind": "entropy_rate_above_dilatation_bound"}
                )
            if rate > rec.przytycki_bound + slack:
                flags.append(
                    {"n": n, "epsilon": eps, "kind": "entropy_rate_above_przytycki_bound"}
                )
        if collection is not None:
            lengths = [d.diameter for d in collection.domains]
            if len(lengths) >= n + 1:
                ps = max_power_sum_lengths(lengths, collection.alpha, n)
                rec.xi_rate = ps / n
                rec.max_log_K = center_log_K[n]
                rec.power_sum_bound = constants["c_total"] * ps + constants["c_prime"]
                if rec.max_log_K > rec.power_sum_bound + 1e-9:
                    flags.append(
                        {"n": n, "epsilon": None, "kind": "log_dilatation_above_power_sum_bound"}
                    )
        records.append(rec)

    return BoundChain(
        map_descriptor=f.descriptor(),
        params=params,
        records=records,
        flags=flags,
        constants=constants,
    )
