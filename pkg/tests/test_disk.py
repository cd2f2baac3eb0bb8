import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusdyn.disk import (
    DiskCoeff,
    LipschitzConstants,
    UnitModulus,
    delta_from_beta,
    hyp_dist,
    lipschitz_constants,
    mobius,
    mobius_T,
    radial_distance_quadrature,
    rotate,
)
from torusdyn.errors import BoundaryError, GeometryError


def disk_samples(count, seed, radius=0.97):
    """Uniform complex samples in the disk of the given radius."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random(count))
    phi = rng.uniform(0.0, 2.0 * math.pi, count)
    return r * np.exp(1j * phi)


inside = st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False)


def test_disk_coeff_rejects_boundary():
    with pytest.raises(BoundaryError):
        DiskCoeff(1.0, 0.0)
    with pytest.raises(BoundaryError):
        DiskCoeff(0.8, 0.7)
    DiskCoeff(0.8, 0.5)  # modulus < 1 passes


def test_unit_modulus_renormalizes_and_rejects():
    u = UnitModulus(1.0 + 4e-13, 0.0)
    assert math.hypot(u.re, u.im) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(BoundaryError):
        UnitModulus(0.5, 0.5)


def test_hyp_dist_closed_forms():
    assert hyp_dist(0j, 0j) == 0.0
    assert hyp_dist(0j, 0.5 + 0j) == pytest.approx(math.log(3.0), abs=1e-14)
    assert hyp_dist(0j, 1.0 / 3.0 + 0j) == pytest.approx(math.log(2.0), abs=1e-14)


def test_hyp_dist_log_dilatation_of_axis_stretch():
    # the coefficient of diag(2,1) sits at 1/3 on the axis and its
    # dilatation is 2; the radial distance must equal log 2 exactly
    from torusdyn.dilatation import K_from_mu, beltrami_from_jacobian

    s = beltrami_from_jacobian(np.diag([2.0, 1.0]))
    assert s.mu.value == pytest.approx(1.0 / 3.0)
    assert hyp_dist(s.mu, 0j) == pytest.approx(math.log(K_from_mu(s)), abs=1e-12)


def test_hyp_dist_matches_length_element_quadrature():
    # independent oracle: integrate 2/(1-t^2) along the radial path
    for r in (0.1, 0.3, 0.5, 0.9, 0.95):
        assert hyp_dist(0j, complex(r)) == pytest.approx(
            radial_distance_quadrature(r), abs=1e-6
        )


def test_mobius_special_points():
    z = 0.3 + 0.4j
    a = -0.2 + 0.6j
    assert mobius_T(0j, z).value == pytest.approx(z)
    assert mobius_T(a, 0j).value == pytest.approx(a)
    assert abs(mobius_T(a, -a).value) <= 1e-15


def test_mobius_isometry_bulk():
    a = disk_samples(10_000, 11)
    z = disk_samples(10_000, 12)
    w = disk_samples(10_000, 13)
    worst = 0.0
    for ai, zi, wi in zip(a, z, w):
        d1 = hyp_dist(mobius(ai, zi), mobius(ai, wi))
        d2 = hyp_dist(zi, wi)
        worst = max(worst, abs(d1 - d2))
    assert worst <= 1e-10


@given(phi=st.floats(0, 2 * math.pi), z=inside, w=inside)
@settings(max_examples=300, deadline=None)
def test_rotation_isometry(phi, z, w):
    assert hyp_dist(rotate(phi, z), rotate(phi, w)) == pytest.approx(
        hyp_dist(z, w), abs=1e-10
    )


def test_delta_from_beta_values():
    assert delta_from_beta(1.0) == 0.0
    assert delta_from_beta(math.sqrt(3.0)) == pytest.approx(0.5)
    assert delta_from_beta(2.0) == pytest.approx(0.6)
    with pytest.raises(GeometryError):
        delta_from_beta(0.9)


def test_delta_from_beta_is_dilatation_threshold():
    # K <= beta^2 exactly when |mu| <= delta
    beta = 1.7
    delta = delta_from_beta(beta)
    for m in (delta - 1e-9, delta):
        assert (1 + m) / (1 - m) <= beta**2 + 1e-12
    m = delta + 1e-9
    assert (1 + m) / (1 - m) > beta**2


def test_lipschitz_constants_worked_values():
    lc = lipschitz_constants(math.sqrt(3.0), 0.5)
    assert isinstance(lc, LipschitzConstants)
    assert lc.delta == pytest.approx(0.5)
    assert lc.q1 == pytest.approx(0.5625)
    assert lc.q2 == pytest.approx(1.0)
    assert lc.c1_euclidean == pytest.approx(1.75 / 0.5625)
    assert lc.delta_dprime == pytest.approx((0.5 + 0.5) / (1 + 0.25))
    assert lc.delta_dprime >= max(lc.delta, lc.delta_prime)
    assert lc.c1 == pytest.approx(lc.c1_euclidean * 2.0 / (1.0 - 0.8**2))
    with pytest.raises(GeometryError):
        lipschitz_constants(2.0, 1.0)


def sample_in_radius(count, seed, radius):
    return disk_samples(count, seed, radius=radius)


def test_euclidean_lipschitz_bound_sampled():
    # |T_a(z) - T_b(z)| <= c1_euclidean |a - b| on the stated disks
    lc = lipschitz_constants(math.sqrt(3.0), 0.5)
    a = sample_in_radius(100_000, 21, lc.delta_prime)
    b = sample_in_radius(100_000, 22, lc.delta_prime)
    z = sample_in_radius(100_000, 23, lc.delta)
    lhs = np.abs(mobius(a, z) - mobius(b, z))
    rhs = lc.c1_euclidean * np.abs(a - b)
    assert np.all(lhs <= rhs + 1e-12)


def test_hyperbolic_lipschitz_bound_sampled():
    lc = lipschitz_constants(math.sqrt(3.0), 0.5)
    rng_pairs = 20_000
    a = sample_in_radius(rng_pairs, 31, lc.delta_prime)
    b = sample_in_radius(rng_pairs, 32, lc.delta_prime)
    z = sample_in_radius(rng_pairs, 33, lc.delta)
    for ai, bi, zi in zip(a, b, z):
        assert hyp_dist(mobius(ai, zi), mobius(bi, zi)) <= lc.c1 * hyp_dist(ai, bi) + 1e-12


def test_mobius_range_bound():
    # |T_a(z)| <= (|a|+|z|)/(1+|a||z|), the closed form behind delta_dprime
    a = disk_samples(20_000, 41)
    z = disk_samples(20_000, 42)
    lhs = np.abs(mobius(a, z))
    rhs = (np.abs(a) + np.abs(z)) / (1.0 + np.abs(a) * np.abs(z))
    assert np.all(lhs <= rhs + 1e-12)


def test_hyp_dist_rejects_outside():
    with pytest.raises(BoundaryError):
        hyp_dist(1.2 + 0j, 0j)
