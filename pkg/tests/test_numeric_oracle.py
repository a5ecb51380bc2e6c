import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import special_ortho_group

from isotensor.errors import DimensionError, QuadratureError, RangeError
from isotensor.numeric_oracle import (
    McConfig,
    SphericalPoint,
    angles_to_cartesian,
    average_power_direct,
    average_power_quadrature,
    average_power_table,
    average_product_quadrature,
    gaussian_descriptor_value,
    integral_table,
    longitudinal_integral,
    mc_average,
    mc_function_average,
    mc_tensor_integral,
    monomial_average_quadrature,
    radial_integral,
    sample_angles,
    solid_angle,
    solid_angle_by_quadrature,
    solid_angle_exact,
    to_cartesian,
)
from isotensor.sphere_average import average_power, average_product

from oracles import sphere_average_product


# --- coordinates

def test_to_cartesian_examples():
    np.testing.assert_allclose(to_cartesian(SphericalPoint((), 0.0)), [0.0, 1.0])
    np.testing.assert_allclose(to_cartesian(SphericalPoint((), math.pi / 2)), [1.0, 0.0], atol=1e-16)
    np.testing.assert_allclose(to_cartesian(SphericalPoint((math.pi / 2,), 0.0)), [0, 0, 1], atol=1e-16)
    np.testing.assert_allclose(to_cartesian(SphericalPoint((0.0, 1.0), 2.0)), [1, 0, 0, 0], atol=1e-16)


@settings(max_examples=100)
@given(st.lists(st.floats(0.0, math.pi), max_size=6), st.floats(0.0, 2 * math.pi, exclude_max=True))
def test_to_cartesian_is_unit(thetas, phi):
    v = to_cartesian(SphericalPoint(tuple(thetas), phi))
    assert v.shape == (len(thetas) + 2,)
    assert abs(v @ v - 1.0) <= 1e-14


@pytest.mark.parametrize("thetas, phi", [((-0.1,), 0.0), ((3.2,), 0.0), ((1.0,), 2 * math.pi), ((), -0.5)])
def test_to_cartesian_range(thetas, phi):
    with pytest.raises(RangeError):
        to_cartesian(SphericalPoint(thetas, phi))


def test_to_cartesian_dimension():
    with pytest.raises(DimensionError):
        to_cartesian(SphericalPoint((1.0,), 0.0), 4)


# --- solid angles

@pytest.mark.parametrize("n, expected", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi ** 2),
                                         (5, 8 * math.pi ** 2 / 3)])
def test_solid_angle(n, expected):
    assert solid_angle(n) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("n", range(1, 12))
def test_solid_angle_exact_form(n):
    c, p = solid_angle_exact(n)
    assert float(c) * math.pi ** p == pytest.approx(solid_angle(n), rel=1e-13)


def test_solid_angle_exact_examples():
    assert solid_angle_exact(3) == (Fraction(4), 1)
    assert solid_angle_exact(4) == (Fraction(2), 2)
    assert solid_angle_exact(5) == (Fraction(8, 3), 2)


@pytest.mark.parametrize("n", range(2, 9))
def test_solid_angle_by_quadrature(n):
    assert abs(solid_angle_by_quadrature(n) / solid_angle(n) - 1) <= 1e-9


def test_solid_angle_quadrature_examples():
    assert abs(solid_angle_by_quadrature(2) - 2 * math.pi) <= 1e-12
    assert abs(solid_angle_by_quadrature(3) - 12.566370614359172) <= 1e-9


@pytest.mark.parametrize("n", [1, 9])
def test_solid_angle_quadrature_range(n):
    with pytest.raises(RangeError):
        solid_angle_by_quadrature(n)


def test_quadrature_error_reports_tolerance():
    with pytest.raises(QuadratureError) as info:
        solid_angle_by_quadrature(8, tol=1e-300)
    assert info.value.achieved is not None


# --- closed forms

@pytest.mark.parametrize("a_sq, k, n, expected", [(1.0, 2, 3, 1 / 3), (1.0, 4, 3, 0.2), (1.0, 5, 3, 0.0),
                                                  (4.0, 2, 3, 4 / 3), (1.0, 0, 7, 1.0)])
def test_average_power_direct_examples(a_sq, k, n, expected):
    assert average_power_direct(a_sq, k, n) == pytest.approx(expected, rel=1e-13, abs=0)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("k", range(0, 9))
def test_average_power_routes_agree(n, k):
    exact = float(average_power((1,) + (0,) * (n - 1), k))
    for route in (average_power_direct, average_power_table, average_power_quadrature):
        value = route(1.0, k, n)
        assert value == pytest.approx(exact, rel=1e-10, abs=1e-14)


def test_average_power_direct_large_arguments():
    # log-Gamma keeps n + k ~ 300 finite
    value = average_power_direct(1.0, 100, 200)
    exact = average_power((1,) + (0,) * 199, 100)
    assert value == pytest.approx(float(exact), rel=1e-10)


def test_integral_table():
    assert integral_table(0, 2) == pytest.approx(2 / 3)
    assert integral_table(1, 0) == pytest.approx(4 / 3)
    assert integral_table(0.5, 3) == 0.0
    assert integral_table(0.5, 0) == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("exponents, expected", [((2, 0, 0), 1 / 3), ((0, 0, 2), 1 / 3), ((2, 2, 0), 1 / 15),
                                                 ((4, 0, 0, 0), 1 / 8), ((1, 1, 0), 0.0), ((0, 2), 0.5)])
def test_monomial_average_quadrature(exponents, expected):
    assert monomial_average_quadrature(exponents) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 4), st.data())
def test_product_quadrature_matches_exact(n, m, data):
    vecs = [tuple(data.draw(st.integers(-2, 2)) for _ in range(n)) for _ in range(m)]
    exact = float(sphere_average_product(vecs, n))
    assert average_product_quadrature(vecs) == pytest.approx(exact, abs=1e-9)


# --- Monte Carlo

def test_mc_empty_list():
    assert mc_average([], McConfig(10)) == (1.0, 0.0)


def test_mc_power_example():
    est, se = mc_average([(0, 0, 1)] * 2, McConfig(1_000_000, seed=1))
    assert abs(est - 1 / 3) <= 3 * se
    assert 2e-4 < se < 5e-4


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mc_odd_consistent_with_zero(seed):
    vecs = [(1, 2, 0), (0, -1, 3), (2, 2, 1)]
    est, se = mc_average(vecs, McConfig(200_000, seed=seed))
    assert abs(est) <= 3 * se


def test_mc_antithetic_kills_odd_products():
    est, se = mc_average([(1, 2, 0)], McConfig(1000, antithetic=True))
    assert est == 0.0


def test_mc_deterministic_and_thread_independent():
    vecs = [(1, 0, 2, 0), (1, 1, 0, 0), (0, 1, 0, 1), (2, 0, 0, 1)]
    cfg = McConfig(300_000, seed=42)
    serial = mc_average(vecs, cfg)
    assert mc_average(vecs, cfg) == serial
    assert mc_average(vecs, cfg, workers=4) == serial
    assert mc_average(vecs, McConfig(300_000, seed=43)) != serial


def test_mc_tensor_integral_thread_independent():
    cfg = McConfig(150_000, seed=3)
    a = (0.0, 0.6, 0.8)
    one = mc_tensor_integral(2, a, (1.0, 0.5), cfg)
    four = mc_tensor_integral(2, a, (1.0, 0.5), cfg, workers=4)
    np.testing.assert_array_equal(one[0], four[0])
    np.testing.assert_array_equal(one[1], four[1])


def test_mc_dimension_errors():
    with pytest.raises(DimensionError):
        mc_average([(1, 0), (1, 0, 0)], McConfig(10))
    with pytest.raises(DimensionError):
        mc_average([(1, 0)], McConfig(10), n_value=3)


def test_mc_config_validation():
    with pytest.raises(RangeError):
        McConfig(0)
    with pytest.raises(RangeError):
        McConfig(10, seed=-1)


def test_jacobian_consistency():
    cfg = McConfig(400_000, seed=11)
    gauss, se_g = mc_average([(1, 0, 0)] * 2, cfg)
    angles, se_a = mc_average([(1, 0, 0)] * 2, McConfig(400_000, seed=11, stream=1), sampler="angles")
    assert abs(gauss - angles) <= 3 * math.hypot(se_g, se_a)
    assert abs(angles - 1 / 3) <= 3 * se_a


@pytest.mark.parametrize("n", [2, 4, 5])
def test_angle_sampler_is_uniform(n):
    rng = np.random.default_rng(0)
    pts = angles_to_cartesian(*sample_angles(200_000, n, rng))
    np.testing.assert_allclose((pts ** 2).mean(axis=0), np.full(n, 1 / n), atol=5e-3)


def test_rotation_invariance():
    rng = np.random.default_rng(5)
    vecs = [rng.normal(size=3) for _ in range(4)]
    rot = special_ortho_group.rvs(3, random_state=7)
    cfg = McConfig(400_000, seed=9)
    est1, se1 = mc_average(vecs, cfg)
    est2, se2 = mc_average([rot @ v for v in vecs], McConfig(400_000, seed=9, stream=1))
    assert abs(est1 - est2) <= 3 * math.hypot(se1, se2)


@pytest.mark.parametrize("seed", range(3))
def test_mc_matches_exact_product(seed):
    rng = np.random.default_rng(seed)
    vecs = [tuple(int(x) for x in rng.integers(-2, 3, 4)) for _ in range(4)]
    exact = float(average_product(vecs))
    est, se = mc_average(vecs, McConfig(400_000, seed=seed))
    assert abs(est - exact) <= 3 * se + 1e-15


def test_mc_function_average():
    est, se = mc_function_average(lambda r: r[:, 0] ** 4, 3, McConfig(400_000, seed=2))
    assert abs(est - 0.2) <= 3 * se


# --- Gaussian integrals

def test_radial_integral():
    assert radial_integral(0, 3) == pytest.approx(math.pi ** 1.5, rel=1e-10)
    assert radial_integral(2, 2) == pytest.approx(math.pi, rel=1e-10)
    assert radial_integral(0, 0) == 1.0
    assert radial_integral(2, 0) == 0.0


def test_longitudinal_integral():
    sp = math.sqrt(math.pi)
    assert longitudinal_integral(0, (1.0,)) == pytest.approx(sp, rel=1e-10)
    assert longitudinal_integral(2, (1.0,)) == pytest.approx(sp / 2, rel=1e-10)
    assert longitudinal_integral(1, (0.0, 1.0)) == pytest.approx(sp / 2, rel=1e-10)
    assert longitudinal_integral(1, (1.0,)) == pytest.approx(0.0, abs=1e-12)


def test_gaussian_descriptor_factorizes():
    # int d^3 q (q.e1)^2 exp(-q^2) = pi^(3/2)/2
    assert gaussian_descriptor_value(0, (1, 1), 3, 1, (1.0,)) == pytest.approx(math.pi ** 1.5 / 2)
    assert gaussian_descriptor_value(2, (), 3, 1, (1.0,)) == pytest.approx(math.pi ** 1.5)


def test_mc_tensor_integral_rank0():
    est, se = mc_tensor_integral(0, (0, 0, 1), (1.0,), McConfig(1000))
    assert est == pytest.approx(math.pi ** 1.5)
    assert se == pytest.approx(0.0, abs=1e-12)
