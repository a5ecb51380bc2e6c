from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isotensor.errors import DimensionError
from isotensor.exact_arith import RationalFunction, parse_rational_function
from isotensor.numeric_oracle import McConfig, average_product_quadrature, mc_average
from isotensor.sphere_average import (
    average_power,
    average_product,
    identify_average_tensor,
    pairing_sum,
)
from isotensor.tensor_core import apply_to_vectors, iso_tensor

from oracles import sphere_average_product


def test_average_power_symbolic():
    assert average_power(a_sq=1, exponent=2) == parse_rational_function("1/n")
    assert average_power(a_sq=1, exponent=4, n_value="n") == parse_rational_function("3/(n*(n+2))")


def test_average_power_odd():
    assert average_power((1, 2, 3), 3) == 0
    assert average_power(a_sq=5, exponent=1) == RationalFunction.constant(0)


def test_average_power_frozen_values():
    # 3!! * 2^4 / (3 * 5), cross-checked against quadrature below
    assert average_power((0, 0, 2), 4) == Fraction(16, 5)
    assert average_power((0, 0, 2), 4) == pytest.approx(
        average_product_quadrature([(0, 0, 2)] * 4), abs=1e-12)
    assert [average_power((0, 0, 1), 2 * k) for k in (1, 2, 3)] == [Fraction(1, 3), Fraction(1, 5), Fraction(1, 7)]


def test_average_power_explicit_dim():
    assert average_power(a_sq=Fraction(1, 4), exponent=2, n_value=2) == Fraction(1, 8)
    with pytest.raises(DimensionError):
        average_power(a_sq=1, exponent=2, n_value=0)


def test_average_product_examples():
    a, b = (1, 2, 0), (0, 1, 3)
    assert average_product([a, b]) == Fraction(2, 3)
    a2, b2, ab = 5, 10, 2
    assert average_product([a, a, b, b]) == Fraction(a2 * b2 + 2 * ab * ab, 15)
    assert average_product([a, b, (1, 1, 1)]) == 0
    assert average_product([]) == 1


def test_average_product_symbolic_gram():
    assert average_product(gram=[[1, 0], [0, 1]], n_value="n").is_zero()
    value = average_product(gram=[[1, 1], [1, 1]], n_value="n")
    assert value == parse_rational_function("1/n")


def test_average_product_dimension_mismatch():
    with pytest.raises(DimensionError):
        average_product([(1, 0), (1, 0, 0)])
    with pytest.raises(DimensionError):
        average_product([(1, 0), (0, 1)], n_value=3)


def test_identify_average_tensor():
    assert identify_average_tensor(2).render() == "1/n * d(i1,i2)"
    assert identify_average_tensor(4) == iso_tensor(4)
    assert identify_average_tensor(0).scalar_value() == 1


def test_pairing_sum():
    assert pairing_sum([[1, 2, 3, 4], [2, 1, 5, 6], [3, 5, 1, 7], [4, 6, 7, 1]], 4) == 2 * 7 + 3 * 6 + 4 * 5


vectors = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=2, max_size=5)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(1, 4), st.data())
def test_repeated_vector_matches_power(n, k, data):
    v = tuple(data.draw(st.fractions(-3, 3, max_denominator=4)) for _ in range(n))
    assert average_product([v] * (2 * k)) == average_power(v, 2 * k)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(0, 3), st.data())
def test_matches_oracle_and_tensor(n, half, data):
    m = 2 * half + data.draw(st.integers(0, 1))
    vecs = [tuple(data.draw(st.integers(-3, 3)) for _ in range(n)) for _ in range(m)]
    exact = average_product(vecs)
    assert exact == sphere_average_product(vecs, n)
    if m % 2 == 0:
        t = iso_tensor(m)
        assert apply_to_vectors(t, dict(zip(t.labels, vecs))) == exact


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.data())
def test_bilinearity(n, data):
    ints = st.integers(-3, 3)
    a, b, c, d = ([data.draw(ints) for _ in range(n)] for _ in range(4))
    s = Fraction(data.draw(st.integers(-3, 3)), 2)
    combo = [x + s * y for x, y in zip(a, b)]
    lhs = average_product([combo, c, d, c])
    rhs = average_product([a, c, d, c]) + s * average_product([b, c, d, c])
    assert lhs == rhs


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_agrees_with_numeric_oracle(n, k):
    vecs = [(1,) + (0,) * (n - 2) + (2,), (0,) * (n - 1) + (1,)] * k
    exact = float(average_product(vecs))
    assert average_product_quadrature(vecs) == pytest.approx(exact, abs=1e-9)
    est, se = mc_average(vecs, McConfig(200_000, seed=11, stream=10 * n + k))
    assert abs(est - exact) <= 3 * se
