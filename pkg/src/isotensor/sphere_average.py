"""Exact angle averages over the unit sphere S^(n-1).

The average of a product of ``m`` projections ``(a_i . r)`` vanishes for odd
``m``; for ``m = 2k`` it is ``c_nk`` times the sum, over all perfect
matchings of the ``m`` slots, of the products of paired scalar products.
"""

from __future__ import annotations

from fractions import Fraction

from .combinatorics import double_factorial, iter_pairings
from .errors import DimensionError
from .exact_arith import RationalFunction, c_nk
from .tensor_core import identify_average_tensor  # noqa: F401  (re-exported)
from .vectors import ConcreteVector, as_vector, check_same_dim, to_fraction


def _coefficient(k, n_value):
    coef = c_nk(k)
    if n_value is None or n_value == "n":
        return coef
    return coef.evaluate_at(n_value)


def average_power(a=None, exponent: int = 2, n_value=None, *, a_sq=None):
    """``<(a . r)^exponent>`` over the unit sphere in ``n`` dimensions.

    ``a`` is a vector; alternatively pass ``a_sq`` (required when
    ``n_value`` is symbolic, i.e. ``None`` or ``"n"`` with no vector).  Returns
    a :class:`~fractions.Fraction` for concrete ``n`` and a
    :class:`RationalFunction` otherwise.
    """
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    if a_sq is None:
        if a is None:
            raise ValueError("need a vector or a_sq")
        a = as_vector(a)
        a_sq = a.norm_sq()
        if n_value is None:
            n_value = a.dim
    a_sq = to_fraction(a_sq)
    symbolic = n_value is None or n_value == "n"
    if not symbolic and int(n_value) < 1:
        raise DimensionError("n must be positive")
    if exponent % 2:
        return RationalFunction.constant(0) if symbolic else Fraction(0)
    k = exponent // 2
    coef = _coefficient(k, None if symbolic else n_value)
    weight = double_factorial(2 * k - 1) * a_sq ** k
    if symbolic:
        return coef.scale(weight)
    return coef * weight


def pairing_sum(gram, m: int, cap: int | None = None) -> Fraction:
    """Sum over perfect matchings of ``0..m-1`` of products of ``gram[p][q]``."""
    total = Fraction(0)
    for pairing in iter_pairings(m, cap, items=tuple(range(m))):
        prod = Fraction(1)
        for p, q in pairing:
            prod *= gram[p][q]
            if not prod:
                break
        total += prod
    return total


def average_product(vectors=None, n_value=None, *, gram=None, cap=None):
    """``<(a_1 . r)(a_2 . r)...(a_m . r)>`` over the unit sphere.

    Pass concrete ``vectors`` (their length is the dimension unless
    ``n_value`` overrides it) or a matrix of scalar products ``gram``.  With
    symbolic ``n_value="n"`` the result is a :class:`RationalFunction`.
    """
    if gram is None:
        vectors = [as_vector(v) for v in (vectors or [])]
        dim = check_same_dim(vectors)
        if n_value is None:
            n_value = dim
        elif n_value != "n" and dim is not None and int(n_value) != dim:
            raise DimensionError(f"vectors have dimension {dim}, not {n_value}")
        m = len(vectors)
        gram = [[u.dot(v) for v in vectors] for u in vectors]
    else:
        m = len(gram)
        gram = [[to_fraction(x) for x in row] for row in gram]
    symbolic = n_value is None or n_value == "n"
    if m % 2:
        return RationalFunction.constant(0) if symbolic else Fraction(0)
    if m == 0:
        return RationalFunction.constant(1) if symbolic else Fraction(1)
    total = pairing_sum(gram, m, cap)
    coef = _coefficient(m // 2, None if symbolic else n_value)
    return coef.scale(total) if symbolic else coef * total


__all__ = [
    "ConcreteVector",
    "average_power",
    "average_product",
    "identify_average_tensor",
    "pairing_sum",
]
