"""Brute-force reference implementations used only by the tests.

These follow the literal permutation-sum definitions and share no code
with the package's symbolic engine: every symmetrized sum runs over all
``k!`` permutations and divides out the over-counting afterwards.
"""

from fractions import Fraction
from itertools import permutations
from math import factorial, prod

import numpy as np
import sympy


def double_factorial(m):
    return prod(range(m, 0, -2)) if m > 0 else 1


def pairings_by_permutation(count):
    """Distinct perfect matchings of 1..count, deduplicated from all permutations."""
    seen = set()
    for perm in permutations(range(1, count + 1)):
        pairs = frozenset(
            tuple(sorted(perm[j:j + 2])) for j in range(0, count, 2)
        )
        seen.add(pairs)
    return seen


def delta_product_sum(rank, metric):
    """``sum_sigma g^{s1 s2} ... g^{s(2k-1) s(2k)}`` over all ``(2k)!`` permutations."""
    n = metric.shape[0]
    out = np.zeros((n,) * rank)
    letters = "abcdefghijklmnop"[:rank]
    for perm in permutations(range(rank)):
        subs = ",".join(letters[perm[j]] + letters[perm[j + 1]] for j in range(0, rank, 2))
        out += np.einsum(subs + "->" + letters, *([metric] * (rank // 2)))
    return out


def iso_components(rank, n, metric=None, dim=None):
    """Components of ``I(2k) = 1/(d(d+2)..) 1/(2k)!! sum_sigma delta..delta``."""
    metric = np.eye(n) if metric is None else metric
    dim = n if dim is None else dim
    if rank == 0:
        return np.array(1.0)
    k = rank // 2
    coef = 1.0 / prod(dim + 2 * j for j in range(k)) / double_factorial(rank)
    return coef * delta_product_sum(rank, metric)


def e_components(axes, k, unit_vectors, n):
    """``1/(r!(k-r)!) sum_sigma e_p1^s(i1)..e_pr^s(ir) I_perp(k-r)`` by brute force.

    ``axes`` lists 0-based rows of ``unit_vectors``; the transverse
    isotropic tensor uses ``delta_perp = 1 - sum e e`` and dimension
    ``n - m``.
    """
    e = np.asarray(unit_vectors, dtype=float)
    m = e.shape[0]
    r = len(axes)
    perp = np.eye(n) - e.T @ e
    iperp = iso_components(k - r, n, perp, n - m) if k - r else np.array(1.0)
    base = iperp
    for p in reversed(axes):
        base = np.multiply.outer(e[p], base)
    out = np.zeros((n,) * k)
    for perm in permutations(range(k)):
        out += np.transpose(base, np.argsort(perm))
    return out / (factorial(r) * factorial(k - r))


def split_sum_brute(q_par, q_perp, index):
    """Literal double sum over r and all permutations with 1/(r!(k-r)!)."""
    k = len(index)
    total = Fraction(0)
    for r in range(k + 1):
        acc = Fraction(0)
        for perm in permutations(range(k)):
            term = Fraction(1)
            for pos in perm[:r]:
                term *= q_par[index[pos]]
            for pos in perm[r:]:
                term *= q_perp[index[pos]]
            acc += term
        total += acc / (factorial(r) * factorial(k - r))
    return total


def sphere_average_product(vectors, n):
    """``<prod (a_i . r)>`` through the pairing formula written from scratch."""
    vectors = [[Fraction(x) for x in v] for v in vectors]
    m = len(vectors)
    if m % 2:
        return Fraction(0)
    dot = lambda u, v: sum((x * y for x, y in zip(u, v)), Fraction(0))
    total = Fraction(0)
    for matching in pairings_by_permutation(m):
        total += prod((dot(vectors[p - 1], vectors[q - 1]) for p, q in matching), start=Fraction(1))
    k = m // 2
    return total / prod(n + 2 * j for j in range(k))


_n = sympy.Symbol("n")


def sympy_rf(text):
    """Parse a rational-function string like ``1/(n*(n+2))`` with sympy."""
    return sympy.cancel(sympy.sympify(text.replace("^", "**"), locals={"n": _n}))


def sympy_equal(a_text, b_text):
    return sympy.simplify(sympy_rf(a_text) - sympy_rf(b_text)) == 0


def gram_schmidt_float(vectors):
    """Classical Gram-Schmidt in floats (numpy QR with sign fixed so e.a > 0)."""
    a = np.asarray(vectors, dtype=float)
    q, _ = np.linalg.qr(a.T)
    q = q.T
    for p in range(len(a)):
        if q[p] @ a[p] < 0:
            q[p] = -q[p]
    return q
