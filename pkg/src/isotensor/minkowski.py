"""The same machinery in d-dimensional Minkowski space.

The metric is fixed to ``diag(+, -, ..., -)``.  Deltas become ``g^{mu nu}``,
the dimension symbol becomes ``d``, and the transverse metric relative to a
non-lightlike external momentum ``a`` is ``g_perp = g - a a / (a.a)``.

There is no numeric Minkowski integrator (no compact invariant measure), so
checks here are symbolic plus the structural map to the Euclidean case.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import LightlikeError, RangeError
from .subspace_reduction import (
    ReductionResult,
    ReductionTerm,
    ScalarIntegrandDescriptor,
    longitudinal_tensor,
    reduce_isotropic,
)
from .tensor_core import (
    PERP,
    Space,
    SymTensorExpr,
    delta,
    iso_tensor,
)
from .vectors import MinkowskiVector


def as_minkowski(v) -> MinkowskiVector:
    if isinstance(v, MinkowskiVector):
        return v
    return MinkowskiVector(tuple(v))


def minkowski_dot(a, b) -> Fraction:
    """``a^0 b^0 - sum_i a^i b^i``, exact."""
    return as_minkowski(a).dot(as_minkowski(b))


def minkowski_space(symbol: str = "d") -> Space:
    return Space.minkowski(symbol)


def iso_tensor_minkowski(rank: int, indices=None, *, symbol: str = "d",
                         cap: int | None = None) -> SymTensorExpr:
    """``I(2k)`` with ``delta -> g`` and ``n -> d``; contraction uses ``g^mu_mu = d``."""
    return iso_tensor(rank, indices, space=Space.minkowski(symbol), cap=cap)


def transverse_space(vector_id: str = "a", symbol: str = "d", a_sq=None) -> Space:
    """Context in which ``gperp`` annihilates ``vector_id`` and traces to ``d - 1``.

    ``a_sq`` (if known) is installed as the value of ``vector_id . vector_id``.
    """
    dots = () if a_sq is None else ((vector_id, vector_id, Fraction(a_sq)),)
    return Space(metric="minkowski", symbol=symbol, perp_codim=1,
                 parallel=(vector_id,), dots=dots)


@dataclass(frozen=True)
class GPerp:
    """Transverse metric relative to the momentum ``a`` (``a.a != 0``)."""

    a: MinkowskiVector
    a_sq: Fraction
    vector_id: str = "a"
    symbol: str = "d"

    @property
    def d_value(self) -> int:
        return self.a.dim

    @property
    def matrix(self) -> tuple:
        """Contravariant components ``g_perp^{mu nu}`` as exact rationals."""
        d = self.d_value
        g = [1] + [-1] * (d - 1)
        return tuple(
            tuple((g[m] if m == n else 0) - self.a[m] * self.a[n] / self.a_sq for n in range(d))
            for m in range(d)
        )

    def lowered_matrix(self) -> tuple:
        """Mixed components ``g_perp^mu_nu`` (the projector acting on vectors)."""
        d = self.d_value
        g = [1] + [-1] * (d - 1)
        return tuple(tuple(self.matrix[m][n] * g[n] for n in range(d)) for m in range(d))

    def project(self, q) -> MinkowskiVector:
        """``q_perp^mu = q^mu - a^mu (a.q)/(a.a)``."""
        q = as_minkowski(q)
        w = self.a.dot(q) / self.a_sq
        return MinkowskiVector(tuple(x - w * y for x, y in zip(q, self.a)))

    def perp_dot(self, u, v) -> Fraction:
        """``u_mu g_perp^{mu nu} v_nu``."""
        u, v = as_minkowski(u), as_minkowski(v)
        return u.dot(v) - self.a.dot(u) * self.a.dot(v) / self.a_sq

    def trace(self) -> Fraction:
        """``g_perp^mu_mu``, equal to ``d - 1``."""
        lm = self.lowered_matrix()
        return sum((lm[m][m] for m in range(self.d_value)), Fraction(0))

    @property
    def space(self) -> Space:
        return transverse_space(self.vector_id, self.symbol, self.a_sq)

    def tensor(self, left="mu", right="nu", symbolic: bool = True) -> SymTensorExpr:
        space = transverse_space(self.vector_id, self.symbol) if symbolic else self.space
        return delta(left, right, space, PERP)


def g_perp(a, *, vector_id: str = "a", symbol: str = "d") -> GPerp:
    a = as_minkowski(a)
    a_sq = a.norm_sq()
    if a_sq == 0:
        raise LightlikeError(f"a = {tuple(str(x) for x in a)} is lightlike (a.a = 0)")
    return GPerp(a, a_sq, vector_id, symbol)


def reduce_minkowski_isotropic(k: int, scalar_id: str = "f", *,
                               symbol: str = "d") -> ReductionResult:
    """``int_q q^mu1..q^mu2k f = I(2k) int_q (q.q)^k f``; odd ``k`` vanishes."""
    return reduce_isotropic(k, scalar_id, space=Space.minkowski(symbol))


def reduce_minkowski_one_vector(k: int, scalar_id: str = "f", a=None, *,
                                vector_id: str = "a", symbol: str = "d") -> ReductionResult:
    """Reduction with one external momentum, in terms of raw ``a^mu``.

    Each term pairs ``sum_sigma a..a I_perp(k-r)`` (distinct placements,
    coefficient ``1/((d-1)(d+1)...)``) with the descriptor
    ``int_q (a.q)^r (q_perp.q_perp)^((k-r)/2) (a.a)^-r f``.  Passing a
    concrete ``a`` only validates it (lightlike momenta are rejected).
    """
    if k < 0:
        raise RangeError("rank must be non-negative")
    if a is not None:
        g_perp(a)
    space = transverse_space(vector_id, symbol)
    terms = []
    for r in range(k % 2, k + 1, 2):
        desc = ScalarIntegrandDescriptor(
            k - r, (1,) * r, scalar_id, norm_power=r, axis_ids=(vector_id,),
            metric="minkowski",
        )
        tensor = longitudinal_tensor(r, k, (1,) * r, (vector_id,), space)
        terms.append(ReductionTerm(tensor, desc))
    return ReductionResult(tuple(terms), k)


def to_euclidean(expr: SymTensorExpr, symbol: str = "n") -> SymTensorExpr:
    """Structural map ``g -> delta``, ``d -> n``; coefficients are unchanged."""
    space = replace(expr.space, metric="euclidean", symbol=symbol)
    return SymTensorExpr(expr.free_indices, dict(expr.terms), space)


def to_minkowski(expr: SymTensorExpr, symbol: str = "d") -> SymTensorExpr:
    space = replace(expr.space, metric="minkowski", symbol=symbol)
    return SymTensorExpr(expr.free_indices, dict(expr.terms), space)
