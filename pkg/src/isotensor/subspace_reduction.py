"""Longitudinal/transverse splitting and tensor-integral reduction.

A tensor integral ``int_q q^i1 ... q^ik h(q, a_1..a_m)`` is rewritten as a
sum of constant tensors times scalar integrals.  The constant tensors are
built from the orthonormal basis ``e_1..e_m`` of the span of the external
vectors and the isotropic tensor of the transverse space (dimension
``n - m``); the scalar integrals are only described symbolically, never
evaluated.

Exactness: Gram-Schmidt keeps each basis vector unnormalized together with
its squared norm, so projectors stay rational.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations
from math import factorial, isqrt, prod

import numpy as np

from .combinatorics import enumerate_splits, iter_pairings
from .errors import DegenerateSpanError, DimensionError, RangeError
from .exact_arith import c_nk
from .tensor_core import (
    EUCLIDEAN,
    PERP,
    DeltaFactor,
    Space,
    SymTensorExpr,
    UnitVectorFactor,
    iso_tensor,
    iso_tensor_or_zero,
)
from .vectors import ConcreteVector, as_vector, check_same_dim


# ---------------------------------------------------------------------------
# Gram-Schmidt
# ---------------------------------------------------------------------------

def _det(matrix) -> Fraction:
    m = [[Fraction(x) for x in row] for row in matrix]
    size = len(m)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, size):
            factor = m[r][col] / m[col][col]
            if factor:
                for c in range(col, size):
                    m[r][c] -= factor * m[col][c]
    return det


def _sqrt_fraction(x: Fraction):
    """Exact square root of a rational, or ``None`` if it is irrational."""
    if x < 0:
        return None
    rn, rd = isqrt(x.numerator), isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of the span of ``m`` vectors, kept exact.

    ``raw_vectors[p]`` is parallel to the unit vector ``e_(p+1)`` and
    ``norms_sq[p]`` is its squared length, so ``e = raw / sqrt(norm_sq)``.
    """

    n_value: int
    raw_vectors: tuple
    norms_sq: tuple
    gram_determinants: tuple  # D(0) .. D(m)

    @property
    def m(self) -> int:
        return len(self.raw_vectors)

    def dot_unit(self, p: int, q: int) -> Fraction:
        """Exact ``e_p . e_q`` (1-based); raises if the value is irrational."""
        u, v = self.raw_vectors[p - 1], self.raw_vectors[q - 1]
        num = u.dot(v)
        if num == 0:
            return Fraction(0)
        root = _sqrt_fraction(self.norms_sq[p - 1] * self.norms_sq[q - 1])
        if root is None:
            raise ValueError("scalar product is irrational")
        return num / root

    def is_orthonormal(self) -> bool:
        return all(
            self.dot_unit(p, q) == (1 if p == q else 0)
            for p in range(1, self.m + 1)
            for q in range(p, self.m + 1)
        )

    def exact_unit(self, p: int):
        """``e_p`` as a rational vector when its norm is rational, else ``None``."""
        root = _sqrt_fraction(self.norms_sq[p - 1])
        if root is None:
            return None
        return self.raw_vectors[p - 1].scaled(1 / root)

    def float_vectors(self) -> np.ndarray:
        return np.array([
            u.floats / np.sqrt(float(nsq)) for u, nsq in zip(self.raw_vectors, self.norms_sq)
        ])

    def unit_vector_map(self, ids=None) -> dict:
        """Vector id -> unit vector, exact where possible, for evaluation helpers."""
        ids = ids or default_vector_ids(self.m)
        out = {}
        floats = self.float_vectors()
        for p, vid in enumerate(ids, start=1):
            exact = self.exact_unit(p)
            out[vid] = tuple(exact) if exact is not None else tuple(floats[p - 1])
        return out

    def project(self, q):
        """Split ``q`` into exact longitudinal and transverse parts."""
        q = as_vector(q)
        par = [Fraction(0)] * self.n_value
        for u, nsq in zip(self.raw_vectors, self.norms_sq):
            w = u.dot(q) / nsq
            for i, x in enumerate(u):
                par[i] += w * x
        q_par = ConcreteVector(tuple(par))
        return q_par, q - q_par

    def perp_dot(self, u, v) -> Fraction:
        u, v = as_vector(u), as_vector(v)
        return self.project(u)[1].dot(v)


def gram_schmidt(vectors) -> SubspaceBasis:
    """Orthonormal basis via the Gram-determinant formula.

    ``e_p`` is proportional to the determinant whose first row holds
    ``a_1..a_p`` and whose remaining rows hold ``a_j . a_r`` (r < p); its
    squared length is ``D(p-1) D(p)``.  Each ``e_p`` is oriented so that
    ``e_p . a_p > 0``.
    """
    vectors = [as_vector(v) for v in vectors]
    if not vectors:
        raise RangeError("need at least one vector")
    n_value = check_same_dim(vectors)
    m = len(vectors)
    if m > n_value:
        raise DimensionError(f"{m} vectors cannot be independent in {n_value} dimensions")
    gram = [[a.dot(b) for b in vectors] for a in vectors]
    dets = [Fraction(1)]
    for p in range(1, m + 1):
        d = _det([row[:p] for row in gram[:p]])
        if d == 0:
            raise DegenerateSpanError(p)
        dets.append(d)

    raws, norms = [], []
    for p in range(1, m + 1):
        # rows 1..p-1 of the determinant: (a_j . a_r) for j = 1..p
        rows = [[gram[j][r] for j in range(p)] for r in range(p - 1)]
        comps = [Fraction(0)] * n_value
        for j in range(p):
            minor = [row[:j] + row[j + 1:] for row in rows]
            cof = (-1) ** j * _det(minor) if minor else Fraction(1)
            if cof:
                for i, x in enumerate(vectors[j]):
                    comps[i] += cof * x
        u = ConcreteVector(tuple(comps))
        if u.dot(vectors[p - 1]) < 0:
            u = u.scaled(-1)
        nsq = u.norm_sq()
        assert nsq == dets[p - 1] * dets[p]
        raws.append(u)
        norms.append(nsq)
    return SubspaceBasis(n_value, tuple(raws), tuple(norms), tuple(dets))


def projectors(basis: SubspaceBasis):
    """Exact ``(delta_parallel, delta_perp)`` as tuples of rational rows."""
    n = basis.n_value
    par = [[Fraction(0)] * n for _ in range(n)]
    for u, nsq in zip(basis.raw_vectors, basis.norms_sq):
        for i in range(n):
            if u[i]:
                for j in range(n):
                    par[i][j] += u[i] * u[j] / nsq
    perp = [[(1 if i == j else 0) - par[i][j] for j in range(n)] for i in range(n)]
    return tuple(map(tuple, par)), tuple(map(tuple, perp))


def split_sum(q_par, q_perp, index) -> Fraction:
    """One component of ``sum_r sum_splits q_par...q_perp...``.

    ``index`` is a tuple of Cartesian axes (0-based) ``(i_1..i_k)``; the sum
    runs over every choice of which positions carry the longitudinal part.
    The result equals ``q^i1 ... q^ik`` when ``q = q_par + q_perp``.
    """
    k = len(index)
    total = Fraction(0)
    for r in range(k + 1):
        for split in enumerate_splits(k, r) if k else []:
            term = Fraction(1)
            for pos in split.longitudinal_positions:
                term *= q_par[index[pos - 1]]
            for pos in split.transverse_positions:
                term *= q_perp[index[pos - 1]]
            total += term
    return total if k else Fraction(1)


def split_sum_permutations(q_par, q_perp, index) -> Fraction:
    """Same as :func:`split_sum` but literally over all ``k!`` permutations.

    Each ``r`` contributes ``1/(r!(k-r)!)`` times the permutation sum.  Only
    practical for small ``k``; kept as an independent cross-check.
    """
    k = len(index)
    total = Fraction(0)
    for r in range(k + 1):
        acc = Fraction(0)
        for sigma in permutations(range(k)):
            term = Fraction(1)
            for pos in sigma[:r]:
                term *= q_par[index[pos]]
            for pos in sigma[r:]:
                term *= q_perp[index[pos]]
            acc += term
        total += acc / (factorial(r) * factorial(k - r))
    return total


# ---------------------------------------------------------------------------
# constant tensors
# ---------------------------------------------------------------------------

def default_vector_ids(m: int) -> tuple:
    return ("a",) if m == 1 else tuple(f"e{p}" for p in range(1, m + 1))


def iso_tensor_perp(rank: int, m_parallel: int, indices=None, *, vector_ids=None,
                    space: Space | None = None) -> SymTensorExpr:
    """Isotropic tensor of the transverse space: deltas -> delta_perp, n -> n - m."""
    if space is None:
        space = Space.orthonormal(vector_ids or default_vector_ids(m_parallel))
    return iso_tensor(rank, indices, space=space, perp=True)


def _distinct_orderings(axes):
    return sorted(set(permutations(axes)))


def longitudinal_tensor(r: int, k: int, axes, ids, space: Space, indices=None) -> SymTensorExpr:
    """Sum over distinct placements of the vectors ``ids[axes]`` on ``r`` of
    the ``k`` indices, times the transverse isotropic tensor on the rest.

    Equals ``1/(r!(k-r)!) sum_sigma e_p1^sigma(i1)...e_pr^sigma(ir) I_perp(...)``
    summed over all orderings of ``axes``; zero when ``k - r`` is odd.
    """
    if not 0 <= r <= k:
        raise RangeError(f"need 0 <= r <= k, got r={r}, k={k}")
    if len(axes) != r:
        raise RangeError(f"need {r} axes, got {len(axes)}")
    labels = indices or space.default_labels(k)
    if len(labels) != k:
        raise RangeError(f"need {k} indices")
    labels = [str(l) for l in labels]
    if (k - r) % 2:
        return SymTensorExpr.zero(labels, space)
    coef = c_nk((k - r) // 2, -space.perp_codim)
    orderings = _distinct_orderings(tuple(axes))
    raw = []
    for chosen in combinations(range(k), r):
        chosen_set = set(chosen)
        rest = tuple(labels[i] for i in range(k) if i not in chosen_set)
        for order in orderings:
            vecs = [UnitVectorFactor(ids[p - 1], labels[s]) for s, p in zip(chosen, order)]
            for pairing in iter_pairings(k - r, items=rest):
                raw.append((coef, vecs + [DeltaFactor(x, y, PERP) for x, y in pairing]))
    return SymTensorExpr.build(labels, raw, space)


def e_tensor(r: int, k: int, m_parallel: int = 1, axes=None, *, vector_ids=None,
             indices=None, symbol: str = "n") -> SymTensorExpr:
    """Constant tensor with ``r`` longitudinal and ``k - r`` transverse indices.

    For one external vector (``m_parallel=1``) the longitudinal factors are
    the unit vector ``a``.  For ``m_parallel > 1`` pass the multiset of basis
    axes (1-based) as ``axes``.
    """
    if not 0 <= r <= k:
        raise RangeError(f"need 0 <= r <= k, got r={r}, k={k}")
    if m_parallel < 1:
        raise RangeError("m_parallel must be >= 1")
    ids = tuple(vector_ids or default_vector_ids(m_parallel))
    if len(ids) != m_parallel:
        raise RangeError("need one vector id per basis axis")
    if axes is None:
        if m_parallel != 1 and r:
            raise RangeError("axes are required when m_parallel > 1")
        axes = (1,) * r
    axes = tuple(sorted(axes))
    if any(not 1 <= p <= m_parallel for p in axes):
        raise RangeError(f"axes must lie in 1..{m_parallel}")
    return longitudinal_tensor(r, k, axes, ids, Space.orthonormal(ids, symbol=symbol), indices)


# ---------------------------------------------------------------------------
# reduction results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarIntegrandDescriptor:
    """Symbolic scalar integral ``int_q |q_perp|^p (q.e_p1)...(q.e_pr) base``.

    ``multiplicity`` counts the raw axis tuples merged into this sorted
    multiset.  It is bookkeeping only: the paired tensor already sums every
    distinct placement, so it is not an extra factor.  In Minkowski space the transverse factor is
    ``(q_perp.q_perp)^(p/2)`` and ``norm_power`` divides by ``(a.a)^r``.
    """

    transverse_power: int
    longitudinal_weights: tuple = ()
    base_scalar_id: str = "f"
    multiplicity: int = 1
    norm_power: int = 0
    axis_ids: tuple = ()
    metric: str = "euclidean"
    isotropic: bool = False

    def __post_init__(self):
        if self.transverse_power % 2:
            raise RangeError("transverse power must be even")

    def to_json(self) -> dict:
        out = {
            "perp_power": self.transverse_power,
            "axes": list(self.longitudinal_weights),
            "base": self.base_scalar_id,
        }
        if self.multiplicity != 1:
            out["multiplicity"] = self.multiplicity
        if self.norm_power:
            out["norm_power"] = self.norm_power
        if self.axis_ids:
            out["axis_ids"] = list(self.axis_ids)
        if self.metric != "euclidean":
            out["metric"] = self.metric
        if self.isotropic:
            out["isotropic"] = True
        return out

    @classmethod
    def from_json(cls, data) -> ScalarIntegrandDescriptor:
        return cls(
            transverse_power=data["perp_power"],
            longitudinal_weights=tuple(data.get("axes", ())),
            base_scalar_id=data.get("base", "f"),
            multiplicity=data.get("multiplicity", 1),
            norm_power=data.get("norm_power", 0),
            axis_ids=tuple(data.get("axis_ids", ())),
            metric=data.get("metric", "euclidean"),
            isotropic=data.get("isotropic", False),
        )

    def render(self, fmt: str = "text") -> str:
        latex = fmt == "latex"
        parts = []
        p = self.transverse_power
        if p:
            if self.metric == "minkowski":
                name = "q\\cdot q" if self.isotropic else "q_\\perp\\cdot q_\\perp"
                base = f"({name})" if latex else ("(q.q)" if self.isotropic else "(q_perp.q_perp)")
                parts.append(base if p == 2 else (f"{base}^{{{p // 2}}}" if latex else f"{base}^{p // 2}"))
            else:
                name = ("|\\bm{q}|" if self.isotropic else "|\\bm{q}_\\perp|") if latex else (
                    "|q|" if self.isotropic else "|q_perp|")
                parts.append(f"{name}^{{{p}}}" if latex else f"{name}^{p}")
        counts: dict = {}
        for axis in self.longitudinal_weights:
            counts[axis] = counts.get(axis, 0) + 1
        for axis, c in sorted(counts.items()):
            vid = self.axis_ids[axis - 1] if self.axis_ids else f"e{axis}"
            if latex:
                vec = vid if self.metric == "minkowski" else f"\\hat{{{vid}}}"
                if vid.startswith("e") and vid[1:].isdigit():
                    vec = f"\\hat{{e}}_{{{vid[1:]}}}"
                body = f"(q\\cdot {vec})"
                parts.append(body if c == 1 else f"{body}^{{{c}}}")
            else:
                body = f"(q.{vid})"
                parts.append(body if c == 1 else f"{body}^{c}")
        if self.norm_power:
            vid = self.axis_ids[0] if self.axis_ids else "a"
            if latex:
                parts.append(f"({vid}\\cdot {vid})^{{-{self.norm_power}}}")
            else:
                parts.append(f"({vid}.{vid})^-{self.norm_power}")
        parts.append(self.base_scalar_id)
        if latex:
            return "\\int_q " + "\\,".join(parts)
        return "int_q " + " * ".join(parts)


@dataclass(frozen=True)
class ReductionTerm:
    tensor: SymTensorExpr
    integrand: ScalarIntegrandDescriptor

    @property
    def r(self) -> int:
        return len(self.integrand.longitudinal_weights)


@dataclass(frozen=True)
class ReductionResult:
    terms: tuple = field(default_factory=tuple)
    rank: int = 0

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def is_empty(self) -> bool:
        return not self.terms

    def to_json(self) -> dict:
        return {
            "terms": [
                {"tensor": t.tensor.to_json(), "integrand": t.integrand.to_json()}
                for t in self.terms
            ]
        }

    @classmethod
    def from_json(cls, data) -> ReductionResult:
        from .tensor_core import expr_from_json

        terms = tuple(
            ReductionTerm(expr_from_json(t["tensor"]), ScalarIntegrandDescriptor.from_json(t["integrand"]))
            for t in data["terms"]
        )
        rank = terms[0].tensor.rank if terms else data.get("rank", 0)
        return cls(terms, rank)

    def render(self, fmt: str = "text") -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2)
        if not self.terms:
            return "0"
        if fmt == "latex":
            return "\n+ ".join(
                f"\\left({t.tensor.render('latex')}\\right)\\times {t.integrand.render('latex')}"
                for t in self.terms
            )
        lines = []
        for t in self.terms:
            lines.append(f"[{t.tensor.render('text')}]  x  {t.integrand.render('text')}")
        return "\n".join(lines)


def reduce_isotropic(k: int, scalar_id: str = "f", *, space: Space = EUCLIDEAN) -> ReductionResult:
    """``int_q q^i1..q^ik f(q) = I(k) int_q |q|^k f(q)``; empty for odd ``k``."""
    if k < 0:
        raise RangeError("rank must be non-negative")
    if k % 2:
        return ReductionResult((), k)
    desc = ScalarIntegrandDescriptor(k, (), scalar_id, metric=space.metric, isotropic=True)
    return ReductionResult((ReductionTerm(iso_tensor_or_zero(k, space=space), desc),), k)


def reduce_one_vector(k: int, scalar_id: str = "g", *, symbol: str = "n") -> ReductionResult:
    """Reduction with one external vector ``a``; terms ordered by ``r`` ascending."""
    if k < 0:
        raise RangeError("rank must be non-negative")
    terms = []
    for r in range(k % 2, k + 1, 2):
        desc = ScalarIntegrandDescriptor(k - r, (1,) * r, scalar_id, axis_ids=("a",))
        terms.append(ReductionTerm(e_tensor(r, k, symbol=symbol), desc))
    return ReductionResult(tuple(terms), k)


def reduce_multi_vector(k: int, m_parallel: int, scalar_id: str = "h", *,
                        vector_ids=None, symbol: str = "n") -> ReductionResult:
    """Reduction with ``m`` external vectors spanning an ``m``-dim subspace.

    Axis tuples ``(p_1..p_r)`` are merged into sorted multisets because the
    scalar ``h_{p_1..p_r}`` is symmetric; the tensor for a multiset sums all
    distinct placements and ``multiplicity`` records how many tuples merged.
    """
    if k < 0:
        raise RangeError("rank must be non-negative")
    if m_parallel < 1:
        raise RangeError("m_parallel must be >= 1")
    ids = tuple(vector_ids or default_vector_ids(m_parallel))
    terms = []
    for r in range(k % 2, k + 1, 2):
        for axes in combinations_with_replacement(range(1, m_parallel + 1), r):
            counts = [axes.count(p) for p in set(axes)]
            multiplicity = factorial(r) // prod(factorial(c) for c in counts)
            desc = ScalarIntegrandDescriptor(k - r, axes, scalar_id, multiplicity, axis_ids=ids)
            terms.append(ReductionTerm(e_tensor(r, k, m_parallel, axes, vector_ids=ids, symbol=symbol), desc))
    return ReductionResult(tuple(terms), k)


def evaluate_reduction(result: ReductionResult, n_value: int, scalar_values, *,
                       unit_vectors=None, perp=None) -> np.ndarray:
    """Numeric components of a reduced tensor integral.

    ``scalar_values`` maps each term's ``longitudinal_weights`` tuple to the
    number the user's integrator returned for that descriptor.
    """
    from .tensor_core import components

    total = np.zeros((n_value,) * result.rank)
    for term in result.terms:
        value = scalar_values[tuple(term.integrand.longitudinal_weights)]
        total = total + value * components(
            term.tensor, n_value, unit_vectors=unit_vectors, perp=perp
        )
    return total
