"""Totally symmetric isotropic tensors as sums of Kronecker-delta products.

An expression (:class:`SymTensorExpr`) is a linear combination of terms, each
term a product of factors:

* :class:`DeltaFactor` -- a Kronecker delta (or metric) on two index labels,
  tagged ``"full"`` or ``"perp"`` (the transverse projector),
* :class:`UnitVectorFactor` -- a component of a named vector,
* :class:`DotFactor` -- a scalar product of two named vectors whose value
  the expression's :class:`Space` does not know.

Coefficients are :class:`~isotensor.exact_arith.RationalFunction` values in
the dimension symbol.  Every expression is kept canonical: repeated labels
are contracted away, factors are sorted, like terms are merged and zero
terms dropped, so two expressions are equal iff they are structurally equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .combinatorics import check_rank, double_factorial, iter_pairings
from .errors import (
    ContractionError,
    DimensionError,
    OddRankError,
    SpaceMismatchError,
)
from .exact_arith import (
    N,
    ONE,
    ZERO,
    RationalFunction,
    c_nk,
    n_plus,
    parse_rational_function,
    rising_product,
)

FULL = "full"
PERP = "perp"


@lru_cache(maxsize=None)
def natural_key(label: str) -> tuple:
    """Sort key that orders ``i2`` before ``i10``."""
    parts = re.split(r"(\d+)", label)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(parts))


# ---------------------------------------------------------------------------
# index names and factors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexName:
    label: str
    space_tag: str = "full"  # full | parallel | transverse

    def __str__(self):
        return self.label


def _as_index(x) -> IndexName:
    return x if isinstance(x, IndexName) else IndexName(str(x))


def _label(x) -> str:
    return x.label if isinstance(x, IndexName) else str(x)


class _Factor:
    __slots__ = ("sort_key", "_hash")

    def __eq__(self, other):
        return type(other) is type(self) and other.sort_key == self.sort_key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key < other.sort_key


class DeltaFactor(_Factor):
    __slots__ = ("left", "right", "tag")

    def __init__(self, left: str, right: str, tag: str = FULL):
        if natural_key(right) < natural_key(left):
            left, right = right, left
        self.left = left
        self.right = right
        self.tag = tag
        self.sort_key = (1, natural_key(left), natural_key(right), tag)
        self._hash = hash(self.sort_key)

    @property
    def labels(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"DeltaFactor({self.left!r}, {self.right!r}, {self.tag!r})"


class UnitVectorFactor(_Factor):
    __slots__ = ("vector_id", "index")

    def __init__(self, vector_id: str, index: str):
        self.vector_id = vector_id
        self.index = index
        self.sort_key = (0, natural_key(vector_id), natural_key(index))
        self._hash = hash(self.sort_key)

    @property
    def labels(self):
        return (self.index,)

    def __repr__(self):
        return f"UnitVectorFactor({self.vector_id!r}, {self.index!r})"


class DotFactor(_Factor):
    __slots__ = ("left", "right")

    def __init__(self, left: str, right: str):
        if natural_key(right) < natural_key(left):
            left, right = right, left
        self.left = left
        self.right = right
        self.sort_key = (2, natural_key(left), natural_key(right))
        self._hash = hash(self.sort_key)

    labels = ()

    def __repr__(self):
        return f"DotFactor({self.left!r}, {self.right!r})"


# ---------------------------------------------------------------------------
# the space an expression lives in
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Space:
    """Context for contraction.

    ``perp_codim`` is the dimension ``m`` of the longitudinal subspace, so a
    transverse trace is ``symbol - m``.  ``parallel`` names the vectors that
    span that subspace (transverse deltas annihilate them); ``dots`` lists
    known scalar products ``(id1, id2, value)``.  If ``dim_value`` is set all
    coefficients are evaluated at that dimension.
    """

    metric: str = "euclidean"
    symbol: str = "n"
    perp_codim: int = 0
    parallel: tuple = ()
    dots: tuple = ()
    dim_value: Fraction | None = None
    _dot_map: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        dot_map = {}
        for a, b, value in self.dots:
            dot_map[(a, b)] = dot_map[(b, a)] = Fraction(value)
        object.__setattr__(self, "_dot_map", dot_map)
        if self.dim_value is not None:
            object.__setattr__(self, "dim_value", Fraction(self.dim_value))

    @classmethod
    def euclidean(cls, **kw):
        return cls(**kw)

    @classmethod
    def minkowski(cls, symbol="d", **kw):
        return cls(metric="minkowski", symbol=symbol, **kw)

    @classmethod
    def orthonormal(cls, ids, metric="euclidean", symbol=None):
        """Transverse space orthogonal to the orthonormal unit vectors ``ids``."""
        ids = tuple(ids)
        dots = tuple(
            (a, b, 1 if a == b else 0) for i, a in enumerate(ids) for b in ids[i:]
        )
        symbol = symbol or ("d" if metric == "minkowski" else "n")
        return cls(metric=metric, symbol=symbol, perp_codim=len(ids), parallel=ids, dots=dots)

    def dot_value(self, a, b):
        return self._dot_map.get((a, b))

    def with_dim(self, value):
        return replace(self, dim_value=None if value is None else Fraction(value))

    @property
    def delta_name(self):
        return "g" if self.metric == "minkowski" else "d"

    def default_labels(self, count, prefix=None):
        prefix = prefix or ("mu" if self.metric == "minkowski" else "i")
        return [f"{prefix}{j}" for j in range(1, count + 1)]

    def merge(self, other: Space) -> Space:
        if self == other:
            return self
        if (self.metric, self.symbol) != (other.metric, other.symbol):
            raise SpaceMismatchError(
                f"cannot combine {self.metric}/{self.symbol} with {other.metric}/{other.symbol}"
            )
        if self.perp_codim and other.perp_codim and self.perp_codim != other.perp_codim:
            raise SpaceMismatchError("expressions use different transverse subspaces")
        if self.dim_value != other.dim_value and None not in (self.dim_value, other.dim_value):
            raise SpaceMismatchError("expressions are evaluated at different dimensions")
        parallel = tuple(dict.fromkeys(self.parallel + other.parallel))
        dots = {}
        for a, b, v in self.dots + other.dots:
            key = tuple(sorted((a, b), key=natural_key))
            if key in dots and dots[key] != Fraction(v):
                raise SpaceMismatchError(f"conflicting values for {a}.{b}")
            dots[key] = Fraction(v)
        return Space(
            metric=self.metric,
            symbol=self.symbol,
            perp_codim=self.perp_codim or other.perp_codim,
            parallel=parallel,
            dots=tuple((a, b, v) for (a, b), v in sorted(dots.items())),
            dim_value=self.dim_value if self.dim_value is not None else other.dim_value,
        )


EUCLIDEAN = Space()
MINKOWSKI = Space.minkowski()


@lru_cache(maxsize=None)
def _trace_power(full_power: int, perp_power: int, codim: int) -> RationalFunction:
    return N ** full_power * n_plus(-codim) ** perp_power


# ---------------------------------------------------------------------------
# contraction of a single term
# ---------------------------------------------------------------------------

def _reduce_term(factors, free, space):
    """Contract all repeated labels in one product of factors.

    Returns ``None`` for a vanishing term, else
    ``(scalar, n_power, perp_trace_power, sorted_factor_tuple)``.

    Each label occurs at most twice, so the factors connected through
    repeated labels form chains (paths or cycles).  A cycle of deltas is a
    trace; a path collapses to one delta, one vector component or one scalar
    product depending on what sits at its two ends.  Any transverse delta on
    a chain makes the whole chain transverse.
    """
    scalar = Fraction(1)
    occ: dict = {}
    plain = []
    for idx, f in enumerate(factors):
        if type(f) is DotFactor:
            value = space.dot_value(f.left, f.right)
            if value is not None:
                if value == 0:
                    return None
                scalar *= value
            else:
                plain.append(f)
            continue
        for lab in f.labels:
            occ.setdefault(lab, []).append(idx)

    dummy = False
    for lab, where in occ.items():
        count = len(where)
        if count == 2:
            if lab in free:
                raise ContractionError(f"free index {lab!r} appears twice in one term")
            dummy = True
        elif count == 1:
            if lab not in free:
                raise ContractionError(f"index {lab!r} is neither free nor contracted")
        else:
            raise ContractionError(f"index {lab!r} appears {count} times in one term")

    if not dummy:
        plain.extend(f for f in factors if type(f) is not DotFactor)
        plain.sort()
        return scalar, 0, 0, tuple(plain)

    full_power = perp_power = 0
    seen = [False] * len(factors)
    for start, f0 in enumerate(factors):
        if seen[start] or type(f0) is DotFactor:
            continue
        seen[start] = True
        stack = [start]
        comp = []
        while stack:
            i = stack.pop()
            comp.append(i)
            for lab in factors[i].labels:
                for j in occ[lab]:
                    if not seen[j]:
                        seen[j] = True
                        stack.append(j)
        if len(comp) == 1 and not any(len(occ[lab]) == 2 for lab in f0.labels):
            plain.append(f0)
            continue

        perp = False
        ends = []
        for i in comp:
            f = factors[i]
            if type(f) is DeltaFactor:
                if f.tag == PERP:
                    perp = True
                if f.left in free:
                    ends.append((0, f.left))
                if f.right in free:
                    ends.append((0, f.right))
            else:
                ends.append((1, f.vector_id))
                if f.index in free:
                    ends.append((0, f.index))

        if not ends:
            if perp:
                perp_power += 1
            else:
                full_power += 1
            continue
        if len(ends) != 2:
            raise ContractionError("malformed index chain")
        (k1, x1), (k2, x2) = sorted(ends)
        if k1 == 0 and k2 == 0:
            plain.append(DeltaFactor(x1, x2, PERP if perp else FULL))
        elif k1 == 0:
            if perp:
                if x2 in space.parallel:
                    return None
                raise ContractionError(
                    f"transverse projector meets vector {x2!r} outside the parallel subspace"
                )
            plain.append(UnitVectorFactor(x2, x1))
        else:
            if perp:
                if x1 in space.parallel or x2 in space.parallel:
                    return None
                raise ContractionError(f"transverse projector between {x1!r} and {x2!r}")
            value = space.dot_value(x1, x2)
            if value is None:
                plain.append(DotFactor(x1, x2))
            elif value == 0:
                return None
            else:
                scalar *= value
    plain.sort()
    return scalar, full_power, perp_power, tuple(plain)


def _term_key(factors):
    return tuple(f.sort_key for f in factors)


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

class SymTensorExpr:
    """Canonical linear combination of factor products.

    ``terms`` maps a sorted factor tuple to its nonzero coefficient and is
    ordered canonically.  Instances are treated as immutable.
    """

    __slots__ = ("free_indices", "terms", "space")

    def __init__(self, free_indices, terms, space=EUCLIDEAN):
        self.free_indices = tuple(_as_index(i) for i in free_indices)
        self.terms = terms
        self.space = space

    # construction -------------------------------------------------------

    @classmethod
    def build(cls, free_indices, raw_terms, space=EUCLIDEAN) -> SymTensorExpr:
        """Canonicalize ``(coefficient, factors)`` pairs into an expression."""
        free_indices = tuple(_as_index(i) for i in free_indices)
        free = frozenset(i.label for i in free_indices)
        if len(free) != len(free_indices):
            raise ContractionError("duplicate free index labels")
        acc: dict = {}
        for coef, factors in raw_terms:
            if not isinstance(coef, RationalFunction):
                coef = RationalFunction.constant(coef)
            if coef.is_zero():
                continue
            reduced = _reduce_term(factors, free, space)
            if reduced is None:
                continue
            scalar, a, b, key = reduced
            bucket = acc.get(key)
            if bucket is None:
                bucket = acc[key] = {}
            ck = (coef, a, b)
            bucket[ck] = bucket.get(ck, 0) + scalar
        terms = {}
        for key in sorted(acc, key=_term_key):
            total = ZERO
            for (coef, a, b), s in acc[key].items():
                if s:
                    part = coef.scale(s)
                    if a or b:
                        part = part * _trace_power(a, b, space.perp_codim)
                    total = total + part
            if space.dim_value is not None and not total.is_constant():
                total = RationalFunction.constant(total.evaluate_at(space.dim_value))
            if not total.is_zero():
                terms[key] = total
        return cls(free_indices, terms, space)

    @classmethod
    def zero(cls, free_indices=(), space=EUCLIDEAN):
        return cls(free_indices, {}, space)

    @classmethod
    def scalar(cls, value, space=EUCLIDEAN):
        return cls.build((), [(RationalFunction.coerce(value), [])], space)

    # basic properties ---------------------------------------------------

    @property
    def labels(self) -> tuple:
        return tuple(i.label for i in self.free_indices)

    @property
    def rank(self) -> int:
        return len(self.free_indices)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return self.terms.items()

    def coefficients(self) -> set:
        return set(self.terms.values())

    def scalar_value(self) -> RationalFunction:
        """The value of an expression with no free indices."""
        if self.free_indices:
            raise ContractionError("expression still has free indices")
        if any(self.terms.keys() - {()}):
            raise ContractionError("scalar expression contains unresolved scalar products")
        return self.terms.get((), ZERO)

    def __eq__(self, other):
        if not isinstance(other, SymTensorExpr):
            return NotImplemented
        return (
            set(self.labels) == set(other.labels)
            and self.space.metric == other.space.metric
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((frozenset(self.labels), frozenset(self.terms.items())))

    def __repr__(self):
        return f"SymTensorExpr({render_text(self)!r})"

    def __str__(self):
        return render_text(self)

    # algebra ------------------------------------------------------------

    def _raw(self):
        return ((c, list(k)) for k, c in self.terms.items())

    def __add__(self, other):
        if not isinstance(other, SymTensorExpr):
            return NotImplemented
        if set(self.labels) != set(other.labels):
            raise ContractionError("cannot add expressions with different free indices")
        space = self.space.merge(other.space)
        return SymTensorExpr.build(
            self.free_indices, list(self._raw()) + list(other._raw()), space
        )

    def __neg__(self):
        return SymTensorExpr(
            self.free_indices, {k: -c for k, c in self.terms.items()}, self.space
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coef) -> SymTensorExpr:
        coef = RationalFunction.coerce(coef)
        if coef.is_zero():
            return SymTensorExpr.zero(self.free_indices, self.space)
        terms = {k: c * coef for k, c in self.terms.items()}
        if self.space.dim_value is not None:
            terms = {
                k: RationalFunction.constant(c.evaluate_at(self.space.dim_value))
                for k, c in terms.items()
            }
        return SymTensorExpr(self.free_indices, {k: c for k, c in terms.items() if not c.is_zero()}, self.space)

    def __mul__(self, other):
        if isinstance(other, SymTensorExpr):
            return multiply(self, other)
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def relabel(self, mapping: Mapping) -> SymTensorExpr:
        """Rename free indices; ``mapping`` sends old labels to new ones."""
        mapping = {_label(k): _label(v) for k, v in mapping.items()}
        new_free = [
            IndexName(mapping.get(i.label, i.label), i.space_tag) for i in self.free_indices
        ]

        def rename(f):
            if type(f) is DeltaFactor:
                return DeltaFactor(mapping.get(f.left, f.left), mapping.get(f.right, f.right), f.tag)
            if type(f) is UnitVectorFactor:
                return UnitVectorFactor(f.vector_id, mapping.get(f.index, f.index))
            return f

        raw = ((c, [rename(f) for f in k]) for k, c in self.terms.items())
        return SymTensorExpr.build(new_free, raw, self.space)

    def transpose(self, a, b) -> SymTensorExpr:
        """Swap two free indices."""
        a, b = _label(a), _label(b)
        out = self.relabel({a: b, b: a})
        return SymTensorExpr(self.free_indices, out.terms, out.space)

    def contract(self, index_pairs) -> SymTensorExpr:
        return contract(self, index_pairs)

    def at_dim(self, value) -> SymTensorExpr:
        space = self.space.with_dim(value)
        return SymTensorExpr.build(self.free_indices, self._raw(), space)

    def with_space(self, space: Space) -> SymTensorExpr:
        return SymTensorExpr.build(self.free_indices, self._raw(), space)

    def to_json(self) -> dict:
        return expr_to_json(self)

    def render(self, fmt: str = "text") -> str:
        return render_expr(self, fmt)


def multiply(a: SymTensorExpr, b: SymTensorExpr) -> SymTensorExpr:
    """Tensor product; labels present in both factors are summed over."""
    space = a.space.merge(b.space)
    shared = set(a.labels) & set(b.labels)
    for ia in a.free_indices:
        if ia.label in shared:
            ib = next(i for i in b.free_indices if i.label == ia.label)
            _check_space_tags(ia, ib)
    free = [i for i in a.free_indices if i.label not in shared]
    free += [i for i in b.free_indices if i.label not in shared]
    raw = (
        (ca * cb, list(ka) + list(kb))
        for ka, ca in a.terms.items()
        for kb, cb in b.terms.items()
    )
    return SymTensorExpr.build(free, raw, space)


def _check_space_tags(x: IndexName, y: IndexName):
    if x.space_tag != y.space_tag:
        raise SpaceMismatchError(
            f"cannot contract {x.label} ({x.space_tag}) with {y.label} ({y.space_tag})"
        )


def contract(expr: SymTensorExpr, index_pairs) -> SymTensorExpr:
    """Sum over each pair of free indices ``(a, b)`` (i.e. multiply by delta^{ab})."""
    by_label = {i.label: i for i in expr.free_indices}
    used = set()
    extra = []
    for a, b in index_pairs:
        a, b = _label(a), _label(b)
        for lab in (a, b):
            if lab not in by_label:
                raise ContractionError(f"{lab!r} is not a free index")
            if lab in used:
                raise ContractionError(f"{lab!r} contracted twice")
            used.add(lab)
        if a == b:
            raise ContractionError("cannot contract an index with itself")
        _check_space_tags(by_label[a], by_label[b])
        extra.append(DeltaFactor(a, b, FULL))
    free = [i for i in expr.free_indices if i.label not in used]
    raw = ((c, list(k) + extra) for k, c in expr.terms.items())
    return SymTensorExpr.build(free, raw, expr.space)


def contract_with_vector(expr: SymTensorExpr, index, vector_id: str) -> SymTensorExpr:
    """Contract one free index with a named vector of the expression's space."""
    lab = _label(index)
    if lab not in expr.labels:
        raise ContractionError(f"{lab!r} is not a free index")
    free = [i for i in expr.free_indices if i.label != lab]
    raw = ((c, list(k) + [UnitVectorFactor(vector_id, lab)]) for k, c in expr.terms.items())
    return SymTensorExpr.build(free, raw, expr.space)


def delta(a, b, space=EUCLIDEAN, tag=FULL) -> SymTensorExpr:
    return SymTensorExpr.build([a, b], [(ONE, [DeltaFactor(_label(a), _label(b), tag)])], space)


# ---------------------------------------------------------------------------
# isotropic tensors
# ---------------------------------------------------------------------------

def _resolve_labels(rank, indices, space):
    if indices is None:
        return [IndexName(l) for l in space.default_labels(rank)]
    indices = [_as_index(i) for i in indices]
    if len(indices) != rank:
        raise ContractionError(f"rank {rank} needs {rank} indices, got {len(indices)}")
    return indices


def iso_tensor(rank: int, indices=None, *, space: Space = EUCLIDEAN, perp: bool = False,
               cap: int | None = None) -> SymTensorExpr:
    """Closed form: ``c_nk`` times the sum of all distinct delta products.

    With ``perp=True`` every delta is transverse and the dimension is
    ``symbol - space.perp_codim``.
    """
    check_rank(rank, cap)
    idx = _resolve_labels(rank, indices, space)
    labels = [i.label for i in idx]
    shift = -space.perp_codim if perp else 0
    coef = c_nk(rank // 2, shift)
    tag = PERP if perp else FULL
    raw = (
        (coef, [DeltaFactor(labels[p - 1], labels[q - 1], tag) for p, q in pairing])
        for pairing in iter_pairings(rank, cap)
    )
    return SymTensorExpr.build(idx, raw, space)


def iso_tensor_or_zero(rank: int, indices=None, **kw) -> SymTensorExpr:
    """Like :func:`iso_tensor` but odd ranks give the zero expression."""
    if rank % 2:
        space = kw.get("space", EUCLIDEAN)
        return SymTensorExpr.zero(_resolve_labels(rank, indices, space), space)
    return iso_tensor(rank, indices, **kw)


def iso_tensor_recurrence(rank: int, indices=None, *, space: Space = EUCLIDEAN,
                          perp: bool = False, cap: int | None = None) -> SymTensorExpr:
    """Build the tensor by peeling off ``delta^{i1 ij}`` one level at a time.

    ``I(2k) = 1/(n+2k-2) * sum_j delta^{i1 ij} I(2k-2)(remaining indices)``
    starting from ``I(0) = 1``.
    """
    check_rank(rank, cap)
    idx = _resolve_labels(rank, indices, space)
    shift = -space.perp_codim if perp else 0
    tag = PERP if perp else FULL

    def build(sub):
        if not sub:
            return SymTensorExpr.scalar(ONE, space)
        head, rest = sub[0], sub[1:]
        lam = n_plus(shift + len(sub) - 2).inverse()
        raw = []
        for j, partner in enumerate(rest):
            lower = build(rest[:j] + rest[j + 1:])
            d = DeltaFactor(head.label, partner.label, tag)
            raw.extend((c * lam, [d, *k]) for k, c in lower.terms.items())
        return SymTensorExpr.build(sub, raw, space)

    return build(tuple(idx))


def self_contraction(rank: int, *, space: Space = EUCLIDEAN) -> RationalFunction:
    """``I^{i1..i2k} I^{i1..i2k}`` computed by full symbolic contraction."""
    t = iso_tensor(rank, space=space)
    return multiply(t, t).scalar_value()


def normalization(expr: SymTensorExpr) -> RationalFunction:
    """Contract free indices pairwise in order: (1,2), (3,4), ..."""
    labels = expr.labels
    pairs = [(labels[j], labels[j + 1]) for j in range(0, len(labels), 2)]
    return contract(expr, pairs).scalar_value()


def project_symmetric(target_rank: int, left=None, right=None, *,
                      space: Space = EUCLIDEAN) -> SymTensorExpr:
    """Projector onto the totally symmetric isotropic part of rank ``2k`` tensors.

    ``Pi^{i..;j..} = n(n+2)...(n+2k-2)/(2k-1)!! * I^{i..} I^{j..}``
    """
    if target_rank % 2:
        raise OddRankError(f"rank {target_rank} is odd")
    left = left or space.default_labels(target_rank, "i" if space.metric != "minkowski" else "mu")
    right = right or space.default_labels(target_rank, "j" if space.metric != "minkowski" else "nu")
    k = target_rank // 2
    weight = rising_product(k).scale(Fraction(1, double_factorial(2 * k - 1)))
    return multiply(iso_tensor(target_rank, left, space=space),
                    iso_tensor(target_rank, right, space=space)).scale(weight)


def symmetric_part(expr: SymTensorExpr) -> SymTensorExpr:
    """Apply the projector to ``expr``; the result keeps ``expr``'s labels."""
    labels = list(expr.labels)
    fresh = [f"_p{j}" for j in range(1, len(labels) + 1)]
    pi = project_symmetric(len(labels), fresh, labels, space=expr.space)
    return multiply(pi, expr).relabel(dict(zip(fresh, labels)))


def identify_average_tensor(rank: int, indices=None, **kw) -> SymTensorExpr:
    """The tensor equal to the sphere average of ``r^i1 ... r^ik``."""
    return iso_tensor_or_zero(rank, indices, **kw)


# ---------------------------------------------------------------------------
# numeric evaluation
# ---------------------------------------------------------------------------

def _metric_dot(u, v, metric):
    if metric == "minkowski":
        return u[0] * v[0] - sum(x * y for x, y in zip(u[1:], v[1:]))
    return sum(x * y for x, y in zip(u, v))


def _is_exact(x):
    return isinstance(x, (int, Fraction))


def apply_to_vectors(expr: SymTensorExpr, assignment: Mapping, *, unit_vectors=None,
                     perp=None, n_value=None):
    """Contract every free index with a concrete vector.

    ``assignment`` maps index labels to vectors, ``unit_vectors`` maps vector
    ids to vectors and ``perp`` gives the transverse projector, either as a
    matrix or as an object with a ``perp_dot(u, v)`` method.  The dimension
    symbol is evaluated at the common vector length unless ``n_value`` is
    given.  Exact inputs give an exact :class:`~fractions.Fraction`.
    """
    assignment = {_label(k): tuple(v) for k, v in assignment.items()}
    missing = set(expr.labels) - set(assignment)
    if missing:
        raise ContractionError(f"unassigned indices {sorted(missing)}")
    unit_vectors = {k: tuple(v) for k, v in (unit_vectors or {}).items()}
    dims = {len(v) for v in list(assignment.values()) + list(unit_vectors.values())}
    if len(dims) > 1:
        raise DimensionError(f"vectors have mismatched dimensions {sorted(dims)}")
    if n_value is None:
        n_value = dims.pop() if dims else expr.space.dim_value
    metric = expr.space.metric
    values = list(assignment.values()) + list(unit_vectors.values())
    exact = all(_is_exact(x) for v in values for x in v)

    if perp is not None and not hasattr(perp, "perp_dot"):
        matrix = [list(row) for row in perp]

        def perp_dot(u, v):
            return sum(u[i] * matrix[i][j] * v[j]
                       for i in range(len(u)) for j in range(len(v)) if matrix[i][j])
    elif perp is not None:
        perp_dot = perp.perp_dot
    else:
        perp_dot = None

    def vec(x):
        return assignment[x] if x in assignment else unit_vectors[x]

    total = Fraction(0) if exact else 0.0
    for key, coef in expr.terms.items():
        if coef.is_constant():
            c = coef.constant_value()
        else:
            c = coef.evaluate_at(n_value) if exact else coef.to_float(float(n_value))
        prod = c if exact else float(c)
        for f in key:
            if type(f) is DeltaFactor:
                u, v = assignment[f.left], assignment[f.right]
                if f.tag == PERP:
                    if perp_dot is None:
                        raise ContractionError("a transverse projector is needed")
                    prod *= perp_dot(u, v)
                else:
                    prod *= _metric_dot(u, v, metric)
            elif type(f) is UnitVectorFactor:
                prod *= _metric_dot(vec(f.vector_id), assignment[f.index], metric)
            else:
                prod *= _metric_dot(vec(f.left), vec(f.right), metric)
        total += prod
    return total


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def components(expr: SymTensorExpr, n_value: int, *, unit_vectors=None, perp=None) -> np.ndarray:
    """All ``n^rank`` (contravariant) components as a float array.

    ``perp`` is the transverse projector matrix (contravariant ``g_perp`` in
    Minkowski space).
    """
    rank = expr.rank
    letters = {lab: _LETTERS[j] for j, lab in enumerate(expr.labels)}
    out_sub = "".join(letters[lab] for lab in expr.labels)
    metric = expr.space.metric
    if metric == "minkowski":
        full = np.diag([1.0] + [-1.0] * (n_value - 1))
    else:
        full = np.eye(n_value)
    unit_vectors = {k: np.asarray([float(x) for x in v]) for k, v in (unit_vectors or {}).items()}
    perp_m = None if perp is None else np.asarray([[float(x) for x in row] for row in perp])
    result = np.zeros((n_value,) * rank)
    for key, coef in expr.terms.items():
        c = coef.to_float(float(n_value))
        ops, subs = [], []
        for f in key:
            if type(f) is DeltaFactor:
                if f.tag == PERP and perp_m is None:
                    raise ContractionError("a transverse projector matrix is needed")
                ops.append(perp_m if f.tag == PERP else full)
                subs.append(letters[f.left] + letters[f.right])
            elif type(f) is UnitVectorFactor:
                ops.append(unit_vectors[f.vector_id])
                subs.append(letters[f.index])
            else:
                c *= _metric_dot(unit_vectors[f.left], unit_vectors[f.right], metric)
        if ops:
            result += c * np.einsum(",".join(subs) + "->" + out_sub, *ops)
        else:
            result += c
    return result


# ---------------------------------------------------------------------------
# rendering and JSON
# ---------------------------------------------------------------------------

_GREEK = {"mu", "nu", "rho", "sigma", "lambda", "kappa", "alpha", "beta", "gamma", "tau"}


def _factor_text(f, space):
    name = space.delta_name
    if type(f) is DeltaFactor:
        head = name + ("perp" if f.tag == PERP else "")
        return f"{head}({f.left},{f.right})"
    if type(f) is UnitVectorFactor:
        return f"{f.vector_id}({f.index})"
    return f"dot({f.left},{f.right})"


def _latex_index(label):
    m = re.fullmatch(r"([A-Za-z]+)(\d*)", label)
    if not m:
        return label
    base, num = m.groups()
    if base in _GREEK:
        base = "\\" + base
    return f"{base}_{{{num}}}" if num else base


def _factor_latex(f, space):
    if type(f) is DeltaFactor:
        base = "g" if space.metric == "minkowski" else "\\delta"
        if f.tag == PERP:
            base += "_\\perp"
        return f"{base}^{{{_latex_index(f.left)}{_latex_index(f.right)}}}"
    if type(f) is UnitVectorFactor:
        vid = f.vector_id
        m = re.fullmatch(r"e(\d+)", vid)
        head = f"\\hat{{e}}_{{{m.group(1)}}}" if m else (
            vid if space.metric == "minkowski" else f"\\hat{{{vid}}}")
        return f"{head}^{{{_latex_index(f.index)}}}"
    return f"({f.left}\\cdot {f.right})"


def _render(expr, factor_fn, coef_fn, coef_sep, group_open, group_close, sep):
    if expr.is_zero():
        return "0"
    coefs = list(expr.terms.values())
    bodies = ["".join(factor_fn(f, expr.space) for f in key) for key in expr.terms]
    if len(set(coefs)) == 1:
        coef = coefs[0]
        if all(not b for b in bodies):
            return coef_fn(coef)
        inner = sep.join(b or "1" for b in bodies)
        if coef == ONE:
            return inner
        if len(bodies) > 1:
            inner = f"{group_open}{inner}{group_close}"
        return f"{coef_fn(coef)}{coef_sep}{inner}"
    parts = []
    for coef, body in zip(coefs, bodies):
        if not body:
            parts.append(coef_fn(coef))
        elif coef == ONE:
            parts.append(body)
        else:
            parts.append(f"{coef_fn(coef)}{coef_sep}{body}")
    return sep.join(parts)


def render_text(expr: SymTensorExpr) -> str:
    symbol = expr.space.symbol
    return _render(expr, _factor_text, lambda c: c.render(symbol), " * ", "[", "]", " + ")


def render_latex(expr: SymTensorExpr) -> str:
    symbol = expr.space.symbol
    return _render(expr, _factor_latex, lambda c: c.latex(symbol), "", "\\left[", "\\right]", "+")


def render_expr(expr: SymTensorExpr, fmt: str = "text") -> str:
    if fmt == "latex":
        return render_latex(expr)
    if fmt == "json":
        import json
        return json.dumps(expr_to_json(expr), indent=2)
    return render_text(expr)


def expr_to_json(expr: SymTensorExpr) -> dict:
    space = expr.space
    out: dict = {"free_indices": list(expr.labels)}
    if space.dim_value is None:
        out["dim"] = space.symbol
    else:
        out["dim"] = {"value": str(space.dim_value), "symbol": space.symbol}
    out["metric"] = space.metric
    if space.perp_codim or space.parallel or space.dots:
        out["space"] = {
            "perp_codim": space.perp_codim,
            "parallel": list(space.parallel),
            "dots": [[a, b, str(v)] for a, b, v in space.dots],
        }
    spaces = {i.label: i.space_tag for i in expr.free_indices if i.space_tag != "full"}
    if spaces:
        out["index_spaces"] = spaces
    terms = []
    for key, coef in expr.terms.items():
        term = {
            "coeff": coef.render(space.symbol),
            "deltas": [[f.left, f.right, f.tag] for f in key if type(f) is DeltaFactor],
            "unit_vectors": [[f.vector_id, f.index] for f in key if type(f) is UnitVectorFactor],
        }
        dots = [[f.left, f.right] for f in key if type(f) is DotFactor]
        if dots:
            term["dots"] = dots
        terms.append(term)
    out["terms"] = terms
    return out


def expr_from_json(data: Mapping) -> SymTensorExpr:
    dim = data.get("dim", "n")
    if isinstance(dim, str):
        symbol, dim_value = dim, None
    else:
        symbol, dim_value = dim.get("symbol", "n"), Fraction(dim["value"])
    extra = data.get("space", {})
    space = Space(
        metric=data.get("metric", "euclidean"),
        symbol=symbol,
        perp_codim=extra.get("perp_codim", 0),
        parallel=tuple(extra.get("parallel", ())),
        dots=tuple((a, b, Fraction(v)) for a, b, v in extra.get("dots", ())),
        dim_value=dim_value,
    )
    spaces = data.get("index_spaces", {})
    free = [IndexName(l, spaces.get(l, "full")) for l in data["free_indices"]]
    raw = []
    for term in data["terms"]:
        factors = [DeltaFactor(a, b, tag) for a, b, tag in term.get("deltas", [])]
        factors += [UnitVectorFactor(v, i) for v, i in term.get("unit_vectors", [])]
        factors += [DotFactor(a, b) for a, b in term.get("dots", [])]
        raw.append((parse_rational_function(term["coeff"], symbol), factors))
    return SymTensorExpr.build(free, raw, space)
