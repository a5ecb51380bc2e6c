"""Concrete vectors with exact rational components."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError


def to_fraction(x) -> Fraction:
    """Parse ints, fraction strings like ``"1/3"`` or floats (exactly)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class ConcreteVector:
    components: tuple
    signature: str = "euclidean"

    def __post_init__(self):
        comps = tuple(to_fraction(c) for c in self.components)
        if not comps:
            raise DimensionError("a vector needs at least one component")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *components):
        return cls(tuple(components))

    @property
    def dim(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    @property
    def floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.components])

    def dot(self, other) -> Fraction:
        other = as_vector(other)
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return sum((a * b for a, b in zip(self.components, other.components)), Fraction(0))

    def norm_sq(self) -> Fraction:
        return self.dot(self)

    def __add__(self, other):
        return type(self)(tuple(a + b for a, b in zip(self, as_vector(other))))

    def __sub__(self, other):
        return type(self)(tuple(a - b for a, b in zip(self, as_vector(other))))

    def scaled(self, s):
        s = to_fraction(s)
        return type(self)(tuple(s * a for a in self))


@dataclass(frozen=True)
class MinkowskiVector(ConcreteVector):
    """A d-vector; slot 0 is time and the metric is diag(+, -, ..., -)."""

    signature: str = "minkowski"

    def __post_init__(self):
        super().__post_init__()
        if len(self.components) < 2:
            raise DimensionError("a Minkowski vector needs at least two components")

    def dot(self, other) -> Fraction:
        other = as_vector(other)
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        a, b = self.components, other.components
        return a[0] * b[0] - sum((x * y for x, y in zip(a[1:], b[1:])), Fraction(0))

    def lowered(self) -> tuple:
        """Covariant components ``a_mu = g_{mu nu} a^nu``."""
        return (self.components[0],) + tuple(-c for c in self.components[1:])


def as_vector(v) -> ConcreteVector:
    if isinstance(v, ConcreteVector):
        return v
    return ConcreteVector(tuple(v))


def check_same_dim(vectors) -> int | None:
    dims = {len(v) for v in vectors}
    if len(dims) > 1:
        raise DimensionError(f"vectors have mismatched dimensions {sorted(dims)}")
    return dims.pop() if dims else None
