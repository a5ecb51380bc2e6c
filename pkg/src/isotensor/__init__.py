"""Totally symmetric isotropic tensors, exact sphere averages and
tensor-integral reduction, with an independent numerical oracle."""

from .combinatorics import double_factorial, enumerate_pairings, enumerate_splits
from .errors import (
    ContractionError,
    DegenerateSpanError,
    DimensionError,
    DivisionByZeroError,
    IsotensorError,
    LightlikeError,
    OddRankError,
    PoleError,
    QuadratureError,
    RangeError,
    SizeCapError,
    SpaceMismatchError,
)
from .exact_arith import RationalFunction, c_nk, parse_rational_function
from .minkowski import (
    g_perp,
    iso_tensor_minkowski,
    minkowski_dot,
    reduce_minkowski_isotropic,
    reduce_minkowski_one_vector,
    to_euclidean,
)
from .sphere_average import average_power, average_product, identify_average_tensor
from .subspace_reduction import (
    ReductionResult,
    ScalarIntegrandDescriptor,
    SubspaceBasis,
    e_tensor,
    gram_schmidt,
    iso_tensor_perp,
    projectors,
    reduce_isotropic,
    reduce_multi_vector,
    reduce_one_vector,
)
from .tensor_core import (
    IndexName,
    Space,
    SymTensorExpr,
    contract,
    expr_from_json,
    iso_tensor,
    iso_tensor_recurrence,
    multiply,
    normalization,
    project_symmetric,
    self_contraction,
)
from .vectors import ConcreteVector, MinkowskiVector

__version__ = "0.1.0"
