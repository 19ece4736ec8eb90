"""Minimal presentations, Betti numbers and Hilbert functions of bipersistence modules."""

from .core import (
    BigradedMatrix,
    BipresError,
    FieldError,
    Grade,
    InconsistencyError,
    LabeledMatrix,
    LazyHeapColumn,
    PrimeField,
    SparseColumn,
    ValidationError,
    grid,
)
from .bigradedred import (
    GradedVectors,
    grobner_image,
    ker_basis,
    ker_betti,
    min_gens,
    pointwise_rank_nullity,
    reduce_bigraded,
)

__version__ = "0.1.0"
