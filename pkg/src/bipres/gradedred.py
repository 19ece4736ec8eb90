"""The graded reduction and kernel computation for 1-parameter modules.

These are the building blocks the bigraded algorithms generalise.  They are
used directly for Z-graded inputs and as references in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Sequence

from .core import PrimeField, SparseColumn, ValidationError, as_field


@dataclass
class GradedMatrix:
    """Columns over Z/p labeled by nondecreasing integer grades."""

    num_rows: int
    columns: list[SparseColumn]
    col_grades: list[int]
    field: PrimeField = dfield(default_factory=PrimeField)

    def __post_init__(self):
        self.field = as_field(self.field)
        if len(self.columns) != len(self.col_grades):
            raise ValidationError("one grade per column required")
        if any(b < a for a, b in zip(self.col_grades, self.col_grades[1:])):
            raise ValidationError("column grades must be nondecreasing")
        for col in self.columns:
            if col.rows and col.rows[-1] >= self.num_rows:
                raise ValidationError("row index out of range")

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], col_grades: Sequence[int], field=2) -> GradedMatrix:
        fld = as_field(field)
        m = len(dense)
        n = len(col_grades)
        cols = [SparseColumn.from_dense([dense[i][j] for i in range(m)], fld) for j in range(n)]
        return cls(m, cols, list(col_grades), fld)

    @property
    def num_cols(self) -> int:
        return len(self.columns)

    def copy(self) -> GradedMatrix:
        return GradedMatrix(self.num_rows, [c.copy() for c in self.columns], list(self.col_grades), self.field)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.num_cols for _ in range(self.num_rows)]
        for j, col in enumerate(self.columns):
            for r, c in col.entries():
                out[r][j] = c
        return out


class PivotArray(list):
    """slots[i] is the index of the reduced column whose pivot is i, or None."""

    def __init__(self, num_rows: int):
        super().__init__([None] * num_rows)


def _reduce_column(R: list[SparseColumn], j: int, pivs: PivotArray, fld: PrimeField, trace, V=None) -> None:
    col = R[j]
    while col.rows and pivs[col.rows[-1]] is not None:
        k = pivs[col.rows[-1]]
        scalar = 1 if fld.p == 2 else fld.neg(fld.div(col.vals[-1], R[k].vals[-1]))
        col.iadd(R[k], scalar, fld)
        if V is not None:
            V[j].iadd(V[k], scalar, fld)
        if trace is not None:
            trace.append((k, j))
    if col.rows:
        pivs[col.rows[-1]] = j


def gr_red(D: GradedMatrix, trace: list | None = None) -> GradedMatrix:
    """Reduce D by left-to-right column additions.

    Returns a new matrix; D is left untouched.  When `trace` is a list, each
    addition of column k onto column j is appended as ``(k, j)``.
    """
    R = D.copy()
    pivs = PivotArray(D.num_rows)
    for j in range(R.num_cols):
        _reduce_column(R.columns, j, pivs, R.field, trace)
    return R


def ker_1d(D: GradedMatrix, trace: list | None = None) -> list[tuple[SparseColumn, int]]:
    """Basis of the kernel of a morphism of free 1-parameter modules.

    Each element is ``(v, z)``: v holds coefficients on the domain basis and
    z is the grade at which column j was reduced to zero.
    """
    R = D.copy()
    n = R.num_cols
    V = [SparseColumn([j], [1]) for j in range(n)]
    pivs = PivotArray(D.num_rows)
    basis = []
    for j in range(n):
        _reduce_column(R.columns, j, pivs, R.field, trace, V)
        if not R.columns[j].rows:
            basis.append((V[j], R.col_grades[j]))
    return basis


def rank_nullity_at(R: GradedMatrix, z: int) -> tuple[int, int]:
    """Pointwise rank and nullity at grade z, read off a reduced matrix."""
    rank = nullity = 0
    for col, g in zip(R.columns, R.col_grades):
        if g > z:
            break
        if col.rows:
            rank += 1
        else:
            nullity += 1
    return rank, nullity
