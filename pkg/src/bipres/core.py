"""Grades, prime fields, sparse columns and bigraded matrices.

Everything else in the package is built on the objects defined here.  Row
indices are 0-based throughout.  Matrices are stored column-sparse (CSC
arrays); reductions copy columns into their own working containers, so a
:class:`BigradedMatrix` is effectively an immutable value.
"""

from __future__ import annotations

import bisect
import heapq
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class BipresError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(BipresError, ValueError):
    """Input data violates a documented invariant."""


class InconsistencyError(BipresError, RuntimeError):
    """An internal consistency check failed (a bug or an invalid input that slipped through)."""


class FieldError(BipresError, ZeroDivisionError):
    pass


# --------------------------------------------------------------------- grades


class Grade(NamedTuple):
    x: int
    y: int


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    """Componentwise partial order on Z^2."""
    return a[0] <= b[0] and a[1] <= b[1]


def colex_less(a: Sequence[int], b: Sequence[int]) -> bool:
    return a[1] < b[1] or (a[1] == b[1] and a[0] < b[0])


def lex_less(a: Sequence[int], b: Sequence[int]) -> bool:
    return a[0] < b[0] or (a[0] == b[0] and a[1] < b[1])


def colex_key(g: Sequence[int]) -> tuple[int, int]:
    return (g[1], g[0])


def grid(points: Iterable[Sequence[int]]) -> list[Grade]:
    """All grades mixing an x-coordinate and a y-coordinate of `points`, lex-sorted."""
    pts = list(points)
    xs = sorted({int(p[0]) for p in pts})
    ys = sorted({int(p[1]) for p in pts})
    return [Grade(x, y) for x in xs for y in ys]


def grid_axes(grades: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct sorted x- and y-coordinates of an (n, 2) grade array."""
    grades = np.asarray(grades, dtype=np.int64).reshape(-1, 2)
    return np.unique(grades[:, 0]), np.unique(grades[:, 1])


# ---------------------------------------------------------------------- field


MAX_PRIME = 1 << 16


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class PrimeField:
    """Arithmetic in Z/pZ for a prime p < 2**16.

    For p > 2 multiplication and inversion go through precomputed
    log/antilog tables.
    """

    def __init__(self, p: int = 2):
        p = int(p)
        if p >= MAX_PRIME or not _is_prime(p):
            raise ValidationError(f"field characteristic must be a prime < {MAX_PRIME}, got {p}")
        self.p = p
        self._log: list[int] | None = None
        self._exp: list[int] | None = None
        if p > 2:
            self._build_tables()

    def _build_tables(self) -> None:
        p = self.p
        order = p - 1
        factors = [q for q in range(2, order + 1) if order % q == 0 and _is_prime(q)]
        g = next(
            g for g in range(2, p) if all(pow(g, order // q, p) != 1 for q in factors)
        )
        exp = [1] * (2 * order)
        for i in range(1, 2 * order):
            exp[i] = exp[i - 1] * g % p
        log = [0] * p
        for i in range(order):
            log[exp[i]] = i
        self._exp, self._log = exp, log

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def canon(self, a: int) -> int:
        return int(a) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        if self._log is None:
            return a & b if self.p == 2 else (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise FieldError("division by zero in field")
        if self._log is None:
            return 1
        return self._exp[(self.p - 1 - self._log[a]) % (self.p - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a % self.p, self.inv(b))

    def inverse_table(self) -> np.ndarray:
        """inv[a] for every a in [0, p); inv[0] is 0 by convention."""
        table = np.zeros(self.p, dtype=np.int64)
        for a in range(1, self.p):
            table[a] = self.inv(a)
        return table


def field_inv(a: int, field: PrimeField) -> int:
    return field.inv(a)


def as_field(p: int | PrimeField) -> PrimeField:
    return p if isinstance(p, PrimeField) else PrimeField(p)


# --------------------------------------------------------------------- columns


class SparseColumn:
    """A sparse vector over Z/p stored as parallel sorted lists.

    Zeros are never stored.  ``pivot`` is the largest row index present,
    or None for the zero column.
    """

    __slots__ = ("rows", "vals")

    def __init__(self, rows: Iterable[int] = (), vals: Iterable[int] | None = None):
        self.rows = list(rows)
        self.vals = [1] * len(self.rows) if vals is None else list(vals)
        if len(self.rows) != len(self.vals):
            raise ValueError("rows and vals differ in length")

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, int]], field: PrimeField | None = None) -> SparseColumn:
        """Build from (row, coeff) pairs in any order; duplicates are summed."""
        p = field.p if field is not None else None
        acc: dict[int, int] = {}
        for r, c in entries:
            acc[int(r)] = acc.get(int(r), 0) + int(c)
        rows, vals = [], []
        for r in sorted(acc):
            c = acc[r] % p if p is not None else acc[r]
            if c:
                rows.append(r)
                vals.append(c)
        return cls(rows, vals)

    @classmethod
    def from_dense(cls, vec: Iterable[int], field: PrimeField) -> SparseColumn:
        rows, vals = [], []
        for i, c in enumerate(vec):
            c = int(c) % field.p
            if c:
                rows.append(i)
                vals.append(c)
        return cls(rows, vals)

    @property
    def pivot(self) -> int | None:
        return self.rows[-1] if self.rows else None

    @property
    def pivot_value(self) -> int:
        return self.vals[-1]

    def is_zero(self) -> bool:
        return not self.rows

    def __len__(self) -> int:
        return len(self.rows)

    def __bool__(self) -> bool:
        return bool(self.rows)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (SparseColumn, LazyHeapColumn)):
            return self.entries() == other.entries()
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.entries()))

    def __repr__(self) -> str:
        return f"SparseColumn({self.entries()})"

    def entries(self) -> list[tuple[int, int]]:
        return list(zip(self.rows, self.vals))

    def get(self, row: int) -> int:
        """Coefficient at `row` by binary search (0 if absent)."""
        i = bisect.bisect_left(self.rows, row)
        if i < len(self.rows) and self.rows[i] == row:
            return self.vals[i]
        return 0

    def copy(self) -> SparseColumn:
        return SparseColumn(self.rows, self.vals)

    def snapshot(self) -> SparseColumn:
        return self.copy()

    def to_dense(self, n: int) -> list[int]:
        out = [0] * n
        for r, c in zip(self.rows, self.vals):
            out[r] = c
        return out

    def add_multiple(self, source: SparseColumn | LazyHeapColumn, scalar: int, field: PrimeField) -> SparseColumn:
        """Return self + scalar * source; neither operand is modified."""
        out = self.copy()
        out.iadd(source, scalar, field)
        return out

    def iadd(self, source: SparseColumn | LazyHeapColumn, scalar: int, field: PrimeField) -> None:
        """In-place self += scalar * source (linear-time merge)."""
        p = field.p
        scalar %= p
        if scalar == 0:
            return
        if isinstance(source, LazyHeapColumn):
            source = source.snapshot()
        a_rows, a_vals = self.rows, self.vals
        b_rows, b_vals = source.rows, source.vals
        rows: list[int] = []
        vals: list[int] = []
        i = j = 0
        na, nb = len(a_rows), len(b_rows)
        if p == 2:
            while i < na and j < nb:
                ra, rb = a_rows[i], b_rows[j]
                if ra < rb:
                    rows.append(ra)
                    i += 1
                elif rb < ra:
                    rows.append(rb)
                    j += 1
                else:
                    i += 1
                    j += 1
            rows.extend(a_rows[i:])
            rows.extend(b_rows[j:])
            self.rows, self.vals = rows, [1] * len(rows)
            return
        while i < na and j < nb:
            ra, rb = a_rows[i], b_rows[j]
            if ra < rb:
                rows.append(ra)
                vals.append(a_vals[i])
                i += 1
            elif rb < ra:
                rows.append(rb)
                vals.append(scalar * b_vals[j] % p)
                j += 1
            else:
                c = (a_vals[i] + scalar * b_vals[j]) % p
                if c:
                    rows.append(ra)
                    vals.append(c)
                i += 1
                j += 1
        rows.extend(a_rows[i:])
        vals.extend(a_vals[i:])
        for k in range(j, nb):
            rows.append(b_rows[k])
            vals.append(scalar * b_vals[k] % p)
        self.rows, self.vals = rows, vals


class LazyHeapColumn:
    """Column backed by a max-heap with deferred cancellation.

    Additions push the source's entries without merging; entries sharing a
    row are combined only when they surface at the top (pivot queries) or
    when the column is compacted by :meth:`snapshot`.
    """

    __slots__ = ("_heap", "_field", "_p")

    def __init__(self, column: SparseColumn | None = None, field: PrimeField | None = None):
        self._field = field if field is not None else PrimeField(2)
        self._p = self._field.p
        self._heap: list[tuple[int, int]] = []
        if column is not None:
            self._heap = [(-r, c) for r, c in zip(reversed(column.rows), reversed(column.vals))]
            heapq.heapify(self._heap)

    def _settle(self) -> None:
        heap, p = self._heap, self._p
        while heap:
            key, c = heapq.heappop(heap)
            while heap and heap[0][0] == key:
                c += heapq.heappop(heap)[1]
            c %= p
            if c:
                heapq.heappush(heap, (key, c))
                return

    @property
    def pivot(self) -> int | None:
        self._settle()
        return -self._heap[0][0] if self._heap else None

    @property
    def pivot_value(self) -> int:
        self._settle()
        return self._heap[0][1]

    def is_zero(self) -> bool:
        return self.pivot is None

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (SparseColumn, LazyHeapColumn)):
            return self.entries() == other.entries()
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.entries()))

    def __repr__(self) -> str:
        return f"LazyHeapColumn({self.entries()})"

    def snapshot(self) -> SparseColumn:
        acc: dict[int, int] = {}
        for key, c in self._heap:
            acc[-key] = acc.get(-key, 0) + c
        rows, vals = [], []
        for r in sorted(acc):
            c = acc[r] % self._p
            if c:
                rows.append(r)
                vals.append(c)
        col = SparseColumn(rows, vals)
        self._heap = [(-r, c) for r, c in zip(reversed(rows), reversed(vals))]
        return col

    def entries(self) -> list[tuple[int, int]]:
        return self.snapshot().entries()

    def __len__(self) -> int:
        return len(self.snapshot())

    def copy(self) -> LazyHeapColumn:
        out = LazyHeapColumn(field=self._field)
        out._heap = list(self._heap)
        return out

    def add_multiple(self, source: SparseColumn | LazyHeapColumn, scalar: int, field: PrimeField) -> LazyHeapColumn:
        out = self.copy()
        out.iadd(source, scalar, field)
        return out

    def iadd(self, source: SparseColumn | LazyHeapColumn, scalar: int, field: PrimeField) -> None:
        p = field.p
        scalar %= p
        if scalar == 0:
            return
        if isinstance(source, LazyHeapColumn):
            source = source.snapshot()
        heap = self._heap
        for r, c in zip(source.rows, source.vals):
            heapq.heappush(heap, (-r, scalar * c % p))


COLUMN_BACKENDS = ("list", "heap")


def make_column(column: SparseColumn, field: PrimeField, backend: str = "list") -> SparseColumn | LazyHeapColumn:
    if backend == "list":
        return column.copy()
    if backend == "heap":
        return LazyHeapColumn(column, field)
    raise ValueError(f"unknown column backend {backend!r}; expected one of {COLUMN_BACKENDS}")


def add_multiple(target: SparseColumn, source: SparseColumn, scalar: int, field: PrimeField) -> SparseColumn:
    """target + scalar * source with zero entries dropped."""
    return target.add_multiple(source, scalar, field)


# -------------------------------------------------------------------- matrices


def _as_grades(grades, n: int, what: str) -> np.ndarray:
    arr = np.asarray(grades, dtype=np.int64)
    if arr.size == 0:
        arr = np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] != n:
        raise ValidationError(f"{what}: expected {n} grades, got array of shape {arr.shape}")
    return arr


def is_colex_sorted(grades: np.ndarray) -> bool:
    g = np.asarray(grades).reshape(-1, 2)
    if len(g) < 2:
        return True
    dy = np.diff(g[:, 1])
    dx = np.diff(g[:, 0])
    return bool(np.all((dy > 0) | ((dy == 0) & (dx >= 0))))


def colex_argsort(grades: np.ndarray) -> np.ndarray:
    """Stable permutation sorting grades colexicographically."""
    g = np.asarray(grades).reshape(-1, 2)
    return np.lexsort((np.arange(len(g)), g[:, 0], g[:, 1]))


class LabeledMatrix:
    """Column-sparse matrix over Z/p with a grade per column and optionally per row.

    Stored as CSC arrays: column ``j`` has rows ``indices[indptr[j]:indptr[j+1]]``
    (strictly increasing) with nonzero coefficients in ``data``.
    """

    def __init__(self, num_rows, indptr, indices, data, col_grades, row_grades=None, field=2, *, validate=True):
        self.field = as_field(field)
        self.num_rows = int(num_rows)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.data = np.ascontiguousarray(data, dtype=np.int64)
        n = len(self.indptr) - 1
        self.col_grades = _as_grades(col_grades, n, "column grades")
        self.row_grades = None if row_grades is None else _as_grades(row_grades, self.num_rows, "row grades")
        if validate:
            self.validate()

    # construction ------------------------------------------------------------

    @classmethod
    def from_columns(cls, num_rows: int, columns: Sequence, col_grades, row_grades=None, field=2, **kw):
        """Columns may be SparseColumns or iterables of (row, coeff) pairs."""
        fld = as_field(field)
        indptr = [0]
        indices: list[int] = []
        data: list[int] = []
        for col in columns:
            if not isinstance(col, (SparseColumn, LazyHeapColumn)):
                col = SparseColumn.from_entries(col, fld)
            for r, c in col.entries():
                indices.append(r)
                data.append(c)
            indptr.append(len(indices))
        return cls(num_rows, indptr, indices, data, col_grades, row_grades, fld, **kw)

    @classmethod
    def from_dense(cls, dense, col_grades, row_grades=None, field=2, **kw):
        fld = as_field(field)
        arr = np.asarray(dense, dtype=np.int64) % fld.p
        if arr.ndim != 2:
            arr = arr.reshape(0 if arr.size == 0 else -1, len(col_grades))
        m, n = arr.shape
        cols = [SparseColumn.from_dense(arr[:, j], fld) for j in range(n)]
        return cls.from_columns(m, cols, col_grades, row_grades, fld, **kw)

    @classmethod
    def zeros(cls, num_rows: int, col_grades, row_grades=None, field=2, **kw):
        n = len(col_grades)
        return cls(num_rows, np.zeros(n + 1, np.int64), [], [], col_grades if n else np.zeros((0, 2)), row_grades, field, **kw)

    @classmethod
    def identity(cls, grades, field=2, **kw):
        n = len(grades)
        return cls(n, np.arange(n + 1), np.arange(n), np.ones(n), grades if n else np.zeros((0, 2)), grades if n else np.zeros((0, 2)), field, **kw)

    # validation --------------------------------------------------------------

    def validate(self) -> None:
        p = self.field.p
        if self.indptr[0] != 0 or np.any(np.diff(self.indptr) < 0) or self.indptr[-1] != len(self.indices):
            raise ValidationError("malformed column pointer array")
        if len(self.data) != len(self.indices):
            raise ValidationError("indices and data differ in length")
        if len(self.indices):
            if self.indices.min() < 0 or self.indices.max() >= self.num_rows:
                raise ValidationError("row index out of range")
            if np.any(self.data <= 0) or np.any(self.data >= p):
                raise ValidationError("coefficient out of field")
            step = np.diff(self.indices.astype(np.int64))
            # step[t] compares entries t and t+1; skip pairs straddling a column boundary
            starts = self.indptr[1:-1]
            inner = np.ones(len(step), dtype=bool)
            inner[starts[(starts > 0) & (starts < len(self.indices))] - 1] = False
            if np.any(inner & (step <= 0)):
                raise ValidationError("row indices within a column must be strictly increasing")
        if self.row_grades is not None:
            self.check_homogeneous()

    def check_homogeneous(self) -> None:
        if self.row_grades is None or not len(self.indices):
            return
        cg = np.repeat(self.col_grades, np.diff(self.indptr), axis=0)
        rg = self.row_grades[self.indices]
        if np.any(rg > cg):
            raise ValidationError("entry violates grade homogeneity (row grade not <= column grade)")

    # accessors ---------------------------------------------------------------

    @property
    def num_cols(self) -> int:
        return len(self.indptr) - 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.num_rows, self.num_cols)

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def column(self, j: int) -> SparseColumn:
        a, b = self.indptr[j], self.indptr[j + 1]
        return SparseColumn(self.indices[a:b].tolist(), self.data[a:b].tolist())

    @property
    def columns(self) -> list[SparseColumn]:
        return [self.column(j) for j in range(self.num_cols)]

    def __iter__(self) -> Iterator[SparseColumn]:
        for j in range(self.num_cols):
            yield self.column(j)

    def col_grade(self, j: int) -> Grade:
        return Grade(int(self.col_grades[j, 0]), int(self.col_grades[j, 1]))

    def row_grade(self, i: int) -> Grade:
        if self.row_grades is None:
            raise ValidationError("row grades required")
        return Grade(int(self.row_grades[i, 0]), int(self.row_grades[i, 1]))

    def col_grade_list(self) -> list[Grade]:
        return [Grade(int(x), int(y)) for x, y in self.col_grades]

    def row_grade_list(self) -> list[Grade] | None:
        if self.row_grades is None:
            return None
        return [Grade(int(x), int(y)) for x, y in self.row_grades]

    def entry_counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.num_rows, self.num_cols), dtype=np.int64)
        cols = np.repeat(np.arange(self.num_cols), np.diff(self.indptr))
        out[self.indices, cols] = self.data
        return out

    def to_scipy(self):
        from scipy.sparse import csc_matrix

        return csc_matrix((self.data, self.indices, self.indptr), shape=self.shape)

    def submatrix_leq(self, z: Sequence[int]) -> np.ndarray:
        """Dense D_{<=z}: the columns whose grade is <= z."""
        mask = (self.col_grades[:, 0] <= z[0]) & (self.col_grades[:, 1] <= z[1])
        return self.to_dense()[:, mask]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledMatrix):
            return NotImplemented
        same_rows = (self.row_grades is None and other.row_grades is None) or (
            self.row_grades is not None
            and other.row_grades is not None
            and np.array_equal(self.row_grades, other.row_grades)
        )
        return (
            type(self) is type(other)
            and self.field == other.field
            and self.num_rows == other.num_rows
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.data, other.data)
            and np.array_equal(self.col_grades, other.col_grades)
            and same_rows
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.num_rows}x{self.num_cols}, nnz={self.nnz}, p={self.field.p})"


class BigradedMatrix(LabeledMatrix):
    """A labeled matrix whose column grades are colexicographically sorted."""

    def validate(self) -> None:
        super().validate()
        if not is_colex_sorted(self.col_grades):
            raise ValidationError("grades not colex-sorted")

    @classmethod
    def sorted_from_columns(cls, num_rows, columns, col_grades, row_grades=None, field=2, **kw):
        """Build after stably colex-sorting the columns by grade."""
        order = colex_argsort(np.asarray(col_grades, dtype=np.int64).reshape(-1, 2))
        cols = list(columns)
        gr = np.asarray(col_grades, dtype=np.int64).reshape(-1, 2)
        return cls.from_columns(num_rows, [cols[i] for i in order], gr[order], row_grades, field, **kw)
