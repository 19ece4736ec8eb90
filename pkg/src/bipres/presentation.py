"""Presentations, Betti numbers and Hilbert functions from free implicit representations.

An FI-Rep is a pair of bigraded matrices ``d2: F2 -> F1`` and ``d1: F1 -> F0``
with ``d1 d2 = 0``; it presents ``M = ker d1 / im d2``.  The pipeline is

1. minimal generators S of ``im d2`` (one bigraded reduction of d2),
2. a kernel basis of ``d1`` with distinct pivots (one reduction of d1),
3. S rewritten in kernel-basis coordinates,

which gives a semi-minimal presentation (a minimal one plus identity summands).
The same two reductions yield the Hilbert function, and with it beta_2.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dfield
from typing import Sequence

import numpy as np

from .bigradedred import GradedVectors, cumulative_counts, rank_nullity_arrays, reduce_bigraded
from .core import (
    BigradedMatrix,
    Grade,
    InconsistencyError,
    LabeledMatrix,
    PrimeField,
    SparseColumn,
    ValidationError,
    as_field,
)


# ------------------------------------------------------------------ types


class FIRep:
    """A free implicit representation ``(d2, d1)`` over a prime field.

    ``d2`` has one row per column of ``d1``; its row grades are the column
    grades of ``d1`` (filled in when omitted).  ``d1`` may have zero rows.
    """

    def __init__(self, d2: BigradedMatrix, d1: BigradedMatrix, *, check: bool = True):
        if d2.field != d1.field:
            raise ValidationError("d1 and d2 must be over the same field")
        if d2.num_rows != d1.num_cols:
            raise ValidationError(f"d2 has {d2.num_rows} rows but d1 has {d1.num_cols} columns")
        if d2.row_grades is None:
            d2 = BigradedMatrix(d2.num_rows, d2.indptr, d2.indices, d2.data, d2.col_grades, d1.col_grades, d2.field, validate=check)
        elif not np.array_equal(d2.row_grades, d1.col_grades):
            raise ValidationError("row grades of d2 must equal column grades of d1")
        self.d2 = d2
        self.d1 = d1
        if check:
            self.check_chain()

    @property
    def field(self) -> PrimeField:
        return self.d1.field

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.d1.num_rows, self.d1.num_cols, self.d2.num_cols

    def check_chain(self) -> None:
        if self.d1.num_rows == 0 or self.d2.nnz == 0 or self.d1.nnz == 0:
            return
        prod = (self.d1.to_scipy() @ self.d2.to_scipy()).tocoo()
        if np.any(prod.data % self.field.p):
            raise ValidationError("not a chain complex")

    @classmethod
    def from_dense(cls, d2, d2_grades, d1, d1_grades, field=2, d1_row_grades=None) -> FIRep:
        fld = as_field(field)
        b = len(d1_grades)
        d1m = BigradedMatrix.from_dense(np.asarray(d1, dtype=np.int64).reshape(-1, b), _grades(d1_grades), d1_row_grades, fld)
        d2m = BigradedMatrix.from_dense(np.asarray(d2, dtype=np.int64).reshape(b, -1), _grades(d2_grades), _grades(d1_grades), fld)
        return cls(d2m, d1m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FIRep):
            return NotImplemented
        return self.d2 == other.d2 and self.d1 == other.d1

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        a, b, c = self.sizes
        return f"FIRep(sizes=({a}, {b}, {c}), p={self.field.p})"


def _grades(g) -> np.ndarray:
    return np.asarray(g, dtype=np.int64).reshape(-1, 2)


class Presentation(LabeledMatrix):
    """A homogeneous matrix F1 -> F0 whose cokernel is the module.

    Rows are generators, columns relations.  ``minimal`` is True once no
    nonzero entry has equal row and column grade.
    """

    def __init__(self, num_rows, indptr, indices, data, col_grades, row_grades, field=2, *, minimal=False, validate=True):
        if row_grades is None:
            raise ValidationError("row grades required")
        self.minimal = minimal
        super().__init__(num_rows, indptr, indices, data, col_grades, row_grades, field, validate=validate)

    @classmethod
    def from_columns(cls, num_rows, columns, col_grades, row_grades=None, field=2, *, minimal=False, **kw):
        m = LabeledMatrix.from_columns(num_rows, columns, col_grades, row_grades, field, validate=False)
        return cls(m.num_rows, m.indptr, m.indices, m.data, m.col_grades, row_grades, m.field, minimal=minimal, **kw)

    def equal_grade_entries(self) -> int:
        """Number of nonzero entries whose row grade equals their column grade."""
        if not self.nnz:
            return 0
        cg = np.repeat(self.col_grades, np.diff(self.indptr), axis=0)
        return int(np.all(self.row_grades[self.indices] == cg, axis=1).sum())

    def __eq__(self, other) -> bool:
        res = super().__eq__(other)
        return res if res is NotImplemented else bool(res and self.minimal == other.minimal)

    __hash__ = None  # type: ignore[assignment]


def _positive(d: dict) -> dict[Grade, int]:
    return {Grade(int(g[0]), int(g[1])): int(v) for g, v in sorted(d.items()) if v}


@dataclass
class BettiTable:
    beta0: dict = dfield(default_factory=dict)
    beta1: dict = dfield(default_factory=dict)
    beta2: dict = dfield(default_factory=dict)

    def __post_init__(self):
        for name in ("beta0", "beta1", "beta2"):
            d = getattr(self, name)
            if any(v < 0 for v in d.values()):
                raise ValidationError(f"{name} has a negative entry")
            setattr(self, name, _positive(d))

    def __getitem__(self, i: int) -> dict[Grade, int]:
        return (self.beta0, self.beta1, self.beta2)[i]

    def support(self) -> list[Grade]:
        return sorted(set(self.beta0) | set(self.beta1) | set(self.beta2))

    def alternating_sum(self, z: Sequence[int]) -> int:
        """sum_i (-1)^i sum_{y <= z} beta_i(y)."""
        tot = 0
        for sign, d in ((1, self.beta0), (-1, self.beta1), (1, self.beta2)):
            tot += sign * sum(v for g, v in d.items() if g[0] <= z[0] and g[1] <= z[1])
        return tot


class HilbertFunction:
    """z -> dim M_z, stored on the product grid ``xs x ys``.

    Between grid coordinates the function is constant: its value at z is the
    value at the largest grid point <= z, or 0 if there is none.
    """

    def __init__(self, xs, ys, values):
        self.xs = np.asarray(xs, dtype=np.int64)
        self.ys = np.asarray(ys, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.int64).reshape(len(self.xs), len(self.ys))
        if np.any(np.diff(self.xs) <= 0) or np.any(np.diff(self.ys) <= 0):
            raise ValidationError("grid coordinates must be strictly increasing")

    def __call__(self, z: Sequence[int]) -> int:
        i = np.searchsorted(self.xs, z[0], side="right") - 1
        j = np.searchsorted(self.ys, z[1], side="right") - 1
        if i < 0 or j < 0:
            return 0
        return int(self.values[i, j])

    def on_grid(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        i = np.searchsorted(self.xs, xs, side="right") - 1
        j = np.searchsorted(self.ys, ys, side="right") - 1
        if not len(self.xs) or not len(self.ys):
            return np.zeros((len(xs), len(ys)), dtype=np.int64)
        out = self.values[np.maximum(i, 0)][:, np.maximum(j, 0)].copy()
        out[i < 0, :] = 0
        out[:, j < 0] = 0
        return out

    @property
    def grid(self) -> list[Grade]:
        return [Grade(int(x), int(y)) for x in self.xs for y in self.ys]

    def items(self):
        for a, x in enumerate(self.xs):
            for b, y in enumerate(self.ys):
                yield Grade(int(x), int(y)), int(self.values[a, b])

    def as_dict(self) -> dict[Grade, int]:
        return dict(self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, HilbertFunction):
            return NotImplemented
        xs = np.union1d(self.xs, other.xs)
        ys = np.union1d(self.ys, other.ys)
        return np.array_equal(self.on_grid(xs, ys), other.on_grid(xs, ys))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"HilbertFunction({len(self.xs)}x{len(self.ys)} grid)"


# ------------------------------------------------------------------ step 3


def express_in_basis(basis: GradedVectors, S: GradedVectors, engine: str = "fast") -> list[SparseColumn]:
    """Coordinates of each vector of S with respect to a basis with distinct pivots.

    Each S-vector is cancelled pivot by pivot against the unique basis vector
    sharing that pivot, which must have grade <= the S-vector's grade.
    """
    fld = basis.field
    if engine == "fast":
        from . import _kernels

        st, ptr, rows, vals = _kernels.express_in_basis(
            basis.indptr, basis.indices, basis.data.astype(np.int32),
            basis.grades[:, 0].copy(), basis.grades[:, 1].copy(),
            S.indptr, S.indices, S.data.astype(np.int32),
            S.grades[:, 0].copy(), S.grades[:, 1].copy(),
            max(basis.ambient_size, 1), fld.p, fld.inverse_table(),
        )
        if st <= -2:
            raise InconsistencyError("basis vectors must have distinct, defined pivots")
        if st >= 0:
            raise InconsistencyError("S not in span of B_ker")
        return [SparseColumn(rows[ptr[i]:ptr[i + 1]].tolist(), vals[ptr[i]:ptr[i + 1]].tolist()) for i in range(len(S))]

    lookup: dict[int, int] = {}
    for b, piv in enumerate(basis.pivots()):
        if piv is None or piv in lookup:
            raise InconsistencyError("basis vectors must have distinct, defined pivots")
        lookup[piv] = b
    out = []
    for i in range(len(S)):
        v, g = S[i]
        v = v.copy()
        coeffs: dict[int, int] = {}
        while not v.is_zero():
            b = lookup.get(v.pivot)
            if b is None or basis.grades[b, 0] > g[0] or basis.grades[b, 1] > g[1]:
                raise InconsistencyError("S not in span of B_ker")
            bv = basis.vector(b)
            c = fld.div(v.pivot_value, bv.pivot_value)
            v.iadd(bv, fld.neg(c), fld)
            coeffs[b] = c
        out.append(SparseColumn.from_entries(sorted(coeffs.items())))
    return out


# ------------------------------------------------------------------ pipeline


@dataclass
class Reductions:
    """The two reduction passes shared by the presentation and the Hilbert function."""

    kernel: object  # BigradedReduction of d1 (with kernel basis)
    image: object  # BigradedReduction of d2 (with generators)


def _reduce_pair(fr: FIRep, engine: str) -> Reductions:
    ker = reduce_bigraded(fr.d1, kernel_basis=True, engine=engine)
    img = reduce_bigraded(fr.d2, generators=True, engine=engine)
    return Reductions(ker, img)


def _presentation_from(red: Reductions, engine: str) -> Presentation:
    B = red.kernel.kernel
    S = red.image.generators
    cols = express_in_basis(B, S, engine)
    return Presentation.from_columns(len(B), cols, S.grades, B.grades, B.field)


def semi_minimal_presentation(fr: FIRep, engine: str = "fast") -> Presentation:
    """A semi-minimal presentation of ker d1 / im d2.

    Rows are the kernel basis in discovery (lexicographic grade) order,
    columns the minimal generators of the image in lexicographic grade order.
    """
    return _presentation_from(_reduce_pair(fr, engine), engine)


def _hilbert_from(red: Reductions, fr: FIRep) -> HilbertFunction:
    grades = np.vstack([fr.d1.col_grades, fr.d2.col_grades])
    xs = np.unique(grades[:, 0])
    ys = np.unique(grades[:, 1])
    _, nullity = rank_nullity_arrays(red.kernel, xs, ys)
    rank, _ = rank_nullity_arrays(red.image, xs, ys)
    vals = nullity - rank
    if np.any(vals < 0):
        raise InconsistencyError("chain condition violated")
    return HilbertFunction(xs, ys, vals)


def hilbert_function(fr: FIRep, engine: str = "fast") -> HilbertFunction:
    """dim M_z = nullity_z(d1) - rank_z(d2) on the grid of all column grades."""
    return _hilbert_from(_reduce_pair(fr, engine), fr)


def _cancel_row(target: SparseColumn, source: SparseColumn, p: int, fld: PrimeField) -> SparseColumn:
    c = fld.neg(fld.div(target.get(p), source.pivot_value))
    return target.add_multiple(source, c, fld)


def minimize(P: Presentation, threads: int = 1, parallel_threshold: int = 64) -> Presentation:
    """Remove identity summands from a semi-minimal presentation.

    For each column whose pivot row has the same grade, that row is cleared
    from all later columns and the row/column pair is dropped.  With
    ``threads > 1`` the additions onto independent target columns run
    concurrently; the result does not depend on the thread count.
    """
    fld = P.field
    n = P.num_cols
    cols = P.columns
    cg = P.col_grades
    rg = P.row_grades
    # row -> set of columns with a nonzero entry there
    row_cols: list[set] = [set() for _ in range(P.num_rows)]
    for j, col in enumerate(cols):
        for r in col.rows:
            row_cols[r].add(j)
    removed_cols = np.zeros(n, dtype=bool)
    removed_rows = np.zeros(P.num_rows, dtype=bool)
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for j in range(n):
            col = cols[j]
            if col.is_zero():
                continue
            p = col.pivot
            if rg[p, 0] != cg[j, 0] or rg[p, 1] != cg[j, 1]:
                continue
            targets = sorted(k for k in row_cols[p] if k > j)
            if pool is not None and len(targets) >= parallel_threshold:
                new = list(pool.map(lambda k: _cancel_row(cols[k], col, p, fld), targets))
            else:
                new = [_cancel_row(cols[k], col, p, fld) for k in targets]
            for k, nk in zip(targets, new):
                for r in col.rows:
                    if nk.get(r):
                        row_cols[r].add(k)
                    else:
                        row_cols[r].discard(k)
                cols[k] = nk
            removed_cols[j] = True
            removed_rows[p] = True
            for r in col.rows:
                row_cols[r].discard(j)
    finally:
        if pool is not None:
            pool.shutdown()
    new_index = np.cumsum(~removed_rows) - 1
    kept = []
    for j in np.flatnonzero(~removed_cols):
        col = cols[j]
        if any(removed_rows[r] for r in col.rows):
            raise InconsistencyError("minimization left an entry in a removed row")
        kept.append(SparseColumn([int(new_index[r]) for r in col.rows], col.vals))
    Q = Presentation.from_columns(
        int((~removed_rows).sum()), kept, cg[~removed_cols], rg[~removed_rows], fld, minimal=True
    )
    return canonical_order(Q)


def _group_order(grades: np.ndarray, keys: list) -> list[int]:
    # equal grades gather at their first occurrence, then sort by key
    first: dict = {}
    for i, g in enumerate(map(tuple, grades)):
        first.setdefault(g, i)
    return sorted(range(len(keys)), key=lambda i: (first[tuple(grades[i])], keys[i]))


def canonical_order(P: Presentation) -> Presentation:
    """Reorder equal-grade rows, then equal-grade columns, by their sparse entries.

    Row keys use (column grade, value) pairs, which do not change when
    equal-grade columns are permuted; so the result is a fixed point.
    """
    cols = P.columns
    cg, rg = P.col_grades, P.row_grades
    row_keys: list[list] = [[] for _ in range(P.num_rows)]
    for j, col in enumerate(cols):
        for r, v in zip(col.rows, col.vals):
            row_keys[r].append((int(cg[j, 1]), int(cg[j, 0]), int(v)))
    rorder = _group_order(rg, [sorted(k) for k in row_keys])
    where = np.empty(P.num_rows, dtype=np.int64)
    where[rorder] = np.arange(P.num_rows)
    moved = []
    for col in cols:
        pairs = sorted((int(where[r]), int(v)) for r, v in zip(col.rows, col.vals))
        moved.append(SparseColumn([r for r, _ in pairs], [v for _, v in pairs]))
    corder = _group_order(cg, [(tuple(c.rows), tuple(c.vals)) for c in moved])
    return Presentation.from_columns(
        P.num_rows, [moved[j] for j in corder], cg[corder].reshape(-1, 2), rg[rorder].reshape(-1, 2), P.field, minimal=P.minimal
    )


def _rank(columns: list[SparseColumn], fld: PrimeField) -> int:
    pivs: dict[int, SparseColumn] = {}
    rank = 0
    for col in columns:
        col = col.copy()
        while not col.is_zero() and col.pivot in pivs:
            other = pivs[col.pivot]
            col.iadd(other, fld.neg(fld.div(col.pivot_value, other.pivot_value)), fld)
        if not col.is_zero():
            pivs[col.pivot] = col
            rank += 1
    return rank


def betti_from_semiminimal(P: Presentation, threads: int = 1) -> tuple[dict[Grade, int], dict[Grade, int]]:
    """beta_0 and beta_1 without minimizing: m_z - rank D^z and n_z - rank D^z.

    D^z is the block of rows and columns labeled exactly z.
    """
    fld = P.field
    rows_at: dict[Grade, list[int]] = {}
    for i, g in enumerate(P.row_grade_list()):
        rows_at.setdefault(g, []).append(i)
    cols_at: dict[Grade, list[int]] = {}
    for j, g in enumerate(P.col_grade_list()):
        cols_at.setdefault(g, []).append(j)

    def block_rank(z: Grade) -> int:
        rows = rows_at[z]
        local = {r: t for t, r in enumerate(rows)}
        block = []
        for j in cols_at[z]:
            col = P.column(j)
            ent = [(local[r], v) for r, v in zip(col.rows, col.vals) if r in local]
            block.append(SparseColumn([r for r, _ in ent], [v for _, v in ent]))
        return _rank(block, fld)

    shared = sorted(set(rows_at) & set(cols_at))
    if threads > 1 and len(shared) > 1:
        with ThreadPoolExecutor(threads) as pool:
            ranks = dict(zip(shared, pool.map(block_rank, shared)))
    else:
        ranks = {z: block_rank(z) for z in shared}
    beta0 = {z: len(r) - ranks.get(z, 0) for z, r in rows_at.items()}
    beta1 = {z: len(c) - ranks.get(z, 0) for z, c in cols_at.items()}
    return _positive(beta0), _positive(beta1)


def beta2_from_hilbert(beta0: dict, beta1: dict, hf: HilbertFunction) -> dict[Grade, int]:
    """Solve dim M_z = sum_{y<=z} (beta0 - beta1 + beta2)(y) for beta2.

    The grid is the Hilbert function's grid extended by the Betti grades.
    """
    g0 = _grades(list(beta0.keys()))
    g1 = _grades(list(beta1.keys()))
    xs = np.unique(np.concatenate([hf.xs, g0[:, 0], g1[:, 0]]))
    ys = np.unique(np.concatenate([hf.ys, g0[:, 1], g1[:, 1]]))
    if not len(xs) or not len(ys):
        return {}
    c0 = cumulative_counts(np.repeat(g0, list(beta0.values()), axis=0) if beta0 else g0, xs, ys)
    c1 = cumulative_counts(np.repeat(g1, list(beta1.values()), axis=0) if beta1 else g1, xs, ys)
    cum2 = hf.on_grid(xs, ys) - c0 + c1
    b2 = cum2.copy()
    b2[1:, :] -= cum2[:-1, :]
    b2[:, 1:] -= cum2[:, :-1]
    b2[1:, 1:] += cum2[:-1, :-1]
    if np.any(b2 < 0):
        raise InconsistencyError("inconsistent inputs")
    ii, jj = np.nonzero(b2)
    return {Grade(int(xs[i]), int(ys[j])): int(b2[i, j]) for i, j in zip(ii, jj)}


@dataclass
class PipelineResult:
    semi_minimal: Presentation
    minimal: Presentation | None
    betti: BettiTable
    hilbert: HilbertFunction
    timings: dict
    additions: dict


def run_pipeline(fr: FIRep, *, minimal: bool = True, threads: int = 1, engine: str = "fast") -> PipelineResult:
    """Semi-minimal presentation, optional minimization, Betti numbers and Hilbert function."""
    t0 = time.perf_counter()
    red = _reduce_pair(fr, engine)
    P = _presentation_from(red, engine)
    t1 = time.perf_counter()
    hf = _hilbert_from(red, fr)
    b0, b1 = betti_from_semiminimal(P, threads)
    b2 = beta2_from_hilbert(b0, b1, hf)
    t2 = time.perf_counter()
    Pm = minimize(P, threads) if minimal else None
    t3 = time.perf_counter()
    return PipelineResult(
        semi_minimal=P,
        minimal=Pm,
        betti=BettiTable(b0, b1, b2),
        hilbert=hf,
        timings={"presentation": t1 - t0, "betti": t2 - t1, "minimize": t3 - t2},
        additions={"d1": red.kernel.additions, "d2": red.image.additions},
    )


def betti_numbers(fr: FIRep, engine: str = "fast", threads: int = 1) -> BettiTable:
    return run_pipeline(fr, minimal=False, engine=engine, threads=threads).betti
