import numpy as np
import pytest
from hypothesis import given, strategies as st

from bipres.bigradedred import (
    bired_sub,
    grobner_image,
    ker_basis,
    ker_betti,
    min_gens,
    pointwise_rank_nullity,
    reduce_bigraded,
)
from bipres.core import BigradedMatrix, Grade, SparseColumn, ValidationError, grid, make_column

from conftest import bigraded_matrices
from dense import image_leq, leq_mask, null_basis_leq, pivot_set, same_span, span_rank

# the 1 x 2 matrix [1 1] with incomparable column grades
TWO = dict(dense=[[1, 1]], col_grades=[(1, 0), (0, 1)], row_grades=[(0, 0)])


def two():
    return BigradedMatrix.from_dense(**TWO)


def test_bired_sub_examples():
    M = two()
    R = [make_column(c, M.field) for c in M.columns]
    g = M.col_grade_list()
    pivs = [None]
    ev = bired_sub(R, g, (0, 0), pivs, M.field)
    assert ev.zeroed == [] and ev.claimed == [] and ev.additions == 0  # nothing at y = 0 with x <= 0
    ev = bired_sub(R, g, (0, 1), pivs, M.field)
    assert ev.claimed == [1] and pivs == [1]
    # column 0 enters at (1, 0) and takes the pivot over from the larger index
    ev = bired_sub(R, g, (1, 0), pivs, M.field)
    assert ev.claimed == [0] and pivs == [0] and not R[1].is_zero()
    ev = bired_sub(R, g, (1, 1), pivs, M.field)
    assert ev.zeroed == [1] and R[1].is_zero() and pivs == [0]
    again = bired_sub(R, g, (1, 1), pivs, M.field)
    assert again.additions == 0 and again.zeroed == []


def test_ker_betti_examples():
    assert ker_betti(two()) == [(Grade(1, 1), 1)]
    Z = BigradedMatrix.zeros(2, [(0, 0), (2, 0), (2, 0), (1, 3)])
    assert ker_betti(Z) == [(Grade(0, 0), 1), (Grade(1, 3), 1), (Grade(2, 0), 2)]
    assert ker_betti(BigradedMatrix.identity([(0, 0), (1, 2)])) == []


def test_ker_basis_examples():
    K = ker_basis(two())
    assert len(K) == 1 and K[0] == (SparseColumn([0, 1], [1, 1]), Grade(1, 1))
    Z = ker_basis(BigradedMatrix.zeros(1, [(0, 0), (3, 1)]))
    assert list(Z) == [(SparseColumn([0]), Grade(0, 0)), (SparseColumn([1]), Grade(3, 1))]
    assert len(ker_basis(BigradedMatrix.identity([(0, 0), (0, 0)]))) == 0


def test_min_gens_examples():
    G = min_gens(two())
    assert list(G) == [(SparseColumn([0]), Grade(0, 1)), (SparseColumn([0]), Grade(1, 0))]
    single = BigradedMatrix.from_dense([[0], [2]], [(1, 1)], field=3)
    assert list(min_gens(single)) == [(SparseColumn([1], [2]), Grade(1, 1))]
    assert len(min_gens(BigradedMatrix.zeros(3, [(0, 0), (1, 1)]))) == 0


def test_grobner_image_examples():
    I = BigradedMatrix.identity([(0, 0), (1, 0), (0, 2)])
    G = grobner_image(I)
    assert sorted((v.rows, g) for v, g in G) == sorted(([j], I.col_grade(j)) for j in range(3))
    assert len(grobner_image(BigradedMatrix.zeros(2, [(0, 0)], [(0, 0), (0, 0)]))) == 0
    G = grobner_image(two())
    assert list(G) == [(SparseColumn([0]), Grade(0, 1)), (SparseColumn([0]), Grade(1, 0))]
    with pytest.raises(ValidationError, match="row grades required"):
        grobner_image(BigradedMatrix.from_dense([[1]], [(0, 0)]))


def test_rank_nullity_examples():
    assert pointwise_rank_nullity(BigradedMatrix.identity([(0, 0)] * 3)) == {Grade(0, 0): (3, 0)}
    assert pointwise_rank_nullity(BigradedMatrix.zeros(1, [(0, 0), (0, 0)])) == {Grade(0, 0): (0, 2)}
    assert pointwise_rank_nullity(two())[Grade(1, 1)] == (1, 1)


ENGINES = [("fast", "list"), ("reference", "list"), ("reference", "heap")]


@given(bigraded_matrices())
def test_engines_and_backends_agree(M):
    outs = []
    for engine, backend in ENGINES:
        r = reduce_bigraded(M, kernel_basis=True, generators=True, grobner=True, trace=True, engine=engine, backend=backend)
        outs.append((list(r.kernel), list(r.generators), list(r.grobner), r.trace, r.additions))
    assert outs[0] == outs[1] == outs[2]
    assert pointwise_rank_nullity(M) == pointwise_rank_nullity(M, engine="reference")


@given(bigraded_matrices())
def test_kernel_against_dense_null_space(M):
    p = M.field.p
    D = M.to_dense()
    K = ker_basis(M)
    pivots = K.pivots()
    assert len(set(pivots)) == len(pivots) and None not in pivots
    assert ker_betti(M) == sorted(K.grade_counts().items())
    for z in grid(M.col_grade_list()):
        mine = [v.to_dense(M.num_cols) for v, g in K if g[0] <= z[0] and g[1] <= z[1]]
        for v in mine:
            assert not np.any(D @ np.array(v) % p)
            assert np.all(leq_mask(M.col_grades, z) | (np.array(v) == 0))
        assert same_span(mine, null_basis_leq(D, M.col_grades, z, p), p)


@given(bigraded_matrices())
def test_min_gens_generate_minimally(M):
    p = M.field.p
    D = M.to_dense()
    G = min_gens(M)
    gens = [(np.array(v.to_dense(M.num_rows)), g) for v, g in G]
    assert [g for _, g in gens] == sorted(g for _, g in gens)
    for z in grid(M.col_grade_list()):
        below = [v for v, g in gens if g[0] <= z[0] and g[1] <= z[1]]
        assert same_span(below, image_leq(D, M.col_grades, z), p)
        # minimal: generators at z are independent modulo everything strictly below z
        lower = [v for v, g in gens if g[0] <= z[0] and g[1] <= z[1] and tuple(g) != tuple(z)]
        at = [v for v, g in gens if tuple(g) == tuple(z)]
        assert span_rank(lower + at, p) - span_rank(lower, p) == len(at)


@given(bigraded_matrices())
def test_rank_nullity_against_dense(M):
    p = M.field.p
    D = M.to_dense()
    prev = {}
    rn = pointwise_rank_nullity(M)
    for z, (rank, nullity) in rn.items():
        mask = leq_mask(M.col_grades, z)
        assert rank == span_rank(list(D[:, mask].T), p)
        assert rank + nullity == mask.sum()
        prev[z] = rank
    for a, ra in prev.items():
        for b, rb in prev.items():
            if a[0] <= b[0] and a[1] <= b[1]:
                assert ra <= rb


@given(bigraded_matrices(), st.data())
def test_grobner_image_leading_terms(M, data):
    p = M.field.p
    rg = np.array([data.draw(st.tuples(st.integers(0, 3), st.integers(0, 3))) for _ in range(M.num_rows)], dtype=np.int64).reshape(-1, 2)
    # keep only entries homogeneous with the drawn row grades
    D = M.to_dense()
    ok = (rg[:, None, 0] <= M.col_grades[None, :, 0]) & (rg[:, None, 1] <= M.col_grades[None, :, 1])
    M = BigradedMatrix.from_dense(D * ok, M.col_grades, rg, p)
    D = M.to_dense()
    G = grobner_image(M)
    n, m = M.num_cols, M.num_rows
    assert len(G) <= n * min(m, n)
    elems = [(v, g) for v, g in G]
    for v, g in elems:
        assert np.all(rg[v.rows, 0] <= g[0]) and np.all(rg[v.rows, 1] <= g[1])
    # leading terms (pivot, grade) are distinct and none divides another
    for a, (va, ga) in enumerate(elems):
        for vb, gb in elems[a + 1:]:
            if va.pivot == vb.pivot:
                assert not (ga[0] <= gb[0] and ga[1] <= gb[1]) and not (gb[0] <= ga[0] and gb[1] <= ga[1])
    for z in grid(M.col_grade_list()):
        below = [(v, g) for v, g in elems if g[0] <= z[0] and g[1] <= z[1]]
        vecs = [v.to_dense(m) for v, _ in below]
        image = image_leq(D, M.col_grades, z)
        assert same_span(vecs, image, p)
        assert sorted({v.pivot for v, _ in below}) == pivot_set(image, m, p)


@given(bigraded_matrices())
def test_addition_locality_and_bound(M):
    r = reduce_bigraded(M, kernel_basis=True, trace=True)
    g = M.col_grades
    for k, j, z in r.trace:
        assert g[k, 0] <= z[0] and g[k, 1] <= z[1]
        assert k < j and (g[k, 1], g[k, 0]) <= (g[j, 1], g[j, 0])
    n, m = M.num_cols, M.num_rows
    assert r.additions == len(r.trace) <= n * min(m, n)


def test_unknown_engine():
    with pytest.raises(ValueError):
        reduce_bigraded(two(), engine="gpu")
