"""Dense mod-p helpers shared by the tests (independent of the sparse engines)."""

import numpy as np

from bipres.oracle import nullspace_mod_p, rank_mod_p, rref


def leq_mask(grades, z):
    grades = np.asarray(grades).reshape(-1, 2)
    return (grades[:, 0] <= z[0]) & (grades[:, 1] <= z[1])


def span_rank(vectors, p):
    """Rank of a list of 1-d vectors."""
    if not len(vectors):
        return 0
    return rank_mod_p(np.array(vectors, dtype=np.int64), p)


def same_span(U, V, p):
    """U and V are lists of vectors; True if they span the same subspace."""
    ru, rv = span_rank(U, p), span_rank(V, p)
    return ru == rv == span_rank(list(U) + list(V), p)


def pivot_set(vectors, dim, p):
    """{max index of support of v : v in span(vectors)} as a sorted list."""
    if not len(vectors) or dim == 0:
        return []
    A = np.array(vectors, dtype=np.int64).reshape(-1, dim)[:, ::-1]
    _, piv = rref(A, p)
    return sorted(dim - 1 - c for c in piv)


def null_basis_leq(D, grades, z, p):
    """Null space of D restricted to columns <= z, embedded in K^n (as rows)."""
    n = D.shape[1]
    mask = leq_mask(grades, z)
    if not mask.any():
        return []
    N = nullspace_mod_p(D[:, mask], p)
    out = np.zeros((N.shape[1], n), dtype=np.int64)
    out[:, mask] = N.T
    return list(out)


def image_leq(D, grades, z):
    mask = leq_mask(grades, z)
    return list(D[:, mask].T)
