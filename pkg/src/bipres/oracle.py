"""Brute-force dense checks: pointwise dimensions and Koszul Betti numbers.

Nothing here touches the sparse reduction code.  Every slice of the module
is computed inside the ambient space K^b of the middle free module, where
all structure maps are inclusions:

    K_w = null space of d1 restricted to columns of grade <= w
    I_w = column space of d2 restricted to columns of grade <= w
    M_w = K_w / I_w

so ranks of the Koszul maps reduce to dimensions of sums and intersections
of these subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import BigradedMatrix, Grade, ValidationError, as_field, colex_argsort


# ------------------------------------------------------------------ dense mod-p


def rref(A, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over Z/p; returns the nonzero rows and pivot columns."""
    A = np.array(A, dtype=np.int64, copy=True) % p
    if A.ndim != 2:
        raise ValueError("expected a 2-d array")
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if not len(nz):
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if len(others):
            A[others] = (A[others] - np.outer(A[others, c], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank_mod_p(A, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace_mod_p(A, p: int) -> np.ndarray:
    """Columns form a basis of {x : A x = 0} over Z/p."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    free = [c for c in range(n) if c not in set(piv)]
    N = np.zeros((n, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        N[f, t] = 1
        for row, c in enumerate(piv):
            N[c, t] = (-R[row, f]) % p
    return N


def span_dim(p: int, *blocks: np.ndarray) -> int:
    """Dimension of the span of the columns of all blocks together."""
    blocks = [b for b in blocks if b.size]
    if not blocks:
        return 0
    return rank_mod_p(np.hstack(blocks), p)


# ------------------------------------------------------------------ module slices


@dataclass
class DenseModuleSlice:
    grade: tuple[int, int]
    kernel: np.ndarray  # columns span K_w inside K^b
    image: np.ndarray  # columns span I_w inside K^b
    dim_kernel: int
    dim_image: int

    @property
    def dim(self) -> int:
        return self.dim_kernel - self.dim_image


class DenseModule:
    """Lazily evaluated slices of ker d1 / im d2 at arbitrary integer grades."""

    def __init__(self, fr):
        self.p = fr.field.p
        self.b = fr.d1.num_cols
        self.D1 = fr.d1.to_dense()
        self.D2 = fr.d2.to_dense()
        self.g1 = fr.d1.col_grades
        self.g2 = fr.d2.col_grades
        self._cache: dict[tuple[int, int], DenseModuleSlice] = {}

    def slice(self, w: Sequence[int]) -> DenseModuleSlice:
        key = (int(w[0]), int(w[1]))
        s = self._cache.get(key)
        if s is not None:
            return s
        m1 = (self.g1[:, 0] <= key[0]) & (self.g1[:, 1] <= key[1])
        m2 = (self.g2[:, 0] <= key[0]) & (self.g2[:, 1] <= key[1])
        if m1.any():
            N = nullspace_mod_p(self.D1[:, m1], self.p)
            K = np.zeros((self.b, N.shape[1]), dtype=np.int64)
            K[m1] = N
        else:
            K = np.zeros((self.b, 0), dtype=np.int64)
        I = self.D2[:, m2] % self.p
        s = DenseModuleSlice(key, K, I, K.shape[1], rank_mod_p(I, self.p))
        self._cache[key] = s
        return s

    def dim(self, w: Sequence[int]) -> int:
        return self.slice(w).dim

    def koszul_betti(self, z: Sequence[int]) -> tuple[int, int, int]:
        x, y = int(z[0]), int(z[1])
        p = self.p
        s00 = self.slice((x, y))
        s10 = self.slice((x - 1, y))
        s01 = self.slice((x, y - 1))
        s11 = self.slice((x - 1, y - 1))
        # (a, b) -> a + b : M10 + M01 -> M_z
        rank_k1 = span_dim(p, s10.kernel, s01.kernel, s00.image) - s00.dim_image
        # m -> (m, -m) : M11 -> M10 + M01; m dies iff it lies in I10 and in I01
        inter = s10.dim_image + s01.dim_image - span_dim(p, s10.image, s01.image)
        ker_k2 = inter - s11.dim_image
        rank_k2 = s11.dim - ker_k2
        beta0 = s00.dim - rank_k1
        beta1 = s10.dim + s01.dim - rank_k1 - rank_k2
        return beta0, beta1, ker_k2


def _axes(fr) -> tuple[np.ndarray, np.ndarray]:
    g = np.vstack([fr.d1.col_grades, fr.d2.col_grades])
    return np.unique(g[:, 0]), np.unique(g[:, 1])


def _grid_axes(grid, fr) -> tuple[np.ndarray, np.ndarray]:
    if grid is None:
        return _axes(fr)
    if isinstance(grid, tuple) and len(grid) == 2 and not isinstance(grid[0], (int, np.integer)):
        xs, ys = grid
    else:
        pts = np.asarray(list(grid), dtype=np.int64).reshape(-1, 2)
        xs, ys = pts[:, 0], pts[:, 1]
    return np.unique(np.asarray(xs, dtype=np.int64)), np.unique(np.asarray(ys, dtype=np.int64))


def oracle_hilbert(fr, grid=None):
    """dim M_z by dense elimination at every point of the grid (default: grid of all column grades).

    `grid` is either an iterable of grades or a pair of coordinate arrays;
    the result lives on the product of its coordinates.
    """
    from .presentation import HilbertFunction

    xs, ys = _grid_axes(grid, fr)
    mod = DenseModule(fr)
    vals = np.array([[mod.dim((x, y)) for y in ys] for x in xs], dtype=np.int64).reshape(len(xs), len(ys))
    return HilbertFunction(xs, ys, vals)


def oracle_betti(fr, grid=None):
    """Bigraded Betti numbers from the Koszul complex at each grid point."""
    from .presentation import BettiTable

    xs, ys = _grid_axes(grid, fr)
    need_x, need_y = _axes(fr)
    if not (np.isin(need_x, xs).all() and np.isin(need_y, ys).all()):
        raise ValidationError("grid does not cover Betti support")
    mod = DenseModule(fr)
    out: tuple[dict, dict, dict] = ({}, {}, {})
    for x in xs:
        for y in ys:
            for i, v in enumerate(mod.koszul_betti((x, y))):
                if v < 0:
                    raise AssertionError("negative Koszul homology dimension")
                if v:
                    out[i][Grade(int(x), int(y))] = v
    return BettiTable(*out)


# ------------------------------------------------------------------ random corpus


def _random_grades(rng, k: int, lo: int, hi: int) -> np.ndarray:
    g = rng.integers(lo, hi + 1, size=(k, 2)).astype(np.int64)
    return g[colex_argsort(g)] if k else np.zeros((0, 2), dtype=np.int64)


def random_firep(rng, max_size: int = 6, grade_range: tuple[int, int] = (0, 4), primes: Iterable[int] = (2, 5), density=None):
    """A random FI-Rep with at most max_size generators in each free module.

    d1 is random subject to homogeneity against random F0 grades; each column
    of d2 is a random element of ker d1 in its grade, so d1 d2 = 0.
    """
    from .presentation import FIRep

    primes = list(primes)
    p = int(primes[rng.integers(len(primes))])
    fld = as_field(p)
    lo, hi = grade_range
    a, b, c = (int(v) for v in rng.integers(0, max_size + 1, size=3))
    dens = rng.uniform(0.2, 0.9) if density is None else density
    g0 = _random_grades(rng, a, lo, hi)
    g1 = _random_grades(rng, b, lo, hi)
    g2 = _random_grades(rng, c, lo, hi)
    D1 = rng.integers(1, p, size=(a, b)) * (rng.random((a, b)) < dens)
    if a and b:
        D1 *= (g0[:, None, 0] <= g1[None, :, 0]) & (g0[:, None, 1] <= g1[None, :, 1])
    D2 = np.zeros((b, c), dtype=np.int64)
    for j in range(c):
        mask = (g1[:, 0] <= g2[j, 0]) & (g1[:, 1] <= g2[j, 1])
        if not mask.any():
            continue
        N = nullspace_mod_p(D1[:, mask], p)
        if N.shape[1] == 0:
            continue
        coef = rng.integers(0, p, size=N.shape[1]) * (rng.random(N.shape[1]) < max(dens, 0.5))
        D2[mask, j] = N @ coef % p
    d1 = BigradedMatrix.from_dense(D1.reshape(a, b), g1, g0, fld)
    d2 = BigradedMatrix.from_dense(D2.reshape(b, c), g2, g1, fld)
    return FIRep(d2, d1)


def compare_with_oracle(fr, engine: str = "fast") -> dict:
    """Run the sparse pipeline and the oracle on fr; report both and whether they agree."""
    from .presentation import run_pipeline

    res = run_pipeline(fr, minimal=False, engine=engine)
    bt = oracle_betti(fr)
    hf = oracle_hilbert(fr)
    return {
        "match": res.betti == bt and res.hilbert == hf,
        "betti": res.betti,
        "oracle_betti": bt,
        "hilbert": res.hilbert,
        "oracle_hilbert": hf,
    }
