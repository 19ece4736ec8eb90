"""Density-Rips bifiltrations of finite metric spaces and their FI-Reps.

A simplex enters at bigrade (density rank, diameter rank): the first axis
ranks the vertices from densest (0) to sparsest, using the worst vertex of
the simplex; the second ranks the diameter among all distinct pairwise
distances (0 for vertices).  Both axes are collapsed to integer ranks of
their distinct values, so equal values share a rank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .core import BigradedMatrix, PrimeField, ValidationError, as_field
from .presentation import FIRep


def pairwise_distances(points) -> np.ndarray:
    """Euclidean distance matrix of an n x k point array."""
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValidationError("points must be an n x k array")
    if len(X) < 2:
        return np.zeros((len(X), len(X)))
    return squareform(pdist(X))


def _as_distance_matrix(data, is_distance: bool) -> np.ndarray:
    if not is_distance:
        return pairwise_distances(data)
    D = np.asarray(data, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValidationError("expected a square distance matrix")
    return D


def density(data, r: float, *, include_self: bool = True, is_distance: bool = False) -> np.ndarray:
    """f(x) = number of points within distance r of x.

    `data` is a point array, or a square distance matrix when `is_distance`
    is set.  With include_self=False the point itself is not counted.
    """
    if not r > 0:
        raise ValidationError("radius must be positive")
    D = _as_distance_matrix(data, is_distance)
    f = (D <= r).sum(axis=1)
    return f if include_self else f - 1


def _nonzero_distances(distances) -> np.ndarray:
    A = np.asarray(distances, dtype=float)
    if A.ndim == 2:
        if A.shape[0] != A.shape[1]:
            raise ValidationError("expected a square distance matrix")
        A = A[np.triu_indices(len(A), 1)]
    A = A.ravel()
    return A[A != 0]


def percentile_radius(distances, q: float) -> float:
    """Nearest-rank percentile: the ceil(q N)-th smallest of the N nonzero distances.

    `distances` is a square matrix (upper triangle used) or a flat list of
    pairwise distances.
    """
    if not 0 < q < 1:
        raise ValidationError("percentile must lie strictly between 0 and 1")
    d = _nonzero_distances(distances)
    if not len(d):
        raise ValidationError("no nonzero pairwise distance")
    k = max(1, math.ceil(round(q * len(d), 9)))
    return float(np.partition(d, k - 1)[k - 1])


def annulus_sample(n: int, seed: int = 0) -> np.ndarray:
    """Noisy annulus plus uniform background, deterministic under seed.

    n - n//10 points have radius 2 + 0.3 N(0,1) and uniform angle, with the
    normal variate from the Box-Muller transform cos branch; the remaining
    n//10 are uniform on [-6, 6]^2.  All variates are uniform doubles from
    numpy's PCG64 seeded with `seed`, drawn in the order
    (u1, u2, angle) per annulus point, then (x, y) per background point.
    """
    if n < 10:
        raise ValidationError("annulus sample needs n >= 10")
    n_rect = n // 10
    n_ann = n - n_rect
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random((n_ann, 3))
    gauss = np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
    radius = 2.0 + 0.3 * gauss
    theta = 2.0 * np.pi * u[:, 2]
    ann = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    rect = -6.0 + 12.0 * rng.random((n_rect, 2))
    return np.vstack([ann, rect])


def _ranks(values: np.ndarray, table: np.ndarray) -> np.ndarray:
    return np.searchsorted(table, values).astype(np.int64)


@dataclass
class DensityRipsComplex:
    """Vertices, edges and (optionally) triangles of a density-Rips bifiltration.

    Simplices are stored in colex order of their bigrades, ties broken by the
    lexicographic order of their vertex tuples.  Vertex tuples use the input
    labels, edges/triangles index into the vertex/edge lists.
    """

    dist: np.ndarray
    radius: float
    density: np.ndarray
    density_rank: np.ndarray  # per input vertex
    density_values: np.ndarray  # distinct -f values, rank = position
    diameter_values: np.ndarray  # distinct diameters incl. 0, rank = position
    vertices: np.ndarray  # input labels in filtration order
    vertex_grades: np.ndarray
    edges: np.ndarray  # (E, 2) input vertex labels, i < j
    edge_grades: np.ndarray
    triangles: np.ndarray  # (T, 3) input vertex labels
    triangle_grades: np.ndarray
    max_dim: int = 2

    @property
    def n(self) -> int:
        return len(self.vertices)

    @classmethod
    def build(cls, data, radius: float | None = None, *, percentile: float | None = None, include_self: bool = True,
              max_dim: int = 2, max_diameter: float | None = None, is_distance: bool = False):
        """Build from points or a distance matrix; give exactly one of radius / percentile."""
        D = _as_distance_matrix(data, is_distance)
        n = len(D)
        if n == 0:
            raise ValidationError("empty input")
        if (radius is None) == (percentile is None):
            raise ValidationError("give exactly one of radius and percentile")
        if radius is None:
            radius = percentile_radius(D, percentile)
        f = density(D, radius, include_self=include_self, is_distance=True)
        dvals = np.unique(-f)
        drank = _ranks(-f, dvals)
        iu, ju = np.triu_indices(n, 1)
        dist_e = D[iu, ju]
        diam = np.unique(np.concatenate([[0.0], dist_e]))

        vorder = np.lexsort((np.arange(n), drank))
        vgrades = np.column_stack([drank[vorder], np.zeros(n, dtype=np.int64)])

        e_x = np.maximum(drank[iu], drank[ju])
        e_y = _ranks(dist_e, diam)
        keep = np.ones(len(iu), dtype=bool) if max_diameter is None else dist_e <= max_diameter
        edges = np.column_stack([iu, ju])
        tris = np.zeros((0, 3), dtype=np.int64)
        t_grades = np.zeros((0, 2), dtype=np.int64)
        if max_dim >= 2 and n >= 3:
            T = np.array(list(combinations(range(n), 3)), dtype=np.int64)
            a, b, c = T[:, 0], T[:, 1], T[:, 2]
            t_d = np.maximum(np.maximum(D[a, b], D[a, c]), D[b, c])
            t_x = np.maximum(np.maximum(drank[a], drank[b]), drank[c])
            tkeep = np.ones(len(T), dtype=bool) if max_diameter is None else t_d <= max_diameter
            T, t_d, t_x = T[tkeep], t_d[tkeep], t_x[tkeep]
            order = np.lexsort((np.arange(len(T)), t_x, _ranks(t_d, diam)))
            tris = T[order]
            t_grades = np.column_stack([t_x[order], _ranks(t_d[order], diam)])
        edges, e_x, e_y = edges[keep], e_x[keep], e_y[keep]
        eorder = np.lexsort((np.arange(len(edges)), e_x, e_y))
        return cls(
            dist=D,
            radius=float(radius),
            density=f,
            density_rank=drank,
            density_values=dvals,
            diameter_values=diam,
            vertices=vorder,
            vertex_grades=vgrades,
            edges=edges[eorder] if max_dim >= 1 else np.zeros((0, 2), dtype=np.int64),
            edge_grades=np.column_stack([e_x[eorder], e_y[eorder]]) if max_dim >= 1 else np.zeros((0, 2), dtype=np.int64),
            triangles=tris,
            triangle_grades=t_grades,
            max_dim=max_dim,
        )

    def _edge_lookup(self) -> np.ndarray:
        """(n, n) table: position of edge {i, j} in the edge list, -1 if absent."""
        n = self.n
        pos = np.full((n, n), -1, dtype=np.int64)
        idx = np.arange(len(self.edges))
        pos[self.edges[:, 0], self.edges[:, 1]] = idx
        pos[self.edges[:, 1], self.edges[:, 0]] = idx
        return pos

    def boundary_1(self, field: PrimeField) -> BigradedMatrix:
        """Edges -> vertices; d[i, j] = v_j - v_i for i < j (input labels)."""
        n = self.n
        vpos = np.empty(n, dtype=np.int64)
        vpos[self.vertices] = np.arange(n)
        p = field.p
        rows = np.column_stack([vpos[self.edges[:, 0]], vpos[self.edges[:, 1]]])
        vals = np.column_stack([np.full(len(rows), p - 1), np.ones(len(rows), dtype=np.int64)]) % p
        return _matrix(n, rows, vals, self.edge_grades, self.vertex_grades, field)

    def boundary_2(self, field: PrimeField) -> BigradedMatrix:
        """Triangles -> edges; d[a, b, c] = [b, c] - [a, c] + [a, b]."""
        p = field.p
        pos = self._edge_lookup()
        a, b, c = self.triangles[:, 0], self.triangles[:, 1], self.triangles[:, 2]
        rows = np.column_stack([pos[b, c], pos[a, c], pos[a, b]])
        if np.any(rows < 0):
            raise ValidationError("triangle with a missing edge")
        vals = np.tile(np.array([1, p - 1, 1], dtype=np.int64) % p, (len(rows), 1))
        return _matrix(len(self.edges), rows, vals, self.triangle_grades, self.edge_grades, field)


def _matrix(num_rows, rows, vals, col_grades, row_grades, field) -> BigradedMatrix:
    """Assemble CSC with a fixed number of entries per column, sorting rows within each column."""
    k = rows.shape[1] if rows.ndim == 2 else 0
    order = np.argsort(rows, axis=1, kind="stable")
    rows = np.take_along_axis(rows, order, axis=1)
    vals = np.take_along_axis(vals, order, axis=1)
    n = len(rows)
    indptr = np.arange(n + 1, dtype=np.int64) * k
    return BigradedMatrix(num_rows, indptr, rows.ravel(), vals.ravel(), col_grades, row_grades, field)


def build_firep(cx: DensityRipsComplex, degree: int, field=2) -> FIRep:
    """FI-Rep of the degree-0 or degree-1 homology module of the bifiltration."""
    fld = as_field(field)
    if degree == 0:
        d2 = cx.boundary_1(fld)
        d1 = BigradedMatrix(0, np.zeros(cx.n + 1, dtype=np.int64), [], [], cx.vertex_grades, None, fld)
        return FIRep(d2, d1)
    if degree == 1:
        if cx.max_dim < 2:
            raise ValidationError("degree 1 needs triangles; build the complex with max_dim=2")
        return FIRep(cx.boundary_2(fld), cx.boundary_1(fld))
    raise ValidationError("homology degree must be 0 or 1")
