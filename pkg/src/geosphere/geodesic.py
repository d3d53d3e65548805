"""Icosphere construction and point location.

An order-``n`` icosphere is the regular icosahedron with every triangle split
``n`` times into four, new vertices pushed out to the unit sphere.  Vertices
are ordered so that the first ``10 * 4**(n-1) + 2`` of them are exactly the
vertices of the order ``n - 1`` sphere, and the children of face ``f`` at one
level are faces ``4f .. 4f + 3`` at the next.  Both facts are relied on by the
up/downsampling and by the coarse-to-fine point location.
"""

import functools

import numpy as np

from . import _parallel
from .errors import CapacityError, DimensionError, DomainError, MeshError
from .projection import xyz_to_lonlat

MAX_ORDER = 10

_CHUNK = 1 << 15


def num_vertices(order):
    return 10 * 4**order + 2


def num_faces(order):
    return 20 * 4**order


def num_edges(order):
    return 30 * 4**order


def _icosahedron():
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=np.float64)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    # make every face counter-clockwise seen from outside
    a, b, c = (verts[faces[:, k]] for k in range(3))
    flip = np.einsum("ij,ij->i", np.cross(b - a, c - a), a + b + c) < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return verts, faces


def _subdivide(verts, faces):
    """One 1-to-4 split.  Returns new vertices, faces and the midpoint parents."""
    nv = len(verts)
    e = np.stack([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]], axis=1)
    lo = e.min(axis=2)
    hi = e.max(axis=2)
    keys = lo * nv + hi
    uniq, inverse = np.unique(keys.ravel(), return_inverse=True)
    parents = np.stack([uniq // nv, uniq % nv], axis=1)

    mid = verts[parents[:, 0]] + verts[parents[:, 1]]
    mid /= np.linalg.norm(mid, axis=1, keepdims=True)

    m = (inverse.reshape(-1, 3) + nv).astype(np.int64)
    mab, mbc, mca = m[:, 0], m[:, 1], m[:, 2]
    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    children = np.stack([
        np.stack([a, mab, mca], axis=1),
        np.stack([mab, b, mbc], axis=1),
        np.stack([mca, mbc, c], axis=1),
        np.stack([mab, mbc, mca], axis=1),
    ], axis=1).reshape(-1, 3)
    return np.concatenate([verts, mid]), children, parents


class Icosphere:
    """Subdivided icosahedron on the unit sphere.

    Instances are treated as immutable; derived tables (edges, adjacency,
    lon/lat of vertices) are computed on first access and cached.

    Attributes
    ----------
    order : int
        Number of subdivisions applied to the icosahedron.
    vertices : ndarray, shape (V, 3)
        Unit vectors.
    faces : ndarray, shape (F, 3)
        Vertex indices, counter-clockwise seen from outside.
    face_levels : list of ndarray
        Faces of every order ``0 .. order``; ``face_levels[-1] is faces``.
    midpoint_parents : ndarray, shape (V - 12, 2)
        For vertex ``12 + i`` the sorted pair of edge endpoints it was
        created from.
    """

    def __init__(self, order, vertices, face_levels, midpoint_parents):
        self.order = order
        self.vertices = vertices
        self.face_levels = face_levels
        self.faces = face_levels[-1]
        self.midpoint_parents = midpoint_parents
        for arr in (vertices, midpoint_parents, *face_levels):
            arr.setflags(write=False)

    def __repr__(self):
        return (f"Icosphere(order={self.order}, vertices={self.num_vertices}, "
                f"faces={self.num_faces})")

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_faces(self):
        return len(self.faces)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def coarse_vertex_count(self):
        """Number of vertices shared with the order ``n - 1`` sphere."""
        return num_vertices(self.order - 1) if self.order > 0 else 0

    @functools.cached_property
    def edges(self):
        """Undirected edges as sorted index pairs, in ascending order."""
        f = self.faces
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        e.sort(axis=1)
        nv = self.num_vertices
        keys = np.unique(e[:, 0] * nv + e[:, 1])
        e = np.stack([keys // nv, keys % nv], axis=1)
        e.setflags(write=False)
        return e

    @functools.cached_property
    def _edge_csr(self):
        e = self.edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.num_vertices + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.num_vertices), out=indptr[1:])
        return indptr, dst[order]

    @functools.cached_property
    def _face_csr(self):
        f = self.faces.ravel()
        fid = np.repeat(np.arange(self.num_faces), 3)
        order = np.lexsort((fid, f))
        indptr = np.zeros(self.num_vertices + 1, dtype=np.int64)
        np.cumsum(np.bincount(f, minlength=self.num_vertices), out=indptr[1:])
        return indptr, fid[order]

    @property
    def edge_adjacency(self):
        """Per-vertex sorted neighbour indices."""
        indptr, idx = self._edge_csr
        return [idx[indptr[i]:indptr[i + 1]] for i in range(self.num_vertices)]

    @property
    def face_adjacency(self):
        """Per-vertex sorted indices of incident faces."""
        indptr, idx = self._face_csr
        return [idx[indptr[i]:indptr[i + 1]] for i in range(self.num_vertices)]

    def neighbors(self, i):
        indptr, idx = self._edge_csr
        return idx[indptr[i]:indptr[i + 1]]

    def incident_faces(self, i):
        indptr, idx = self._face_csr
        return idx[indptr[i]:indptr[i + 1]]

    @property
    def degrees(self):
        return np.diff(self._edge_csr[0])

    @functools.cached_property
    def lonlat(self):
        """Vertex longitudes and latitudes in radians, shape (V, 2)."""
        lon, lat = xyz_to_lonlat(self.vertices)
        out = np.stack([lon, lat], axis=1)
        out.setflags(write=False)
        return out

    @functools.cached_property
    def _opposite_normals(self):
        # row k: cross product of the two corners other than k, so that the
        # triple product with p is proportional to the barycentric weight k
        out = []
        for f in self.face_levels:
            a, b, c = (self.vertices[f[:, k]] for k in range(3))
            out.append(np.stack([np.cross(b, c), np.cross(c, a), np.cross(a, b)], axis=1))
        return out

    def locate(self, points, threads=None):
        """Vectorized :func:`locate_point` for an (N, 3) array of unit vectors.

        Returns
        -------
        faces : ndarray of int64, shape (N,)
        weights : ndarray, shape (N, 3)
            Barycentric weights of the ray/face intersection, aligned with
            the corners in ``self.faces[faces]``.
        """
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise DimensionError(f"expected (N, 3) points, got {points.shape}")
        n = len(points)
        faces = np.empty(n, dtype=np.int64)
        weights = np.empty((n, 3))

        normals = self._opposite_normals

        def work(lo, hi):
            faces[lo:hi], weights[lo:hi] = _locate_chunk(normals, points[lo:hi])

        _parallel.for_chunks(work, n, _CHUNK, threads)
        return faces, weights



def _locate_chunk(normals, p):
    n = len(p)
    rows = np.arange(n)
    d = np.einsum("ckj,nj->nck", normals[0], p)
    face = _pick_face(d)
    dets = d[rows, face]
    for level in range(1, len(normals)):
        cand = 4 * face[:, None] + np.arange(4)
        d = np.einsum("nckj,nj->nck", normals[level][cand], p)
        pick = _pick_face(d)
        face = cand[rows, pick]
        dets = d[rows, pick]
    if not np.all(np.isfinite(dets)):
        raise MeshError("point location produced non-finite weights")
    dets = np.maximum(dets, 0.0)
    total = dets.sum(axis=1)
    if np.any(total <= 0):
        raise MeshError("no containing face found; mesh is corrupt")
    return face, dets / total[:, None]


def _pick_face(d):
    """Index of the first candidate containing the point, else the closest."""
    mind = d.min(axis=-1)
    inside = mind >= 0
    first = np.argmax(inside, axis=-1)
    best = np.argmax(mind, axis=-1)
    return np.where(inside.any(axis=-1), first, best)


def build_icosphere(order, max_order=MAX_ORDER):
    """Build the order-``order`` icosphere.

    Raises
    ------
    CapacityError
        If ``order`` exceeds ``max_order``.
    """
    if not isinstance(order, (int, np.integer)) or order < 0:
        raise DomainError(f"order must be a non-negative integer, got {order!r}")
    if order > max_order:
        raise CapacityError(
            f"order {order} exceeds the memory guard of {max_order} "
            f"({num_vertices(order)} vertices)")
    verts, faces = _icosahedron()
    levels = [faces]
    parents = []
    for _ in range(order):
        verts, faces, par = _subdivide(verts, faces)
        levels.append(faces)
        parents.append(par)
    if parents:
        parents = np.concatenate(parents)
    else:
        parents = np.empty((0, 2), dtype=np.int64)
    return Icosphere(int(order), verts, levels, parents)


def mean_edge_angle(sphere):
    """Mean great-circle angle (radians) over all undirected edges."""
    e = sphere.edges
    a = sphere.vertices[e[:, 0]]
    b = sphere.vertices[e[:, 1]]
    sin = np.linalg.norm(np.cross(a, b), axis=1)
    cos = np.einsum("ij,ij->i", a, b)
    return float(np.mean(np.arctan2(sin, cos)))


def locate_point(sphere, p):
    """Face whose radial cone contains unit vector ``p``, with barycentric weights.

    Points on an edge shared by several faces resolve to the lowest face index.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (3,):
        raise DimensionError(f"expected a 3-vector, got shape {p.shape}")
    if abs(np.linalg.norm(p) - 1.0) > 1e-9:
        raise DomainError("point is not on the unit sphere")
    face, w = sphere.locate(p[None])
    return int(face[0]), w[0]


def write_off(sphere, path):
    """Write the mesh as ASCII OFF."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("OFF\n")
        fh.write(f"{sphere.num_vertices} {sphere.num_faces} {sphere.num_edges}\n")
        np.savetxt(fh, sphere.vertices, fmt="%.17g")
        np.savetxt(fh, np.column_stack([np.full(sphere.num_faces, 3), sphere.faces]),
                   fmt="%d")


def read_off(path):
    """Read an OFF file written by :func:`write_off` into (vertices, faces)."""
    with open(path, encoding="ascii") as fh:
        if fh.readline().strip() != "OFF":
            raise ValueError(f"{path}: missing OFF header")
        nv, nf, _ = (int(x) for x in fh.readline().split())
        verts = np.loadtxt(fh, max_rows=nv, ndmin=2)
        faces = np.loadtxt(fh, max_rows=nf, dtype=np.int64, ndmin=2)
    return verts, faces[:, 1:]
