"""Kernel sampling patterns and convolution on icosphere vertex signals.

A convolution is split into a sampling step and a weighted sum.  The sampling
step is precomputed once per (sphere, kernel geometry) as a
:class:`SamplingOperator`: for every vertex and kernel tap, the face the tap
falls in and the barycentric weights of its three corners.  The planar kernel
grid is placed on the sphere with an inverse gnomonic projection whose
tangent frame has "up" pointing to local north.
"""

from dataclasses import dataclass

import numpy as np

from . import _parallel
from .errors import DimensionError, DomainError
from .geodesic import mean_edge_angle
from .projection import HALF_PI, LonLat, lonlat_to_xyz, wrap_lon
from .projection import _gnomonic_inverse
from .resample import SphereSignal, barycentric_blend

_CHUNK = 1 << 14


def _check_dims(kh, kw, spacing):
    for name, v in (("kh", kh), ("kw", kw)):
        if int(v) != v or v < 1 or v % 2 == 0:
            raise DomainError(f"{name} must be an odd positive integer, got {v}")
    if not spacing > 0:
        raise DomainError("spacing must be positive")


def tap_offsets(kh, kw):
    """Row-major ``(m, n)`` tap indices; ``m`` counts north, ``n`` east."""
    m = np.arange(kh) - kh // 2
    n = np.arange(kw) - kw // 2
    mm, nn = np.meshgrid(m, n, indexing="ij")
    return mm.ravel(), nn.ravel()


@dataclass(frozen=True)
class KernelPattern:
    center: LonLat
    m: np.ndarray
    n: np.ndarray
    lon: np.ndarray
    lat: np.ndarray

    @property
    def xyz(self):
        return lonlat_to_xyz(self.lon, self.lat)


def _pole_lon(lon, lat):
    return np.where(np.abs(lat) >= HALF_PI, 0.0, lon)


def gnomonic_taps(lon0, lat0, kh, kw, spacing):
    """Gnomonic tap positions for many centers at once, each of shape ``(N, T)``."""
    _check_dims(kh, kw, spacing)
    if max(kh // 2, kw // 2) * spacing >= HALF_PI:
        raise DomainError("kernel spacing too large: taps would leave the hemisphere")
    m, n = tap_offsets(kh, kw)
    lat0 = np.asarray(lat0, dtype=np.float64)[..., None]
    lon0 = _pole_lon(np.asarray(lon0, dtype=np.float64)[..., None], lat0)
    lon, lat = _gnomonic_inverse((lon0, lat0), n * spacing, m * spacing)
    return wrap_lon(lon), lat


def gnomonic_pattern(center, kh, kw, spacing):
    """Kernel taps placed by inverse gnomonic projection around ``center``.

    Tap ``(m, n)`` sits at plane coordinates ``(n * spacing, m * spacing)`` of
    the tangent plane at ``center``.
    """
    center = LonLat(*center)
    lon, lat = gnomonic_taps(center.lon, center.lat, kh, kw, spacing)
    m, n = tap_offsets(kh, kw)
    return KernelPattern(center, m, n, lon, lat)


def equirect_pattern(center, kh, kw, spacing):
    """Kernel taps with constant latitude steps and arc-length-preserving
    longitude steps, as a kernel drawn on an equirectangular image would be.
    """
    center = LonLat(*center)
    _check_dims(kh, kw, spacing)
    m, n = tap_offsets(kh, kw)
    lat = center.lat + m * spacing
    if np.any(np.abs(lat) >= HALF_PI):
        raise DomainError("equirectangular kernel row reaches a pole")
    lon = wrap_lon(center.lon + n * spacing / np.cos(lat))
    return KernelPattern(center, m, n, lon, lat.astype(np.float64))


def great_circle(lon1, lat1, lon2, lat2):
    a = lonlat_to_xyz(lon1, lat1)
    b = lonlat_to_xyz(lon2, lat2)
    return np.arctan2(np.linalg.norm(np.cross(a, b), axis=-1),
                      np.einsum("...j,...j->...", a, b))


@dataclass(frozen=True, eq=False)
class SamplingOperator:
    """Per-vertex, per-tap face ids, corner ids and barycentric weights.

    Arrays are structure-of-arrays: ``face`` is ``(V, T)``, ``corners`` and
    ``weights`` are ``(V, T, 3)``.
    """

    order: int
    kh: int
    kw: int
    spacing: float
    face: np.ndarray
    corners: np.ndarray
    weights: np.ndarray

    @property
    def taps_per_vertex(self):
        return self.kh * self.kw

    @property
    def num_vertices(self):
        return self.face.shape[0]

    def gather(self, sig):
        """Interpolated signal values at every tap, shape ``(V, T, C)``."""
        if sig.order != self.order:
            raise DimensionError(
                f"operator is for order {self.order}, signal has order {sig.order}")
        return barycentric_blend(sig.data[self.corners], self.weights)


def build_operator(sphere, kh, kw, spacing=None, threads=None):
    """Precompute the tap sampling of a ``kh x kw`` gnomonic kernel at every vertex.

    ``spacing`` defaults to the mean edge angle of ``sphere``.  The central tap
    of each vertex is snapped to that vertex with weight exactly 1.
    """
    if spacing is None:
        spacing = mean_edge_angle(sphere)
    spacing = float(spacing)
    _check_dims(kh, kw, spacing)
    nv = sphere.num_vertices
    t = kh * kw
    face = np.empty((nv, t), dtype=np.int64)
    weights = np.empty((nv, t, 3))
    lonlat = sphere.lonlat

    def work(lo, hi):
        lon, lat = gnomonic_taps(lonlat[lo:hi, 0], lonlat[lo:hi, 1], kh, kw, spacing)
        f, w = sphere.locate(lonlat_to_xyz(lon, lat).reshape(-1, 3), threads=1)
        face[lo:hi] = f.reshape(hi - lo, t)
        weights[lo:hi] = w.reshape(hi - lo, t, 3)

    _parallel.for_chunks(work, nv, _CHUNK, threads)
    corners = sphere.faces[face]

    center = (kh // 2) * kw + kw // 2
    vid = np.arange(nv)
    slot = corners[:, center] == vid[:, None]
    missing = ~slot.any(axis=1)
    for v in np.flatnonzero(missing):
        f = sphere.incident_faces(v)[0]
        face[v, center] = f
        corners[v, center] = sphere.faces[f]
        slot[v] = corners[v, center] == v
    weights[:, center] = slot.astype(np.float64)

    return SamplingOperator(sphere.order, kh, kw, spacing, face, corners, weights)


@dataclass(frozen=True)
class Kernel:
    """Convolution weights of shape ``(kh, kw, c_in, c_out)``."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim == 2:
            w = w[:, :, None, None]
        if w.ndim != 4:
            raise DimensionError("kernel weights must have shape (kh, kw, c_in, c_out)")
        _check_dims(w.shape[0], w.shape[1], 1.0)
        object.__setattr__(self, "weights", w)

    @property
    def kh(self):
        return self.weights.shape[0]

    @property
    def kw(self):
        return self.weights.shape[1]

    @property
    def c_in(self):
        return self.weights.shape[2]

    @property
    def c_out(self):
        return self.weights.shape[3]

    @classmethod
    def identity(cls, kh, kw, channels):
        w = np.zeros((kh, kw, channels, channels))
        w[kh // 2, kw // 2] = np.eye(channels)
        return cls(w)


def convolve(op, sig, kernel):
    """Gather taps through ``op`` and sum them with ``kernel`` weights.

    ``out[v, o] = sum_t sum_i kernel[t, i, o] * gathered[v, t, i]`` with a fixed
    accumulation order, so results do not depend on threading or BLAS.
    """
    if (kernel.kh, kernel.kw) != (op.kh, op.kw):
        raise DimensionError(
            f"kernel is {kernel.kh}x{kernel.kw}, operator is {op.kh}x{op.kw}")
    if kernel.c_in != sig.channels:
        raise DimensionError(
            f"kernel expects {kernel.c_in} channels, signal has {sig.channels}")
    g = op.gather(sig)
    k = kernel.weights.reshape(op.taps_per_vertex, kernel.c_in, kernel.c_out)
    out = np.zeros((g.shape[0], kernel.c_out))
    for t in range(op.taps_per_vertex):
        for i in range(kernel.c_in):
            out += g[:, t, i, None] * k[t, i]
    return SphereSignal(sig.sphere, out)


def downsample(sig, target):
    """Restrict a signal to the order ``n - 1`` sphere (its vertex prefix)."""
    if target.order != sig.order - 1:
        raise DimensionError(
            f"downsample goes from order {sig.order} to {sig.order - 1}, "
            f"not {target.order}")
    return SphereSignal(target, sig.data[:target.num_vertices].copy())


def upsample(sig, target):
    """Extend a signal to the order ``n + 1`` sphere.

    Coarse vertices keep their value, each edge midpoint gets the mean of its
    two endpoints.
    """
    if target.order != sig.order + 1:
        raise DimensionError(
            f"upsample goes from order {sig.order} to {sig.order + 1}, "
            f"not {target.order}")
    nc = sig.sphere.num_vertices
    parents = target.midpoint_parents[nc - 12:]
    mid = (sig.data[parents[:, 0]] + sig.data[parents[:, 1]]) / 2
    return SphereSignal(target, np.concatenate([sig.data, mid]))


def icosahedral_rotations(sphere):
    """The 60 rotations mapping the base icosahedron of ``sphere`` onto itself."""
    v = sphere.vertices[:12]
    # icosahedron neighbours sit at cos(angle) = 1/sqrt(5)
    adjacent = np.abs(v @ v.T - 1 / np.sqrt(5)) < 1e-9
    a = 0
    b = int(np.flatnonzero(adjacent[0])[0])

    def frame(p, q):
        e1 = p
        e2 = q - np.dot(q, p) * p
        e2 /= np.linalg.norm(e2)
        return np.column_stack([e1, e2, np.cross(e1, e2)])

    ref = frame(v[a], v[b])
    rots = []
    for i in range(12):
        for j in np.flatnonzero(adjacent[i]):
            rots.append(frame(v[i], v[j]) @ ref.T)
    return np.array(rots)


def vertex_permutation(sphere, rotation):
    """Index ``perm`` with ``R @ vertices[i]`` closest to ``vertices[perm[i]]``."""
    from scipy.spatial import cKDTree

    rotated = sphere.vertices @ np.asarray(rotation).T
    _, perm = cKDTree(sphere.vertices).query(rotated)
    return perm


def rotate_signal(sig, rotation):
    """Move a vertex signal by a symmetry rotation of its sphere."""
    perm = vertex_permutation(sig.sphere, rotation)
    data = np.empty_like(sig.data)
    data[perm] = sig.data
    return SphereSignal(sig.sphere, data)
