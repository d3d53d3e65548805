"""Tissot indicatrix analysis of map projections and of the icosphere faces.

Scale factors come from analytic partial derivatives of each projection.
``h`` is the scale along the meridian, ``k`` along the parallel and
``theta_prime`` the angle between the projected meridian and parallel; the
indicatrix semi-axes follow from the classic identities

    a + b = sqrt(h^2 + k^2 + 2 h k sin(theta'))
    a - b = sqrt(h^2 + k^2 - 2 h k sin(theta'))
"""

import csv
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import DomainError
from .projection import HALF_PI, HORIZON_EPS, SQRT2, Kind, lonlat_to_xyz, tangent_frame, xyz_to_lonlat

CSV_HEADER = ("lon", "lat", "h", "k", "theta_prime", "a", "b", "area_scale", "omega")


@dataclass(frozen=True)
class TissotSample:
    """Indicatrix parameters at one point, or at many (array-valued fields)."""

    lon: np.ndarray
    lat: np.ndarray
    h: np.ndarray
    k: np.ndarray
    theta_prime: np.ndarray
    a: np.ndarray
    b: np.ndarray
    area_scale: np.ndarray
    omega: np.ndarray

    def __len__(self):
        return np.size(self.lon)

    def __getitem__(self, idx):
        return TissotSample(*(np.asarray(getattr(self, f.name))[idx] for f in fields(self)))

    def rows(self):
        """Iterate over scalar samples."""
        cols = [np.atleast_1d(getattr(self, f.name)) for f in fields(self)]
        for vals in zip(*cols):
            yield TissotSample(*(float(v) for v in vals))

    def to_array(self):
        return np.column_stack([np.atleast_1d(getattr(self, n)) for n in CSV_HEADER])


def _from_hk(lon, lat, h, k, theta_prime):
    sin_t = np.sin(theta_prime)
    hk = h * k * sin_t
    s = np.sqrt(np.maximum(h * h + k * k + 2 * hk, 0.0))
    d = np.sqrt(np.maximum(h * h + k * k - 2 * hk, 0.0))
    a = (s + d) / 2
    b = (s - d) / 2
    omega = 2 * np.arcsin(np.clip(d / s, 0.0, 1.0))
    out = TissotSample(lon, lat, h, k, theta_prime, a, b, a * b, omega)
    if np.ndim(lon) == 0:
        out = TissotSample(*(float(getattr(out, f.name)) for f in fields(out)))
    return out


def _from_partials(lon, lat, d_lat, d_lon_unit):
    """Build samples from derivative vectors per unit arc length north and east."""
    h = np.hypot(*d_lat)
    k = np.hypot(*d_lon_unit)
    cross = np.abs(d_lat[0] * d_lon_unit[1] - d_lat[1] * d_lon_unit[0])
    dot = d_lat[0] * d_lon_unit[0] + d_lat[1] * d_lon_unit[1]
    return _from_hk(lon, lat, h, k, np.arctan2(cross, dot))


def projection_partials(spec, lon, lat):
    """Analytic ``(dx/dlat, dy/dlat), (dx/dlon, dy/dlon)`` of a projection."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    zero = np.zeros(np.broadcast(lon, lat).shape)
    one = zero + 1.0
    kind = spec.kind
    if kind is Kind.EQUIRECTANGULAR:
        return (zero, one), (one, zero)
    if kind is Kind.MERCATOR:
        if np.any(np.abs(lat) > spec.lat_clamp):
            raise DomainError("Mercator latitude beyond clamp")
        return (zero, one / np.cos(lat)), (one, zero)
    if kind is Kind.GALL_PETERS:
        return (zero, SQRT2 * np.cos(lat)), (one / SQRT2, zero)

    lon0, lat0 = spec.center
    s0, c0 = np.sin(lat0), np.cos(lat0)
    sp, cp = np.sin(lat), np.cos(lat)
    dl = lon - lon0
    sd, cd = np.sin(dl), np.cos(dl)
    den = s0 * sp + c0 * cp * cd
    if np.any(den <= HORIZON_EPS):
        raise DomainError("gnomonic point at or beyond 90 deg from the center")
    den_lat = s0 * cp - c0 * sp * cd
    den_lon = -c0 * cp * sd
    nx, ny = cp * sd, c0 * sp - s0 * cp * cd
    nx_lat, nx_lon = -sp * sd, cp * cd
    ny_lat, ny_lon = c0 * cp + s0 * sp * cd, s0 * cp * sd
    den2 = den * den
    return (
        ((nx_lat * den - nx * den_lat) / den2, (ny_lat * den - ny * den_lat) / den2),
        ((nx_lon * den - nx * den_lon) / den2, (ny_lon * den - ny * den_lon) / den2),
    )


def tissot_at(spec, lon, lat):
    """Tissot indicatrix of ``spec`` at ``(lon, lat)`` (scalars or arrays).

    Raises
    ------
    DomainError
        At the poles, where the parallel scale is undefined, or outside the
        projection's domain.
    """
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    cos_lat = np.cos(lat)
    if np.any(np.abs(lat) >= HALF_PI) or np.any(cos_lat <= 0):
        raise DomainError("Tissot indicatrix is undefined at the poles")
    d_lat, d_lon = projection_partials(spec, lon, lat)
    d_lon_unit = (d_lon[0] / cos_lat, d_lon[1] / cos_lat)
    if lon.ndim == 0:
        lon, lat = float(lon), float(lat)
        d_lat = tuple(float(v) for v in d_lat)
        d_lon_unit = tuple(float(v) for v in d_lon_unit)
    return _from_partials(lon, lat, d_lat, d_lon_unit)


@dataclass(frozen=True)
class TissotGrid:
    samples: TissotSample
    skipped: list = field(default_factory=list)


def grid_points(lon_steps, lat_steps):
    """Regular lon/lat grid, row-major by latitude then longitude.

    Longitudes start at ``-pi`` and cover the half-open circle; latitudes run
    from pole to pole inclusive (a single latitude step gives the equator).
    """
    if lon_steps < 1 or lat_steps < 1:
        raise DomainError("grid steps must be >= 1")
    lons = -np.pi + 2 * np.pi * np.arange(lon_steps) / lon_steps
    lats = np.linspace(-HALF_PI, HALF_PI, lat_steps) if lat_steps > 1 else np.zeros(1)
    lat_g, lon_g = np.meshgrid(lats, lons, indexing="ij")
    return lon_g.ravel(), lat_g.ravel()


def tissot_grid(spec, lon_steps, lat_steps):
    """Evaluate :func:`tissot_at` on a regular grid.

    Points where the indicatrix is undefined (poles, outside the projection
    domain) are left out and listed in ``skipped`` as ``(lon, lat, reason)``.
    """
    lon, lat = grid_points(lon_steps, lat_steps)
    keep = np.ones(len(lon), dtype=bool)
    reasons = {}
    pole = np.abs(lat) >= HALF_PI
    keep &= ~pole
    for i in np.flatnonzero(pole):
        reasons[i] = "pole"
    if spec.kind is Kind.MERCATOR:
        bad = keep & (np.abs(lat) > spec.lat_clamp)
        reasons.update((i, "beyond Mercator clamp") for i in np.flatnonzero(bad))
        keep &= ~bad
    elif spec.kind is Kind.GNOMONIC:
        lon0, lat0 = spec.center
        cos_c = (np.sin(lat0) * np.sin(lat)
                 + np.cos(lat0) * np.cos(lat) * np.cos(lon - lon0))
        bad = keep & (cos_c <= HORIZON_EPS)
        reasons.update((i, "outside gnomonic hemisphere") for i in np.flatnonzero(bad))
        keep &= ~bad
    samples = tissot_at(spec, lon[keep], lat[keep])
    skipped = [(float(lon[i]), float(lat[i]), reasons[i]) for i in sorted(reasons)]
    return TissotGrid(samples, skipped)


def interior_barycentric(samples_per_face):
    """Deterministic interior barycentric sample points, centroid first.

    Points come from the smallest triangular lattice with enough strictly
    interior nodes, ordered by distance from the centroid.
    """
    if samples_per_face < 1:
        raise DomainError("samples_per_face must be >= 1")
    n = 3
    while (n - 1) * (n - 2) // 2 < samples_per_face:
        n += 1
    pts = np.array([(i, j, n - i - j)
                    for i in range(1, n) for j in range(1, n - i)], dtype=np.float64) / n
    dist = np.linalg.norm(pts - 1.0 / 3.0, axis=1)
    order = np.lexsort((-pts[:, 2], -pts[:, 1], -pts[:, 0], np.round(dist, 12)))
    return pts[order[:samples_per_face]]


def _face_planes(sphere):
    f = sphere.faces
    a, b, c = (sphere.vertices[f[:, k]] for k in range(3))
    normal = np.cross(b - a, c - a)
    normal /= np.linalg.norm(normal, axis=1, keepdims=True)
    dist = np.einsum("ij,ij->i", normal, a)
    return normal, dist


def radial_map_partials(normal, dist, p, east, north):
    """Derivatives of the radial map ``p -> dist * p / (normal . p)``.

    Returned as 3D vectors in the face plane, per unit arc length along
    ``north`` and ``east``.
    """
    np_ = np.einsum("...j,...j->...", normal, p)[..., None]

    def along(t):
        nt = np.einsum("...j,...j->...", normal, t)[..., None]
        return dist[..., None] * (t / np_ - p * nt / (np_ * np_))

    return along(north), along(east)


@dataclass(frozen=True)
class IcosphereDistortion:
    samples: TissotSample
    face: np.ndarray
    stats: dict


def tissot_icosphere(sphere, samples_per_face=1):
    """Distortion of the per-face radial map from the sphere onto each planar face.

    Axis lengths are normalized so that the centroid of an order-0 face has
    ``a = b = 1``.  ``stats`` holds min/max/mean of ``a/b`` and
    ``area_scale`` plus ``area_ratio = max/min area_scale``.
    """
    bary = interior_barycentric(samples_per_face)
    f = sphere.faces
    corners = sphere.vertices[f]                       # (F, 3, 3)
    q = np.einsum("sk,fkj->fsj", bary, corners)        # planar points
    p = q / np.linalg.norm(q, axis=-1, keepdims=True)
    normal, dist = _face_planes(sphere)
    nf, ns = p.shape[:2]
    normal = np.repeat(normal, ns, axis=0)
    dist = np.repeat(dist, ns)
    p = p.reshape(-1, 3)
    lon, lat = xyz_to_lonlat(p)
    pole = np.abs(lat) >= HALF_PI
    east, north = tangent_frame(np.where(pole, 0.0, lon), lat)

    d_north, d_east = radial_map_partials(normal, dist, p, east, north)
    h = np.linalg.norm(d_north, axis=1)
    k = np.linalg.norm(d_east, axis=1)
    cross = np.linalg.norm(np.cross(d_north, d_east), axis=1)
    dot = np.einsum("ij,ij->i", d_north, d_east)
    unit = _order0_centroid_scale()
    raw = _from_hk(lon, lat, h / unit, k / unit, np.arctan2(cross, dot))

    ratio = raw.a / raw.b
    stats = {
        "a_over_b_min": float(ratio.min()),
        "a_over_b_max": float(ratio.max()),
        "a_over_b_mean": float(ratio.mean()),
        "area_scale_min": float(raw.area_scale.min()),
        "area_scale_max": float(raw.area_scale.max()),
        "area_scale_mean": float(raw.area_scale.mean()),
    }
    stats["area_ratio"] = stats["area_scale_max"] / stats["area_scale_min"]
    face_ids = np.repeat(np.arange(nf), ns)
    return IcosphereDistortion(raw, face_ids, stats)


def _order0_centroid_scale():
    # plane distance of an icosahedron face = cos of the centre-to-vertex angle
    from .geodesic import build_icosphere

    ico = build_icosphere(0)
    a, b, c = ico.vertices[ico.faces[0]]
    n = np.cross(b - a, c - a)
    return float(np.dot(n, a) / np.linalg.norm(n))


def write_csv(samples, path_or_file):
    """Write samples as CSV with 17 significant digits."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="", encoding="ascii") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in samples.to_array():
            w.writerow([f"{v:.17g}" for v in row])
    finally:
        if own:
            fh.close()
