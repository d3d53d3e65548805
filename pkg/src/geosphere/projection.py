"""Sphere coordinate conventions and closed-form planar map projections.

Everything lives on the unit sphere, angles are radians and plane
coordinates are in sphere radii.  Longitude is normalized to ``[-pi, pi)``.
All functions broadcast over numpy arrays.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

HALF_PI = np.pi / 2
# cos of the angular distance below which a point counts as on the gnomonic horizon
HORIZON_EPS = 1e-12
SQRT2 = np.sqrt(2.0)


class LonLat(NamedTuple):
    lon: float
    lat: float


class Kind(enum.Enum):
    EQUIRECTANGULAR = "equirectangular"
    MERCATOR = "mercator"
    GALL_PETERS = "gallpeters"
    GNOMONIC = "gnomonic"


@dataclass(frozen=True)
class ProjectionSpec:
    """A projection kind plus its parameters.

    ``center`` is only used by the gnomonic projection (tangent point) and
    ``lat_clamp`` only by Mercator.
    """

    kind: Kind
    center: LonLat = LonLat(0.0, 0.0)
    lat_clamp: float = np.deg2rad(85.0)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "center", LonLat(*self.center))
        if not 0 < self.lat_clamp < HALF_PI:
            raise DomainError("lat_clamp must lie in (0, pi/2)")
        if not -HALF_PI <= self.center.lat <= HALF_PI:
            raise DomainError("center latitude out of range")


def wrap_lon(lon):
    """Map longitudes into ``[-pi, pi)``."""
    lon = np.asarray(lon, dtype=np.float64)
    out = np.mod(lon + np.pi, 2 * np.pi) - np.pi
    out = np.where(out >= np.pi, out - 2 * np.pi, out)
    # values already in range pass through untouched
    out = np.where((lon >= -np.pi) & (lon < np.pi), lon, out)
    return out if out.ndim else float(out)


def lonlat_to_xyz(lon, lat):
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    c = np.cos(lat)
    return np.stack([c * np.cos(lon), c * np.sin(lon), np.sin(lat)], axis=-1)


def xyz_to_lonlat(v, tol=1e-9):
    """Inverse of :func:`lonlat_to_xyz`; the poles get ``lon = 0``."""
    v = np.asarray(v, dtype=np.float64)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    if np.any(np.abs(r - 1.0) > tol):
        raise DomainError("xyz_to_lonlat requires unit vectors")
    lon = np.arctan2(y, x)
    lon = np.where(lon >= np.pi, -np.pi, lon)
    lat = np.arctan2(z, np.hypot(x, y))
    if lon.ndim == 0:
        return float(lon), float(lat)
    return lon, lat


def tangent_frame(lon, lat):
    """Unit east and north vectors at a point.

    At the poles the frame is the limit along the ``lon`` meridian, which is
    why callers pass ``lon = 0`` there.
    """
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    sl, cl = np.sin(lon), np.cos(lon)
    sp, cp = np.sin(lat), np.cos(lat)
    east = np.stack([-sl, cl, np.zeros_like(sl)], axis=-1)
    north = np.stack([-sp * cl, -sp * sl, cp], axis=-1)
    return east, north


def _gnomonic_cos_c(center, lon, lat):
    lon0, lat0 = center
    return (np.sin(lat0) * np.sin(lat)
            + np.cos(lat0) * np.cos(lat) * np.cos(lon - lon0))


def project(spec, lon, lat):
    """Forward projection of ``(lon, lat)`` to plane coordinates ``(x, y)``."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    kind = spec.kind
    if kind is Kind.EQUIRECTANGULAR:
        x, y = lon.copy(), lat.copy()
    elif kind is Kind.MERCATOR:
        if np.any(np.abs(lat) > spec.lat_clamp):
            raise DomainError(
                f"Mercator latitude beyond clamp of {np.rad2deg(spec.lat_clamp):g} deg")
        x, y = lon.copy(), np.log(np.tan(np.pi / 4 + lat / 2))
    elif kind is Kind.GALL_PETERS:
        x, y = lon / SQRT2, SQRT2 * np.sin(lat)
    else:
        lon0, lat0 = spec.center
        cos_c = _gnomonic_cos_c(spec.center, lon, lat)
        if np.any(cos_c <= HORIZON_EPS):
            raise DomainError("gnomonic point at or beyond 90 deg from the center")
        dlon = lon - lon0
        x = np.cos(lat) * np.sin(dlon) / cos_c
        y = (np.cos(lat0) * np.sin(lat)
             - np.sin(lat0) * np.cos(lat) * np.cos(dlon)) / cos_c
    if x.ndim == 0:
        return float(x), float(y)
    return x, y


def unproject(spec, x, y, tol=1e-12):
    """Inverse projection of plane ``(x, y)`` back to ``(lon, lat)``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("plane coordinates must be finite")
    kind = spec.kind
    if kind is Kind.GNOMONIC:
        lon, lat = _gnomonic_inverse(spec.center, x, y)
    else:
        if kind is Kind.EQUIRECTANGULAR:
            lon, lat = x, y.copy()
            xmax, ok = np.pi, np.abs(lat) <= HALF_PI + tol
        elif kind is Kind.MERCATOR:
            lon = x
            lat = 2 * np.arctan(np.exp(y)) - HALF_PI
            xmax, ok = np.pi, np.abs(lat) <= spec.lat_clamp + tol
        else:
            lon = x * SQRT2
            s = y / SQRT2
            xmax, ok = np.pi / SQRT2, np.abs(s) <= 1 + tol
            lat = np.arcsin(np.clip(s, -1.0, 1.0))
        if not np.all(ok) or np.any(np.abs(x) > xmax + tol):
            raise DomainError(f"point outside the image of the {kind.value} projection")
        lat = np.clip(lat, -HALF_PI, HALF_PI)
    lon = wrap_lon(lon)
    if np.ndim(lon) == 0:
        return float(lon), float(lat)
    return lon, lat


def _gnomonic_inverse(center, x, y):
    lon0, lat0 = center
    rho = np.hypot(x, y)
    nu = np.arctan(rho)
    sin_nu, cos_nu = np.sin(nu), np.cos(nu)
    at_center = rho == 0
    safe = np.where(at_center, 1.0, rho)
    s = cos_nu * np.sin(lat0) + y * sin_nu * np.cos(lat0) / safe
    lat = np.arcsin(np.clip(s, -1.0, 1.0))
    lon = lon0 + np.arctan2(x * sin_nu,
                            safe * np.cos(lat0) * cos_nu - y * np.sin(lat0) * sin_nu)
    lat = np.where(at_center, lat0, lat)
    lon = np.where(at_center, lon0, lon)
    return lon, lat
