"""Resampling between equirectangular rasters and icosphere vertex signals.

Raster pixel ``(i, j)`` of an ``H x W`` image has its center at

    lon = (j + 0.5) / W * 2 pi - pi,    lat = pi / 2 - (i + 0.5) / H * pi

Pulling raster values onto vertices is bilinear over pixel centers (wrapping
in longitude, clamping latitude to the outermost row centers).  Pulling vertex
values onto pixels uses barycentric interpolation on the containing face.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .projection import lonlat_to_xyz


@dataclass(frozen=True, eq=False)
class SphereSignal:
    """A ``C``-channel field sampled at the vertices of ``sphere``.

    ``data`` has shape ``(V, C)``.
    """

    sphere: object
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] != self.sphere.num_vertices:
            raise DimensionError(
                f"signal of shape {data.shape} does not fit a sphere with "
                f"{self.sphere.num_vertices} vertices")
        if not np.all(np.isfinite(data)):
            raise DomainError("sphere signals must be finite")
        object.__setattr__(self, "data", data)

    @property
    def order(self):
        return self.sphere.order

    @property
    def channels(self):
        return self.data.shape[1]


def _as_image(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3 or img.size == 0:
        raise DimensionError(f"expected an (H, W[, C]) image, got shape {img.shape}")
    if img.shape[0] < 2 or img.shape[1] < 2:
        raise DimensionError("equirectangular images need H, W >= 2")
    return img


def pixel_centers(height, width):
    """Longitudes (length W) and latitudes (length H) of pixel centers."""
    lon = (np.arange(width) + 0.5) / width * 2 * np.pi - np.pi
    lat = np.pi / 2 - (np.arange(height) + 0.5) / height * np.pi
    return lon, lat


def sample_equirect(img, lon, lat, mode="bilinear"):
    """Sample an ``(H, W, C)`` raster at arbitrary ``lon``/``lat`` arrays."""
    img = _as_image(img)
    h, w = img.shape[:2]
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    u = (lon + np.pi) / (2 * np.pi) * w - 0.5
    v = np.clip((np.pi / 2 - lat) / np.pi * h - 0.5, 0.0, h - 1.0)
    if mode == "nearest":
        j = np.mod(np.floor(u + 0.5).astype(np.int64), w)
        i = np.clip(np.floor(v + 0.5).astype(np.int64), 0, h - 1)
        return img[i, j]
    if mode != "bilinear":
        raise ValueError(f"unknown mode {mode!r}")

    j0 = np.floor(u)
    fx = (u - j0)[..., None]
    j0 = np.mod(j0.astype(np.int64), w)
    j1 = np.mod(j0 + 1, w)
    i0 = np.minimum(np.floor(v).astype(np.int64), h - 2)
    fy = (v - i0)[..., None]
    i1 = i0 + 1
    p00, p01 = img[i0, j0], img[i0, j1]
    p10, p11 = img[i1, j0], img[i1, j1]
    top = p00 + fx * (p01 - p00)
    bot = p10 + fx * (p11 - p10)
    out = top + fy * (bot - top)
    lo = np.minimum(np.minimum(p00, p01), np.minimum(p10, p11))
    hi = np.maximum(np.maximum(p00, p01), np.maximum(p10, p11))
    return np.clip(out, lo, hi)


def equirect_to_sphere(img, sphere, mode="bilinear"):
    """Resample an equirectangular raster onto the vertices of ``sphere``.

    Use ``mode="nearest"`` for class-id maps.
    """
    lonlat = sphere.lonlat
    data = sample_equirect(img, lonlat[:, 0], lonlat[:, 1], mode=mode)
    return SphereSignal(sphere, data)


def pixel_lookup(sphere, height, width, threads=None):
    """Containing face and barycentric weights for every pixel center.

    Returns faces of shape ``(H * W,)`` and weights of shape ``(H * W, 3)``
    in row-major pixel order.
    """
    if height < 2 or width < 2:
        raise DimensionError("equirectangular images need H, W >= 2")
    lon, lat = pixel_centers(height, width)
    lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
    pts = lonlat_to_xyz(lon_g.ravel(), lat_g.ravel())
    return sphere.locate(pts, threads=threads)


def barycentric_blend(vals, weights):
    """Blend corner values ``(..., 3, C)`` with weights ``(..., 3)``.

    The result is clipped to the corner range so that constants and one-hot
    weights come out exact and the blend never leaves the convex hull.
    """
    w = weights[..., None]
    out = w[..., 0, :] * vals[..., 0, :] + w[..., 1, :] * vals[..., 1, :] \
        + w[..., 2, :] * vals[..., 2, :]
    return np.clip(out, vals.min(axis=-2), vals.max(axis=-2))


def sphere_to_equirect(sig, height, width, mode="barycentric", threads=None):
    """Render a vertex signal into an ``(H, W, C)`` equirectangular raster.

    ``barycentric`` blends the three corners of the containing face;
    ``nearest_vertex`` copies the corner with the largest weight (ties go to
    the lowest vertex index) and gives piecewise-constant cells.
    """
    if mode == "nearest":
        mode = "nearest_vertex"
    if mode not in ("barycentric", "nearest_vertex"):
        raise ValueError(f"unknown render mode {mode!r}")
    faces, weights = pixel_lookup(sig.sphere, height, width, threads=threads)
    corners = sig.sphere.faces[faces]
    vals = sig.data[corners]                       # (N, 3, C)
    if mode == "barycentric":
        out = barycentric_blend(vals, weights)
    else:
        best = weights == weights.max(axis=1, keepdims=True)
        ids = np.where(best, corners, np.iinfo(np.int64).max)
        out = sig.data[ids.min(axis=1)]
    return out.reshape(height, width, sig.channels)


@dataclass(frozen=True)
class IouResult:
    """Per-class IOU (NaN where a class has an empty union) and their mean."""

    per_class: np.ndarray
    intersection: np.ndarray
    union: np.ndarray
    overall: float

    @property
    def present(self):
        return self.union > 0


def mean_iou(pred, label, num_classes, ignore=None):
    """Intersection over union per class for integer class maps.

    Pixels whose label equals ``ignore`` are excluded, and the ignored class
    is not reported.
    """
    pred = np.asarray(pred)
    label = np.asarray(label)
    if pred.ndim == 3:
        if pred.shape[2] != 1:
            raise DimensionError("class maps must have a single channel")
        pred = pred[:, :, 0]
    if label.ndim == 3:
        if label.shape[2] != 1:
            raise DimensionError("class maps must have a single channel")
        label = label[:, :, 0]
    if pred.shape != label.shape:
        raise DimensionError(f"shape mismatch: {pred.shape} vs {label.shape}")
    for name, arr in (("pred", pred), ("label", label)):
        if np.any(arr != np.round(arr)):
            raise DomainError(f"{name} contains non-integer class ids")
    pred = pred.astype(np.int64).ravel()
    label = label.astype(np.int64).ravel()
    if ignore is not None:
        keep = label != ignore
        pred, label = pred[keep], label[keep]
    for name, arr in (("pred", pred), ("label", label)):
        if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
            raise DomainError(f"{name} has class ids outside [0, {num_classes})")

    inter = np.bincount(label[pred == label], minlength=num_classes)
    union = (np.bincount(pred, minlength=num_classes)
             + np.bincount(label, minlength=num_classes) - inter)
    if ignore is not None and 0 <= ignore < num_classes:
        union[ignore] = 0
        inter[ignore] = 0
    with np.errstate(invalid="ignore", divide="ignore"):
        iou = np.where(union > 0, inter / np.maximum(union, 1), np.nan)
    overall = float(np.nanmean(iou)) if np.any(union > 0) else float("nan")
    return IouResult(iou, inter, union, overall)
