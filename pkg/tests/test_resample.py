import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import cKDTree

from conftest import sphere
from oracles import polynomial_field
from geosphere.errors import DimensionError, DomainError
from geosphere.projection import lonlat_to_xyz
from geosphere.resample import (SphereSignal, equirect_to_sphere, mean_iou, pixel_centers,
                                pixel_lookup, sample_equirect, sphere_to_equirect)


def analytic_image(h, w, fn):
    lon, lat = pixel_centers(h, w)
    lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
    return fn(lon_g, lat_g)


def test_pixel_center_convention():
    lon, lat = pixel_centers(4, 8)
    assert lon[0] == pytest.approx(-math.pi + math.pi / 8)
    assert lat[0] == pytest.approx(math.pi / 2 - math.pi / 8)
    assert lat[-1] == pytest.approx(-lat[0])


def test_sample_at_pixel_centers_is_exact(rng):
    img = rng.normal(size=(16, 32, 2))
    lon, lat = pixel_centers(16, 32)
    lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
    assert np.allclose(sample_equirect(img, lon_g, lat_g), img, atol=1e-12)
    assert np.array_equal(sample_equirect(img, lon_g, lat_g, mode="nearest"), img)


def test_constant_image_exact():
    img = np.full((32, 64, 1), 3.5)
    sig = equirect_to_sphere(img, sphere(4))
    assert np.all(sig.data == 3.5)


def test_order7_resolution_pairing():
    img = np.zeros((256, 512, 3))
    sig = equirect_to_sphere(img, sphere(7))
    assert img.shape[0] * img.shape[1] == 131_072
    assert sig.data.shape == (163_842, 3)


def test_sin_lat_field_order7():
    s = sphere(7)
    img = analytic_image(256, 512, lambda lon, lat: np.sin(lat))
    sig = equirect_to_sphere(img, s)
    assert np.max(np.abs(sig.data[:, 0] - np.sin(s.lonlat[:, 1]))) < 1e-3


def test_value_range_and_linearity(rng):
    s = sphere(4)
    a = rng.normal(size=(20, 40, 2))
    b = rng.normal(size=(20, 40, 2))
    ra, rb = equirect_to_sphere(a, s).data, equirect_to_sphere(b, s).data
    assert ra.min() >= a.min() and ra.max() <= a.max()
    comb = equirect_to_sphere(2.5 * a - 0.75 * b, s).data
    assert np.max(np.abs(comb - (2.5 * ra - 0.75 * rb))) < 1e-12


def test_longitude_wrap(rng):
    s = sphere(4)
    img = rng.normal(size=(32, 64, 1))
    rolled = np.roll(img, 32, axis=1)
    lon, lat = s.lonlat[:, 0], s.lonlat[:, 1]
    got = equirect_to_sphere(rolled, s).data
    # rolling by half the width is the same as reading the original at lon + pi
    ref = sample_equirect(img, lon + math.pi - 2 * math.pi * (lon >= 0), lat)
    assert np.max(np.abs(got - ref)) < 1e-12
    # and the z-axis half turn is a symmetry of the mesh; the two pole
    # vertices are excluded because their longitude is pinned to 0
    turned = s.vertices * [-1, -1, 1]
    dist, perm = cKDTree(s.vertices).query(turned)
    assert np.max(dist) < 1e-12
    base = equirect_to_sphere(img, s).data
    off_pole = np.abs(lat) < math.pi / 2
    assert np.sum(~off_pole) == 2
    assert np.max(np.abs(got - base[perm])[off_pole]) < 1e-12


def test_lon_shifted_analytic_field():
    s = sphere(5)
    f = lambda lon, lat: np.cos(lat) * np.cos(2 * lon) + np.sin(lat)
    img = analytic_image(64, 128, f)
    got = equirect_to_sphere(np.roll(img, 64, axis=1), s).data[:, 0]
    ref = f(s.lonlat[:, 0] + math.pi, s.lonlat[:, 1])
    # away from the clamped polar caps the rolled image is the shifted field
    inner = np.abs(s.lonlat[:, 1]) < math.pi / 2 - math.pi / 64
    assert np.max(np.abs(got - ref)[inner]) < 5e-3


def test_nearest_forward_keeps_labels(rng):
    labels = rng.integers(0, 5, size=(16, 32)).astype(float)
    sig = equirect_to_sphere(labels, sphere(3), mode="nearest")
    assert set(np.unique(sig.data)) <= set(range(5))


def test_empty_image_rejected():
    with pytest.raises(DimensionError):
        equirect_to_sphere(np.zeros((0, 0)), sphere(1))
    with pytest.raises(DimensionError):
        equirect_to_sphere(np.zeros((1, 4)), sphere(1))


class TestRender:
    def test_constant(self):
        sig = SphereSignal(sphere(3), np.full(sphere(3).num_vertices, -2.25))
        for mode in ("barycentric", "nearest_vertex"):
            img = sphere_to_equirect(sig, 16, 32, mode=mode)
            assert np.all(img == -2.25)

    def test_weights_convex(self):
        faces, w = pixel_lookup(sphere(4), 64, 128)
        assert np.all(w >= 0)
        assert np.max(np.abs(w.sum(axis=1) - 1)) < 1e-12

    def test_one_hot_nearest(self):
        s = sphere(3)
        v = 100
        data = np.zeros(s.num_vertices)
        data[v] = 1
        img = sphere_to_equirect(SphereSignal(s, data), 64, 128, mode="nearest_vertex")
        assert set(np.unique(img)) == {0.0, 1.0}
        hit = np.argwhere(img[:, :, 0] == 1)
        assert len(hit) > 0
        # every lit pixel is closer to v than to any other vertex... up to the
        # planar-face criterion: v must be a corner of the pixel's face
        lon, lat = pixel_centers(64, 128)
        p = lonlat_to_xyz(lon[hit[:, 1]], lat[hit[:, 0]])
        f, _ = s.locate(p)
        assert np.all(np.any(s.faces[f] == v, axis=1))

    def test_nearest_tie_lowest_vertex(self):
        s = sphere(0)
        data = np.arange(12, dtype=float)
        # the centroid of a face has three equal weights
        img = sphere_to_equirect(SphereSignal(s, data), 90, 180, mode="nearest_vertex")
        assert set(np.unique(img)) <= set(range(12))

    def test_round_trip_band_limited(self):
        s = sphere(7)
        lon, lat = pixel_centers(256, 512)
        lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
        f = polynomial_field(lonlat_to_xyz(lon_g, lat_g))
        back = sphere_to_equirect(equirect_to_sphere(f, s), 256, 512)[..., 0]
        err = (back - f)[2:-2]
        assert np.sqrt(np.mean(err**2)) < 0.02 * (f.max() - f.min())

    def test_threads_bitwise(self, rng):
        s = sphere(5)
        sig = SphereSignal(s, rng.normal(size=(s.num_vertices, 2)))
        a = sphere_to_equirect(sig, 128, 256, threads=1)
        b = sphere_to_equirect(sig, 128, 256, threads=3)
        assert np.array_equal(a, b)


class TestMeanIou:
    def test_identical(self, rng):
        lab = rng.integers(0, 4, size=(8, 16))
        res = mean_iou(lab, lab, 6)
        assert np.all(res.per_class[res.present] == 1.0)
        assert np.all(np.isnan(res.per_class[~res.present]))
        assert res.overall == 1.0

    def test_disjoint(self):
        pred = np.zeros((4, 4), int)
        label = np.ones((4, 4), int)
        res = mean_iou(pred, label, 2)
        assert list(res.per_class) == [0.0, 0.0]
        assert res.overall == 0.0

    def test_hand_counted(self):
        pred = np.zeros((4, 4), int)
        label = np.zeros((4, 4), int)
        pred[0, 0:3] = 1                     # overlap, 3 pixels
        pred[3, 0:2] = 1                     # pred only, 2 pixels
        label[0, 0:3] = 1
        label[1, 3] = label[2, 3] = label[3, 3] = 1   # label only, 3 pixels
        assert (pred == 1).sum() == 5 and (label == 1).sum() == 6
        res = mean_iou(pred, label, 2)
        assert res.per_class[1] == 3 / 8
        # class 0: 16 - 8 pixels in both, union 11 + 10 - 8
        assert res.per_class[0] == 8 / 13
        assert res.overall == (3 / 8 + 8 / 13) / 2

    def test_ignore(self):
        pred = np.array([[0, 1], [2, 2]])
        label = np.array([[0, 1], [1, 2]])
        res = mean_iou(pred, label, 3, ignore=1)
        assert np.isnan(res.per_class[1])
        assert res.per_class[0] == 1.0 and res.per_class[2] == 1.0

    def test_errors(self):
        with pytest.raises(DimensionError):
            mean_iou(np.zeros((2, 2)), np.zeros((2, 3)), 2)
        with pytest.raises(DomainError):
            mean_iou(np.full((2, 2), 5), np.zeros((2, 2)), 2)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_bounds_property(self, k, seed):
        r = np.random.default_rng(seed)
        a, b = r.integers(0, k, size=(2, 5, 7))
        res = mean_iou(a, b, k)
        vals = res.per_class[res.present]
        assert np.all((vals >= 0) & (vals <= 1))
        assert 0 <= res.overall <= 1
