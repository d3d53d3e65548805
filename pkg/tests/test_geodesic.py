import numpy as np
import pytest

from conftest import random_unit, sphere
from oracles import containing_faces, exhaustive_locate
from geosphere.errors import CapacityError, DomainError
from geosphere.geodesic import (build_icosphere, locate_point, mean_edge_angle,
                                num_edges, num_faces, num_vertices, read_off, write_off)


@pytest.mark.parametrize("order", range(0, 9))
def test_counts_and_euler(order):
    s = sphere(order) if order <= 7 else build_icosphere(order)
    assert s.num_vertices == num_vertices(order) == 10 * 4**order + 2
    assert s.num_faces == num_faces(order) == 20 * 4**order
    assert s.num_edges == num_edges(order) == 30 * 4**order
    assert s.num_vertices - s.num_edges + s.num_faces == 2


def test_order0_is_icosahedron():
    s = sphere(0)
    assert (s.num_vertices, s.num_faces) == (12, 20)
    assert s.coarse_vertex_count == 0


def test_order7_vertex_count():
    s = sphere(7)
    assert s.num_vertices == 163_842
    assert s.num_faces == 327_680


@pytest.mark.parametrize("order", [0, 1, 3, 6])
def test_unit_norm(order):
    v = sphere(order).vertices
    assert np.max(np.abs(np.linalg.norm(v, axis=1) - 1)) < 1e-12


@pytest.mark.parametrize("order", [0, 1, 2, 5])
def test_degrees(order):
    s = sphere(order)
    deg = s.degrees
    assert np.all(deg[:12] == 5)
    assert np.all(deg[12:] == 6)


@pytest.mark.parametrize("order", [1, 2, 4, 7])
def test_prefix_property(order):
    fine, coarse = sphere(order), sphere(order - 1)
    assert fine.coarse_vertex_count == coarse.num_vertices
    assert np.array_equal(fine.vertices[:coarse.num_vertices], coarse.vertices)


@pytest.mark.parametrize("order", [0, 2, 5])
def test_winding_and_area(order):
    s = sphere(order)
    a, b, c = (s.vertices[s.faces[:, k]] for k in range(3))
    vol6 = np.einsum("ij,ij->i", a, np.cross(b, c))
    assert np.all(vol6 > 0)
    assert vol6.sum() / 6 > 0


def test_midpoint_order_is_sorted_edges():
    s = sphere(2)
    par = s.midpoint_parents[sphere(1).num_vertices - 12:]
    keys = par[:, 0] * s.coarse_vertex_count + par[:, 1]
    assert np.all(np.diff(keys) > 0)
    assert np.all(par[:, 0] < par[:, 1])


def test_adjacency_consistent():
    s = sphere(2)
    for v in range(s.num_vertices):
        for u in s.neighbors(v):
            assert v in s.neighbors(u)
        for f in s.incident_faces(v):
            assert v in s.faces[f]
    assert len(s.edge_adjacency) == s.num_vertices
    assert sum(len(f) for f in s.face_adjacency) == 3 * s.num_faces


def test_capacity_guard():
    with pytest.raises(CapacityError):
        build_icosphere(11)
    with pytest.raises(CapacityError):
        build_icosphere(3, max_order=2)
    with pytest.raises(DomainError):
        build_icosphere(-1)


def test_deterministic_build():
    a, b = build_icosphere(4), build_icosphere(4)
    assert np.array_equal(a.vertices, b.vertices)
    assert np.array_equal(a.faces, b.faces)


class TestMeanEdgeAngle:
    def test_order0_closed_form(self):
        assert mean_edge_angle(sphere(0)) == pytest.approx(np.arccos(1 / np.sqrt(5)), abs=1e-14)
        assert mean_edge_angle(sphere(0)) == pytest.approx(1.10715, abs=1e-5)

    def test_order1_brute_force(self):
        v = sphere(1).vertices
        ang = np.arccos(np.clip(v @ v.T, -1, 1))[np.triu_indices(len(v), 1)]
        # nearest-neighbour pairs are the edges: 120 of them below 0.8 rad
        edges = ang[ang < 0.8]
        assert len(edges) == 120
        got = mean_edge_angle(sphere(1))
        assert got == pytest.approx(edges.mean(), rel=1e-12)
        assert got == pytest.approx(0.5909464448075019, rel=1e-12)
        assert 0 < got < 1.10715

    @pytest.mark.parametrize("order", range(0, 6))
    def test_positive_and_shrinking(self, order):
        assert mean_edge_angle(sphere(order)) > 0
        if order:
            assert mean_edge_angle(sphere(order)) < mean_edge_angle(sphere(order - 1))


class TestLocate:
    def test_vertex_resolves_to_itself(self):
        s = sphere(3)
        for f in [0, 17, 500, s.num_faces - 1]:
            for slot, v in enumerate(s.faces[f]):
                face, w = locate_point(s, s.vertices[v])
                k = list(s.faces[face]).index(v)
                assert w[k] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("order", [0, 2, 4])
    def test_centroid(self, order):
        s = sphere(order)
        for f in range(0, s.num_faces, max(1, s.num_faces // 37)):
            c = s.vertices[s.faces[f]].mean(axis=0)
            face, w = locate_point(s, c / np.linalg.norm(c))
            assert face == f
            assert np.allclose(w, 1 / 3, atol=1e-9)

    @pytest.mark.parametrize("order", [0, 3])
    def test_random_points_match_exhaustive_scan(self, rng, order):
        s = sphere(order)
        pts = random_unit(rng, 10_000)
        faces, w = s.locate(pts)
        assert np.all(w >= 0)
        assert np.allclose(w.sum(axis=1), 1, atol=1e-12)
        for p, f, wi in zip(pts, faces, w):
            assert f in containing_faces(s.vertices, s.faces, p)
        for p, f, wi in zip(pts[:300], faces, w):
            f2, w2 = exhaustive_locate(s.vertices, s.faces, p)
            assert f2 == f
            assert np.allclose(wi, w2, atol=1e-12)

    def test_random_points_order6(self, rng):
        s = sphere(6)
        pts = random_unit(rng, 2_000)
        faces, w = s.locate(pts)
        corners = s.vertices[s.faces[faces]]
        # reconstruct the planar hit point and check it lies on the ray
        q = np.einsum("nk,nkj->nj", w, corners)
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        assert np.max(np.linalg.norm(q - pts, axis=1)) < 1e-12

    def test_shared_edge_lowest_face(self):
        s = sphere(0)
        f0 = s.faces[0]
        # midpoint of an edge of face 0 lies on exactly two faces
        p = s.vertices[f0[0]] + s.vertices[f0[1]]
        p /= np.linalg.norm(p)
        face, _ = locate_point(s, p)
        assert face == containing_faces(s.vertices, s.faces, p)[0]

    def test_threads_do_not_change_result(self, rng):
        s = sphere(4)
        pts = random_unit(rng, 100_000)
        f1, w1 = s.locate(pts, threads=1)
        f4, w4 = s.locate(pts, threads=4)
        assert np.array_equal(f1, f4)
        assert np.array_equal(w1, w4)

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            locate_point(sphere(1), np.array([2.0, 0, 0]))


def test_off_roundtrip(tmp_path):
    s = sphere(2)
    path = tmp_path / "m.off"
    write_off(s, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "OFF"
    assert lines[1] == f"{s.num_vertices} {s.num_faces} {s.num_edges}"
    assert lines[-1].startswith("3 ")
    v, f = read_off(path)
    assert np.array_equal(v, s.vertices)
    assert np.array_equal(f, s.faces)
