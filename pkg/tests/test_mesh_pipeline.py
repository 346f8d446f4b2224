import struct

import numpy as np
import pytest

from q8sculpt.blocks import contact_transfer_matrix
from q8sculpt.hypercube import cells_of_points
from q8sculpt.mesh_pipeline import (
    Mesh,
    MeshFormatError,
    demo_seed,
    face_contact_check,
    feature_stats,
    generate_sculpture,
    load_obj,
    merge_meshes,
    orbit_cloud,
    scale_for_min_feature,
    transform_mesh,
    unprojected_part_points,
    write_obj,
    write_stl,
)
from q8sculpt.projection import PoleProximityError, default_pole, radial_to_s3, stereo_project, stereo_unproject
from q8sculpt.quat import I, ONE, Q8_ELEMENTS, q8_mul, right_mul_matrix
from q8sculpt.symmetry import seed_asymmetry_check

TETRA_OBJ = """\
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
f 1 2 3
f 1 2 4
f 1 3 4
f 2 3 4
"""


def random_mesh(seed, n=30):
    gen = np.random.default_rng(seed)
    verts = gen.uniform(-0.95, 0.95, size=(n, 3))
    tris = []
    while len(tris) < n:
        tri = tuple(gen.choice(n, size=3, replace=False))
        tris.append(tri)
    return Mesh(verts, np.array(tris))


def test_load_tetrahedron():
    mesh = load_obj(TETRA_OBJ)
    assert mesh.n_vertices == 4
    assert mesh.n_triangles == 4


def test_quad_is_fan_triangulated():
    mesh = load_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    assert mesh.n_triangles == 2
    assert mesh.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]


def test_load_ignores_other_records():
    mesh = load_obj("# comment\no thing\nvn 0 0 1\nvt 0 0\n" + TETRA_OBJ)
    assert mesh.n_vertices == 4


def test_load_errors_carry_line_numbers():
    with pytest.raises(MeshFormatError, match="line 2"):
        load_obj("v 0 0 0\nv 1 nope 0\n")
    with pytest.raises(MeshFormatError, match="line 3"):
        load_obj("v 0 0 0\nv 1 0 0\nf 1 2 9\n")
    with pytest.raises(MeshFormatError, match="line 1"):
        load_obj("f 1 2\nv 0 0 0\n")
    with pytest.raises(MeshFormatError, match="positive"):
        load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -1 2 3\n")


def test_obj_round_trip():
    for seed in (1, 2, 3):
        mesh = random_mesh(seed)
        again = load_obj(write_obj(mesh))
        assert np.max(np.abs(again.vertices - mesh.vertices)) <= 1e-7
        assert np.array_equal(again.triangles, mesh.triangles)


def test_writers_reject_empty():
    empty = Mesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
    with pytest.raises(ValueError):
        write_obj(empty)
    with pytest.raises(ValueError):
        write_stl(empty)


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(np.array([[0.0, 0.0, np.nan]]), np.zeros((0, 3), dtype=np.int64))
    with pytest.raises(ValueError):
        Mesh(np.zeros((3, 3)), np.array([[0, 1, 3]]))
    with pytest.raises(ValueError):
        Mesh(np.zeros((3, 3)), np.array([[0, 1, 1]]))


def test_stl_layout():
    mesh = load_obj(TETRA_OBJ)
    data = write_stl(mesh)
    assert len(data) == 84 + 50 * mesh.n_triangles
    count = struct.unpack_from("<I", data, 80)[0]
    assert count == mesh.n_triangles
    # normals are unit for non-degenerate triangles
    for t in range(count):
        normal = struct.unpack_from("<3f", data, 84 + 50 * t)
        assert abs(np.linalg.norm(normal) - 1.0) <= 1e-6


def test_transform_mesh_composition():
    pole = default_pole()
    seed = Mesh(np.zeros((1, 3)), np.zeros((0, 3), dtype=np.int64))
    out_one = transform_mesh(seed, ONE, pole)
    assert np.allclose(out_one.vertices[0], stereo_project(np.array([1.0, 0, 0, 0]), pole))
    out_i = transform_mesh(seed, I, pole)
    assert np.allclose(out_i.vertices[0], stereo_project(np.array([0.0, 1, 0, 0]), pole))


def test_transform_preserves_triangles(random_seed_mesh):
    pole = default_pole()
    for g in Q8_ELEMENTS:
        out = transform_mesh(random_seed_mesh, g, pole)
        assert np.array_equal(out.triangles, random_seed_mesh.triangles)


def test_transform_rejects_out_of_domain():
    pole = default_pole()
    bad = Mesh(np.array([[1.5, 0.0, 0.0]]), np.zeros((0, 3), dtype=np.int64))
    with pytest.raises(ValueError, match="outside the cube"):
        transform_mesh(bad, ONE, pole)


def test_vertex_at_pole_is_reported():
    pole = default_pole()
    corner = Mesh(np.array([[1.0, 1.0, 1.0]]), np.zeros((0, 3), dtype=np.int64))
    with pytest.raises(PoleProximityError, match="vertex 0.*element 1"):
        transform_mesh(corner, ONE, pole)


def test_generate_sculpture_structure(random_seed_mesh):
    bundle = generate_sculpture(random_seed_mesh, default_pole(), 2.0)
    assert list(bundle.parts) == list(Q8_ELEMENTS)
    assert bundle.merged.n_vertices == 8 * random_seed_mesh.n_vertices
    assert bundle.merged.n_triangles == 8 * random_seed_mesh.n_triangles
    with pytest.raises(ValueError):
        generate_sculpture(random_seed_mesh, default_pole(), 0.0)


def test_generate_is_deterministic(random_seed_mesh):
    pole = default_pole()
    first = generate_sculpture(random_seed_mesh, pole, 1.5)
    second = generate_sculpture(random_seed_mesh, pole, 1.5)
    assert write_obj(first.merged) == write_obj(second.merged)
    for g in Q8_ELEMENTS:
        assert write_obj(first.parts[g]) == write_obj(second.parts[g])


def test_pipeline_equivariance(random_seed_mesh):
    """Transforming by g then moving the sphere image by h equals the single
    transform by g*h."""
    pole = default_pole()
    verts = random_seed_mesh.vertices[:100]
    seed = Mesh(verts, np.zeros((0, 3), dtype=np.int64))
    for g in Q8_ELEMENTS:
        projected = transform_mesh(seed, g, pole).vertices
        on_sphere = stereo_unproject(projected, pole)
        for h in Q8_ELEMENTS:
            moved = on_sphere @ right_mul_matrix(h).m
            direct = unprojected_part_points(seed, q8_mul(g, h))
            assert np.max(np.linalg.norm(moved - direct, axis=1)) <= 1e-9


def test_parts_live_in_their_own_cells(random_seed_mesh):
    for g in Q8_ELEMENTS:
        labels = cells_of_points(unprojected_part_points(random_seed_mesh, g))
        assert all(label == g for label in labels)


def test_feature_stats_tetrahedron():
    side = np.sqrt(2.0)
    verts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / side
    mesh = Mesh(verts, np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]))
    stats = feature_stats(mesh)
    assert stats["min_edge"] == pytest.approx(stats["max_edge"])
    assert stats["ratio"] == pytest.approx(1.0)


def test_feature_stats_scale_linearity(random_seed_mesh):
    stats = feature_stats(random_seed_mesh)
    scaled = feature_stats(random_seed_mesh.scaled(3.5))
    assert scaled["min_edge"] == pytest.approx(3.5 * stats["min_edge"], rel=1e-12)
    assert scaled["max_edge"] == pytest.approx(3.5 * stats["max_edge"], rel=1e-12)


def test_parts_near_pole_have_larger_features(random_seed_mesh):
    """The four cells touching the pole vertex project larger than their
    antipodes."""
    bundle = generate_sculpture(random_seed_mesh, default_pole(), 1.0)
    for g in Q8_ELEMENTS:
        if g.sign > 0:
            near = feature_stats(bundle.parts[g])["min_edge"]
            far = feature_stats(bundle.parts[-g])["min_edge"]
            assert near > far


def test_scale_for_min_feature(random_seed_mesh):
    pole = default_pole()
    scale = scale_for_min_feature(random_seed_mesh, pole, 0.8)
    merged = generate_sculpture(random_seed_mesh, pole, scale).merged
    assert feature_stats(merged)["min_edge"] >= 0.8 - 1e-9


def test_demo_seed_is_printable_seed(demo_mesh):
    assert demo_mesh.n_vertices == 15
    assert np.max(np.abs(demo_mesh.vertices)) <= 1.0
    assert seed_asymmetry_check(demo_mesh.vertices)
    report = face_contact_check(demo_mesh)
    assert report.passed


def test_face_contact_fixture_from_gluing_maps(rng):
    """One marker pair per face, placed via the transfer maps, passes; moving
    a marker or dropping a face's contact fails."""
    anchors = rng.uniform(-0.5, 0.5, size=(3, 3))
    verts = [anchors]
    for axis in range(3):
        plus = rng.uniform(-0.8, 0.8, size=(2, 3))
        plus[:, axis] = 1.0
        verts.append(plus)
        verts.append(plus @ contact_transfer_matrix(axis))
    verts = np.concatenate(verts)
    tris = [(0, 1, 2)] + [(0, 3 + 2 * k, 4 + 2 * k) for k in range(6)]
    good = Mesh(verts, np.array(tris))
    assert face_contact_check(good).passed

    # rotate one minus-face marker a quarter turn too few: mirrored-only placement
    bad_verts = verts.copy()
    reflect = np.eye(3)
    reflect[0, 0] = -1.0
    bad_verts[5] = verts[3] @ reflect
    bad_verts[6] = verts[4] @ reflect
    report = face_contact_check(Mesh(bad_verts, np.array(tris)))
    assert not report.axes[0].passed
    assert report.axes[0].unmatched_plus or report.axes[0].unmatched_minus
    assert report.axes[1].passed and report.axes[2].passed

    # empty contact on one face pair
    shrunk = verts.copy()
    shrunk[3:7, 0] *= 0.5  # pull the x-axis markers off the faces
    report = face_contact_check(Mesh(shrunk, np.array(tris)))
    assert not report.axes[0].passed
    assert report.axes[0].plus_count == 0


def test_orbit_cloud_counts(random_seed_mesh, demo_mesh):
    # interior seed: nothing coincides
    assert len(orbit_cloud(random_seed_mesh)) == 8 * random_seed_mesh.n_vertices
    # the demo seed's twelve contact points are each shared by two parts
    assert len(orbit_cloud(demo_mesh)) == 8 * demo_mesh.n_vertices - 48


def test_merge_meshes_offsets():
    a = load_obj(TETRA_OBJ)
    merged = merge_meshes([a, a])
    assert merged.n_vertices == 8
    assert merged.triangles[4:].min() == 4
