import math

import numpy as np
import pytest

from cornerscatter import geometry as geo
from cornerscatter.errors import (
    ConfigurationError,
    CornerAmbiguityError,
    NumericalError,
)


@pytest.fixture(scope="module")
def square_mesh():
    return geo.build_mesh(geo.Square(1.0), 0.1, truncation_radius=1.8, pml_width=0.6)


@pytest.fixture(scope="module")
def sector_mesh():
    return geo.build_mesh(geo.Sector(2, 1, 1.0), 0.05, truncation_radius=1.6, pml_width=0.6)


def test_square_mesh_has_corner_vertices_and_quality(square_mesh):
    mesh = square_mesh
    corners = np.array([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
    for c in corners:
        d = np.linalg.norm(mesh.vertices - c, axis=1).min()
        assert d < 1e-12
    assert mesh.min_angle_degrees() >= 20.0
    assert len(mesh.corner_vertex_ids) == 4


def test_sector_mesh_apex_and_leg_edges(sector_mesh):
    mesh = sector_mesh
    d_apex = np.linalg.norm(mesh.vertices, axis=1)
    apex = int(np.argmin(d_apex))
    assert d_apex[apex] < 1e-12
    # interface edges incident to the apex must run along both legs
    edges = mesh.boundary_edges["interface"]
    at_apex = edges[(edges[:, 0] == apex) | (edges[:, 1] == apex)]
    assert len(at_apex) == 2
    dirs = []
    for a, b in at_apex:
        other = b if a == apex else a
        v = mesh.vertices[other]
        dirs.append(math.atan2(v[1], v[0]))
    dirs = sorted(d % (2 * math.pi) for d in dirs)
    assert abs(dirs[0] - 0.0) < 1e-9
    assert abs(dirs[1] - math.pi / 2) < 1e-9


def test_square_interior_vertex_count_regression():
    # ungraded density check; frozen count from this mesher: 125 vertices
    mesh = geo.build_mesh(geo.Square(1.0), 0.1, truncation_radius=1.8,
                          pml_width=0.6, corner_grading=1.0)
    interior_tris = mesh.triangles[mesh.region == geo.REGION_INTERIOR]
    n_int = len(np.unique(interior_tris))
    bound = (1.0 / mesh.h + 1.0) ** 2
    assert 0.5 * bound <= n_int <= 2.0 * bound


def test_mesh_is_conforming(square_mesh):
    mesh = square_mesh
    e = np.vstack([mesh.triangles[:, [0, 1]], mesh.triangles[:, [1, 2]],
                   mesh.triangles[:, [2, 0]]])
    e.sort(axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    assert set(counts.tolist()) <= {1, 2}
    # edges used once must lie on the outer circle
    hull = uniq[counts == 1]
    r = np.linalg.norm(mesh.vertices[hull], axis=2)
    outer = mesh.truncation_radius + mesh.pml_width
    assert np.all(np.abs(r - outer) < 1e-9)


def test_region_tags_consistent(square_mesh):
    mesh = square_mesh
    cen = mesh.centroids()
    dom = mesh.domain
    for tag, name in geo.REGION_NAMES.items():
        cc = cen[mesh.region == tag]
        assert len(cc) > 0
        r = np.linalg.norm(cc, axis=1)
        if tag == geo.REGION_INTERIOR:
            assert np.all(dom.contains(cc, closed=True) | (dom.distance_to_boundary(cc) < mesh.h))
        elif tag == geo.REGION_PML:
            assert np.all(r > mesh.truncation_radius - 1e-9)


def test_interface_deviation_refinement():
    dom = geo.Disk(1.0)
    m1 = geo.build_mesh(dom, 0.2, truncation_radius=1.8, pml_width=0.6)
    m2 = geo.build_mesh(dom, 0.1, truncation_radius=1.8, pml_width=0.6)
    d1 = geo.interface_chord_deviation(m1)
    d2 = geo.interface_chord_deviation(m2)
    assert d2 <= 2.0 * d1  # halving h at most doubles the bound (here: shrinks)
    assert m2.min_angle_degrees() >= 20.0


def test_infeasible_truncation_radius_raises():
    with pytest.raises(ConfigurationError):
        geo.build_mesh(geo.Disk(1.0), 0.1, truncation_radius=1.05, pml_width=0.5)


def test_inward_normal_square_bottom():
    sq = geo.Square(1.0)
    n = sq.inward_normal(np.array([0.13, -0.5]))
    assert np.allclose(n, [0.0, 1.0], atol=1e-12)


def test_inward_normal_sector_leg():
    for m, ell in [(2, 1), (3, 2), (2, 3)]:
        sec = geo.Sector(m, ell, 1.0)
        a = ell * math.pi / m
        p = 0.5 * np.array([math.cos(a), math.sin(a)])
        n = sec.inward_normal(p)
        assert np.allclose(n, [math.sin(a), -math.cos(a)], atol=1e-12)


def test_inward_normal_disk():
    d = geo.Disk(1.0)
    n = d.inward_normal(np.array([1.0, 0.0]))
    assert np.allclose(n, [-1.0, 0.0], atol=1e-12)


def test_inward_normal_points_into_domain():
    rng = np.random.default_rng(2)
    for dom in (geo.Disk(1.0), geo.Square(1.0), geo.Sector(3, 2, 1.0)):
        pts, _ = dom.boundary_polyline(spacing=0.05)
        corners = [c.point for c in dom.corners()]
        for p in pts[rng.choice(len(pts), size=25, replace=False)]:
            if corners and min(np.linalg.norm(p - c) for c in corners) < 1e-6:
                continue
            n = dom.inward_normal(p, corner_tolerance=1e-7)
            q = p + 1e-6 * n
            assert bool(dom.contains(q[None, :])[0])


def test_corner_query_raises_ambiguity():
    sq = geo.Square(1.0)
    with pytest.raises(CornerAmbiguityError):
        sq.inward_normal(np.array([0.5, 0.5]))


def test_corner_points_square():
    cs = geo.Square(1.0).corners()
    assert len(cs) == 4
    for c in cs:
        assert abs(c.interior_angle - math.pi / 2) < 1e-12


def test_corner_points_disk_empty():
    assert geo.Disk(1.0).corners() == []


def test_corner_points_reflex_sector():
    cs = geo.Sector(2, 3, 1.0).corners()
    assert len(cs) == 3
    apex = cs[0]
    assert np.allclose(apex.point, [0.0, 0.0])
    assert abs(apex.interior_angle - 1.5 * math.pi) < 1e-12
    for c in cs[1:]:
        assert abs(c.interior_angle - math.pi / 2) < 1e-12


def test_local_frame_square_edge_midpoint():
    sq = geo.Square(1.0)
    fr = sq.local_frame(np.array([0.0, -0.5]))
    assert np.allclose(fr.inward_normal, [0.0, 1.0], atol=1e-12)
    assert fr.lipschitz_constant == 0.0
    xs = np.linspace(-0.2, 0.2, 11)
    assert np.allclose(fr.graph(xs), 0.0, atol=1e-12)


def test_local_frame_square_corner():
    sq = geo.Square(1.0)
    fr = sq.local_frame(np.array([0.5, 0.5]))
    assert abs(fr.lipschitz_constant - 1.0) < 1e-6
    xs = np.linspace(-0.1, 0.1, 21)
    assert np.allclose(fr.graph(xs), np.abs(xs), atol=1e-9)
    assert fr.graph(np.array([0.0]))[0] == 0.0


def test_local_frame_quarter_plane_sector():
    sec = geo.Sector(2, 1, 1.0)
    fr = sec.local_frame(np.array([0.0, 0.0]))
    assert abs(fr.lipschitz_constant - 1.0) < 1e-6


def test_boundary_classification_partition():
    # every boundary sample is either near exactly one corner or has a
    # well-defined normal
    for dom in (geo.Square(1.0), geo.Sector(2, 1, 1.0)):
        pts, _ = dom.boundary_polyline(spacing=0.03)
        corners = [c.point for c in dom.corners()]
        tol = 1e-7
        for p in pts:
            near = [c for c in corners if np.linalg.norm(p - c) <= tol]
            if len(near) == 1:
                with pytest.raises(CornerAmbiguityError):
                    dom.inward_normal(p, corner_tolerance=tol)
            else:
                assert len(near) == 0
                n = dom.inward_normal(p, corner_tolerance=tol)
                assert abs(np.linalg.norm(n) - 1.0) < 1e-12


def test_polygon_validation():
    with pytest.raises(ConfigurationError):
        geo.Polygon([[0, 0], [1, 1], [1, 0], [0, 1]])  # bowtie
    # clockwise input is normalized to CCW
    p = geo.Polygon([[0, 0], [0, 1], [1, 1], [1, 0]])
    assert bool(p.contains(np.array([[0.5, 0.5]]))[0])


def test_vtk_dump(tmp_path, square_mesh):
    path = tmp_path / "mesh.vtk"
    square_mesh.write_vtk(path, point_data={"one": np.ones(square_mesh.n_vertices)})
    text = path.read_text().splitlines()
    assert text[0].startswith("# vtk DataFile")
    assert any(line.startswith("CELL_DATA") for line in text)
    assert any(line.startswith("POINT_DATA") for line in text)
    assert any("SCALARS region int" in line for line in text)


def test_locate_and_interpolate(square_mesh):
    mesh = square_mesh
    f = mesh.vertices[:, 0] + 2.0 * mesh.vertices[:, 1]
    pts = np.array([[0.1, 0.2], [-0.4, 0.3], [1.2, 0.1]])
    vals = mesh.interpolate(f, pts)
    assert np.allclose(vals, pts[:, 0] + 2.0 * pts[:, 1], atol=1e-12)
    assert mesh.locate(np.array([[5.0, 5.0]]))[0] == -1
