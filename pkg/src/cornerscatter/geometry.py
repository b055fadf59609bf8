"""Domain descriptions and graded conforming triangulation.

Domains (disk, polygon, square, sector) carry exact boundary
parametrizations oriented counterclockwise, so the interior always lies
to the left of travel and inward normals are 90-degree left rotations of
the tangent. Meshing covers the truncated disk of radius
``truncation_radius + pml_width`` with three tagged regions (interior,
exterior annulus, PML ring); boundary curves are sampled with a graded
size field and pinned, interior points are relaxed distmesh-style, and
regions are recovered by flood fill across the pinned curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from .errors import (
    ConfigurationError,
    CornerAmbiguityError,
    NumericalError,
    ValidationError,
)

REGION_INTERIOR = 0
REGION_EXTERIOR = 1
REGION_PML = 2
REGION_NAMES = {REGION_INTERIOR: "interior", REGION_EXTERIOR: "exterior", REGION_PML: "pml"}


# ---------------------------------------------------------------------------
# boundary pieces
# ---------------------------------------------------------------------------
class BoundaryPiece:
    """One smooth parametrized boundary curve, t in [0, 1], CCW orientation."""

    def __init__(self, kind, label, **geo):
        self.kind = kind  # 'segment' | 'arc'
        self.label = label
        self._geo = geo
        if kind == "segment":
            a, b = np.asarray(geo["a"], float), np.asarray(geo["b"], float)
            self._a, self._b = a, b
            self.length = float(np.linalg.norm(b - a))
        elif kind == "arc":
            self._c = np.asarray(geo["center"], float)
            self._r = float(geo["radius"])
            self._t0 = float(geo["theta0"])
            self._t1 = float(geo["theta1"])
            self.length = abs(self._t1 - self._t0) * self._r
        else:
            raise ValueError(f"unknown piece kind {kind!r}")

    def point(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        if self.kind == "segment":
            return self._a[None, :] + t[:, None] * (self._b - self._a)[None, :]
        ang = self._t0 + t * (self._t1 - self._t0)
        return self._c[None, :] + self._r * np.stack([np.cos(ang), np.sin(ang)], axis=1)

    def unit_tangent(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        if self.kind == "segment":
            d = (self._b - self._a) / self.length
            return np.broadcast_to(d, (t.size, 2)).copy()
        ang = self._t0 + t * (self._t1 - self._t0)
        s = np.sign(self._t1 - self._t0)
        return s * np.stack([-np.sin(ang), np.cos(ang)], axis=1)

    def inward_normal(self, t):
        tan = self.unit_tangent(t)
        return np.stack([-tan[:, 1], tan[:, 0]], axis=1)

    @property
    def start(self):
        return self.point(0.0)[0]

    @property
    def end(self):
        return self.point(1.0)[0]

    def closest_parameter(self, p):
        """Parameter and distance of the closest point on the piece to p."""
        p = np.asarray(p, float)
        if self.kind == "segment":
            d = self._b - self._a
            t = float(np.dot(p - self._a, d) / np.dot(d, d))
            t = min(1.0, max(0.0, t))
        else:
            ang = math.atan2(p[1] - self._c[1], p[0] - self._c[0])
            lo, hi = min(self._t0, self._t1), max(self._t0, self._t1)
            # unwrap into the arc's angular window
            while ang < lo:
                ang += 2.0 * math.pi
            while ang > hi:
                ang -= 2.0 * math.pi
            if ang < lo:  # not inside the window; clamp to nearest endpoint
                mid = 0.5 * (lo + hi)
                ang = lo if (lo - ang) % (2 * math.pi) < (ang - hi) % (2 * math.pi) else hi
                ang = lo if abs(ang - mid) > 0 else ang
            t = (ang - self._t0) / (self._t1 - self._t0)
            t = min(1.0, max(0.0, t))
        q = self.point(t)[0]
        return t, float(np.linalg.norm(p - q))


@dataclass(frozen=True)
class Corner:
    point: np.ndarray
    interior_angle: float


@dataclass
class LocalFrame:
    """Rotated coordinates in which the boundary is the graph of f, f(0)=0."""

    base_point: np.ndarray
    inward_normal: np.ndarray
    lipschitz_constant: float
    graph: Callable[[np.ndarray], np.ndarray]
    patch_radius: float


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------
class Domain:
    """Bounded planar domain with CCW boundary and connected complement."""

    kind = "domain"

    def pieces(self):
        raise NotImplementedError

    def contains(self, points, closed=False):
        raise NotImplementedError

    def corners(self):
        raise NotImplementedError

    def circumscribed_radius(self) -> float:
        """Max distance from the origin to the boundary (fits in B_R check)."""
        pts = self.boundary_polyline(spacing=None)[0]
        return float(np.max(np.linalg.norm(pts, axis=1)))

    def interior_reference_point(self):
        """A point comfortably inside the domain."""
        piece = self.pieces()[0]
        t = 0.5
        q = piece.point(t)[0]
        n = piece.inward_normal(t)[0]
        for frac in (0.25, 0.1, 0.02):
            p = q + frac * piece.length * n
            if bool(self.contains(p[None, :])[0]):
                return p
        raise NumericalError("could not find an interior reference point")

    def distance_to_boundary(self, points):
        points = np.atleast_2d(np.asarray(points, float))
        best = np.full(points.shape[0], np.inf)
        for piece in self.pieces():
            for i, p in enumerate(points):
                _, d = piece.closest_parameter(p)
                best[i] = min(best[i], d)
        return best

    def boundary_polyline(self, spacing=None):
        """Dense polyline of the whole boundary: (points, arclengths)."""
        pieces = self.pieces()
        total = sum(p.length for p in pieces)
        if spacing is None:
            spacing = total / 512.0
        pts, arcs = [], []
        s0 = 0.0
        for piece in pieces:
            n = max(2, int(math.ceil(piece.length / spacing)) + 1)
            t = np.linspace(0.0, 1.0, n)
            q = piece.point(t)
            pts.append(q[:-1])
            arcs.append(s0 + t[:-1] * piece.length)
            s0 += piece.length
        return np.vstack(pts), np.concatenate(arcs)

    # --- normals, corners, frames ------------------------------------------
    def corner_points(self):
        """All boundary points where one-sided tangents differ, with angles."""
        return self.corners()

    def inward_normal(self, point, corner_tolerance=1e-9):
        """Unit inward normal at a boundary point away from corners."""
        point = np.asarray(point, float)
        for c in self.corners():
            if np.linalg.norm(point - c.point) <= corner_tolerance:
                raise CornerAmbiguityError(
                    f"normal requested at corner {c.point}; use corner_points() "
                    "for one-sided data"
                )
        best = (None, None, np.inf)
        for piece in self.pieces():
            t, d = piece.closest_parameter(point)
            if d < best[2]:
                best = (piece, t, d)
        piece, t, d = best
        scale = max(1.0, self.circumscribed_radius())
        if d > 1e-7 * scale:
            raise ValidationError(f"point {point} is not on the boundary (dist {d:.2e})")
        return piece.inward_normal(t)[0]

    def local_frame(self, x0, patch_radius=None):
        """Graph coordinates of the boundary around x0 with f(0) = 0."""
        x0 = np.asarray(x0, float)
        corners = self.corners()
        corner = None
        for c in corners:
            if np.linalg.norm(x0 - c.point) <= 1e-9:
                corner = c
                break
        if corner is not None:
            nu = self._corner_bisector(corner)
            lip = abs(1.0 / math.tan(0.5 * corner.interior_angle)) if (
                abs(corner.interior_angle - math.pi) > 1e-12
            ) else 0.0
        else:
            nu = self.inward_normal(x0)
            lip = None

        if patch_radius is None:
            dists = [np.linalg.norm(x0 - c.point) for c in corners if corner is None or
                     np.linalg.norm(x0 - c.point) > 1e-9]
            feature = min(dists) if dists else min(p.length for p in self.pieces())
            patch_radius = 0.45 * min(feature, min(p.length for p in self.pieces()))

        pts, arcs = self.boundary_polyline(spacing=patch_radius / 120.0)
        rel = pts - x0
        keep = np.linalg.norm(rel, axis=1) <= patch_radius
        rel = rel[keep]
        tang = np.array([nu[1], -nu[0]])
        xi = rel @ tang
        eta = rel @ nu
        order = np.argsort(xi)
        xi, eta = xi[order], eta[order]
        # enforce the exact base point
        xi = np.concatenate([xi, [0.0]])
        eta = np.concatenate([eta, [0.0]])
        order = np.argsort(xi)
        xi, eta = xi[order], eta[order]

        if lip is None:
            dxi = np.subtract.outer(xi, xi)
            deta = np.subtract.outer(eta, eta)
            mask = np.abs(dxi) > 1e-12
            lip = float(np.max(np.abs(deta[mask] / dxi[mask]))) if mask.any() else 0.0
            if lip < 1e-10:
                lip = 0.0

        def graph(x):
            return np.interp(np.asarray(x, float), xi, eta)

        return LocalFrame(
            base_point=x0,
            inward_normal=nu,
            lipschitz_constant=lip,
            graph=graph,
            patch_radius=float(patch_radius),
        )

    def _corner_bisector(self, corner):
        pieces = self.pieces()
        normals = []
        for piece in pieces:
            for tend in (0.0, 1.0):
                if np.linalg.norm(piece.point(tend)[0] - corner.point) <= 1e-9:
                    normals.append(piece.inward_normal(tend)[0])
        if len(normals) < 2:
            raise NumericalError(f"could not resolve one-sided normals at {corner.point}")
        s = normals[0] + normals[1]
        nrm = np.linalg.norm(s)
        if nrm < 1e-12:
            # straight slit (angle pi); fall back to the first normal
            return normals[0]
        return s / nrm


class Disk(Domain):
    kind = "disk"

    def __init__(self, radius, center=(0.0, 0.0)):
        if radius <= 0:
            raise ConfigurationError("disk radius must be positive")
        self.radius = float(radius)
        self.center = np.asarray(center, float)

    def pieces(self):
        return [
            BoundaryPiece(
                "arc", "circle", center=self.center, radius=self.radius,
                theta0=0.0, theta1=2.0 * math.pi,
            )
        ]

    def contains(self, points, closed=False):
        points = np.atleast_2d(np.asarray(points, float))
        r = np.linalg.norm(points - self.center, axis=1)
        tol = 1e-12 * max(1.0, self.radius)
        return r <= self.radius + tol if closed else r < self.radius - tol

    def corners(self):
        return []

    def circumscribed_radius(self):
        return float(np.linalg.norm(self.center) + self.radius)

    def interior_reference_point(self):
        return self.center.copy()

    def distance_to_boundary(self, points):
        points = np.atleast_2d(np.asarray(points, float))
        return np.abs(np.linalg.norm(points - self.center, axis=1) - self.radius)


class Polygon(Domain):
    kind = "polygon"

    def __init__(self, vertices):
        v = np.asarray(vertices, float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise ConfigurationError("polygon needs at least 3 planar vertices")
        area2 = _shoelace(v)
        if abs(area2) < 1e-14:
            raise ConfigurationError("degenerate polygon")
        if area2 < 0.0:
            v = v[::-1].copy()
        if _self_intersects(v):
            raise ConfigurationError("polygon must be simple (non self-intersecting)")
        self.vertices = v

    def pieces(self):
        n = len(self.vertices)
        return [
            BoundaryPiece("segment", f"edge{i}", a=self.vertices[i],
                          b=self.vertices[(i + 1) % n])
            for i in range(n)
        ]

    def contains(self, points, closed=False):
        points = np.atleast_2d(np.asarray(points, float))
        inside = _crossing_number(points, self.vertices)
        tol = 1e-12 * max(1.0, float(np.abs(self.vertices).max()))
        d = self.distance_to_boundary(points)
        if closed:
            return inside | (d <= tol)
        return inside & (d > tol)

    def corners(self):
        v = self.vertices
        n = len(v)
        out = []
        for i in range(n):
            d0 = v[i] - v[i - 1]
            d1 = v[(i + 1) % n] - v[i]
            d0 = d0 / np.linalg.norm(d0)
            d1 = d1 / np.linalg.norm(d1)
            turn = math.atan2(d0[0] * d1[1] - d0[1] * d1[0], float(d0 @ d1))
            if abs(turn) < 1e-10:
                continue
            out.append(Corner(point=v[i].copy(), interior_angle=math.pi - turn))
        return out

    def circumscribed_radius(self):
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def interior_reference_point(self):
        c = self.vertices.mean(axis=0)
        if bool(self.contains(c[None, :])[0]):
            return c
        return super().interior_reference_point()

    def distance_to_boundary(self, points):
        points = np.atleast_2d(np.asarray(points, float))
        return _segments_distance(points, self.vertices)


class Square(Polygon):
    kind = "square"

    def __init__(self, side, center=(0.0, 0.0)):
        if side <= 0:
            raise ConfigurationError("square side must be positive")
        cx, cy = float(center[0]), float(center[1])
        s = 0.5 * float(side)
        super().__init__(
            [[cx - s, cy - s], [cx + s, cy - s], [cx + s, cy + s], [cx - s, cy + s]]
        )
        self.side = float(side)
        self.center = np.asarray(center, float)


class Sector(Domain):
    """Circular sector {0 < r < radius, 0 < theta < ell*pi/m} about its apex."""

    kind = "sector"

    def __init__(self, m, ell, radius, center=(0.0, 0.0)):
        if not (isinstance(m, int) and m >= 2):
            raise ConfigurationError("sector m must be an integer >= 2")
        if not (isinstance(ell, int) and 1 <= ell < 2 * m):
            raise ConfigurationError(
                "sector ell must satisfy 1 <= ell < 2m (angle inside (0, 2*pi))"
            )
        if radius <= 0:
            raise ConfigurationError("sector radius must be positive")
        self.m = m
        self.ell = ell
        self.radius = float(radius)
        self.center = np.asarray(center, float)
        self.angle = ell * math.pi / m

    def pieces(self):
        c, R, a = self.center, self.radius, self.angle
        tip = c
        p0 = c + np.array([R, 0.0])
        p1 = c + R * np.array([math.cos(a), math.sin(a)])
        return [
            BoundaryPiece("segment", "leg0", a=tip, b=p0),
            BoundaryPiece("arc", "arc", center=c, radius=R, theta0=0.0, theta1=a),
            BoundaryPiece("segment", "leg1", a=p1, b=tip),
        ]

    def contains(self, points, closed=False):
        points = np.atleast_2d(np.asarray(points, float))
        rel = points - self.center
        r = np.linalg.norm(rel, axis=1)
        th = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2.0 * math.pi)
        tol = 1e-12 * max(1.0, self.radius)
        if closed:
            d = self.distance_to_boundary(points)
            inside = (r < self.radius) & (th > 0.0) & (th < self.angle)
            return inside | (d <= tol)
        inside = (r < self.radius - tol) & (th > tol) & (th < self.angle - tol)
        return inside & (self.distance_to_boundary(points) > tol)

    def corners(self):
        c, R, a = self.center, self.radius, self.angle
        return [
            Corner(point=c.copy(), interior_angle=a),
            Corner(point=c + np.array([R, 0.0]), interior_angle=0.5 * math.pi),
            Corner(point=c + R * np.array([math.cos(a), math.sin(a)]),
                   interior_angle=0.5 * math.pi),
        ]

    def circumscribed_radius(self):
        return float(np.linalg.norm(self.center) + self.radius)

    def interior_reference_point(self):
        a = 0.5 * self.angle
        return self.center + 0.5 * self.radius * np.array([math.cos(a), math.sin(a)])

    def distance_to_boundary(self, points):
        points = np.atleast_2d(np.asarray(points, float))
        best = np.full(points.shape[0], np.inf)
        for piece in self.pieces():
            if piece.kind == "segment":
                seg = np.vstack([piece.start, piece.end])
                d = _segments_distance(points, seg, closed=False)
                best = np.minimum(best, d)
            else:
                rel = points - self.center
                r = np.linalg.norm(rel, axis=1)
                th = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2.0 * math.pi)
                on_arc = th <= self.angle
                d = np.where(on_arc, np.abs(r - self.radius), np.inf)
                for endpoint in (piece.start, piece.end):
                    d = np.minimum(d, np.linalg.norm(points - endpoint, axis=1))
                best = np.minimum(best, d)
        return best


def _shoelace(v):
    x, y = v[:, 0], v[:, 1]
    return float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _self_intersects(v):
    n = len(v)
    segs = [(v[i], v[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_cross(*segs[i], *segs[j]):
                return True
    return False


def _segments_cross(a, b, c, d):
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def _crossing_number(points, vertices):
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        cond = (y0 <= y) != (y1 <= y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (x < xint)
    return inside


def _segments_distance(points, vertices, closed=True):
    n = len(vertices)
    m = n if closed else n - 1
    best = np.full(points.shape[0], np.inf)
    for i in range(m):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        ab = b - a
        denom = float(ab @ ab)
        t = np.clip(((points - a) @ ab) / denom, 0.0, 1.0)
        proj = a[None, :] + t[:, None] * ab[None, :]
        best = np.minimum(best, np.linalg.norm(points - proj, axis=1))
    return best


# ---------------------------------------------------------------------------
# mesh data structure
# ---------------------------------------------------------------------------
class Mesh2D:
    """Conforming triangulation with region tags and labeled boundary edges."""

    def __init__(self, vertices, triangles, region, boundary_edges, h,
                 corner_vertex_ids, domain, truncation_radius, pml_width):
        self.vertices = np.ascontiguousarray(vertices, float)
        self.triangles = np.ascontiguousarray(triangles, np.int64)
        self.region = np.ascontiguousarray(region, np.int8)
        self.boundary_edges = boundary_edges
        self.h = float(h)
        self.corner_vertex_ids = np.asarray(corner_vertex_ids, np.int64)
        self.domain = domain
        self.truncation_radius = float(truncation_radius)
        self.pml_width = float(pml_width)
        self._finder = None
        self._centroid_tree = None
        self._vertex_tris = None

    # --- basic quantities ----------------------------------------------------
    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    def triangle_corners(self):
        return self.vertices[self.triangles]  # (M, 3, 2)

    def areas(self):
        p = self.triangle_corners()
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def centroids(self):
        return self.triangle_corners().mean(axis=1)

    def min_angle_degrees(self):
        p = self.triangle_corners()
        angles = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            na = np.linalg.norm(a, axis=1)
            nb = np.linalg.norm(b, axis=1)
            cosv = np.clip(np.einsum("ij,ij->i", a, b) / (na * nb), -1.0, 1.0)
            angles.append(np.degrees(np.arccos(cosv)))
        return float(np.min(np.stack(angles)))

    # --- point location and interpolation ------------------------------------
    def locate(self, points):
        """Triangle index per query point (-1 when outside the meshed disk)."""
        points = np.atleast_2d(np.asarray(points, float))
        if self._finder is not None:
            return self._finder.find_simplex(points)
        if self._centroid_tree is None:
            self._centroid_tree = cKDTree(self.centroids())
        k = min(32, self.n_triangles)
        _, cand = self._centroid_tree.query(points, k=k)
        cand = np.atleast_2d(cand)
        out = np.full(points.shape[0], -1, dtype=np.int64)
        for i, p in enumerate(points):
            for t in cand[i]:
                if self._point_in_triangle(p, t):
                    out[i] = t
                    break
        return out

    def _point_in_triangle(self, p, t, tol=1e-10):
        lam = self.barycentric(p[None, :], np.array([t]))[0]
        return bool(np.all(lam >= -tol))

    def barycentric(self, points, tris):
        corners = self.vertices[self.triangles[tris]]
        v0 = corners[:, 1] - corners[:, 0]
        v1 = corners[:, 2] - corners[:, 0]
        d = points - corners[:, 0]
        det = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
        l1 = (d[:, 0] * v1[:, 1] - d[:, 1] * v1[:, 0]) / det
        l2 = (v0[:, 0] * d[:, 1] - v0[:, 1] * d[:, 0]) / det
        return np.stack([1.0 - l1 - l2, l1, l2], axis=1)

    def interpolate(self, nodal_values, points, outside=np.nan):
        points = np.atleast_2d(np.asarray(points, float))
        tris = self.locate(points)
        vals = np.full(points.shape[0], outside, dtype=np.asarray(nodal_values).dtype)
        ok = tris >= 0
        if np.any(ok):
            lam = self.barycentric(points[ok], tris[ok])
            vv = np.asarray(nodal_values)[self.triangles[tris[ok]]]
            vals[ok] = np.einsum("ij,ij->i", lam, vv)
        return vals

    def vertex_triangles(self):
        if self._vertex_tris is None:
            lists = [[] for _ in range(self.n_vertices)]
            for t, tri in enumerate(self.triangles):
                for v in tri:
                    lists[v].append(t)
            self._vertex_tris = lists
        return self._vertex_tris

    def region_mask(self, region):
        return self.region == region

    # --- export ----------------------------------------------------------------
    def write_vtk(self, path, point_data=None, cell_data=None):
        """ASCII legacy VTK dump; region tags always included as cell data."""
        lines = [
            "# vtk DataFile Version 3.0",
            "cornerscatter mesh",
            "ASCII",
            "DATASET UNSTRUCTURED_GRID",
            f"POINTS {self.n_vertices} double",
        ]
        for x, y in self.vertices:
            lines.append(f"{x:.16g} {y:.16g} 0")
        lines.append(f"CELLS {self.n_triangles} {4 * self.n_triangles}")
        for a, b, c in self.triangles:
            lines.append(f"3 {a} {b} {c}")
        lines.append(f"CELL_TYPES {self.n_triangles}")
        lines.extend(["5"] * self.n_triangles)
        lines.append(f"CELL_DATA {self.n_triangles}")
        lines.append("SCALARS region int 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(str(int(r)) for r in self.region)
        if cell_data:
            for name, arr in cell_data.items():
                lines.append(f"SCALARS {name} double 1")
                lines.append("LOOKUP_TABLE default")
                lines.extend(f"{v:.16g}" for v in np.asarray(arr, float))
        if point_data:
            lines.append(f"POINT_DATA {self.n_vertices}")
            for name, arr in point_data.items():
                lines.append(f"SCALARS {name} double 1")
                lines.append("LOOKUP_TABLE default")
                lines.extend(f"{v:.16g}" for v in np.asarray(arr, float))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# mesh generation
# ---------------------------------------------------------------------------
def build_mesh(domain, h, truncation_radius, pml_width, corner_grading=8.0,
               relax_iters=40, seed=0):
    """Triangulate the truncated disk around ``domain`` with tagged regions.

    Boundary curves (domain interface, truncation circle, outer circle) are
    discretized with a corner-graded size field and pinned; interior points
    start on a hex lattice and relax toward uniform quality. Conformity to
    the pinned curves is verified, and regions are recovered by flood fill.
    """
    if h <= 0:
        raise ConfigurationError("mesh size h must be positive")
    if pml_width < 0:
        raise ConfigurationError("pml width must be nonnegative")
    if corner_grading < 1:
        raise ConfigurationError("corner grading must be >= 1")
    R = float(truncation_radius)
    w = float(pml_width)
    rho_dom = domain.circumscribed_radius()
    if rho_dom >= R - 2.0 * h:
        raise ConfigurationError(
            f"domain (circumscribed radius {rho_dom:.3g}) must lie inside the "
            f"truncation ball of radius {R:.3g} with clearance 2h"
        )
    if w > 0 and w < 2.0 * h:
        raise ConfigurationError("pml width below 2h cannot be resolved")

    corners = [c.point for c in domain.corners()]
    grade_slope = 0.35
    h_min = h / corner_grading

    def local_h(pts):
        pts = np.atleast_2d(pts)
        hh = np.full(pts.shape[0], h)
        for c in corners:
            d = np.linalg.norm(pts - c, axis=1)
            hh = np.minimum(hh, np.maximum(h_min, grade_slope * d))
        return hh

    # --- pinned boundary curves ----------------------------------------------
    iface_nodes, iface_clearance, corner_ids_local = _discretize_interface(
        domain, local_h
    )
    outer_radius = R + w
    trunc_nodes = _circle_nodes(R, h)
    outer_nodes = _circle_nodes(outer_radius, h)

    fixed = [iface_nodes, trunc_nodes]
    clearances = [iface_clearance, np.full(len(trunc_nodes), 2 * math.pi * R / len(trunc_nodes))]
    if w > 0:
        fixed.append(outer_nodes)
        clearances.append(np.full(len(outer_nodes), 2 * math.pi * outer_radius / len(outer_nodes)))
    fixed_pts = np.vstack(fixed)
    fixed_clear = np.concatenate(clearances)
    offsets = np.cumsum([0] + [len(f) for f in fixed])

    # --- interior seed points ---------------------------------------------------
    rng = np.random.default_rng(seed)
    seeds = _hex_seeds(outer_radius, h, h_min, corners, local_h, grade_slope, rng)
    seeds = _filter_band(seeds, fixed_pts, fixed_clear, local_h)

    # --- relaxation ---------------------------------------------------------------
    pts = np.vstack([fixed_pts, seeds])
    nfix = len(fixed_pts)
    pts = _relax(pts, nfix, local_h, outer_radius, fixed_clear, iters=relax_iters)
    free = _filter_band(pts[nfix:], fixed_pts, fixed_clear, local_h)
    pts = np.vstack([fixed_pts, free])

    tri, pts = _cleanup_low_angles(pts, nfix, fixed_pts, fixed_clear)
    triangles = tri.simplices.copy()

    # --- labeled edges -----------------------------------------------------------
    def loop_edges(start, count):
        idx = np.arange(start, start + count)
        return np.stack([idx, np.roll(idx, -1)], axis=1)

    iface_edges = loop_edges(offsets[0], len(iface_nodes))
    trunc_edges = loop_edges(offsets[1], len(trunc_nodes))
    boundary_edges = {"interface": iface_edges, "truncation": trunc_edges}
    if w > 0:
        outer_edges = loop_edges(offsets[2], len(outer_nodes))
        boundary_edges["outer"] = outer_edges
    else:
        boundary_edges["outer"] = trunc_edges

    _check_curve_recovery(tri, boundary_edges, pts)

    region = _flood_fill_regions(domain, pts, triangles, tri, boundary_edges, R, w)

    mesh = Mesh2D(
        vertices=pts,
        triangles=triangles,
        region=region,
        boundary_edges=boundary_edges,
        h=h,
        corner_vertex_ids=np.asarray(corner_ids_local, np.int64),
        domain=domain,
        truncation_radius=R,
        pml_width=w,
    )
    mesh._finder = tri
    ang = mesh.min_angle_degrees()
    if ang < 20.0:
        raise NumericalError(
            f"mesh quality below contract: min angle {ang:.2f} deg < 20 deg"
        )
    return mesh


def _discretize_interface(domain, local_h):
    """Nodes along the domain boundary honoring the graded size field."""
    pieces = domain.pieces()
    nodes = []
    clear = []
    corner_ids = []
    corner_pts = [c.point for c in domain.corners()]
    for piece in pieces:
        # integrate inverse size along the piece and place nodes at equal quantiles
        tfine = np.linspace(0.0, 1.0, 2049)
        pfine = piece.point(tfine)
        dens = 1.0 / local_h(pfine)
        dl = piece.length / (len(tfine) - 1)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * dl)])
        n_seg = max(1, int(round(cum[-1])))
        targets = np.linspace(0.0, cum[-1], n_seg + 1)
        tt = np.interp(targets, cum, tfine)
        qq = piece.point(tt)
        # local spacing (chord length to neighbors) used for the clearance band
        seg = np.linalg.norm(np.diff(qq, axis=0), axis=1)
        spacing = np.empty(len(qq))
        spacing[0] = seg[0]
        spacing[-1] = seg[-1]
        spacing[1:-1] = 0.5 * (seg[1:] + seg[:-1])
        # drop the final node: it coincides with the next piece's start
        start_idx = len(nodes)
        for q, s in zip(qq[:-1], spacing[:-1]):
            nodes.append(q)
            clear.append(s)
        for cp in corner_pts:
            if np.linalg.norm(qq[0] - cp) < 1e-12:
                corner_ids.append(start_idx)
    return np.asarray(nodes), np.asarray(clear), corner_ids


def _circle_nodes(radius, h):
    n = max(16, int(math.ceil(2.0 * math.pi * radius / h)))
    ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _hex_seeds(outer_radius, h, h_min, corners, local_h, grade_slope, rng):
    def lattice(spacing, x0, x1, y0, y1):
        ny = int(math.ceil((y1 - y0) / (spacing * math.sqrt(3.0) / 2.0))) + 1
        rows = []
        for j in range(ny):
            y = y0 + j * spacing * math.sqrt(3.0) / 2.0
            xs = np.arange(x0 + (0.5 * spacing if j % 2 else 0.0), x1, spacing)
            if xs.size:
                rows.append(np.stack([xs, np.full(xs.size, y)], axis=1))
        return np.vstack(rows) if rows else np.zeros((0, 2))

    Ro = outer_radius
    base = lattice(h, -Ro, Ro, -Ro, Ro)
    keep = np.linalg.norm(base, axis=1) < Ro - 0.55 * h
    base = base[keep]
    # graded zones around corners are covered by finer patch lattices
    if corners and h_min < h:
        zone = h / grade_slope
        in_zone = np.zeros(len(base), dtype=bool)
        patches = []
        for c in corners:
            in_zone |= np.linalg.norm(base - c, axis=1) < zone
            patch = lattice(h_min, c[0] - zone, c[0] + zone, c[1] - zone, c[1] + zone)
            d = np.linalg.norm(patch - c, axis=1)
            patch = patch[d < zone]
            if patch.size:
                hp = local_h(patch)
                keepp = rng.random(len(patch)) < (h_min / hp) ** 2
                patches.append(patch[keepp])
        base = base[~in_zone]
        if patches:
            extra = np.vstack(patches)
            keep = np.linalg.norm(extra, axis=1) < Ro - 0.55 * h
            base = np.vstack([base, extra[keep]])
    return base


def _filter_band(seeds, fixed_pts, fixed_clear, local_h):
    if len(seeds) == 0:
        return seeds
    tree = cKDTree(fixed_pts)
    d, idx = tree.query(seeds, k=1)
    return seeds[d >= 0.75 * fixed_clear[idx]]


def _relax(pts, nfix, local_h, outer_radius, fixed_clear, iters):
    pts = pts.copy()
    n = len(pts)
    fixed_tree = cKDTree(pts[:nfix])
    edges = None
    for it in range(iters):
        if it % 4 == 0:
            tri = Delaunay(pts)
            e = np.vstack([tri.simplices[:, [0, 1]], tri.simplices[:, [1, 2]],
                           tri.simplices[:, [2, 0]]])
            e.sort(axis=1)
            edges = np.unique(e, axis=0)
        bars = pts[edges[:, 0]] - pts[edges[:, 1]]
        L = np.linalg.norm(bars, axis=1)
        L = np.where(L < 1e-14, 1e-14, L)
        mid = 0.5 * (pts[edges[:, 0]] + pts[edges[:, 1]])
        want = 1.2 * local_h(mid)
        fvec = (np.maximum(want - L, 0.0) / L)[:, None] * bars
        fx = (np.bincount(edges[:, 0], weights=fvec[:, 0], minlength=n)
              - np.bincount(edges[:, 1], weights=fvec[:, 0], minlength=n))
        fy = (np.bincount(edges[:, 0], weights=fvec[:, 1], minlength=n)
              - np.bincount(edges[:, 1], weights=fvec[:, 1], minlength=n))
        move = 0.2 * np.stack([fx[nfix:], fy[nfix:]], axis=1)
        # cap step length at a fraction of the local size
        cap = 0.4 * local_h(pts[nfix:])
        nrm = np.linalg.norm(move, axis=1)
        scale = np.where(nrm > cap, cap / np.where(nrm == 0, 1, nrm), 1.0)
        pts[nfix:] += move * scale[:, None]
        # confine to the meshed disk
        r = np.linalg.norm(pts[nfix:], axis=1)
        lim = outer_radius - 0.55 * local_h(pts[nfix:])
        bad = r > lim
        if np.any(bad):
            pts[nfix:][bad] *= (lim[bad] / r[bad])[:, None]
        # keep free points out of the clearance band of the pinned curves
        _push_out_of_band(pts, nfix, fixed_tree, fixed_clear)
    return pts


def _push_out_of_band(pts, nfix, fixed_tree, fixed_clear):
    bound = 0.75 * float(fixed_clear.max())
    d, idx = fixed_tree.query(pts[nfix:], k=1, distance_upper_bound=bound)
    hit = np.isfinite(d)
    if not np.any(hit):
        return
    need = 0.75 * fixed_clear[idx[hit]]
    dh = d[hit]
    viol = (dh < need) & (dh > 1e-12)
    if np.any(viol):
        rows = np.flatnonzero(hit)[viol]
        away = pts[nfix + rows] - fixed_tree.data[idx[hit][viol]]
        pts[nfix + rows] += away * ((need[viol] - dh[viol]) / dh[viol])[:, None]


def _triangle_min_angles(pts, simplices):
    p = pts[simplices]
    angs = np.empty((len(simplices), 3))
    for i in range(3):
        a = p[:, (i + 1) % 3] - p[:, i]
        b = p[:, (i + 2) % 3] - p[:, i]
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        cosv = np.clip(np.einsum("ij,ij->i", a, b) / (na * nb), -1.0, 1.0)
        angs[:, i] = np.degrees(np.arccos(cosv))
    return angs.min(axis=1)


def _cleanup_low_angles(pts, nfix, fixed_pts, fixed_clear, threshold=27.0, rounds=4):
    """Laplacian-smooth the free vertices of low-quality triangles."""
    fixed_tree = cKDTree(fixed_pts)
    tri = Delaunay(pts)
    for _ in range(rounds):
        amin = _triangle_min_angles(pts, tri.simplices)
        bad = tri.simplices[amin < threshold]
        bad_free = np.unique(bad[bad >= nfix]) if bad.size else np.array([], int)
        if bad_free.size == 0:
            break
        e = np.vstack([tri.simplices[:, [0, 1]], tri.simplices[:, [1, 2]],
                       tri.simplices[:, [2, 0]]])
        e.sort(axis=1)
        e = np.unique(e, axis=0)
        n = len(pts)
        deg = (np.bincount(e[:, 0], minlength=n) + np.bincount(e[:, 1], minlength=n))
        sx = (np.bincount(e[:, 0], weights=pts[e[:, 1], 0], minlength=n)
              + np.bincount(e[:, 1], weights=pts[e[:, 0], 0], minlength=n))
        sy = (np.bincount(e[:, 0], weights=pts[e[:, 1], 1], minlength=n)
              + np.bincount(e[:, 1], weights=pts[e[:, 0], 1], minlength=n))
        pts = pts.copy()
        pts[bad_free, 0] = sx[bad_free] / deg[bad_free]
        pts[bad_free, 1] = sy[bad_free] / deg[bad_free]
        _push_out_of_band(pts, nfix, fixed_tree, fixed_clear)
        tri = Delaunay(pts)
    return tri, pts


def _edge_key(a, b, n):
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return lo.astype(np.int64) * n + hi


def _check_curve_recovery(tri, boundary_edges, pts):
    n = len(pts)
    simp = tri.simplices
    mesh_edges = np.vstack([simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [2, 0]]])
    mesh_keys = np.unique(_edge_key(mesh_edges[:, 0], mesh_edges[:, 1], n))
    for label, edges in boundary_edges.items():
        keys = _edge_key(edges[:, 0], edges[:, 1], n)
        present = np.isin(keys, mesh_keys)
        if not np.all(present):
            missing = int((~present).sum())
            raise NumericalError(
                f"triangulation failed to recover {missing} '{label}' edges; "
                "refine h or adjust the geometry"
            )


def _flood_fill_regions(domain, pts, triangles, tri, boundary_edges, R, w):
    n = len(pts)
    m = len(triangles)
    barrier = set()
    for label in ("interface", "truncation", "outer"):
        for a, b in boundary_edges[label]:
            barrier.add((min(a, b), max(a, b)))

    neighbors = tri.neighbors  # (m, 3); neighbor i is opposite vertex i
    region = np.full(m, -1, dtype=np.int8)

    def flood(start_tri, tag):
        stack = [start_tri]
        region[start_tri] = tag
        while stack:
            t = stack.pop()
            verts = triangles[t]
            for i in range(3):
                nb = neighbors[t, i]
                if nb < 0 or region[nb] != -1:
                    continue
                a, b = verts[(i + 1) % 3], verts[(i + 2) % 3]
                if (min(a, b), max(a, b)) in barrier:
                    continue
                region[nb] = tag
                stack.append(nb)

    p_int = domain.interior_reference_point()
    t_int = int(tri.find_simplex(p_int[None, :])[0])
    if t_int < 0:
        raise NumericalError("interior seed fell outside the triangulation")
    flood(t_int, REGION_INTERIOR)

    rho = domain.circumscribed_radius()
    r_mid = 0.5 * (rho + R)
    t_ext = -1
    for phi in np.linspace(0.0, 2.0 * math.pi, 37):
        p = r_mid * np.array([math.cos(phi), math.sin(phi)])
        if not bool(domain.contains(p[None, :], closed=True)[0]):
            cand = int(tri.find_simplex(p[None, :])[0])
            if cand >= 0 and region[cand] == -1:
                t_ext = cand
                break
    if t_ext < 0:
        raise NumericalError("could not seed the exterior region")
    flood(t_ext, REGION_EXTERIOR)

    if w > 0:
        p = (R + 0.5 * w) * np.array([1.0, 0.0])
        t_pml = int(tri.find_simplex(p[None, :])[0])
        if t_pml < 0 or region[t_pml] != -1:
            raise NumericalError("could not seed the PML region")
        flood(t_pml, REGION_PML)

    if np.any(region == -1):
        raise NumericalError(
            f"{int((region == -1).sum())} triangles left unclassified by flood fill"
        )
    return region


def interface_chord_deviation(mesh):
    """Max distance from interface edge midpoints to the true boundary."""
    edges = mesh.boundary_edges["interface"]
    mids = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    return float(np.max(mesh.domain.distance_to_boundary(mids)))


def make_domain(kind, **params):
    """Factory used by the CLI configuration layer."""
    kinds = {"disk": Disk, "square": Square, "polygon": Polygon, "sector": Sector}
    if kind not in kinds:
        raise ConfigurationError(f"unknown domain kind {kind!r}")
    return kinds[kind](**params)
