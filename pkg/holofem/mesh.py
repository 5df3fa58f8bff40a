"""
Triangular meshes of polygonal domains.

A :class:`Mesh` holds vertex coordinates, counterclockwise vertex-index
triples and a per-vertex boundary flag. Structured meshes of rectangles are
built with :func:`generate_uniform_mesh` and refined with
:func:`refine_uniform`; any triangulation can be imported from the plain text
format handled by :func:`read_mesh` and :func:`write_mesh`::

    from holofem import mesh

    coarse = mesh.generate_uniform_mesh(10)
    fine = mesh.refine_uniform(coarse)   # same vertices as n=20
    mesh.write_mesh(fine, "square-20.txt")

The text format is line based: ``nv nt``, then ``nv`` lines ``x y flag``
(flag 0 or 1), then ``nt`` lines ``i j k`` with 0-based vertex indices.

-------------------------

"""

import logging
import math
import os
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from holofem.base import (
    DegenerateElement,
    InvalidArgument,
    MeshParseError,
    MeshValidationError,
)

logger = logging.getLogger(__name__)

#: rectangle given as corners x0, y0, x1, y1
Rectangle = Tuple[float, float, float, float]

#: the unit square (0, 1) x (0, 1)
UNIT_SQUARE = (0.0, 0.0, 1.0, 1.0)

#: ways of splitting the cells of a structured mesh
PATTERNS = ("diagonal", "crisscross")

#: relative tolerance for zero-area triangles
AREA_TOL = 1e-14


def check_rectangle(rect: Sequence[float]) -> Rectangle:
    """Normalize a rectangle to ``(x0, y0, x1, y1)`` with ``x0 < x1`` and
    ``y0 < y1``.

    Raises:
        InvalidArgument: if the rectangle is malformed or degenerate.
    """
    try:
        x0, y0, x1, y1 = (float(value) for value in rect)
    except (TypeError, ValueError):
        raise InvalidArgument(
            "rectangle must be four numbers x0,y0,x1,y1 (got %r)" % (rect,)
        )
    if not all(math.isfinite(value) for value in (x0, y0, x1, y1)):
        raise InvalidArgument("rectangle corners must be finite (got %r)" % (rect,))
    x0, x1 = sorted((x0, x1))
    y0, y1 = sorted((y0, y1))
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        raise InvalidArgument("degenerate rectangle %r" % (rect,))
    return x0, y0, x1, y1


class Mesh:
    """An immutable triangular mesh.

    Args:
        vertices: Vertex coordinates, shape ``(nv, 2)``.
        triangles: Vertex-index triples, shape ``(nt, 3)``, counterclockwise.
        boundary_flags: True for vertices on the domain boundary.
        h: Nominal mesh size; defaults to the longest edge length.
        parents: For meshes made by :func:`refine_uniform`, the pair of
            coarse vertices each vertex is the midpoint of (``(i, i)`` for
            inherited vertices).
        coarse: The mesh this one was refined from, if any.
        reoriented: Number of clockwise triangles flipped on import.
    """

    def __init__(
        self,
        vertices: np.ndarray,
        triangles: np.ndarray,
        boundary_flags: np.ndarray,
        h: Optional[float] = None,
        parents: Optional[np.ndarray] = None,
        coarse: Optional["Mesh"] = None,
        reoriented: int = 0,
    ) -> None:
        self.vertices = np.array(vertices, dtype=float).reshape(-1, 2)
        self.triangles = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        self.boundary_flags = np.array(boundary_flags, dtype=bool).reshape(-1)
        if self.boundary_flags.shape[0] != self.vertices.shape[0]:
            raise MeshValidationError(
                "%d boundary flags for %d vertices"
                % (self.boundary_flags.shape[0], self.vertices.shape[0])
            )
        if self.triangles.size and (
            self.triangles.min() < 0 or self.triangles.max() >= self.n_vertices
        ):
            raise MeshValidationError("triangle references a vertex out of range")
        self.parents = None
        if parents is not None:
            self.parents = np.array(parents, dtype=np.int64).reshape(-1, 2)
            self.parents.flags.writeable = False
        self.coarse = coarse
        self.reoriented = reoriented
        for array in (self.vertices, self.triangles, self.boundary_flags):
            array.flags.writeable = False
        self.h = float(h) if h is not None else self.longest_edge()

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @cached_property
    def interior(self) -> np.ndarray:
        "indices of the vertices not on the boundary, in increasing order"
        interior = np.flatnonzero(~self.boundary_flags)
        interior.flags.writeable = False
        return interior

    @property
    def n_interior(self) -> int:
        return self.interior.shape[0]

    def signed_areas(self) -> np.ndarray:
        """Signed area of every triangle (positive when counterclockwise)."""
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def areas(self) -> np.ndarray:
        return np.abs(self.signed_areas())

    @cached_property
    def _edge_data(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        # local edges in the order (0,1), (1,2), (2,0)
        t = self.triangles
        local = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)
        local = np.sort(local.reshape(-1, 2), axis=1)
        if not local.size:
            empty = np.zeros((0, 2), dtype=np.int64)
            return empty, np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=int)
        edges, inverse, counts = np.unique(
            local, axis=0, return_inverse=True, return_counts=True
        )
        return edges, inverse.reshape(-1, 3), counts

    def edges(self) -> np.ndarray:
        """Unique edges as sorted vertex pairs, shape ``(ne, 2)``."""
        return self._edge_data[0]

    def edge_counts(self) -> np.ndarray:
        """Number of triangles sharing each edge of :meth:`edges`."""
        return self._edge_data[2]

    def boundary_edges(self) -> np.ndarray:
        """Edges that belong to exactly one triangle."""
        edges, _, counts = self._edge_data
        return edges[counts == 1]

    def longest_edge(self) -> float:
        edges = self.edges()
        if not edges.size:
            return 0.0
        lengths = np.linalg.norm(
            self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]], axis=1
        )
        return float(lengths.max())

    def euler_characteristic(self) -> int:
        """V - E + T; 1 for a triangulated simply connected polygon."""
        return self.n_vertices - len(self.edges()) + self.n_triangles

    def validate(self) -> None:
        """Check orientation, area and edge-sharing invariants.

        Raises:
            DegenerateElement: if a triangle has zero area.
            MeshValidationError: if a triangle is clockwise or an edge is
                shared by more than two triangles.
        """
        areas = self.signed_areas()
        scale = self.longest_edge() ** 2
        degenerate = np.flatnonzero(np.abs(areas) <= AREA_TOL * scale)
        if degenerate.size:
            raise DegenerateElement(
                "triangle %d has zero area" % degenerate[0], element=degenerate[0]
            )
        clockwise = np.flatnonzero(areas < 0)
        if clockwise.size:
            raise MeshValidationError("triangle %d is clockwise" % clockwise[0])
        if np.any(self.edge_counts() > 2):
            raise MeshValidationError("edge shared by more than two triangles")
        on_boundary = np.zeros(self.n_vertices, dtype=bool)
        on_boundary[self.boundary_edges().ravel()] = True
        unflagged = np.count_nonzero(on_boundary & ~self.boundary_flags)
        if unflagged:
            logger.warning(
                "%d vertices on boundary edges are not flagged as boundary",
                unflagged,
            )

    def locate(
        self, points: np.ndarray, tol: float = 1e-12
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Find a triangle containing each point.

        Args:
            points: Query points, shape ``(m, 2)``.
            tol: Slack on barycentric coordinates for points on edges.

        Returns:
            Triangle index per point (-1 when outside the mesh) and the
            barycentric coordinates, shape ``(m, 3)``.
        """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        p = self.vertices[self.triangles]
        # inverse of the affine map from reference to physical triangle
        jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
        inverse = np.linalg.inv(jac)
        found = np.full(points.shape[0], -1, dtype=np.int64)
        bary = np.zeros((points.shape[0], 3))
        # keep the (points x triangles) work arrays bounded
        chunk = max(1, 2_000_000 // max(self.n_triangles, 1))
        for start in range(0, points.shape[0], chunk):
            block = points[start : start + chunk]
            offset = block[:, None, :] - p[None, :, 0, :]
            lam = np.einsum("tij,mtj->mti", inverse, offset)
            lam0 = 1.0 - lam.sum(axis=2)
            inside = (lam0 >= -tol) & np.all(lam >= -tol, axis=2)
            hit = inside.any(axis=1)
            first = np.argmax(inside, axis=1)
            rows = np.arange(block.shape[0])
            found[start : start + chunk] = np.where(hit, first, -1)
            bary[start : start + chunk, 0] = lam0[rows, first]
            bary[start : start + chunk, 1:] = lam[rows, first]
        return found, bary

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.boundary_flags, other.boundary_flags)
            and math.isclose(self.h, other.h, rel_tol=1e-12)
        )

    __hash__ = None

    def __repr__(self):
        return "Mesh(vertices=%d, triangles=%d, interior=%d, h=%g)" % (
            self.n_vertices,
            self.n_triangles,
            self.n_interior,
            self.h,
        )


def generate_uniform_mesh(
    n: int, rect: Sequence[float] = UNIT_SQUARE, pattern: str = "diagonal"
) -> Mesh:
    """Structured mesh of a rectangle with ``n`` cells per side.

    Grid vertices are numbered row-major (x fastest). With the ``diagonal``
    pattern every cell is split by the diagonal from its lower-left to its
    upper-right corner. With ``crisscross`` both diagonals are drawn: each
    cell gets a center vertex (numbered after the grid, row-major by cell)
    and four triangles.

    Args:
        n: Number of cells in each direction.
        rect: Rectangle corners ``(x0, y0, x1, y1)``.
        pattern: One of :data:`PATTERNS`.

    Raises:
        InvalidArgument: if ``n < 1``, the rectangle is degenerate or the
            pattern is unknown.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgument("grid count must be a positive integer (got %r)" % (n,))
    if pattern not in PATTERNS:
        raise InvalidArgument(
            "unknown mesh pattern %r; choose from %s" % (pattern, ", ".join(PATTERNS))
        )
    n = int(n)
    x0, y0, x1, y1 = check_rectangle(rect)
    xs = np.linspace(x0, x1, n + 1)
    ys = np.linspace(y0, y1, n + 1)
    grid_x, grid_y = np.meshgrid(xs, ys)
    vertices = np.column_stack([grid_x.ravel(), grid_y.ravel()])

    index = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    v00 = index[:-1, :-1].ravel()
    v10 = index[:-1, 1:].ravel()
    v01 = index[1:, :-1].ravel()
    v11 = index[1:, 1:].ravel()

    col, row = np.meshgrid(np.arange(n + 1), np.arange(n + 1))
    flags = ((col == 0) | (col == n) | (row == 0) | (row == n)).ravel()
    dx, dy = (x1 - x0) / n, (y1 - y0) / n

    if pattern == "diagonal":
        lower = np.column_stack([v00, v10, v11])
        upper = np.column_stack([v00, v11, v01])
        triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)
        h = math.hypot(dx, dy)
    else:
        center_x, center_y = np.meshgrid(xs[:-1] + 0.5 * dx, ys[:-1] + 0.5 * dy)
        centers = np.column_stack([center_x.ravel(), center_y.ravel()])
        c = len(vertices) + np.arange(n * n)
        vertices = np.vstack([vertices, centers])
        flags = np.concatenate([flags, np.zeros(n * n, dtype=bool)])
        triangles = np.stack(
            [
                np.column_stack([v00, v10, c]),
                np.column_stack([v10, v11, c]),
                np.column_stack([v11, v01, c]),
                np.column_stack([v01, v00, c]),
            ],
            axis=1,
        ).reshape(-1, 3)
        h = max(dx, dy)

    mesh = Mesh(vertices, triangles, flags, h=h)
    logger.debug("Generated %r (%s) on %r", mesh, pattern, (x0, y0, x1, y1))
    return mesh


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split every triangle into four through its edge midpoints.

    Existing vertices keep their indices; midpoints are appended in the order
    of :meth:`Mesh.edges`. Midpoints of boundary edges are boundary vertices.
    """
    edges, tri_edges, counts = mesh._edge_data
    nv = mesh.n_vertices
    midpoints = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    vertices = np.vstack([mesh.vertices, midpoints])
    flags = np.concatenate([mesh.boundary_flags, counts == 1])

    mid = nv + tri_edges
    m01, m12, m20 = mid[:, 0], mid[:, 1], mid[:, 2]
    v0, v1, v2 = mesh.triangles.T
    children = np.stack(
        [
            np.column_stack([v0, m01, m20]),
            np.column_stack([m01, v1, m12]),
            np.column_stack([m20, m12, v2]),
            np.column_stack([m01, m12, m20]),
        ],
        axis=1,
    ).reshape(-1, 3)

    own = np.arange(nv)
    parents = np.vstack([np.column_stack([own, own]), edges])
    refined = Mesh(
        vertices, children, flags, h=0.5 * mesh.h, parents=parents, coarse=mesh
    )
    logger.debug("Refined %r into %r", mesh, refined)
    return refined


def write_mesh(mesh: Mesh, path: Union[str, os.PathLike]) -> None:
    """Write a mesh in the plain text format (coordinates round-trip
    exactly)."""
    with open(path, "w") as outfile:
        outfile.write("%d %d\n" % (mesh.n_vertices, mesh.n_triangles))
        for (x, y), flag in zip(mesh.vertices, mesh.boundary_flags):
            outfile.write("%r %r %d\n" % (float(x), float(y), int(flag)))
        for i, j, k in mesh.triangles:
            outfile.write("%d %d %d\n" % (i, j, k))


def _parse_ints(tokens, lineno, count, label):
    if len(tokens) != count:
        raise MeshParseError(
            "expected %d fields for %s, found %d" % (count, label, len(tokens)),
            lineno,
        )
    try:
        return [int(token) for token in tokens]
    except ValueError:
        raise MeshParseError("non-integer field in %s" % label, lineno)


def read_mesh(path: Union[str, os.PathLike]) -> Mesh:
    """Read a mesh in the plain text format.

    Clockwise triangles are accepted and reoriented; the number reoriented
    is available as :attr:`Mesh.reoriented`.

    Raises:
        MeshParseError: on malformed lines (with the line number).
        MeshValidationError: on inconsistent counts, out-of-range indices or
            zero-area triangles.
    """
    with open(path) as infile:
        lines = infile.read().splitlines()
    # trailing blank lines are harmless
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MeshParseError("empty mesh file", 1)

    nv, nt = _parse_ints(lines[0].split(), 1, 2, "header")
    if nv < 0 or nt < 0:
        raise MeshParseError("negative counts in header", 1)
    expected = 1 + nv + nt
    if len(lines) != expected:
        raise MeshValidationError(
            "header announces %d vertices and %d triangles (%d lines) but the "
            "file has %d lines" % (nv, nt, expected, len(lines))
        )

    vertices = np.zeros((nv, 2))
    flags = np.zeros(nv, dtype=bool)
    for i in range(nv):
        lineno = i + 2
        tokens = lines[i + 1].split()
        if len(tokens) != 3:
            raise MeshParseError(
                "expected 'x y flag', found %d fields" % len(tokens), lineno
            )
        try:
            vertices[i] = float(tokens[0]), float(tokens[1])
            flag = int(tokens[2])
        except ValueError:
            raise MeshParseError("malformed vertex line", lineno)
        if flag not in (0, 1):
            raise MeshParseError("boundary flag must be 0 or 1", lineno)
        flags[i] = bool(flag)

    triangles = np.zeros((nt, 3), dtype=np.int64)
    for t in range(nt):
        lineno = nv + t + 2
        triangle = _parse_ints(lines[nv + t + 1].split(), lineno, 3, "triangle")
        if min(triangle) < 0 or max(triangle) >= nv:
            raise MeshValidationError(
                "line %d: triangle references vertex out of range 0..%d"
                % (lineno, nv - 1)
            )
        triangles[t] = triangle

    p = vertices[triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    signed = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    if nt:
        scale = max(np.abs(e1).max(), np.abs(e2).max()) ** 2
        degenerate = np.flatnonzero(np.abs(signed) <= AREA_TOL * scale)
        if degenerate.size:
            raise MeshValidationError(
                "line %d: triangle has zero area" % (nv + degenerate[0] + 2)
            )
    clockwise = signed < 0
    reoriented = int(np.count_nonzero(clockwise))
    if reoriented:
        triangles[clockwise] = triangles[clockwise][:, [0, 2, 1]]
        logger.warning("Reoriented %d clockwise triangles in %s", reoriented, path)

    mesh = Mesh(vertices, triangles, flags, reoriented=reoriented)
    mesh.validate()
    return mesh
