"""
Linear Lagrange (P1) stiffness and mass matrices with Dirichlet elimination.

:func:`assemble` builds the global matrices from element contributions and
deletes the rows and columns of boundary vertices, leaving an
:class:`AssembledSystem` on the interior degrees of freedom::

    from holofem import assembly, mesh

    system = assembly.assemble(mesh.generate_uniform_mesh(10))
    coeffs = assembly.l2_project(system.mesh, system, lambda x, y: x * y)

Interior degrees of freedom are numbered in increasing vertex order, which
for structured meshes is row-major.

-------------------------

"""

import logging
import os
import time
from functools import cached_property
from typing import Callable, List, Tuple, Union

import numpy as np
from scipy import sparse

from holofem.base import DegenerateElement, EmptySystem, InvalidArgument
from holofem.linalg.factor import Factorization, factor
from holofem.mesh import AREA_TOL, Mesh

logger = logging.getLogger(__name__)

#: function of x and y arrays returning values of the same shape
ScalarFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

#: reference P1 mass matrix, scaled by area / 12
_MASS_PATTERN = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])


def element_matrices(
    vertices: np.ndarray, triangles: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stiffness and mass matrices of every triangle at once.

    Args:
        vertices: Vertex coordinates, shape ``(nv, 2)``.
        triangles: Vertex-index triples, shape ``(nt, 3)``.

    Returns:
        Element stiffness matrices ``(nt, 3, 3)``, element mass matrices
        ``(nt, 3, 3)`` and triangle areas ``(nt,)``.

    Raises:
        DegenerateElement: if a triangle has zero area.
    """
    p = np.asarray(vertices, dtype=float)[np.asarray(triangles)]
    x, y = p[:, :, 0], p[:, :, 1]
    twice_area = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (
        y[:, 1] - y[:, 0]
    )
    scale = np.max(np.abs(p[:, 1:] - p[:, :1]), axis=(1, 2)) ** 2
    degenerate = np.flatnonzero(np.abs(twice_area) <= 2 * AREA_TOL * scale)
    if degenerate.size:
        raise DegenerateElement(
            "triangle %d has zero area" % degenerate[0], element=int(degenerate[0])
        )
    # gradient of the hat function at local vertex i is
    # (y_j - y_k, x_k - x_j) / (2 area) for (i, j, k) cyclic
    j, k = [1, 2, 0], [2, 0, 1]
    grads = np.stack([y[:, j] - y[:, k], x[:, k] - x[:, j]], axis=2)
    grads /= twice_area[:, None, None]
    area = 0.5 * np.abs(twice_area)
    stiffness = area[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)
    mass = (area / 12.0)[:, None, None] * _MASS_PATTERN
    return stiffness, mass, area


def local_matrices(
    p1: Tuple[float, float], p2: Tuple[float, float], p3: Tuple[float, float]
) -> Tuple[np.ndarray, np.ndarray]:
    """Stiffness and mass matrices of a single triangle.

    Raises:
        DegenerateElement: if the three points are collinear.
    """
    stiffness, mass, _ = element_matrices(np.array([p1, p2, p3]), np.array([[0, 1, 2]]))
    return stiffness[0], mass[0]


class AssembledSystem:
    """Stiffness and mass matrices restricted to interior degrees of freedom.

    Args:
        mesh: The mesh the matrices were assembled on.
        stiffness: Unreduced stiffness matrix over all vertices.
        mass: Unreduced mass matrix over all vertices.
    """

    def __init__(
        self, mesh: Mesh, stiffness: sparse.csr_matrix, mass: sparse.csr_matrix
    ) -> None:
        self.mesh = mesh
        self.stiffness_full = stiffness
        self.mass_full = mass
        #: global vertex index of each interior degree of freedom
        self.dof_map = mesh.interior
        #: degree of freedom of each vertex, -1 on the boundary
        self.vertex_dofs = np.full(mesh.n_vertices, -1, dtype=np.int64)
        self.vertex_dofs[self.dof_map] = np.arange(self.dof_map.shape[0])
        self.A = _restrict(stiffness, self.dof_map)
        self.M = _restrict(mass, self.dof_map)

    @property
    def n_dof(self) -> int:
        return self.dof_map.shape[0]

    @cached_property
    def mass_factorization(self) -> Factorization:
        "real factorization of :attr:`M`, computed on first use"
        return factor(self.M, "real")

    def __repr__(self):
        return "AssembledSystem(n_dof=%d, nnz(A)=%d, %r)" % (
            self.n_dof,
            self.A.nnz,
            self.mesh,
        )


def _restrict(matrix: sparse.csr_matrix, dofs: np.ndarray) -> sparse.csr_matrix:
    reduced = sparse.csr_matrix(matrix[dofs][:, dofs])
    reduced.sort_indices()
    return reduced


def _scatter(mesh: Mesh, element: np.ndarray) -> sparse.csr_matrix:
    t = mesh.triangles
    shape = (t.shape[0], 3, 3)
    rows = np.broadcast_to(t[:, :, None], shape).ravel()
    cols = np.broadcast_to(t[:, None, :], shape).ravel()
    matrix = sparse.coo_matrix(
        (element.ravel(), (rows, cols)), shape=(mesh.n_vertices, mesh.n_vertices)
    ).tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    return matrix


def assemble(mesh: Mesh) -> AssembledSystem:
    """Assemble the P1 stiffness and mass matrices of a mesh and eliminate
    the boundary vertices.

    Raises:
        EmptySystem: if the mesh has no interior vertices.
        DegenerateElement: if a triangle has zero area.
    """
    if mesh.n_interior == 0:
        raise EmptySystem("%r has no interior vertices" % mesh)
    start = time.time()
    stiffness, mass, _ = element_matrices(mesh.vertices, mesh.triangles)
    system = AssembledSystem(mesh, _scatter(mesh, stiffness), _scatter(mesh, mass))
    logger.info(
        "Assembled %d interior dofs (%d vertices, %d triangles) in %f sec",
        system.n_dof,
        mesh.n_vertices,
        mesh.n_triangles,
        time.time() - start,
    )
    return system


def _evaluate(f: ScalarFunction, points: np.ndarray) -> np.ndarray:
    values = np.asarray(f(points[..., 0], points[..., 1]), dtype=float)
    return np.broadcast_to(values, points.shape[:-1])


def load_vector(mesh: Mesh, f: ScalarFunction) -> np.ndarray:
    """Integrals of ``f`` against every hat function, over all vertices.

    Uses the mid-edge rule on each triangle, exact for quadratics.
    """
    p = mesh.vertices[mesh.triangles]
    # edge midpoints in the order (0,1), (1,2), (2,0)
    midpoints = 0.5 * (p + p[:, [1, 2, 0]])
    values = _evaluate(f, midpoints)
    area = mesh.areas()
    # each hat function is 1/2 at the two midpoints of its adjacent edges
    f01, f12, f20 = values[:, 0], values[:, 1], values[:, 2]
    local = (area / 6.0)[:, None] * np.column_stack(
        [f01 + f20, f01 + f12, f12 + f20]
    )
    return np.bincount(
        mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_vertices
    )


def l2_project(mesh: Mesh, system: AssembledSystem, f: ScalarFunction) -> np.ndarray:
    """Coefficients of the L2 projection of ``f`` onto the P1 space with zero
    boundary values.

    Args:
        mesh: Mesh to integrate over; must be the mesh of ``system``.
        system: The assembled system supplying the mass matrix.
        f: Function of ``x`` and ``y`` arrays.

    Returns:
        Interior coefficient vector ``c`` with ``M c = b``.
    """
    if mesh is not system.mesh and mesh != system.mesh:
        raise InvalidArgument("mesh does not match the assembled system")
    load = load_vector(mesh, f)[system.dof_map]
    return system.mass_factorization.solve(load)


def interpolate(system: AssembledSystem, f: ScalarFunction) -> np.ndarray:
    """Nodal interpolation of ``f`` at the interior vertices."""
    return _evaluate(f, system.mesh.vertices[system.dof_map]).astype(float)


def mass_norm(system: AssembledSystem, coeffs: np.ndarray) -> float:
    """Discrete L2 norm ``sqrt(c^H M c)`` of an interior coefficient vector."""
    coeffs = np.asarray(coeffs)
    return float(np.sqrt(max(np.vdot(coeffs, system.M @ coeffs).real, 0.0)))


class PiecewiseLinear:
    """The P1 function with given interior coefficients and zero boundary
    values, callable on coordinate arrays like any :data:`ScalarFunction`.
    Points outside the mesh evaluate to ``nan``.
    """

    def __init__(self, system: AssembledSystem, coeffs: np.ndarray) -> None:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (system.n_dof,):
            raise InvalidArgument(
                "expected %d coefficients, got shape %r" % (system.n_dof, coeffs.shape)
            )
        self.system = system
        self.nodal = np.zeros(system.mesh.n_vertices)
        self.nodal[system.dof_map] = coeffs

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        points = np.column_stack([x.ravel(), y.ravel()])
        found, bary = self.system.mesh.locate(points)
        corners = self.system.mesh.triangles[np.maximum(found, 0)]
        values = np.sum(bary * self.nodal[corners], axis=1)
        values[found < 0] = np.nan
        return values.reshape(x.shape)


def prolongation(coarse: AssembledSystem, fine: AssembledSystem) -> sparse.csr_matrix:
    """Embedding of the coarse P1 space into the fine one, on interior
    coefficients.

    The fine mesh must descend from the coarse mesh through
    :func:`~holofem.mesh.refine_uniform` (any number of times).

    Raises:
        InvalidArgument: if the meshes are not related by refinement.
    """
    steps: List[Mesh] = []
    current = fine.mesh
    while current is not coarse.mesh:
        if current.coarse is None or current.parents is None:
            raise InvalidArgument("fine mesh was not refined from the coarse mesh")
        steps.append(current)
        current = current.coarse

    embed = sparse.identity(coarse.mesh.n_vertices, format="csr")
    for mesh in reversed(steps):
        # a new vertex is the average of the two ends of its parent edge
        nv = mesh.n_vertices
        rows = np.repeat(np.arange(nv), 2)
        step = sparse.coo_matrix(
            (np.full(2 * nv, 0.5), (rows, mesh.parents.ravel())),
            shape=(nv, mesh.coarse.n_vertices),
        ).tocsr()
        embed = step @ embed
    embed = sparse.csr_matrix(embed[fine.dof_map][:, coarse.dof_map])
    embed.sort_indices()
    return embed


def write_matrix(matrix: sparse.spmatrix, path: Union[str, os.PathLike]) -> None:
    """Dump a sparse matrix as ``n n nnz`` followed by 0-based ``i j value``
    lines in row order."""
    matrix = sparse.csr_matrix(matrix)
    matrix.sort_indices()
    coo = matrix.tocoo()
    with open(path, "w") as outfile:
        outfile.write("%d %d %d\n" % (matrix.shape[0], matrix.shape[1], coo.nnz))
        for i, j, value in zip(coo.row, coo.col, coo.data):
            outfile.write("%d %d %r\n" % (i, j, float(value)))


def dump_system(
    system: AssembledSystem, directory: Union[str, os.PathLike]
) -> Tuple[str, str]:
    """Write ``stiffness.txt`` and ``mass.txt`` for a system into a directory
    (created if needed) and return their paths."""
    os.makedirs(directory, exist_ok=True)
    paths = (
        os.path.join(directory, "stiffness.txt"),
        os.path.join(directory, "mass.txt"),
    )
    write_matrix(system.A, paths[0])
    write_matrix(system.M, paths[1])
    logger.info("Wrote matrices for %r to %s", system, directory)
    return paths
