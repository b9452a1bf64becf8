"""P1 finite elements on intervals and structured triangulated rectangles.

Fields are nodal; gradients are constant per cell, which makes the flux term
of the energy exactly integrable:

    J(v) = sum_cells |cell| A(|grad v|) - sum_nodes m_i rhs_i v_i

with m the lumped (row-sum) mass.  The load pairing uses the nodal rule so
that f(x, u, grad u) can be evaluated pointwise at nodes; the nodal gradient
is the volume-weighted average of the adjacent cell gradients.

Assembly is plain vectorized numpy with fixed summation order (np.add.at), so
repeated runs of identical inputs are bit-identical.
"""

from dataclasses import dataclass
import csv

import numpy as np
import scipy.sparse as sp

from .operators import ALaplacianOperator, flux, hessian

__all__ = [
    "Mesh",
    "DiscreteField",
    "AssembledSystem",
    "interval_mesh",
    "rectangle_mesh",
    "constant_field",
    "field_from_callable",
    "assemble",
    "assemble_energy",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True, eq=False)
class Mesh:
    dim: int
    nodes: np.ndarray          # (N, dim)
    cells: np.ndarray          # (C, dim+1) node indices
    cell_volumes: np.ndarray   # (C,)
    boundary: np.ndarray       # (N,) bool
    grad_ops: np.ndarray       # (C, dim, dim+1): grad = grad_ops[c] @ values[cells[c]]
    h: float                   # requested spacing

    def __post_init__(self):
        interior = np.flatnonzero(~self.boundary)
        to_interior = np.full(self.n_nodes, -1, dtype=int)
        to_interior[interior] = np.arange(len(interior))
        lumped = np.zeros(self.n_nodes)
        np.add.at(lumped, self.cells.ravel(), np.repeat(self.cell_volumes / (self.dim + 1), self.dim + 1))
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "_to_interior", to_interior)
        object.__setattr__(self, "lumped_mass", lumped)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def volume(self) -> float:
        return float(self.cell_volumes.sum())


def interval_mesh(x_lo: float, x_hi: float, h: float) -> Mesh:
    if not (np.isfinite(h) and h > 0):
        raise ValueError("mesh spacing h must be positive, got %g" % h)
    if not x_hi > x_lo:
        raise ValueError("interval needs x_hi > x_lo")
    n_cells = max(1, int(round((x_hi - x_lo) / h)))
    xs = np.linspace(x_lo, x_hi, n_cells + 1)
    nodes = xs[:, None]
    cells = np.column_stack([np.arange(n_cells), np.arange(1, n_cells + 1)])
    vols = np.diff(xs)
    boundary = np.zeros(n_cells + 1, dtype=bool)
    boundary[[0, -1]] = True
    grad_ops = np.empty((n_cells, 1, 2))
    grad_ops[:, 0, 0] = -1.0 / vols
    grad_ops[:, 0, 1] = 1.0 / vols
    return Mesh(dim=1, nodes=nodes, cells=cells, cell_volumes=vols, boundary=boundary, grad_ops=grad_ops, h=h)


def rectangle_mesh(x_lo: float, x_hi: float, y_lo: float, y_hi: float, h: float) -> Mesh:
    """Structured triangulation: each grid square is split along its up diagonal."""
    if not (np.isfinite(h) and h > 0):
        raise ValueError("mesh spacing h must be positive, got %g" % h)
    if not (x_hi > x_lo and y_hi > y_lo):
        raise ValueError("rectangle needs x_hi > x_lo and y_hi > y_lo")
    nx = max(1, int(round((x_hi - x_lo) / h)))
    ny = max(1, int(round((y_hi - y_lo) / h)))
    xs = np.linspace(x_lo, x_hi, nx + 1)
    ys = np.linspace(y_lo, y_hi, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    nodes = np.column_stack([X.ravel(), Y.ravel()])  # id = j*(nx+1) + i

    def nid(i, j):
        return j * (nx + 1) + i

    cells = []
    for j in range(ny):
        for i in range(nx):
            cells.append([nid(i, j), nid(i + 1, j), nid(i + 1, j + 1)])
            cells.append([nid(i, j), nid(i + 1, j + 1), nid(i, j + 1)])
    cells = np.asarray(cells, dtype=int)

    p0 = nodes[cells[:, 0]]
    e1 = nodes[cells[:, 1]] - p0
    e2 = nodes[cells[:, 2]] - p0
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    vols = 0.5 * np.abs(det)
    # rows of Minv are the dual basis to (e1, e2); grad u = Minv^T [du1, du2]
    inv = np.empty((len(cells), 2, 2))
    inv[:, 0, 0] = e2[:, 1] / det
    inv[:, 0, 1] = -e2[:, 0] / det
    inv[:, 1, 0] = -e1[:, 1] / det
    inv[:, 1, 1] = e1[:, 0] / det
    diff = np.array([[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    grad_ops = np.einsum("cki,kj->cij", inv, diff)

    i_idx = np.tile(np.arange(nx + 1), ny + 1)
    j_idx = np.repeat(np.arange(ny + 1), nx + 1)
    boundary = (i_idx == 0) | (i_idx == nx) | (j_idx == 0) | (j_idx == ny)
    return Mesh(dim=2, nodes=nodes, cells=cells, cell_volumes=vols, boundary=boundary, grad_ops=grad_ops, h=h)


@dataclass
class DiscreteField:
    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_nodes,):
            raise ValueError("field has %s values for %d nodes" % (self.values.shape, self.mesh.n_nodes))

    def copy(self) -> "DiscreteField":
        return DiscreteField(self.mesh, self.values.copy())

    def cell_averages(self) -> np.ndarray:
        return self.values[self.mesh.cells].mean(axis=1)

    def cell_gradients(self) -> np.ndarray:
        return np.einsum("cij,cj->ci", self.mesh.grad_ops, self.values[self.mesh.cells])

    def node_gradients(self) -> np.ndarray:
        """Volume-weighted average of adjacent cell gradients, per node."""
        g = self.cell_gradients()
        acc = np.zeros((self.mesh.n_nodes, self.mesh.dim))
        wsum = np.zeros(self.mesh.n_nodes)
        w = self.mesh.cell_volumes
        for a in range(self.mesh.dim + 1):
            np.add.at(acc, self.mesh.cells[:, a], g * w[:, None])
            np.add.at(wsum, self.mesh.cells[:, a], w)
        return acc / wsum[:, None]

    def boundary_values(self) -> np.ndarray:
        return self.values[self.mesh.boundary]

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def constant_field(mesh: Mesh, c: float) -> DiscreteField:
    return DiscreteField(mesh, np.full(mesh.n_nodes, float(c)))


def field_from_callable(mesh: Mesh, fn) -> DiscreteField:
    return DiscreteField(mesh, np.asarray(fn(mesh.nodes), dtype=float).reshape(mesh.n_nodes))


@dataclass
class AssembledSystem:
    energy: float
    gradient: np.ndarray      # over interior nodes
    hessian: sp.csr_matrix    # interior x interior, symmetric


def _as_values(u, mesh):
    if isinstance(u, DiscreteField):
        return u
    return DiscreteField(mesh, u)


def assemble_energy(op: ALaplacianOperator, rhs, u: DiscreteField) -> float:
    """J(u) alone; the cheap path for line searches."""
    mesh = u.mesh
    g = u.cell_gradients()
    r = np.sqrt(np.sum(g * g, axis=1))
    load = mesh.lumped_mass * np.asarray(rhs, dtype=float)
    return float(np.dot(mesh.cell_volumes, np.asarray(op.A.value(r), dtype=float)) - np.dot(load, u.values))


def assemble(op: ALaplacianOperator, rhs, u: DiscreteField, newton_eps: float = None) -> AssembledSystem:
    """Energy, interior gradient, and epsilon-regularized interior Hessian at u.

    The gradient (residual) uses the exact flux; the regularized magnitude
    enters the Hessian only.  newton_eps overrides the operator's epsilon_reg;
    by default a characteristic-gradient-scale epsilon 1e-8*(1+max|grad u|) is
    used when the operator carries none.
    """
    mesh = u.mesh
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (mesh.n_nodes,):
        raise ValueError("rhs must be nodal, got shape %s" % (rhs.shape,))
    g = u.cell_gradients()
    r = np.sqrt(np.sum(g * g, axis=1))
    load = mesh.lumped_mass * rhs
    energy = float(np.dot(mesh.cell_volumes, np.asarray(op.A.value(r), dtype=float)) - np.dot(load, u.values))

    exact = ALaplacianOperator(A=op.A, bounds=op.bounds, dim=op.dim, epsilon_reg=0.0)
    fl = flux(exact, g)
    contrib = np.einsum("ci,cia->ca", fl, mesh.grad_ops) * mesh.cell_volumes[:, None]
    resid = np.zeros(mesh.n_nodes)
    np.add.at(resid, mesh.cells.ravel(), contrib.ravel())
    gradient = (resid - load)[mesh.interior]

    if newton_eps is None:
        newton_eps = op.epsilon_reg if op.epsilon_reg > 0 else 1e-8 * (1.0 + float(r.max(initial=0.0)))
    # Newton's model Hessian evaluates A', A'' at the smoothed magnitude, so a
    # degenerate A (A''(0) = 0) still yields a positive definite matrix on
    # flat cells; away from r ~ eps this differs from the exact Jacobian by
    # O(eps^2 / r), far below solver tolerances.
    rt = np.sqrt(r * r + newton_eps**2)
    a1 = np.asarray(op.A.deriv1(rt), dtype=float)
    a2 = np.asarray(op.A.deriv2(rt), dtype=float)
    outer = g[:, :, None] * g[:, None, :]
    eye = np.eye(mesh.dim)
    D = (a2 / rt**2 - a1 / rt**3)[:, None, None] * outer + (a1 / rt)[:, None, None] * eye
    elem = np.einsum("cia,cij,cjb->cab", mesh.grad_ops, D, mesh.grad_ops) * mesh.cell_volumes[:, None, None]
    loc = mesh._to_interior[mesh.cells]  # (C, dim+1), -1 on boundary
    rows = np.repeat(loc, mesh.dim + 1, axis=1).ravel()
    cols = np.tile(loc, (1, mesh.dim + 1)).ravel()
    vals = elem.reshape(mesh.n_cells, -1).ravel()
    keep = (rows >= 0) & (cols >= 0)
    n_int = len(mesh.interior)
    H = sp.coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(n_int, n_int)).tocsr()
    return AssembledSystem(energy=energy, gradient=gradient, hessian=H)


# ----------------------------------------------------------------------------
# serialization


def _fmt(x: float) -> str:
    return repr(float(x))


def write_field_csv(u: DiscreteField, path) -> None:
    """Columns: node_id, x, [y,] value."""
    mesh = u.mesh
    header = ["node_id", "x", "value"] if mesh.dim == 1 else ["node_id", "x", "y", "value"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(mesh.n_nodes):
            coords = [_fmt(c) for c in mesh.nodes[i]]
            w.writerow([str(i)] + coords + [_fmt(u.values[i])])


def read_field_csv(path, mesh: Mesh = None):
    """Read a field CSV; with a mesh, validate coordinates and return a DiscreteField."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    n_coord = len(header) - 2
    ids = np.array([int(r[0]) for r in body])
    coords = np.array([[float(c) for c in r[1 : 1 + n_coord]] for r in body])
    vals = np.array([float(r[-1]) for r in body])
    order = np.argsort(ids)
    coords, vals = coords[order], vals[order]
    if mesh is None:
        return coords, vals
    if coords.shape != mesh.nodes.shape or not np.allclose(coords, mesh.nodes, atol=1e-12):
        raise ValueError("field CSV coordinates do not match the mesh")
    return DiscreteField(mesh, vals)
