"""P1 finite-element kernels for the 2D curl-curl (scalar potential) problem.

Fields live in the z-component of a vector potential, so per triangle

    curl(phi e_z) = (dphi/dy, -dphi/dx),

the rotated gradient, constant on each element. With an orthogonal
rotation the weighted curl-curl bilinear form equals the weighted
gradient Laplacian; everything is assembled from the rotated gradients so
tensor-valued coefficients (Newton tangents) use the same code path.
One-point (centroid) quadrature is exact for all element-constant
integrands appearing here.
"""

import numpy as np
import scipy.sparse as sp

from .errors import NoConvergence, NonPositiveWeight, ValidationError


class P1Basis:
    """Per-element geometry factors: areas, gradients and rotated gradients."""

    def __init__(self, mesh):
        self.mesh = mesh
        p = mesh.vertices[mesh.triangles]  # (nt, 3, 2)
        x, y = p[..., 0], p[..., 1]
        self.area = mesh.areas
        # grad phi_i = (b_i, c_i) / (2A), rotated: (c_i, -b_i) -> use rot = R grad
        b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
        c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
        denom = (2.0 * self.area)[:, None]
        self.grad = np.stack([b / denom, c / denom], axis=2)       # (nt, 3, 2)
        self.rot = np.stack([self.grad[..., 1], -self.grad[..., 0]], axis=2)

    def element_curl(self, dof):
        """Per-element curl (rotated gradient) of a vertex field, (nt, 2)."""
        vals = dof[self.mesh.triangles]                            # (nt, 3)
        return np.einsum("ti,tid->td", vals, self.rot)


def element_curl(basis, dof, element):
    """Curl of the P1 interpolant on one triangle; exact for linear fields."""
    vals = dof[basis.mesh.triangles[element]]
    return vals @ basis.rot[element]


class SparseSpd:
    """Symmetric positive-definite operator over the free (non-Dirichlet) dofs.

    Keeps the full assembled matrix for boundary lifting alongside the
    eliminated free-free block. Construction rejects non-symmetric input.
    """

    def __init__(self, full, free):
        full = full.tocsr()
        asym = abs(full - full.T)
        scale = max(abs(full).max(), 1.0)
        if asym.nnz and asym.max() > 1e-12 * scale:
            raise ValidationError("assembled matrix is not symmetric")
        self.full = full
        self.free = np.asarray(free, dtype=np.int64)
        self.n = full.shape[0]
        self.kff = full[self.free][:, self.free].tocsr()
        diag = self.kff.diagonal()
        if np.any(diag <= 0.0):
            raise ValidationError("non-positive diagonal after elimination")
        self.diag = diag


def _scatter(mesh, ke):
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n))


def assemble_stiffness(mesh, nu_field, basis=None, free=None):
    """Weighted stiffness K_ij = sum_e nu_e * A_e * (rot_i . rot_j).

    nu_field is the per-element scalar coefficient; it must be strictly
    positive. Dirichlet elimination uses mesh.free_vertices() unless a
    custom free set is given.
    """
    nu = np.asarray(nu_field, dtype=float)
    if np.any(nu <= 0.0) or not np.all(np.isfinite(nu)):
        raise NonPositiveWeight("reluctivity field must be strictly positive")
    basis = basis or P1Basis(mesh)
    ke = np.einsum("t,tid,tjd->tij", nu * basis.area, basis.rot, basis.rot)
    full = _scatter(mesh, ke)
    return SparseSpd(full, mesh.free_vertices() if free is None else free)


def assemble_stiffness_tensor(mesh, tensor_field, basis=None, free=None):
    """Stiffness with a per-element symmetric 2x2 coefficient tensor."""
    basis = basis or P1Basis(mesh)
    trot = np.einsum("tde,tje->tjd", tensor_field, basis.rot)
    ke = np.einsum("t,tid,tjd->tij", basis.area, basis.rot, trot)
    full = _scatter(mesh, ke)
    return SparseSpd(full, mesh.free_vertices() if free is None else free)


def assemble_rhs_B(mesh, nu_field, b_field, basis=None):
    """Load vector of (nu_t B_x, curl w): r_i = sum_e nu_e A_e B_e . rot_i."""
    basis = basis or P1Basis(mesh)
    nu = np.asarray(nu_field, dtype=float)
    contrib = np.einsum("t,td,tid->ti", nu * basis.area, b_field, basis.rot)
    rhs = np.zeros(mesh.n_vertices)
    np.add.at(rhs, mesh.triangles.ravel(), contrib.ravel())
    return rhs


def assemble_rhs_H_J(mesh, h_field, j_field, basis=None):
    """Load vector of (H_x, curl w) - (J, w) with one-point quadrature.

    The current term distributes -J_e * A_e / 3 to each vertex of the
    element.
    """
    basis = basis or P1Basis(mesh)
    contrib = np.einsum("td,tid->ti", h_field, basis.rot) * basis.area[:, None]
    contrib -= (np.asarray(j_field, dtype=float) * basis.area / 3.0)[:, None]
    rhs = np.zeros(mesh.n_vertices)
    np.add.at(rhs, mesh.triangles.ravel(), contrib.ravel())
    return rhs


def assemble_load(mesh, j_field, basis=None):
    """P1 load vector (J, w): J_e * A_e / 3 per vertex."""
    basis = basis or P1Basis(mesh)
    contrib = np.broadcast_to(
        (np.asarray(j_field, dtype=float) * basis.area / 3.0)[:, None],
        (mesh.n_elements, 3))
    rhs = np.zeros(mesh.n_vertices)
    np.add.at(rhs, mesh.triangles.ravel(), contrib.ravel())
    return rhs


def solve_spd(m, rhs, tol=1e-10, x0=None, max_iter=None, dirichlet=None,
              stats=None):
    """Jacobi-preconditioned conjugate gradients on the free dofs.

    Solves to ||b - K x|| <= tol * ||b|| in the Euclidean norm and returns
    the full-length dof vector (Dirichlet entries zero, or the supplied
    dirichlet values with boundary lifting applied to the right-hand
    side). Deterministic for fixed inputs. Raises NoConvergence when the
    iteration budget is exhausted; pass stats={} to collect iteration
    counts.
    """
    free = m.free
    b = np.asarray(rhs, dtype=float)[free].copy()
    x_full = np.zeros(m.n)
    if dirichlet is not None:
        g = np.asarray(dirichlet, dtype=float)
        fixed_mask = np.ones(m.n, dtype=bool)
        fixed_mask[free] = False
        x_full[fixed_mask] = g[fixed_mask]
        b -= m.full[free] @ x_full
    k = m.kff
    dinv = 1.0 / m.diag
    x = np.zeros(free.size) if x0 is None else np.asarray(x0, dtype=float)[free].copy()

    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        x_full[free] = 0.0
        if stats is not None:
            stats.update(iterations=0, residual=0.0)
        return x_full

    r = b - k @ x
    z = dinv * r
    p = z.copy()
    rz = r @ z
    limit = max_iter if max_iter is not None else max(200, 20 * free.size)
    res = np.linalg.norm(r)
    it = 0
    while res > tol * b_norm:
        if it >= limit:
            raise NoConvergence(
                f"PCG: {res / b_norm:.3e} relative residual after {it} iterations",
                residual=res / b_norm, iterations=it)
        kp = k @ p
        alpha = rz / (p @ kp)
        x += alpha * p
        r -= alpha * kp
        res = np.linalg.norm(r)
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    if stats is not None:
        stats.update(iterations=it, residual=res / b_norm)
    x_full[free] = x
    return x_full
