"""Damped Newton solver for the conventional nonlinear magnetostatic problem.

Solves curl(nu(|B|) curl A) = J with the exponential reluctivity model in
the iron regions and vacuum elsewhere, using the consistent tangent

    dH/dB = nu(|B|) I + nu'(|B|)/|B| * B (x) B
          = nu(|B|) I + 2 k1 k2 exp(k2 |B|^2) * B (x) B,

whose second form is regular at B = 0 (isotropic limit nu(0) I). Armijo
backtracking damps the update whenever the residual norm would not
decrease.
"""

from dataclasses import dataclass, field

import numpy as np

from . import fem
from .errors import NewtonDiverged, NoConvergence
from .geometry import IRON_REGIONS
from .material import NU0, brauer_reluctivity

ARMIJO_SLOPE = 1e-4
MAX_BACKTRACKS = 10


@dataclass
class ReferenceSolution:
    """Converged conventional solution with per-element chord coefficients."""

    A: np.ndarray
    B: np.ndarray            # (nt, 2)
    H: np.ndarray            # (nt, 2), H = nu_ref * B per element
    nu_ref: np.ndarray       # (nt,) chord reluctivity
    mu_ref: np.ndarray       # (nt,) 1 / nu_ref
    iterations: int
    residual: float          # final relative residual
    residual_history: list = field(default_factory=list)


def consistent_tangent(b_vec, c):
    """2x2 tangent dH/dB of the exponential model at one flux density."""
    b_vec = np.asarray(b_vec, dtype=float)
    b2 = float(b_vec @ b_vec)
    nu = c.k1 * np.exp(c.k2 * b2) + c.k3
    coeff = 2.0 * c.k1 * c.k2 * np.exp(c.k2 * b2)
    return nu * np.eye(2) + coeff * np.outer(b_vec, b_vec)


def _tangent_field(b, c, iron_mask):
    """Vectorized per-element tangents; vacuum elements get nu0 * I."""
    nt = b.shape[0]
    tensors = np.zeros((nt, 2, 2))
    tensors[:, 0, 0] = NU0
    tensors[:, 1, 1] = NU0
    bi = b[iron_mask]
    b2 = np.sum(bi * bi, axis=1)
    expo = np.exp(c.k2 * b2)
    nu = c.k1 * expo + c.k3
    coeff = 2.0 * c.k1 * c.k2 * expo
    t = coeff[:, None, None] * (bi[:, :, None] * bi[:, None, :])
    t[:, 0, 0] += nu
    t[:, 1, 1] += nu
    tensors[iron_mask] = t
    return tensors


def _chord_field(b, c, iron_mask):
    nu = np.full(b.shape[0], NU0)
    b_mag = np.linalg.norm(b[iron_mask], axis=1)
    nu[iron_mask] = brauer_reluctivity(b_mag, c)
    return nu


def residual_vector(mesh, basis, a_dof, c, j_field, iron_mask):
    """Weak residual (H(curl A), curl w) - (J, w) on the free dofs."""
    b = basis.element_curl(a_dof)
    h = _chord_field(b, c, iron_mask)[:, None] * b
    return fem.assemble_rhs_H_J(mesh, h, j_field, basis=basis), b


def newton_solve(mesh, c, j_field, tol=1e-12, max_iter=50, cg_tol=1e-13,
                 iron_regions=IRON_REGIONS):
    """Solve the nonlinear magnetostatic problem to a relative residual.

    Terminates when ||R(A)|| <= tol * ||R(0)||. Raises NewtonDiverged if
    backtracking cannot reduce the residual and NoConvergence when the
    iteration budget runs out.
    """
    basis = fem.P1Basis(mesh)
    iron = np.isin(mesh.region, [int(r) for r in iron_regions])
    free = mesh.free_vertices()

    a_dof = np.zeros(mesh.n_vertices)
    r_full, b = residual_vector(mesh, basis, a_dof, c, j_field, iron)
    r0 = np.linalg.norm(r_full[free])
    history = []
    if r0 == 0.0:
        nu_ref = _chord_field(b, c, iron)
        return ReferenceSolution(A=a_dof, B=b, H=nu_ref[:, None] * b,
                                 nu_ref=nu_ref, mu_ref=1.0 / nu_ref,
                                 iterations=0, residual=0.0,
                                 residual_history=history)

    r_norm = r0
    for it in range(1, max_iter + 1):
        tangents = _tangent_field(b, c, iron)
        k_t = fem.assemble_stiffness_tensor(mesh, tangents, basis=basis)
        delta = fem.solve_spd(k_t, -r_full, tol=cg_tol)

        step = 1.0
        for _ in range(MAX_BACKTRACKS + 1):
            a_try = a_dof + step * delta
            r_try, b_try = residual_vector(mesh, basis, a_try, c, j_field, iron)
            r_try_norm = np.linalg.norm(r_try[free])
            if r_try_norm <= (1.0 - ARMIJO_SLOPE * step) * r_norm:
                break
            step *= 0.5
        else:
            raise NewtonDiverged(
                f"no residual decrease after {MAX_BACKTRACKS} halvings "
                f"(iteration {it}, residual {r_norm / r0:.3e})")

        a_dof, r_full, b, r_norm = a_try, r_try, b_try, r_try_norm
        history.append(r_norm / r0)
        if r_norm <= tol * r0:
            nu_ref = _chord_field(b, c, iron)
            return ReferenceSolution(A=a_dof, B=b, H=nu_ref[:, None] * b,
                                     nu_ref=nu_ref, mu_ref=1.0 / nu_ref,
                                     iterations=it, residual=r_norm / r0,
                                     residual_history=history)

    raise NoConvergence(
        f"Newton: relative residual {r_norm / r0:.3e} after {max_iter} iterations",
        residual=r_norm / r0, iterations=max_iter)
