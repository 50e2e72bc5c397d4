"""Data-driven magnetostatic solver: alternating field/data minimization.

Each iteration performs two linear solves that project the current data
assignment onto the set of Maxwell-conforming states,

    a(A, w)   = (nu_t B_x, curl w)                 B = curl A
    a(eta, w) = (J, w) - (H_x, curl w)             H = H_x + nu_t curl eta

(the multiplier eta absorbs the sign so that the updated H satisfies
Ampere's law against every test function), followed by the projection of
the updated per-element states back onto the data: iron elements pick the
weighted-nearest sample per Cartesian component, vacuum-law regions (air,
gap, coil) project onto the line B = mu0 * H in closed form. Weights
start from one global secant and switch to per-element local secants
after a fixed number of iterations.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import fem
from .errors import ValidationError
from .geometry import Region, IRON_REGIONS
from .material import (MU0, NU0, MaterialDataSet, assign_nearest,
                       global_weight, weights_from_slope)


@dataclass
class DDConfig:
    """Knobs of one data-driven run."""

    dataset: MaterialDataSet
    mesh: object
    n_coil: int = 66
    current: float = 50.0
    coil_area: float = None      # m^2 per window; None = measured from the mesh
    switch_iteration: int = 4    # global weights for this many iterations; None = never switch
    max_iterations: int = 200
    min_iterations: int = 0      # force at least this many iterations (budget studies)
    solver_tol: float = 1e-10
    stagnation_tol: float = 1e-12
    search_window: int = 0       # 0 = exhaustive data scan
    data_regions: tuple = IRON_REGIONS

    def __post_init__(self):
        if self.switch_iteration is not None:
            if self.switch_iteration < 1:
                raise ValidationError("switch_iteration must be >= 1")
            if self.max_iterations <= self.switch_iteration:
                raise ValidationError("max_iterations must exceed switch_iteration")
        if self.solver_tol <= 0 or self.stagnation_tol <= 0:
            raise ValidationError("tolerances must be positive")


@dataclass
class DDState:
    """Mutable per-iteration state of the alternating minimization."""

    A: np.ndarray            # (nv,) vector potential dofs
    eta: np.ndarray          # (nv,) multiplier dofs
    H: np.ndarray            # (nt, 2) field strength
    B: np.ndarray            # (nt, 2) flux density
    Hx: np.ndarray           # (nt, 2) assigned data states
    Bx: np.ndarray
    indices: np.ndarray      # (nt, 2) data indices, -1 in vacuum regions
    mu: np.ndarray           # (nt,) weights
    nu: np.ndarray
    iteration: int = 0


@dataclass
class ConvergenceLog:
    """One row per performed iteration."""

    iteration: list = field(default_factory=list)
    functional: list = field(default_factory=list)
    changed: list = field(default_factory=list)
    weight_mode: list = field(default_factory=list)
    weights_changed: list = field(default_factory=list)
    cg_iters_A: list = field(default_factory=list)
    cg_iters_eta: list = field(default_factory=list)

    def __len__(self):
        return len(self.iteration)

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            f.write("iteration,functional_J,changed_assignments,"
                    "weight_mode,cg_iters_A,cg_iters_eta\n")
            for row in zip(self.iteration, self.functional, self.changed,
                           self.weight_mode, self.cg_iters_A, self.cg_iters_eta):
                f.write(f"{row[0]},{row[1]!r},{row[2]},{row[3]},{row[4]},{row[5]}\n")


@dataclass
class DDSolution:
    """Converged fields, assignments and termination status."""

    A: np.ndarray
    eta: np.ndarray
    H: np.ndarray
    B: np.ndarray
    Hx: np.ndarray
    Bx: np.ndarray
    indices: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    iterations: int
    functional: float
    status: str              # assignments_stable | stagnated | max_iterations
    converged: bool


def current_density(cfg):
    """Uniform stranded-conductor current density, (nt,) in A/m^2.

    +n_coil*I/area on the positive window, the negative on the return
    window; the two integrals cancel exactly when the default (mesh
    measured) window area is used.
    """
    mesh = cfg.mesh
    j = np.zeros(mesh.n_elements)
    pos = mesh.region == int(Region.COIL_POS)
    neg = mesh.region == int(Region.COIL_NEG)
    area_pos = mesh.areas[pos].sum()
    area_neg = mesh.areas[neg].sum()
    if cfg.coil_area is not None:
        if cfg.coil_area <= 0:
            raise ValidationError("coil_area must be positive")
        area_pos = area_neg = cfg.coil_area
    ampere_turns = cfg.n_coil * cfg.current
    if area_pos > 0:
        j[pos] = ampere_turns / area_pos
    if area_neg > 0:
        j[neg] = -ampere_turns / area_neg
    return j


def _data_mask(cfg):
    return np.isin(cfg.mesh.region, [int(r) for r in cfg.data_regions])


def _weight_fields(cfg, indices, local):
    """Per-element (mu, nu); vacuum elements always carry (mu0, nu0)."""
    mesh = cfg.mesh
    nu = np.full(mesh.n_elements, NU0)
    data = _data_mask(cfg)
    if local:
        slopes = cfg.dataset.secant_slopes
        # scalar weight per element from the dominant-|B*| component
        bx = np.abs(cfg.dataset.B[indices[data]])
        dom = np.argmax(bx, axis=1)
        idx_dom = indices[data][np.arange(dom.size), dom]
        nu_data = np.clip(slopes[idx_dom], 1e-12 * NU0, NU0)
    else:
        nu_data = min(max(cfg.dataset.overall_secant(), 1e-12 * NU0), NU0)
    nu[data] = nu_data
    return 1.0 / nu, nu


def dd_initialize(cfg):
    """State with zero fields and every data element assigned to the
    sample closest to the origin (the zero state for symmetrized sets)."""
    mesh = cfg.mesh
    nt, nv = mesh.n_elements, mesh.n_vertices
    d = cfg.dataset
    w0 = global_weight(d)
    origin = int(np.argmin(0.5 * w0.mu * d.H ** 2 + 0.5 * w0.nu * d.B ** 2))
    data = _data_mask(cfg)
    indices = np.full((nt, 2), -1, dtype=np.int64)
    indices[data] = origin
    Hx = np.zeros((nt, 2))
    Bx = np.zeros((nt, 2))
    Hx[data] = d.H[origin]
    Bx[data] = d.B[origin]
    mu, nu = _weight_fields(cfg, indices, local=False)
    return DDState(A=np.zeros(nv), eta=np.zeros(nv),
                   H=np.zeros((nt, 2)), B=np.zeros((nt, 2)),
                   Hx=Hx, Bx=Bx, indices=indices, mu=mu, nu=nu)


def distance_functional(state, mesh):
    """Phase-space distance sum_e A_e (mu/2 |H-Hx|^2 + nu/2 |B-Bx|^2)."""
    dh2 = np.sum((state.H - state.Hx) ** 2, axis=1)
    db2 = np.sum((state.B - state.Bx) ** 2, axis=1)
    return float(np.sum(mesh.areas * (0.5 * state.mu * dh2
                                      + 0.5 * state.nu * db2)))


def dd_iterate(state, cfg, j_field=None, basis=None, log=None,
               local_weights=None):
    """One alternating-minimization step; mutates and returns state.

    local_weights overrides the mode derived from cfg.switch_iteration
    (used by dd_run, which knows the iteration count).
    """
    mesh = cfg.mesh
    basis = basis or fem.P1Basis(mesh)
    if j_field is None:
        j_field = current_density(cfg)
    k = state.iteration + 1
    if local_weights is None:
        local_weights = (cfg.switch_iteration is not None
                         and k > cfg.switch_iteration)

    mu_old, nu_old = state.mu, state.nu
    state.mu, state.nu = _weight_fields(cfg, state.indices, local_weights)
    weights_changed = not (np.array_equal(mu_old, state.mu)
                           and np.array_equal(nu_old, state.nu))

    stiff = fem.assemble_stiffness(mesh, state.nu, basis=basis)
    st_a, st_e = {}, {}
    rhs_a = fem.assemble_rhs_B(mesh, state.nu, state.Bx, basis=basis)
    state.A = fem.solve_spd(stiff, rhs_a, tol=cfg.solver_tol, x0=state.A,
                            stats=st_a)
    rhs_eta = -fem.assemble_rhs_H_J(mesh, state.Hx, j_field, basis=basis)
    state.eta = fem.solve_spd(stiff, rhs_eta, tol=cfg.solver_tol, x0=state.eta,
                              stats=st_e)

    state.B = basis.element_curl(state.A)
    state.H = state.Hx + state.nu[:, None] * basis.element_curl(state.eta)

    data = _data_mask(cfg)
    new_idx = state.indices.copy()
    new_idx[data] = assign_nearest(
        cfg.dataset, state.H[data], state.B[data],
        state.mu[data], state.nu[data],
        window=cfg.search_window,
        prev=state.indices[data] if cfg.search_window > 0 else None)
    changed = int(np.count_nonzero(np.any(new_idx[data] != state.indices[data],
                                          axis=1)))
    state.indices = new_idx
    state.Hx[data] = cfg.dataset.H[new_idx[data]]
    state.Bx[data] = cfg.dataset.B[new_idx[data]]

    vac = ~data
    h_star = 0.5 * (state.H[vac] + state.B[vac] / MU0)
    state.Hx[vac] = h_star
    state.Bx[vac] = MU0 * h_star

    state.iteration = k
    if log is not None:
        log.iteration.append(k)
        log.functional.append(distance_functional(state, mesh))
        log.changed.append(changed)
        log.weight_mode.append("local" if local_weights else "global")
        log.weights_changed.append(weights_changed)
        log.cg_iters_A.append(st_a["iterations"])
        log.cg_iters_eta.append(st_e["iterations"])
    return state, changed


def dd_run(cfg, initial_state=None):
    """Iterate to a fixed point of the two projections.

    Stops at the first iteration with zero data reassignments while the
    weights are in their final mode (local when switching is enabled), or
    when the distance functional stagnates below the relative
    stagnation_tol, or at max_iterations (flagged, not raised).
    """
    mesh = cfg.mesh
    basis = fem.P1Basis(mesh)
    j_field = current_density(cfg)
    state = initial_state if initial_state is not None else dd_initialize(cfg)
    log = ConvergenceLog()
    final_local = cfg.switch_iteration is not None

    status = "max_iterations"
    for _ in range(cfg.max_iterations):
        state, changed = dd_iterate(state, cfg, j_field=j_field, basis=basis,
                                    log=log)
        k = state.iteration
        if k < max(cfg.min_iterations, 1):
            continue
        mode_is_final = (log.weight_mode[-1] == "local") == final_local
        if changed == 0 and mode_is_final:
            status = "assignments_stable"
            break
        if len(log) >= 2:
            j_now, j_prev = log.functional[-1], log.functional[-2]
            if abs(j_now - j_prev) <= cfg.stagnation_tol * j_now:
                status = "stagnated"
                break

    return DDSolution(A=state.A, eta=state.eta, H=state.H, B=state.B,
                      Hx=state.Hx, Bx=state.Bx, indices=state.indices,
                      mu=state.mu, nu=state.nu,
                      iterations=state.iteration,
                      functional=log.functional[-1],
                      status=status,
                      converged=status != "max_iterations"), log
