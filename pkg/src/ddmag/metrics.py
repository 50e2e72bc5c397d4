"""Error measures between solutions: energy mismatch, air-gap energy,
distance-to-data energy, and log-log convergence slopes.

All integrals are one-point (centroid) sums, exact for the element-wise
constant fields produced by the P1 solvers; 2D energies are per meter of
depth, which cancels in every reported ratio and slope.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateFit, EmptyRegion, MeshMismatch,
                     ReferenceDegenerate)
from .geometry import Region
from .material import assign_nearest


def _check_same_mesh(sol, ref):
    if sol.H.shape != ref.H.shape or sol.B.shape != ref.B.shape:
        raise MeshMismatch("solutions live on different meshes")


def energy_mismatch(sol, ref, mesh):
    """Relative energy-norm distance to the reference solution.

    eps^2 = [ (dH, mu_ref dH) + (dB, nu_ref dB) ]
            / [ (H_ref, mu_ref H_ref) + (B_ref, nu_ref B_ref) ],

    with the reference chord coefficients weighting both terms.
    """
    _check_same_mesh(sol, ref)
    a = mesh.areas
    dh2 = np.sum((sol.H - ref.H) ** 2, axis=1)
    db2 = np.sum((sol.B - ref.B) ** 2, axis=1)
    num = np.sum(a * (ref.mu_ref * dh2 + ref.nu_ref * db2))
    den = (np.sum(a * ref.mu_ref * np.sum(ref.H ** 2, axis=1))
           + np.sum(a * ref.nu_ref * np.sum(ref.B ** 2, axis=1)))
    if den == 0.0:
        raise ReferenceDegenerate("reference fields vanish identically")
    return float(np.sqrt(num / den))


def airgap_energy(sol, mesh):
    """Magnetic energy sum_gap (H . B)/2 * area, J per meter depth."""
    gap = mesh.region == int(Region.AIR_GAP)
    if not np.any(gap):
        raise EmptyRegion("mesh has no AIR_GAP elements")
    hb = np.sum(sol.H[gap] * sol.B[gap], axis=1)
    return float(np.sum(0.5 * hb * mesh.areas[gap]))


def rel_airgap_error(sol, ref, mesh):
    """|W - W_ref| / W_ref for the air-gap energy."""
    w_ref = airgap_energy(ref, mesh)
    if w_ref == 0.0:
        raise ReferenceDegenerate("reference air-gap energy is zero")
    return abs(airgap_energy(sol, mesh) - w_ref) / w_ref


def energy_mismatch_data(sol, dataset, mu, nu, mesh, regions=None):
    """Weighted distance between a solution and its nearest data states.

    eps^2 = (H-Hx, mu_t (H-Hx)) + (B-Bx, nu_t (B-Bx)) over the data-carrying
    regions (default: both iron parts); (Hx, Bx) re-minimized per element
    for the given solution under the supplied weights. Returns
    (eps, per-element distances) so callers can report the maximum
    phase-space distance.
    """
    if regions is None:
        regions = (Region.IRON_E, Region.IRON_I)
    mask = np.isin(mesh.region, [int(r) for r in regions])
    if not np.any(mask):
        raise EmptyRegion("no data-carrying elements in the requested regions")
    idx = assign_nearest(dataset, sol.H[mask], sol.B[mask], mu[mask], nu[mask])
    dh2 = np.sum((sol.H[mask] - dataset.H[idx]) ** 2, axis=1)
    db2 = np.sum((sol.B[mask] - dataset.B[idx]) ** 2, axis=1)
    dens = mu[mask] * dh2 + nu[mask] * db2
    eps2 = np.sum(mesh.areas[mask] * dens)
    return float(np.sqrt(eps2)), dens


@dataclass
class ConvergenceStudy:
    """Energy-mismatch and gap-energy errors over data-set cardinalities."""

    cardinality: list = field(default_factory=list)
    eps_em: list = field(default_factory=list)
    eps_w_rel: list = field(default_factory=list)
    iterations: list = field(default_factory=list)

    def add(self, n, eps_em, eps_w_rel, iterations):
        if self.cardinality and n <= self.cardinality[-1]:
            raise DegenerateFit("cardinalities must be strictly increasing")
        self.cardinality.append(int(n))
        self.eps_em.append(float(eps_em))
        self.eps_w_rel.append(float(eps_w_rel))
        self.iterations.append(int(iterations))

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            f.write("N,eps_em,eps_W_rel,iterations\n")
            for row in zip(self.cardinality, self.eps_em, self.eps_w_rel,
                           self.iterations):
                f.write(f"{row[0]},{row[1]!r},{row[2]!r},{row[3]}\n")

    def slopes(self):
        return {"eps_em_slope": fit_loglog_slope(self, "eps_em"),
                "eps_W_rel_slope": fit_loglog_slope(self, "eps_w_rel")}

    def write_slopes_json(self, path):
        with open(path, "w") as f:
            json.dump(self.slopes(), f, indent=2, sort_keys=True)
            f.write("\n")


def fit_loglog_slope(study, metric):
    """Least-squares slope of log(metric) against log(N)."""
    n = np.asarray(study.cardinality, dtype=float)
    y = np.asarray(getattr(study, metric), dtype=float)
    if n.size < 3:
        raise DegenerateFit("slope fit needs at least three points")
    if np.all(n == n[0]):
        raise DegenerateFit("all cardinalities identical")
    if np.any(y <= 0.0):
        # zero error (exact recovery) carries no slope information
        raise DegenerateFit("metric must be positive for a log-log fit")
    coeffs = np.polyfit(np.log(n), np.log(y), 1)
    return float(coeffs[0])
