"""Experiment orchestration shared by the command-line tool and the tests."""

import json
import os

import numpy as np

from . import metrics
from .config import RunConfig
from .dd import DDConfig, current_density, dd_run
from .geometry import Region, build_regions
from .material import BrauerConstants, load_csv, sample_brauer
from .mesh import triangulate, write_mesh_csv
from .newton import newton_solve
from .vtkio import write_vtk


def build_mesh(cfg):
    geom = cfg.geometry.build()
    return triangulate(build_regions(geom), cfg.mesh_h)


def build_dataset(cfg, n_override=None):
    m = cfg.material
    if m.source == "csv":
        return load_csv(m.csv_path)
    n = n_override if n_override is not None else m.brauer.samples
    return sample_brauer(n, m.brauer.b_max, brauer_constants(cfg))


def brauer_constants(cfg):
    b = cfg.material.brauer
    return BrauerConstants(k1=b.k1, k2=b.k2, k3=b.k3)


def dd_config(cfg, mesh, dataset):
    s = cfg.solver
    return DDConfig(dataset=dataset, mesh=mesh,
                    n_coil=cfg.excitation.turns,
                    current=cfg.excitation.current,
                    coil_area=cfg.excitation.coil_area,
                    switch_iteration=s.switch_iteration,
                    max_iterations=s.max_iterations,
                    min_iterations=s.min_iterations,
                    solver_tol=s.cg_tol,
                    stagnation_tol=s.stagnation_tol,
                    search_window=s.search_window)


def run_dd(cfg, mesh=None, dataset=None):
    mesh = mesh if mesh is not None else build_mesh(cfg)
    dataset = dataset if dataset is not None else build_dataset(cfg)
    sol, log = dd_run(dd_config(cfg, mesh, dataset))
    return sol, log, mesh, dataset


def run_newton(cfg, mesh=None, constants=None):
    mesh = mesh if mesh is not None else build_mesh(cfg)
    dcfg = dd_config(cfg, mesh, dataset=None)
    j_field = current_density(dcfg)
    constants = constants if constants is not None else brauer_constants(cfg)
    return newton_solve(mesh, constants, j_field,
                        tol=cfg.solver.newton_tol), mesh


def run_sweep(cfg, n_list):
    """One reference solve plus one data-driven solve per cardinality."""
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("need an ascending list of at least three cardinalities")
    mesh = build_mesh(cfg)
    ref, _ = run_newton(cfg, mesh=mesh)
    study = metrics.ConvergenceStudy()
    for n in n_list:
        dataset = build_dataset(cfg, n_override=n)
        sol, log = dd_run(dd_config(cfg, mesh, dataset))
        study.add(n, metrics.energy_mismatch(sol, ref, mesh),
                  metrics.rel_airgap_error(sol, ref, mesh),
                  sol.iterations)
    return study, mesh, ref


def write_fields(out_dir, mesh, sol, prefix="fields"):
    """fields.csv (fixed column order) plus a legacy-VTK twin."""
    path_csv = os.path.join(out_dir, f"{prefix}.csv")
    with open(path_csv, "w", newline="") as f:
        f.write("id,x,y,Bx,By,Hx,Hy,region\n")
        cx, cy = mesh.centroids[:, 0], mesh.centroids[:, 1]
        for i in range(mesh.n_elements):
            f.write(f"{i},{cx[i]!r},{cy[i]!r},"
                    f"{sol.B[i, 0]!r},{sol.B[i, 1]!r},"
                    f"{sol.H[i, 0]!r},{sol.H[i, 1]!r},"
                    f"{Region(mesh.region[i]).name}\n")
    write_vtk(os.path.join(out_dir, f"{prefix}.vtk"), mesh,
              cell_scalars={"region": mesh.region},
              cell_vectors={"B": sol.B, "H": sol.H})
    return path_csv


def read_fields(path):
    """Read a fields.csv written by write_fields."""
    ids, xs, ys, bx, by, hx, hy, regs = [], [], [], [], [], [], [], []
    with open(path) as f:
        header = next(f).strip()
        if header != "id,x,y,Bx,By,Hx,Hy,region":
            raise ValueError(f"{path}: unexpected fields.csv header")
        for line in f:
            parts = line.strip().split(",")
            ids.append(int(parts[0]))
            xs.append(float(parts[1]))
            ys.append(float(parts[2]))
            bx.append(float(parts[3]))
            by.append(float(parts[4]))
            hx.append(float(parts[5]))
            hy.append(float(parts[6]))
            regs.append(int(Region[parts[7]]))
    return {"centroids": np.column_stack([xs, ys]),
            "B": np.column_stack([bx, by]),
            "H": np.column_stack([hx, hy]),
            "region": np.asarray(regs, dtype=np.int32)}


def write_summary(out_dir, payload):
    path = os.path.join(out_dir, "summary.json")
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def write_run_outputs(out_dir, cfg, mesh, sol, log, solver_name):
    os.makedirs(out_dir, exist_ok=True)
    write_mesh_csv(mesh, os.path.join(out_dir, "vertices.csv"),
                   os.path.join(out_dir, "triangles.csv"))
    write_vtk(os.path.join(out_dir, "mesh.vtk"), mesh,
              cell_scalars={"region": mesh.region})
    write_fields(out_dir, mesh, sol)
    w_air = metrics.airgap_energy(sol, mesh)
    if solver_name == "dd":
        log.write_csv(os.path.join(out_dir, "convergence.csv"))
        summary = {"solver": "dd",
                   "iterations": sol.iterations,
                   "final_functional": sol.functional,
                   "status": sol.status,
                   "converged": sol.converged,
                   "W_air": w_air,
                   "elements": mesh.n_elements,
                   "vertices": mesh.n_vertices,
                   "dataset_cardinality": None}
    else:
        with open(os.path.join(out_dir, "convergence.csv"), "w", newline="") as f:
            f.write("iteration,relative_residual\n")
            for i, r in enumerate(sol.residual_history, start=1):
                f.write(f"{i},{r!r}\n")
        summary = {"solver": "newton",
                   "iterations": sol.iterations,
                   "final_residual": sol.residual,
                   "converged": True,
                   "W_air": w_air,
                   "elements": mesh.n_elements,
                   "vertices": mesh.n_vertices}
    return summary
