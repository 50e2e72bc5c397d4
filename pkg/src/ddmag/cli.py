"""Command-line driver.

Subcommands:
    ddmag mesh          write vertices.csv / triangles.csv / mesh.vtk
    ddmag solve-dd      run the data-driven solver, write fields + log
    ddmag solve-newton  run the conventional reference solver
    ddmag sweep         data-set cardinality study with slope fit
    ddmag compare       energy metrics between two field exports

Exit codes: 0 success, 1 usage/config error, 2 numerical failure, 3 I/O.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import driver, metrics
from .config import RunConfig, load_config, save_config
from .errors import ConfigError, DdmagError, MeshMismatch, ParseError
from .geometry import Region
from .material import MU0, NU0
from .mesh import read_mesh_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _load_run_config(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "out", None):
        cfg.output_dir = args.out
    if getattr(args, "material_csv", None):
        cfg.material.source = "csv"
        cfg.material.csv_path = args.material_csv
    if getattr(args, "samples", None):
        cfg.material.brauer.samples = args.samples
    return cfg.validate()


def _say(args, message):
    if not args.quiet:
        print(message)


def cmd_mesh(args):
    cfg = _load_run_config(args)
    mesh = driver.build_mesh(cfg)
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    from .mesh import write_mesh_csv
    from .vtkio import write_vtk
    write_mesh_csv(mesh, os.path.join(out, "vertices.csv"),
                   os.path.join(out, "triangles.csv"))
    write_vtk(os.path.join(out, "mesh.vtk"), mesh,
              cell_scalars={"region": mesh.region})
    save_config(cfg, os.path.join(out, "run.cfg"))
    _say(args, f"mesh: {mesh.n_elements} elements, {mesh.n_vertices} vertices "
               f"-> {out}")
    return EXIT_OK


def cmd_solve(args, solver):
    cfg = _load_run_config(args)
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    if solver == "dd":
        sol, log, mesh, dataset = driver.run_dd(cfg)
        summary = driver.write_run_outputs(out, cfg, mesh, sol, log, "dd")
        summary["dataset_cardinality"] = dataset.cardinality
    else:
        sol, mesh = driver.run_newton(cfg)
        summary = driver.write_run_outputs(out, cfg, mesh, sol, None, "newton")
    driver.write_summary(out, summary)
    save_config(cfg, os.path.join(out, "run.cfg"))
    _say(args, f"{solver}: {summary['iterations']} iterations, "
               f"W_air = {summary['W_air']:.6e} J/m -> {out}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load_run_config(args)
    n_list = [int(v) for v in args.cardinalities.split(",")]
    study, mesh, ref = driver.run_sweep(cfg, n_list)
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    study.write_csv(os.path.join(out, "study.csv"))
    study.write_slopes_json(os.path.join(out, "slopes.json"))
    save_config(cfg, os.path.join(out, "run.cfg"))
    slopes = study.slopes()
    _say(args, f"sweep N={n_list}: eps_em slope {slopes['eps_em_slope']:+.3f}, "
               f"eps_W slope {slopes['eps_W_rel_slope']:+.3f} -> {out}")
    return EXIT_OK


class _FieldsSolution:
    def __init__(self, data):
        self.H = data["H"]
        self.B = data["B"]


def cmd_compare(args):
    dd_dir = os.path.dirname(os.path.abspath(args.dd_fields))
    mesh = read_mesh_csv(os.path.join(dd_dir, "vertices.csv"),
                         os.path.join(dd_dir, "triangles.csv"))
    dd = driver.read_fields(args.dd_fields)
    ref = driver.read_fields(args.newton_fields)
    if dd["B"].shape != ref["B"].shape:
        raise MeshMismatch("field files differ in element count")
    if not np.allclose(dd["centroids"], ref["centroids"], atol=1e-9, rtol=0.0):
        raise MeshMismatch("field files come from different meshes")
    if mesh.n_elements != dd["B"].shape[0]:
        raise MeshMismatch("mesh files do not match the field files")

    # reference invariant H = nu_ref * B recovers the chord coefficients;
    # zero-field elements contribute nothing, any positive placeholder works
    b2 = np.sum(ref["B"] ** 2, axis=1)
    hb = np.sum(ref["H"] * ref["B"], axis=1)
    nu_ref = np.where(b2 > 0.0, np.divide(hb, b2, out=np.full_like(b2, NU0),
                                          where=b2 > 0.0), NU0)
    nu_ref = np.clip(nu_ref, 1.0, NU0)
    ref_sol = _FieldsSolution(ref)
    ref_sol.nu_ref = nu_ref
    ref_sol.mu_ref = 1.0 / nu_ref
    dd_sol = _FieldsSolution(dd)

    eps = metrics.energy_mismatch(dd_sol, ref_sol, mesh)
    w_dd = metrics.airgap_energy(dd_sol, mesh)
    w_ref = metrics.airgap_energy(ref_sol, mesh)
    report = {"eps_em": eps, "W_air_dd": w_dd, "W_air_ref": w_ref,
              "eps_W_rel": abs(w_dd - w_ref) / w_ref if w_ref else None}
    out = args.out or dd_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "compare.json"), "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    _say(args, f"eps_em = {eps:.6e}, W_air(dd) = {w_dd:.6e} J/m, "
               f"W_air(ref) = {w_ref:.6e} J/m")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="ddmag", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run configuration file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("mesh", help="triangulate and export the geometry")
    common(p)

    for name in ("solve-dd", "solve-newton"):
        p = sub.add_parser(name, help=f"run the {name.split('-')[1]} solver")
        common(p)
        p.add_argument("--material-csv", help="measured H,B curve (switches "
                                              "the material source to csv)")
        p.add_argument("--samples", type=int,
                       help="synthetic data-set cardinality")

    p = sub.add_parser("sweep", help="cardinality convergence study")
    common(p)
    p.add_argument("--cardinalities", default="10,50,100,500,1000",
                   help="comma-separated ascending data-set sizes")

    p = sub.add_parser("compare", help="metrics between two fields.csv files")
    p.add_argument("dd_fields")
    p.add_argument("newton_fields")
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "mesh":
            return cmd_mesh(args)
        if args.command == "solve-dd":
            return cmd_solve(args, "dd")
        if args.command == "solve-newton":
            return cmd_solve(args, "newton")
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "compare":
            return cmd_compare(args)
        parser.error(f"unknown command {args.command}")
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DdmagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
