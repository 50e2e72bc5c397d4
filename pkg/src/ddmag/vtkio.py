"""Minimal legacy-VTK (ASCII) writer for triangle meshes with cell data."""

VTK_TRIANGLE = 5


def write_vtk(path, mesh, cell_scalars=None, cell_vectors=None, title="ddmag"):
    """Write an unstructured grid with optional per-element data.

    cell_scalars: {name: (nt,) array}, cell_vectors: {name: (nt, 2) array}
    (padded with a zero z-component).
    """
    cell_scalars = cell_scalars or {}
    cell_vectors = cell_vectors or {}
    nt = mesh.n_elements
    with open(path, "w", newline="") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"{title}\n")
        f.write("ASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {mesh.n_vertices} double\n")
        for x, y in mesh.vertices:
            f.write(f"{x!r} {y!r} 0.0\n")
        f.write(f"CELLS {nt} {4 * nt}\n")
        for t in mesh.triangles:
            f.write(f"3 {t[0]} {t[1]} {t[2]}\n")
        f.write(f"CELL_TYPES {nt}\n")
        for _ in range(nt):
            f.write(f"{VTK_TRIANGLE}\n")
        if cell_scalars or cell_vectors:
            f.write(f"CELL_DATA {nt}\n")
            for name, values in cell_scalars.items():
                kind = "int" if values.dtype.kind in "iu" else "double"
                f.write(f"SCALARS {name} {kind} 1\n")
                f.write("LOOKUP_TABLE default\n")
                for v in values:
                    f.write(f"{int(v)}\n" if kind == "int" else f"{v!r}\n")
            for name, vec in cell_vectors.items():
                f.write(f"VECTORS {name} double\n")
                for vx, vy in vec:
                    f.write(f"{vx!r} {vy!r} 0.0\n")
