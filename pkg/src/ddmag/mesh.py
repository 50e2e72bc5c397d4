"""Structured triangular meshing of tagged rectangle layouts.

The mesher places a tensor-product lattice whose tick lines contain every
rectangle edge, so region boundaries coincide with element edges and the
triangulation is conforming by construction. Each lattice cell is split
into two triangles; the split diagonal flips with the sign of x so the
triangulation of a symmetric layout is itself mirror-symmetric.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MeshResolutionError, ValidationError
from .geometry import Region

# gap must hold at least this many element layers ...
MIN_GAP_LAYERS = 2
# ... and the cells inside it must not degenerate into slivers
GAP_ASPECT_MAX = 8.0


@dataclass(frozen=True)
class Mesh:
    """Conforming triangle mesh with per-element region tags.

    vertices: (nv, 2) float64, triangles: (nt, 3) int32 (CCW),
    region: (nt,) int32 Region codes, boundary: (nv,) bool flags for
    vertices on the outer rectangle.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    region: np.ndarray
    boundary: np.ndarray
    areas: np.ndarray = field(init=False)
    centroids: np.ndarray = field(init=False)

    def __post_init__(self):
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        areas = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        if np.any(areas <= 0.0):
            raise ValidationError("mesh contains non-CCW or degenerate triangles")
        object.__setattr__(self, "areas", areas)
        object.__setattr__(self, "centroids", p.mean(axis=1))
        for arr in (self.vertices, self.triangles, self.region,
                    self.boundary, self.areas, self.centroids):
            arr.setflags(write=False)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_elements(self):
        return self.triangles.shape[0]

    def elements_in(self, *regions):
        codes = [int(r) for r in regions]
        return np.flatnonzero(np.isin(self.region, codes))

    def free_vertices(self):
        return np.flatnonzero(~self.boundary)


def _segment_ticks(lo, hi, h, n_min=1):
    """Subdivide [lo, hi] into ceil((hi-lo)/h) pieces, at least n_min."""
    n = max(n_min, int(math.ceil((hi - lo) / h - 1e-9)))
    return np.linspace(lo, hi, n + 1)


def _axis_ticks(cuts, h, forced=()):
    """Ticks covering [min(cuts), max(cuts)] with spacing <= h per segment.

    forced maps a (lo, hi) cut interval to a minimum subdivision count.
    """
    cuts = np.unique(np.asarray(sorted(cuts), dtype=float))
    ticks = [np.array([cuts[0]])]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        n_min = 1
        for (flo, fhi), n in forced:
            if flo <= lo and hi <= fhi:
                n_min = max(n_min, n)
        ticks.append(_segment_ticks(lo, hi, h, n_min)[1:])
    return np.concatenate(ticks)


def triangulate(regions, h):
    """Mesh a tagged rectangle layout with target edge length h (meters).

    regions is a list of (Rect, Region) pairs with exactly one AIR entry,
    the enclosing box. The target h is reduced per lattice segment to the
    nearest divisor of the segment length, so thin regions (the air gap)
    stay resolved under a coarse global h; the gap always receives at
    least MIN_GAP_LAYERS element layers. Raises MeshResolutionError when
    h is too coarse for the gap, i.e. its cells would exceed the
    GAP_ASPECT_MAX aspect ratio even at the minimum layer count.
    """
    if h <= 0.0:
        raise ValidationError("edge length h must be positive")
    background = [r for r, t in regions if t == Region.AIR]
    if len(background) != 1:
        raise ValidationError("expected exactly one AIR background rectangle")
    box = background[0]
    tagged = [(r, t) for r, t in regions if t != Region.AIR]

    if h > min(box.width, box.height) + 1e-15:
        raise MeshResolutionError(f"h = {h:g} m exceeds the domain size")
    for r, t in tagged:
        if t == Region.AIR_GAP:
            limit = GAP_ASPECT_MAX * r.height / MIN_GAP_LAYERS
            if h > limit + 1e-15:
                raise MeshResolutionError(
                    f"h = {h:g} m too coarse for the {r.height:g} m air gap "
                    f"(limit {limit:g} m)")

    xcuts = {box.x0, box.x1}
    ycuts = {box.y0, box.y1}
    for r, _ in tagged:
        xcuts.update((r.x0, r.x1))
        ycuts.update((r.y0, r.y1))
    if box.x0 < 0.0 < box.x1:
        xcuts.add(0.0)  # symmetry line, lets the diagonal pattern mirror

    forced_y = [((r.y0, r.y1), MIN_GAP_LAYERS)
                for r, t in regions if t == Region.AIR_GAP]
    x = _axis_ticks(xcuts, h)
    y = _axis_ticks(ycuts, h, forced_y)
    nx, ny = len(x) - 1, len(y) - 1

    # vertex grid, index = ix * (ny + 1) + iy
    xv, yv = np.meshgrid(x, y, indexing="ij")
    vertices = np.column_stack([xv.ravel(), yv.ravel()])

    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    ix, iy = ix.ravel(), iy.ravel()
    a = ix * (ny + 1) + iy
    b = (ix + 1) * (ny + 1) + iy
    c = (ix + 1) * (ny + 1) + iy + 1
    d = ix * (ny + 1) + iy + 1

    xc = 0.5 * (x[ix] + x[ix + 1])
    yc = 0.5 * (y[iy] + y[iy + 1])
    right = xc >= 0.0  # diagonal a-c on the right half, b-d mirrored on the left

    t1 = np.where(right[:, None], np.column_stack([a, b, c]),
                  np.column_stack([a, b, d]))
    t2 = np.where(right[:, None], np.column_stack([a, c, d]),
                  np.column_stack([b, c, d]))
    triangles = np.empty((2 * nx * ny, 3), dtype=np.int32)
    triangles[0::2] = t1
    triangles[1::2] = t2

    cell_region = np.full(nx * ny, int(Region.AIR), dtype=np.int32)
    for r, t in tagged:
        inside = (xc > r.x0) & (xc < r.x1) & (yc > r.y0) & (yc < r.y1)
        cell_region[inside] = int(t)
    region = np.repeat(cell_region, 2)

    on_edge_x = (vertices[:, 0] == x[0]) | (vertices[:, 0] == x[-1])
    on_edge_y = (vertices[:, 1] == y[0]) | (vertices[:, 1] == y[-1])
    boundary = on_edge_x | on_edge_y

    return Mesh(vertices, triangles, region, boundary)


def write_mesh_csv(mesh, vertices_path, triangles_path):
    """Write vertices.csv (id,x,y) and triangles.csv (id,v0,v1,v2,region)."""
    with open(vertices_path, "w", newline="") as f:
        f.write("id,x,y\n")
        for i, (px, py) in enumerate(mesh.vertices):
            f.write(f"{i},{px!r},{py!r}\n")
    with open(triangles_path, "w", newline="") as f:
        f.write("id,v0,v1,v2,region\n")
        for i, (t, reg) in enumerate(zip(mesh.triangles, mesh.region)):
            f.write(f"{i},{t[0]},{t[1]},{t[2]},{Region(reg).name}\n")


def read_mesh_csv(vertices_path, triangles_path):
    """Inverse of write_mesh_csv."""
    verts = []
    with open(vertices_path) as f:
        next(f)
        for line in f:
            _, px, py = line.strip().split(",")
            verts.append((float(px), float(py)))
    tris, regs = [], []
    with open(triangles_path) as f:
        next(f)
        for line in f:
            _, v0, v1, v2, reg = line.strip().split(",")
            tris.append((int(v0), int(v1), int(v2)))
            regs.append(int(Region[reg]))
    vertices = np.asarray(verts, dtype=float)
    triangles = np.asarray(tris, dtype=np.int32)
    region = np.asarray(regs, dtype=np.int32)
    x0, y0 = vertices.min(axis=0)
    x1, y1 = vertices.max(axis=0)
    boundary = ((vertices[:, 0] == x0) | (vertices[:, 0] == x1)
                | (vertices[:, 1] == y0) | (vertices[:, 1] == y1))
    return Mesh(vertices, triangles, region, boundary)
