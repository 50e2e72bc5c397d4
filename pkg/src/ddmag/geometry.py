"""Parametric 2D cross-section of an E-I inductor.

The device is an E-shaped yoke (back bar on top, three legs pointing down)
closed by an I-bar underneath, separated by a thin air gap. A coil around
the center leg shows up in the cross-section as two rectangular windows
carrying opposite current directions. Everything sits inside a large
square air box whose boundary carries the homogeneous Dirichlet condition
(flux-parallel wall).

Layout, mirror-symmetric about x = 0 (all lengths in meters, y up,
y = 0 at the top of the I-bar):

    back bar   [-w_fe, w_fe] x [l_air+l_c, l_air+l_c+l_e]
    center leg [-w_e, w_e]   x [l_air, l_air+l_c]      (width 2*w_e)
    coils      [+-w_e .. +-(w_e+w_c)] x [l_air, l_air+l_c]
    outer legh [+-(w_e+w_c) .. +-w_fe] x [l_air, l_air+l_c]
    air gap    [-w_fe, w_fe] x [0, l_air]
    I-bar      [-w_fe, w_fe] x [-l_i, 0]

w_fe is the half-width of the core, so the outer legs have width
w_fe - w_e - w_c (equal to w_e for the default dimensions, giving the
usual E-core flux balance: the center leg is twice as wide as each
outer leg).
"""

from dataclasses import dataclass
from enum import IntEnum

from .errors import GeometryOverlap, ValidationError

MM = 1e-3


class Region(IntEnum):
    AIR = 0
    IRON_E = 1
    IRON_I = 2
    COIL_POS = 3
    COIL_NEG = 4
    AIR_GAP = 5


IRON_REGIONS = (Region.IRON_E, Region.IRON_I)
COIL_REGIONS = (Region.COIL_POS, Region.COIL_NEG)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x0, x1] x [y0, y1]."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValidationError(f"degenerate rectangle {self}")

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def area(self):
        return self.width * self.height

    def contains(self, x, y):
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def overlaps(self, other):
        """True if the open interiors intersect (shared edges do not count)."""
        return (self.x0 < other.x1 and other.x0 < self.x1
                and self.y0 < other.y1 and other.y0 < self.y1)


@dataclass(frozen=True)
class InductorGeometry:
    """E-I inductor dimensions in SI units (meters).

    l_e: back-bar thickness, l_c: leg length = coil window height,
    l_i: I-bar thickness, l_air: air-gap height, w_e: outer-leg width
    (center leg is 2*w_e), w_c: coil window width, w_fe: core half-width.
    """

    l_e: float = 30 * MM
    l_c: float = 90 * MM
    l_i: float = 30 * MM
    l_air: float = 3.3 * MM
    w_e: float = 30 * MM
    w_c: float = 30 * MM
    w_fe: float = 90 * MM
    air_box_half_width: float = 0.28

    def __post_init__(self):
        for name in ("l_e", "l_c", "l_i", "l_air", "w_e", "w_c", "w_fe",
                     "air_box_half_width"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(f"{name} must be strictly positive")
        if self.l_air >= self.l_i:
            raise ValidationError("air gap must be thinner than the I-bar")
        if self.w_fe <= self.w_e + self.w_c:
            raise ValidationError(
                "w_fe must exceed w_e + w_c (outer legs need positive width)")
        yoke = max(self.l_e, self.l_c, self.l_i, self.w_e, self.w_c, self.w_fe)
        if self.air_box_half_width < 3.0 * yoke:
            raise ValidationError(
                "air box half-width below 3x the largest yoke dimension")

    @property
    def device_half_width(self):
        return self.w_fe

    @property
    def coil_window_area(self):
        """In-plane area of one coil window (m^2)."""
        return self.w_c * self.l_c


def default_geometry():
    """Inductor dimensions of the benchmark device, in meters."""
    return InductorGeometry()


def build_regions(geom):
    """Decompose the cross-section into tagged axis-aligned rectangles.

    Returns a list of (Rect, Region) pairs. The air box appears exactly
    once, tagged AIR, and acts as the background for meshing; all other
    rectangles are pairwise non-overlapping and lie inside the box.

    Raises GeometryOverlap if any two tagged rectangles intersect with
    positive area.
    """
    g = geom
    y_leg0 = g.l_air
    y_leg1 = g.l_air + g.l_c
    y_top = y_leg1 + g.l_e
    r = g.air_box_half_width

    regions = [
        (Rect(-g.w_fe, y_leg1, g.w_fe, y_top), Region.IRON_E),          # back bar
        (Rect(-g.w_e, y_leg0, g.w_e, y_leg1), Region.IRON_E),           # center leg
        (Rect(g.w_e + g.w_c, y_leg0, g.w_fe, y_leg1), Region.IRON_E),   # right leg
        (Rect(-g.w_fe, y_leg0, -(g.w_e + g.w_c), y_leg1), Region.IRON_E),
        (Rect(g.w_e, y_leg0, g.w_e + g.w_c, y_leg1), Region.COIL_POS),
        (Rect(-(g.w_e + g.w_c), y_leg0, -g.w_e, y_leg1), Region.COIL_NEG),
        (Rect(-g.w_fe, 0.0, g.w_fe, g.l_air), Region.AIR_GAP),
        (Rect(-g.w_fe, -g.l_i, g.w_fe, 0.0), Region.IRON_I),
        (Rect(-r, -r, r, r), Region.AIR),                               # air box
    ]

    box = regions[-1][0]
    tagged = [rr for rr in regions if rr[1] != Region.AIR]
    for i, (ri, ti) in enumerate(tagged):
        if not (box.x0 <= ri.x0 and ri.x1 <= box.x1
                and box.y0 <= ri.y0 and ri.y1 <= box.y1):
            raise GeometryOverlap(f"{ti.name} rectangle leaves the air box")
        for rj, tj in tagged[i + 1:]:
            if ri.overlaps(rj):
                raise GeometryOverlap(f"{ti.name} overlaps {tj.name}")
    return regions
