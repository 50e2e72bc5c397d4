"""Measurement data sets, the Brauer curve, and phase-space projections.

A material is represented by a finite set of scalar (H*, B*) samples, one
curve shared by both Cartesian components. The weighted distance between a
field state and a sample is

    d(i) = mu_t/2 * (h - H*_i)^2 + nu_t/2 * (b - B*_i)^2,

with the weight pair (mu_t, nu_t) coupled reciprocally (mu_t * nu_t = 1)
and bounded by mu0 <= mu_t and 0 < nu_t <= nu0. Regions with a known
linear law bypass the data set via a closed-form projection onto the line
B = mu * H.
"""

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonPositiveWeight, ParseError, ValidationError

MU0 = 4e-7 * math.pi
NU0 = 1.0 / MU0

# positive floor realizing the open lower bound 0 < nu_t
NU_FLOOR = 1e-12 * NU0


@dataclass(frozen=True)
class BrauerConstants:
    """Exponential reluctivity model nu(B) = k1*exp(k2*B^2) + k3.

    k1 = 0 degenerates to a linear material with reluctivity k3.
    """

    k1: float = 10.0
    k2: float = 1.8
    k3: float = 100.0

    def __post_init__(self):
        if self.k1 < 0.0 or self.k2 <= 0.0 or self.k3 <= 0.0:
            raise ValidationError("Brauer constants require k1 >= 0, k2 > 0, k3 > 0")


def brauer_reluctivity(b_mag, c):
    """nu(|B|) = k1*exp(k2*B^2) + k3, in m/H."""
    b = np.asarray(b_mag, dtype=float)
    return c.k1 * np.exp(c.k2 * b * b) + c.k3


def brauer_H(b, c):
    """Field strength H(B) = nu(B)*B of the exponential model; odd in B."""
    b = np.asarray(b, dtype=float)
    return brauer_reluctivity(b, c) * b


def brauer_differential_reluctivity(b, c):
    """dH/dB = k1*exp(k2*B^2)*(1 + 2*k2*B^2) + k3; >= nu(B) everywhere."""
    b = np.asarray(b, dtype=float)
    b2 = b * b
    return c.k1 * np.exp(c.k2 * b2) * (1.0 + 2.0 * c.k2 * b2) + c.k3


@dataclass(frozen=True)
class WeightPair:
    """Reciprocal phase-space metric coefficients (mu_t in H/m, nu_t in m/H)."""

    mu: float
    nu: float

    def __post_init__(self):
        if not (MU0 <= self.mu and 0.0 < self.nu <= NU0):
            raise NonPositiveWeight(f"weights out of bounds: {self}")


def weights_from_slope(slope):
    """Clamp a secant slope dH/dB into the admissible band, return a pair."""
    nu = min(max(float(slope), NU_FLOOR), NU0)
    return WeightPair(mu=1.0 / nu, nu=nu)


@dataclass(frozen=True)
class ElementState:
    """One phase-space state: 2-vectors H (A/m) and B (T)."""

    H: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "H", np.asarray(self.H, dtype=float))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float))
        if not (np.all(np.isfinite(self.H)) and np.all(np.isfinite(self.B))):
            raise ValidationError("non-finite element state")


class MaterialDataSet:
    """Scalar (H*, B*) samples sorted by B*, closed under (H,B) -> (-H,-B).

    cardinality reports the sample count of the non-negative branch, the
    convention used when quoting data-set sizes; len() is the stored
    (symmetrized) count.
    """

    def __init__(self, h_star, b_star, provenance, cardinality=None,
                 validate_monotone=True):
        h = np.asarray(h_star, dtype=float)
        b = np.asarray(b_star, dtype=float)
        if h.ndim != 1 or h.shape != b.shape or h.size == 0:
            raise ValidationError("samples must be matching non-empty 1D arrays")
        order = np.lexsort((h, b))
        h, b = h[order], b[order]
        if validate_monotone:
            if np.any(np.diff(b) <= 0.0):
                raise ValidationError("duplicate or non-increasing B values")
            if np.any(np.diff(h) < 0.0):
                raise ValidationError("H must be monotone non-decreasing in B")
        else:
            keep = np.ones(h.size, dtype=bool)
            keep[1:] = (np.diff(b) != 0.0) | (np.diff(h) != 0.0)
            h, b = h[keep], b[keep]
        self.H = h
        self.B = b
        self.H.setflags(write=False)
        self.B.setflags(write=False)
        self.provenance = provenance
        self.cardinality = int(np.count_nonzero(b >= 0.0)
                               if cardinality is None else cardinality)
        # H-window pruning in the fast search needs monotone H
        self.monotone_h = bool(np.all(np.diff(h) >= 0.0))

    def __len__(self):
        return self.H.size

    def symmetrized(self):
        """Closure under point reflection; exact duplicates collapse."""
        h = np.concatenate([-self.H, self.H])
        b = np.concatenate([-self.B, self.B])
        pairs = np.unique(np.column_stack([b, h]), axis=0)
        if np.any(np.diff(pairs[:, 0]) == 0.0):
            raise ValidationError("symmetrization produced conflicting samples")
        return MaterialDataSet(pairs[:, 1], pairs[:, 0], self.provenance,
                               cardinality=self.cardinality,
                               validate_monotone=False)

    @cached_property
    def secant_slopes(self):
        """Per-sample local secant dH*/dB*: central inside, one-sided at ends."""
        h, b = self.H, self.B
        s = np.empty(h.size)
        if h.size == 1:
            s[:] = NU0
            return s
        s[0] = (h[1] - h[0]) / (b[1] - b[0])
        s[-1] = (h[-1] - h[-2]) / (b[-1] - b[-2])
        if h.size > 2:
            s[1:-1] = (h[2:] - h[:-2]) / (b[2:] - b[:-2])
        return s

    def overall_secant(self):
        """Single representative slope H*(B_max)/B_max of the data set."""
        i = int(np.argmax(np.abs(self.B)))
        if self.B[i] == 0.0:
            return NU0
        return self.H[i] / self.B[i]


def sample_brauer(n, b_max, c):
    """Equidistant samples of the Brauer curve on [0, b_max], symmetrized.

    The reported cardinality is n, the size of the non-negative branch.
    """
    if n < 2 or b_max <= 0.0:
        raise ValidationError("need n >= 2 samples and b_max > 0")
    b = np.linspace(0.0, b_max, n)
    ds = MaterialDataSet(brauer_H(b, c), b, "synthetic_brauer", cardinality=n)
    return ds.symmetrized()


def load_csv(path):
    """Read a two-column `H,B` CSV curve (A/m, T) and symmetrize it.

    Lines starting with `#` are comments. Raises ParseError on malformed
    rows (with the line number) and ValidationError on non-monotone data;
    bad data is reported, never silently repaired.
    """
    h_vals, b_vals = [], []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [c.strip().upper() for c in row]
                if header != ["H", "B"]:
                    raise ParseError(f"{path}:{lineno}: expected header 'H,B'")
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{lineno}: expected two columns")
            try:
                h_vals.append(float(row[0]))
                b_vals.append(float(row[1]))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if header is None or not h_vals:
        raise ParseError(f"{path}: no samples found")
    ds = MaterialDataSet(h_vals, b_vals, "csv", cardinality=len(b_vals))
    return ds.symmetrized()


def _distances(h, b, w, d):
    dh = h - d.H
    db = b - d.B
    return 0.5 * w.mu * dh * dh + 0.5 * w.nu * db * db


def nearest_state_1d(h, b, w, d, backend="scan"):
    """Index of the sample minimizing the weighted distance to (h, b).

    Ties break to the lowest index. backend="scan" is the exhaustive
    reference; backend="pruned" restricts the scan to an index window that
    provably contains every minimizer, so both return identical indices.
    """
    if backend == "scan":
        return int(np.argmin(_distances(h, b, w, d)))
    if backend == "pruned":
        return _nearest_pruned(h, b, w, d)
    raise ValueError(f"unknown backend {backend!r}")


def _nearest_pruned(h, b, w, d):
    # anchor on the B-nearest sample, then keep every index whose single-term
    # lower bound does not exceed the anchor distance (inflated for roundoff)
    n = len(d)
    i0 = min(int(np.searchsorted(d.B, b)), n - 1)
    d0 = min(
        0.5 * w.mu * (h - d.H[i0]) ** 2 + 0.5 * w.nu * (b - d.B[i0]) ** 2,
        0.5 * w.mu * (h - d.H[max(i0 - 1, 0)]) ** 2
        + 0.5 * w.nu * (b - d.B[max(i0 - 1, 0)]) ** 2,
    )
    rb = math.sqrt(2.0 * d0 / w.nu) * (1.0 + 1e-12) if d0 > 0 else 0.0
    lo = int(np.searchsorted(d.B, b - rb, side="left"))
    hi = int(np.searchsorted(d.B, b + rb, side="right"))
    if d.monotone_h:
        rh = math.sqrt(2.0 * d0 / w.mu) * (1.0 + 1e-12) if d0 > 0 else 0.0
        lo = max(lo, int(np.searchsorted(d.H, h - rh, side="left")))
        hi = min(hi, int(np.searchsorted(d.H, h + rh, side="right")))
    lo, hi = max(0, min(lo, n - 1)), max(hi, lo + 1)
    dh = h - d.H[lo:hi]
    db = b - d.B[lo:hi]
    return lo + int(np.argmin(0.5 * w.mu * dh * dh + 0.5 * w.nu * db * db))


def nearest_state_2d(state, w, d):
    """Componentwise nearest data state for a (H, B) vector pair.

    With a diagonal metric and a shared per-component curve the 2D
    minimization separates, so each Cartesian component is matched
    independently. Returns (assigned ElementState, (index_x, index_y)).
    """
    ix = nearest_state_1d(state.H[0], state.B[0], w, d)
    iy = nearest_state_1d(state.H[1], state.B[1], w, d)
    assigned = ElementState(H=np.array([d.H[ix], d.H[iy]]),
                            B=np.array([d.B[ix], d.B[iy]]))
    return assigned, (ix, iy)


def project_linear_law(state, mu):
    """Closest state on the line B* = mu * H* with weights (mu, 1/mu).

    Stationarity of the quadratic distance gives, per component,
    H* = (H + B/mu) / 2 and B* = mu * H*.
    """
    if mu <= 0.0:
        raise NonPositiveWeight("permeability must be positive")
    h_star = 0.5 * (state.H + state.B / mu)
    return ElementState(H=h_star, B=mu * h_star)


def local_weight(assigned_index, d):
    """Weight pair from the secant slope around one assigned sample."""
    if len(d) < 2:
        raise ValidationError("local weights need at least two samples")
    return weights_from_slope(d.secant_slopes[assigned_index])


def global_weight(d):
    """Weight pair from the overall secant of the data set."""
    return weights_from_slope(d.overall_secant())


def assign_nearest(d, h_q, b_q, mu_e, nu_e, window=0, prev=None):
    """Vectorized componentwise assignment for many quadrature points.

    h_q, b_q: (n, 2) field states; mu_e, nu_e: (n,) per-element weights.
    window > 0 restricts each query to +-window samples around its previous
    index (prev, (n, 2) int); whenever the windowed minimum lands on a
    window edge that is not a data-set end, the query falls back to a full
    scan, preserving exact argmin semantics. Returns (n, 2) indices.
    """
    n = h_q.shape[0]
    nd = len(d)
    h = h_q.reshape(-1)
    b = b_q.reshape(-1)
    mu = np.repeat(mu_e, 2)
    nu = np.repeat(nu_e, 2)

    def full_scan(hq, bq, muq, nuq):
        out = np.empty(hq.size, dtype=np.int64)
        chunk = max(1, 2_000_000 // max(nd, 1))
        for s in range(0, hq.size, chunk):
            e = min(s + chunk, hq.size)
            dh = hq[s:e, None] - d.H[None, :]
            db = bq[s:e, None] - d.B[None, :]
            dist = (0.5 * muq[s:e, None]) * dh * dh + (0.5 * nuq[s:e, None]) * db * db
            out[s:e] = np.argmin(dist, axis=1)
        return out

    if window <= 0 or prev is None:
        return full_scan(h, b, mu, nu).reshape(n, 2)

    p = prev.reshape(-1)
    width = 2 * window + 1
    cols = np.clip(p[:, None] + np.arange(-window, window + 1)[None, :], 0, nd - 1)
    dh = h[:, None] - d.H[cols]
    db = b[:, None] - d.B[cols]
    dist = (0.5 * mu[:, None]) * dh * dh + (0.5 * nu[:, None]) * db * db
    pos = np.argmin(dist, axis=1)
    idx = cols[np.arange(p.size), pos]
    at_low_edge = (pos == 0) & (cols[:, 0] > 0)
    at_high_edge = (pos == width - 1) & (cols[:, -1] < nd - 1)
    redo = at_low_edge | at_high_edge
    if np.any(redo):
        idx[redo] = full_scan(h[redo], b[redo], mu[redo], nu[redo])
    return idx.reshape(n, 2)


def fit_brauer(d, p0=None):
    """Least-squares Brauer constants for a measured curve.

    Fits H(B) = (k1*exp(k2*B^2) + k3)*B on the non-negative branch.
    """
    from scipy.optimize import curve_fit

    mask = d.B >= 0.0
    b, h = d.B[mask], d.H[mask]
    if b.size < 3:
        raise ValidationError("Brauer fit needs at least three samples")
    if p0 is None:
        nu_lo = h[1] / b[1] if b[0] == 0.0 else h[0] / b[0]
        nu_hi = h[-1] / b[-1]
        k2 = 2.0
        k1 = max((nu_hi - nu_lo) / math.exp(k2 * b[-1] ** 2), 1e-3)
        p0 = (k1, k2, max(nu_lo, 1.0))

    def model(bb, k1, k2, k3):
        return (k1 * np.exp(k2 * bb * bb) + k3) * bb

    popt, _ = curve_fit(model, b, h, p0=p0,
                        bounds=([0.0, 1e-3, 1e-3], [1e8, 20.0, 1e8]),
                        maxfev=20000)
    return BrauerConstants(k1=float(popt[0]), k2=float(popt[1]), k3=float(popt[2]))
