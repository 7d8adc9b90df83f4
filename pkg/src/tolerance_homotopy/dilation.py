"""Raster spot dilations in the plane, an independent check on π₀ and π₁.

The open spot dilation of a cloud is the union of open discs of radius ε/2
around its points. Its components and holes are counted on a raster with
8-adjacent foreground and 4-adjacent background, the usual Jordan-consistent
pairing of digital topology.

Disc membership is decided exactly: every coordinate, ε/2 and the pitch are
put on one integer lattice, and cell centres lie on it. Disc boundaries then
pass through cell centres, which keeps tangent open discs apart on the raster.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Optional

import numpy as np
from scipy import ndimage

from .metric import Metric, PointCloud, Resolution, distance_thresholds, to_fraction
from .scan import StructureInvariants, analyze_structure

FOREGROUND = np.ones((3, 3), dtype=bool)
BACKGROUND = ndimage.generate_binary_structure(2, 1)


class DilationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RasterRegion:
    """``grid[row, col]`` is the cell centred at ``origin + pitch * (col, row)``; rows go up in y."""

    grid: np.ndarray
    origin: tuple[Fraction, Fraction]
    pitch: Fraction

    def __post_init__(self):
        if self.pitch <= 0:
            raise DilationError("pitch must be positive")
        if self.grid.size == 0:
            raise DilationError("raster is empty")

    def to_pgm(self) -> str:
        """Plain PBM (P1), one pixel per cell, top row = largest y, 1 = covered."""
        h, w = self.grid.shape
        lines = ["P1", f"# origin {self.origin[0]} {self.origin[1]} pitch {self.pitch}", f"{w} {h}"]
        for row in self.grid[::-1]:
            lines.append(" ".join("1" if c else "0" for c in row))
        return "\n".join(lines) + "\n"


def _gcd_fraction(values) -> Fraction:
    vals = [Fraction(v) for v in values if v != 0]
    if not vals:
        return Fraction(1)
    num = reduce(math.gcd, (abs(v.numerator) for v in vals))
    den = reduce(math.lcm, (v.denominator for v in vals))
    return Fraction(num, den)


def aligned_pitch(cloud: PointCloud, epsilon, target) -> Fraction:
    """Largest pitch ≤ ``target`` dividing every coordinate and ε/2."""
    e = to_fraction(epsilon)
    coords = [c for p in cloud.points for c in p]
    unit = _gcd_fraction(coords + [e / 2])
    k = math.ceil(unit / to_fraction(target))
    return unit / k


def rasterize_dilation(cloud: PointCloud, epsilon, metric: Optional[Metric] = None,
                       closed: bool = False, pitch=None) -> RasterRegion:
    """Cells whose centre is within ε/2 of some point (strictly, unless ``closed``)."""
    if cloud.dimension != 2 and len(cloud):
        raise DilationError("spot dilations are rasterised in dimension 2 only")
    if len(cloud) == 0:
        raise DilationError("empty cloud")
    metric = metric or cloud.metric
    e = to_fraction(epsilon)
    if e <= 0:
        raise DilationError("ε must be positive")
    if pitch is None:
        pitch = aligned_pitch(cloud, e, e / 8)
    pitch = to_fraction(pitch)
    if pitch <= 0 or pitch > e / 8:
        raise DilationError(f"pitch {pitch} violates the resolution guard pitch <= ε/8 = {e / 8}")
    r = e / 2
    xs = [p[0] for p in cloud.points]
    ys = [p[1] for p in cloud.points]
    x0 = pitch * math.floor((min(xs) - r) / pitch) - pitch
    y0 = pitch * math.floor((min(ys) - r) / pitch) - pitch
    x1 = pitch * math.ceil((max(xs) + r) / pitch) + pitch
    y1 = pitch * math.ceil((max(ys) + r) / pitch) + pitch
    w = int((x1 - x0) / pitch) + 1
    h = int((y1 - y0) / pitch) + 1
    # integer units of pitch / den so that points and radius are exact
    den = reduce(math.lcm, [((c - x0) / pitch).denominator for c in xs]
                 + [((c - y0) / pitch).denominator for c in ys] + [(r / pitch).denominator])
    R = int(r / pitch * den)
    grid = np.zeros((h, w), dtype=bool)
    p = None
    exact = metric.kind in ("l1", "linf") or metric.exact
    if metric.kind == "l2":
        p = 2
    elif metric.kind == "lp":
        p = metric.exponent
    span = int(math.ceil(r / pitch)) + 1
    big = (max(w, h) * den) ** (p or 1) * 2 >= 2 ** 62
    dtype = object if big else np.int64
    cols_all = np.arange(w, dtype=np.int64).astype(dtype) * den
    rows_all = np.arange(h, dtype=np.int64).astype(dtype) * den
    for x, y in cloud.points:
        cx = int((x - x0) / pitch * den)
        cy = int((y - y0) / pitch * den)
        ci = int(math.floor((x - x0) / pitch))
        ri = int(math.floor((y - y0) / pitch))
        c_lo, c_hi = max(ci - span, 0), min(ci + span + 1, w)
        r_lo, r_hi = max(ri - span, 0), min(ri + span + 1, h)
        if exact:
            dx = np.abs(cols_all[c_lo:c_hi] - cx)
            dy = np.abs(rows_all[r_lo:r_hi] - cy)
        else:
            dx = np.abs(cols_all[c_lo:c_hi].astype(float) - cx)
            dy = np.abs(rows_all[r_lo:r_hi].astype(float) - cy)
        DX, DY = np.meshgrid(dx, dy)
        if metric.kind == "linf":
            d, bound = np.maximum(DX, DY), R
        elif metric.kind == "l1":
            d, bound = DX + DY, R
        elif exact:
            d, bound = DX ** p + DY ** p, R ** p
        else:
            q = float(metric.p)
            d, bound = (DX ** q + DY ** q) ** (1 / q), float(R)
        inside = (d <= bound) if closed else (d < bound)
        grid[r_lo:r_hi, c_lo:c_hi] |= np.asarray(inside, dtype=bool)
    return RasterRegion(grid, (x0, y0), pitch)


def count_components_and_holes(region: RasterRegion, thick_holes: bool = False) -> tuple[int, int]:
    """(8-connected foreground components, 4-connected background components off the border).

    Where two round discs cross, the background is a thin wedge that 4-adjacency
    can cut into isolated cells. With ``thick_holes`` a hole only counts if it
    contains a cell whose 3×3 neighbourhood is background; this is safe when
    every genuine hole is known to be several cells wide.
    """
    g = np.pad(region.grid, 1, constant_values=False)
    _, components = ndimage.label(g, structure=FOREGROUND)
    labels, background = ndimage.label(~g, structure=BACKGROUND)
    outer = labels[0, 0]
    if not thick_holes:
        # the padded border ring is one background component
        return int(components), int(background) - 1
    core = ndimage.binary_erosion(~g, structure=FOREGROUND, border_value=1)
    holes = set(np.unique(labels[core]).tolist()) - {0, int(outer)}
    return int(components), len(holes)


def closure_hypothesis(cloud: PointCloud, epsilon, closed: bool = False) -> bool:
    """Whether discs of radius ε/2 meet in threes exactly when they meet in pairs.

    Then the nerve of the discs agrees with t_ε (or t_ε⁻) up to dimension 2, so
    π₀ and π₁ must match the dilation. Always true for l1 and l∞ in the plane;
    for l2 every acute triangle of the structure needs its circumradius below ε/2.
    """
    m = cloud.metric
    if m.kind in ("l1", "linf"):
        return True
    if m.kind != "l2":
        return False
    e2 = to_fraction(epsilon) ** 2
    pts = cloud.points
    n = len(pts)

    def sq(a, b):
        return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2

    d2 = [[sq(pts[i], pts[j]) for j in range(n)] for i in range(n)]
    linked = [[(d2[i][j] <= e2) if closed else (d2[i][j] < e2) for j in range(n)] for i in range(n)]
    for i, j, k in combinations(range(n), 3):
        if not (linked[i][j] and linked[j][k] and linked[i][k]):
            continue
        a, b, c = d2[j][k], d2[i][k], d2[i][j]
        if a >= b + c or b >= a + c or c >= a + b:
            continue  # right or obtuse: the longest side is a diameter of the smallest disc
        area16 = 2 * (a * b + b * c + c * a) - a * a - b * b - c * c
        # circumradius² = abc / area16 against (ε/2)²
        lhs, rhs = 4 * a * b * c, e2 * area16
        if (lhs > rhs) if closed else (lhs >= rhs):
            return False
    return True


@dataclass(frozen=True)
class OracleComparison:
    status: str
    closed: bool
    structure: Optional[tuple[int, Optional[int]]] = None
    raster: Optional[tuple[int, int]] = None
    pitch: Optional[Fraction] = None
    advisory: bool = False
    reason: str = ""
    details: dict = field(default_factory=dict)


def _margin(cloud: PointCloud, e: Fraction) -> Optional[Fraction]:
    gaps = []
    for t in distance_thresholds(cloud):
        d = t.exact_root()
        if d is None:
            d = Fraction(t.value)
        if d != e and d > 0:
            gaps.append(abs(d - e))
    return min(gaps) if gaps else None


def compare_with_scan(cloud: PointCloud, epsilon, invariants: Optional[StructureInvariants] = None,
                      closed: bool = False, pitch=None) -> OracleComparison:
    """Compare (π₀ count, total free rank) of t_ε⁻ (or t_ε) with the raster (components, holes).

    The open comparison is decisive when the closure hypothesis holds and every
    component group is conclusive. The closed comparison is advisory and uses
    the guard pitch ε/8 unless told otherwise; at a breakpoint without the
    closure hypothesis it is not applicable.
    """
    if cloud.dimension != 2:
        return OracleComparison("not_applicable", closed, reason="cloud is not planar")
    e = to_fraction(epsilon)
    if e <= 0:
        return OracleComparison("not_applicable", closed, reason="ε must be positive")
    hyp = closure_hypothesis(cloud, e, closed)
    at_breakpoint = any(t == cloud.metric.threshold(e) for t in distance_thresholds(cloud))
    if closed and at_breakpoint and not hyp:
        return OracleComparison("not_applicable", True, advisory=True,
                                reason="closed structure at a breakpoint without the closure hypothesis")
    if not hyp:
        return OracleComparison("not_applicable", closed,
                                reason="discs may meet pairwise without a common point")
    if invariants is None:
        invariants = analyze_structure(cloud, Resolution(e, closed), base=0)
    rank = invariants.total_free_rank
    if rank is None:
        return OracleComparison("not_applicable", closed, (invariants.component_count, None),
                                reason="group classification inconclusive")
    if pitch is None:
        target = e / 8
        if not closed:
            margin = _margin(cloud, e)
            if margin is not None:
                target = min(target, margin / 8)
        pitch = aligned_pitch(cloud, e, target)
    region = rasterize_dilation(cloud, e, closed=closed, pitch=pitch)
    # open: ε is at least 8 pitches from every distance, so genuine holes are thick
    raster = count_components_and_holes(region, thick_holes=not closed)
    ours = (invariants.component_count, rank)
    status = "agree" if ours == raster else "disagree"
    return OracleComparison(status, closed, ours, raster, to_fraction(pitch), advisory=closed)


def segment_gap_cloud(n: int = 16) -> PointCloud:
    """Sampled planar analog of ``{0} ∪ ]1, 2]``: the origin and ``1 + k/n`` on the x-axis."""
    pts = [(Fraction(0), Fraction(0))] + [(1 + Fraction(k, n), Fraction(0)) for k in range(1, n + 1)]
    return PointCloud.of(pts, "linf")
