"""ε-scans: invariants of t_ε over the finite set of breakpoints, and critical values.

For a finite cloud the closed structure t_ε only changes when ε reaches a
realised distance, and it is constant on ``[d_i, d_{i+1})``. Each distinct
structure is analysed once.

Dimension 1 is tracked at a base point (the pointed fundamental group);
per-component groups are kept as well for comparison with the raster oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .groups import (DEFAULT_EFFORT, AbelianInvariants, Classification, classify,
                     dominated_reduction, edge_path_presentation, flag_complex2)
from .metric import (PointCloud, Resolution, Threshold, distance_thresholds, rational_between,
                     tolerance_adjacency)


@dataclass(frozen=True)
class StructureInvariants:
    """π₀ and π₁ of one tolerance structure."""

    vertex_count: int
    edge_count: int
    component_count: int
    base: Optional[int]
    group: Optional[Classification]
    component_groups: tuple[Classification, ...]
    reduced_vertex_count: int

    @property
    def label(self) -> str:
        return self.group.label if self.group is not None else "empty"

    @property
    def abelian(self) -> Optional[AbelianInvariants]:
        return self.group.abelian if self.group is not None else None

    def group_key(self):
        """What dimension-1 comparisons look at; unresolved groups compare by abelianization."""
        if self.group is None:
            return None
        return (self.group.label, self.group.abelian)

    def key(self):
        return (self.component_count, self.group_key(),
                tuple(sorted((g.label, g.abelian.betti, g.abelian.torsion)
                             for g in self.component_groups)))

    @property
    def total_free_rank(self) -> Optional[int]:
        """Sum of free ranks over components, ``None`` unless every component is conclusive."""
        ranks = [g.free_rank for g in self.component_groups]
        if any(r is None for r in ranks):
            return None
        return sum(ranks)


def analyze_structure(cloud: PointCloud, res: Resolution, base: Optional[int] = 0,
                      effort: int = DEFAULT_EFFORT) -> StructureInvariants:
    """π₀ count, π₁ at ``base`` and π₁ of every component of t_ε (or t_ε⁻).

    Dominated vertices are removed first; this strong collapse keeps both
    invariants and makes large clouds tractable.
    """
    n = len(cloud)
    if n == 0:
        return StructureInvariants(0, 0, 0, None, None, (), 0)
    if base is not None and not 0 <= base < n:
        raise ValueError(f"base {base} out of range")
    adj = tolerance_adjacency(cloud, res)
    edges = int((adj.sum() - n) // 2)
    _, comp = connected_components(csr_matrix(adj), directed=False)
    keep = dominated_reduction(adj)
    reduced = flag_complex2(adj, keep)
    reps = {}
    for i, v in enumerate(keep):
        reps.setdefault(int(comp[v]), i)
    groups = {c: classify(edge_path_presentation(reduced, i), effort) for c, i in reps.items()}
    ordered = tuple(groups[c] for c in sorted(groups))
    base_group = groups[int(comp[base])] if base is not None else None
    return StructureInvariants(n, edges, len(groups), base, base_group, ordered, len(keep))


@dataclass(frozen=True)
class ScanEntry:
    """Invariants at a breakpoint (``upper is None``) or on the open interval ``(epsilon, upper)``."""

    epsilon: Threshold
    upper: Optional[Threshold]
    invariants: StructureInvariants

    @property
    def is_interval(self) -> bool:
        return self.upper is not None

    @property
    def evaluation_point(self) -> Threshold:
        return self.epsilon.midpoint(self.upper) if self.upper is not None else self.epsilon

    @property
    def evaluation_epsilon(self):
        """An actual ε (exact when possible) inside the interval, or the breakpoint itself."""
        if self.upper is None:
            r = self.epsilon.exact_root()
            return r if r is not None else self.epsilon.value
        return rational_between(self.epsilon, self.upper)


@dataclass(frozen=True)
class CriticalValue:
    epsilon: Threshold
    kind: str
    dimension: int
    before: str = ""
    after: str = ""


@dataclass(frozen=True)
class EpsilonScanReport:
    breakpoints: tuple[Threshold, ...]
    entries: tuple[ScanEntry, ...]
    critical_values: tuple[CriticalValue, ...]
    warnings: tuple[str, ...] = ()
    base: Optional[int] = 0

    def regimes(self) -> list[tuple[Threshold, Optional[Threshold], str]]:
        """Maximal ε-ranges ``[lo, hi)`` with constant dimension-1 label at the base."""
        out: list[list] = []
        for e in self.entries:
            if e.is_interval:
                continue
            lab = e.invariants.label
            if out and out[-1][2] == lab:
                continue
            if out:
                out[-1][1] = e.epsilon
            out.append([e.epsilon, None, lab])
        return [tuple(r) for r in out]

    def invariants_at(self, eps) -> StructureInvariants:
        """Invariants of the closed structure at any ε ≥ 0, read off the scan."""
        p = self.entries[0].epsilon.p
        thr = eps if isinstance(eps, Threshold) else Threshold(Fraction(eps) ** p, p)
        best = None
        for e in self.entries:
            if not e.is_interval and e.epsilon.power <= thr.power:
                best = e
        return best.invariants


def breakpoints(cloud: PointCloud) -> list[Threshold]:
    """Exact, deduplicated, increasing pairwise distances."""
    return distance_thresholds(cloud)


def _dimension_changes(prev: StructureInvariants, cur: StructureInvariants) -> list[int]:
    dims = []
    if prev.component_count != cur.component_count:
        dims.append(0)
    if prev.group_key() != cur.group_key():
        dims.append(1)
    return dims


def epsilon_scan(cloud: PointCloud, effort: int = DEFAULT_EFFORT, base: Optional[int] = 0) -> EpsilonScanReport:
    """Closed structures at ε = 0 and every breakpoint, plus each open interval between them.

    Interval entries reuse the lower breakpoint's structure. A breakpoint is
    left-critical when the interval to its left differs from it; the interval
    to its right always agrees with it, so finite clouds have no right-critical
    breakpoints.
    """
    if len(cloud) == 0:
        return EpsilonScanReport((), (), (), (), None)
    if base is not None and not 0 <= base < len(cloud):
        raise ValueError(f"base {base} out of range")
    bps = breakpoints(cloud)
    p = cloud.metric.exponent or 1 if cloud.metric.exact else 1
    zero = Threshold(Fraction(0) if cloud.metric.exact else 0.0, p)
    points = list(bps)
    if not points or points[0].power != 0:
        points.insert(0, zero)
    beyond = Threshold(points[-1].power + 1, p)
    entries: list[ScanEntry] = []
    critical: list[CriticalValue] = []
    warnings: list[str] = []
    prev = None
    for k, pt in enumerate(points):
        inv = analyze_structure(cloud, Resolution(pt, True), base, effort)
        if prev is not None:
            for dim in _dimension_changes(prev, inv):
                if dim == 0:
                    before, after = str(prev.component_count), str(inv.component_count)
                else:
                    before, after = prev.label, inv.label
                critical.append(CriticalValue(pt, "left", dim, before, after))
        entries.append(ScanEntry(pt, None, inv))
        upper = points[k + 1] if k + 1 < len(points) else beyond
        entries.append(ScanEntry(pt, upper, inv))
        if inv.group is not None and not inv.group.conclusive:
            warnings.append(f"unresolved group at ε = {pt}; compared by abelian invariants "
                            f"({inv.group.abelian})")
        prev = inv
    return EpsilonScanReport(tuple(bps), tuple(entries), tuple(critical), tuple(warnings), base)


def open_closed_consistency(cloud: PointCloud, epsilon, effort: int = DEFAULT_EFFORT,
                            base: Optional[int] = 0) -> bool:
    """Open structure at ε against the closed structure at the last breakpoint below ε."""
    thr = cloud.metric.threshold(epsilon)
    if thr.power <= 0:
        raise ValueError("open structure needs ε > 0")
    open_inv = analyze_structure(cloud, Resolution(thr, False), base, effort)
    below = [t for t in breakpoints(cloud) if t.power < thr.power]
    if below:
        closed_inv = analyze_structure(cloud, Resolution(below[-1], True), base, effort)
    else:
        closed_inv = analyze_structure(cloud, Resolution(Fraction(0) if cloud.metric.exact else 0.0, True),
                                       base, effort)
    return open_inv.key() == closed_inv.key()


# --- pitch refinement -------------------------------------------------------

@dataclass(frozen=True)
class LimitCritical:
    value: Fraction
    kind: str
    left: Optional[str]
    at: str
    right: str
    slopes: tuple[Fraction, ...] = field(default=())


def _as_fraction(t: Threshold) -> Fraction:
    if t.p != 1 or not isinstance(t.power, Fraction):
        raise ValueError("pitch refinement needs l1 or l∞ clouds")
    return t.power


def refinement_limit(coarse: tuple[Fraction, EpsilonScanReport],
                     fine: tuple[Fraction, EpsilonScanReport]) -> list[LimitCritical]:
    """Dimension-1 critical values of the ρ → 0 limit of a family of lattice traces.

    Each critical value of the two scans is matched by order (the label
    transitions must agree) and extrapolated linearly as ``c + kρ``.
    Critical values with a common limit merge; the label at the limit point is
    read from the finer scan. Kinds follow the left/right/bilateral definition
    on the limit labels.
    """
    (r1, s1), (r2, s2) = coarse, fine
    r1, r2 = Fraction(r1), Fraction(r2)
    if r1 == r2:
        raise ValueError("need two different pitches")
    c1 = [c for c in s1.critical_values if c.dimension == 1]
    c2 = [c for c in s2.critical_values if c.dimension == 1]
    if [(c.before, c.after) for c in c1] != [(c.before, c.after) for c in c2]:
        raise ValueError("scans at the two pitches have different label sequences")
    fitted = []
    for a, b in zip(c1, c2):
        e1, e2 = _as_fraction(a.epsilon), _as_fraction(b.epsilon)
        k = (e1 - e2) / (r1 - r2)
        fitted.append((e1 - k * r1, k, a.before, a.after))
    groups: list[list] = []
    for item in fitted:
        if groups and groups[-1][0][0] == item[0]:
            groups[-1].append(item)
        else:
            groups.append([item])
    out = []
    for g in groups:
        value = g[0][0]
        left = g[0][2] if value > 0 else None
        right = g[-1][3]
        at = s2.invariants_at(Threshold(value, 1)).label
        if left is not None and left != at and at != right:
            kind = "bilateral"
        elif left is not None and left != at:
            kind = "left"
        elif at != right:
            kind = "right"
        else:
            continue
        out.append(LimitCritical(value, kind, left, at, right, tuple(x[1] for x in g)))
    return out
