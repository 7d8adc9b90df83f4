"""Telescopic homotopies and ε-grid retracts.

A telescopic homotopy contracts a region towards a centre one axis at a time,
``α(i, x) = a₀ ∨ (aᵢ ∧ x)`` on the positive side and ``a₀ ∧ (a₋ᵢ ∨ x)`` on the
negative side, where ``(aᵢ)`` is the characteristic sequence built from jumps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Optional, Sequence

from .metric import Number, PointCloud, Resolution, to_fraction, tolerance_adjacency

Point = tuple[Fraction, ...]


class RetractError(ValueError):
    pass


@dataclass(frozen=True)
class AxisSequence:
    """Characteristic sequence on one axis: a₀ = ``center``, jumps repeated periodically.

    The negative side reuses ``jumps`` unless ``negative_jumps`` is given.
    """

    center: Fraction
    jumps: tuple[Fraction, ...] = (Fraction(1),)
    negative_jumps: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "center", to_fraction(self.center))
        object.__setattr__(self, "jumps", tuple(to_fraction(j) for j in self.jumps))
        if self.negative_jumps is not None:
            object.__setattr__(self, "negative_jumps",
                               tuple(to_fraction(j) for j in self.negative_jumps))
        for seq in (self.jumps, self.negative_jumps or self.jumps):
            if not seq or any(j <= 0 for j in seq):
                raise RetractError("jumps must be a non-empty list of positive values")

    def a(self, i: int) -> Fraction:
        if i == 0:
            return self.center
        seq = self.jumps if i > 0 else (self.negative_jumps or self.jumps)
        k = abs(i)
        full, part = divmod(k, len(seq))
        total = full * sum(seq) + sum(seq[:part])
        return self.center + total if i > 0 else self.center - total

    def apply(self, i: int, x: Fraction) -> Fraction:
        if x >= self.center:
            return max(self.center, min(self.a(i), x))
        return min(self.center, max(self.a(-i), x))

    def reach(self, lo: Fraction, hi: Fraction) -> int:
        """Least ``N`` with ``a_N >= hi`` and ``a_{-N} <= lo``."""
        n = 0
        while self.a(n) < hi or self.a(-n) > lo:
            n += 1
        return n

    @property
    def max_jump(self) -> Fraction:
        return max(self.jumps + (self.negative_jumps or ()))


@dataclass(frozen=True)
class TelescopicSpec:
    """One entry per axis: an :class:`AxisSequence`, or ``None`` for a trivial axis left untouched."""

    axes: tuple[Optional[AxisSequence], ...]

    @classmethod
    def unit(cls, center: Sequence[Number]) -> "TelescopicSpec":
        return cls(tuple(AxisSequence(to_fraction(c)) for c in center))

    def index_span(self, points: Iterable[Sequence[Fraction]]) -> int:
        pts = list(points)
        if not pts:
            return 0
        n = 0
        for k, ax in enumerate(self.axes):
            if ax is None:
                continue
            coords = [p[k] for p in pts]
            n = max(n, ax.reach(min(coords), max(coords)))
        return n


def telescopic_value(spec: TelescopicSpec, i: int, x: Sequence[Number]) -> Point:
    if len(x) != len(spec.axes):
        raise RetractError("point and spec dimensions differ")
    return tuple(to_fraction(c) if ax is None else ax.apply(i, to_fraction(c))
                 for ax, c in zip(spec.axes, x))


def verify_homotopy(alpha: Callable[[int, Point], Sequence[Number]], cloud: PointCloud,
                    epsilon, i_range: Iterable[int]) -> bool:
    """Check that ``alpha`` maps every elementary square of t₁Z × t_ε(cloud) to a set of diameter ≤ ε.

    Targets are points of the ambient space under the cloud's metric, so for a
    tolerance target the squares cover every pair that must stay linked.
    """
    adj = tolerance_adjacency(cloud, Resolution(epsilon, True))
    thr = cloud.metric.threshold(epsilon)
    steps = list(i_range)
    pairs = [(a, b) for a in range(len(cloud)) for b in range(a, len(cloud)) if adj[a, b]]
    cache: dict[tuple[int, int], Point] = {}

    def img(i, v):
        key = (i, v)
        if key not in cache:
            cache[key] = tuple(to_fraction(c) for c in alpha(i, cloud.points[v]))
        return cache[key]

    metric = cloud.metric
    for i in steps:
        for a, b in pairs:
            square = {img(i, a), img(i + 1, a), img(i, b), img(i + 1, b)}
            for y, z in combinations(square, 2):
                if not _within(metric, y, z, thr):
                    return False
    return True


def _within(metric, y, z, thr) -> bool:
    key = metric.key(y, z)
    if isinstance(key, float):
        return key <= float(thr.power)
    return key <= thr.power


def verify_telescopic_map(spec: TelescopicSpec, cloud: PointCloud, epsilon) -> bool:
    """Map property of the telescopic homotopy on t_ε(cloud), over every index that matters."""
    n = spec.index_span(cloud.points)
    return verify_homotopy(lambda i, x: telescopic_value(spec, i, x), cloud, epsilon,
                           range(-1, n + 1))


def is_telescopically_contractible(cloud: PointCloud, epsilon, spec: TelescopicSpec) -> bool:
    """Every intermediate value α(i, x) must be a point of the cloud.

    With no trivial axes this contracts the cloud to the centre; with trivial
    axes it retracts onto the subspace where the other coordinates sit at the
    centre. Membership is exact.
    """
    members = set(cloud.points)
    n = spec.index_span(cloud.points)
    for x in cloud.points:
        for i in range(0, n + 1):
            if telescopic_value(spec, i, x) not in members:
                return False
    return True


def grid_point(x: Sequence[Number], epsilon) -> Point:
    e = to_fraction(epsilon)
    return tuple(e * math.floor(to_fraction(c) / e) for c in x)


def grid_retract(cloud: PointCloud, epsilon) -> PointCloud:
    """The sub-cloud ``[X]_ε`` of grid points ``ε⌊x/ε⌋``; they must all belong to the cloud."""
    e = to_fraction(epsilon)
    if e <= 0:
        raise RetractError("ε must be positive")
    members = set(cloud.points)
    seen: dict[Point, None] = {}
    for x in cloud.points:
        g = grid_point(x, e)
        if g not in members:
            raise RetractError(f"grid image {tuple(str(c) for c in g)} of a point is not in the cloud")
        seen.setdefault(g, None)
    return PointCloud(tuple(seen), cloud.metric)


def product_window(bounds: Sequence[tuple[int, int]], pitch: Number = 1, metric="linf") -> PointCloud:
    """All lattice points ``pitch * k`` inside a box given by integer index bounds per axis."""
    rho = to_fraction(pitch)
    ranges = [range(lo, hi + 1) for lo, hi in bounds]
    return PointCloud.of([tuple(rho * k for k in idx) for idx in product(*ranges)], metric)
