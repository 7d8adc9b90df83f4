"""Point clouds, l_p metrics and the tolerance complexes t_ε / t_ε⁻.

Distances are compared exactly. Coordinates are rationals; internally they
are scaled by a common denominator to integers, and for an integer exponent
``p`` distances are compared through their p-th powers, so l1, l2, l_p (p
integer) and l∞ thresholds never suffer from rounding. A non-integer ``p``
falls back to floating point guarded by a tie tolerance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .complexes import Complex2

Number = Union[int, Fraction, str, float]


class MetricError(ValueError):
    pass


class GuardBandError(MetricError):
    """A floating-point distance is too close to ε to decide closed vs open."""


def to_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise MetricError(f"non-finite coordinate {x}")
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class Metric:
    """``kind`` is one of ``l1``, ``l2``, ``linf``, ``lp``; ``p`` only matters for ``lp``."""

    kind: str = "linf"
    p: Optional[Fraction] = None
    tie_tolerance: float = 1e-9

    def __post_init__(self):
        if self.kind not in ("l1", "l2", "linf", "lp"):
            raise MetricError(f"unknown metric {self.kind!r}")
        if self.kind == "lp":
            if self.p is None or Fraction(self.p) < 1:
                raise MetricError("lp metric needs p >= 1")
            object.__setattr__(self, "p", Fraction(self.p))

    @classmethod
    def parse(cls, text: str) -> "Metric":
        text = text.strip().lower()
        if text in ("l1", "l2", "linf"):
            return cls(text)
        if text.startswith("lp:"):
            p = Fraction(text[3:])
            if p == 1:
                return cls("l1")
            if p == 2:
                return cls("l2")
            return cls("lp", p)
        raise MetricError(f"cannot parse metric {text!r}")

    @property
    def exponent(self) -> Optional[int]:
        """Integer exponent used for exact comparison, ``None`` for l∞ or a float-only p."""
        if self.kind == "l1":
            return 1
        if self.kind == "l2":
            return 2
        if self.kind == "lp":
            return int(self.p) if self.p.denominator == 1 else None
        return None

    @property
    def exact(self) -> bool:
        return self.kind != "lp" or self.p.denominator == 1

    def __str__(self):
        return f"lp:{self.p}" if self.kind == "lp" else self.kind

    def distance(self, x: Sequence[Number], y: Sequence[Number]) -> float:
        diffs = [abs(to_fraction(a) - to_fraction(b)) for a, b in zip(x, y)]
        if self.kind == "linf":
            return float(max(diffs, default=0))
        p = float(self.p) if self.kind == "lp" else (1.0 if self.kind == "l1" else 2.0)
        return sum(float(d) ** p for d in diffs) ** (1 / p)

    def key(self, x: Sequence[Number], y: Sequence[Number]):
        """Exact monotone image of d(x, y): d for l1/l∞, d**p for integer p, float otherwise."""
        diffs = [abs(to_fraction(a) - to_fraction(b)) for a, b in zip(x, y)]
        if self.kind == "linf":
            return max(diffs, default=Fraction(0))
        e = self.exponent
        if e is None:
            return sum(float(d) ** float(self.p) for d in diffs) ** (1 / float(self.p))
        return sum((d ** e for d in diffs), Fraction(0))

    def threshold(self, eps) -> "Threshold":
        """The ε value expressed in key space."""
        if isinstance(eps, Threshold):
            return eps
        if eps == math.inf or (isinstance(eps, str) and eps.lower() in ("inf", "infinity")):
            return Threshold(math.inf, 1)
        e = to_fraction(eps)
        if e < 0:
            raise MetricError("ε must be non-negative")
        if not self.exact:
            return Threshold(float(e), 1)
        p = self.exponent or 1
        return Threshold(e ** p, p)


@dataclass(frozen=True, order=True)
class Threshold:
    """A distance value stored as its exact p-th power (``p = 1`` for l1/l∞)."""

    power: Union[Fraction, float]
    p: int = 1

    @property
    def value(self) -> float:
        if self.power == math.inf:
            return math.inf
        return float(self.power) ** (1 / self.p)

    def exact_root(self) -> Optional[Fraction]:
        if self.p == 1 or self.power == math.inf:
            return self.power if isinstance(self.power, Fraction) else None
        if not isinstance(self.power, Fraction):
            return None
        num, den = self.power.numerator, self.power.denominator
        rn, rd = _int_root(num, self.p), _int_root(den, self.p)
        if rn is not None and rd is not None:
            return Fraction(rn, rd)
        return None

    def __str__(self):
        if self.power == math.inf:
            return "inf"
        if isinstance(self.power, float):
            return repr(self.power)
        r = self.exact_root()
        if r is not None:
            return format_fraction(r)
        return f"{format_fraction(self.power)}^(1/{self.p})"

    def midpoint(self, other: "Threshold") -> "Threshold":
        """A value strictly between two thresholds (midpoint in key space)."""
        if other.power == math.inf:
            return Threshold(self.power + 1, self.p)
        return Threshold((self.power + other.power) / 2, self.p)


def rational_between(lo: Threshold, hi: Threshold) -> Union[Fraction, float]:
    """A simple ε with lo < ε < hi, exact whenever the thresholds are."""
    if not isinstance(lo.power, Fraction) or not (isinstance(hi.power, Fraction) or hi.power == math.inf):
        up = lo.value + 1 if hi.power == math.inf else hi.value
        return (lo.value + up) / 2
    if hi.power == math.inf:
        r = lo.exact_root()
        return (r if r is not None else Fraction(math.ceil(lo.value))) + 1
    if lo.p == 1:
        return (lo.power + hi.power) / 2
    mid = (lo.value + hi.value) / 2
    den = 1
    while True:
        r = Fraction(mid).limit_denominator(den)
        if lo.power < r ** lo.p < hi.power:
            return r
        den *= 2


def _int_root(n: int, p: int) -> Optional[int]:
    if n < 0:
        return None
    r = round(n ** (1 / p))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** p == n:
            return c
    return None


def format_fraction(x: Fraction) -> str:
    """Exact decimal if the denominator allows it, ``p/q`` otherwise."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    scaled = x * 10 ** digits
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


@dataclass(frozen=True)
class Resolution:
    epsilon: object
    closed: bool = True


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: tuple[tuple[Fraction, ...], ...]
    metric: Metric = field(default_factory=Metric)
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        pts = tuple(tuple(to_fraction(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        dims = {len(p) for p in pts}
        if len(dims) > 1:
            raise MetricError(f"points have mixed dimensions {sorted(dims)}")
        if self.labels is not None and len(self.labels) != len(pts):
            raise MetricError("one label per point required")

    @classmethod
    def of(cls, points: Iterable[Sequence[Number]], metric="linf", labels=None) -> "PointCloud":
        m = metric if isinstance(metric, Metric) else Metric.parse(metric)
        return cls(tuple(tuple(p) for p in points), m, None if labels is None else tuple(labels))

    def with_metric(self, metric) -> "PointCloud":
        m = metric if isinstance(metric, Metric) else Metric.parse(metric)
        return PointCloud(self.points, m, self.labels)

    def __len__(self):
        return len(self.points)

    @property
    def dimension(self) -> int:
        return len(self.points[0]) if self.points else 0

    @cached_property
    def index(self) -> dict[tuple[Fraction, ...], int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def _scaled(self) -> tuple[list[list[int]], int]:
        den = 1
        for p in self.points:
            for c in p:
                den = math.lcm(den, c.denominator)
        return [[int(c * den) for c in p] for p in self.points], den

    @cached_property
    def pairwise(self) -> tuple[np.ndarray, object]:
        """Symmetric matrix of scaled exact keys and the scale ``S`` with key = d**p * S.

        Entries are int64 when safe, Python ints otherwise; float for a
        non-integer exponent (then ``S`` is the float scale ``den``).
        """
        coords, den = self._scaled
        n = len(coords)
        if n == 0:
            return np.zeros((0, 0), dtype=np.int64), 1
        arr = np.array(coords, dtype=object)
        mx = max((abs(c) for row in coords for c in row), default=0)
        m = self.metric
        if not m.exact:
            a = np.array(coords, dtype=float) / den
            diff = np.abs(a[:, None, :] - a[None, :, :])
            p = float(m.p)
            return (diff ** p).sum(axis=2) ** (1 / p), 1.0
        e = m.exponent
        dim = self.dimension
        bound = (2 * mx) ** (e or 1) * max(dim, 1)
        dtype = np.int64 if bound < 2 ** 62 else object
        a = arr.astype(dtype)
        diff = np.abs(a[:, None, :] - a[None, :, :])
        if m.kind == "linf":
            return diff.max(axis=2), den
        return (diff ** e).sum(axis=2), den ** e

    def key_matrix_threshold(self, threshold: Threshold, closed: bool):
        """Boolean adjacency (including the diagonal) for d <= ε or d < ε."""
        keys, scale = self.pairwise
        n = len(self.points)
        if threshold.power == math.inf:
            return np.ones((n, n), dtype=bool)
        if not self.metric.exact:
            eps = float(threshold.power)
            tol = self.metric.tie_tolerance * max(1.0, eps)
            close = np.abs(keys - eps) <= tol
            np.fill_diagonal(close, False)
            if close.any():
                raise GuardBandError(f"a distance lies within {tol:g} of ε = {eps}")
            out = keys <= eps if closed else keys < eps
            np.fill_diagonal(out, True)
            return out
        bound = Fraction(threshold.power) * scale
        if closed:
            limit = math.floor(bound)
        else:
            limit = math.ceil(bound) - 1
        out = np.asarray(keys <= limit, dtype=bool)
        np.fill_diagonal(out, True)
        return out

    def key_fraction(self, i: int, j: int) -> Threshold:
        keys, scale = self.pairwise
        if not self.metric.exact:
            return Threshold(float(keys[i, j]), 1)
        return Threshold(Fraction(int(keys[i, j]), scale), self.metric.exponent or 1)


def tolerance_adjacency(cloud: PointCloud, res: Resolution) -> np.ndarray:
    """Boolean adjacency of t_ε (or t_ε⁻) with a true diagonal."""
    thr = cloud.metric.threshold(res.epsilon)
    return cloud.key_matrix_threshold(thr, res.closed)


def build_tolerance(cloud: PointCloud, res: Resolution) -> Complex2:
    """t_ε (closed) or t_ε⁻ (open) truncated to dimension 2: edges d ≤ ε (d < ε) and all 3-cliques."""
    adj = tolerance_adjacency(cloud, res)
    n = adj.shape[0]
    iu, ju = np.nonzero(np.triu(adj, 1))
    edges = frozenset(zip(iu.tolist(), ju.tolist()))
    nb = [set(np.nonzero(adj[i])[0].tolist()) - {i} for i in range(n)]
    tris = set()
    for a, b in edges:
        for w in nb[a] & nb[b]:
            if w > b:
                tris.add((a, b, w))
    return Complex2(n, edges, frozenset(tris))


def distance_thresholds(cloud: PointCloud) -> list[Threshold]:
    """Distinct realised pairwise distances, increasing (zero included only if points repeat)."""
    keys, scale = cloud.pairwise
    n = len(cloud.points)
    if n < 2:
        return []
    iu = np.triu_indices(n, 1)
    vals = keys[iu]
    if not cloud.metric.exact:
        return [Threshold(float(v), 1) for v in sorted(set(vals.tolist()))]
    p = cloud.metric.exponent or 1
    uniq = sorted({int(v) for v in vals.tolist()})
    return [Threshold(Fraction(v, scale), p) for v in uniq]


def open_structure_via_breakpoint(cloud: PointCloud, epsilon) -> Complex2:
    """t_ε⁻ as the closed structure at the largest realised distance below ε."""
    thr = cloud.metric.threshold(epsilon)
    if thr.power <= 0:
        raise MetricError("open structure needs ε > 0")
    below = [t for t in distance_thresholds(cloud) if t.power < thr.power]
    if not below:
        return Complex2(len(cloud), frozenset())
    return build_tolerance(cloud, Resolution(below[-1], closed=True))


def load_image_grid(grid, pitch: Number = 1, metric="linf", flip_rows: bool = False) -> PointCloud:
    """One point ``(pitch * col, pitch * row)`` per true cell.

    With ``flip_rows`` row 0 is mapped to the largest y instead.
    """
    rho = to_fraction(pitch)
    if rho <= 0:
        raise MetricError("pitch must be positive")
    rows = [list(r) for r in grid]
    h = len(rows)
    pts = []
    for r, row in enumerate(rows):
        y = (h - 1 - r) if flip_rows else r
        for c, cell in enumerate(row):
            if cell:
                pts.append((rho * c, rho * y))
    return PointCloud.of(pts, metric)


# --- fixtures -------------------------------------------------------------

def fixture_specs() -> dict:
    with resources.files(__package__).joinpath("data/fixtures.json").open() as fh:
        return json.load(fh)


def _inside_hole(x: Fraction, y: Fraction, hole: dict) -> bool:
    (x0, x1), (y0, y1) = ([Fraction(v) for v in hole["x"]], [Fraction(v) for v in hole["y"]])
    if hole.get("closed", False):
        return x0 <= x <= x1 and y0 <= y <= y1
    return x0 < x < x1 and y0 < y < y1


def region_fixture(name: str, rho: Optional[Number] = None, metric="linf", **params) -> PointCloud:
    """Pinned fixture clouds: lattice traces of rectangles with holes, or a polygon circle.

    ``rho`` defaults to the fixture's pinned pitch.
    """
    specs = fixture_specs()["fixtures"]
    if name == "circle":
        k = int(params.get("k", 12))
        return polygon_cloud(k, metric=metric)
    if name not in specs:
        raise MetricError(f"unknown fixture {name!r}; known: {sorted(specs) + ['circle']}")
    spec = specs[name]
    rho = to_fraction(spec.get("default_pitch", "1/2") if rho is None else rho)
    if rho <= 0:
        raise MetricError("pitch must be positive")
    (x0, x1), (y0, y1) = [Fraction(v) for v in spec["box"]["x"]], [Fraction(v) for v in spec["box"]["y"]]
    pts = []
    j = math.ceil(y0 / rho)
    while j * rho <= y1:
        i = math.ceil(x0 / rho)
        while i * rho <= x1:
            x, y = i * rho, j * rho
            if not any(_inside_hole(x, y, h) for h in spec["holes"]):
                pts.append((x, y))
            i += 1
        j += 1
    return PointCloud.of(pts, metric)


def polygon_cloud(k: int, radius: int = 10, metric="linf") -> PointCloud:
    """k points on a circle, coordinates rounded to thousandths."""
    if k < 3:
        raise MetricError("a polygon needs k >= 3")
    pts = []
    for i in range(k):
        a = 2 * math.pi * i / k
        pts.append((Fraction(round(radius * 1000 * math.cos(a)), 1000),
                    Fraction(round(radius * 1000 * math.sin(a)), 1000)))
    return PointCloud.of(pts, metric)


def pairs_within(cloud: PointCloud, res: Resolution) -> list[tuple[int, int]]:
    adj = tolerance_adjacency(cloud, res)
    return [(i, j) for i, j in combinations(range(len(cloud)), 2) if adj[i, j]]
