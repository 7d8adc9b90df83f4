"""Paths, delays, congruence and 2-dimensional nets in a :class:`Complex2`.

A path is an eventually constant map ``Z -> X``; it is stored by its values
over the standard (least) support ``[lo, hi]``. Constant paths always sit on
``[0, 0]``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import groupby
from typing import Optional, Sequence

from .complexes import Complex, Complex2


class PathError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Path:
    complex: Complex2
    values: tuple[int, ...]
    lo: int = 0

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    @property
    def support(self) -> tuple[int, int]:
        return self.lo, self.hi

    @property
    def start(self) -> int:
        return self.values[0]

    @property
    def end(self) -> int:
        return self.values[-1]

    def is_constant(self) -> bool:
        return len(self.values) == 1

    def __call__(self, i: int) -> int:
        if i <= self.lo:
            return self.values[0]
        if i >= self.hi:
            return self.values[-1]
        return self.values[i - self.lo]

    def __eq__(self, other):
        if not isinstance(other, Path):
            return NotImplemented
        return (self.complex is other.complex and self.values == other.values
                and self.lo == other.lo)

    def __hash__(self):
        return hash((id(self.complex), self.values, self.lo))

    def __add__(self, other: "Path") -> "Path":
        return concat(self, other)

    def __neg__(self) -> "Path":
        return reverse(self)

    def __repr__(self):
        return f"Path({list(self.values)}, support=[{self.lo}, {self.hi}])"


def _normalise(complex: Complex2, values: Sequence[int], lo: int) -> Path:
    """Trim constant head and tail down to the standard support."""
    vals = list(values)
    if not vals:
        raise PathError("a path needs at least one value")
    start = 0
    while start + 1 < len(vals) and vals[start + 1] == vals[start]:
        start += 1
    stop = len(vals)
    while stop - 1 > start and vals[stop - 2] == vals[stop - 1]:
        stop -= 1
    vals = vals[start:stop]
    if len(vals) == 1:
        return Path(complex, (vals[0],), 0)
    return Path(complex, tuple(vals), lo + start)


def make_path(complex: Complex2, values: Sequence[int], lo: int = 0) -> Path:
    """Path taking ``values[k]`` at instant ``lo + k``; consecutive values must be linked."""
    if len(values) == 0:
        raise PathError("a path needs at least one value")
    for v in values:
        if not 0 <= v < complex.vertex_count:
            raise PathError(f"vertex {v} out of range")
    for a, b in zip(values, values[1:]):
        if not complex.has_edge(a, b):
            raise PathError(f"consecutive values {a}, {b} are not linked")
    return _normalise(complex, values, lo)


def _same_complex(a: Path, b: Path) -> None:
    if a.complex is not b.complex:
        raise PathError("paths live in different complexes")


def concat(a: Path, b: Path) -> Path:
    """Standard concatenation, pasting at instant ``hi(a) + lo(b)``; support ``ρ(a) + ρ(b)``."""
    _same_complex(a, b)
    if a.end != b.start:
        raise PathError(f"end point {a.end} does not match start point {b.start}")
    values = a.values + b.values[1:]
    return _normalise(a.complex, values, a.lo + b.lo)


def reverse(a: Path) -> Path:
    return _normalise(a.complex, a.values[::-1], -a.hi)


def delay(a: Path, t: int) -> Path:
    """Precompose with the elementary delay δ_t, which repeats instant ``t``."""
    lo, hi = min(a.lo, t), max(a.hi, t) + 1
    values = [a(i) if i <= t else a(i - 1) for i in range(lo, hi + 1)]
    return _normalise(a.complex, values, lo)


def canonical_form(a: Path) -> tuple[int, ...]:
    """Run-length compressed values; a complete invariant for congruence up to delays."""
    return tuple(k for k, _ in groupby(a.values))


def congruent(a: Path, b: Path) -> bool:
    _same_complex(a, b)
    return canonical_form(a) == canonical_form(b)


def congruent_by_search(a: Path, b: Path, max_delays: int = 4) -> bool:
    """Brute-force congruence: try every combination of up to ``max_delays`` delays on each side.

    Only delays inside (or one step before) the support matter; delays beyond
    the support do nothing. Used as an oracle for :func:`congruent`.
    """
    _same_complex(a, b)

    def orbit(p: Path) -> set[tuple[tuple[int, ...], int]]:
        seen = {(p.values, p.lo)}
        frontier = [p]
        for _ in range(max_delays):
            nxt = []
            for q in frontier:
                for t in range(q.lo - 1, q.hi):
                    r = delay(q, t)
                    key = (r.values, r.lo)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(r)
            frontier = nxt
        return seen

    return bool(orbit(a) & orbit(b))


@dataclass(frozen=True)
class DoubleNet:
    """A map ``Z^2 -> X`` given on its support rectangle.

    ``grid[r][c]`` is the value at ``(i, j) = (i_lo + c, j_lo + r)``: rows are
    the paths ``A(-, j)``, constant continuation is implied past the border.
    """

    grid: tuple[tuple[int, ...], ...]
    i_lo: int = 0
    j_lo: int = 0

    def row(self, j: int) -> tuple[int, ...]:
        r = min(max(j - self.j_lo, 0), len(self.grid) - 1)
        return self.grid[r]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.grid), len(self.grid[0])


def caterpillar(a: Path, t: int, s: Optional[int] = None) -> DoubleNet:
    """The net ``A(i, j) = a δ_{j ∨ t}(i)`` for ``t <= j <= s``.

    Row ``t`` is ``a δ_t`` and row ``s`` (any ``s >= max(t, hi(a))``) is ``a``;
    consecutive rows differ by moving the repeated instant one step right.
    """
    top = max(t, a.hi)
    s = top if s is None else s
    if s < top:
        raise PathError(f"s must be at least {top}")
    i_lo, i_hi = min(a.lo, t), max(a.hi, t) + 1
    rows = []
    for j in range(t, s + 1):
        d = max(j, t)
        rows.append(tuple(a(i) if i <= d else a(i - 1) for i in range(i_lo, i_hi + 1)))
    return DoubleNet(tuple(rows), i_lo, t)


def naive_one_step(a: Path, b: Path) -> DoubleNet:
    """Row ``b`` directly followed by row ``a``: the grid that is generally *not* a valid net."""
    _same_complex(a, b)
    i_lo, i_hi = min(a.lo, b.lo), max(a.hi, b.hi)
    return DoubleNet((tuple(b(i) for i in range(i_lo, i_hi + 1)),
                      tuple(a(i) for i in range(i_lo, i_hi + 1))), i_lo, 0)


def _square_linked(values: set[int], complex: Complex2, full: Optional[Complex]) -> bool:
    if full is not None:
        return full.is_linked(values)
    if len(values) <= 3:
        return complex.is_linked(values)
    vs = sorted(values)
    return all(complex.is_linked(t) for t in
               ((x, y, z) for i, x in enumerate(vs) for j, y in enumerate(vs[i + 1:], i + 1)
                for z in vs[j + 1:]))


def is_double_net_valid(net: DoubleNet, complex: Complex2, full: Optional[Complex] = None) -> bool:
    """Every elementary square must map to a linked set.

    With only a :class:`Complex2`, a four-point image is accepted when all its
    triples are triangles; pass ``full`` to check against the untruncated complex.
    """
    rows, cols = net.shape
    if any(len(r) != cols for r in net.grid):
        return False
    if rows == 1:
        g = net.grid[0]
        return all(complex.has_edge(x, y) for x, y in zip(g, g[1:]))
    for r in range(rows - 1):
        top, bot = net.grid[r], net.grid[r + 1]
        for c in range(max(cols - 1, 1)):
            cs = (c, c + 1) if cols > 1 else (c,)
            image = {top[k] for k in cs} | {bot[k] for k in cs}
            if not _square_linked(image, complex, full):
                return False
    return True


class Search(Enum):
    YES = "yes"
    NO_WITHIN_BOUNDS = "no_within_bounds"


def _one_step_moves(p: tuple[int, ...], complex: Complex2):
    """All q of the same length with fixed ends such that each square {p_i, p_i+1, q_i, q_i+1} is linked."""
    n = len(p)
    nb = complex.neighbours
    out = []

    def extend(q: list[int]):
        i = len(q) - 1
        if i == n - 1:
            out.append(tuple(q))
            return
        if i + 1 == n - 1:
            cands = (p[-1],)
        else:
            cands = (nb[q[i]] | {q[i]}) & (nb[p[i + 1]] | {p[i + 1]})
        for c in sorted(cands):
            if complex.is_linked({p[i], p[i + 1], q[i], c}):
                q.append(c)
                extend(q)
                q.pop()

    extend([p[0]])
    return out


def two_homotopic_bfs(complex: Complex2, a: Path, b: Path, max_len: int = 8,
                      max_steps: int = 20000) -> Search:
    """Search for a chain of one-step 2-homotopies from ``a`` to ``b``.

    Both paths are padded with end repetitions to a common length ``L`` and
    ``L`` is tried upward to ``max_len``. A ``YES`` answer is always correct;
    ``NO_WITHIN_BOUNDS`` only means the budget ran out.
    """
    if a.complex is not complex or b.complex is not complex:
        raise PathError("paths must live in the given complex")
    if a.start != b.start or a.end != b.end:
        raise PathError("paths must share end points")
    base = max(len(a.values), len(b.values))
    steps = 0
    for length in range(base, max(base, max_len) + 1):
        pa = a.values + (a.end,) * (length - len(a.values))
        pb = b.values + (b.end,) * (length - len(b.values))
        if pa == pb:
            return Search.YES
        seen = {pa}
        queue = deque([pa])
        while queue:
            cur = queue.popleft()
            steps += 1
            if steps > max_steps:
                return Search.NO_WITHIN_BOUNDS
            for q in _one_step_moves(cur, complex):
                if q == pb:
                    return Search.YES
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
    return Search.NO_WITHIN_BOUNDS
