"""Simplicial complexes ("combinatorial spaces") and their 2-truncations.

A :class:`Complex` is stored by its maximal linked parts; a :class:`Complex2`
keeps edges and triangles explicitly, which is all that connected components
and the fundamental group depend on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

Simplex = tuple[int, ...]
Edge = tuple[int, int]
Triangle = tuple[int, int, int]


class ComplexError(ValueError):
    """Raised on malformed complexes or out-of-range vertices."""


def _simplex(vertices: Iterable[int]) -> Simplex:
    return tuple(sorted(set(vertices)))


def _check_range(vertices: Iterable[int], vertex_count: int) -> None:
    for v in vertices:
        if not 0 <= v < vertex_count:
            raise ComplexError(f"vertex {v} out of range [0, {vertex_count})")


@dataclass(frozen=True)
class Complex:
    vertex_count: int
    maximal_simplices: frozenset[Simplex]

    def __post_init__(self):
        for s in self.maximal_simplices:
            _check_range(s, self.vertex_count)

    @cached_property
    def _containing(self) -> dict[int, list[frozenset[int]]]:
        index: dict[int, list[frozenset[int]]] = {v: [] for v in range(self.vertex_count)}
        for s in self.maximal_simplices:
            fs = frozenset(s)
            for v in s:
                index[v].append(fs)
        return index

    def is_linked(self, subset: Iterable[int]) -> bool:
        return is_linked(self, subset)

    @property
    def dimension(self) -> int:
        return max((len(s) for s in self.maximal_simplices), default=0) - 1


def generate_complex(vertex_count: int, generating_sets: Iterable[Iterable[int]]) -> Complex:
    """Finest complex on ``vertex_count`` points in which every generating set is linked.

    Singletons not covered by a generator are kept as maximal simplices, so
    isolated points stay visible to ``pi0``.
    """
    if vertex_count < 0:
        raise ComplexError("vertex_count must be non-negative")
    gens = {_simplex(g) for g in generating_sets}
    for g in gens:
        _check_range(g, vertex_count)
    gens.discard(())
    kept: list[frozenset[int]] = []
    for g in sorted(gens, key=len, reverse=True):
        fs = frozenset(g)
        if not any(fs <= k for k in kept):
            kept.append(fs)
    covered = set().union(*kept) if kept else set()
    maximal = {tuple(sorted(k)) for k in kept}
    maximal.update((v,) for v in range(vertex_count) if v not in covered)
    return Complex(vertex_count, frozenset(maximal))


def is_linked(complex: Complex, subset: Iterable[int]) -> bool:
    s = frozenset(subset)
    _check_range(s, complex.vertex_count)
    if len(s) <= 1:
        return True
    v = next(iter(s))
    return any(s <= m for m in complex._containing[v])


@dataclass(frozen=True)
class Complex2:
    """A complex truncated to dimension 2: vertices, edges and triangles.

    Edges are stored as ``(u, v)`` with ``u < v`` and triangles as sorted
    triples. Every edge of a triangle must itself be an edge.
    """

    vertex_count: int
    edges: frozenset[Edge]
    triangles: frozenset[Triangle] = frozenset()

    def __post_init__(self):
        for e in self.edges:
            if len(e) != 2 or e[0] >= e[1]:
                raise ComplexError(f"edge {e} must be an increasing pair of distinct vertices")
            _check_range(e, self.vertex_count)
        for t in self.triangles:
            if len(t) != 3 or not (t[0] < t[1] < t[2]):
                raise ComplexError(f"triangle {t} must be an increasing triple")
            for a, b in combinations(t, 2):
                if (a, b) not in self.edges:
                    raise ComplexError(f"triangle {t} is missing edge {(a, b)}")

    @classmethod
    def build(cls, vertex_count: int, edges: Iterable[Sequence[int]] = (),
              triangles: Iterable[Sequence[int]] = ()) -> "Complex2":
        """Normalise unordered edge/triangle input; triangle edges are added if missing."""
        es = set()
        for e in edges:
            a, b = sorted(e)
            if a != b:
                es.add((a, b))
        ts = set()
        for t in triangles:
            tt = _simplex(t)
            if len(tt) != 3:
                raise ComplexError(f"triangle {tuple(t)} needs three distinct vertices")
            ts.add(tt)
            es.update(combinations(tt, 2))
        return cls(vertex_count, frozenset(es), frozenset(ts))

    @cached_property
    def neighbours(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return tuple(frozenset(s) for s in adj)

    def has_edge(self, a: int, b: int) -> bool:
        return a == b or (min(a, b), max(a, b)) in self.edges

    def is_linked(self, subset: Iterable[int]) -> bool:
        """Linkedness in the 2-truncated structure; sets of four or more points never are."""
        s = _simplex(subset)
        _check_range(s, self.vertex_count)
        if len(s) <= 1:
            return True
        if len(s) == 2:
            return s in self.edges
        if len(s) == 3:
            return s in self.triangles
        return False

    def is_tolerance(self) -> bool:
        return tolerance_closure(self).triangles == self.triangles

    def induced(self, vertices: Iterable[int]) -> tuple["Complex2", list[int]]:
        """Full subcomplex on ``vertices``; returns it with the new-to-old index map."""
        old = sorted(set(vertices))
        _check_range(old, self.vertex_count)
        new_of = {v: i for i, v in enumerate(old)}
        edges = frozenset((new_of[a], new_of[b]) for a, b in self.edges
                          if a in new_of and b in new_of)
        tris = frozenset(tuple(new_of[v] for v in t) for t in self.triangles
                         if all(v in new_of for v in t))
        return Complex2(len(old), edges, tris), old


def truncate2(complex: Complex) -> Complex2:
    edges: set[Edge] = set()
    tris: set[Triangle] = set()
    for m in complex.maximal_simplices:
        edges.update(combinations(m, 2))
        tris.update(combinations(m, 3))
    return Complex2(complex.vertex_count, frozenset(edges), frozenset(tris))


def tolerance_closure(c: Complex2) -> Complex2:
    """Add every triangle whose three sides are edges (clique closure up to dimension 2)."""
    nb = c.neighbours
    tris = set()
    for a, b in c.edges:
        for w in nb[a] & nb[b]:
            if w > b:
                tris.add((a, b, w))
    return Complex2(c.vertex_count, c.edges, frozenset(tris))


def product2(x: Complex2, y: Complex2) -> Complex2:
    """Cartesian product; vertex ``(i, j)`` gets index ``i * y.vertex_count + j``."""
    ny = y.vertex_count
    n = x.vertex_count * ny

    def close_x(i):
        return x.neighbours[i] | {i}

    def close_y(j):
        return y.neighbours[j] | {j}

    edges = set()
    for i in range(x.vertex_count):
        for j in range(ny):
            u = i * ny + j
            for i2, j2 in product(close_x(i), close_y(j)):
                v = i2 * ny + j2
                if u < v:
                    edges.add((u, v))
    tris = set()
    nb: dict[int, set[int]] = {}
    for a, b in edges:
        nb.setdefault(a, set()).add(b)
        nb.setdefault(b, set()).add(a)
    for a, b in edges:
        for w in nb[a] & nb[b]:
            if w <= b:
                continue
            t = (a, b, w)
            if x.is_linked({v // ny for v in t}) and y.is_linked({v % ny for v in t}):
                tris.add(t)
    return Complex2(n, frozenset(edges), frozenset(tris))


def point() -> Complex2:
    return Complex2(1, frozenset())


def chaotic(n: int) -> Complex2:
    """All subsets of ``n`` points linked (truncated)."""
    return truncate2(generate_complex(n, [range(n)]))


def interval(n: int) -> Complex2:
    """The integral interval ``[0, n]`` with contiguity structure."""
    return Complex2.build(n + 1, [(i, i + 1) for i in range(n)])


def circle(k: int) -> Complex2:
    """The k-point circle: contiguous pairs mod k. Its triple is not linked, even for k = 3."""
    if k < 3:
        raise ComplexError("circle needs k >= 3")
    return Complex2.build(k, [(i, (i + 1) % k) for i in range(k)])


def sphere_fixture(kind: str, n: int) -> Complex:
    """Simplicial, cubical or octahedral n-sphere.

    Vertex numbering: simplicial uses ``e_0..e_{n+1}``; cubical uses the
    binary encoding of cube corners (bit i = coordinate i); octahedral puts
    ``+e_i`` at ``2i`` and ``-e_i`` at ``2i + 1``.
    """
    if n < 0:
        raise ComplexError("dimension must be >= 0")
    if kind == "simplicial":
        m = n + 2
        return generate_complex(m, combinations(range(m), m - 1))
    if kind == "cubical":
        d = n + 1
        faces = []
        for axis in range(d):
            for bit in (0, 1):
                faces.append([v for v in range(2 ** d) if (v >> axis) & 1 == bit])
        return generate_complex(2 ** d, faces)
    if kind == "octahedral":
        d = n + 1
        sims = [[2 * i + s for i, s in enumerate(signs)] for signs in product((0, 1), repeat=d)]
        return generate_complex(2 * d, sims)
    raise ComplexError(f"unknown sphere kind {kind!r}")

