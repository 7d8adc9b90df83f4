"""Seeded random complexes, paths and clouds shared by the test modules."""
from __future__ import annotations

import random
from collections import deque
from itertools import combinations

from tolerance_homotopy.complexes import Complex2
from tolerance_homotopy.metric import PointCloud
from tolerance_homotopy.nets import make_path


def random_complex2(rng: random.Random, n: int, p_edge: float = 0.5, p_tri: float = 0.5) -> Complex2:
    edges = [e for e in combinations(range(n), 2) if rng.random() < p_edge]
    es = set(edges)
    tris = [t for t in combinations(range(n), 3)
            if all(p in es for p in combinations(t, 2)) and rng.random() < p_tri]
    return Complex2.build(n, edges, tris)


def random_walk(rng: random.Random, c: Complex2, start: int, steps: int) -> list[int]:
    vals = [start]
    for _ in range(steps):
        options = sorted(c.neighbours[vals[-1]]) + [vals[-1]]
        vals.append(rng.choice(options))
    return vals


def shortest(c: Complex2, a: int, b: int) -> list[int]:
    prev = {a: None}
    q = deque([a])
    while q:
        v = q.popleft()
        if v == b:
            break
        for w in sorted(c.neighbours[v]):
            if w not in prev:
                prev[w] = v
                q.append(w)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def random_path(rng: random.Random, c: Complex2, steps: int, start=None, lo=None):
    start = rng.randrange(c.vertex_count) if start is None else start
    vals = random_walk(rng, c, start, steps)
    return make_path(c, vals, rng.randint(-3, 3) if lo is None else lo)


def random_loop(rng: random.Random, c: Complex2, base: int, steps: int):
    vals = random_walk(rng, c, base, steps)
    back = shortest(c, vals[-1], base)
    return make_path(c, vals + back[1:])


def random_integer_cloud(rng: random.Random, n: int, dim: int = 2, span: int = 6, metric="linf") -> PointCloud:
    n = min(n, (span + 1) ** dim)
    pts = set()
    while len(pts) < n:
        pts.add(tuple(rng.randint(0, span) for _ in range(dim)))
    return PointCloud.of(sorted(pts), metric)
