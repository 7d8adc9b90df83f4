"""π₀ by union-find, π₁ by the edge-path presentation, and presentation tools.

Words are tuples of nonzero ints: ``k`` is generator ``k`` (1-based) and
``-k`` its inverse.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .complexes import Complex2, ComplexError
from .nets import Path

Word = tuple[int, ...]

DEFAULT_EFFORT = 10_000
LENGTH_CAP = 64


class GroupError(ValueError):
    pass


# --- π₀ -------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    representative: tuple[int, ...]
    count: int

    def components(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for v, r in enumerate(self.representative):
            groups.setdefault(r, []).append(v)
        return sorted(groups.values())


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller index wins, so representatives are component minima
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def partition_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Partition:
    uf = UnionFind(n)
    for a, b in edges:
        uf.union(a, b)
    reps = tuple(uf.find(v) for v in range(n))
    return Partition(reps, len(set(reps)))


def pi0(complex: Complex2) -> Partition:
    return partition_from_edges(complex.vertex_count, complex.edges)


# --- words ------------------------------------------------------------------

def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word: Iterable[int]) -> Word:
    w = list(free_reduce(word))
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i:j + 1])


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def _cyclic_key(word: Word) -> Word:
    """Canonical representative of a relator up to rotation and inversion."""
    if not word:
        return word
    cands = []
    for w in (word, inverse(word)):
        for k in range(len(w)):
            cands.append(w[k:] + w[:k])
    return min(cands, key=lambda c: (len(c), tuple((abs(x), x < 0) for x in c)))


# --- presentations ------------------------------------------------------

@dataclass(frozen=True)
class GroupPresentation:
    generator_count: int
    relators: tuple[Word, ...] = ()
    base: Optional[int] = field(default=None, compare=False)
    edge_generators: Optional[dict] = field(default=None, compare=False, repr=False)
    generator_images: Optional[tuple[Word, ...]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        rels = tuple(free_reduce(r) for r in self.relators)
        for r in rels:
            for x in r:
                if x == 0 or abs(x) > self.generator_count:
                    raise GroupError(f"letter {x} out of range for {self.generator_count} generators")
        object.__setattr__(self, "relators", rels)

    def __str__(self):
        def w(r):
            return "·".join(f"g{abs(x)}" + ("⁻¹" if x < 0 else "") for x in r) or "1"
        gens = ", ".join(f"g{i}" for i in range(1, self.generator_count + 1))
        return f"<{gens} | {', '.join(w(r) for r in self.relators)}>"


def edge_path_presentation(complex: Complex2, base: int = 0) -> GroupPresentation:
    """Spanning tree by BFS from ``base`` (smallest index first); one generator per
    non-tree edge, one relator per triangle of the base component."""
    if not 0 <= base < complex.vertex_count:
        raise GroupError(f"base {base} out of range")
    nb = complex.neighbours
    seen = {base}
    tree: set[tuple[int, int]] = set()
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for w in sorted(nb[v]):
            if w not in seen:
                seen.add(w)
                tree.add((min(v, w), max(v, w)))
                queue.append(w)
    non_tree = sorted(e for e in complex.edges if e[0] in seen and e not in tree)
    gens = {e: k for k, e in enumerate(non_tree, 1)}

    def w(x, y):
        if x < y:
            g = gens.get((x, y))
            return (g,) if g else ()
        g = gens.get((y, x))
        return (-g,) if g else ()

    rels = []
    for x, y, z in sorted(complex.triangles):
        if x in seen:
            rels.append(free_reduce(w(x, y) + w(y, z) + w(z, x)))
    return GroupPresentation(len(non_tree), tuple(rels), base, gens)


def loop_to_word(complex: Complex2, presentation: GroupPresentation, loop: Path) -> Word:
    """Read a based loop edge by edge; tree edges contribute nothing."""
    if presentation.edge_generators is None or presentation.base is None:
        raise GroupError("presentation does not carry edge data")
    if loop.complex is not complex and loop.complex != complex:
        raise GroupError("loop lives in another complex")
    base = presentation.base
    if loop.start != base or loop.end != base:
        raise GroupError(f"loop is not based at {base}")
    gens = presentation.edge_generators
    out = []
    for x, y in zip(loop.values, loop.values[1:]):
        if x == y:
            continue
        if x < y:
            g = gens.get((x, y))
            if g:
                out.append(g)
        else:
            g = gens.get((y, x))
            if g:
                out.append(-g)
    return free_reduce(out)


# --- Tietze ----------------------------------------------------------------

class _Budget:
    def __init__(self, n: int):
        self.left = n

    def spend(self) -> bool:
        if self.left <= 0:
            return False
        self.left -= 1
        return True


def _normalise_relators(rels: list[Word]) -> list[Word]:
    seen = set()
    out = []
    for r in rels:
        r = cyclic_reduce(r)
        if not r:
            continue
        k = _cyclic_key(r)
        if k in seen:
            continue
        seen.add(k)
        out.append(k)
    out.sort(key=lambda c: (len(c), tuple((abs(x), x < 0) for x in c)))
    return out


def _substitute(word: Word, g: int, expr: Word) -> Word:
    out = []
    inv = inverse(expr)
    for x in word:
        if x == g:
            out.extend(expr)
        elif x == -g:
            out.extend(inv)
        else:
            out.append(x)
    return free_reduce(out)


def _try_overlap(rels: list[Word]):
    """Shorten a relator using more than half of a cyclic conjugate of another."""
    for i, r in enumerate(rels):
        conjugates = []
        for w in (r, inverse(r)):
            for k in range(len(w)):
                conjugates.append(w[k:] + w[:k])
        for j, s in enumerate(rels):
            if i == j or len(s) < len(r):
                continue
            doubled = s + s
            for c in conjugates:
                L = len(c)
                for k in range(L, L // 2, -1):
                    u, rest = c[:k], c[k:]
                    if k > len(s):
                        continue
                    for start in range(len(s)):
                        if doubled[start:start + k] == u:
                            rotated = doubled[start:start + len(s)]
                            new = cyclic_reduce(inverse(rest) + rotated[k:])
                            if len(new) < len(s):
                                out = list(rels)
                                out[j] = new
                                return out
    return None


def _eliminate_all(n: int, rels: list[Word], images: list[Word], budget: _Budget, cap: int):
    """Eliminate generators occurring exactly once in a relator, shortest relators first.

    Relators are indexed by the generators they contain so a substitution only
    touches the relators that mention the eliminated generator. ``images``
    (words for the original generators) are rewritten alongside.
    """
    words: dict[int, Word] = {}
    occ: dict[int, set[int]] = {g: set() for g in range(1, n + 1)}
    img_occ: dict[int, set[int]] = {g: set() for g in range(1, n + 1)}
    for k, w in enumerate(images):
        for x in w:
            img_occ[abs(x)].add(k)
    images = list(images)
    heap: list[tuple[int, int]] = []
    next_id = 0

    def add(word: Word):
        nonlocal next_id
        word = cyclic_reduce(word)
        if not word:
            return
        rid = next_id
        next_id += 1
        words[rid] = word
        for x in word:
            occ[abs(x)].add(rid)
        heapq.heappush(heap, (len(word), rid))

    def drop(rid: int):
        for x in words.pop(rid):
            occ[abs(x)].discard(rid)

    for r in rels:
        add(r)
    alive = set(range(1, n + 1))
    while heap:
        _, rid = heapq.heappop(heap)
        if rid not in words:
            continue
        r = words[rid]
        counts: dict[int, int] = {}
        for x in r:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        singles = sorted((k for k, c in counts.items() if c == 1), key=lambda k: (len(occ[k]), k))
        for g in singles:
            pos = next(i for i, x in enumerate(r) if abs(x) == g)
            rot = r[pos:] + r[:pos]
            # rot = g^{±1}·rest = 1  =>  g = rest^{-1} (or rest)
            rest = rot[1:]
            expr = inverse(rest) if rot[0] > 0 else rest
            targets = sorted(occ[g] - {rid})
            substituted = [_substitute(words[t], g, expr) for t in targets]
            if any(len(s) > cap for s in substituted):
                continue
            if not budget.spend():
                return _collect(alive, words, images)
            drop(rid)
            for t, s in zip(targets, substituted):
                drop(t)
                add(s)
            for k in sorted(img_occ.pop(g)):
                old = images[k]
                images[k] = _substitute(old, g, expr)
                for x in old:
                    if abs(x) in img_occ:
                        img_occ[abs(x)].discard(k)
                for x in images[k]:
                    img_occ[abs(x)].add(k)
            alive.discard(g)
            break
    return _collect(alive, words, images)


def _collect(alive: set[int], words: dict[int, Word], images: list[Word]):
    renumber = {g: k for k, g in enumerate(sorted(alive), 1)}

    def rn(w):
        return tuple((1 if x > 0 else -1) * renumber[abs(x)] for x in w)

    return len(alive), [rn(w) for w in words.values()], [rn(w) for w in images]


def tietze_simplify(p: GroupPresentation, effort: int = DEFAULT_EFFORT,
                    cap: int = LENGTH_CAP) -> GroupPresentation:
    """Deterministic simplification; the result presents an isomorphic group.

    The result's ``generator_images`` gives, for each original generator, its
    word in the new generators (see :func:`map_word`).
    """
    budget = _Budget(effort)
    n = p.generator_count
    rels = _normalise_relators(list(p.relators))
    images = [(g,) for g in range(1, n + 1)]
    while True:
        n, rels, images = _eliminate_all(n, rels, images, budget, cap)
        rels = _normalise_relators(rels)
        if not budget.spend():
            break
        step = _try_overlap(rels)
        if step is None:
            break
        rels = _normalise_relators(step)
    return GroupPresentation(n, tuple(rels), generator_images=tuple(images))


def map_word(simplified: GroupPresentation, word: Sequence[int]) -> Word:
    """Rewrite a word in the original generators into the simplified ones."""
    if simplified.generator_images is None:
        raise GroupError("presentation carries no generator images")
    out: list[int] = []
    for x in word:
        w = simplified.generator_images[abs(x) - 1]
        out.extend(w if x > 0 else inverse(w))
    return free_reduce(out)


# --- abelianization ---------------------------------------------------------

@dataclass(frozen=True)
class AbelianInvariants:
    betti: int
    torsion: tuple[int, ...] = ()

    def __str__(self):
        parts = ["Z"] * self.betti + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def smith_diagonal(matrix: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form, in divisibility order."""
    a = [list(row) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            piv = a[t][t]
            changed = False
            for i in range(t + 1, rows):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    changed = True
            for j in range(t + 1, cols):
                q = a[t][j] // piv
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    changed = True
            if not changed:
                # enforce divisibility on the remaining block
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % piv), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest remainder into the pivot position
            best = (t, t)
            for i in range(t, rows):
                if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, cols):
                if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                    best = (t, j)
            i, j = best
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def relator_matrix(p: GroupPresentation) -> list[list[int]]:
    m = []
    for r in p.relators:
        row = [0] * p.generator_count
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        m.append(row)
    return m


def _unit_pivots(p: GroupPresentation) -> tuple[int, list[list[int]]]:
    """Sparse elimination of ±1 pivots, which never changes the Smith form.

    Returns the number of unit diagonal entries found and the leftover block.
    Pivots are taken from the sparsest column first to limit fill-in.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for k, r in enumerate(p.relators):
        row: dict[int, int] = {}
        for x in r:
            g = abs(x) - 1
            row[g] = row.get(g, 0) + (1 if x > 0 else -1)
        row = {g: v for g, v in row.items() if v}
        if row:
            rows[k] = row
            for g in row:
                cols.setdefault(g, set()).add(k)
    units = 0
    heap = [(len(rs), g) for g, rs in cols.items()]
    heapq.heapify(heap)
    while heap:
        size, g = heapq.heappop(heap)
        rs = cols.get(g)
        if not rs:
            continue
        if size != len(rs):
            heapq.heappush(heap, (len(rs), g))
            continue
        pivot = next((k for k in sorted(rs, key=lambda k: (len(rows[k]), k)) if abs(rows[k][g]) == 1), None)
        if pivot is None:
            continue
        prow = rows.pop(pivot)
        for h in prow:
            cols[h].discard(pivot)
        sign = prow[g]
        for k in sorted(cols[g]):
            row = rows[k]
            q = row[g] * sign
            for h, v in prow.items():
                nv = row.get(h, 0) - q * v
                if nv:
                    if h not in row:
                        cols.setdefault(h, set()).add(k)
                    row[h] = nv
                else:
                    row.pop(h, None)
                    cols[h].discard(k)
            if not row:
                del rows[k]
        for h in prow:
            if h != g and cols.get(h):
                heapq.heappush(heap, (len(cols[h]), h))
        del cols[g]
        units += 1
    live = sorted({h for row in rows.values() for h in row})
    pos = {h: i for i, h in enumerate(live)}
    block = []
    for k in sorted(rows):
        line = [0] * len(live)
        for h, v in rows[k].items():
            line[pos[h]] = v
        block.append(line)
    return units, block


def abelianization(p: GroupPresentation) -> AbelianInvariants:
    if not p.generator_count:
        return AbelianInvariants(0, ())
    units, block = _unit_pivots(p)
    diag = [1] * units + (smith_diagonal(block) if block else [])
    rank = len(diag)
    return AbelianInvariants(p.generator_count - rank, tuple(d for d in diag if d > 1))


# --- classification -------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    kind: str
    rank: int = 0
    presentation: Optional[GroupPresentation] = None
    abelian: Optional[AbelianInvariants] = None

    @property
    def label(self) -> str:
        if self.kind == "trivial":
            return "trivial"
        if self.kind == "free":
            return f"free({self.rank})"
        return "unresolved"

    @property
    def conclusive(self) -> bool:
        return self.kind != "unresolved"

    @property
    def free_rank(self) -> Optional[int]:
        if self.kind == "trivial":
            return 0
        if self.kind == "free":
            return self.rank
        return None

    def __str__(self):
        return self.label


def classify(p: GroupPresentation, effort: int = DEFAULT_EFFORT) -> Classification:
    """Sound labels: ``trivial`` and ``free(r)`` are only emitted when the simplified
    presentation shows them; otherwise ``unresolved`` with abelian invariants."""
    s = tietze_simplify(p, effort)
    ab = abelianization(s)
    if s.generator_count == 0:
        return Classification("trivial", 0, s, ab)
    if not s.relators:
        return Classification("free", s.generator_count, s, ab)
    return Classification("unresolved", 0, s, ab)


# --- van Kampen -------------------------------------------------------------

Piece = Union[GroupPresentation, None]


def van_kampen_pushout(pU: GroupPresentation, pV: GroupPresentation,
                       intersection_components: Union[int, Sequence[Piece]],
                       effort: int = DEFAULT_EFFORT) -> GroupPresentation:
    """Pushout of π₁ of two connected pieces glued along a discrete intersection.

    The nerve (U, V and one edge per intersection component) contributes
    ``k - 1`` free generators for ``k`` components. Intersection components may be
    given as presentations; each must be simply connected.
    """
    if isinstance(intersection_components, int):
        k = intersection_components
    else:
        comps = list(intersection_components)
        for c in comps:
            if c is not None and classify(c, effort).kind != "trivial":
                raise GroupError("intersection component is not simply connected")
        k = len(comps)
    if k < 1:
        raise GroupError("U and V must intersect")
    n = pU.generator_count + pV.generator_count + k - 1
    shift = pU.generator_count
    rels = list(pU.relators)
    rels += [tuple(x + shift if x > 0 else x - shift for x in r) for r in pV.relators]
    return GroupPresentation(n, tuple(rels))


def van_kampen_from_cover(complex: Complex2, U: Iterable[int], V: Iterable[int],
                          effort: int = DEFAULT_EFFORT) -> GroupPresentation:
    """Split ``complex`` into full subcomplexes on ``U`` and ``V`` and glue their groups.

    Every edge and triangle must lie in ``U`` or in ``V``; both pieces must be
    connected and every component of the intersection simply connected.
    """
    u, v = set(U), set(V)
    if u | v != set(range(complex.vertex_count)):
        raise GroupError("U and V must cover the vertices")
    for s in list(complex.edges) + list(complex.triangles):
        if not (set(s) <= u or set(s) <= v):
            raise GroupError(f"simplex {s} lies in neither piece")
    pieces = []
    for part in (u, v):
        sub, _ = complex.induced(part)
        if pi0(sub).count != 1:
            raise GroupError("each piece must be connected")
        pieces.append(edge_path_presentation(sub, 0))
    inter, _ = complex.induced(u & v)
    comps = []
    part = pi0(inter)
    for comp in part.components():
        sub, _ = inter.induced(comp)
        comps.append(edge_path_presentation(sub, 0))
    return van_kampen_pushout(pieces[0], pieces[1], comps, effort)


# --- strong collapse -------------------------------------------------------

def dominated_reduction(adjacency: np.ndarray) -> list[int]:
    """Repeatedly drop vertices whose closed neighbourhood lies in another's.

    ``adjacency`` is the boolean matrix of a tolerance (flag) structure with a
    true diagonal. Such removals are strong collapses, so the surviving full
    subcomplex keeps π₀ and π₁. A domination ``N[v] ⊆ N[w]`` survives the removal
    of other vertices, so one overlap matrix serves a whole pass.
    Returns the surviving vertices.
    """
    adj = np.asarray(adjacency, dtype=bool)
    alive = np.ones(adj.shape[0], dtype=bool)
    while True:
        idx = np.flatnonzero(alive)
        sub = adj[np.ix_(idx, idx)]
        a = sub.astype(np.float32)
        overlap = a @ a.T
        deg = sub.sum(axis=1)
        dom = (overlap == deg[:, None]) & sub
        np.fill_diagonal(dom, False)
        live = np.ones(len(idx), dtype=bool)
        removed = False
        for v in np.flatnonzero(dom.any(axis=1)):
            if (dom[v] & live).any():
                live[v] = False
                removed = True
        if not removed:
            return idx.tolist()
        alive[idx[~live]] = False


def flag_complex2(adjacency: np.ndarray, vertices: Sequence[int]) -> Complex2:
    """2-truncated flag complex on ``vertices`` (re-indexed in the given order)."""
    idx = np.asarray(vertices, dtype=np.int64)
    sub = np.asarray(adjacency, dtype=bool)[np.ix_(idx, idx)].copy()
    np.fill_diagonal(sub, False)
    iu, ju = np.nonzero(np.triu(sub, 1))
    edges = frozenset(zip(iu.tolist(), ju.tolist()))
    nb = [set(np.flatnonzero(row).tolist()) for row in sub]
    tris = set()
    for a, b in edges:
        for w in nb[a] & nb[b]:
            if w > b:
                tris.add((a, b, w))
    return Complex2(len(idx), edges, frozenset(tris))


def component_groups(complex: Complex2, effort: int = DEFAULT_EFFORT) -> list[Classification]:
    """Classification of π₁ of every component, ordered by smallest vertex."""
    return [classify(edge_path_presentation(complex, comp[0]), effort)
            for comp in pi0(complex).components()]


def disjoint_union(presentations: Sequence[GroupPresentation]) -> GroupPresentation:
    """Free product presentation (used to pool abelian invariants over components)."""
    n = 0
    rels = []
    for p in presentations:
        rels += [tuple(x + n if x > 0 else x - n for x in r) for r in p.relators]
        n += p.generator_count
    return GroupPresentation(n, tuple(rels))


__all__ = [
    "AbelianInvariants", "Classification", "ComplexError", "GroupError", "GroupPresentation",
    "Partition", "abelianization", "classify", "component_groups", "cyclic_reduce",
    "disjoint_union", "dominated_reduction", "edge_path_presentation", "flag_complex2",
    "free_reduce", "inverse", "loop_to_word", "map_word", "partition_from_edges", "pi0", "smith_diagonal",
    "tietze_simplify", "van_kampen_from_cover", "van_kampen_pushout",
]
