import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tolerance_homotopy.complexes import (Complex2, ComplexError, chaotic, circle, generate_complex,
                                          interval, is_linked, point, product2, sphere_fixture,
                                          tolerance_closure, truncate2)
from tolerance_homotopy.groups import pi0

from randomdata import random_complex2


def test_single_generator():
    c = generate_complex(2, [{0, 1}])
    assert c.maximal_simplices == {(0, 1)}
    assert is_linked(c, {0, 1})


def test_pairwise_generated_triple_not_linked():
    c = generate_complex(3, [{0, 1}, {1, 2}, {0, 2}])
    assert not is_linked(c, {0, 1, 2})
    assert is_linked(c, {0, 2})


def test_antichain_absorbs_subsets():
    c = generate_complex(4, [{0, 1, 2}, {1, 2}])
    assert c.maximal_simplices == {(0, 1, 2), (3,)}


def test_empty_and_singletons_linked():
    c = generate_complex(3, [])
    assert is_linked(c, set())
    assert all(is_linked(c, {v}) for v in range(3))
    assert not is_linked(c, {0, 1})


def test_out_of_range_rejected():
    with pytest.raises(ComplexError):
        generate_complex(2, [{0, 2}])
    with pytest.raises(ComplexError):
        is_linked(generate_complex(2, []), {5})


def test_octahedral_circle_has_no_opposed_pairs():
    c = sphere_fixture("octahedral", 1)
    assert not is_linked(c, {0, 1})
    assert is_linked(c, {0, 2})


def test_truncations():
    t = truncate2(generate_complex(4, [range(4)]))
    assert (len(t.edges), len(t.triangles)) == (6, 4)
    c4 = truncate2(generate_complex(4, [(i, (i + 1) % 4) for i in range(4)]))
    assert (len(c4.edges), len(c4.triangles)) == (4, 0)
    s1 = truncate2(sphere_fixture("simplicial", 1))
    assert (len(s1.edges), len(s1.triangles)) == (3, 0)


def test_tolerance_closure():
    assert tolerance_closure(circle(3)).triangles == {(0, 1, 2)}
    assert tolerance_closure(circle(4)).triangles == frozenset()
    x = chaotic(4)
    assert tolerance_closure(x) == x
    assert x.is_tolerance()
    assert not circle(3).is_tolerance()


def test_product_of_intervals_is_chaotic():
    assert product2(interval(1), interval(1)) == chaotic(4)


def test_product_with_point():
    c = circle(5)
    assert product2(c, point()) == c


def test_circles():
    c3 = circle(3)
    assert (c3.vertex_count, len(c3.edges), len(c3.triangles)) == (3, 3, 0)
    assert circle(5).edges == {(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}
    with pytest.raises(ComplexError):
        circle(2)


def test_spheres():
    s0 = sphere_fixture("simplicial", 0)
    assert s0.maximal_simplices == {(0,), (1,)}
    oct1 = truncate2(sphere_fixture("octahedral", 1))
    # +e0, +e1, -e0, -e1 in cyclic order
    relabel = {0: 0, 2: 1, 1: 2, 3: 3}
    assert {tuple(sorted((relabel[a], relabel[b]))) for a, b in oct1.edges} == circle(4).edges
    cube = sphere_fixture("cubical", 2)
    assert cube.vertex_count == 8
    assert is_linked(cube, {0b000, 0b110})
    assert not is_linked(cube, {0b000, 0b111})
    simp = sphere_fixture("simplicial", 2)
    assert is_linked(simp, {0, 1, 2}) and not is_linked(simp, {0, 1, 2, 3})


def test_complex2_validation():
    with pytest.raises(ComplexError):
        Complex2(3, frozenset({(0, 1)}), frozenset({(0, 1, 2)}))
    with pytest.raises(ComplexError):
        Complex2(3, frozenset({(1, 1)}))
    assert Complex2.build(3, [], [(2, 0, 1)]).edges == {(0, 1), (0, 2), (1, 2)}


def _linked_by_brute_force(gens, subset):
    return any(set(subset) <= set(g) for g in gens) or len(subset) <= 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.lists(st.sets(st.integers(0, 9), max_size=5), max_size=6))
def test_truncate2_matches_enumeration(n, gens):
    gens = [{v % n for v in g} for g in gens]
    c = generate_complex(n, gens)
    t = truncate2(c)
    assert t.edges == {e for e in combinations(range(n), 2) if _linked_by_brute_force(gens, e)}
    assert t.triangles == {s for s in combinations(range(n), 3) if _linked_by_brute_force(gens, s)}
    ms = list(c.maximal_simplices)
    assert not any(a != b and set(a) <= set(b) for a in ms for b in ms)
    for m in ms:
        for k in range(len(m)):
            for sub in combinations(m, k):
                assert is_linked(c, sub)


def test_product_projections_and_components():
    rng = random.Random(5)
    for _ in range(20):
        x = random_complex2(rng, rng.randint(1, 4), 0.4)
        y = random_complex2(rng, rng.randint(1, 4), 0.4)
        p = product2(x, y)
        ny = y.vertex_count
        for s in list(p.edges) + list(p.triangles):
            assert x.is_linked({v // ny for v in s}) and y.is_linked({v % ny for v in s})
        assert pi0(p).count == pi0(x).count * pi0(y).count
