import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tolerance_homotopy.complexes import circle, interval, tolerance_closure
from tolerance_homotopy.nets import (PathError, Search, caterpillar, canonical_form, concat,
                                     congruent, congruent_by_search, delay, is_double_net_valid,
                                     make_path, naive_one_step, reverse, two_homotopic_bfs)

from randomdata import random_complex2, random_path

C4 = circle(4)


def test_make_path():
    p = make_path(C4, [0, 1, 2])
    assert p.values == (0, 1, 2) and p.support == (0, 2)
    const = make_path(C4, [0, 0, 0])
    assert const.values == (0,) and const.support == (0, 0)
    with pytest.raises(PathError):
        make_path(C4, [0, 2])
    with pytest.raises(PathError):
        make_path(C4, [])


def test_trimming_keeps_instants():
    p = make_path(C4, [0, 0, 1, 1], lo=-2)
    assert p.values == (0, 1) and p.support == (-1, 0)
    assert p(-5) == 0 and p(7) == 1


def test_concat():
    assert concat(make_path(C4, [0, 1]), make_path(C4, [1, 2])).values == (0, 1, 2)
    a = make_path(C4, [0, 1, 2])
    assert a + make_path(C4, [2]) == a
    assert make_path(C4, [0]) + a == a
    b, c = make_path(C4, [2, 3, 0]), make_path(C4, [0, 1])
    assert (a + b) + c == a + (b + c)
    with pytest.raises(PathError):
        concat(a, c)


def test_concat_support_is_sum():
    a = make_path(C4, [0, 1, 2], lo=-1)
    b = make_path(C4, [2, 3], lo=4)
    s = a + b
    assert s.support == (a.lo + b.lo, a.hi + b.hi)


def test_reverse():
    a = make_path(C4, [0, 1, 2], lo=1)
    assert reverse(a).values == (2, 1, 0) and reverse(a).support == (-3, -1)
    assert -(-a) == a
    z = make_path(C4, [3])
    assert -z == z


def test_delay():
    a = make_path(C4, [0, 1, 2])
    d = delay(a, 1)
    assert d.values == (0, 1, 1, 2)
    assert delay(a, 2) == a and delay(a, 9) == a


def test_congruence_examples():
    a = make_path(C4, [0, 1, 2, 3])
    assert all(congruent(a, delay(a, t)) for t in range(-2, 5))
    assert congruent(a, make_path(C4, [0, 1, 2, 3], lo=5))
    assert not congruent(make_path(C4, [0, 1, 0]), make_path(C4, [0, 1, 2, 1, 0]))
    assert not congruent_by_search(make_path(C4, [0, 1, 0]), make_path(C4, [0, 1, 2, 1, 0]))


def test_caterpillar_examples():
    line = interval(5)
    a = make_path(line, [0, 1, 2, 3])
    net = caterpillar(a, 1)
    assert is_double_net_valid(net, line)
    rows = [make_path(line, r, net.i_lo) for r in net.grid]
    assert rows[0] == delay(a, 1) and rows[-1] == a
    const = make_path(line, [2])
    assert all(r == net_row for net_row in caterpillar(const, 0).grid for r in [(2, 2)])


def test_naive_one_step_is_not_a_net():
    line = interval(4)
    a = make_path(line, [0, 1, 2])
    assert not is_double_net_valid(naive_one_step(a, delay(a, 0)), line)
    deg = caterpillar(a, 5)
    assert is_double_net_valid(deg, line)


def test_bfs_examples():
    ct3 = tolerance_closure(circle(3))
    loop = make_path(ct3, [0, 1, 2, 0])
    assert two_homotopic_bfs(ct3, loop, make_path(ct3, [0])) is Search.YES
    l4 = make_path(C4, [0, 1, 2, 3, 0])
    assert two_homotopic_bfs(C4, l4, make_path(C4, [0]), max_len=9) is Search.NO_WITHIN_BOUNDS
    a = make_path(C4, [0, 1, 2])
    assert two_homotopic_bfs(C4, a, delay(a, 1)) is Search.YES
    with pytest.raises(PathError):
        two_homotopic_bfs(C4, a, make_path(C4, [0]))


def _random_setup(seed):
    rng = random.Random(seed)
    c = random_complex2(rng, rng.randint(2, 6), 0.6)
    return rng, c


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_reverse_is_anti_homomorphism(seed):
    rng, c = _random_setup(seed)
    a = random_path(rng, c, rng.randint(0, 5))
    b = random_path(rng, c, rng.randint(0, 5), start=a.end)
    assert -(a + b) == (-b) + (-a)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_simplicial_identity(seed):
    rng, c = _random_setup(seed)
    a = random_path(rng, c, rng.randint(0, 5))
    t = rng.randint(-4, 6)
    s = rng.randint(t, 7)
    assert delay(delay(a, t), s + 1) == delay(delay(a, s), t)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_canonical_form_matches_delay_search(seed):
    rng, c = _random_setup(seed)
    a = random_path(rng, c, rng.randint(0, 4))
    b = a
    for _ in range(rng.randint(0, 2)):
        b = delay(b, rng.randint(b.lo - 1, b.hi))
    if rng.random() < 0.5:
        # same support start: any common delay needs at most 4 steps per side
        b = random_path(rng, c, rng.randint(0, 4), start=a.start, lo=a.lo)
    assert congruent(a, b) == congruent_by_search(a, b, max_delays=4)


def test_congruence_is_equivalence():
    rng = random.Random(11)
    for _ in range(100):
        c = random_complex2(rng, 3, 0.8)
        ps = [random_path(rng, c, rng.randint(0, 3), start=0) for _ in range(3)]
        a, b, d = ps
        assert congruent(a, a)
        assert congruent(a, b) == congruent(b, a)
        if congruent(a, b) and congruent(b, d):
            assert congruent(a, d)
    assert canonical_form(make_path(C4, [0, 0, 1, 1, 2])) == (0, 1, 2)
