from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tolerance_homotopy.metric import PointCloud, Resolution, load_image_grid, region_fixture
from tolerance_homotopy.retracts import (AxisSequence, RetractError, TelescopicSpec, grid_retract,
                                         is_telescopically_contractible, product_window,
                                         telescopic_value, verify_homotopy, verify_telescopic_map)
from tolerance_homotopy.scan import analyze_structure

F = Fraction
UNIT = AxisSequence(0)
BASINS_SPEC = TelescopicSpec((None, AxisSequence(0, (1, 3, 1))))


def staircase_pair(pitch=F(1, 4)):
    """A bar and the same bar with steps on top, sharing their 1-grid."""
    bar, stairs = [], []
    for i in range(int(4 / pitch) + 1):
        for j in range(int(2 / pitch)):
            x, y = i * pitch, j * pitch
            if y <= 1:
                bar.append((x, y))
            step = 1 + F(int(x), 4)
            if y <= 1 or (x < 4 and y < step):
                stairs.append((x, y))
    return PointCloud.of(bar), PointCloud.of(stairs)


def test_axis_examples():
    assert telescopic_value(TelescopicSpec((UNIT,)), 2, (3,)) == (2,)
    assert telescopic_value(TelescopicSpec((UNIT,)), 2, (-3,)) == (-2,)
    assert telescopic_value(TelescopicSpec((UNIT, UNIT)), 0, (5, -7)) == (0, 0)
    assert telescopic_value(BASINS_SPEC, 2, (7, 5)) == (7, 4)
    assert [BASINS_SPEC.axes[1].a(i) for i in range(-3, 5)] == [-5, -4, -1, 0, 1, 4, 5, 6]


def test_asymmetric_negative_side():
    ax = AxisSequence(1, (1,), (2,))
    assert ax.a(-2) == -3 and ax.a(2) == 3
    assert ax.apply(1, F(-5)) == -1


def test_large_index_is_identity():
    spec = TelescopicSpec((UNIT, AxisSequence(0, (F(1, 2),))))
    x = (F(3), F(-5, 2))
    n = spec.index_span([x])
    assert telescopic_value(spec, n, x) == x
    assert telescopic_value(spec, n - 1, x) != x


def test_bad_jumps():
    with pytest.raises(RetractError):
        AxisSequence(0, ())
    with pytest.raises(RetractError):
        AxisSequence(0, (1, 0))
    with pytest.raises(RetractError):
        telescopic_value(TelescopicSpec((UNIT,)), 0, (1, 2))


def test_verify_map_on_window():
    window = product_window([(-2, 3), (0, 4)])
    assert verify_telescopic_map(TelescopicSpec.unit((0, 2)), window, 1)
    wide = TelescopicSpec((AxisSequence(0, (2,)), AxisSequence(2)))
    assert not verify_telescopic_map(wide, window, 1)
    assert verify_telescopic_map(wide, window, 2)


def test_scaling_is_not_a_map():
    cloud = PointCloud.of([(1, 1), (0, 2)])
    n = 8
    assert not verify_homotopy(lambda i, x: tuple(F(min(max(i, 0), n), n) * c for c in x),
                               cloud, 1, range(-1, n + 1))


def test_contractibility():
    window = product_window([(0, 4), (0, 3)])
    assert is_telescopically_contractible(window, 1, TelescopicSpec.unit((2, 1)))
    ring = load_image_grid([[1, 1, 1], [1, 0, 1], [1, 1, 1]], metric="l1")
    assert not is_telescopically_contractible(ring, 1, TelescopicSpec.unit((1, 1)))


def test_basins_retracts_onto_bottom_edge():
    cloud = region_fixture("basins", F(1, 2))
    assert is_telescopically_contractible(cloud, 3, BASINS_SPEC)
    assert verify_telescopic_map(BASINS_SPEC, cloud, 3)
    assert not verify_telescopic_map(BASINS_SPEC, cloud, F(5, 2))
    # the image is the bottom row, which contracts along x
    bottom = PointCloud.of([p for p in cloud.points if p[1] == 0])
    assert is_telescopically_contractible(bottom, 3, TelescopicSpec.unit((0, 0)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(-10, 10),
       st.integers(-12, 12), st.integers(0, 12), st.integers(-12, 12))
def test_contraction_bound(jumps, center, x_low, gap, i):
    ax = AxisSequence(F(center), tuple(F(j) for j in jumps))
    x2, x1 = F(x_low), F(x_low + gap)
    d = ax.apply(i, x1) - ax.apply(i, x2)
    assert 0 <= d <= x1 - x2


def test_grid_retract():
    dense = PointCloud.of([(F(i, 4), F(j, 4)) for i in range(13) for j in range(9)])
    lattice = grid_retract(dense, 1)
    assert sorted(lattice.points) == sorted(product_window([(0, 3), (0, 2)]).points)
    assert grid_retract(lattice, 1).points == lattice.points
    with pytest.raises(RetractError):
        grid_retract(PointCloud.of([(F(1, 2), F(1, 2))]), 1)


def _invariants(cloud, eps):
    inv = analyze_structure(cloud, Resolution(eps))
    return inv.component_count, inv.abelian.betti


def test_staircase_pair_shares_retract():
    bar, stairs = staircase_pair()
    gb, gs = grid_retract(bar, 1), grid_retract(stairs, 1)
    assert sorted(gb.points) == sorted(gs.points)
    assert _invariants(bar, 1) == _invariants(gb, 1) == _invariants(stairs, 1) == (1, 0)


@pytest.mark.parametrize("name,eps", [("basins", F(1, 2)), ("basins", 1)])
def test_grid_retract_preserves_invariants(name, eps):
    cloud = region_fixture(name, F(1, 4))
    assert _invariants(cloud, eps) == _invariants(grid_retract(cloud, eps), eps)


def test_grid_retract_needs_grid_points():
    # the corner (10, 1) of the closed hole is the grid image of nearby points
    with pytest.raises(RetractError):
        grid_retract(region_fixture("two_holes", F(1, 2)), 1)
