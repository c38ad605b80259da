"""Flow samples, d_lambda, long covers, bumps, partitions, the nerve map and the coloring."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from flowjoin.covers import (
    Cover,
    CoverSet,
    DegenerateInput,
    GridSample,
    build_long_cover,
    build_sample,
    bump,
    color_cover,
    coloring_failures,
    contraction_check,
    cover_csv,
    l1,
    long_window_failures,
    nerve_coordinates,
    nerve_map,
    partition,
    partition_csv,
    partition_variation_violations,
    slow_variation_violations,
)
from flowjoin.flow_space import Axis, Line, Segment, constant
from flowjoin.groups import make_group
from flowjoin.model_spaces import DomainError

FREE = make_group("free", rank=2)
LINE_LATTICE = make_group("lattice", dim=1)
PLANE_LATTICE = make_group("lattice", dim=2)
HALF = Fraction(1, 2)


def interval_cover(sample, ranges, scale=Fraction(1)) -> Cover:
    return Cover([CoverSet(lo, scale, frozenset(range(lo, hi + 1))) for lo, hi in ranges], scale)


def parallel_lines_sample():
    plane = PLANE_LATTICE.space
    lines = [Line(plane, plane.point(0, Fraction(k, 32)), (1, 0)) for k in range(12)]
    return build_sample(PLANE_LATTICE, lines, HALF, 1, 1)


# -- flow samples -------------------------------------------------------------------


def test_constant_geodesic_gives_one_class():
    sample = build_sample(FREE, [constant(FREE.space, FREE.space.base_point)], HALF, 1, 1)
    assert sample.size == 1


def test_integer_flow_of_a_line_is_an_integer_translation():
    space = LINE_LATTICE.space
    sample = build_sample(LINE_LATTICE, [Line(space, space.point(0), [1])], 1, 3, 1)
    assert sample.size == 1


def test_unidentified_shifts_stay_distinct():
    # the translations move c(0) back to [0, 1) but cannot undo the anchor shift of a long segment
    space = LINE_LATTICE.space
    segment = Segment(space, space.point(-20), space.point(20), -20)
    assert build_sample(LINE_LATTICE, [segment], 1, 3, 1).size == 7


def test_free_axis_grid_folds_to_two_classes():
    axis = Axis(FREE.space, FREE, FREE.parse("a"), FREE.space.base_point)
    sample = build_sample(FREE, [axis], HALF, 2, 1)
    assert sample.size == 2
    assert sample.d_lambda(0, 0) == 0
    assert sample.d_lambda(0, 1) == HALF


def test_grid_flow_bounds_d_lambda():
    target = FREE.space.act(FREE.parse("abab"), FREE.space.base_point)
    segment = Segment(FREE.space, FREE.space.base_point, target)
    sample = build_sample(FREE, [segment], HALF, 4, 1)
    i, j = sample.lookup(segment).index, sample.lookup(segment.flow(2)).index
    assert sample.d_lambda(i, j) <= 2


def test_parallel_lines_are_at_their_gap():
    plane = PLANE_LATTICE.space
    low, high = Line(plane, plane.point(0, 0), (1, 0)), Line(plane, plane.point(0, Fraction(1, 4)), (1, 0))
    sample = build_sample(PLANE_LATTICE, [low, high], HALF, 1, 1)
    d = sample.d_lambda(sample.lookup(low).index, sample.lookup(high).index)
    assert Fraction(1, 4) <= d <= Fraction(1, 4) + Fraction(1, 1000)


def test_sample_grid_must_be_positive():
    with pytest.raises(DomainError):
        build_sample(FREE, [], HALF, 0, 1)


# -- long covers -------------------------------------------------------------------


def test_single_point_gives_a_single_set():
    cover = build_long_cover(GridSample(0, 0, 1), 1)
    assert len(cover.sets) == 1 and cover.dimension == 0


def test_line_cover_is_long_on_five_step_windows():
    sample = GridSample(0, 16, HALF)
    cover = build_long_cover(sample, 2 * sample.dt)
    assert len(cover.sets) == 5
    assert long_window_failures(sample, cover, 2 * sample.dt) == []


def test_far_orbits_get_disjoint_sets():
    plane = PLANE_LATTICE.space
    low, high = Line(plane, plane.point(0, 0), (1, 0)), Line(plane, plane.point(0, HALF), (1, 0))
    sample = build_sample(PLANE_LATTICE, [low, high], HALF, 1, 64)
    cover = build_long_cover(sample, HALF)
    assert len(cover.sets) == 2 and cover.dimension == 0
    assert not cover.sets[0].members & cover.sets[1].members


def test_cover_scale_below_the_grid_is_rejected():
    with pytest.raises(DomainError):
        build_long_cover(GridSample(0, 4, 1), HALF)


def test_cover_dump_lists_members():
    text = cover_csv(build_long_cover(GridSample(0, 4, 1), 1))
    assert text.splitlines()[0] == "set,color,center,radius,members"
    assert text.splitlines()[1] == "0,,0,2/1,0 1 2"


# -- bumps and partitions -------------------------------------------------------------


def circle():
    return GridSample(-8, 7, HALF, period=16)


def test_bump_is_one_on_the_inner_set():
    sample = circle()
    values = bump(sample, {sample.index(0)}, {sample.index(k) for k in (-1, 0, 1)}, 2)
    assert values[sample.index(0)] == 1


def test_bump_vanishes_far_from_the_outer_set():
    sample = circle()
    values = bump(sample, {sample.index(0)}, {sample.index(k) for k in (-1, 0, 1)}, 2)
    assert values[sample.index(-8)] == 0 and values[sample.index(6)] == 0


def test_bump_at_two_on_the_circle_is_one_eighth():
    sample = circle()
    values = bump(sample, {sample.index(0)}, {sample.index(k) for k in (-1, 0, 1)}, 2)
    # grid oracle: max over t of (1 - |t|/2)(1 - |2 + t|), attained at t = -3/2
    oracle = max((1 - abs(Fraction(k, 2)) / 2) * max(Fraction(0), 1 - abs(2 + Fraction(k, 2))) for k in range(-4, 5))
    assert values[sample.index(4)] == oracle == Fraction(1, 8)


def test_bump_rejects_inner_outside_outer():
    with pytest.raises(DomainError):
        bump(GridSample(0, 8, 1), {1}, {2, 3}, 2)


def test_partition_refuses_a_cover_with_zero_lebesgue_number():
    sample = GridSample(0, 120, 1)
    with pytest.raises(DegenerateInput):
        partition(sample, interval_cover(sample, [(0, 60), (60, 120)]), 20)


def test_single_set_partition_is_one():
    sample = GridSample(0, 0, 1)
    assert partition(sample, interval_cover(sample, [(0, 0)]), 1).values == [[Fraction(1)]]


def test_symmetric_sets_split_evenly_at_the_middle():
    sample = GridSample(-8, 8, HALF)
    part = partition(sample, interval_cover(sample, [(0, 10), (6, 16)]), 1)
    assert part.column(sample.index(0)) == [HALF, HALF]


def test_two_set_variation_bound_with_long_scale():
    sample = GridSample(0, 120, 1)
    part = partition(sample, interval_cover(sample, [(0, 70), (30, 120)]), 20)
    assert part.cover.dimension == 1
    assert partition_variation_violations(sample, part) == []
    worst = max(abs(row[z + 1] - row[z]) for row in part.values for z in range(120))
    assert worst <= Fraction(5, 20)


def test_partition_dump_has_rational_entries():
    sample = GridSample(0, 2, 1)
    text = partition_csv(partition(sample, interval_cover(sample, [(0, 2)]), 1))
    assert text.splitlines() == ["set,z0,z1,z2", "0,1/1,1/1,1/1"]


# -- nerve and coloring ---------------------------------------------------------------


def test_point_in_one_set_maps_to_its_vertex():
    sample = GridSample(0, 8, 1)
    assert nerve_map(sample, interval_cover(sample, [(0, 5), (3, 8)]), 0) == {0: 1}


def test_nerve_distance_of_a_point_to_itself_is_zero():
    sample = GridSample(0, 8, 1)
    coords = nerve_coordinates(sample, interval_cover(sample, [(0, 5), (3, 8)]))
    assert l1(coords[4], coords[4]) == 0


def test_disjoint_cover_keeps_color_zero():
    sample = GridSample(0, 8, 1)
    cover = interval_cover(sample, [(0, 3), (4, 8)])
    colored = color_cover(sample, cover)
    assert [s.color for s in colored.cover.sets] == [0, 0]
    assert [s.members for s in colored.cover.sets] == [s.members for s in cover.sets]


def test_edge_nerve_gives_two_vertex_stars_and_one_edge_star():
    sample = GridSample(0, 8, 1)
    cover = interval_cover(sample, [(0, 5), (3, 8)])
    colored = color_cover(sample, cover)
    assert [len(colored.by_color(c)) for c in range(colored.colors)] == [2, 1]
    assert coloring_failures(colored, cover) == {"overlap": [], "containment": []}


def test_path_nerve_gives_three_vertex_stars_and_two_edge_stars():
    sample = GridSample(0, 12, 1)
    cover = interval_cover(sample, [(0, 4), (3, 8), (7, 12)])
    colored = color_cover(sample, cover)
    assert [len(colored.by_color(c)) for c in range(colored.colors)] == [3, 2]
    assert coloring_failures(colored, cover) == {"overlap": [], "containment": []}


def test_coloring_refuses_a_cover_above_the_allowed_dimension():
    sample = GridSample(0, 8, 1)
    with pytest.raises(DomainError):
        color_cover(sample, interval_cover(sample, [(0, 5), (3, 8), (4, 6)]), max_dim=1)


@pytest.mark.parametrize("fixture", ["line", "circle", "parallel-lines"])
def test_contraction_and_coloring_on_cover_fixtures(fixture):
    if fixture == "line":
        sample, scale = GridSample(0, 64, Fraction(1, 8)), 1
    elif fixture == "circle":
        sample, scale = GridSample(0, 63, Fraction(1, 8), period=64), 1
    else:
        sample, scale = parallel_lines_sample(), HALF
    cover = build_long_cover(sample, scale)
    report = contraction_check(sample, cover)
    assert report.pairs_checked > 0
    assert report.violations == [] and report.star_failures == []
    colored = color_cover(sample, cover)
    assert coloring_failures(colored, cover) == {"overlap": [], "containment": []}
    assert long_window_failures(sample, colored.cover, colored.alpha) == []


# -- properties -----------------------------------------------------------------------


def random_interval_cover(rng: random.Random, size: int):
    """Overlapping intervals covering 0..size-1 with overlaps of at least eight points."""
    ranges, lo = [], 0
    while True:
        hi = min(size - 1, lo + rng.randrange(16, 32))
        ranges.append((lo, hi))
        if hi == size - 1:
            return ranges
        lo = hi - rng.randrange(8, 12)


@given(seed=seeds(), period=st.booleans())
def test_bump_slow_variation_is_exact(seed, period):
    rng = random.Random(seed)
    sample = GridSample(0, 47, Fraction(1, 4), period=48 if period else None)
    lo = rng.randrange(0, 30)
    outer = set(range(lo, lo + rng.randrange(4, 16)))
    inner = {z for z in outer if rng.random() < 0.5 and min(outer) < z < max(outer)} or {min(outer) + 1}
    inner = {z for z in inner if z in outer and z - 1 in outer and z + 1 in outer} or None
    if inner is None:
        return
    alpha_hat = Fraction(rng.randrange(1, 9), 4)
    values = bump(sample, inner, outer, alpha_hat)
    assert all(values[z] == 1 for z in inner)
    assert slow_variation_violations(sample, values, alpha_hat) == []


@given(seed=seeds())
def test_partition_sums_subordination_and_flow_variation(seed):
    rng = random.Random(seed)
    sample = GridSample(0, 79, Fraction(1, 4))
    cover = interval_cover(sample, random_interval_cover(rng, 80))
    alpha_hat = Fraction(1, 2)
    part = partition(sample, cover, alpha_hat)
    for z in range(sample.size):
        assert sum(part.column(z)) == 1
        for row, s in zip(part.values, cover.sets):
            assert row[z] == 0 or z in s.members
    assert partition_variation_violations(sample, part, 2 * alpha_hat) == []


@given(seed=seeds())
def test_nerve_contraction_and_coloring_on_random_interval_covers(seed):
    rng = random.Random(seed)
    sample = GridSample(0, 79, Fraction(1, 8))
    cover = interval_cover(sample, random_interval_cover(rng, 80))
    report = contraction_check(sample, cover)
    assert report.violations == [] and report.star_failures == []
    colored = color_cover(sample, cover)
    assert coloring_failures(colored, cover) == {"overlap": [], "containment": []}
