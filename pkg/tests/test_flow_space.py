"""Generalized geodesics, the flow, the flow-space distance, foliated distance and periodicity."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CENTER, leaf, seeds, tripod
from flowjoin.flow_space import (
    Axis,
    Line,
    Segment,
    assumption_probe,
    constant,
    dist_fs,
    evaluate,
    flow,
    fol_fs_check,
    fol_fs_dist,
    periodicity,
    restrict_window,
)
from flowjoin.groups import make_group
from flowjoin.intervals import as_interval
from flowjoin.model_spaces import DomainError, EuclideanSpace, TreePoint

LINE = EuclideanSpace(1)
PLANE = EuclideanSpace(2)
FREE = make_group("free", rank=2)
SL2 = make_group("sl2", p=2, depth=16)
CAYLEY = FREE.space


def quadrature(c, d, window: float = 30.0, steps: int = 7680) -> float:
    """Trapezoid rule for the weighted integral of d(c(t), d(t)); the tail past 30 is below 1e-11."""
    h = 2 * window / steps
    total = 0.0
    for i in range(steps + 1):
        t = Fraction(-window) + Fraction(i) * Fraction(h).limit_denominator(1 << 20)
        value = as_interval(c.space.distance(c.at(t), d.at(t))).mid * math.exp(-abs(float(t))) / 2
        total += value if 0 < i < steps else value / 2
    return total * h


def random_tree_geodesic(rng: random.Random):
    kind = rng.randrange(3)
    if kind == 0:
        return constant(CAYLEY, CAYLEY.random_point(rng, 3))
    if kind == 1:
        anchor = Fraction(rng.randrange(-12, 12), 4)
        return Segment(CAYLEY, CAYLEY.random_point(rng, 3), CAYLEY.random_point(rng, 3), anchor)
    g = FREE.random_element(rng, rng.randrange(1, 3))
    while g.is_identity:
        g = FREE.random_element(rng, 2)
    axis_word = FREE.mul(FREE.mul(g, FREE.parse(rng.choice("abAB"))), FREE.inverse(g))
    return Axis(CAYLEY, FREE, FREE.parse(rng.choice("abAB")), CAYLEY.base_point).translate(FREE, g) \
        if rng.random() < 0.5 else Axis(CAYLEY, FREE, axis_word, CAYLEY.act(g, CAYLEY.base_point))


UNIT_DIRECTIONS = [(1, 0), (0, 1), (Fraction(3, 5), Fraction(4, 5)), (Fraction(-4, 5), Fraction(3, 5))]


def random_plane_line(rng: random.Random):
    origin = PLANE.point(Fraction(rng.randrange(-16, 16), 4), Fraction(rng.randrange(-16, 16), 4))
    return Line(PLANE, origin, rng.choice(UNIT_DIRECTIONS))


# -- evaluation and flow -----------------------------------------------------------


def test_segment_evaluation_before_inside_and_after_the_support():
    c = Segment(LINE, LINE.point(0), LINE.point(5))
    assert evaluate(c, 3) == LINE.point(3)
    assert evaluate(c, 10) == LINE.point(5)


def test_tripod_segment_hits_the_centre():
    assert evaluate(Segment(tripod(), leaf("a"), leaf("b")), 1) == CENTER


def test_flow_by_zero_keeps_the_geodesic():
    c = Segment(LINE, LINE.point(0), LINE.point(5))
    assert flow(c, 0).key() == c.key()


def test_flowed_segment_evaluates_shifted():
    c = Segment(LINE, LINE.point(0), LINE.point(5))
    assert evaluate(flow(c, 2), 0) == LINE.point(2)


@given(seed=seeds(), tau=st.fractions(-5, 5, max_denominator=8), sigma=st.fractions(-5, 5, max_denominator=8),
       t=st.fractions(-6, 6, max_denominator=8))
def test_flow_is_a_group_action_with_exact_representations(seed, tau, sigma, t):
    c = random_tree_geodesic(random.Random(seed))
    assert flow(c, tau).at(t) == c.at(t + tau)
    assert flow(flow(c, sigma), tau).key() == flow(c, sigma + tau).key()
    assert flow(flow(c, tau), -tau).key() == c.key()


# -- flow-space distance ------------------------------------------------------------


def test_constant_pair_distance_encloses_three():
    enc = dist_fs(constant(LINE, LINE.point(0)), constant(LINE, LINE.point(3)))
    assert enc.contains(3) and enc.width <= 1e-6


def test_shifted_line_is_at_distance_of_the_shift():
    c = Line(LINE, LINE.point(0), [1])
    for s in (Fraction(1, 2), Fraction(3, 2), Fraction(-2)):
        enc = dist_fs(c, flow(c, s), 1e-6)
        assert enc.contains(abs(s)) and enc.width <= 1e-6


def test_distance_to_itself_is_zero():
    c = Segment(CAYLEY, CAYLEY.base_point, TreePoint((1, 2), Fraction(0)))
    assert dist_fs(c, c).hi == 0


def test_nonpositive_tolerance_is_rejected():
    c = constant(LINE, LINE.point(0))
    with pytest.raises(DomainError):
        dist_fs(c, c, 0)


@pytest.mark.parametrize("seed", range(6))
def test_tree_distance_matches_trapezoid_oracle(seed):
    rng = random.Random(100 + seed)
    c, d = random_tree_geodesic(rng), random_tree_geodesic(rng)
    enc = dist_fs(c, d, 1e-6)
    assert abs(enc.interval().mid - quadrature(c, d)) < 1e-3


@pytest.mark.parametrize("seed", range(3))
def test_plane_distance_matches_trapezoid_oracle(seed):
    rng = random.Random(200 + seed)
    c, d = random_plane_line(rng), random_plane_line(rng)
    enc = dist_fs(c, d, 1e-6)
    assert abs(enc.interval().mid - quadrature(c, d)) < 1e-3 * max(1.0, enc.hi)


# -- window restriction ------------------------------------------------------------


def test_restriction_keeps_short_geodesics():
    c = Segment(LINE, LINE.point(0), LINE.point(2), -1)
    assert restrict_window(c, 3).key() == c.key()


def test_restriction_of_a_line_is_the_chord_through_its_window():
    c = Line(PLANE, PLANE.point(0, 0), (1, 0))
    w = restrict_window(c, 1)
    assert w.key() == Segment(PLANE, PLANE.point(-1, 0), PLANE.point(1, 0), -1).key()


def test_restriction_error_respects_the_tail_bound():
    c = Line(PLANE, PLANE.point(0, 0), (1, 0))
    previous = math.inf
    for radius in (1, 3, 5, 8):
        d = dist_fs(c, restrict_window(c, radius), 1e-7).hi
        assert d <= (2 * radius + 2) * math.exp(-radius) + 1e-7
        assert d < previous
        previous = d
    assert dist_fs(c, restrict_window(c, 5), 1e-7).hi <= 0.0809


@given(seed=seeds(), radius=st.integers(1, 6))
def test_restriction_is_idempotent(seed, radius):
    c = random_tree_geodesic(random.Random(seed))
    once = restrict_window(c, radius)
    assert restrict_window(once, radius).key() == once.key()
    for t in (-radius, 0, radius):
        assert once.at(t) == c.at(t)


# -- foliated distance -------------------------------------------------------------


def test_exact_flow_translate_has_foliated_distance_zero():
    c = Line(PLANE, PLANE.point(0, 0), (1, 0))
    assert fol_fs_dist(c, flow(c, Fraction(1, 2)), 1).enclosure.contains(0)


def test_parallel_lines_at_gap_two():
    c, d = Line(PLANE, PLANE.point(0, 0), (1, 0)), Line(PLANE, PLANE.point(0, 2), (1, 0))
    result = fol_fs_dist(c, d, 1)
    assert result.enclosure.contains(2) and result.enclosure.width <= 1e-3


def test_flow_three_with_window_one_leaves_residual_two():
    c = Line(PLANE, PLANE.point(0, 0), (1, 0))
    result = fol_fs_dist(c, flow(c, 3), 1)
    assert result.enclosure.contains(2) and abs(result.argmin - 1) <= Fraction(1, 1000)


def test_foliated_check_separates_or_reports_the_boundary():
    c, d = Line(PLANE, PLANE.point(0, 0), (1, 0)), Line(PLANE, PLANE.point(0, 2), (1, 0))
    assert fol_fs_check(c, d, 1, Fraction(21, 10)) == "true"
    assert fol_fs_check(c, d, 1, Fraction(19, 10)) == "false"
    assert fol_fs_check(c, d, 1, 2) == "inconclusive"


# -- properties --------------------------------------------------------------------


@given(seed=seeds(), tau=st.fractions(-3, 3, max_denominator=4), sigma=st.fractions(-3, 3, max_denominator=4))
def test_flow_estimate(seed, tau, sigma):
    rng = random.Random(seed)
    c, d = random_tree_geodesic(rng), random_tree_geodesic(rng)
    tol = 1e-6
    left = dist_fs(flow(c, tau), flow(d, sigma), tol)
    right = dist_fs(c, d, tol)
    assert left.lo <= math.exp(abs(tau)) * right.hi + abs(float(sigma - tau)) + 2 * tol


@given(seed=seeds(), t=st.fractions(-5, 5, max_denominator=8))
def test_flow_has_unit_speed(seed, t):
    c = random_tree_geodesic(random.Random(seed))
    assert dist_fs(flow(c, t), c, 1e-6).lo <= abs(float(t)) + 1e-6


@given(seed=seeds())
def test_constant_geodesics_recover_the_point_distance(seed):
    rng = random.Random(seed)
    for space in (CAYLEY, SL2.space, PLANE):
        x, y = space.random_point(rng, 3), space.random_point(rng, 3)
        enc = dist_fs(constant(space, x), constant(space, y))
        assert enc.contains(as_interval(space.distance(x, y)).mid) and enc.width <= 1e-6


@given(seed=seeds())
def test_distance_is_left_invariant(seed):
    rng = random.Random(seed)
    c, d = random_tree_geodesic(rng), random_tree_geodesic(rng)
    g = FREE.random_element(rng, 3)
    a, b = dist_fs(c, d, 1e-6), dist_fs(c.translate(FREE, g), d.translate(FREE, g), 1e-6)
    assert a.lo <= b.hi + 1e-9 and b.lo <= a.hi + 1e-9


@settings(max_examples=25)
@given(seed=seeds(), shift=st.fractions(-1, 1, max_denominator=8))
def test_foliated_symmetry_with_constructive_epsilon(seed, shift):
    rng = random.Random(seed)
    alpha, delta = Fraction(1), Fraction(1, 2)
    eps = float(delta) * math.exp(-1)
    c = random_tree_geodesic(rng)
    d = flow(c, shift)
    if fol_fs_dist(c, d, alpha, 1e-4).enclosure.hi < eps:
        assert fol_fs_check(d, c, alpha, delta) == "true"


@settings(max_examples=25)
@given(seed=seeds(), s1=st.fractions(-1, 1, max_denominator=4), s2=st.fractions(-1, 1, max_denominator=4))
def test_foliated_triangle(seed, s1, s2):
    rng = random.Random(seed)
    alpha, delta = Fraction(1), Fraction(1, 2)
    eps = float(delta) / 2 * math.exp(-1)
    c = random_tree_geodesic(rng)
    d, e = flow(c, s1), flow(c, s1 + s2)
    first = fol_fs_dist(c, d, alpha, 1e-4).enclosure.hi
    second = fol_fs_dist(d, e, alpha, 1e-4).enclosure.hi
    if first < eps and second < eps:
        assert fol_fs_check(c, e, 2 * alpha, delta) == "true"


# -- periodicity -------------------------------------------------------------------


def test_free_axis_has_period_one():
    info = periodicity(Axis(CAYLEY, FREE, FREE.parse("a"), CAYLEY.base_point), FREE, 3)
    assert info.tau == 1
    assert FREE.literal(info.translation_witness) == "a"
    assert [g.is_identity for g in info.stabilizer_elements] == [True]


def test_constant_geodesic_is_not_periodic():
    info = periodicity(constant(CAYLEY, CAYLEY.base_point), FREE, 3)
    assert info.tau is None and info.translation_witness is None
    assert [g.is_identity for g in info.stabilizer_elements] == [True]


def test_diagonal_apartment_has_period_two():
    axis = Axis(SL2.space, SL2, SL2.diag(2), SL2.space.base_point)
    info = periodicity(axis, SL2, 3)
    assert info.tau == 2
    assert SL2.literal(info.translation_witness) == "[[2,0],[0,1/2]]"


@pytest.mark.parametrize("word", ["a", "ab", "aB", "abb"])
def test_translation_values_form_a_progression_through_zero(word):
    info = periodicity(Axis(CAYLEY, FREE, FREE.parse(word), CAYLEY.base_point), FREE, 4)
    values = info.translation_values
    assert 0 in values
    assert all(v % info.tau == 0 for v in values)
    assert values == [k * info.tau for k in range(int(values[0] / info.tau), int(values[-1] / info.tau) + 1)]


def test_assumption_probe_is_vacuous_for_isolated_nonperiodic_points():
    sample = [constant(CAYLEY, CAYLEY.base_point), Axis(CAYLEY, FREE, FREE.parse("a"), CAYLEY.base_point)]
    rows = assumption_probe(sample, FREE, 3, [Fraction(1, 4)])
    assert all(not row.failures for row in rows)
    assert rows[0].checked == 0


def test_assumption_probe_passes_on_a_discrete_group_below_orbit_separation():
    axis = Axis(CAYLEY, FREE, FREE.parse("a"), CAYLEY.base_point)
    sample = [axis, flow(axis, Fraction(1, 4)), axis.translate(FREE, FREE.parse("b"))]
    rows = assumption_probe(sample, FREE, 3, [Fraction(1, 2)])
    assert all(not row.failures and row.excluded == 0 for row in rows)
    assert all(row.checked >= 1 for row in rows)
