"""Acceptance suite: one test and one printed PASS/FAIL line per criterion AC1 to AC12.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

from __future__ import annotations

import io
import json
import math
import random
import re
import time
from fractions import Fraction
from pathlib import Path

from conftest import acceptance_line
from test_covers import parallel_lines_sample
from test_flow_space import random_tree_geodesic
from test_joins import FREE as JOIN_FREE
from test_joins import join, nearby, random_point
from flowjoin.cli import run
from flowjoin.covers import (
    GridSample,
    build_long_cover,
    color_cover,
    coloring_failures,
    contraction_check,
    partition,
    partition_variation_violations,
    slow_variation_violations,
)
from flowjoin.flow_space import constant, dist_fs, flow, fol_fs_check
from flowjoin.groups import FoliatedBoundV, conjugation_delta, fol_v_check, make_group, properness_probe
from flowjoin.intervals import as_interval
from flowjoin.joins import FoliatedBoundJ, triangle_eta
from flowjoin.model_spaces import ComparisonConfig, EuclideanSpace, comparison_gap, radial_projection
from flowjoin.pipeline import choose_Delta, f0

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
PLANE = EuclideanSpace(2)
FREE = make_group("free", rank=2)
SL2 = make_group("sl2", p=2, depth=8)
SL2_DEEP = make_group("sl2", p=2, depth=16)


def invoke_records(command: str, config: str) -> tuple[int, list, float]:
    out = io.StringIO()
    start = time.perf_counter()
    code = run([command, "--config", str(CONFIGS / config), "--format", "records"], stdout=out)
    elapsed = time.perf_counter() - start
    rows = [json.loads(line) for line in out.getvalue().splitlines() if line.strip()]
    return code, rows[1:], elapsed


def verdict_counts(rows: list) -> dict:
    counts = {"pass": 0, "fail": 0, "inconclusive": 0}
    for row in rows:
        counts[row["verdict"]] += 1
    return counts


def cover_fixtures():
    """The three cover fixtures: a flow line, a flow circle and parallel lines in the plane lattice."""
    return [
        ("line", GridSample(0, 64, Fraction(1, 8)), Fraction(1)),
        ("circle", GridSample(0, 63, Fraction(1, 8), period=64), Fraction(1)),
        ("parallel-lines", parallel_lines_sample(), Fraction(1, 2)),
    ]


# -- AC1 ------------------------------------------------------------------------------


def test_ac1_constant_geodesics_recover_the_point_distance():
    rng = random.Random(101)
    start = time.perf_counter()
    bad, total = [], 0
    for name, space in (("plane", PLANE), ("cayley", FREE.space), ("bruhat-tits", SL2.space)):
        for _ in range(100):
            x, y = space.random_point(rng, 4), space.random_point(rng, 4)
            enc = dist_fs(constant(space, x), constant(space, y), 1e-7)
            exact = as_interval(space.distance(x, y))
            total += 1
            if not (enc.lo <= exact.hi and exact.lo <= enc.hi and enc.width <= 1e-6):
                bad.append((name, x, y))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 5
    acceptance_line("AC1", ok, f"{total} constant pairs, {len(bad)} violations, {elapsed:.2f}s")
    assert ok


# -- AC2 ------------------------------------------------------------------------------


def test_ac2_flow_estimate_and_unit_speed():
    rng = random.Random(202)
    tol = 1e-6
    bad = []
    for _ in range(500):
        c, d = random_tree_geodesic(rng), random_tree_geodesic(rng)
        tau, sigma = Fraction(rng.randrange(-12, 13), 4), Fraction(rng.randrange(-12, 13), 4)
        left = dist_fs(flow(c, tau), flow(d, sigma), tol)
        right = dist_fs(c, d, tol)
        if left.lo > math.exp(abs(tau)) * right.hi + abs(float(sigma - tau)) + 2 * tol:
            bad.append(("estimate", c.literal(), d.literal(), tau, sigma))
        if dist_fs(flow(c, tau), c, tol).lo > abs(float(tau)) + tol:
            bad.append(("speed", c.literal(), tau))
    acceptance_line("AC2", not bad, f"500 samples, {len(bad)} violations")
    assert bad == []


# -- AC3 ------------------------------------------------------------------------------


def test_ac3_radial_projection_moves_the_flowed_geodesic_less_than_delta():
    rng = random.Random(303)
    T = Fraction(3)
    base_tree, base_plane = FREE.space.base_point, PLANE.point(0, 0)
    bad, checks = [], 0
    for delta in (Fraction(1, 2), Fraction(1, 10), Fraction(1, 50)):
        Delta = choose_Delta(delta)
        schedule = [T + Delta + extra for extra in (0, Fraction(1, 2), 1, 3, 8)]
        for n in range(200):
            if n % 2:
                space, b = FREE.space, base_tree
                x = space.random_point(rng, 16)
            else:
                space, b = PLANE, base_plane
                x = PLANE.point(Fraction(rng.randrange(-64, 65), 4), Fraction(rng.randrange(-64, 65), 4))
            c = f0(space, b, T, x)
            for r_prime in schedule:
                projected = f0(space, b, T, radial_projection(space, b, r_prime, x))
                checks += 1
                if dist_fs(c, projected, 1e-7).hi >= float(delta):
                    bad.append((delta, x, r_prime))
    acceptance_line("AC3", not bad, f"{checks} checks over 3 values of delta, {len(bad)} violations")
    assert bad == []


# -- AC4 ------------------------------------------------------------------------------


def test_ac4_comparison_gap_stays_below_its_bound():
    rng = random.Random(404)
    bad, unresolved, checks = [], [], 0
    cfgs = [ComparisonConfig(2, 12, 1, 2), ComparisonConfig(1, 6, Fraction(1, 2), 1), ComparisonConfig(3, 20, 2, 3)]
    offsets = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(1), Fraction(0)), (Fraction(-4, 5), Fraction(3, 5))]
    for n in range(300):
        cfg = cfgs[n % 3]
        t = Fraction(rng.randrange(-4, 5), 4) * cfg.r_short
        scale = Fraction(rng.randrange(0, 9), 8) * cfg.alpha
        u, v = rng.choice(offsets)
        x1 = PLANE.point(Fraction(rng.randrange(-8, 9), 2), Fraction(rng.randrange(-8, 9), 2))
        x2 = PLANE.point(x1.coords[0] + scale * u, x1.coords[1] + scale * v)
        reach = (cfg.R + cfg.L) * Fraction(7, 10)
        x = PLANE.point(x1.coords[0] + reach * Fraction(rng.randrange(-8, 9), 8),
                        x1.coords[1] + reach * Fraction(rng.randrange(-8, 9), 8))
        checks += 1
        gap = as_interval(comparison_gap(PLANE, cfg, x, x1, x2, t))
        if gap.lo > cfg.gap_bound:
            bad.append(("plane", x, x1, x2, t))
        elif gap.hi > cfg.gap_bound:
            unresolved.append(("plane", x, x1, x2, t))
    for n in range(300):
        cfg = cfgs[n % 3]
        space = FREE.space if n % 2 else SL2_DEEP.space
        t = Fraction(rng.randrange(-4, 5), 4) * cfg.r_short
        x1 = space.random_point(rng, 2)
        x2 = radial_projection(space, x1, Fraction(rng.randrange(0, 9), 8) * cfg.alpha, space.random_point(rng, 3))
        far = min(cfg.R + cfg.L, 7)
        x = radial_projection(space, x1, Fraction(rng.randrange(1, 9), 8) * far, space.random_point(rng, 7))
        checks += 1
        if comparison_gap(space, cfg, x, x1, x2, t) > cfg.gap_bound:
            bad.append(("tree", x, x1, x2, t))
    ok = not bad and not unresolved
    acceptance_line("AC4", ok, f"{checks} admissible configurations, {len(bad)} violations, "
                               f"{len(unresolved)} enclosures straddling the bound")
    assert ok


# -- AC5 / AC6 ------------------------------------------------------------------------


def test_ac5_bump_slow_variation_is_exact_on_every_fixture():
    bad, bumps = [], 0
    for name, sample, alpha_hat in cover_fixtures():
        part = partition(sample, build_long_cover(sample, alpha_hat), alpha_hat)
        for row, values in enumerate(part.bumps):
            bumps += 1
            bad.extend((name, row, z, k) for z, k in slow_variation_violations(sample, values, alpha_hat))
    acceptance_line("AC5", not bad, f"{bumps} bumps on 3 fixtures, {len(bad)} violations")
    assert bad == []


def test_ac6_partition_variation_and_column_sums():
    bad, columns = [], 0
    for name, sample, alpha_hat in cover_fixtures():
        part = partition(sample, build_long_cover(sample, alpha_hat), alpha_hat)
        for z in range(sample.size):
            columns += 1
            if sum(part.column(z)) != 1:
                bad.append((name, "sum", z))
        bad.extend((name, "variation") + v for v in partition_variation_violations(sample, part, 4 * alpha_hat))
    acceptance_line("AC6", not bad, f"{columns} columns on 3 fixtures, {len(bad)} violations")
    assert bad == []


# -- AC7 ------------------------------------------------------------------------------


def test_ac7_nerve_contraction_and_colored_cover():
    bad, pairs = [], 0
    for name, sample, alpha_hat in cover_fixtures():
        cover = build_long_cover(sample, alpha_hat)
        report = contraction_check(sample, cover)
        pairs += report.pairs_checked
        if report.pairs_checked == 0 or report.violations or report.star_failures:
            bad.append((name, "contraction", report.pairs_checked))
        failures = coloring_failures(color_cover(sample, cover), cover)
        if failures["overlap"] or failures["containment"]:
            bad.append((name, "coloring", failures))
    acceptance_line("AC7", not bad, f"{pairs} pairs in the contraction regime on 3 fixtures, {len(bad)} problems")
    assert bad == []


# -- AC8 / AC9 ------------------------------------------------------------------------


def sampled_points(rows: list) -> int:
    return len({m.group(1) for row in rows if (m := re.search(r":x(\d+)", ":" + row["check-id"]))})


def test_ac8_free_group_end_to_end():
    code, rows, elapsed = invoke_records("verify", "verify_free.ini")
    counts = verdict_counts(rows)
    points = sampled_points(rows)
    discrete = [row for row in rows if row["lemma-tag"] in ("discrete-equivariance", "discrete-radial")]
    ok = (code == 0 and counts["fail"] == 0 and counts["inconclusive"] == 0 and points >= 100
          and discrete and all(row["verdict"] == "pass" for row in discrete) and elapsed < 120)
    acceptance_line("AC8", ok, f"{points} points, {len(rows)} checks, {counts['fail']} failures, "
                               f"{len(discrete)} discrete checks, {elapsed:.1f}s")
    assert ok


def test_ac9_sl2_end_to_end():
    code, rows, elapsed = invoke_records("verify", "verify_sl2.ini")
    counts = verdict_counts(rows)
    rate = counts["inconclusive"] / max(1, len(rows))
    tags = {row["lemma-tag"] for row in rows}
    conclusions = {"join-equivariance", "join-radial", "join-continuity"}
    ok = code == 0 and counts["fail"] == 0 and rate < 0.05 and conclusions <= tags and elapsed < 300
    acceptance_line("AC9", ok, f"{len(rows)} checks, {counts['fail']} failures, inconclusive rate {rate:.3%}, "
                               f"{elapsed:.1f}s")
    assert ok


# -- AC10 -----------------------------------------------------------------------------


def test_ac10_properness_and_stabilizer_shrinking():
    problems = []
    lattice_2, lattice_1 = make_group("lattice", dim=2), make_group("lattice", dim=1)
    proper_models = [
        ("free", FREE, [FREE.space.base_point], 0, [1, 2, 3]),
        ("lattice-2", lattice_2, [lattice_2.space.point(0, 0), lattice_2.space.point(1, 1)], Fraction(1, 2),
         [2, 3, 4, 5, 6]),
        ("lattice-1", lattice_1, [lattice_1.space.point(0)], Fraction(1, 2), [2, 3, 4]),
        ("sl2", SL2, [SL2.space.base_point], 0, [1, 2, 3]),
    ]
    for name, group, compact, thickness, schedule in proper_models:
        if not properness_probe(group, compact, thickness, schedule).proper:
            problems.append(("not proper", name))
    rotation = make_group("rotation")
    if properness_probe(rotation, [rotation.space.point(0)], Fraction(1, 20), [8, 16, 32, 64]).proper:
        problems.append(("rotation not flagged",))
    rng = random.Random(1010)
    space = SL2.space
    for _ in range(100):
        x = space.random_point(rng, 3)
        y = space.point_along(x, space.random_point(rng, 3), Fraction(1, 8))
        for g in SL2.stabilizer(y, 3).enumerate_compact(3):
            if not SL2.fixes(g, x):
                problems.append(("stabilizer", x, y))
                break
    acceptance_line("AC10", not problems, f"4 proper models, rotation control, 100 near pairs, "
                                          f"{len(problems)} problems")
    assert problems == []


# -- AC11 -----------------------------------------------------------------------------


def flow_space_triples(rng: random.Random, count: int) -> tuple[int, list]:
    """Symmetry with eps = delta e^-alpha and the triangle with eps = delta e^-alpha / 2."""
    alpha, delta = Fraction(1), Fraction(1, 2)
    eps_symmetry = Fraction(delta * Fraction(math.exp(-1)).limit_denominator(10**6))
    eps_triangle = eps_symmetry / 2
    active, bad = 0, []
    for _ in range(count):
        c = random_tree_geodesic(rng)
        d = flow(c, Fraction(rng.randrange(-6, 7), 4))
        if rng.random() < 0.2:
            d = d.translate(FREE, FREE.parse(rng.choice("abAB")))
        e = flow(d, Fraction(rng.randrange(-6, 7), 4))
        if fol_fs_check(c, d, alpha, eps_symmetry) == "true":
            active += 1
            if fol_fs_check(d, c, alpha, delta) != "true":
                bad.append(("symmetry", c.literal(), d.literal()))
        if fol_fs_check(c, d, alpha, eps_triangle) == "true" and fol_fs_check(d, e, alpha, eps_triangle) == "true":
            active += 1
            if fol_fs_check(c, e, 2 * alpha, delta) != "true":
                bad.append(("triangle", c.literal(), d.literal(), e.literal()))
    return active, bad


def subgroup_triples(rng: random.Random, count: int) -> tuple[int, list]:
    V = SL2.stabilizer(SL2.space.base_point, 3)
    eps = Fraction(1, 2)
    bad, active = [], 0
    setups = {}
    for beta in (Fraction(1, 2), Fraction(1)):
        witnesses = [v for v in V.enumerate_compact(3) if SL2.norm(v) < beta]
        delta, _ = conjugation_delta(SL2, witnesses, eps / 2, 3)
        delta = min(delta, eps / 2)
        setups[beta] = (witnesses, delta, [w for w in SL2.ball(delta, 3) if SL2.norm(w) < delta])
    for n in range(count):
        beta = (Fraction(1, 2), Fraction(1))[n % 2]
        witnesses, delta, small = setups[beta]
        g = SL2.random_element(rng, rng.randrange(3), 3)
        g1 = SL2.mul(SL2.mul(g, rng.choice(witnesses)), rng.choice(small))
        g2 = SL2.mul(SL2.mul(g1, rng.choice(witnesses)), rng.choice(small))
        bound = FoliatedBoundV(beta, delta)
        if fol_v_check(V, g, g1, bound).holds and fol_v_check(V, g1, g2, bound).holds:
            active += 1
            if not fol_v_check(V, g, g2, FoliatedBoundV(2 * beta, eps)).holds:
                bad.append(("subgroup", SL2.literal(g), SL2.literal(g1), SL2.literal(g2)))
    return active, bad


def join_triples(rng: random.Random, count: int) -> tuple[int, list]:
    space = join()
    eps, eta_target = Fraction(1, 4), Fraction(1, 2)
    bad, active = [], 0
    for n in range(count):
        beta = (2, 3)[n % 2]
        bound = FoliatedBoundJ(beta, triangle_eta(JOIN_FREE, beta, eta_target), eps)
        y = random_point(space, rng)
        y2 = nearby(space, rng, y, beta, eps)
        y3 = nearby(space, rng, y2, beta, eps)
        if space.fol_j_check(y, y2, bound).holds and space.fol_j_check(y2, y3, bound).holds:
            active += 1
            if not space.fol_j_check(y, y3, FoliatedBoundJ(2 * beta, eta_target, 2 * eps)).holds:
                bad.append(("join", space.to_records(y), space.to_records(y2), space.to_records(y3)))
    return active, bad


def test_ac11_foliated_triangle_and_symmetry():
    rng = random.Random(1111)
    fs_active, fs_bad = flow_space_triples(rng, 300)
    v_active, v_bad = subgroup_triples(rng, 300)
    j_active, j_bad = join_triples(rng, 300)
    bad = fs_bad + v_bad + j_bad
    ok = not bad and min(fs_active, v_active, j_active) > 0
    acceptance_line("AC11", ok, f"300 triples each; hypotheses met: flow space {fs_active}, "
                                f"subgroup {v_active}, join {j_active}; {len(bad)} violations")
    assert ok


# -- AC12 -----------------------------------------------------------------------------


def test_ac12_assumption_probe_on_the_sl2_fixture():
    code, rows, elapsed = invoke_records("probe-assumption", "probe_sl2.ini")
    counts = verdict_counts(rows)
    ok = code == 0 and counts["fail"] == 0 and counts["pass"] > 0
    acceptance_line("AC12", ok, f"{len(rows)} centre/radius rows, {counts['fail']} failures, "
                                f"{counts['inconclusive']} inconclusive, {elapsed:.1f}s")
    assert ok
