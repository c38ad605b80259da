"""Parameters, the maps X -> FS -> J, and the end-to-end verifier.

The composite f = f1 o f0 is built on a finite sample: f0 sends x to the
flowed geodesic from the base point, every geodesic the checks will touch is
registered in a flow sample, and f1 is assembled from a colored cover of that
sample, a partition of unity subordinate to it, and local sections that pick,
for each sampled class, the nearest translate of the set's center geodesic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .covers import (
    Cover,
    CoverSet,
    FlowSample,
    _candidate_radius,
    _origin_lower_bound,
    color_cover,
    coloring_failures,
    contraction_check,
    partition,
    partition_variation_violations,
)
from .flow_space import PeriodInfo, Segment, dist_fs, fol_fs_check, geodesic_subgroup, periodicity
from .groups import Group, make_group
from .intervals import Interval, as_interval, exp_of, fraction_text, rational_upper
from .joins import FoliatedBoundJ, JoinSpace, triangle_eta, witness_elements
from .model_spaces import DepthError, DomainError, EuclideanSpace, RootedTree, radial_projection
from .report import FAIL, INCONCLUSIVE, PASS, Report

GRID = Fraction(1, 64)


# ---------------------------------------------------------------------------
# parameter selection
# ---------------------------------------------------------------------------


def projection_tail(Delta) -> Interval:
    """Enclosure of the tail integral of s/(2 e^s) over [Delta, oo), which is (Delta + 1) e^-Delta / 2."""
    Delta = Fraction(Delta)
    return (Interval.exact(Delta + 1) * exp_of(-Delta)) * Interval.exact(Fraction(1, 2))


def choose_Delta(delta, step=GRID) -> Fraction:
    """Smallest multiple of ``step`` whose projection tail is certified below delta."""
    delta = Fraction(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    k = 0
    while projection_tail(k * step).hi >= delta:
        k += 1
    return k * step


def outer_tail(r_short) -> Interval:
    """Enclosure of the integral of (2|t|+1)/(2e^|t|) over (-oo, -r'], which is (2r'+3) e^-r' / 2."""
    r_short = Fraction(r_short)
    return Interval.exact(2 * r_short + 3) * exp_of(-r_short) * Interval.exact(Fraction(1, 2))


def inner_mass(r_short) -> Interval:
    """Enclosure of the integral of 1/(2e^|t|) over [-r', r'], which is 1 - e^-r'."""
    return Interval.exact(1) - exp_of(-Fraction(r_short))


@dataclass(frozen=True)
class FlowParams:
    delta: Fraction
    Delta: Fraction
    r_short: Fraction
    r_long: Fraction
    delta_prime: Fraction
    R: Fraction
    T: Fraction

    @property
    def comparison_bound(self) -> Fraction:
        return self.r_long  # kept for symmetry with ComparisonConfig users


def choose_flow_params(alpha, Delta, L, delta, step=GRID) -> FlowParams:
    """r', r'', delta' meeting the three tail conditions, then R = 2r' + r'' + alpha and T = r' + r''."""
    alpha, Delta, L, delta = (Fraction(v) for v in (alpha, Delta, L, delta))
    if min(alpha, L, delta) <= 0 or Delta < 0:
        raise DomainError("flow parameters need positive alpha, L, delta")
    third = delta / 3
    r_short = (math.floor(Delta / step) + 1) * step
    while outer_tail(r_short).hi >= third:
        r_short += step
    mass = Fraction(inner_mass(r_short).hi)
    denominator = 1024
    while True:
        k = math.ceil(third * denominator / mass) - 1
        k = min(k, denominator - 1)
        if k >= 1:
            break
        denominator *= 2
    delta_prime = Fraction(k, denominator)
    need = 2 * alpha * (L + 2 * r_short + 2 * alpha) / delta_prime
    r_long = max((math.floor(need / step) + 1) * step, (math.floor(alpha / step) + 1) * step)
    R = 2 * r_short + r_long + alpha
    T = r_short + r_long
    return FlowParams(delta, Delta, r_short, r_long, delta_prime, R, T)


def alpha_for(group: Group, base, M) -> Fraction:
    """max over g in M of d(b, g b), floored at 1."""
    space = group.space
    best = Fraction(1)
    for g in M:
        d = space.distance(base, space.act(g, base))
        best = max(best, rational_upper(as_interval(d).hi, 20) if isinstance(d, Interval) else Fraction(d))
    return best


def f0(space, base, T, x):
    """The geodesic from the base point to x, flowed by T."""
    return Segment(space, base, x).flow(Fraction(T))


# ---------------------------------------------------------------------------
# scenario
# ---------------------------------------------------------------------------


@dataclass
class Scenario:
    group: str = "free"
    rank: int = 2
    p: int = 2
    depth: int = 8
    dim: int = 2
    precision: int = 3
    m_radius: Fraction = Fraction(2)
    eps: Fraction = Fraction(1, 4)
    eta: Fraction = Fraction(1, 2)
    L: Fraction = Fraction(2)
    ell: Fraction = Fraction(3)
    dt: Fraction = Fraction(1, 2)
    flow_steps: int = 2
    lam: Fraction = Fraction(4096)
    theta: Fraction = Fraction(3, 4)
    voronoi_limit: Fraction = Fraction(1)
    orbit_cap: Fraction = Fraction(1, 4)
    points: int = 100
    shell_points: int = 10
    near_radius: int = 24
    shell_cap: Fraction = Fraction(2048)
    tol: float = 1e-4
    point_denominator: int = 4
    delta0: Fraction = Fraction(1, 4)
    seed: int = 0
    budget: int = 64
    iterations: int = 3
    lam_doublings: int = 6
    radial_offsets: tuple = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
    inconclusive_limit: Fraction = Fraction(1, 20)

    def make_group(self) -> Group:
        return make_group(self.group, rank=self.rank, p=self.p, depth=self.depth, dim=self.dim)


def sample_points(space, rng: random.Random, count: int, radius, denominator: int = 4) -> list:
    """Points of the model space with distance to the base point uniform on the grid up to radius."""
    radius = Fraction(radius)
    top = math.floor(radius * denominator)
    return [point_at_distance(space, rng, Fraction(rng.randint(0, top), denominator)) for _ in range(count)]


def point_at_distance(space, rng: random.Random, dist):
    dist = Fraction(dist)
    base = space.base_point
    if isinstance(space, RootedTree):
        steps = math.ceil(dist)
        v = space.root
        for _ in range(steps):
            options = [w for w in space.neighbors(v) if space.depth(w) > space.depth(v)]
            if not options:
                raise DomainError(f"no tree vertex at depth {steps}")
            v = rng.choice(options)
        return space.make_point(v, steps - dist)
    if isinstance(space, EuclideanSpace):
        direction = [Fraction(rng.randint(-8, 8), 8) for _ in range(space.dim)]
        if not any(direction):
            direction[0] = Fraction(1)
        norm = as_interval(space.distance(space.point(*([0] * space.dim)), space.point(*direction)))
        scale = dist / rational_upper(norm.hi, 24)
        return space.point(*[c * scale for c in direction])
    raise DomainError(f"cannot sample points on {space.kind}")


def nearby_point(space, rng: random.Random, x, step):
    """A point at distance exactly ``step`` from x (step below one edge length on trees)."""
    step = Fraction(step)
    if isinstance(space, RootedTree):
        options = []
        if x.up > 0 or x.vertex != space.root:
            options.append(space.climb(x, step))
        if x.up == 0:
            options += [space.make_point(w, 1 - step) for w in space.neighbors(x.vertex)
                        if space.depth(w) > space.depth(x.vertex)]
        elif x.up >= step:
            options.append(space.make_point(x.vertex, x.up - step))
        return rng.choice(options)
    if isinstance(space, EuclideanSpace):
        coords = list(x.coords)
        coords[rng.randrange(space.dim)] += step if rng.random() < 0.5 else -step
        return space.point(*coords)
    raise DomainError(f"cannot perturb points on {space.kind}")


# ---------------------------------------------------------------------------
# local sections
# ---------------------------------------------------------------------------


@dataclass
class Translate:
    distance: object  # Enclosure
    element: object


@dataclass
class SectionSet:
    center: int
    radius: Fraction
    members: frozenset
    elements: dict
    times: dict
    subgroup: object

    @property
    def label(self) -> str:
        return self.subgroup.label


def center_subgroup(sample: FlowSample, index: int, ell, precision: int):
    """V_c when the center geodesic is periodic with period at most ell, otherwise its stabilizer."""
    c = sample.sources[index]
    group = sample.group
    if isinstance(c, Segment):
        if c.is_constant:
            return group.stabilizer(c.at(Fraction(0)), precision)
        return geodesic_subgroup(c, group, PeriodInfo(None), precision)
    info = periodicity(c, group, ell, precision=precision)
    if info.is_periodic and info.tau <= Fraction(ell):
        return geodesic_subgroup(c, group, info, precision)
    return geodesic_subgroup(c, group, PeriodInfo(None), precision)


def nearest_translates(sample: FlowSample, center: int, time, target: int, subgroup, limit) -> list:
    """Translates g flow(rep_center, time) within ``limit`` of rep_target, distinct modulo the subgroup."""
    group = sample.group
    space = sample.space
    base = sample.reps[center]
    moved = base.flow(time) if time else base
    goal = sample.reps[target]
    p = moved.at(Fraction(0))
    q = goal.at(Fraction(0))
    probes = [(t, moved.at(t), goal.at(t)) for t in (Fraction(-1), Fraction(1), Fraction(-2), Fraction(2))]
    found = []
    for g in group.near_transporters(p, q, _candidate_radius(limit)):
        try:
            d0 = space.distance(space.act(g, p), q)
            if _origin_lower_bound(Fraction(as_interval(d0).lo)) >= limit:
                continue
            pruned = False
            for t, a, b in probes:
                d = as_interval(space.distance(space.act(g, a), b)).lo
                if _origin_lower_bound(Fraction(d)) * Fraction(exp_of(-abs(t)).lo) >= limit:
                    pruned = True
                    break
            if pruned:
                continue
            enc = dist_fs(moved.translate(group, g), goal, sample.tol)
        except DepthError:
            continue
        if enc.lo < float(limit):
            found.append(Translate(enc, g))
    found.sort(key=lambda tr: (tr.distance.hi, group.norm(tr.element), group.sort_key(tr.element)))
    distinct = []
    for tr in found:
        if any(subgroup.contains(group.mul(group.inverse(other.element), tr.element)) for other in distinct):
            continue
        distinct.append(tr)
    return distinct


def voronoi_radius(translates: list, limit) -> Fraction:
    """Half of (nearest + second nearest distinct translate), the second capped at ``limit``."""
    limit = Fraction(limit)
    first = Fraction(translates[0].distance.lo) if translates else limit
    second = Fraction(translates[1].distance.lo) if len(translates) > 1 else limit
    return (first + min(second, limit)) / 2


def self_radius(sample: FlowSample, index: int, subgroup, limit) -> Fraction:
    return voronoi_radius(nearest_translates(sample, index, Fraction(0), index, subgroup, limit), limit)


def local_section(sample: FlowSample, center: int, subgroup, theta, limit) -> SectionSet:
    """Nearest-translate section on the classes whose translate lies inside theta times the Voronoi radius."""
    theta = Fraction(theta)
    limit = Fraction(limit)
    tree = sample.section_tree(center)
    reach = to_reach(sample, limit)
    candidates = [i for i in sorted(tree) if sample.metric_units[center, i] <= reach]
    table = {}
    radius = limit
    for i in candidates:
        time, _ = tree[i]
        translates = nearest_translates(sample, center, time, i, subgroup, limit)
        table[i] = (time, translates)
        radius = min(radius, voronoi_radius(translates, limit))
    members = set()
    elements = {}
    times = {}
    for i, (time, translates) in table.items():
        if translates and translates[0].distance.hi < float(theta * radius):
            members.add(i)
            elements[i] = translates[0].element
            times[i] = time
    return SectionSet(center, theta * radius, frozenset(members), elements, times, subgroup)


def to_reach(sample: FlowSample, limit) -> int:
    from .covers import to_units

    return to_units(sample.lam * Fraction(limit))


def section_cover(sample: FlowSample, theta, limit, ell, precision: int) -> list:
    """Centers by decreasing self Voronoi radius (ties to the lowest index) until every class is covered."""
    subgroups = {}
    radii = []
    for i in range(sample.size):
        subgroups[i] = center_subgroup(sample, i, ell, precision)
        radii.append((-self_radius(sample, i, subgroups[i], limit), i))
    radii.sort()
    covered = set()
    sets = []
    for _, i in radii:
        if i in covered:
            continue
        section = local_section(sample, i, subgroups[i], theta, limit)
        if i not in section.members:
            raise DomainError(f"class {i} is not in its own section domain")
        sets.append(section)
        covered |= section.members
    return sets


# ---------------------------------------------------------------------------
# assembly of f1
# ---------------------------------------------------------------------------


@dataclass
class Assembly:
    sample: FlowSample
    sections: list
    cover: Cover
    colored: object
    partition: object
    join: JoinSpace
    parent_of: list  # colored set -> section set index

    @property
    def N(self) -> int:
        return self.colored.colors - 1


def assemble(sample: FlowSample, sections: list, max_dim: Optional[int] = None) -> Assembly:
    cover = Cover([CoverSet(s.center, s.radius, s.members) for s in sections], Fraction(0))
    colored = color_cover(sample, cover, max_dim)
    part = partition(sample, colored.cover, colored.alpha)
    join = JoinSpace(sample.group, colored.colors)
    for s in sections:
        join.register(s.subgroup)
    parent_of = [s.simplex[0] for s in colored.cover.sets]
    return Assembly(sample, sections, cover, colored, part, join, parent_of)


def f1(assembly: Assembly, c):
    """The join point of c: slot i from the color-i set containing its class."""
    sample = assembly.sample
    group = sample.group
    reg = sample.lookup(c)
    entries = []
    for color in range(assembly.colored.colors):
        owner = [u for u in assembly.colored.by_color(color) if reg.index in assembly.colored.cover.sets[u].members]
        if len(owner) > 1:
            raise DomainError(f"class {reg.index} lies in two sets of color {color}")
        if not owner:
            entries.append((Fraction(0), group.identity, assembly.join.default_label))
            continue
        u = owner[0]
        weight = assembly.partition.values[u][reg.index]
        section = assembly.sections[assembly.parent_of[u]]
        element = group.mul(reg.transporter, section.elements[reg.index])
        entries.append((weight, element, section.label))
    return assembly.join.make_point(entries)


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------


@dataclass
class PipelineParams:
    alpha: Fraction
    eps: Fraction
    eta: Fraction
    L: Fraction
    flow: FlowParams
    lam: Fraction
    beta: Fraction
    eta0: Fraction
    rho: Fraction
    N: int
    labels: list
    delta_sections: Fraction
    iterations: int

    def constants(self) -> dict:
        return {
            "alpha": self.alpha, "epsilon": self.eps, "eta": self.eta, "L": self.L,
            "delta": self.flow.delta, "Delta": self.flow.Delta, "r_short": self.flow.r_short,
            "r_long": self.flow.r_long, "delta_prime": self.flow.delta_prime, "R": self.flow.R,
            "T": self.flow.T, "lambda": self.lam, "beta": self.beta, "eta0": self.eta0, "rho": self.rho,
            "N": self.N, "labels": list(self.labels), "delta_sections": self.delta_sections,
            "iterations": self.iterations,
        }


@dataclass
class Probe:
    """The points of one sampled x and the geodesics every check will need."""

    x: object
    moved: list  # (g, g x)
    radial: list  # (R', pi_{R'} x)
    close: object  # x' with d(x, x') < rho


@dataclass
class Pipeline:
    scenario: Scenario
    group: Group
    base: object
    M: list
    params: PipelineParams
    probes: list
    assembly: Assembly
    notes: list = field(default_factory=list)

    def f0(self, x):
        return f0(self.group.space, self.base, self.params.flow.T, x)

    def f(self, x):
        return f1(self.assembly, self.f0(x))


def _dyadic_floor(q: Fraction) -> Fraction:
    k = 0
    while Fraction(1, 2**k) > q:
        k += 1
    return Fraction(1, 2**k)


def shells_feasible(sc: Scenario, space, flow: FlowParams) -> bool:
    """Far points need words of length about R; skip them beyond the configured cap or on bounded trees."""
    bounded = getattr(space, "depth_bound", None) is not None
    return bool(sc.shell_points) and not bounded and flow.R + sc.L <= sc.shell_cap


def _draw_probes(sc: Scenario, group: Group, base, M, flow: FlowParams, rho, with_shells: bool) -> list:
    space = group.space
    rng = random.Random(sc.seed)
    near_cap = min(Fraction(sc.near_radius), flow.T)
    if isinstance(space, RootedTree) and getattr(space, "depth_bound", None) is not None:
        near_cap = min(near_cap, Fraction(space.depth_bound - 2))
    shells = sc.shell_points if with_shells else 0
    xs = sample_points(space, rng, sc.points - shells, near_cap, sc.point_denominator)
    for _ in range(shells):
        k = rng.randint(1, math.floor((flow.R + sc.L - flow.T) * sc.point_denominator))
        xs.append(point_at_distance(space, rng, flow.T + Fraction(k, sc.point_denominator)))
    probes = []
    for x in xs:
        moved = []
        for g in M:
            try:
                moved.append((g, space.act(g, x)))
            except DepthError:
                moved.append((g, None))
        radial = []
        for offset in sc.radial_offsets:
            r_prime = flow.R + offset * sc.L
            radial.append((r_prime, radial_projection(space, base, r_prime, x)))
        close = nearby_point(space, rng, x, rho / 2)
        probes.append(Probe(x, moved, radial, close))
    return probes


def _register(sample: FlowSample, space, base, T, probes, M, group, K: int) -> None:
    for probe in probes:
        points = [probe.x, probe.close] + [gx for _, gx in probe.moved if gx is not None]
        points += [px for _, px in probe.radial]
        for y in points:
            sample.add_flow_line(f0(space, base, T, y), K)
        c = f0(space, base, T, probe.x)
        for g, gx in probe.moved:
            if gx is not None:
                sample.add_flow_line(c.translate(group, g), K)


def build_pipeline(sc: Scenario) -> Pipeline:
    group = sc.make_group()
    space = group.space
    base = space.base_point
    M = [g for g in group.ball(sc.m_radius, sc.precision) if group.norm(g) < sc.m_radius]
    M.sort(key=lambda g: (group.norm(g), group.sort_key(g)))
    alpha = alpha_for(group, base, M)
    K = max(sc.flow_steps, math.ceil(alpha / sc.dt))
    delta = Fraction(sc.delta0)
    lam = Fraction(sc.lam)
    notes = []
    for iteration in range(1, sc.iterations + 1):
        flow = choose_flow_params(alpha, choose_Delta(delta), sc.L, delta)
        rho = delta
        probes = _draw_probes(sc, group, base, M, flow, rho, with_shells=False)
        assembly, lam, slack = _assemble_with_lambda(sc, group, base, M, flow, probes, lam, K, alpha, notes)
        delta_sections = max(slack, Fraction(0)) / lam
        if delta_sections > 0 and delta <= delta_sections:
            break
        if delta_sections <= 0:
            notes.append("section delta is not positive after the lambda schedule")
            break
        notes.append(f"iteration {iteration}: delta {delta} exceeds section delta {float(delta_sections):.3e}")
        delta = _dyadic_floor(delta_sections)
    if shells_feasible(sc, space, flow):
        probes = _draw_probes(sc, group, base, M, flow, rho, with_shells=True)
        assembly, lam, slack = _assemble_with_lambda(sc, group, base, M, flow, probes, lam, K, alpha, notes)
        delta_sections = max(slack, Fraction(0)) / lam
    elif sc.shell_points:
        notes.append(f"far points skipped: R + L = {fraction_text(flow.R + sc.L)} is beyond the shell cap")
    witnesses_beta = Fraction(1) + _subgroup_radius(assembly.join, sc.precision)
    beta = 2 * witnesses_beta
    eta0 = triangle_eta(group, beta / 2, sc.eta, sc.precision,
                        witness_elements(assembly.join, beta / 2, sc.precision, sc.budget))
    params = PipelineParams(alpha, sc.eps, sc.eta, sc.L, flow, lam, beta, eta0, rho, assembly.N,
                            sorted(assembly.join.subgroups), delta_sections, iteration)
    return Pipeline(sc, group, base, M, params, probes, assembly, notes)


def _assemble_with_lambda(sc, group, base, M, flow, probes, lam, K, alpha, notes):
    """Build sample and f1, doubling lambda until the partition leaves room for flow shifts of size alpha."""
    for _ in range(sc.lam_doublings + 1):
        sample = FlowSample(group, sc.dt, lam, sc.orbit_cap, tol=sc.tol, flow_reach=K)
        _register(sample, group.space, base, flow.T, probes, M, group, K)
        sample.finalize()
        sections = section_cover(sample, sc.theta, sc.voronoi_limit, sc.ell, sc.precision)
        assembly = assemble(sample, sections)
        gap = min(g for g in assembly.partition.gaps if g is not None)
        lip = Fraction(2 * max(assembly.N, 1) + 3) / gap
        slack = sc.eps / (4 * lip) - alpha
        if slack > 0:
            break
        notes.append(f"lambda {lam} leaves no room for flow shifts of size alpha; doubling")
        lam *= 2
    return assembly, lam, slack


def _subgroup_radius(join: JoinSpace, precision: int) -> Fraction:
    group = join.group
    radius = Fraction(0)
    for label in sorted(join.subgroups):
        V = join.subgroups[label]
        for v in V.enumerate_compact(precision):
            radius = max(radius, Fraction(group.norm(v)))
        if V.generator is not None:
            radius = max(radius, Fraction(group.norm(V.generator)))
    return radius


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def _join_verdict(verdict: str) -> str:
    return {"true": PASS, "false": FAIL}.get(verdict, INCONCLUSIVE)


def verify_main(pipe: Pipeline) -> Report:
    """Check the three conclusions, the glue chain and the flow-space inputs on every probe."""
    sc = pipe.scenario
    params = pipe.params
    group = pipe.group
    space = group.space
    join = pipe.assembly.join
    full = FoliatedBoundJ(params.beta, params.eta, params.eps)
    half = FoliatedBoundJ(params.beta / 2, params.eta0, params.eps / 2)
    report = Report("verify", params.constants(), inconclusive_limit=sc.inconclusive_limit)
    report.notes.extend(pipe.notes)
    alpha, delta = params.alpha, params.flow.delta
    discrete = bool(getattr(group, "is_discrete", False))
    report.add("parameters:section-delta", "section-delta-budget",
               f"{fraction_text(delta)}|{fraction_text(params.delta_sections)}",
               PASS if 0 < delta <= params.delta_sections else FAIL,
               delta=delta, delta_sections=params.delta_sections)

    def fol(y, y_prime, bound):
        return join.fol_j_check(y, y_prime, bound, sc.precision, sc.budget)

    for n, probe in enumerate(pipe.probes):
        x = probe.x
        c = pipe.f0(x)
        y = f1(pipe.assembly, c)
        for g, gx in probe.moved:
            tag = f"x{n}:g={group.literal(g)}"
            if gx is None:
                report.add(f"equivariance:{tag}", "join-equivariance", f"{x.literal()}|{group.literal(g)}",
                           INCONCLUSIVE)
                continue
            c_moved = pipe.f0(gx)
            c_translated = c.translate(group, g)
            fs_verdict = fol_fs_check(c_moved, c_translated, alpha, delta, tol=1e-6)
            report.add(f"flow-equivariance:{tag}", "flow-space-equivariance", f"{x.literal()}|{group.literal(g)}",
                       _join_verdict(fs_verdict))
            y_moved = f1(pipe.assembly, c_moved)
            y_mid = f1(pipe.assembly, c_translated)
            y_translated = join.act(g, y)
            main = fol(y_moved, y_translated, full)
            first = fol(y_moved, y_mid, half)
            second = fol(y_mid, y_translated, half)
            report.add(f"equivariance:{tag}", "join-equivariance", f"{x.literal()}|{group.literal(g)}",
                       _join_verdict(main.verdict))
            glue = PASS
            if first.holds and second.holds and not main.holds:
                glue = FAIL
            elif not (first.holds and second.holds):
                glue = FAIL if "false" in (first.verdict, second.verdict) else INCONCLUSIVE
            report.add(f"glue:{tag}", "join-triangle-glue", f"{x.literal()}|{group.literal(g)}", glue,
                       eta0=params.eta0)
            if discrete:
                d_e = join.discrete_distance(y_moved, y_translated)
                report.add(f"discrete-equivariance:{tag}", "discrete-equivariance",
                           f"{x.literal()}|{group.literal(g)}", PASS if d_e < params.eps else FAIL, d_E=d_e)
        for r_prime, px in probe.radial:
            tag = f"x{n}:R'={fraction_text(r_prime)}"
            c_proj = pipe.f0(px)
            enc = dist_fs(c, c_proj, 1e-6)
            report.add(f"flow-radial:{tag}", "flow-space-radial", f"{x.literal()}|{fraction_text(r_prime)}",
                       PASS if enc.hi < float(delta) else (FAIL if enc.lo >= float(delta) else INCONCLUSIVE),
                       d_FS=enc)
            y_proj = f1(pipe.assembly, c_proj)
            main = fol(y, y_proj, full)
            report.add(f"radial:{tag}", "join-radial", f"{x.literal()}|{fraction_text(r_prime)}",
                       _join_verdict(main.verdict))
            if discrete:
                d_e = join.discrete_distance(y, y_proj)
                report.add(f"discrete-radial:{tag}", "discrete-radial", f"{x.literal()}|{fraction_text(r_prime)}",
                           PASS if d_e < params.eps else FAIL, d_E=d_e)
        x_close = probe.close
        d_x = space.distance(x, x_close)
        c_close = pipe.f0(x_close)
        enc = dist_fs(c, c_close, 1e-6)
        report.add(f"modulus:x{n}", "flow-map-modulus", f"{x.literal()}|{x_close.literal()}",
                   PASS if enc.hi < float(delta) else FAIL, d_X=as_interval(d_x), d_FS=enc)
        main = fol(y, f1(pipe.assembly, c_close), full)
        report.add(f"continuity:x{n}", "join-continuity", f"{x.literal()}|{x_close.literal()}",
                   _join_verdict(main.verdict))
    return report


def construction_report(pipe: Pipeline) -> Report:
    """Structural checks on the cover, coloring, partition and sections behind f1."""
    assembly = pipe.assembly
    sample = assembly.sample
    report = Report("construction", pipe.params.constants())
    for k, s in enumerate(assembly.sections):
        report.add(f"section:{k}", "section-domain", f"center={s.center}|members={len(s.members)}",
                   PASS if s.center in s.members else FAIL, radius=s.radius)
    failures = coloring_failures(assembly.colored, assembly.cover)
    report.add("coloring:disjoint", "colored-disjointness", f"sets={len(assembly.colored.cover.sets)}",
               PASS if not failures["overlap"] else FAIL)
    report.add("coloring:containment", "colored-containment", f"sets={len(assembly.colored.cover.sets)}",
               PASS if not failures["containment"] else FAIL)
    contraction = contraction_check(sample, assembly.cover)
    report.add("nerve:contraction", "nerve-contraction", f"pairs={contraction.pairs_checked}",
               PASS if not contraction.violations and not contraction.star_failures else FAIL,
               beta=contraction.beta)
    part = assembly.partition
    sums_ok = all(sum(part.column(z)) == 1 for z in range(sample.size))
    report.add("partition:sums", "partition-sums", f"classes={sample.size}", PASS if sums_ok else FAIL)
    violations = partition_variation_violations(sample, part)
    report.add("partition:variation", "partition-flow-variation", f"classes={sample.size}",
               PASS if not violations else FAIL, alpha_hat=part.alpha_hat)
    return report
