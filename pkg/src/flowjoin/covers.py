"""Finite samples of the orbit space, long covers, slow bumps, partitions and the nerve.

Distances on a sample are kept as int64 multiples of a dyadic ``unit`` so that
shortest paths, minima and the final rational values are exact.  Grid flows
act on sample indices through a partial bijection (``succ``/``pred`` chains),
which makes every grid identity used below hold exactly: shift(shift(z, j), k)
equals shift(z, j + k) whenever both sides are defined.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .flow_space import Segment, dist_fs, restrict_window
from .intervals import exp_of, rational_upper
from .model_spaces import DomainError

UNIT_BITS = 32
UNIT = Fraction(1, 1 << UNIT_BITS)
INFINITE = 1 << 60


class DegenerateInput(DomainError):
    """Raised when a construction needs a positive gap or Lebesgue number and gets zero."""


def to_units(q) -> int:
    """Round a nonnegative rational up to a whole number of units."""
    q = Fraction(q)
    return -((-q.numerator << UNIT_BITS) // q.denominator)


def from_units(n) -> Fraction:
    return Fraction(int(n)) * UNIT


def all_pairs_shortest(weights: np.ndarray) -> np.ndarray:
    dist = weights.copy()
    np.fill_diagonal(dist, 0)
    for k in range(dist.shape[0]):
        np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :], out=dist)
    return dist


class FlowChains:
    """Partial bijection i -> succ[i] modelling the flow by one grid step."""

    def __init__(self):
        self.succ: dict[int, int] = {}
        self.pred: dict[int, int] = {}
        self.conflicts = 0

    def link(self, i: int, j: int) -> bool:
        if self.succ.get(i) == j:
            return True
        if i in self.succ or j in self.pred:
            self.conflicts += 1
            return False
        self.succ[i] = j
        self.pred[j] = i
        return True

    def shift(self, i: int, k: int) -> Optional[int]:
        table = self.succ if k > 0 else self.pred
        for _ in range(abs(k)):
            i = table.get(i)
            if i is None:
                return None
        return i


class Sample:
    """Common interface: size, dt, shift(i, k) and an integer metric matrix in units."""

    size: int
    dt: Fraction
    metric_units: np.ndarray

    def shift(self, i: int, k: int) -> Optional[int]:
        raise NotImplementedError

    def dist(self, i: int, j: int) -> Fraction:
        return from_units(self.metric_units[i, j])

    def window(self, i: int, reach) -> list:
        """(k, index) for every defined grid shift with |k dt| <= reach, k = 0 first."""
        out = [(0, i)]
        kmax = math.floor(Fraction(reach) / self.dt)
        for sign in (1, -1):
            for k in range(1, kmax + 1):
                j = self.shift(i, sign * k)
                if j is None or j == i:
                    # a closed chain repeats from here on with smaller weights
                    break
                out.append((sign * k, j))
        return out


class GridSample(Sample):
    """Equally spaced points k*dt on a line (or a circle of given period) flowing by translation."""

    def __init__(self, lo: int, hi: int, dt, period: Optional[int] = None):
        self.dt = Fraction(dt)
        self.lo, self.hi = lo, hi
        self.period = period
        self.size = hi - lo + 1
        pos = np.arange(lo, hi + 1, dtype=np.int64)
        diff = np.abs(pos[:, None] - pos[None, :])
        if period is not None:
            diff = np.minimum(diff, period - diff)
        self.metric_units = diff * to_units(self.dt)

    def index(self, k: int) -> int:
        return k - self.lo

    def position(self, i: int) -> Fraction:
        return (i + self.lo) * self.dt

    def shift(self, i, k):
        j = i + k
        if self.period is not None and self.size == self.period:
            return j % self.size
        return j if 0 <= j < self.size else None


@dataclass
class Registration:
    index: int
    transporter: object


class FlowSample(Sample):
    """Orbit classes of generalized geodesics under a group, with grid flows and d_lambda.

    Each registered geodesic c is moved by a canonical transporter k so that
    k c(0) is the fixed representative of the orbit of c(0); its far tails
    are cut at ``tail_radius``.  Geodesics with the same canonical form share
    a class, and c is recorded as approximately k^-1 rep.
    """

    def __init__(self, group, dt=Fraction(1, 2), lam=Fraction(1), cap=Fraction(2), tol: float = 1e-4,
                 tail_radius=Fraction(40), flow_reach: int = 8):
        self.group = group
        self.space = group.space
        self.dt = Fraction(dt)
        if self.dt <= 0:
            raise DomainError("grid step must be positive")
        self.lam = Fraction(lam)
        self.cap = Fraction(cap)
        self.tol = tol
        self.tail_radius = Fraction(tail_radius)
        self.flow_reach = flow_reach
        self.reps: list = []
        self.sources: list = []  # unrestricted translate of the first geodesic seen in each class
        self._index: dict = {}
        self.chains = FlowChains()
        self.link_transporter: dict[int, object] = {}
        self.flagged: list = []
        self._probes: dict = {}
        self._finalized = False

    @property
    def size(self) -> int:
        return len(self.reps)

    def shift(self, i, k):
        return self.chains.shift(i, k)

    # -- registration ------------------------------------------------------------
    def canonical_form(self, c):
        form, k, _ = self._canonical(c)
        return form, k

    def _canonical(self, c):
        k = self.group.canonical_transporter(c.at(Fraction(0)))
        moved = c.translate(self.group, k)
        form = moved
        if not (isinstance(moved, Segment) and moved.is_constant):
            form = restrict_window(moved, self.tail_radius)
        return form, k, moved

    def lookup(self, c) -> Registration:
        """Registration of c without adding a class; raises if c is not sampled."""
        form, k = self.canonical_form(c)
        index = self._index.get(form.key())
        if index is None:
            raise DomainError(f"geodesic {c.literal()} is not in the sample")
        return Registration(index, self.group.inverse(k))

    def register(self, c) -> Registration:
        form, k, moved = self._canonical(c)
        key = form.key()
        index = self._index.get(key)
        if index is None:
            index = len(self.reps)
            self.reps.append(form)
            self.sources.append(moved)
            self._index[key] = index
            self._finalized = False
        return Registration(index, self.group.inverse(k))

    def add_flow_line(self, c, K: int) -> list:
        """Register flow(c, k dt) for |k| <= K and link consecutive classes."""
        if _constant_near_zero(c, self.tail_radius + K * self.dt):
            regs = [self.register(c)] * (2 * K + 1)
        else:
            regs = [self.register(c.flow(k * self.dt)) for k in range(-K, K + 1)]
        for a, b in zip(regs, regs[1:]):
            if self.chains.link(a.index, b.index):
                # flow(c, k dt) ~ ka rep_a and its dt-flow ~ kb rep_b
                self.link_transporter[a.index] = self.group.mul(self.group.inverse(a.transporter), b.transporter)
        return regs

    def shift_transporter(self, i: int, k: int):
        """(j, g) with flow(rep_i, k dt) ~ g rep_j along the chain, or None."""
        g = self.group.identity
        j = i
        for _ in range(abs(k)):
            if k > 0:
                nxt = self.chains.succ.get(j)
                if nxt is None:
                    return None
                g = self.group.mul(g, self.link_transporter[j])
            else:
                nxt = self.chains.pred.get(j)
                if nxt is None:
                    return None
                g = self.group.mul(g, self.group.inverse(self.link_transporter[nxt]))
            j = nxt
        return j, g

    # -- distances ------------------------------------------------------------------
    def orbit_distance_pair(self, i: int, j: int):
        """(upper bound, g) with d_FS(g rep_i, rep_j) <= bound, capped at ``cap``."""
        ci, cj = self.reps[i], self.reps[j]
        if i == j:
            return Fraction(0), self.group.identity
        reach = _candidate_radius(self.cap)
        space = self.space
        points_i = self._probe_points(i)
        points_j = self._probe_points(j)
        candidates = []
        for g in self.group.near_transporters(points_i[0][1], points_j[0][1], reach):
            d0 = _lower(space.distance(space.act(g, points_i[0][1]), points_j[0][1]))
            candidates.append((d0, self.group.norm(g), self.group.sort_key(g), g))
        candidates.sort(key=lambda item: item[:3])
        best = self.cap
        best_g = None
        for d0, _, _, g in candidates:
            if _origin_lower_bound(d0) >= best:
                continue
            if self._probe_lower_bound(g, points_i, points_j) >= best:
                continue
            enc = dist_fs(ci.translate(self.group, g), cj, self.tol)
            upper = rational_upper(enc.hi)
            if upper < best:
                best, best_g = upper, g
        return best, best_g

    def _probe_points(self, i: int) -> list:
        cached = self._probes.get(i)
        if cached is None:
            c = self.reps[i]
            cached = [(t, c.at(t)) for t in PROBE_TIMES]
            self._probes[i] = cached
        return cached

    def _probe_lower_bound(self, g, points_i, points_j) -> Fraction:
        """Lower bound on d_FS(g c_i, c_j) from point distances at the probe times."""
        space = self.space
        best = Fraction(0)
        for (t, p), (_, q) in zip(points_i[1:], points_j[1:]):
            try:
                d = _lower(space.distance(space.act(g, p), q))
            except DomainError:
                continue
            bound = _origin_lower_bound(Fraction(d)) * _exp_lower(-abs(t))
            best = max(best, bound)
        return best

    def finalize(self) -> None:
        if self._finalized:
            return
        n = self.size
        orbit = np.full((n, n), to_units(self.cap), dtype=np.int64)
        transporters: dict = {}
        for i in range(n):
            orbit[i, i] = 0
            transporters[(i, i)] = self.group.identity
            for j in range(i + 1, n):
                d, g = self.orbit_distance_pair(i, j)
                orbit[i, j] = orbit[j, i] = to_units(d)
                if g is not None:
                    transporters[(i, j)] = g
                    transporters[(j, i)] = self.group.inverse(g)
        self.orbit_units = orbit
        self.orbit_transporters = transporters
        weights = np.full((n, n), INFINITE, dtype=np.int64)
        edge_info: dict = {}
        lam_units = orbit * self.lam.numerator // self.lam.denominator
        lam_units = np.where(orbit * self.lam.numerator % self.lam.denominator == 0, lam_units, lam_units + 1)
        for i in range(n):
            for k in range(-self.flow_reach, self.flow_reach + 1):
                st = self.shift_transporter(i, k)
                if st is None:
                    continue
                a, sigma = st
                row = lam_units[a] + to_units(abs(k) * self.dt)
                better = row < weights[i]
                for j in np.nonzero(better)[0]:
                    edge_info[(i, int(j))] = (k, a, sigma)
                weights[i] = np.minimum(weights[i], row)
        sym = np.minimum(weights, weights.T)
        self.edge_units = sym
        self._edge_info = edge_info
        self.metric_units = all_pairs_shortest(sym)
        self._finalized = True

    def d_lambda(self, i: int, j: int) -> Fraction:
        self.finalize()
        return self.dist(i, j)

    def orbit_distance(self, i: int, j: int) -> Fraction:
        self.finalize()
        return from_units(self.orbit_units[i, j])

    def edge_transporter(self, i: int, j: int):
        """(flow time, g) with rep_j ~ flow(g rep_i, time) along the cheapest edge i -> j."""
        info = self._edge_info.get((i, j))
        if info is not None and self.edge_units[i, j] == self._directed_weight(i, j, info):
            k, a, sigma = info
            g = self.orbit_transporters.get((a, j), self.group.identity)
            return k * self.dt, self.group.mul(g, self.group.inverse(sigma))
        k, a, sigma = self._edge_info[(j, i)]
        g = self.orbit_transporters.get((a, i), self.group.identity)
        forward = self.group.mul(g, self.group.inverse(sigma))
        return -k * self.dt, self.group.inverse(forward)

    def _directed_weight(self, i, j, info):
        k, a, _ = info
        d = self.orbit_units[a, j]
        lam_d = -((-d * self.lam.numerator) // self.lam.denominator)
        return lam_d + to_units(abs(k) * self.dt)

    def section_tree(self, root: int) -> dict:
        """Shortest-path tree from root: index -> (flow time, g) with rep_i ~ flow(g rep_root, time)."""
        self.finalize()
        n = self.size
        dist = np.full(n, INFINITE, dtype=np.int64)
        dist[root] = 0
        done = np.zeros(n, dtype=bool)
        parent = {root: None}
        for _ in range(n):
            masked = np.where(done, INFINITE * 2, dist)
            u = int(np.argmin(masked))
            if masked[u] >= INFINITE:
                break
            done[u] = True
            cand = dist[u] + self.edge_units[u]
            better = (cand < dist) & ~done
            for v in np.nonzero(better)[0]:
                parent[int(v)] = u
            dist = np.where(better, cand, dist)
        out = {root: (Fraction(0), self.group.identity)}
        order = sorted((i for i in parent if parent[i] is not None), key=lambda i: dist[i])
        for v in order:
            u = parent[v]
            t_u, g_u = out[u]
            t_e, g_e = self.edge_transporter(u, v)
            out[v] = (t_u + t_e, self.group.mul(g_e, g_u))
        return out


def _constant_near_zero(c, reach) -> bool:
    """True when c is constant on [-reach, reach], so every grid flow of c has the same window."""
    window = restrict_window(c, reach)
    return isinstance(window, Segment) and window.is_constant


PROBE_TIMES = (Fraction(0), Fraction(-1), Fraction(1), Fraction(-2), Fraction(2))


def _lower(d) -> float:
    return d.lo if hasattr(d, "lo") else d


def _exp_lower(x) -> Fraction:
    return Fraction(exp_of(x).lo)


def _candidate_radius(cap: Fraction) -> Fraction:
    """Smallest d0 with d0 - 2 + 2 exp(-d0/2) >= cap, rounded up to a quarter."""
    d0 = Fraction(0)
    while _origin_lower_bound(d0) < cap:
        d0 += Fraction(1, 4)
    return d0


def _origin_lower_bound(d0: Fraction) -> Fraction:
    """Lower bound on d_FS from the distance d0 of the time-zero points.

    t -> d(c(t), c'(t)) is 2-Lipschitz, so it stays above d0 - 2|t| and the
    weighted integral is at least d0 - 2 + 2 exp(-d0/2).  A probe at time s
    gives the same bound scaled by exp(-|s|).
    """
    value = float(d0) - 2 + 2 * math.exp(-float(d0) / 2)
    return Fraction(max(0.0, math.nextafter(value, -math.inf))) if value > 1e-12 else Fraction(0)


def build_sample(group, generators, dt, K: int, lam, cap=Fraction(2), tol: float = 1e-4) -> FlowSample:
    """Flow sample closed under the grid for each generator geodesic."""
    if K < 1:
        raise DomainError("grid half-width K must be at least 1")
    sample = FlowSample(group, dt, lam, cap, tol)
    for c in generators:
        sample.add_flow_line(c, K)
    sample.finalize()
    return sample


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------


@dataclass
class CoverSet:
    center: int
    radius: Fraction
    members: frozenset
    color: Optional[int] = None
    simplex: Optional[tuple] = None


@dataclass
class Cover:
    sets: list
    scale: Fraction

    @property
    def dimension(self) -> int:
        return observed_dimension(self)

    def containing(self, z: int) -> list:
        return [i for i, s in enumerate(self.sets) if z in s.members]


def observed_dimension(cover: Cover) -> int:
    counts: dict[int, int] = {}
    for s in cover.sets:
        for z in s.members:
            counts[z] = counts.get(z, 0) + 1
    return max(counts.values(), default=1) - 1


def build_long_cover(sample: Sample, alpha_hat) -> Cover:
    """Farthest-point net with covering radius alpha_hat; sets are closed 2 alpha_hat balls."""
    alpha_hat = Fraction(alpha_hat)
    if alpha_hat <= 0:
        raise DomainError("alpha_hat must be positive")
    if alpha_hat < sample.dt:
        raise DomainError(f"alpha_hat {alpha_hat} is finer than the grid step {sample.dt}; refine dt")
    metric = sample.metric_units
    n = sample.size
    radius_units = to_units(alpha_hat)
    centers = [0]
    nearest = metric[0].copy()
    while True:
        far = int(np.argmax(nearest))
        if nearest[far] <= radius_units:
            break
        centers.append(far)
        nearest = np.minimum(nearest, metric[far])
    ball = to_units(2 * alpha_hat)
    sets = []
    for c in centers:
        members = frozenset(int(z) for z in np.nonzero(metric[c] <= ball)[0])
        sets.append(CoverSet(c, 2 * alpha_hat, members))
    return Cover(sets, alpha_hat)


def long_window_failures(sample: Sample, cover: Cover, reach) -> list:
    """Sample points whose on-grid window of the given reach lies in no single set."""
    failures = []
    for z in range(sample.size):
        window = {j for _, j in sample.window(z, reach)}
        if not any(window <= s.members for s in cover.sets):
            failures.append(z)
    return failures


def lebesgue_number(sample: Sample, cover: Cover) -> Fraction:
    """min over z of max over sets of the distance from z to the complement."""
    comp = complement_distances(sample, [s.members for s in cover.sets])
    return from_units(int(comp.max(axis=0).min()))


def complement_distances(sample: Sample, member_sets) -> np.ndarray:
    """Row per set: distance from each sample point to the set's complement (units)."""
    metric = sample.metric_units
    n = sample.size
    big = int(metric.max()) + to_units(1) if n else 0
    out = np.zeros((len(member_sets), n), dtype=np.int64)
    for row, members in enumerate(member_sets):
        outside = np.array([z for z in range(n) if z not in members], dtype=np.int64)
        if outside.size == 0:
            out[row] = big
        else:
            out[row] = metric[:, outside].min(axis=1)
    return out


# ---------------------------------------------------------------------------
# bump functions and partitions
# ---------------------------------------------------------------------------


def urysohn(sample: Sample, inner: set, outer: set):
    """phi(z) = min(1, d(z, S minus outer) / gap) with gap = d(inner, S minus outer)."""
    if not inner <= outer:
        raise DomainError("inner set is not contained in the outer set")
    comp = complement_distances(sample, [outer])[0]
    if not inner:
        raise DegenerateInput("empty inner set")
    gap = int(min(comp[z] for z in inner))
    if gap == 0:
        raise DegenerateInput("inner set touches the complement (gap 0)")
    return [min(Fraction(1), Fraction(int(comp[z]), gap)) for z in range(sample.size)], from_units(gap)


def bump(sample: Sample, inner, outer, alpha_hat) -> list:
    """f(z) = max over on-grid |t| <= alpha_hat of (1 - |t|/alpha_hat) phi(flow(z, t))."""
    return bump_with_gap(sample, inner, outer, alpha_hat)[0]


def bump_with_gap(sample: Sample, inner, outer, alpha_hat):
    """The bump values together with the Urysohn gap d(inner, complement of outer)."""
    alpha_hat = Fraction(alpha_hat)
    if alpha_hat <= 0:
        raise DomainError("alpha_hat must be positive")
    phi, gap = urysohn(sample, set(inner), set(outer))
    values = []
    for z in range(sample.size):
        best = Fraction(0)
        for k, j in sample.window(z, alpha_hat):
            weight = 1 - abs(k * sample.dt) / alpha_hat
            if weight > 0 and phi[j] > 0:
                best = max(best, weight * phi[j])
        values.append(best)
    return values, gap


@dataclass
class Partition:
    values: list  # values[set][z]
    cover: Cover
    alpha_hat: Fraction
    lebesgue: Fraction
    cores: list
    bumps: list
    gaps: list

    def column(self, z: int) -> list:
        return [row[z] for row in self.values]


def core(sample: Sample, members: frozenset, alpha_hat) -> set:
    """Points whose whole on-grid window of reach alpha_hat stays inside the set."""
    return {z for z in members if all(j in members for _, j in sample.window(z, alpha_hat))}


def partition(sample: Sample, cover: Cover, alpha_hat) -> Partition:
    """Partition of unity subordinate to the cover with slow flow variation."""
    alpha_hat = Fraction(alpha_hat)
    cores = [core(sample, s.members, alpha_hat) for s in cover.sets]
    comp = complement_distances(sample, cores)
    ell_units = int(comp.max(axis=0).min()) if sample.size else 0
    if ell_units == 0:
        raise DegenerateInput("zero Lebesgue number for the shrunken cover")
    bumps = []
    gaps = []
    for row, c in enumerate(cores):
        inner = {z for z in range(sample.size) if comp[row, z] >= ell_units}
        if inner:
            values, gap = bump_with_gap(sample, inner, c, alpha_hat)
        else:
            values, gap = [Fraction(0)] * sample.size, None
        bumps.append(values)
        gaps.append(gap)
    values = [[Fraction(0)] * sample.size for _ in cover.sets]
    for z in range(sample.size):
        total = sum(b[z] for b in bumps)
        for row, b in enumerate(bumps):
            values[row][z] = b[z] / total
    return Partition(values, cover, alpha_hat, from_units(ell_units), cores, bumps, gaps)


def slow_variation_violations(sample: Sample, values: list, alpha_hat) -> list:
    """(z, k) with |f(flow(z, k dt)) - f(z)| > |k dt| / alpha_hat."""
    alpha_hat = Fraction(alpha_hat)
    bad = []
    for z in range(sample.size):
        for k, j in sample.window(z, 2 * alpha_hat):
            if abs(values[j] - values[z]) > abs(k * sample.dt) / alpha_hat:
                bad.append((z, k))
    return bad


def partition_variation_violations(sample: Sample, part: Partition, reach=None) -> list:
    """(set, z, k) breaking |t_U(z) - t_U(flow(z, k dt))| <= (2N+3)|k dt|/alpha_hat."""
    n_obs = observed_dimension(part.cover)
    reach = part.alpha_hat if reach is None else Fraction(reach)
    bad = []
    for z in range(sample.size):
        for k, j in sample.window(z, reach):
            bound = (2 * n_obs + 3) * abs(k * sample.dt) / part.alpha_hat
            for row, vals in enumerate(part.values):
                if abs(vals[j] - vals[z]) > bound:
                    bad.append((row, z, k))
    return bad


# ---------------------------------------------------------------------------
# nerve and coloring
# ---------------------------------------------------------------------------


def nerve_coordinates(sample: Sample, cover: Cover) -> list:
    """x_V(z) = d(z, S minus V) / sum over sets, one list per sample point."""
    comp = complement_distances(sample, [s.members for s in cover.sets])
    out = []
    for z in range(sample.size):
        column = [int(v) for v in comp[:, z]]
        total = sum(column)
        if total == 0:
            raise DegenerateInput(f"sample point {z} lies in no set interior")
        out.append([Fraction(v, total) for v in column])
    return out


def nerve_map(sample: Sample, cover: Cover, z: int) -> dict:
    coords = nerve_coordinates(sample, cover)[z]
    return {i: x for i, x in enumerate(coords) if x != 0}


def l1(p: list, q: list) -> Fraction:
    return sum((abs(a - b) for a, b in zip(p, q)), Fraction(0))


@dataclass
class ContractionReport:
    beta: Fraction
    nerve_dim: int
    pairs_checked: int
    violations: list
    star_failures: list


def contraction_check(sample: Sample, cover: Cover, beta=None) -> ContractionReport:
    """Check ||x(z) - x(z')||_1 <= 16 N^2 / beta * d(z, z') whenever d(z, z') <= beta / (4N)."""
    beta = lebesgue_number(sample, cover) if beta is None else Fraction(beta)
    n_dim = max(observed_dimension(cover), 1)
    coords = nerve_coordinates(sample, cover)
    limit = beta / (4 * n_dim)
    factor = Fraction(16 * n_dim * n_dim) / beta
    violations = []
    checked = 0
    metric = sample.metric_units
    limit_units = math.floor(limit / UNIT)
    for z in range(sample.size):
        for w in range(z + 1, sample.size):
            if metric[z, w] > limit_units:
                continue
            checked += 1
            d = from_units(metric[z, w])
            if l1(coords[z], coords[w]) > factor * d:
                violations.append((z, w))
    star_failures = []
    for i, s in enumerate(cover.sets):
        star = {z for z in range(sample.size) if coords[z][i] > 0}
        if star != set(s.members):
            star_failures.append(i)
    return ContractionReport(beta, n_dim, checked, violations, star_failures)


@dataclass
class ColoredCover:
    cover: Cover
    parents: list  # parent set indices per colored set
    alpha: Fraction
    beta: Fraction
    star_lebesgue: Fraction

    @property
    def colors(self) -> int:
        return 1 + max((s.color for s in self.cover.sets), default=0)

    def by_color(self, color: int) -> list:
        return [i for i, s in enumerate(self.cover.sets) if s.color == color]


def color_cover(sample: Sample, cover: Cover, max_dim: Optional[int] = None) -> ColoredCover:
    """Pull back the barycentric-subdivision stars: color = dimension of the simplex."""
    n_obs = observed_dimension(cover)
    if max_dim is not None and n_obs > max_dim:
        raise DomainError(f"cover dimension {n_obs} exceeds the configured {max_dim}")
    coords = nerve_coordinates(sample, cover)
    groups: dict[tuple, set] = {}
    for z in range(sample.size):
        order = sorted(range(len(cover.sets)), key=lambda i: (-coords[z][i], i))
        for size in range(1, len(order) + 1):
            inside = coords[z][order[size - 1]]
            outside = coords[z][order[size]] if size < len(order) else Fraction(0)
            if inside > outside:
                simplex = tuple(sorted(order[:size]))
                groups.setdefault(simplex, set()).add(z)
            if outside == 0:
                break
    sets = []
    parents = []
    for simplex in sorted(groups, key=lambda s: (len(s), s)):
        members = frozenset(groups[simplex])
        center = min(members)
        sets.append(CoverSet(center, cover.scale, members, len(simplex) - 1, simplex))
        parents.append(simplex)
    beta = lebesgue_number(sample, cover)
    n_dim = max(n_obs, 1)
    star_lebesgue = Fraction(1, (n_dim + 1) ** 2)
    alpha = min(beta / (4 * n_dim), star_lebesgue * beta / (16 * n_dim * n_dim))
    return ColoredCover(Cover(sets, alpha), parents, alpha, beta, star_lebesgue)


def coloring_failures(colored: ColoredCover, parent: Cover) -> dict:
    """Disjointness within colors and containment in every parent vertex set."""
    overlap = []
    for color in range(colored.colors):
        seen: dict[int, int] = {}
        for i in colored.by_color(color):
            for z in colored.cover.sets[i].members:
                if z in seen:
                    overlap.append((color, seen[z], i, z))
                seen[z] = i
    containment = []
    for i, s in enumerate(colored.cover.sets):
        for v in s.simplex:
            if not s.members <= parent.sets[v].members:
                containment.append((i, v))
    return {"overlap": overlap, "containment": containment}


# ---------------------------------------------------------------------------
# tabular dumps
# ---------------------------------------------------------------------------


def cover_csv(cover: Cover) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["set", "color", "center", "radius", "members"])
    for i, s in enumerate(cover.sets):
        color = "" if s.color is None else s.color
        radius = f"{Fraction(s.radius).numerator}/{Fraction(s.radius).denominator}"
        writer.writerow([i, color, s.center, radius, " ".join(str(z) for z in sorted(s.members))])
    return buf.getvalue()


def partition_csv(part: Partition) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    size = len(part.values[0]) if part.values else 0
    writer.writerow(["set"] + [f"z{z}" for z in range(size)])
    for i, row in enumerate(part.values):
        writer.writerow([i] + [f"{v.numerator}/{v.denominator}" for v in row])
    return buf.getvalue()
