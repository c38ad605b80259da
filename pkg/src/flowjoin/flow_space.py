"""Generalized geodesics, the flow, and certified flow-space distances.

Three path kinds are supported:

* ``Segment(space, start, end, anchor)``: constant ``start`` before ``anchor``,
  unit speed toward ``end``, constant ``end`` afterwards.  Constant paths are
  stored with ``anchor == 0`` so that flowing them returns the same object.
* ``Line(space, origin, direction)``: bi-infinite Euclidean line with
  ``c(0) = origin`` and exact unit ``direction``.
* ``Axis(space, group, generator, base)``: bi-infinite periodic path in a tree
  along the axis of a hyperbolic ``generator`` with ``c(0) = base``.

The distance integrates d(c(t), c'(t)) against exp(-|t|)/2.  On trees the
integrand is piecewise linear between vertex crossings and is integrated in
closed form; on Euclidean space it is convex between support endpoints and
is bracketed by chord and tangent lines.  The tail beyond the window [-W, W]
is bounded through d(c(t), c'(t)) <= d(c(0), c'(0)) + 2|t|, which leaves at
most (d0 + 2W + 2) exp(-W).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .intervals import Interval, as_interval, exp_of
from .model_spaces import (
    DepthError,
    DomainError,
    EuclideanPoint,
    EuclideanSpace,
    RootedTree,
    TreePoint,
)


class GeneralizedGeodesic:
    space = None

    def at(self, t):
        raise NotImplementedError

    def flow(self, tau) -> "GeneralizedGeodesic":
        raise NotImplementedError

    def translate(self, group, g) -> "GeneralizedGeodesic":
        raise NotImplementedError

    @property
    def support(self) -> tuple:
        raise NotImplementedError

    @property
    def is_bi_infinite(self) -> bool:
        return False

    @property
    def is_constant(self) -> bool:
        return False

    def is_constant_on(self, lo, hi) -> bool:
        return self.is_constant

    def breaks(self, lo: Fraction, hi: Fraction) -> list:
        """Times in [lo, hi] where the path meets a vertex or a support end."""
        raise NotImplementedError

    def key(self):
        raise NotImplementedError

    def literal(self) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, GeneralizedGeodesic) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def _clamp(s, lo, hi):
    return min(max(s, lo), hi)


class Segment(GeneralizedGeodesic):
    """Generalized geodesic supported on [anchor, anchor + d(start, end)]."""

    def __init__(self, space, start, end, anchor=Fraction(0)):
        self.space = space
        self.start = start
        self.end = end
        self.length = space.distance(start, end)
        if not isinstance(self.length, Interval) and self.length == 0:
            self.end = start
            anchor = Fraction(0)
        self.anchor = Fraction(anchor)
        self._path_cache = None

    @property
    def is_constant(self) -> bool:
        return not isinstance(self.length, Interval) and self.length == 0

    @property
    def support(self) -> tuple:
        if self.is_constant:
            return (self.anchor, self.anchor)
        return (self.anchor, self.anchor + self.length)

    def support_end(self):
        return self.anchor + self.length

    def is_constant_on(self, lo, hi) -> bool:
        if self.is_constant or hi <= self.anchor:
            return True
        end = as_interval(self.support_end())
        return Fraction(end.hi) <= lo

    def at(self, t):
        if self.is_constant:
            return self.start
        if isinstance(t, Interval) or isinstance(self.length, Interval):
            s = as_interval(t) - as_interval(self.anchor)
            length = as_interval(self.length)
            lo = min(max(s.lo, 0.0), length.lo)
            hi = min(max(s.hi, 0.0), length.hi)
            if hi <= 0.0:
                return self.start
            if isinstance(self.length, Interval) and lo >= length.hi:
                return self.end
            if not isinstance(self.length, Interval) and lo >= float(self.length) and Fraction(lo) >= self.length:
                return self.end
            return self.space.point_along(self.start, self.end, Interval(lo, max(lo, hi)))
        s = Fraction(t) - self.anchor
        if s <= 0:
            return self.start
        if s >= self.length:
            return self.end
        return self.space.point_along(self.start, self.end, s)

    def flow(self, tau) -> "Segment":
        if self.is_constant:
            return self
        return Segment(self.space, self.start, self.end, self.anchor - Fraction(tau))

    def translate(self, group, g) -> "Segment":
        return Segment(self.space, self.space.act(g, self.start), self.space.act(g, self.end), self.anchor)

    def _tree_path(self):
        """Path data (h_start, meet height, first-leg length, total length)."""
        if self._path_cache is None:
            tree = self.space
            hx = tree.point_height(self.start)
            hy = tree.point_height(self.end)
            hm = tree.meet_height(self.start, self.end)
            self._path_cache = (hx, hy, hm, hx - hm, hx + hy - 2 * hm)
        return self._path_cache

    def breaks(self, lo, hi) -> list:
        if self.is_constant:
            return []
        out = []
        for t in (self.anchor, self.anchor + self.length):
            if not isinstance(t, Interval) and lo <= t <= hi:
                out.append(t)
        if isinstance(self.space, RootedTree):
            s_lo = max(Fraction(lo) - self.anchor, Fraction(0))
            s_hi = min(Fraction(hi) - self.anchor, self.length)
            if s_lo <= s_hi:
                out += [self.anchor + s for s in path_vertex_offsets(self.space, self.start, self.end,
                                                                     self._tree_path(), s_lo, s_hi)]
        return sorted(set(out))

    def key(self):
        if self.is_constant:
            return ("const", self.start)
        return ("seg", self.start, self.end, self.anchor)

    def literal(self) -> str:
        if self.is_constant:
            return f"const {self.start.literal()}"
        return f"seg {self.start.literal()} -> {self.end.literal()} @ {_qtext(self.anchor)}"


class Line(GeneralizedGeodesic):
    """Euclidean line t -> origin + t * direction with |direction| = 1."""

    def __init__(self, space: EuclideanSpace, origin: EuclideanPoint, direction):
        self.space = space
        self.origin = origin
        self.direction = tuple(Fraction(x) for x in direction)
        if sum(x * x for x in self.direction) != 1:
            raise DomainError("line direction must be an exact unit vector")

    @property
    def is_bi_infinite(self) -> bool:
        return True

    @property
    def support(self) -> tuple:
        return (None, None)

    def at(self, t):
        if isinstance(t, Interval):
            return EuclideanPoint(tuple(as_interval(p) + t * u for p, u in zip(self.origin.coords, self.direction)))
        t = Fraction(t)
        return EuclideanPoint(tuple(p + t * u for p, u in zip(self.origin.coords, self.direction)))

    def flow(self, tau) -> "Line":
        return Line(self.space, self.at(Fraction(tau)), self.direction)

    def translate(self, group, g) -> "Line":
        return Line(self.space, self.space.act(g, self.origin), self.direction)

    def breaks(self, lo, hi) -> list:
        return []

    def key(self):
        return ("line", self.origin, self.direction)

    def literal(self) -> str:
        return f"line {self.origin.literal()} dir ({','.join(_qtext(u) for u in self.direction)})"


class Axis(GeneralizedGeodesic):
    """Periodic bi-infinite path along the axis of a hyperbolic tree isometry."""

    def __init__(self, space: RootedTree, group, generator, base: TreePoint):
        self.space = space
        self.group = group
        self.generator = generator
        self.base = base
        self.next_base = space.act(generator, base)
        self.period = space.distance(base, self.next_base)
        if self.period == 0:
            raise DomainError("axis generator fixes the base point")
        second = space.act(generator, self.next_base)
        if space.distance(base, second) != 2 * self.period:
            raise DomainError("base point is not on the generator's axis")
        self._powers = {0: group.identity}
        self._segment = Segment(space, base, self.next_base)

    @property
    def is_bi_infinite(self) -> bool:
        return True

    @property
    def support(self) -> tuple:
        return (None, None)

    def _power(self, k: int):
        if k not in self._powers:
            step = self.generator if k > 0 else self.group.inverse(self.generator)
            prev = self._power(k - 1 if k > 0 else k + 1)
            self._powers[k] = self.group.mul(step, prev)
        return self._powers[k]

    def at(self, t):
        t = Fraction(t)
        k = math.floor(t / self.period)
        r = t - k * self.period
        point = self._segment.at(r)
        if k == 0:
            return point
        return self.space.act(self._power(k), point)

    def flow(self, tau) -> "Axis":
        return Axis(self.space, self.group, self.generator, self.at(Fraction(tau)))

    def translate(self, group, g) -> "Axis":
        conj = group.mul(group.mul(g, self.generator), group.inverse(g))
        return Axis(self.space, group, conj, self.space.act(g, self.base))

    def breaks(self, lo, hi) -> list:
        lo, hi = Fraction(lo), Fraction(hi)
        base_breaks = self._segment.breaks(Fraction(0), self.period)
        out = []
        k0 = math.floor(lo / self.period)
        k1 = math.ceil(hi / self.period)
        for k in range(k0, k1 + 1):
            for s in base_breaks:
                t = k * self.period + s
                if lo <= t <= hi:
                    out.append(t)
        return sorted(set(out))

    def key(self):
        return ("axis", self.group.literal(self.generator), self.base)

    def literal(self) -> str:
        return f"axis {self.group.literal(self.generator)} through {self.base.literal()}"


def _qtext(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def path_vertex_offsets(tree: RootedTree, start, end, path, s_lo, s_hi) -> list:
    """Offsets s in [s_lo, s_hi] at which the segment from start to end sits on a vertex."""
    hx, hy, hm, first_leg, total = path
    out = []
    if tree.unit_edges:
        # first leg: heights k with hm <= k <= hx, offset hx - k
        k_hi = min(math.floor(hx - s_lo), math.floor(hx))
        k_lo = max(math.ceil(hx - min(s_hi, first_leg)), math.ceil(hm))
        for k in range(k_lo, k_hi + 1):
            out.append(hx - k)
        # second leg: heights k with hm <= k <= hy, offset first_leg + k - hm
        k_lo2 = max(math.ceil(hm + max(s_lo, first_leg) - first_leg), math.ceil(hm))
        k_hi2 = min(math.floor(hm + s_hi - first_leg), math.floor(hy))
        for k in range(k_lo2, k_hi2 + 1):
            out.append(first_leg + k - hm)
        return [s for s in out if s_lo <= s <= s_hi]
    v = start.vertex
    while v is not None:
        h = tree.height(v)
        if h < hm:
            break
        if h <= hx:
            out.append(hx - h)
        v = tree.parent(v) if v != tree.root else None
    v = end.vertex
    while v is not None:
        h = tree.height(v)
        if h < hm:
            break
        if h <= hy:
            out.append(first_leg + h - hm)
        v = tree.parent(v) if v != tree.root else None
    return [s for s in out if s_lo <= s <= s_hi]


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def evaluate(c: GeneralizedGeodesic, t):
    return c.at(t)


def flow(c: GeneralizedGeodesic, tau) -> GeneralizedGeodesic:
    return c.flow(tau)


def constant(space, x) -> Segment:
    return Segment(space, x, x)


def restrict_window(c: GeneralizedGeodesic, R) -> GeneralizedGeodesic:
    """Agree with c on [-R, R] and stay constant outside."""
    R = Fraction(R)
    if R <= 0:
        raise DomainError("window radius must be positive")
    if isinstance(c, Segment):
        if c.is_constant:
            return c
        end = c.support_end()
        end_hi = end.hi if isinstance(end, Interval) else end
        end_lo = end.lo if isinstance(end, Interval) else end
        if c.anchor >= -R and end_hi <= R:
            return c
        new_start = c.at(-R) if c.anchor < -R else c.start
        new_anchor = max(c.anchor, -R)
        if end_lo >= R:
            new_end = c.at(R)
        else:
            new_end = c.end
        return Segment(c.space, new_start, new_end, new_anchor)
    return Segment(c.space, c.at(-R), c.at(R), -R)


def tail_bound(d0_hi: float, window: Fraction) -> Interval:
    """Upper enclosure of (d0 + 2W + 2) exp(-W)."""
    return (Interval.exact(Fraction(d0_hi)) + 2 * Interval.exact(window) + 2) * exp_of(-window)


def choose_window(d0_hi: float, tol: float) -> Fraction:
    """Smallest quarter-integer W with (d0 + 2W + 2) exp(-W) <= tol / 2."""
    target = tol / 2

    def step(w):
        return Fraction(1, 4) if w < 4 else max(Fraction(1, 4), Fraction(math.floor(w)) / 8)

    w = Fraction(1, 4)
    # walk the same schedule in floats first, then certify with intervals
    while (d0_hi + 2 * float(w) + 2) * math.exp(-float(w)) > target * (1 + 1e-9):
        w += step(w)
    while tail_bound(d0_hi, w).hi > target:
        w += step(w)
    # refine downward by quarters is unnecessary: the step size keeps W near-minimal
    return w


def _lin_exp_integral(a: Fraction, b: Fraction, t0: Fraction, t1: Fraction) -> Interval:
    """Enclosure of the integral of (a + b t) exp(-|t|)/2 over [t0, t1], one-signed t."""
    if t1 <= t0:
        return Interval(0.0)
    if t0 >= 0:
        left = Interval.exact(a + b * t0 + b) * exp_of(-t0)
        right = Interval.exact(a + b * t1 + b) * exp_of(-t1)
        return (left - right) * 0.5
    if t1 <= 0:
        right = Interval.exact(a + b * t1 - b) * exp_of(t1)
        left = Interval.exact(a + b * t0 - b) * exp_of(t0)
        return (right - left) * 0.5
    return _lin_exp_integral(a, b, t0, Fraction(0)) + _lin_exp_integral(a, b, Fraction(0), t1)


def _linear_through(t0, d0, t1, d1):
    b = (d1 - d0) / (t1 - t0)
    return d0 - b * t0, b


@dataclass
class Enclosure:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def to_record(self) -> list:
        return Interval(self.lo, self.hi).to_record()

    def contains(self, x) -> bool:
        return Interval(self.lo, self.hi).contains(x)


def dist_fs(c: GeneralizedGeodesic, c_prime: GeneralizedGeodesic, tol: float = 1e-6) -> Enclosure:
    """Certified enclosure of the flow-space distance with width about tol."""
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    space = c.space
    if c is c_prime or c.key() == c_prime.key():
        return Enclosure(0.0, 0.0)
    d0 = space.distance(c.at(Fraction(0)), c_prime.at(Fraction(0)))
    if c.is_constant and c_prime.is_constant:
        iv = as_interval(d0)
        return Enclosure(iv.lo, iv.hi)
    d0_hi = as_interval(d0).hi
    window = choose_window(d0_hi, tol)
    tail = tail_bound(d0_hi, window)
    if isinstance(space, RootedTree):
        body = _tree_integral(c, c_prime, window)
    elif isinstance(space, EuclideanSpace):
        body = _euclidean_integral(c, c_prime, window, tol / 2)
    else:
        raise DomainError(f"flow-space distance is not implemented on {space.kind}")
    return Enclosure(max(0.0, body.lo), (body + Interval(0.0, tail.hi)).hi)


def _tree_integral(c, c_prime, window: Fraction) -> Interval:
    space = c.space
    lo, hi = -window, window
    if c.is_constant_on(lo, hi) and c_prime.is_constant_on(lo, hi):
        d = space._distance(c.at(Fraction(0)), c_prime.at(Fraction(0)))
        return _lin_exp_integral(d, Fraction(0), lo, hi)
    times = set(c.breaks(lo, hi)) | set(c_prime.breaks(lo, hi)) | {lo, hi, Fraction(0)}
    times = sorted(t for t in times if lo <= t <= hi)
    total = Interval(0.0)
    values = [space._distance(c.at(t), c_prime.at(t)) for t in times]
    for i in range(len(times) - 1):
        total = total + _tree_piece(c, c_prime, times[i], values[i], times[i + 1], values[i + 1], 0)
    return total


def _tree_piece(c, c_prime, t0, d0, t1, d1, depth: int) -> Interval:
    space = c.space
    tm = (t0 + t1) / 2
    dm = space._distance(c.at(tm), c_prime.at(tm))
    if 2 * dm == d0 + d1:
        a, b = _linear_through(t0, d0, t1, d1)
        return _lin_exp_integral(a, b, t0, t1)
    if depth >= 8:
        # fall back to the Lipschitz bracket: |d'| <= 2 on the piece
        spread = t1 - t0
        weight = _lin_exp_integral(Fraction(1), Fraction(0), t0, t1)
        lo_val = max(Fraction(0), dm - spread)
        return Interval(weight.lo * float(lo_val), (weight * Interval.exact(dm + spread)).hi)
    if d0 + d1 > 0:
        kink = t0 + (t1 - t0) * d0 / (d0 + d1)
    else:
        kink = tm
    if kink in (t0, t1):
        kink = tm
    dk = space._distance(c.at(kink), c_prime.at(kink))
    return _tree_piece(c, c_prime, t0, d0, kink, dk, depth + 1) + _tree_piece(c, c_prime, kink, dk, t1, d1, depth + 1)


# -- euclidean integrand -----------------------------------------------------


def _affine_pieces(c, lo: Fraction, hi: Fraction):
    """Breakpoint enclosures and affine forms (A, B) with c(t) = A + B t per phase."""
    if isinstance(c, Line):
        return [], [(tuple(c.origin.coords), c.direction)]
    if c.is_constant:
        return [], [(tuple(c.start.coords), None)]
    start = c.start.coords
    end = c.end.coords
    length = c.length
    if isinstance(length, Interval):
        direction = tuple((as_interval(b) - as_interval(a)) / length for a, b in zip(start, end))
        moving_origin = tuple(as_interval(a) - direction_i * as_interval(c.anchor) for a, direction_i in zip(start, direction))
        end_time = as_interval(c.anchor) + length
    else:
        direction = tuple((b - a) / length for a, b in zip(start, end))
        moving_origin = tuple(a - u * c.anchor for a, u in zip(start, direction))
        end_time = c.anchor + length
    phases = [(tuple(start), None), (moving_origin, direction), (tuple(end), None)]
    return [c.anchor, end_time], phases


def _euclidean_integral(c, c_prime, window: Fraction, tol: float) -> Interval:
    lo, hi = -window, window
    breaks_c, phases_c = _affine_pieces(c, lo, hi)
    breaks_d, phases_d = _affine_pieces(c_prime, lo, hi)
    events = []
    for owner, breaks in ((0, breaks_c), (1, breaks_d)):
        for idx, b in enumerate(breaks):
            events.append((as_interval(b), owner, idx))
    events.sort(key=lambda e: e[0].lo)
    cuts = [(Fraction(lo), Fraction(lo))]
    for iv, _, _ in events:
        b_lo, b_hi = Fraction(iv.lo), Fraction(iv.hi)
        cuts.append((b_lo, b_hi))
    cuts.append((Fraction(hi), Fraction(hi)))
    cuts.append((Fraction(0), Fraction(0)))
    cuts = sorted(set((max(lo, min(a, hi)), max(lo, min(b, hi))) for a, b in cuts))
    total = Interval(0.0)
    budget = [4000]
    length = float(hi - lo)
    # uncertain neighbourhoods of irrational breakpoints: bracket with the global Lipschitz bound
    d_at0 = c.space.distance(c.at(Fraction(0)), c_prime.at(Fraction(0)))
    lipschitz_cap = as_interval(d_at0) + 2 * float(window)
    points = []
    for a, b in cuts:
        if b > a:
            weight = _lin_exp_integral(Fraction(1), Fraction(0), a, b)
            total = total + Interval(0.0, (weight * lipschitz_cap).hi)
        points.append((a, b))
    for i in range(len(points) - 1):
        t0 = points[i][1]
        t1 = points[i + 1][0]
        if t1 <= t0:
            continue
        tm = (t0 + t1) / 2
        form_c = _phase_at(c, breaks_c, phases_c, tm)
        form_d = _phase_at(c_prime, breaks_d, phases_d, tm)
        diff_a, diff_b = _difference(form_c, form_d)
        share = tol * float(t1 - t0) / length
        total = total + _convex_piece(diff_a, diff_b, t0, t1, share, budget)
    return total


def _phase_at(c, breaks, phases, t: Fraction):
    if len(phases) == 1:
        return phases[0]
    if as_interval(breaks[0]).hi <= float(t) and Fraction(as_interval(breaks[0]).hi) <= t:
        if as_interval(breaks[1]).hi < float(t):
            return phases[2]
        if as_interval(breaks[1]).lo > float(t):
            return phases[1]
        raise DomainError("phase undecidable at an irrational breakpoint")
    if Fraction(as_interval(breaks[0]).lo) >= t:
        return phases[0]
    raise DomainError("phase undecidable at an irrational breakpoint")


def _difference(form_c, form_d):
    a1, b1 = form_c
    a2, b2 = form_d
    a = tuple(_sub(x, y) for x, y in zip(a1, a2))
    if b1 is None and b2 is None:
        b = None
    else:
        zero = tuple(Fraction(0) for _ in a1)
        b = tuple(_sub(x, y) for x, y in zip(b1 or zero, b2 or zero))
    return a, b


def _sub(x, y):
    if isinstance(x, Interval) or isinstance(y, Interval):
        return as_interval(x) - as_interval(y)
    return x - y


def _norm_at(a, b, t: Fraction) -> Interval:
    if b is None:
        vec = a
    else:
        vec = tuple(_add(x, _mul(y, t)) for x, y in zip(a, b))
    if all(isinstance(v, Fraction) for v in vec):
        sq = sum(v * v for v in vec)
        return Interval.exact(sq).sqrt()
    total = Interval(0.0)
    for v in vec:
        total = total + as_interval(v).square()
    return total.sqrt()


def _derivative_at(a, b, t: Fraction, value: Interval) -> Interval:
    vec = tuple(_add(x, _mul(y, t)) for x, y in zip(a, b))
    dot = Interval(0.0)
    for v, w in zip(vec, b):
        dot = dot + as_interval(v) * as_interval(w)
    if value.lo <= 0:
        speed = Interval(0.0)
        for w in b:
            speed = speed + as_interval(w).square()
        s = speed.sqrt()
        return Interval(-s.hi, s.hi)
    return dot / value


def _add(x, y):
    if isinstance(x, Interval) or isinstance(y, Interval):
        return as_interval(x) + as_interval(y)
    return x + y


def _mul(x, y):
    if isinstance(x, Interval) or isinstance(y, Interval):
        return as_interval(x) * as_interval(y)
    return x * y


def _convex_piece(a, b, t0: Fraction, t1: Fraction, share: float, budget) -> Interval:
    """Integral of |a + b t| exp(-|t|)/2 on [t0, t1] between tangent and chord bounds."""
    if b is None or all((isinstance(x, Fraction) and x == 0) for x in b):
        value = _norm_at(a, None, t0)
        weight = _lin_exp_integral(Fraction(1), Fraction(0), t0, t1)
        return weight * value
    if t0 < 0 < t1:
        return _convex_piece(a, b, t0, Fraction(0), share / 2, budget) + _convex_piece(a, b, Fraction(0), t1, share / 2, budget)
    f0 = _norm_at(a, b, t0)
    f1 = _norm_at(a, b, t1)
    tm = (t0 + t1) / 2
    fm = _norm_at(a, b, tm)
    upper_a, upper_b = _linear_through(t0, Fraction(f0.hi), t1, Fraction(f1.hi))
    upper = _lin_exp_integral(upper_a, upper_b, t0, t1)
    slope = _derivative_at(a, b, tm, fm)
    s_mid = Fraction(slope.mid)
    rad = Fraction(slope.radius) + abs(Fraction(slope.mid) - s_mid)
    base = Fraction(fm.lo)
    left_b = s_mid + rad
    right_b = s_mid - rad
    lower = _lin_exp_integral(base - left_b * tm, left_b, t0, tm) + _lin_exp_integral(base - right_b * tm, right_b, tm, t1)
    result = Interval(max(0.0, lower.lo), upper.hi)
    if result.hi - result.lo <= share or budget[0] <= 0:
        return result
    budget[0] -= 1
    return _convex_piece(a, b, t0, tm, share / 2, budget) + _convex_piece(a, b, tm, t1, share / 2, budget)


# ---------------------------------------------------------------------------
# foliated distance
# ---------------------------------------------------------------------------


@dataclass
class FoliatedResult:
    enclosure: Enclosure
    argmin: Fraction
    evaluations: int


def fol_fs_dist(c, c_prime, alpha, tol: float = 1e-3, stop_below=None, stop_above=None) -> FoliatedResult:
    """Enclosure of min over t in [-alpha, alpha] of d_FS(flow(c, t), c').

    Branch and bound on t: d_FS(flow(c, t), c') is 1-Lipschitz in t, so an
    evaluation at the centre of a sub-interval of half-width h bounds the
    minimum on that sub-interval from below by value - h.  ``stop_below`` and
    ``stop_above`` end the search as soon as the predicate against that
    threshold is decided.
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    alpha = Fraction(alpha)
    if c.is_constant and c_prime.is_constant:
        enc = dist_fs(c, c_prime, tol)
        return FoliatedResult(enc, Fraction(0), 1)
    eval_tol = tol / 4
    evaluations = 0

    def value(t):
        nonlocal evaluations
        evaluations += 1
        return dist_fs(c.flow(t), c_prime, eval_tol)

    pieces = 4
    half = alpha / pieces
    heap = []
    best_hi = math.inf
    best_t = Fraction(0)
    centers = [-alpha + half * (2 * i + 1) for i in range(pieces)] if alpha > 0 else [Fraction(0)]
    if alpha == 0:
        half = Fraction(0)
    for t in centers:
        enc = value(t)
        heapq.heappush(heap, (enc.lo - float(half), t, half, enc.hi))
        if enc.hi < best_hi:
            best_hi, best_t = enc.hi, t
    while heap:
        lb, t, h, hi_val = heap[0]
        if stop_below is not None and best_hi < stop_below:
            break
        if stop_above is not None and lb >= stop_above:
            break
        if best_hi - lb <= tol or h == 0:
            break
        heapq.heappop(heap)
        h2 = h / 2
        for tc in (t - h2, t + h2):
            enc = value(tc)
            heapq.heappush(heap, (enc.lo - float(h2), tc, h2, enc.hi))
            if enc.hi < best_hi:
                best_hi, best_t = enc.hi, tc
    lower = max(0.0, min(item[0] for item in heap)) if heap else 0.0
    return FoliatedResult(Enclosure(min(lower, best_hi), best_hi), best_t, evaluations)


def fol_fs_check(c, c_prime, alpha, delta, tol: float = 1e-3) -> str:
    """Decide fol_FS(c, c') < (alpha, delta): "true", "false" or "inconclusive"."""
    delta = float(delta)
    result = fol_fs_dist(c, c_prime, alpha, tol, stop_below=delta, stop_above=delta)
    if result.enclosure.hi < delta:
        return "true"
    if result.enclosure.lo >= delta:
        return "false"
    return "inconclusive"


# ---------------------------------------------------------------------------
# periodicity
# ---------------------------------------------------------------------------


@dataclass
class PeriodInfo:
    tau: Optional[Fraction]
    translation_witness: object = None
    stabilizer_elements: list = field(default_factory=list)
    translation_values: list = field(default_factory=list)
    inconclusive: bool = False
    subgroup: object = None

    @property
    def is_periodic(self) -> bool:
        return self.tau is not None


def same_path(c, d, lo: Fraction, hi: Fraction) -> bool:
    """Exact agreement of two tree or Euclidean paths on [lo, hi] (breakpoint-wise)."""
    times = set(c.breaks(lo, hi)) | set(d.breaks(lo, hi)) | {lo, hi, (lo + hi) / 2}
    times = sorted(times)
    mids = [(a + b) / 2 for a, b in zip(times, times[1:])]
    for t in times + mids:
        if c.at(t) != d.at(t):
            return False
    return True


def _signed_shift(c, gx0, reach: Fraction):
    """Times t with c(t) == gx0 among t = +-d(c(0), gx0)."""
    space = c.space
    d = space.distance(c.at(Fraction(0)), gx0)
    out = []
    for t in ([d, -d] if d else [Fraction(0)]):
        if abs(t) <= reach and c.at(t) == gx0:
            out.append(t)
    return out


def periodicity(c, group, t_max, budget: int = 100000, precision: int = 3, compare_window=None) -> PeriodInfo:
    """All (g, t) with g c = flow(c, t), |t| <= t_max, g in the searched ball."""
    t_max = Fraction(t_max)
    space = c.space
    if isinstance(c, Segment) and c.is_constant:
        # a constant geodesic is moved only onto constants, so no positive flow is a translate
        stabilizer = group.stabilizer(c.start, precision).enumerate_compact(precision)
        return PeriodInfo(None, None, stabilizer, [Fraction(0)], False)
    window = Fraction(compare_window) if compare_window is not None else t_max + 2
    beta = _search_radius(group, c, t_max)
    try:
        candidates = group.ball(beta, precision, budget)
    except Exception as exc:  # budget or depth limits make the search inconclusive
        info = PeriodInfo(None, inconclusive=True)
        info.note = str(exc)
        return info
    found = []
    origin = c.at(Fraction(0))
    for g in candidates:
        try:
            gx0 = space.act(g, origin)
            shifts = _signed_shift(c, gx0, t_max)
            if not shifts:
                continue
            gc = c.translate(group, g)
            for t in shifts:
                if same_path(gc, c.flow(t), -window, window):
                    found.append((t, g))
        except DepthError:
            continue
    stabilizer = [g for t, g in found if t == 0]
    positives = sorted({t for t, _ in found if t > 0})
    values = sorted({t for t, _ in found})
    if not positives:
        return PeriodInfo(None, None, stabilizer, values, False)
    tau = positives[0]
    witnesses = sorted((g for t, g in found if t == tau), key=lambda g: (group.norm(g), group.sort_key(g)))
    return PeriodInfo(tau, witnesses[0], stabilizer, values, False)


def _search_radius(group, c, t_max):
    origin = c.at(Fraction(0))
    base = group.space.base_point
    offset = group.space.distance(origin, base)
    offset = as_interval(offset).hi if isinstance(offset, Interval) else offset
    return Fraction(t_max) + 2 * Fraction(offset) + 2 + Fraction(1, 2)


def geodesic_subgroup(c, group, info: PeriodInfo, precision: int = 3, window=None):
    """V_c descriptor (or K_c when c is not periodic) for a tree or Euclidean path."""
    from .groups import CvcySubgroup

    space = c.space
    reach = Fraction(window) if window is not None else (info.tau or Fraction(0)) + 4
    origin = c.at(Fraction(0))

    def fixes_c(g):
        try:
            return same_path(c.translate(group, g), c, -reach, reach)
        except DepthError:
            return False

    point_stab = group.stabilizer(origin, precision)

    def enumerate_compact(n):
        return [g for g in point_stab.enumerate_compact(n) if fixes_c(g)]

    label = f"V[{c.literal()}]" if info.is_periodic else f"K[{c.literal()}]"
    if not info.is_periodic:
        return CvcySubgroup(label, group, fixes_c, enumerate_compact)

    def exponents(g):
        try:
            gx0 = space.act(g, origin)
        except DepthError:
            return []
        out = []
        for t in _signed_shift(c, gx0, Fraction(10**6)):
            if t % info.tau == 0:
                out.append(int(t / info.tau))
        return out

    return CvcySubgroup(label, group, fixes_c, enumerate_compact, info.translation_witness, exponents)


# ---------------------------------------------------------------------------
# assumption probe
# ---------------------------------------------------------------------------


@dataclass
class ProbeRow:
    center: int
    radius: Fraction
    checked: int
    failures: list
    excluded: int


def assumption_probe(sample, group, ell, radii, t_max=None, precision: int = 3, tol: float = 1e-2,
                     budget: int = 100000) -> list:
    """Check V_c inside V_{c0} for sampled periodic c near each c0 with tau_c <= ell."""
    ell = Fraction(ell)
    t_max = Fraction(t_max) if t_max is not None else ell
    infos = [periodicity(c, group, t_max, budget, precision) for c in sample]
    subgroups = [geodesic_subgroup(c, group, info, precision) for c, info in zip(sample, infos)]
    rows = []
    for i, c0 in enumerate(sample):
        dists = [dist_fs(c0, c, tol) for c in sample]
        for radius in radii:
            radius = Fraction(radius)
            failures = []
            checked = 0
            excluded = 0
            for j, c in enumerate(sample):
                if dists[j].lo >= float(radius):
                    continue
                info = infos[j]
                if info.inconclusive:
                    excluded += 1
                    continue
                if not info.is_periodic or info.tau > ell:
                    continue
                checked += 1
                V0 = subgroups[i]
                gens = [info.translation_witness] + subgroups[j].enumerate_compact(precision)
                bad = [g for g in gens if not V0.contains(g)]
                if bad:
                    failures.append((j, group.literal(bad[0])))
            rows.append(ProbeRow(i, radius, checked, failures, excluded))
    return rows
