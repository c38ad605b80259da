"""Desk-scale CAT(0) model spaces.

Shipped models: Euclidean space, finite weighted metric trees, the Cayley tree
of a free group, the Bruhat-Tits tree of SL2(Q_p) cut off at a depth bound,
and a circle used only as a non-proper negative control.

Tree points are stored as ``TreePoint(vertex, up)``: the point at distance
``up`` from ``vertex`` toward its parent, with ``0 <= up < edge_length``.  The
root always has ``up == 0``, so each point has exactly one representation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable

from .intervals import Interval, as_interval
from .padic import INFINITE_VALUATION, residue, valuation


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class DepthError(DomainError):
    """A Bruhat-Tits computation left the depth-bounded part of the tree."""


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EuclideanPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(_exactify(c) for c in self.coords))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coords)

    def literal(self) -> str:
        if not self.is_exact:
            return "(" + ",".join(f"[{c.lo},{c.hi}]" for c in map(as_interval, self.coords)) + ")"
        return "(" + ",".join(_qtext(c) for c in self.coords) + ")"


@dataclass(frozen=True, order=True)
class TreePoint:
    vertex: Hashable
    up: Fraction = Fraction(0)

    def literal(self) -> str:
        return f"{_vertex_text(self.vertex)}+{_qtext(self.up)}"


@dataclass(frozen=True)
class CirclePoint:
    angle: Fraction

    def literal(self) -> str:
        return f"angle {_qtext(self.angle)}"


def _exactify(c):
    if isinstance(c, Interval):
        return c
    if isinstance(c, float):
        return Fraction(c)
    return Fraction(c)


def _qtext(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _vertex_text(v) -> str:
    if isinstance(v, tuple) and all(isinstance(x, int) for x in v) and v and abs(v[0]) <= 26:
        return "".join(_letter(x) for x in v) if v else "e"
    return str(v)


def _letter(x: int) -> str:
    base = chr(ord("a") + abs(x) - 1)
    return base if x > 0 else base.upper()


def _fraction_sqrt(q: Fraction):
    """Exact square root of a rational when it is a rational square."""
    if q < 0:
        raise DomainError("negative squared distance")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------


class ModelSpace:
    kind = "abstract"
    base_point = None

    def distance(self, x, y):
        raise NotImplementedError

    def point_along(self, x, y, s):
        """Point at distance ``s`` from ``x`` on the geodesic segment to ``y``."""
        raise NotImplementedError

    def act(self, g, x):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def check(self, x) -> None:
        if not self.contains(x):
            raise DomainError(f"point {x!r} does not belong to {self.kind}")

    def random_point(self, rng: random.Random, radius: int):
        raise NotImplementedError

    def describe(self) -> str:
        return self.kind


class EuclideanSpace(ModelSpace):
    kind = "euclidean"

    def __init__(self, dim: int):
        if dim < 1:
            raise DomainError("dimension must be positive")
        self.dim = dim
        self.base_point = EuclideanPoint((0,) * dim)

    def describe(self) -> str:
        return f"euclidean dim={self.dim}"

    def point(self, *coords) -> EuclideanPoint:
        return EuclideanPoint(tuple(coords))

    def contains(self, x) -> bool:
        return isinstance(x, EuclideanPoint) and len(x.coords) == self.dim

    def squared_distance(self, x, y):
        if x.is_exact and y.is_exact:
            return sum((a - b) ** 2 for a, b in zip(x.coords, y.coords))
        total = Interval(0.0)
        for a, b in zip(x.coords, y.coords):
            total = total + (as_interval(a) - as_interval(b)).square()
        return total

    def distance(self, x, y):
        self.check(x)
        self.check(y)
        sq = self.squared_distance(x, y)
        if isinstance(sq, Fraction):
            root = _fraction_sqrt(sq)
            if root is not None:
                return root
            return Interval.exact(sq).sqrt()
        return sq.sqrt()

    def point_along(self, x, y, s):
        d = self.distance(x, y)
        if isinstance(d, Fraction) and d == 0:
            return x
        if isinstance(d, Fraction) and isinstance(s, Fraction):
            ratio = s / d
            return EuclideanPoint(tuple(a + ratio * (b - a) for a, b in zip(x.coords, y.coords)))
        ratio = as_interval(s) / as_interval(d)
        return EuclideanPoint(
            tuple(as_interval(a) + ratio * (as_interval(b) - as_interval(a)) for a, b in zip(x.coords, y.coords))
        )

    def act(self, g, x):
        vector = getattr(g, "vector", None)
        if vector is None or len(vector) != self.dim:
            raise DomainError("only translations of matching dimension act on euclidean space")
        return EuclideanPoint(tuple(a + v for a, v in zip(x.coords, vector)))

    def random_point(self, rng, radius, denominator: int = 8):
        return EuclideanPoint(
            tuple(Fraction(rng.randint(-radius * denominator, radius * denominator), denominator) for _ in range(self.dim))
        )


class Circle(ModelSpace):
    """Circle of rational circumference; a non-proper negative control only."""

    kind = "circle"

    def __init__(self, circumference):
        self.circumference = Fraction(circumference)
        if self.circumference <= 0:
            raise DomainError("circumference must be positive")
        self.base_point = CirclePoint(Fraction(0))

    def describe(self) -> str:
        return f"circle circumference={_qtext(self.circumference)}"

    def point(self, angle) -> CirclePoint:
        return CirclePoint(Fraction(angle) % self.circumference)

    def contains(self, x) -> bool:
        return isinstance(x, CirclePoint) and 0 <= x.angle < self.circumference

    def distance(self, x, y):
        delta = (x.angle - y.angle) % self.circumference
        return min(delta, self.circumference - delta)

    def point_along(self, x, y, s):
        forward = (y.angle - x.angle) % self.circumference
        sign = 1 if forward <= self.circumference - forward else -1
        return self.point(x.angle + sign * Fraction(s))

    def act(self, g, x):
        angle = getattr(g, "angle", None)
        if angle is None:
            raise DomainError("only rotations act on the circle")
        return self.point(x.angle + angle)

    def random_point(self, rng, radius, denominator: int = 64):
        return self.point(Fraction(rng.randrange(int(self.circumference * denominator)), denominator))


class RootedTree(ModelSpace):
    """Shared geometry of rooted metric trees.

    Subclasses provide ``root``, ``parent``, ``edge_length`` (of the edge from
    a vertex to its parent), ``depth`` (edge count to the root), ``height``
    (metric distance to the root) and ``neighbors``.
    """

    kind = "tree"
    unit_edges = False
    root: Hashable

    # combinatorics supplied by subclasses
    def parent(self, v):
        raise NotImplementedError

    def edge_length(self, v) -> Fraction:
        raise NotImplementedError

    def depth(self, v) -> int:
        raise NotImplementedError

    def height(self, v) -> Fraction:
        raise NotImplementedError

    def neighbors(self, v) -> list:
        raise NotImplementedError

    def has_vertex(self, v) -> bool:
        raise NotImplementedError

    # generic algorithms
    @property
    def base_point(self):
        return TreePoint(self.root, Fraction(0))

    def vertex_point(self, v) -> TreePoint:
        return TreePoint(v, Fraction(0))

    def ancestor(self, v, steps: int):
        for _ in range(steps):
            v = self.parent(v)
        return v

    def lca(self, v, w):
        dv, dw = self.depth(v), self.depth(w)
        if dv > dw:
            v = self.ancestor(v, dv - dw)
        elif dw > dv:
            w = self.ancestor(w, dw - dv)
        while v != w:
            v, w = self.parent(v), self.parent(w)
        return v

    def contains(self, x) -> bool:
        if not isinstance(x, TreePoint) or not self.has_vertex(x.vertex):
            return False
        if x.vertex == self.root:
            return x.up == 0
        return 0 <= x.up < self.edge_length(x.vertex)

    def point_height(self, p: TreePoint) -> Fraction:
        return self.height(p.vertex) - p.up

    def make_point(self, v, up) -> TreePoint:
        """Canonical point at distance ``up`` above ``v`` (may pass vertices)."""
        return self.climb(TreePoint(v, Fraction(0)), Fraction(up))

    def meet_height(self, p: TreePoint, q: TreePoint) -> Fraction:
        v, w = p.vertex, q.vertex
        if v == w:
            return min(self.point_height(p), self.point_height(q))
        a = self.lca(v, w)
        if a != v and a != w:
            return self.height(a)
        return min(self.point_height(p), self.point_height(q))

    def distance(self, x, y) -> Fraction:
        self.check(x)
        self.check(y)
        return self._distance(x, y)

    def _distance(self, x, y) -> Fraction:
        hx, hy = self.point_height(x), self.point_height(y)
        return hx + hy - 2 * self.meet_height(x, y)

    def climb(self, p: TreePoint, amount) -> TreePoint:
        """Move ``p`` toward the root by ``amount`` (stopping at the root)."""
        amount = Fraction(amount)
        if amount < 0:
            raise DomainError("climb amount must be nonnegative")
        v, up = p.vertex, p.up
        if self.unit_edges:
            total = up + amount
            if total >= self.depth(v):
                return TreePoint(self.root, Fraction(0))
            steps = math.floor(total)
            return TreePoint(self.ancestor(v, steps), total - steps)
        while amount > 0:
            if v == self.root:
                return TreePoint(v, Fraction(0))
            remaining = self.edge_length(v) - up
            if amount < remaining:
                return TreePoint(v, up + amount)
            amount -= remaining
            v, up = self.parent(v), Fraction(0)
        return TreePoint(v, up)

    def point_along(self, x, y, s) -> TreePoint:
        s = Fraction(s)
        hx, hy = self.point_height(x), self.point_height(y)
        hm = self.meet_height(x, y)
        d = hx + hy - 2 * hm
        if s <= 0:
            return x
        if s >= d:
            return y
        first_leg = hx - hm
        if s <= first_leg:
            return self.climb(x, s)
        return self.climb(y, d - s)

    def ball_vertices(self, center, radius: int) -> list:
        """Vertices within ``radius`` edges of ``center`` (breadth first)."""
        seen = {center: 0}
        order = [center]
        frontier = [center]
        for r in range(1, radius + 1):
            nxt = []
            for v in frontier:
                for w in self.neighbors(v):
                    if w not in seen:
                        seen[w] = r
                        order.append(w)
                        nxt.append(w)
            frontier = nxt
        return order

    def random_point(self, rng, radius, denominator: int = 4):
        v = self.root
        for _ in range(rng.randint(0, radius)):
            options = [w for w in self.neighbors(v) if self.depth(w) > self.depth(v)]
            if not options:
                break
            v = rng.choice(options)
        if v == self.root:
            return TreePoint(v, Fraction(0))
        length = self.edge_length(v)
        k = rng.randrange(denominator)
        return TreePoint(v, length * Fraction(k, denominator))


class MetricTree(RootedTree):
    """Finite tree with positive rational edge weights."""

    kind = "metric-tree"

    def __init__(self, edges: Iterable, root=None):
        edges = [(u, v, Fraction(w)) for u, v, w in edges]
        if not edges:
            raise DomainError("a metric tree needs at least one edge")
        adjacency: dict = {}
        for u, v, w in edges:
            if w <= 0:
                raise DomainError(f"edge {u}-{v} has nonpositive weight")
            adjacency.setdefault(u, []).append((v, w))
            adjacency.setdefault(v, []).append((u, w))
        self.root = edges[0][0] if root is None else root
        self._parent = {self.root: None}
        self._length = {self.root: Fraction(0)}
        self._depth = {self.root: 0}
        self._height = {self.root: Fraction(0)}
        order = [self.root]
        for v in order:
            for w, weight in adjacency[v]:
                if w == self._parent[v]:
                    continue
                if w in self._parent:
                    raise DomainError("edge list contains a cycle")
                self._parent[w] = v
                self._length[w] = weight
                self._depth[w] = self._depth[v] + 1
                self._height[w] = self._height[v] + weight
                order.append(w)
        if len(order) != len(adjacency) or len(edges) != len(adjacency) - 1:
            raise DomainError("edge list is not a connected tree")
        self._adjacency = {v: [w for w, _ in ws] for v, ws in adjacency.items()}
        self.vertices = order
        self.edges = edges

    def describe(self) -> str:
        return f"metric-tree vertices={len(self.vertices)}"

    def has_vertex(self, v) -> bool:
        return v in self._parent

    def parent(self, v):
        return self._parent[v]

    def edge_length(self, v) -> Fraction:
        return self._length[v]

    def depth(self, v) -> int:
        return self._depth[v]

    def height(self, v) -> Fraction:
        return self._height[v]

    def neighbors(self, v) -> list:
        return list(self._adjacency[v])

    def act(self, g, x):
        if getattr(g, "is_identity", False):
            return x
        raise DomainError("metric trees carry only the trivial action")


def reduce_word(letters) -> tuple:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class CayleyTree(RootedTree):
    """Cayley graph of the free group of given rank; vertices are reduced words."""

    kind = "cayley-tree"
    unit_edges = True

    def __init__(self, rank: int = 2):
        if rank < 1:
            raise DomainError("rank must be positive")
        self.rank = rank
        self.root = ()

    def describe(self) -> str:
        return f"cayley-tree rank={self.rank}"

    def has_vertex(self, v) -> bool:
        if not isinstance(v, tuple):
            return False
        if any(not isinstance(x, int) or x == 0 or abs(x) > self.rank for x in v):
            return False
        return all(v[i] != -v[i + 1] for i in range(len(v) - 1))

    def parent(self, v):
        return v[:-1]

    def ancestor(self, v, steps: int):
        return v[: max(0, len(v) - steps)]

    def edge_length(self, v) -> Fraction:
        return Fraction(1)

    def depth(self, v) -> int:
        return len(v)

    def height(self, v) -> Fraction:
        return Fraction(len(v))

    def lca(self, v, w):
        n = 0
        for a, b in zip(v, w):
            if a != b:
                break
            n += 1
        return v[:n]

    def letters(self) -> list[int]:
        out = []
        for i in range(1, self.rank + 1):
            out += [i, -i]
        return out

    def neighbors(self, v) -> list:
        out = [v[:-1]] if v else []
        for x in self.letters():
            if not v or v[-1] != -x:
                out.append(v + (x,))
        return out

    def act(self, g, x: TreePoint) -> TreePoint:
        letters = getattr(g, "letters", None)
        if letters is None:
            raise DomainError("only free-group words act on the Cayley tree")
        gv = reduce_word(letters + x.vertex)
        if x.up == 0:
            return TreePoint(gv, Fraction(0))
        gp = reduce_word(letters + x.vertex[:-1])
        if gp == gv[:-1]:
            return TreePoint(gv, x.up)
        return TreePoint(gp, 1 - x.up)


class BruhatTitsTree(RootedTree):
    """Bruhat-Tits tree of SL2(Q_p) out to a depth bound.

    A vertex ``(a, b, c)`` is the homothety class of the lattice spanned by the
    columns ``(p**a, 0)`` and ``(c, p**b)``, normalized to be primitive in
    ``Z_p**2`` with ``0 <= c < p**a``.  Its distance to the root is ``a + b``.
    """

    kind = "bruhat-tits"
    unit_edges = True

    def __init__(self, p: int = 2, depth_bound: int = 8, precision: int | None = None):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise DomainError(f"{p} is not a prime")
        if depth_bound < 1:
            raise DomainError("depth bound must be positive")
        self.p = p
        self.depth_bound = depth_bound
        self.precision = depth_bound + 4 if precision is None else precision
        self.root = (0, 0, 0)

    def describe(self) -> str:
        return f"bruhat-tits p={self.p} depth={self.depth_bound} precision={self.precision}"

    def has_vertex(self, v) -> bool:
        if not (isinstance(v, tuple) and len(v) == 3):
            return False
        a, b, c = v
        if a < 0 or b < 0 or a + b > self.depth_bound or not 0 <= c < self.p**a:
            return False
        if a == 0:
            return c == 0
        return b == 0 or c % self.p != 0

    def parent(self, v):
        a, b, c = v
        if a >= 1:
            return (a - 1, b, c % self.p ** (a - 1))
        if b >= 1:
            return (0, b - 1, 0)
        return None

    def children(self, v) -> list:
        a, b, c = v
        p = self.p
        out = []
        for j in range(p):
            cc = c + j * p**a
            if b >= 1 and a == 0 and j == 0:
                continue
            out.append((a + 1, b, cc))
        if a == 0:
            out.append((0, b + 1, 0))
        return out

    def edge_length(self, v) -> Fraction:
        return Fraction(1)

    def depth(self, v) -> int:
        return v[0] + v[1]

    def height(self, v) -> Fraction:
        return Fraction(v[0] + v[1])

    def neighbors(self, v) -> list:
        out = [] if v == self.root else [self.parent(v)]
        if self.depth(v) < self.depth_bound:
            out += self.children(v)
        return out

    def vertex_type(self, v) -> int:
        return self.depth(v) % 2

    def basis(self, v) -> tuple:
        """Column basis ((p**a, 0), (c, p**b)) as a 2x2 row-major tuple."""
        a, b, c = v
        p = Fraction(self.p)
        return ((p**a, Fraction(c)), (Fraction(0), p**b))

    def lattice_class(self, m) -> tuple:
        """Canonical vertex of the lattice spanned by the columns of ``m``."""
        p = self.p
        (x1, y1), (x2, y2) = m
        col1 = [Fraction(x1), Fraction(x2)]
        col2 = [Fraction(y1), Fraction(y2)]
        if col1[1] == 0 and col2[1] == 0:
            raise DomainError("degenerate lattice")
        if valuation(col1[1], p) < valuation(col2[1], p):
            col1, col2 = col2, col1
        if col1[1] != 0:
            ratio = col1[1] / col2[1]
            col1 = [col1[0] - ratio * col2[0], Fraction(0)]
        x, y, z = col1[0], col2[0], col2[1]
        if x == 0:
            raise DomainError("degenerate lattice")
        vx, vz = valuation(x, p), valuation(z, p)
        unit_z = z / Fraction(p) ** vz
        y = y / unit_z
        vy = valuation(y, p) if y != 0 else INFINITE_VALUATION
        m_min = min(vx, vz, vy)
        a, b = vx - m_min, vz - m_min
        if a + b > self.depth_bound:
            raise DepthError(f"lattice class at depth {a + b} exceeds bound {self.depth_bound}")
        c = residue(y / Fraction(p) ** m_min, p, a) if a > 0 else 0
        return (a, b, c)

    def act_vertex(self, g, v):
        entries = getattr(g, "entries", None)
        if entries is None:
            raise DomainError("only 2x2 matrices act on the Bruhat-Tits tree")
        (g11, g12), (g21, g22) = entries
        (b11, b12), (b21, b22) = self.basis(v)
        prod = (
            (g11 * b11 + g12 * b21, g11 * b12 + g12 * b22),
            (g21 * b11 + g22 * b21, g21 * b12 + g22 * b22),
        )
        return self.lattice_class(prod)

    def act(self, g, x: TreePoint) -> TreePoint:
        gv = self.act_vertex(g, x.vertex)
        if x.up == 0:
            return TreePoint(gv, Fraction(0))
        gp = self.act_vertex(g, self.parent(x.vertex))
        if gv != self.root and self.parent(gv) == gp:
            return TreePoint(gv, x.up)
        return TreePoint(gp, 1 - x.up)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def distance(space: ModelSpace, x, y):
    return space.distance(x, y)


def geodesic(space: ModelSpace, x, y):
    """Generalized geodesic from x to y: x before time 0, y after d(x, y)."""
    from .flow_space import Segment

    space.check(x)
    space.check(y)
    return Segment(space, x, y, Fraction(0))


def radial_projection(space: ModelSpace, b, R, x):
    R = Fraction(R)
    if R < 0:
        raise DomainError("radius must be nonnegative")
    d = space.distance(b, x)
    if isinstance(d, Interval):
        if d.hi <= R:
            return x
        if d.lo > R:
            return space.point_along(b, x, R)
        raise DomainError("projection radius coincides with an inexact distance")
    if d <= R:
        return x
    return space.point_along(b, x, R)


def act(space: ModelSpace, g, x):
    space.check(x)
    return space.act(g, x)


@dataclass(frozen=True)
class ComparisonConfig:
    r_short: Fraction
    r_long: Fraction
    alpha: Fraction
    L: Fraction

    def __post_init__(self):
        for name in ("r_short", "r_long", "alpha", "L"):
            value = Fraction(getattr(self, name))
            if value <= 0:
                raise DomainError(f"{name} must be positive")
            object.__setattr__(self, name, value)
        if self.r_long <= self.alpha:
            raise DomainError("r_long must exceed alpha")

    @property
    def T(self) -> Fraction:
        return self.r_short + self.r_long

    @property
    def R(self) -> Fraction:
        return self.r_long + 2 * self.r_short + self.alpha

    @property
    def gap_bound(self) -> Fraction:
        return 2 * self.alpha * (self.L + 2 * self.r_short + 2 * self.alpha) / self.r_long


def _segment_point(space, start, end, s):
    """Point at time s on the generalized geodesic from start to end."""
    d = space.distance(start, end)
    if isinstance(d, Interval) or isinstance(s, Interval):
        s_int, d_int = as_interval(s), as_interval(d)
        lo = min(max(s_int.lo, 0.0), d_int.lo)
        hi = min(max(s_int.hi, 0.0), d_int.hi)
        clamped = Interval(lo, max(lo, hi))
        return space.point_along(start, end, clamped)
    return space.point_along(start, end, min(max(s, Fraction(0)), d))


def comparison_gap(space: ModelSpace, cfg: ComparisonConfig, x, x1, x2, t):
    """d(c_{x1,x}(T + tau + t), c_{x2,x}(T + t)) with tau = d(x, x1) - d(x, x2)."""
    t = Fraction(t)
    d12 = space.distance(x1, x2)
    d1 = space.distance(x1, x)
    if _lower(d12) > cfg.alpha:
        raise DomainError("d(x1, x2) exceeds alpha")
    if _lower(d1) > cfg.R + cfg.L:
        raise DomainError("d(x1, x) exceeds R + L")
    if abs(t) > cfg.r_short:
        raise DomainError("t outside [-r', r']")
    d2 = space.distance(x2, x)
    if isinstance(d1, Fraction) and isinstance(d2, Fraction):
        tau = d1 - d2
        p1 = _segment_point(space, x1, x, cfg.T + tau + t)
    else:
        tau = as_interval(d1) - as_interval(d2)
        p1 = _segment_point(space, x1, x, tau + (cfg.T + t))
    p2 = _segment_point(space, x2, x, cfg.T + t)
    return space.distance(p1, p2)


def _upper(d) -> float:
    return d.hi if isinstance(d, Interval) else d


def _lower(d) -> float:
    return d.lo if isinstance(d, Interval) else d
