"""Desk models of td-groups acting on the model spaces.

* ``FreeGroup`` on its Cayley tree, word metric.
* ``TranslationLattice`` (Z^n) on Euclidean space, l1 word metric.
* ``RotationGroup`` (Z acting on a circle by a fixed angle), negative control.
* ``SL2Group`` over Q_p on the Bruhat-Tits tree, with entries carried as exact
  rationals and the metric D(g) = d(g x0, x0) + min(1, 2**-level(g)).

Subgroup descriptors (``CvcySubgroup``) couple a membership test for the
compact part with an enumerator of representatives, plus an optional cyclic
generator.  ``fol_v_check`` is the budgeted witness search for the V-foliated
distance predicate.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .model_spaces import (
    BruhatTitsTree,
    CayleyTree,
    Circle,
    DomainError,
    EuclideanSpace,
    TreePoint,
    reduce_word,
)
from .padic import INFINITE_VALUATION, from_digits, residue, valuation
from .intervals import as_interval, parse_fraction


class BudgetError(RuntimeError):
    """An enumeration would exceed its configured budget."""


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", reduce_word(tuple(self.letters)))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def literal(self) -> str:
        if not self.letters:
            return "e"
        return "".join(_letter(x) for x in self.letters)

    def sort_key(self):
        return (len(self.letters), self.literal())


@dataclass(frozen=True)
class Translation:
    vector: tuple

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(Fraction(v) for v in self.vector))

    @property
    def is_identity(self) -> bool:
        return all(v == 0 for v in self.vector)

    def __mul__(self, other: "Translation") -> "Translation":
        return Translation(tuple(a + b for a, b in zip(self.vector, other.vector)))

    def inverse(self) -> "Translation":
        return Translation(tuple(-a for a in self.vector))

    def literal(self) -> str:
        return "t(" + ",".join(_qtext(v) for v in self.vector) + ")"

    def sort_key(self):
        return (sum(abs(v) for v in self.vector), self.vector)


@dataclass(frozen=True)
class Rotation:
    steps: int
    step_angle: Fraction
    circumference: Fraction

    @property
    def angle(self) -> Fraction:
        return (self.steps * self.step_angle) % self.circumference

    @property
    def is_identity(self) -> bool:
        return self.steps == 0

    def __mul__(self, other: "Rotation") -> "Rotation":
        return Rotation(self.steps + other.steps, self.step_angle, self.circumference)

    def inverse(self) -> "Rotation":
        return Rotation(-self.steps, self.step_angle, self.circumference)

    def literal(self) -> str:
        return f"r^{self.steps}"

    def sort_key(self):
        return (abs(self.steps), self.steps)


@dataclass(frozen=True)
class PMatrix:
    """2x2 matrix of determinant 1 with entries in Q (dense in Q_p)."""

    entries: tuple
    p: int

    def __post_init__(self):
        (a, b), (c, d) = self.entries
        entries = ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))
        object.__setattr__(self, "entries", entries)
        if entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0] != 1:
            raise DomainError(f"matrix {entries} does not have determinant 1")

    @property
    def is_identity(self) -> bool:
        return self.entries == ((1, 0), (0, 1))

    def __mul__(self, other: "PMatrix") -> "PMatrix":
        (a, b), (c, d) = self.entries
        (e, f), (g, h) = other.entries
        return PMatrix(((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)), self.p)

    def inverse(self) -> "PMatrix":
        (a, b), (c, d) = self.entries
        return PMatrix(((d, -b), (-c, a)), self.p)

    def flat(self) -> tuple:
        return self.entries[0] + self.entries[1]

    def min_valuation(self) -> int:
        return min(valuation(x, self.p) for x in self.flat())

    def level(self) -> int:
        """Principal congruence level: largest n with g = I mod p**n in SL2(Z_p).

        -1 outside SL2(Z_p); INFINITE_VALUATION for the identity.
        """
        if self.min_valuation() < 0:
            return -1
        (a, b), (c, d) = self.entries
        return min(valuation(a - 1, self.p), valuation(b, self.p), valuation(c, self.p), valuation(d - 1, self.p))

    def literal(self) -> str:
        (a, b), (c, d) = self.entries
        return f"[[{_qtext(a)},{_qtext(b)}],[{_qtext(c)},{_qtext(d)}]]"

    def sort_key(self):
        return (tuple((x.denominator, abs(x.numerator), x.numerator) for x in self.flat()),)


def _qtext(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _letter(x: int) -> str:
    base = chr(ord("a") + abs(x) - 1)
    return base if x > 0 else base.upper()


# ---------------------------------------------------------------------------
# subgroup descriptors
# ---------------------------------------------------------------------------


@dataclass
class CvcySubgroup:
    """Compact subgroup, optionally extended by a cyclic generator."""

    label: str
    group: "Group"
    contains_compact: Callable
    enumerate_compact: Callable
    generator: Optional[object] = None
    exponent_of: Optional[Callable] = None

    @property
    def is_compact(self) -> bool:
        return self.generator is None

    def contains(self, g) -> bool:
        if self.generator is None:
            return self.contains_compact(g)
        for k in self.exponent_of(g):
            if self.contains_compact(self.group.mul(self.group.power(self.generator, -k), g)):
                return True
        return False

    def elements_within(self, beta, precision: int, budget: int):
        """Enumerated elements with D < beta, and whether the list is complete."""
        group = self.group
        compact = self.enumerate_compact(precision)
        if len(compact) > budget * 1000:
            raise BudgetError(f"compact part has {len(compact)} representatives")
        compact_radius = max(group.norm(c) for c in compact)
        out = []
        complete = True
        if self.generator is None:
            powers = [0]
        else:
            powers = [0]
            for k in range(1, budget + 1):
                powers += [k, -k]
            edge = min(group.norm(group.power(self.generator, budget + 1)),
                       group.norm(group.power(self.generator, -(budget + 1))))
            complete = edge - compact_radius >= beta
        for k in powers:
            hk = group.power(self.generator, k) if k else group.identity
            for c in compact:
                v = group.mul(hk, c)
                if group.norm(v) < beta:
                    out.append(v)
        return out, complete


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------


class Group:
    name = "abstract"
    is_discrete = True
    space = None
    identity = None

    def mul(self, g, h):
        return g * h

    def inverse(self, g):
        return g.inverse()

    def power(self, g, k: int):
        out = self.identity
        base = g if k >= 0 else self.inverse(g)
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def norm(self, g):
        raise NotImplementedError

    def dist(self, g, h):
        return self.norm(self.mul(self.inverse(g), h))

    def sort_key(self, g):
        return g.sort_key()

    def literal(self, g) -> str:
        return g.literal()

    def parse(self, text: str):
        raise NotImplementedError

    def ball(self, beta, precision: int = 3, budget: int = 100000) -> list:
        raise NotImplementedError

    def stabilizer(self, x, precision: int = 3) -> CvcySubgroup:
        raise NotImplementedError

    def near_transporters(self, p, q, radius) -> list:
        """Elements g, one per image point, with d(g p, q) <= radius."""
        raise NotImplementedError

    def coarsening(self, precision: int) -> Fraction:
        """Upper bound on D over the kernel of the coset coarsening."""
        return Fraction(0)

    def canonical_transporter(self, x):
        """Some g moving x to a fixed representative of its orbit (deterministic)."""
        raise DomainError(f"{self.name} has no canonical orbit representatives")

    def trivial_subgroup(self, label: str = "1") -> CvcySubgroup:
        return CvcySubgroup(label, self, lambda g: g.is_identity, lambda n: [self.identity])

    def check_member(self, g) -> None:
        raise NotImplementedError


class FreeGroup(Group):
    name = "free"

    def __init__(self, rank: int = 2):
        self.rank = rank
        self.space = CayleyTree(rank)
        self.identity = Word(())

    def check_member(self, g):
        if not isinstance(g, Word) or any(abs(x) > self.rank for x in g.letters):
            raise DomainError(f"{g!r} is not an element of the free group of rank {self.rank}")

    def generators(self) -> list:
        return [Word((x,)) for x in self.space.letters()]

    def norm(self, g) -> int:
        return len(g.letters)

    def parse(self, text: str) -> Word:
        text = text.strip()
        if text in ("e", "1", ""):
            return self.identity
        letters = []
        for ch in text:
            if not ch.isalpha():
                raise DomainError(f"bad letter {ch!r} in word {text!r}")
            index = ord(ch.lower()) - ord("a") + 1
            if index > self.rank:
                raise DomainError(f"letter {ch!r} exceeds rank {self.rank}")
            letters.append(index if ch.islower() else -index)
        return Word(tuple(letters))

    def ball(self, beta, precision: int = 3, budget: int = 100000) -> list:
        radius = math.ceil(beta) - 1
        count = 1 + sum(2 * self.rank * (2 * self.rank - 1) ** (k - 1) for k in range(1, radius + 1))
        if count > budget:
            raise BudgetError(f"free-group ball of radius {radius} has {count} elements")
        return [Word(v) for v in self.space.ball_vertices((), max(radius, 0))]

    def canonical_transporter(self, x: TreePoint) -> Word:
        """Move a vertex to e and an edge point onto the edge from e to a positive letter."""
        if x.up == 0:
            return Word(x.vertex).inverse()
        g = Word(x.vertex[:-1]).inverse()
        last = x.vertex[-1]
        if last < 0:
            g = Word((-last,)) * g
        return g

    def random_element(self, rng, length: int) -> Word:
        letters = []
        for _ in range(length):
            options = [x for x in self.space.letters() if not letters or letters[-1] != -x]
            letters.append(rng.choice(options))
        return Word(tuple(letters))

    def stabilizer(self, x, precision: int = 3) -> CvcySubgroup:
        return self.trivial_subgroup(f"stab({x.literal()})")

    def cyclic_subgroup(self, generator: Word, label: str | None = None) -> CvcySubgroup:
        gen = generator

        def exponents(g):
            n = len(gen.letters)
            if n == 0 or len(g.letters) % n:
                return []
            k = len(g.letters) // n
            return [k, -k] if k else [0]

        return CvcySubgroup(
            label or f"<{gen.literal()}>",
            self,
            lambda g: g.is_identity,
            lambda n: [self.identity],
            generator=gen,
            exponent_of=exponents,
        )

    def near_transporters(self, p: TreePoint, q: TreePoint, radius) -> list:
        tree = self.space
        reach = math.floor(radius) + 2
        out = []
        seen = set()
        if p.up == 0:
            anchor = p.vertex
        else:
            anchor = p.vertex[:-1]
        anchor_inverse = Word(anchor).inverse()
        for w in tree.ball_vertices(q.vertex, reach):
            g = Word(w) * anchor_inverse
            image = tree.act(g, p)
            if image in seen:
                continue
            seen.add(image)
            if tree.distance(image, q) <= radius:
                out.append(g)
        return out


class TranslationLattice(Group):
    name = "lattice"

    def __init__(self, dim: int):
        self.dim = dim
        self.space = EuclideanSpace(dim)
        self.identity = Translation((0,) * dim)

    def check_member(self, g):
        if not isinstance(g, Translation) or len(g.vector) != self.dim or any(v.denominator != 1 for v in g.vector):
            raise DomainError(f"{g!r} is not an element of Z^{self.dim}")

    def norm(self, g) -> Fraction:
        return sum(abs(v) for v in g.vector)

    def parse(self, text: str) -> Translation:
        text = text.strip()
        if text in ("e", "0"):
            return self.identity
        m = re.fullmatch(r"t\((.*)\)", text)
        if not m:
            raise DomainError(f"bad translation literal {text!r}")
        values = [parse_fraction(x) for x in m.group(1).split(",")]
        g = Translation(tuple(values))
        self.check_member(g)
        return g

    def ball(self, beta, precision: int = 3, budget: int = 100000) -> list:
        radius = math.ceil(beta) - 1
        out = []
        for vec in itertools.product(range(-radius, radius + 1), repeat=self.dim):
            if sum(abs(v) for v in vec) < beta:
                out.append(Translation(vec))
                if len(out) > budget:
                    raise BudgetError("lattice ball exceeds budget")
        return sorted(out, key=self.sort_key)

    def canonical_transporter(self, x) -> Translation:
        return Translation(tuple(-(c.numerator // c.denominator) for c in x.coords))

    def random_element(self, rng, length: int) -> Translation:
        return Translation(tuple(rng.randint(-length, length) for _ in range(self.dim)))

    def stabilizer(self, x, precision: int = 3) -> CvcySubgroup:
        return self.trivial_subgroup(f"stab({x.literal()})")

    def near_transporters(self, p, q, radius) -> list:
        radius = Fraction(radius) if not isinstance(radius, float) else Fraction(radius)
        shift = [b - a for a, b in zip(p.coords, q.coords)]
        ranges = [range(math.floor(s - radius), math.ceil(s + radius) + 1) for s in shift]
        out = []
        for vec in itertools.product(*ranges):
            if sum((v - s) ** 2 for v, s in zip(vec, shift)) <= radius * radius:
                out.append(Translation(vec))
        return out


class RotationGroup(Group):
    """Z acting on a circle by multiples of a fixed angle (non-proper control)."""

    name = "rotation"

    def __init__(self, step_angle, circumference=1):
        self.step_angle = Fraction(step_angle)
        self.space = Circle(circumference)
        self.identity = Rotation(0, self.step_angle, self.space.circumference)

    def element(self, k: int) -> Rotation:
        return Rotation(k, self.step_angle, self.space.circumference)

    def check_member(self, g):
        if not isinstance(g, Rotation):
            raise DomainError("not a rotation")

    def norm(self, g) -> int:
        return abs(g.steps)

    def parse(self, text: str) -> Rotation:
        m = re.fullmatch(r"r\^(-?\d+)", text.strip())
        if not m:
            raise DomainError(f"bad rotation literal {text!r}")
        return self.element(int(m.group(1)))

    def ball(self, beta, precision: int = 3, budget: int = 100000) -> list:
        radius = math.ceil(beta) - 1
        if 2 * radius + 1 > budget:
            raise BudgetError("rotation ball exceeds budget")
        return [self.element(k) for k in sorted(range(-radius, radius + 1), key=lambda k: (abs(k), k))]

    def stabilizer(self, x, precision: int = 3) -> CvcySubgroup:
        return self.trivial_subgroup("1")


class SL2Group(Group):
    """SL2(Q_p) acting on its Bruhat-Tits tree (depth bounded)."""

    name = "sl2"
    is_discrete = False

    def __init__(self, p: int = 2, depth_bound: int = 8, precision: int | None = None):
        self.p = p
        self.space = BruhatTitsTree(p, depth_bound, precision)
        self.identity = PMatrix(((1, 0), (0, 1)), p)
        self._k_cache: dict = {}
        self._neighbor_k = self._root_neighbor_movers()

    # -- basic structure ----------------------------------------------------
    def matrix(self, a, b, c, d) -> PMatrix:
        return PMatrix(((a, b), (c, d)), self.p)

    def diag(self, x) -> PMatrix:
        x = Fraction(x)
        return self.matrix(x, 0, 0, 1 / x)

    def check_member(self, g):
        if not isinstance(g, PMatrix) or g.p != self.p:
            raise DomainError("not an SL2 element over the configured prime")

    def displacement(self, g) -> int:
        """d(g x0, x0), exact and independent of the depth bound."""
        return -2 * min(g.min_valuation(), 0)

    def norm(self, g) -> Fraction:
        level = g.level()
        if level >= INFINITE_VALUATION:
            return Fraction(self.displacement(g))
        fix_term = Fraction(1) if level <= 0 else Fraction(1, 2**level)
        return self.displacement(g) + fix_term

    def coarsening(self, precision: int) -> Fraction:
        return Fraction(1, 2**precision)

    def parse(self, text: str) -> PMatrix:
        text = text.replace(" ", "")
        m = re.fullmatch(r"diag\(([^,]+),([^,]+)\)", text)
        if m:
            return self.matrix(_parse_entry(m.group(1), self.p), 0, 0, _parse_entry(m.group(2), self.p))
        m = re.fullmatch(r"\[\[([^,\]]+),([^,\]]+)\],\[([^,\]]+),([^,\]]+)\]\]", text)
        if m:
            return self.matrix(*(_parse_entry(x, self.p) for x in m.groups()))
        if text in ("e", "I"):
            return self.identity
        raise DomainError(f"bad matrix literal {text!r}")

    # -- congruence enumeration ---------------------------------------------
    def compact_representatives(self, precision: int) -> list:
        """Exact det-1 lifts of SL2(Z/p^n), coset representatives of K/Gamma(n)."""
        if precision in self._k_cache:
            return self._k_cache[precision]
        p, q = self.p, self.p**precision
        if q**3 > 5_000_000:
            raise BudgetError(f"precision {precision} gives too many congruence classes")
        reps = []
        for a, b, c, d in itertools.product(range(q), repeat=4):
            if (a * d - b * c) % q != 1 % q:
                continue
            if a % p:
                d_exact = Fraction(1 + b * c, a)
                g = self.matrix(a, b, c, d_exact)
            else:
                c_exact = Fraction(a * d - 1, b)
                g = self.matrix(a, b, c_exact, d)
            if (a, b, c, d) == (1 % q, 0, 0, 1 % q):
                g = self.identity
            reps.append(g)
        reps.sort(key=lambda g: (self.norm(g), self.sort_key(g)))
        self._k_cache[precision] = reps
        return reps

    def reduce_mod(self, g, precision: int) -> tuple:
        """Residues of the entries of g in SL2(Z_p) modulo p**precision."""
        return tuple(residue(x, self.p, precision) for x in g.flat())

    def vertex_transporter(self, v) -> PMatrix:
        """Element of SL2(Q_p) sending the canonical vertex of v's type to v."""
        p = Fraction(self.p)
        (b11, b12), (_, b22) = self.space.basis(v)
        depth = self.space.depth(v)
        if depth % 2 == 0:
            s = p ** (depth // 2)
            return self.matrix(b11 / s, b12 / s, 0, b22 / s)
        s = p ** ((depth - 1) // 2)
        # basis(v) * diag(1/p, 1) / s
        return self.matrix(b11 / (p * s), b12 / s, 0, b22 / s)

    def _root_neighbor_movers(self) -> dict:
        """k in SL2(Z) sending the canonical odd vertex (1,0,0) to each root neighbor."""
        movers = {}
        for j in range(self.p):
            movers[(1, 0, j)] = self.matrix(1, j, 0, 1)
        movers[(0, 1, 0)] = self.matrix(0, -1, 1, 0)
        return movers

    def edge_transporter(self, even, odd) -> PMatrix:
        """Element sending the canonical edge ((0,0,0),(1,0,0)) onto (even, odd)."""
        g0 = self.vertex_transporter(even)
        n = self.space.act_vertex(g0.inverse(), odd)
        return g0 * self._neighbor_k[n]

    def canonical_point(self, s: Fraction) -> TreePoint:
        """Representative of the orbit with parameter s (0 = even vertex, 1 = odd vertex)."""
        tree = self.space
        if s == 0:
            return tree.base_point
        child = tree.children(tree.root)[0]
        return TreePoint(child, Fraction(0) if s == 1 else 1 - Fraction(s))

    def canonical_transporter(self, x: TreePoint) -> PMatrix:
        return self.transporter(x, self.canonical_point(self.orbit_parameter(x)))

    def _edge_of(self, x: TreePoint):
        tree = self.space
        v, parent = x.vertex, tree.parent(x.vertex)
        if tree.vertex_type(v) == 0:
            return v, parent, x.up
        return parent, v, 1 - x.up

    def orbit_parameter(self, x: TreePoint) -> Fraction:
        """Distance from x to the nearest even vertex on its edge (orbit invariant)."""
        if x.up == 0:
            return Fraction(self.space.vertex_type(x.vertex))
        return self._edge_of(x)[2]

    def transporter(self, x: TreePoint, y: TreePoint) -> PMatrix:
        """Some g with g x = y; requires x and y in the same orbit."""
        if self.orbit_parameter(x) != self.orbit_parameter(y):
            raise DomainError("points lie in different orbits")
        return self._from_canonical(y) * self._from_canonical(x).inverse()

    def _from_canonical(self, x: TreePoint) -> PMatrix:
        if x.up == 0:
            return self.vertex_transporter(x.vertex)
        even, odd, _ = self._edge_of(x)
        return self.edge_transporter(even, odd)

    def near_transporters(self, p: TreePoint, q: TreePoint, radius) -> list:
        tree = self.space
        s = self.orbit_parameter(p)
        reach = min(math.floor(radius) + 2, tree.depth_bound)
        out = []
        seen = set()
        for w in tree.ball_vertices(q.vertex, reach):
            candidates = []
            if s == 0 and tree.vertex_type(w) == 0 or s == 1 and tree.vertex_type(w) == 1:
                candidates.append(TreePoint(w, Fraction(0)))
            elif 0 < s < 1 and w != tree.root:
                up = s if tree.vertex_type(w) == 0 else 1 - s
                candidates.append(TreePoint(w, up))
            for image in candidates:
                if image in seen:
                    continue
                seen.add(image)
                if tree.distance(image, q) <= radius:
                    out.append(self.transporter(p, image))
        return out

    # -- metric balls ---------------------------------------------------------
    def ball(self, beta, precision: int = 3, budget: int = 100000) -> list:
        beta = Fraction(beta)
        reps = self.compact_representatives(precision)
        out = [g for g in reps if self.norm(g) < beta]
        max_disp = 0
        while max_disp + 2 + 1 < beta:
            max_disp += 2
        if max_disp > 0:
            count = len(out)
            for d in range(2, max_disp + 1, 2):
                vertices = [v for v in self._vertices_at(d)]
                count += len(vertices) * len(reps)
                if count > budget:
                    raise BudgetError(f"SL2 ball of radius {beta} exceeds budget {budget}")
                for v in vertices:
                    t = self.vertex_transporter(v)
                    out.extend(t * k for k in reps)
        return out

    def _vertices_at(self, d: int) -> list:
        tree = self.space
        if d > tree.depth_bound:
            raise BudgetError("ball radius exceeds the depth bound")
        level = [tree.root]
        for _ in range(d):
            level = [c for v in level for c in tree.children(v)]
        return level

    def random_element(self, rng, length: int, precision: int = 3) -> PMatrix:
        reps = self.compact_representatives(precision)
        g = rng.choice(reps)
        for _ in range(length):
            g = g * self.diag(self.p) * rng.choice(reps)
        return g

    # -- stabilizers -----------------------------------------------------------
    def fixes(self, g, x: TreePoint) -> bool:
        try:
            return self.space.act(g, x) == x
        except DomainError:
            return False

    def stabilizer(self, x: TreePoint, precision: int = 3) -> CvcySubgroup:
        tree = self.space
        v = x.vertex
        (b11, b12), (_, b22) = tree.basis(v)

        def conjugate(k):
            # B k B^-1 for B = [[b11, b12], [0, b22]]
            (a, bb), (c, d) = k.entries
            inv = ((1 / b11, -b12 / (b11 * b22)), (Fraction(0), 1 / b22))
            m1 = ((b11 * a + b12 * c, b11 * bb + b12 * d), (b22 * c, b22 * d))
            e = (
                (m1[0][0] * inv[0][0], m1[0][0] * inv[0][1] + m1[0][1] * inv[1][1]),
                (m1[1][0] * inv[0][0], m1[1][0] * inv[0][1] + m1[1][1] * inv[1][1]),
            )
            return PMatrix(e, self.p)

        def enumerate_reps(n):
            out = []
            for k in self.compact_representatives(n):
                g = conjugate(k)
                if self.fixes(g, x):
                    out.append(g)
            out.sort(key=lambda g: (self.norm(g), self.sort_key(g)))
            return out

        return CvcySubgroup(f"stab({x.literal()})", self, lambda g: self.fixes(g, x), enumerate_reps)

    def axis_subgroup(self, generator: PMatrix, axis_point: TreePoint, label: str | None = None,
                      compact: CvcySubgroup | None = None) -> CvcySubgroup:
        """Covirtually cyclic group generated by a hyperbolic element and a compact part.

        ``compact`` defaults to the pointwise stabilizer of the generator's axis
        segment from ``axis_point`` to its image.
        """
        tree = self.space
        image = tree.act(generator, axis_point)
        shift = tree.distance(axis_point, image)
        if shift == 0:
            raise DomainError("generator is not hyperbolic at the axis point")
        if compact is None:
            fixed = [axis_point, image]

            def contains_compact(g):
                return all(self.fixes(g, y) for y in fixed)

            base = self.stabilizer(axis_point)

            def enumerate_compact(n):
                return [g for g in base.enumerate_compact(n) if contains_compact(g)]

            compact = CvcySubgroup("axis-kernel", self, contains_compact, enumerate_compact)

        def exponents(g):
            try:
                moved = tree.distance(tree.act(g, axis_point), axis_point)
            except DomainError:
                return []
            if moved % shift:
                return []
            k = int(moved / shift)
            return [k, -k] if k else [0]

        return CvcySubgroup(
            label or f"<{generator.literal()}>",
            self,
            compact.contains_compact,
            compact.enumerate_compact,
            generator=generator,
            exponent_of=exponents,
        )


def _parse_entry(text: str, p: int) -> Fraction:
    """Matrix entry: rational "num/den" or p-adic "(valuation;d0 d1 ...)"."""
    text = text.strip()
    m = re.fullmatch(r"\((-?\d+);([\d ]*)\)", text)
    if m:
        return from_digits(int(m.group(1)), m.group(2).split(), p)
    return parse_fraction(text)


# ---------------------------------------------------------------------------
# foliated V-distance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoliatedBoundV:
    beta: Fraction
    eta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "eta", Fraction(self.eta))
        if self.beta <= 0 or self.eta <= 0:
            raise DomainError("foliated bounds must be positive")


@dataclass
class FolVResult:
    verdict: str  # "witness" | "refusal" | "inconclusive"
    witness: object = None
    distance: Fraction | None = None
    enumerated: int = 0
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == "witness"


def fol_v_check(V: CvcySubgroup, g, g_prime, bound: FoliatedBoundV, precision: int = 3,
                budget: int = 64) -> FolVResult:
    """Search v in V with D(v) < beta and d(g v, g') < eta."""
    group = V.group
    w = group.mul(group.inverse(g), g_prime)
    if V.contains(w) and group.norm(w) < bound.beta:
        return FolVResult("witness", w, Fraction(0), 1, "exact coset")
    elements, complete = V.elements_within(bound.beta, precision, budget)
    slack = group.coarsening(precision)
    best = None
    near_miss = False
    for v in elements:
        d = group.norm(group.mul(group.inverse(v), w))
        if d < bound.eta:
            key = (d, group.norm(v), group.sort_key(v))
            if best is None or key < best[0]:
                best = (key, v, d)
        elif d < bound.eta + slack:
            near_miss = True
    if best is not None:
        return FolVResult("witness", best[1], best[2], len(elements))
    if near_miss or not complete:
        reason = "near miss within coset coarsening" if near_miss else "cyclic enumeration truncated"
        return FolVResult("inconclusive", None, None, len(elements), reason)
    return FolVResult("refusal", None, None, len(elements))


def coset_distance_probe(V: CvcySubgroup, g, g_prime, eta_schedule, beta_schedule, precision: int = 3,
                         budget: int = 64) -> list:
    """For each eta, the least beta in the schedule admitting a witness (raw table)."""
    rows = []
    for eta in eta_schedule:
        found = None
        inconclusive = False
        for beta in beta_schedule:
            result = fol_v_check(V, g, g_prime, FoliatedBoundV(beta, eta), precision, budget)
            if result.holds:
                found = (Fraction(beta), result.witness, result.distance)
                break
            if result.verdict == "inconclusive":
                inconclusive = True
        rows.append({
            "eta": Fraction(eta),
            "beta": None if found is None else found[0],
            "witness": None if found is None else V.group.literal(found[1]),
            "status": "witness" if found else ("inconclusive" if inconclusive else "refusal"),
        })
    return rows


def conjugation_delta(group: Group, compact_set, eps, precision: int = 3, samples=None, max_level: int = 12):
    """Largest delta = 2**-k (k <= max_level) with d(g,g') < delta => d(gv, g'v) < eps on samples.

    ``samples`` are the elements w = g^-1 g' to test; by default the ball of
    radius delta at the given precision.  Returns (delta, checked_pairs).
    """
    eps = Fraction(eps)
    for k in range(0, max_level + 1):
        delta = Fraction(1, 2**k)
        ws = samples if samples is not None else group.ball(delta, precision)
        ws = [w for w in ws if group.norm(w) < delta]
        checked = 0
        ok = True
        for w in ws:
            for v in compact_set:
                checked += 1
                conj = group.mul(group.mul(group.inverse(v), w), v)
                if group.norm(conj) >= eps:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return delta, checked
    raise BudgetError("no delta found within the level budget")


# ---------------------------------------------------------------------------
# action probes
# ---------------------------------------------------------------------------


@dataclass
class ProperReport:
    counts: list = field(default_factory=list)
    proper: bool = True
    elements: list = field(default_factory=list)


def properness_probe(group: Group, compact_points, thickness, beta_schedule, precision: int = 3) -> ProperReport:
    """Count ball elements g with g K meeting K, K = thickness-neighbourhood of the points.

    The action is flagged non-proper when the count keeps growing along the
    schedule (the final two levels differ).
    """
    space = group.space
    thickness = Fraction(thickness)
    report = ProperReport()
    for beta in beta_schedule:
        hits = []
        for g in group.ball(beta, precision):
            moved = [space.act(g, x) for x in compact_points]
            if any(as_interval(space.distance(gx, y)).lo <= 2 * thickness for gx in moved for y in compact_points):
                hits.append(g)
        report.counts.append((Fraction(beta), len(hits)))
        report.elements = hits
    if len(report.counts) >= 2 and report.counts[-1][1] != report.counts[-2][1]:
        report.proper = False
    return report


def make_group(kind: str, **options) -> Group:
    kind = kind.strip().lower()
    if kind in ("free", "f2", "free-group"):
        return FreeGroup(int(options.get("rank", 2)))
    if kind in ("lattice", "zn", "translation"):
        return TranslationLattice(int(options.get("dim", 2)))
    if kind in ("rotation", "circle"):
        return RotationGroup(options.get("step_angle", Fraction(987, 1597)), options.get("circumference", 1))
    if kind in ("sl2", "sl2qp", "bruhat-tits"):
        return SL2Group(int(options.get("p", 2)), int(options.get("depth", 8)), options.get("precision"))
    raise DomainError(f"unknown group kind {kind!r}")
