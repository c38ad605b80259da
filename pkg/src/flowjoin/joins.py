"""Points of the join J^N_V(G)^, the group action on them, and the J-foliated predicate.

A join point is a list of N+1 slots ``(t, g, label)`` with exact rational
weights summing to 1.  Labels name covirtually cyclic subgroups registered
with a ``JoinSpace``.  A slot with weight zero carries no information, so it
is rewritten to the placeholder ``(e, default label)``; two points are then
equal exactly when their canonical forms are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groups import CvcySubgroup, FoliatedBoundV, Group, fol_v_check, conjugation_delta
from .intervals import fraction_text, parse_fraction
from .model_spaces import DomainError


@dataclass(frozen=True)
class JoinSlot:
    weight: Fraction
    element: object
    label: str


@dataclass(frozen=True)
class JoinPoint:
    slots: tuple

    @property
    def size(self) -> int:
        return len(self.slots)

    def weights(self) -> list:
        return [slot.weight for slot in self.slots]

    def active(self) -> list:
        return [i for i, slot in enumerate(self.slots) if slot.weight != 0]


@dataclass(frozen=True)
class FoliatedBoundJ:
    beta: Fraction
    eta: Fraction
    eps: Fraction

    def __post_init__(self):
        for name in ("beta", "eta", "eps"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.beta <= 0 or self.eta <= 0 or self.eps <= 0:
            raise DomainError("foliated bounds must be positive")

    def v_bound(self) -> FoliatedBoundV:
        return FoliatedBoundV(self.beta, self.eta)


@dataclass
class SlotReport:
    index: int
    status: str  # "pass" | "exempt" | "weight" | "label" | "refusal" | "inconclusive"
    witness: object = None
    distance: object = None


@dataclass
class JoinVerdict:
    verdict: str  # "true" | "false" | "inconclusive"
    slots: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.verdict == "true"

    def exempt(self) -> list:
        return [s.index for s in self.slots if s.status == "exempt"]


class JoinSpace:
    """The labelled family of subgroups together with the slot count N+1."""

    def __init__(self, group: Group, size: int, subgroups=()):
        if size < 1:
            raise DomainError("a join needs at least one slot")
        self.group = group
        self.size = size
        self.subgroups: dict[str, CvcySubgroup] = {}
        for sub in subgroups:
            self.register(sub)

    def register(self, subgroup: CvcySubgroup) -> str:
        existing = self.subgroups.get(subgroup.label)
        if existing is None:
            self.subgroups[subgroup.label] = subgroup
        return subgroup.label

    @property
    def default_label(self) -> str:
        if not self.subgroups:
            self.register(self.group.trivial_subgroup())
        return next(iter(self.subgroups))

    def subgroup(self, label: str) -> CvcySubgroup:
        try:
            return self.subgroups[label]
        except KeyError:
            raise DomainError(f"unknown subgroup label {label!r}") from None

    # -- construction ----------------------------------------------------
    def make_point(self, entries) -> JoinPoint:
        """Build a canonical point from (weight, element, label) triples."""
        entries = list(entries)
        if len(entries) > self.size:
            raise DomainError(f"{len(entries)} slots given, join has {self.size}")
        slots = []
        for weight, element, label in entries:
            weight = Fraction(weight)
            if weight < 0:
                raise DomainError(f"negative weight {weight}")
            if weight == 0:
                slots.append(self._placeholder())
                continue
            self.subgroup(label)
            slots.append(JoinSlot(weight, element, label))
        while len(slots) < self.size:
            slots.append(self._placeholder())
        total = sum(slot.weight for slot in slots)
        if total != 1:
            raise DomainError(f"weights sum to {total}, not 1")
        return JoinPoint(tuple(slots))

    def _placeholder(self) -> JoinSlot:
        return JoinSlot(Fraction(0), self.group.identity, self.default_label)

    def canonical(self, y: JoinPoint) -> JoinPoint:
        return self.make_point((s.weight, s.element, s.label) for s in y.slots)

    def act(self, g, y: JoinPoint) -> JoinPoint:
        slots = []
        for slot in y.slots:
            if slot.weight == 0:
                slots.append(slot)
            else:
                slots.append(JoinSlot(slot.weight, self.group.mul(g, slot.element), slot.label))
        return JoinPoint(tuple(slots))

    # -- foliated predicate -------------------------------------------------
    def fol_j_check(self, y: JoinPoint, y_prime: JoinPoint, bound: FoliatedBoundJ,
                    precision: int = 3, budget: int = 64) -> JoinVerdict:
        """Decide fol_J(y, y') < (beta, eta, eps) slot by slot."""
        if y.size != y_prime.size:
            raise DomainError("join points of different length")
        reports = []
        verdict = "true"
        for i, (s, s2) in enumerate(zip(y.slots, y_prime.slots)):
            if abs(s.weight - s2.weight) >= bound.eps:
                reports.append(SlotReport(i, "weight"))
                verdict = "false"
                continue
            if max(s.weight, s2.weight) < bound.eps:
                reports.append(SlotReport(i, "exempt"))
                continue
            if s.label != s2.label:
                reports.append(SlotReport(i, "label"))
                verdict = "false"
                continue
            result = fol_v_check(self.subgroup(s.label), s.element, s2.element, bound.v_bound(), precision, budget)
            if result.holds:
                reports.append(SlotReport(i, "pass", result.witness, result.distance))
            elif result.verdict == "inconclusive":
                reports.append(SlotReport(i, "inconclusive"))
                if verdict == "true":
                    verdict = "inconclusive"
            else:
                reports.append(SlotReport(i, "refusal"))
                verdict = "false"
        return JoinVerdict(verdict, reports)

    # -- projections ---------------------------------------------------------
    def label_projection(self, y: JoinPoint) -> dict:
        """Barycentric coordinates keyed by (slot, label) in the join of the labels."""
        return {(i, s.label): s.weight for i, s in enumerate(y.slots) if s.weight != 0}

    def label_distance(self, y: JoinPoint, y_prime: JoinPoint) -> Fraction:
        return linf_distance(self.label_projection(y), self.label_projection(y_prime))

    def discrete_projection(self, y: JoinPoint) -> dict:
        """Coordinates keyed by (slot, label, coset representative of g V)."""
        if not getattr(self.group, "is_discrete", False):
            raise DomainError("discrete projection needs a discrete group")
        out = {}
        for i, s in enumerate(y.slots):
            if s.weight == 0:
                continue
            rep = coset_representative(self.subgroup(s.label), s.element)
            key = (i, s.label, self.group.literal(rep))
            out[key] = out.get(key, Fraction(0)) + s.weight
        return out

    def discrete_distance(self, y: JoinPoint, y_prime: JoinPoint) -> Fraction:
        return linf_distance(self.discrete_projection(y), self.discrete_projection(y_prime))

    # -- serialization -------------------------------------------------------
    def to_records(self, y: JoinPoint) -> list:
        return [{"t": fraction_text(s.weight), "g": self.group.literal(s.element), "V": s.label} for s in y.slots]

    def from_records(self, records) -> JoinPoint:
        return self.make_point(
            (parse_fraction(r["t"]), self.group.parse(r["g"]), r["V"]) for r in records
        )


def linf_distance(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return max((abs(p.get(k, Fraction(0)) - q.get(k, Fraction(0))) for k in keys), default=Fraction(0))


def coset_representative(V: CvcySubgroup, g):
    """Least element of g V under (norm, sort key); V must be discrete."""
    group = V.group
    compact = V.enumerate_compact(0)
    if V.generator is None:
        powers = [group.identity]
    else:
        span = 2 * (int(group.norm(g)) + int(group.norm(V.generator))) + 2
        powers = [group.power(V.generator, k) for k in range(-span, span + 1)]
    best = None
    for h in powers:
        for k in compact:
            cand = group.mul(g, group.mul(h, k))
            key = (group.norm(cand), group.sort_key(cand))
            if best is None or key < best[0]:
                best = (key, cand)
    return best[1]


def triangle_eta(group: Group, beta, eta_target, precision: int = 3, witnesses=None) -> Fraction:
    """An eta with fol_J < (beta, eta, e) twice implying fol_J < (2 beta, eta_target, 2 e).

    Follows the constructive chain: find delta so that right multiplication by
    any v in the beta-ball moves delta-close elements less than eta_target/2
    apart, then cap at eta_target/2.  ``witnesses`` narrows the beta-ball to
    the elements that can occur as slot witnesses (V intersected with the
    ball, over the labels in use).
    """
    eta_target = Fraction(eta_target)
    if witnesses is None:
        witnesses = group.ball(Fraction(beta), precision)
    ball = [v for v in witnesses if group.norm(v) < Fraction(beta)]
    delta, _ = conjugation_delta(group, ball, eta_target / 2, precision)
    return min(delta, eta_target / 2)


def witness_elements(join: JoinSpace, beta, precision: int = 3, budget: int = 64) -> list:
    """Union over registered labels of the enumerated V elements with D < beta."""
    out = []
    seen = set()
    for label in sorted(join.subgroups):
        elements, _ = join.subgroups[label].elements_within(Fraction(beta), precision, budget)
        for v in elements:
            key = join.group.literal(v)
            if key not in seen:
                seen.add(key)
                out.append(v)
    return out
