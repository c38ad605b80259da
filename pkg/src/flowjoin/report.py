"""Check records and their text and JSON-lines renderings.

A record carries a check id, a lemma tag naming the property checked, a
digest of the canonical text of its inputs, a verdict and a mapping of named
enclosures, each a [lo, hi] pair of "num/den" strings.  Renderings sort keys
and never include timings, so equal inputs give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .intervals import Interval, fraction_text

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def enclosure_pair(value) -> list:
    """[lo, hi] as "num/den" strings for a rational, an Interval or an object with lo/hi."""
    if isinstance(value, (int, Fraction)):
        q = fraction_text(value)
        return [q, q]
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return [fraction_text(Fraction(value[0])), fraction_text(Fraction(value[1]))]
    if isinstance(value, Interval):
        return value.to_record()
    return [fraction_text(Fraction(value.lo)), fraction_text(Fraction(value.hi))]


@dataclass
class Record:
    check_id: str
    lemma_tag: str
    inputs: str
    verdict: str
    enclosures: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "check-id": self.check_id,
            "lemma-tag": self.lemma_tag,
            "inputs-digest": digest(self.inputs),
            "verdict": self.verdict,
            "enclosures": {name: enclosure_pair(v) for name, v in sorted(self.enclosures.items())},
        }


def verdict_of(flag) -> str:
    if flag is None:
        return INCONCLUSIVE
    return PASS if flag else FAIL


@dataclass
class Report:
    title: str
    constants: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    inconclusive_limit: Fraction = Fraction(0)
    artifacts: dict = field(default_factory=dict)  # file name -> text, written next to the report

    def add(self, check_id: str, lemma_tag: str, inputs: str, verdict: str, **enclosures) -> Record:
        record = Record(check_id, lemma_tag, inputs, verdict, enclosures)
        self.records.append(record)
        return record

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for r in self.records:
            out[r.verdict] += 1
        return out

    def tag_counts(self) -> dict:
        out: dict = {}
        for r in self.records:
            row = out.setdefault(r.lemma_tag, {PASS: 0, FAIL: 0, INCONCLUSIVE: 0})
            row[r.verdict] += 1
        return dict(sorted(out.items()))

    def failures(self) -> list:
        return [r for r in self.records if r.verdict == FAIL]

    def exit_code(self) -> int:
        counts = self.counts()
        if counts[FAIL]:
            return EXIT_FAIL
        total = sum(counts.values())
        if counts[INCONCLUSIVE] and Fraction(counts[INCONCLUSIVE], max(total, 1)) > self.inconclusive_limit:
            return EXIT_INCONCLUSIVE
        return EXIT_PASS

    def to_records(self) -> str:
        lines = [json.dumps({"report": self.title, "constants": _constants_text(self.constants)},
                            sort_keys=True, separators=(",", ":"))]
        for r in self.records:
            lines.append(json.dumps(r.as_dict(), sort_keys=True, separators=(",", ":")))
        return "\n".join(lines) + "\n"

    def to_text(self, max_failures: int = 20) -> str:
        counts = self.counts()
        lines = [f"== {self.title} =="]
        for name, value in _constants_text(self.constants).items():
            lines.append(f"  {name} = {value}")
        lines.append(f"checks: {sum(counts.values())}  pass: {counts[PASS]}  fail: {counts[FAIL]}  "
                     f"inconclusive: {counts[INCONCLUSIVE]}")
        for tag, row in self.tag_counts().items():
            lines.append(f"  {tag}: pass {row[PASS]}, fail {row[FAIL]}, inconclusive {row[INCONCLUSIVE]}")
        for note in self.notes:
            lines.append(f"note: {note}")
        for r in self.failures()[:max_failures]:
            encl = ", ".join(f"{k}={v}" for k, v in r.as_dict()["enclosures"].items())
            lines.append(f"FAIL {r.check_id} [{r.lemma_tag}] {r.inputs} {encl}".rstrip())
        lines.append(f"verdict: {('pass', 'fail', 'inconclusive')[self.exit_code()]}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_records() if fmt == "records" else self.to_text()


def _constants_text(constants: dict) -> dict:
    out = {}
    for name, value in sorted(constants.items()):
        if isinstance(value, int) and not isinstance(value, bool):
            out[name] = str(value)
        elif isinstance(value, Fraction):
            out[name] = fraction_text(value)
        elif isinstance(value, (list, tuple)):
            out[name] = [fraction_text(v) if isinstance(v, (Fraction, int)) else str(v) for v in value]
        else:
            out[name] = str(value)
    return out
