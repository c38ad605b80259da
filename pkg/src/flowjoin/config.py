"""Scenario files: INI sections with rationals written "num/den".

Every value is read through a typed getter that reports the section, key and
line number on failure, so a bad file can be fixed from the message alone.
Point, element and geodesic literals are parsed against the configured group:

    euclidean point   3/2, 0
    cayley point      aB+1/4        (reduced word, then distance up toward the root)
    bruhat-tits point 2:0:1+1/2     (vertex triple a:b:c, then distance up)
    geodesic          const P  |  seg P -> Q [@ anchor]  |  line P dir D  |  axis WORD at P
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .flow_space import Axis, Line, Segment
from .groups import make_group
from .intervals import parse_fraction
from .model_spaces import BruhatTitsTree, CayleyTree, DomainError, EuclideanSpace, TreePoint
from .pipeline import Scenario


class ConfigError(ValueError):
    """A config value that is missing, malformed or out of range."""

    def __init__(self, message: str, section: str = "", key: str = "", line: int | None = None):
        where = f"[{section}] {key}" if section else ""
        if line is not None:
            where = f"line {line}: {where}"
        super().__init__(f"{where}: {message}" if where else message)
        self.section = section
        self.key = key
        self.line = line


class Config:
    """A parsed scenario file with typed, location-aware getters."""

    def __init__(self, text: str = "", source: str = "<config>"):
        self.source = source
        self.parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        self.parser.optionxform = str
        try:
            self.parser.read_string(text, source=source)
        except configparser.Error as exc:
            line = getattr(exc, "lineno", None)
            raise ConfigError(str(exc).splitlines()[0], line=line) from None
        self.lines = _key_lines(text)

    @classmethod
    def load(cls, path) -> "Config":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        return cls(text, str(path))

    def has(self, section: str, key: str | None = None) -> bool:
        if not self.parser.has_section(section):
            return False
        return key is None or self.parser.has_option(section, key)

    def raw(self, section: str, key: str, default=None):
        if self.has(section, key):
            return self.parser.get(section, key).strip()
        if default is None:
            raise ConfigError("missing value", section, key, self.lines.get((section, key)))
        return default

    def error(self, section: str, key: str, message: str) -> ConfigError:
        return ConfigError(message, section, key, self.lines.get((section, key)))

    def fraction(self, section: str, key: str, default=None) -> Fraction:
        text = self.raw(section, key, None if default is None else str(default))
        try:
            return parse_fraction(text)
        except ZeroDivisionError:
            raise self.error(section, key, f"zero denominator in {text!r}") from None
        except (ValueError, DomainError):
            raise self.error(section, key, f"not a rational: {text!r}") from None

    def positive(self, section: str, key: str, default=None) -> Fraction:
        value = self.fraction(section, key, default)
        if value <= 0:
            raise self.error(section, key, f"must be positive, got {value}")
        return value

    def integer(self, section: str, key: str, default=None) -> int:
        text = self.raw(section, key, None if default is None else str(default))
        try:
            return int(text)
        except ValueError:
            raise self.error(section, key, f"not an integer: {text!r}") from None

    def fractions(self, section: str, key: str, default=None) -> list:
        text = self.raw(section, key, default)
        try:
            return [parse_fraction(part) for part in text.split(",") if part.strip()]
        except ZeroDivisionError:
            raise self.error(section, key, f"zero denominator in {text!r}") from None
        except (ValueError, DomainError):
            raise self.error(section, key, f"not a list of rationals: {text!r}") from None

    def choice(self, section: str, key: str, options, default=None) -> str:
        value = self.raw(section, key, default).lower()
        if value not in options:
            raise self.error(section, key, f"expected one of {', '.join(options)}, got {value!r}")
        return value

    # -- model objects -------------------------------------------------------------
    def group(self):
        kind = self.raw("model", "group", "free")
        try:
            return make_group(kind, rank=self.integer("model", "rank", 2), dim=self.integer("model", "dim", 2),
                              p=self.integer("model", "p", 2), depth=self.integer("model", "depth", 8))
        except DomainError as exc:
            raise self.error("model", "group", str(exc)) from None

    def point(self, group, section: str, key: str):
        try:
            return parse_point(group.space, self.raw(section, key))
        except DomainError as exc:
            raise self.error(section, key, str(exc)) from None

    def element(self, group, section: str, key: str, default=None):
        try:
            return group.parse(self.raw(section, key, default))
        except (DomainError, ValueError) as exc:
            raise self.error(section, key, str(exc)) from None

    def geodesic(self, group, section: str, key: str):
        try:
            return parse_geodesic(group, self.raw(section, key))
        except (DomainError, ValueError) as exc:
            raise self.error(section, key, str(exc)) from None

    def scenario(self, seed: int | None = None, budget: int | None = None) -> Scenario:
        """Scenario from [model] and [scenario]; command-line seed and budget take precedence."""
        values = {}
        if self.has("model", "group"):
            values["group"] = self.raw("model", "group")
        for name in ("rank", "p", "depth", "dim"):
            if self.has("model", name):
                values[name] = self.integer("model", name)
        defaults = Scenario()
        known = set(scenario_fields()) - {"group", "rank", "p", "depth", "dim"}
        if self.parser.has_section("scenario"):
            for key in self.parser["scenario"]:
                if key not in known:
                    raise self.error("scenario", key, "unknown scenario field")
        for spec in fields(Scenario):
            if spec.name in ("group", "rank", "p", "depth", "dim") or not self.has("scenario", spec.name):
                continue
            current = getattr(defaults, spec.name)
            if isinstance(current, bool):
                values[spec.name] = self.choice("scenario", spec.name, ("true", "false")) == "true"
            elif isinstance(current, int):
                values[spec.name] = self.integer("scenario", spec.name)
            elif isinstance(current, float):
                values[spec.name] = float(self.fraction("scenario", spec.name))
            elif isinstance(current, tuple):
                values[spec.name] = tuple(self.fractions("scenario", spec.name))
            else:
                values[spec.name] = self.fraction("scenario", spec.name)
        for name in ("eps", "eta", "L", "dt", "lam", "delta0", "m_radius"):
            if name in values and values[name] <= 0:
                raise self.error("scenario", name, f"must be positive, got {values[name]}")
        if self.has("run", "seed"):
            values["seed"] = self.integer("run", "seed")
        if self.has("run", "budget"):
            values["budget"] = self.integer("run", "budget")
        if seed is not None:
            values["seed"] = seed
        if budget is not None:
            values["budget"] = budget
        return Scenario(**values)


def _key_lines(text: str) -> dict:
    """(section, key) -> 1-based line number, for error messages."""
    out = {}
    section = ""
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = re.fullmatch(r"\[([^\]]+)\]", stripped)
        if header:
            section = header.group(1).strip()
            continue
        match = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if match and section:
            out.setdefault((section, match.group(1).strip()), number)
    return out


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------


def parse_point(space, text: str):
    text = text.strip()
    if isinstance(space, EuclideanSpace):
        parts = [p for p in text.strip("()").split(",")]
        if len(parts) != space.dim:
            raise DomainError(f"expected {space.dim} coordinates in {text!r}")
        return space.point(*(parse_fraction(p) for p in parts))
    vertex_text, _, up_text = text.partition("+")
    up = parse_fraction(up_text) if up_text else Fraction(0)
    if isinstance(space, CayleyTree):
        vertex = _parse_word(vertex_text.strip(), space.rank)
    elif isinstance(space, BruhatTitsTree):
        try:
            vertex = tuple(int(v) for v in vertex_text.strip("() ").split(":"))
        except ValueError:
            raise DomainError(f"bad vertex {vertex_text!r}; expected a:b:c") from None
        if len(vertex) != 3:
            raise DomainError(f"bad vertex {vertex_text!r}; expected a:b:c")
    else:
        raise DomainError(f"points on {space.kind} are not configurable")
    if not space.has_vertex(vertex):
        raise DomainError(f"{vertex_text!r} is not a vertex")
    point = TreePoint(vertex, up)
    if not space.contains(point):
        raise DomainError(f"{text!r} is not a point of the tree")
    return point


def _parse_word(text: str, rank: int) -> tuple:
    if text in ("e", ""):
        return ()
    letters = []
    for ch in text:
        index = ord(ch.lower()) - ord("a") + 1
        if not ch.isalpha() or index > rank:
            raise DomainError(f"bad letter {ch!r} in {text!r}")
        letters.append(index if ch.islower() else -index)
    return tuple(letters)


def parse_geodesic(group, text: str):
    space = group.space
    text = text.strip()
    kind, _, rest = text.partition(" ")
    rest = rest.strip()
    if kind == "const":
        point = parse_point(space, rest)
        return Segment(space, point, point)
    if kind == "seg":
        body, _, anchor = rest.partition("@")
        start, sep, end = body.partition("->")
        if not sep:
            raise DomainError("a segment reads: seg P -> Q [@ anchor]")
        anchor_value = parse_fraction(anchor) if anchor.strip() else Fraction(0)
        return Segment(space, parse_point(space, start), parse_point(space, end), anchor_value)
    if kind == "line":
        origin, sep, direction = rest.partition("dir")
        if not sep or not isinstance(space, EuclideanSpace):
            raise DomainError("a line reads: line P dir D, on a Euclidean model")
        return Line(space, parse_point(space, origin), [parse_fraction(d) for d in direction.strip(" ()").split(",")])
    if kind == "axis":
        word, sep, base = rest.partition(" at ")
        point = parse_point(space, base) if sep else space.base_point
        return Axis(space, group, group.parse(word), point)
    raise DomainError(f"unknown geodesic kind {kind!r}")


def scenario_fields() -> list:
    return [spec.name for spec in fields(Scenario)]
