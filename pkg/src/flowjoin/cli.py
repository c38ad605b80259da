"""Command-line entry point: one subcommand per operation, each emitting a report.

Exit status is 0 when every check passes, 1 when any check fails, 2 when the
share of inconclusive checks exceeds the limit and 3 for configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .config import Config, ConfigError, parse_geodesic, parse_point
from .covers import (
    FlowSample,
    GridSample,
    build_long_cover,
    color_cover,
    coloring_failures,
    contraction_check,
    cover_csv,
    lebesgue_number,
    long_window_failures,
    partition,
    partition_csv,
    partition_variation_violations,
)
from .flow_space import assumption_probe, dist_fs, fol_fs_check, periodicity
from .groups import FoliatedBoundV, SL2Group, fol_v_check
from .intervals import Interval, fraction_text
from .joins import FoliatedBoundJ, JoinSpace
from .model_spaces import DomainError
from .pipeline import (
    alpha_for,
    build_pipeline,
    choose_Delta,
    choose_flow_params,
    construction_report,
    inner_mass,
    outer_tail,
    projection_tail,
    verify_main,
)
from .report import EXIT_CONFIG, FAIL, INCONCLUSIVE, PASS, Report

VERDICTS = {"true": PASS, "false": FAIL, "inconclusive": INCONCLUSIVE}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_fs_dist(cfg: Config, args) -> Report:
    group = cfg.group()
    c = cfg.geodesic(group, "fs-dist", "c")
    c_prime = cfg.geodesic(group, "fs-dist", "c_prime")
    tol = cfg.positive("fs-dist", "tol", "1/1000000")
    enc = dist_fs(c, c_prime, float(tol))
    report = Report("fs-dist", {"tol": tol})
    verdict = PASS
    if cfg.has("fs-dist", "expect"):
        expect = cfg.fraction("fs-dist", "expect")
        verdict = PASS if enc.contains(expect) else FAIL
    report.add("fs-dist", "flow-space-distance", f"{c.literal()}|{c_prime.literal()}", verdict, d_FS=enc)
    report.notes.append(f"d_FS in [{enc.lo!r}, {enc.hi!r}]")
    return report


def cmd_flow(cfg: Config, args) -> Report:
    group = cfg.group()
    c = cfg.geodesic(group, "flow", "c")
    tau = cfg.fraction("flow", "tau", "0")
    times = cfg.fractions("flow", "times", "0")
    moved = c.flow(tau)
    report = Report("flow", {"tau": tau})
    for t in times:
        point = moved.at(t)
        report.add(f"flow:t={fraction_text(t)}", "flow-evaluation", f"{c.literal()}|{fraction_text(tau)}", PASS)
        report.notes.append(f"flow(c, {fraction_text(tau)}) at {fraction_text(t)} = {point.literal()}")
    return report


def _subgroup(cfg: Config, group, section: str, key: str):
    spec = cfg.raw(section, key)
    kind, _, rest = spec.partition(" ")
    try:
        if kind == "trivial":
            return group.trivial_subgroup()
        if kind == "stabilizer":
            return group.stabilizer(parse_point(group.space, rest), cfg.integer("model", "precision", 3))
        if kind == "cyclic" and hasattr(group, "cyclic_subgroup"):
            return group.cyclic_subgroup(group.parse(rest), key if section == "subgroups" else None)
        if kind == "axis" and isinstance(group, SL2Group):
            return group.axis_subgroup(group.parse(rest), group.space.base_point,
                                       key if section == "subgroups" else None)
    except DomainError as exc:
        raise cfg.error(section, key, str(exc)) from None
    raise cfg.error(section, key, f"unsupported subgroup {spec!r} for this group")


def cmd_fol_check(cfg: Config, args) -> Report:
    group = cfg.group()
    variant = cfg.choice("fol-check", "variant", ("fs", "v", "j"))
    section = "fol-check"
    precision = cfg.integer("model", "precision", 3)
    report = Report(f"fol-check {variant}")
    if variant == "fs":
        c = cfg.geodesic(group, section, "c")
        c_prime = cfg.geodesic(group, section, "c_prime")
        alpha = cfg.fraction(section, "alpha")
        delta = cfg.positive(section, "delta")
        outcome = fol_fs_check(c, c_prime, alpha, delta, float(cfg.positive(section, "tol", "1/1000")))
        inputs = f"{c.literal()}|{c_prime.literal()}|{alpha}|{delta}"
        tag = "flow-space-foliated"
        report.constants.update(alpha=alpha, delta=delta)
    elif variant == "v":
        V = _subgroup(cfg, group, section, "subgroup")
        g = cfg.element(group, section, "g")
        g_prime = cfg.element(group, section, "g_prime")
        bound = FoliatedBoundV(cfg.positive(section, "beta"), cfg.positive(section, "eta"))
        result = fol_v_check(V, g, g_prime, bound, precision, args.budget or 64)
        outcome = {"witness": "true", "refusal": "false"}.get(result.verdict, "inconclusive")
        inputs = f"{V.label}|{group.literal(g)}|{group.literal(g_prime)}"
        tag = "coset-foliated"
        report.constants.update(beta=bound.beta, eta=bound.eta)
        if result.witness is not None:
            report.notes.append(f"witness {group.literal(result.witness)}")
    else:
        subgroups = [_subgroup(cfg, group, "subgroups", key) for key in cfg.parser.options("subgroups")] \
            if cfg.has("subgroups") else []
        try:
            y_records = json.loads(cfg.raw(section, "y"))
            y_prime_records = json.loads(cfg.raw(section, "y_prime"))
        except json.JSONDecodeError as exc:
            raise cfg.error(section, "y", f"join points must be JSON arrays: {exc.msg}") from None
        join = JoinSpace(group, max(len(y_records), 1), subgroups)
        try:
            y = join.from_records(y_records)
            y_prime = join.from_records(y_prime_records)
        except (DomainError, KeyError, ValueError) as exc:
            raise cfg.error(section, "y", str(exc)) from None
        bound = FoliatedBoundJ(cfg.positive(section, "beta"), cfg.positive(section, "eta"),
                               cfg.positive(section, "eps"))
        outcome = join.fol_j_check(y, y_prime, bound, precision, args.budget or 64).verdict
        inputs = json.dumps([y_records, y_prime_records], sort_keys=True)
        tag = "join-foliated"
        report.constants.update(beta=bound.beta, eta=bound.eta, epsilon=bound.eps)
    verdict = VERDICTS[outcome]
    if cfg.has(section, "expect"):
        expected = cfg.choice(section, "expect", ("true", "false", "inconclusive"))
        verdict = PASS if expected == outcome else FAIL
    report.notes.append(f"predicate: {outcome}")
    report.add(f"fol-check:{variant}", tag, inputs, verdict)
    return report


def cmd_periodicity(cfg: Config, args) -> Report:
    group = cfg.group()
    c = cfg.geodesic(group, "periodicity", "c")
    t_max = cfg.positive("periodicity", "t_max", "3")
    info = periodicity(c, group, t_max, budget=(args.budget or 100) * 1000,
                       precision=cfg.integer("model", "precision", 3))
    report = Report("periodicity", {"t_max": t_max})
    tau_text = "inf" if info.tau is None else fraction_text(info.tau)
    verdict = INCONCLUSIVE if info.inconclusive else PASS
    if cfg.has("periodicity", "expect_tau") and not info.inconclusive:
        expected = cfg.raw("periodicity", "expect_tau")
        if expected == "inf":
            verdict = PASS if info.tau is None else FAIL
        else:
            verdict = PASS if info.tau == cfg.fraction("periodicity", "expect_tau") else FAIL
    report.add("periodicity", "geodesic-period", c.literal(), verdict)
    report.notes.append(f"tau = {tau_text}")
    if info.translation_witness is not None:
        report.notes.append(f"witness = {group.literal(info.translation_witness)}")
    report.notes.append(f"stabilizer elements found = {len(info.stabilizer_elements)}")
    return report


def cmd_probe_assumption(cfg: Config, args) -> Report:
    """Sample = translates and grid flows of the listed geodesics; check V_c inside V_c0 near each c0."""
    group = cfg.group()
    section = "probe-assumption"
    precision = cfg.integer("model", "precision", 3)
    ell = cfg.positive(section, "ell", "3")
    radii = cfg.fractions(section, "radii", "1/8, 1/4, 1/2")
    times = cfg.fractions(section, "flow_times", "0")
    geodesics = []
    for text in cfg.raw(section, "geodesics").split(";"):
        if text.strip():
            try:
                geodesics.append(parse_geodesic(group, text))
            except (DomainError, ValueError) as exc:
                raise cfg.error(section, "geodesics", str(exc)) from None
    translates = [group.parse(t) for t in cfg.raw(section, "translates", "e").split(";") if t.strip()]
    sample = []
    seen = set()
    for c in geodesics:
        for h in translates:
            for t in times:
                moved = c.translate(group, h).flow(t)
                key = moved.literal()
                if key not in seen:
                    seen.add(key)
                    sample.append(moved)
    rows = assumption_probe(sample, group, ell, radii, precision=precision, budget=(args.budget or 100) * 1000)
    report = Report("probe-assumption", {"ell": ell, "sample": len(sample)})
    passing: dict = {}
    for row in rows:
        verdict = FAIL if row.failures else (INCONCLUSIVE if row.excluded and not row.checked else PASS)
        report.add(f"assumption:c{row.center}:r={fraction_text(row.radius)}", "periodic-subgroup-containment",
                   f"{sample[row.center].literal()}|{fraction_text(row.radius)}|checked={row.checked}"
                   f"|excluded={row.excluded}", verdict)
        if verdict == PASS:
            passing[row.center] = max(passing.get(row.center, Fraction(0)), row.radius)
        for j, bad in row.failures:
            report.notes.append(f"c{row.center} r={fraction_text(row.radius)}: V of c{j} has {bad} outside")
    for center in sorted(passing):
        report.notes.append(f"c{center}: largest passing radius {fraction_text(passing[center])}")
    return report


def _sample_from(cfg: Config):
    section = "sample"
    kind = cfg.choice(section, "kind", ("grid", "flow"), "grid")
    dt = cfg.positive(section, "dt", "1/2")
    if kind == "grid":
        period = cfg.integer(section, "period") if cfg.has(section, "period") else None
        return GridSample(cfg.integer(section, "lo", 0), cfg.integer(section, "hi", 16), dt, period)
    group = cfg.group()
    sample = FlowSample(group, dt, cfg.positive(section, "lam", "1"), cfg.positive(section, "cap", "2"),
                        flow_reach=cfg.integer(section, "K", 2))
    for text in cfg.raw(section, "geodesics").split(";"):
        if text.strip():
            try:
                sample.add_flow_line(parse_geodesic(group, text), cfg.integer(section, "K", 2))
            except (DomainError, ValueError) as exc:
                raise cfg.error(section, "geodesics", str(exc)) from None
    sample.finalize()
    return sample


def _cover_from(cfg: Config):
    sample = _sample_from(cfg)
    alpha_hat = cfg.positive("cover", "alpha_hat", "1")
    try:
        cover = build_long_cover(sample, alpha_hat)
    except DomainError as exc:
        raise cfg.error("cover", "alpha_hat", str(exc)) from None
    return sample, cover, alpha_hat


def cmd_build_cover(cfg: Config, args) -> Report:
    sample, cover, alpha_hat = _cover_from(cfg)
    report = Report("build-cover", {"alpha_hat": alpha_hat, "sets": len(cover.sets), "dimension": cover.dimension,
                                    "lebesgue": lebesgue_number(sample, cover)})
    failures = long_window_failures(sample, cover, alpha_hat)
    report.add("cover:long", "long-cover-windows", f"classes={sample.size}", PASS if not failures else FAIL)
    report.artifacts["cover.csv"] = cover_csv(cover)
    return report


def cmd_partition(cfg: Config, args) -> Report:
    sample, cover, alpha_hat = _cover_from(cfg)
    part = partition(sample, cover, alpha_hat)
    report = Report("partition", {"alpha_hat": alpha_hat, "lebesgue": part.lebesgue, "sets": len(cover.sets)})
    sums = all(sum(part.column(z)) == 1 for z in range(sample.size))
    report.add("partition:sums", "partition-sums", f"classes={sample.size}", PASS if sums else FAIL)
    violations = partition_variation_violations(sample, part)
    report.add("partition:variation", "partition-flow-variation", f"classes={sample.size}",
               PASS if not violations else FAIL)
    report.artifacts["cover.csv"] = cover_csv(cover)
    report.artifacts["partition.csv"] = partition_csv(part)
    return report


def cmd_nerve(cfg: Config, args) -> Report:
    sample, cover, alpha_hat = _cover_from(cfg)
    contraction = contraction_check(sample, cover)
    colored = color_cover(sample, cover)
    failures = coloring_failures(colored, cover)
    report = Report("nerve", {"beta": contraction.beta, "nerve_dim": contraction.nerve_dim,
                              "colors": colored.colors, "alpha": colored.alpha})
    report.add("nerve:contraction", "nerve-contraction", f"pairs={contraction.pairs_checked}",
               PASS if not contraction.violations and not contraction.star_failures else FAIL)
    report.add("coloring:disjoint", "colored-disjointness", f"sets={len(colored.cover.sets)}",
               PASS if not failures["overlap"] else FAIL)
    report.add("coloring:containment", "colored-containment", f"sets={len(colored.cover.sets)}",
               PASS if not failures["containment"] else FAIL)
    report.artifacts["colored_cover.csv"] = cover_csv(colored.cover)
    return report


def cmd_params(cfg: Config, args) -> Report:
    section = "params"
    delta = cfg.positive(section, "delta")
    L = cfg.positive(section, "L")
    if cfg.has(section, "alpha"):
        alpha = cfg.positive(section, "alpha")
    else:
        scenario = cfg.scenario(args.seed, args.budget)
        group = scenario.make_group()
        M = [g for g in group.ball(scenario.m_radius, scenario.precision) if group.norm(g) < scenario.m_radius]
        alpha = alpha_for(group, group.space.base_point, M)
    Delta = choose_Delta(delta)
    flow = choose_flow_params(alpha, Delta, L, delta)
    report = Report("params", {"alpha": alpha, "L": L, "delta": delta, "Delta": Delta, "r_short": flow.r_short,
                               "r_long": flow.r_long, "delta_prime": flow.delta_prime, "R": flow.R, "T": flow.T})
    checks = [
        ("params:Delta", "projection-tail", projection_tail(Delta), delta),
        ("params:r_short", "outer-flow-tail", outer_tail(flow.r_short), delta / 3),
        ("params:delta_prime", "inner-flow-mass", inner_mass(flow.r_short) * Interval.exact(flow.delta_prime),
         delta / 3),
        ("params:r_long", "comparison-bound", Interval.exact(2 * alpha * (L + 2 * flow.r_short + 2 * alpha)
                                                             / flow.r_long), flow.delta_prime),
    ]
    for check_id, tag, value, bound in checks:
        report.add(check_id, tag, f"{alpha}|{L}|{delta}", PASS if value.hi < bound else FAIL, value=value)
    report.add("params:window", "projection-window", f"{flow.T}|{flow.R}",
               PASS if flow.T <= flow.R - Delta else FAIL)
    return report


def _pipeline(cfg: Config, args):
    scenario = cfg.scenario(args.seed, args.budget)
    try:
        return build_pipeline(scenario)
    except DomainError as exc:
        raise ConfigError(f"scenario cannot be built: {exc}") from None


def cmd_run_pipeline(cfg: Config, args) -> Report:
    pipe = _pipeline(cfg, args)
    report = construction_report(pipe)
    report.notes.extend(pipe.notes)
    assembly = pipe.assembly
    report.artifacts["cover.csv"] = cover_csv(assembly.cover)
    report.artifacts["colored_cover.csv"] = cover_csv(assembly.colored.cover)
    report.artifacts["partition.csv"] = partition_csv(assembly.partition)
    lines = []
    for n, probe in enumerate(pipe.probes):
        y = pipe.f(probe.x)
        lines.append(json.dumps({"x": probe.x.literal(), "f": assembly.join.to_records(y)}, sort_keys=True))
    report.artifacts["joinpoints.jsonl"] = "\n".join(lines) + "\n"
    return report


def cmd_verify(cfg: Config, args) -> Report:
    return verify_main(_pipeline(cfg, args))


COMMANDS = {
    "fs-dist": cmd_fs_dist,
    "flow": cmd_flow,
    "fol-check": cmd_fol_check,
    "periodicity": cmd_periodicity,
    "probe-assumption": cmd_probe_assumption,
    "build-cover": cmd_build_cover,
    "partition": cmd_partition,
    "nerve": cmd_nerve,
    "params": cmd_params,
    "run-pipeline": cmd_run_pipeline,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowjoin", description="Flow-space and join-map verifier.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="scenario file (INI, rationals as num/den)")
        cmd.add_argument("--seed", type=int, default=None, help="overrides [run] seed")
        cmd.add_argument("--budget", type=int, default=None, help="search budget for enumerations")
        cmd.add_argument("--out", default=None, help="directory for the report and CSV dumps")
        cmd.add_argument("--format", choices=("text", "records"), default="text")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = Config.load(args.config)
        report = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"input outside the model: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.render(args.format)
    stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        name = "report.jsonl" if args.format == "records" else "report.txt"
        (out / name).write_text(text, encoding="utf-8")
        for filename, content in sorted(report.artifacts.items()):
            (out / filename).write_text(content, encoding="utf-8")
    return report.exit_code()


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
