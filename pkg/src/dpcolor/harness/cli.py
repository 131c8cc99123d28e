"""Command line entry point (``dpcolor``).

Exit codes: 0 success or verdict pass, 1 verdict fail, 2 usage or input error.
Flags ``--seed``, ``--workers`` and ``--budget`` default to the environment
variables ``DPCOLOR_SEED``, ``DPCOLOR_WORKERS`` and ``DPCOLOR_BUDGET``.
"""

from __future__ import annotations

import argparse
import os
import sys

from ..discharging import RULESETS, apply_rules, check_preconditions, lemma_arithmetic_suite, verdict
from ..dp_core import CoverError, is_mcoloring, straighten, validate_cover
from ..patterns import PATTERNS, THEOREMS, hypothesis_filter
from ..plane_graph import PlaneGraphError, UnknownId
from ..solver import DEFAULT_BUDGET, BadPrecoloring, BadS, SearchProblem, Status, extend_precolored, find_mcoloring
from . import formats
from .campaign import CampaignSpec, run_campaign
from .generators import GenerationFailed, generate

ENV_PREFIX = "DPCOLOR_"
OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{ENV_PREFIX}{name}={raw!r} is not an integer") from None


def _load_graph(path: str):
    return formats.parse_pg(formats.read_text(path))


def _load_cover(path: str, g):
    m = formats.parse_cov(formats.read_text(path), g)
    validate_cover(g, None, m)
    return m


def _emit(lines, out_path: str | None = None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            formats.write_lines(fh, lines)
    else:
        formats.write_lines(sys.stdout, lines)


def cmd_gen(a) -> int:
    g = generate(a.profile, a.size, a.seed, a.theorem)
    text = formats.format_pg(g)
    _emit([text.rstrip("\n")], a.out)
    return OK


def cmd_detect(a) -> int:
    g = _load_graph(a.inp)
    res = hypothesis_filter(g, a.theorem)
    lines = []
    for w in res.witnesses:
        if hasattr(w, "mapping"):
            labels = PATTERNS[w.pattern_id].labels
            amap = " ".join(f"{labels[p]}={h}" for p, h in sorted(w.mapping.items()))
            lines.append(f"witness {w.pattern_id} {amap}")
        else:
            lines.append(f"witness {w.predicate} " + " | ".join(" ".join(map(str, c)) for c in w.cycles))
    lines.append(f"filter {a.theorem} {'pass' if res.passed else 'fail'}")
    _emit(lines)
    return OK if res.passed else FAIL


def _outcome_lines(out, name: str) -> list[str]:
    lines = [formats.result_record(name, out.status, out.nodes, out.max_depth)]
    if out.coloring is not None:
        lines.append("coloring " + formats.format_coloring(out.coloring))
    return lines


def cmd_solve(a) -> int:
    g = _load_graph(a.inp)
    m = _load_cover(a.cover, g)
    pre = formats.parse_coloring(a.precolor) if a.precolor else {}
    out = find_mcoloring(SearchProblem(g, m, pre, a.budget))
    if out.coloring is not None and not is_mcoloring(g, m, out.coloring):
        raise RuntimeError("solver returned an invalid coloring")
    _emit(_outcome_lines(out, a.name))
    return OK if out.status is Status.EXTENDED else FAIL


def cmd_extend(a) -> int:
    g = _load_graph(a.inp)
    m = _load_cover(a.cover, g)
    S = [int(x) for x in a.S.replace(",", " ").split()]
    phi = formats.parse_coloring(a.phi)
    out = extend_precolored(g, m, S, phi, a.theorem, a.budget)
    _emit(_outcome_lines(out, a.name))
    return OK if out.status is Status.EXTENDED else FAIL


def cmd_straighten(a) -> int:
    from ..dp_core import PreconditionViolated

    g = _load_graph(a.inp)
    m = _load_cover(a.cover, g)
    edges = []
    for tok in a.edges.replace(",", " ").split():
        u, _, v = tok.partition("-")
        edges.append((int(u), int(v)))
    try:
        res = straighten(g, m, edges)
    except PreconditionViolated as exc:
        _emit([f"violation cycle={' '.join(map(str, exc.cycle))} reason={exc.reason}"])
        return FAIL
    lines = []
    for v in sorted(res.permutations):
        p = res.permutations[v]
        lines.append(f"rename {v} : " + ", ".join(f"{c}->{p[c]}" for c in sorted(p)))
    lines.append(formats.format_cov(res.assignment).rstrip("\n"))
    _emit(lines, a.out)
    return OK


def cmd_discharge(a) -> int:
    g = _load_graph(a.inp)
    report = check_preconditions(g, a.theorem)
    led = apply_rules(g, a.theorem)
    ver = verdict(led, g, a.theorem)
    lines = [] if a.summary else formats.ledger_report(led, ver)
    if a.summary:
        lines += formats.ledger_report(led, ver)[-1:]
    for c in report.checks:
        wit = "" if c.passed else " witnesses=" + ";".join(map(str, c.witnesses[:5]))
        lines.append(f"precondition {c.name} {'pass' if c.passed else 'fail'}{wit}")
    applicable = report.passed
    lines.append(f"discharge {a.theorem} preconditions={report.summary()} "
                 f"verdict={'pass' if ver.passed else 'fail'} applicable={str(applicable).lower()}")
    _emit(lines)
    # a failed verdict only refutes the argument when every precondition holds
    return FAIL if applicable and not ver.passed else OK


def cmd_stress(a) -> int:
    spec = CampaignSpec(
        theorem=a.theorem,
        count=a.count,
        size_range=(a.min_size, a.max_size),
        seed=a.seed,
        profile=a.profile,
        assignments=a.assignments,
        precolorings=a.precolorings,
        strategy=a.strategy,
        repair=not a.no_repair,
        budget=a.budget,
        workers=a.workers,
    )
    res = run_campaign(spec)
    _emit(res.log_lines(), a.log)
    c = res.counters
    bad = c[str(Status.NO_EXTENSION)] + c[str(Status.BUDGET_EXHAUSTED)] + c["revalidation_failures"]
    bad += c["clean_verdict_fail"]
    if a.log:
        print(f"summary {a.theorem} instances={c['instances']} searches={c['searches']} failures={bad}")
    return FAIL if bad else OK


def cmd_patterns(a) -> int:
    lines = []
    for p in PATTERNS.values():
        lines.append(f"{p.pattern_id} n={len(p.labels)} edges={' '.join(p.labeled_edges)}  # {p.description}")
    _emit(lines)
    return OK


def cmd_lemma_suite(a) -> int:
    checks = lemma_arithmetic_suite(max_degree=a.max_degree)
    lines = [f"{'pass' if c.passed else 'FAIL'} {c.name}: {c.value} {c.relation} {c.target}" for c in checks]
    bad = sum(not c.passed for c in checks)
    lines.append(f"lemma-suite checks={len(checks)} failures={bad}")
    _emit(lines if a.verbose else lines[-1:])
    return FAIL if bad else OK


def build_parser() -> argparse.ArgumentParser:
    seed = _env_int("SEED", 0)
    workers = _env_int("WORKERS", 1)
    budget = _env_int("BUDGET", DEFAULT_BUDGET)

    ap = argparse.ArgumentParser(prog="dpcolor", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a plane graph")
    p.add_argument("--profile", default="outer-cycle(6)")
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--theorem", choices=RULESETS, help="remove configurations excluded by this theorem")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("detect", help="search for excluded configurations")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("solve", help="find an M-coloring")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--precolor", help="v=c tokens")
    p.add_argument("--budget", type=int, default=budget)
    p.add_argument("--name", default="instance")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("extend", help="extend a precoloring of S")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--S", required=True, help="a vertex or the vertices of a cycle, in order")
    p.add_argument("--phi", required=True, help="v=c tokens for the vertices of S")
    p.add_argument("--theorem", choices=RULESETS)
    p.add_argument("--budget", type=int, default=budget)
    p.add_argument("--name", default="instance")
    p.set_defaults(fn=cmd_extend)

    p = sub.add_parser("straighten", help="rename colors to make subgraph edges straight")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--edges", required=True, help="u-v tokens")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_straighten)

    p = sub.add_parser("discharge", help="run a discharging rule set and report the ledger")
    p.add_argument("--theorem", required=True, choices=RULESETS)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--summary", action="store_true", help="omit per-element and transfer lines")
    p.set_defaults(fn=cmd_discharge)

    p = sub.add_parser("stress", help="run an extension stress campaign")
    p.add_argument("--theorem", required=True, choices=RULESETS)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--min-size", type=int, default=8)
    p.add_argument("--max-size", type=int, default=20)
    p.add_argument("--profile", help="generator profile (default: outer-cycle(k), k random)")
    p.add_argument("--assignments", type=int, default=4)
    p.add_argument("--precolorings", type=int, default=8)
    p.add_argument("--strategy", choices=("sampled", "all"), default="sampled")
    p.add_argument("--no-repair", action="store_true", help="keep excluded configurations (negative controls)")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--workers", type=int, default=workers)
    p.add_argument("--budget", type=int, default=budget)
    p.add_argument("--log", help="write the result log here instead of stdout")
    p.set_defaults(fn=cmd_stress)

    p = sub.add_parser("patterns", help="pattern library")
    psub = p.add_subparsers(dest="action", required=True)
    pl = psub.add_parser("list", help="print every built-in pattern")
    pl.set_defaults(fn=cmd_patterns)

    p = sub.add_parser("lemma-suite", help="re-evaluate the closed-form charge computations")
    p.add_argument("--max-degree", type=int, default=64)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(fn=cmd_lemma_suite)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"dpcolor: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else USAGE
    try:
        return args.fn(args)
    except (OSError, formats.FormatError, PlaneGraphError, CoverError, UnknownId, BadS, BadPrecoloring,
            GenerationFailed, ValueError) as exc:
        print(f"dpcolor: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
