"""Text formats: ``.pg`` plane graphs, ``.cov`` covers, ledger reports, result records.

``.pg``::

    planegraph v1 n=4
    v 0 : 1 3 2        # neighbours in counterclockwise order
    ...
    outer : 0 1 2

``.cov``::

    cover v1 k=4
    m 0 1 : 1-1, 2-3, 3-2, 4-4

Pairs on an ``m u v`` line are (color at u)-(color at v).  Edges without a
line have an empty matching.
"""

from __future__ import annotations

import hashlib
import re
from typing import Iterable, Mapping, TextIO

from ..discharging import ChargeLedger, Element, Verdict, quarters
from ..dp_core import MatchingAssignment, uniform_lists
from ..plane_graph import PlaneGraph, SimpleGraph

PG_HEADER = re.compile(r"^planegraph\s+v1\s+n=(\d+)$")
COV_HEADER = re.compile(r"^cover\s+v1\s+k=(\d+)$")


class FormatError(ValueError):
    pass


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _ints(s: str, no: int) -> list[int]:
    try:
        return [int(x) for x in s.split()]
    except ValueError:
        raise FormatError(f"line {no}: expected integers, got {s!r}") from None


def parse_pg(text: str) -> PlaneGraph:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("empty plane-graph file")
    m = PG_HEADER.match(lines[0][1])
    if not m:
        raise FormatError(f"line {lines[0][0]}: expected 'planegraph v1 n=<V>'")
    n = int(m.group(1))
    rotation: dict[int, list[int]] = {}
    outer = None
    for no, line in lines[1:]:
        head, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(f"line {no}: missing ':'")
        words = head.split()
        if words == ["outer"]:
            outer = _ints(rest, no)
        elif len(words) == 2 and words[0] == "v":
            v = _ints(words[1], no)[0]
            if v in rotation:
                raise FormatError(f"line {no}: vertex {v} listed twice")
            rotation[v] = _ints(rest, no)
        else:
            raise FormatError(f"line {no}: unrecognised record {line!r}")
    if len(rotation) != n:
        raise FormatError(f"header says n={n} but {len(rotation)} vertices are listed")
    return PlaneGraph(rotation, outer)


def format_pg(g: PlaneGraph) -> str:
    out = [f"planegraph v1 n={len(g.vertices)}"]
    for v in g.vertices:
        out.append(f"v {v} : " + " ".join(map(str, g.rotation[v])))
    if g.outer_face is not None:
        out.append("outer : " + " ".join(map(str, g.outer_face.vertices)))
    return "\n".join(out) + "\n"


def parse_cov(text: str, g: SimpleGraph) -> MatchingAssignment:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("empty cover file")
    m = COV_HEADER.match(lines[0][1])
    if not m:
        raise FormatError(f"line {lines[0][0]}: expected 'cover v1 k=<k>'")
    k = int(m.group(1))
    matchings: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for no, line in lines[1:]:
        head, sep, rest = line.partition(":")
        words = head.split()
        if not sep or len(words) != 3 or words[0] != "m":
            raise FormatError(f"line {no}: expected 'm <u> <v> : c1-c2, ...'")
        u, v = _ints(" ".join(words[1:]), no)
        pairs = []
        for tok in filter(None, (t.strip() for t in rest.split(","))):
            a, dash, b = tok.partition("-")
            if not dash:
                raise FormatError(f"line {no}: bad pair {tok!r}")
            pairs.append((int(a), int(b)))
        if not g.has_edge(u, v):
            raise FormatError(f"line {no}: {u}-{v} is not an edge")
        matchings.setdefault((u, v), []).extend(pairs)
    return MatchingAssignment(uniform_lists(g.vertices, k), matchings, g.edges)


def format_cov(m: MatchingAssignment) -> str:
    out = [f"cover v1 k={m.k}"]
    for (u, v), pairs in m.items():
        if pairs:
            out.append(f"m {u} {v} : " + ", ".join(f"{a}-{b}" for a, b in sorted(pairs)))
    return "\n".join(out) + "\n"


def parse_coloring(text: str) -> dict[int, int]:
    """``<vertex>=<color>`` tokens separated by whitespace or commas."""
    col = {}
    for tok in re.split(r"[\s,]+", text.strip()):
        if not tok:
            continue
        v, eq, c = tok.partition("=")
        if not eq:
            raise FormatError(f"bad coloring token {tok!r}; expected v=c")
        col[int(v)] = int(c)
    return col


def format_coloring(col: Mapping[int, int]) -> str:
    return " ".join(f"{v}={c}" for v, c in sorted(col.items()))


def element_name(el: Element, outer: Element) -> str:
    if el == outer:
        return "D"
    kind, key = el
    if kind == "e":
        return f"e{key[0]}-{key[1]}"
    return f"{kind}{key}"


def ledger_report(led: ChargeLedger, verdict: Verdict | None = None) -> list[str]:
    name = lambda el: element_name(el, led.outer)  # noqa: E731
    out = []
    for el in led.elements:
        out.append(f"charge {name(el)} init={quarters(led.initial[el])} final={quarters(led.final[el])}")
    for t in led.transfers:
        via = f" via {name(t.via)}" if t.via is not None else ""
        out.append(f"xfer {t.rule} {name(t.src)} -> {name(t.dst)} {quarters(t.amount)}{via}")
    for rule, total in led.rule_totals:
        out.append(f"total after {rule} {quarters(total)}")
    if led.surplus_to_D is not None:
        out.append(f"surplus p={quarters(led.surplus_to_D)}")
    for flag in led.flags:
        out.append(f"flag {flag}")
    if verdict is not None:
        wit = name(verdict.positive_witness) if verdict.positive_witness is not None else "none"
        viol = ",".join(f"{name(el)}:-{quarters(q)}" for el, q in verdict.violations) or "none"
        out.append(
            f"verdict {verdict.theorem} {'pass' if verdict.passed else 'fail'} "
            f"nonnegative={str(verdict.all_nonnegative).lower()} witness={wit} violations={viol}"
        )
    return out


def result_record(instance_id: str, status, nodes: int, depth: int) -> str:
    return f"result {instance_id} {status} nodes={nodes} depth={depth}"


def canonical_hash(g: PlaneGraph) -> str:
    """Hash of the rooted planar map, invariant under vertex relabeling."""
    best = None
    outer = g.outer_face
    starts = outer.darts if outer is not None else [(v, w) for v in g.vertices for w in g.rotation[v]]
    for u, v in starts:
        label = {u: 0}
        order = [u]
        ref = {u: v}
        code = []
        i = 0
        while i < len(order):
            x = order[i]
            rot = g.rotation[x]
            j = rot.index(ref[x])
            seq = rot[j:] + rot[:j]
            for y in seq:
                if y not in label:
                    label[y] = len(order)
                    order.append(y)
                    ref[y] = x
            code.append(tuple(label[y] for y in seq))
            i += 1
        code = tuple(code)
        if best is None or code < best:
            best = code
    return hashlib.sha1(repr(best).encode()).hexdigest()[:16]


def read_text(path: str) -> str:
    if path == "-":
        import sys

        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_lines(fh: TextIO, lines: Iterable[str]) -> None:
    for line in lines:
        fh.write(line + "\n")
