"""Forbidden configurations and subgraph containment.

The built-in patterns are transcriptions of the small drawings that define
the excluded configurations of each theorem.  A filled dot drawn on the
crossing of two segments is read as a vertex subdividing both segments.
Vertex labels keep the letters of the drawings so the edge lists can be
audited with ``dpcolor patterns list``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .plane_graph import SimpleGraph, cycle_edges, enumerate_cycles

THEOREMS = ("MRTHREE", "MRA", "MRB", "MRC", "LL")


@dataclass(frozen=True)
class ConfigPattern:
    pattern_id: str
    labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    description: str

    @property
    def graph(self) -> SimpleGraph:
        return SimpleGraph(range(len(self.labels)), self.edges)

    @property
    def labeled_edges(self) -> list[str]:
        return [self.labels[a] + self.labels[b] for a, b in self.edges]


def _pattern(pid: str, labels: str, edges: str, description: str) -> ConfigPattern:
    idx = {c: i for i, c in enumerate(labels)}
    es = tuple((idx[e[0]], idx[e[1]]) for e in edges.split())
    return ConfigPattern(pid, tuple(labels), es, description)


_HOUSE = ("ABCDH", "AH HB BC CD DA AB", "triangle sharing an edge with a 4-cycle (house)")

PATTERNS: dict[str, ConfigPattern] = {
    p.pattern_id: p
    for p in [
        _pattern("FIG1_A", *_HOUSE),
        _pattern(
            "FIG1_B",
            "ABCDHXYZ",
            "AX XZ ZH HY YB BC CD DA AH HB HX",
            "5-cycle AHBCD with triangles on AH and HB, plus a triangle on HX adjacent to AHX",
        ),
        _pattern(
            "FIG1_C",
            "ABCDHXYZ",
            "AZ ZX XH HY YB BC CD DA XA AH HB",
            "5-cycle AHBCD with triangles on AH and HB, plus a triangle on AX adjacent to AHX",
        ),
        _pattern("FIG2_A", "ABCD", "AB BC CD DA BD", "two triangles sharing an edge (K4 minus an edge)"),
        _pattern(
            "FIG2_B",
            "ABCDEO",
            "AB BO OD DC CO OA AE ED",
            "two triangles sharing one vertex O, plus a 4-cycle through O adjacent to both",
        ),
        _pattern(
            "FIG2_C",
            "ABCDEFGH",
            "AB BC CD DE EF FG GH HA AC CF FH",
            "4-cycle ACFH adjacent to triangles ABC, FGH and to the 4-cycle CDEF",
        ),
        _pattern("FIG3_A", "ABCDO", "AB BO OD DC CO OA", "two triangles sharing exactly one vertex (bowtie)"),
        _pattern(
            "FIG3_B",
            "OABCDE",
            "OA AB BC CD DE EO CO OD",
            "adjacent triangles OCD, ODE with the 4-cycle OABC on edge OC",
        ),
        _pattern("FIG4_A", *_HOUSE),
        _pattern(
            "FIG4_B",
            "ABCDHXY",
            "AX XH HY YB BC CD DA AH HB",
            "5-cycle AHBCD with triangles on the consecutive edges AH and HB",
        ),
    ]
}

THEOREM_PATTERNS = {
    "MRTHREE": ("FIG1_A", "FIG1_B", "FIG1_C"),
    "MRA": ("FIG2_A", "FIG2_B", "FIG2_C"),
    "MRB": ("FIG3_A", "FIG3_B"),
    "MRC": ("FIG4_A", "FIG4_B"),
}


@dataclass(frozen=True)
class Witness:
    pattern_id: str
    mapping: Mapping[int, int]  # pattern vertex -> host vertex

    def image_edges(self, pattern: ConfigPattern | None = None) -> list[tuple[int, int]]:
        pattern = pattern or PATTERNS[self.pattern_id]
        return [tuple(sorted((self.mapping[a], self.mapping[b]))) for a, b in pattern.edges]


@dataclass(frozen=True)
class CycleWitness:
    predicate: str
    cycles: tuple[tuple[int, ...], ...]


def _match_order(p: SimpleGraph) -> list[int]:
    order: list[int] = []
    rest = set(p.vertices)
    while rest:
        placed = set(order)
        nxt = max(rest, key=lambda x: (len(p.neighbors(x) & placed), p.degree(x), -x))
        order.append(nxt)
        rest.discard(nxt)
    return order


def iter_embeddings(host: SimpleGraph, pattern: SimpleGraph):
    """Injective edge-preserving maps pattern -> host, in canonical order."""
    order = _match_order(pattern)
    earlier = [[q for q in pattern.neighbors(x) if q in order[:i]] for i, x in enumerate(order)]
    pdeg = [pattern.degree(x) for x in order]
    hv = host.vertices
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def rec(i: int):
        if i == len(order):
            yield dict(mapping)
            return
        x = order[i]
        if earlier[i]:
            cand = set(host.neighbors(mapping[earlier[i][0]]))
            for q in earlier[i][1:]:
                cand &= host.neighbors(mapping[q])
            cand = sorted(cand)
        else:
            cand = hv
        for y in cand:
            if y in used or host.degree(y) < pdeg[i]:
                continue
            mapping[x] = y
            used.add(y)
            yield from rec(i + 1)
            used.discard(y)
            del mapping[x]

    yield from rec(0)


def contains(g: SimpleGraph, pattern: ConfigPattern | str) -> Witness | None:
    if isinstance(pattern, str):
        pattern = PATTERNS[pattern]
    for mp in iter_embeddings(g, pattern.graph):
        return Witness(pattern.pattern_id, {k: mp[k] for k in sorted(mp)})
    return None


# -- cycle-level predicates -------------------------------------------------------


def _short_cycles(g: SimpleGraph) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    cycles = enumerate_cycles(g, 4)
    return [c for c in cycles if len(c) == 3], [c for c in cycles if len(c) == 4]


def generic_predicates(g: SimpleGraph) -> dict[str, CycleWitness | None]:
    """Triangle/4-cycle interaction predicates, each with a first witness."""
    tris, quads = _short_cycles(g)
    tri_edges = [cycle_edges(t) for t in tris]
    out: dict[str, CycleWitness | None] = {
        "adjacent_triangles": None,
        "intersecting_triangles": None,
        "triangle_adjacent_to_4cycle": None,
        "four_cycle_adjacent_to_two_triangles": None,
    }
    for i in range(len(tris)):
        for j in range(i + 1, len(tris)):
            if out["adjacent_triangles"] is None and tri_edges[i] & tri_edges[j]:
                out["adjacent_triangles"] = CycleWitness("adjacent_triangles", (tris[i], tris[j]))
            if out["intersecting_triangles"] is None and set(tris[i]) & set(tris[j]):
                out["intersecting_triangles"] = CycleWitness("intersecting_triangles", (tris[i], tris[j]))
    for q in quads:
        qe = cycle_edges(q)
        touching = [t for t, te in zip(tris, tri_edges) if te & qe]
        if touching and out["triangle_adjacent_to_4cycle"] is None:
            out["triangle_adjacent_to_4cycle"] = CycleWitness("triangle_adjacent_to_4cycle", (touching[0], q))
        if len(touching) >= 2 and out["four_cycle_adjacent_to_two_triangles"] is None:
            out["four_cycle_adjacent_to_two_triangles"] = CycleWitness(
                "four_cycle_adjacent_to_two_triangles", (q, touching[0], touching[1])
            )
    return out


@dataclass(frozen=True)
class FilterResult:
    theorem: str
    passed: bool
    witnesses: tuple[Witness | CycleWitness, ...]


def hypothesis_filter(g: SimpleGraph, theorem: str) -> FilterResult:
    """Does ``g`` avoid every configuration excluded by ``theorem``?"""
    if theorem == "LL":
        w = generic_predicates(g)["four_cycle_adjacent_to_two_triangles"]
        return FilterResult(theorem, w is None, () if w is None else (w,))
    try:
        ids = THEOREM_PATTERNS[theorem]
    except KeyError:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}") from None
    found = tuple(w for w in (contains(g, pid) for pid in ids) if w is not None)
    return FilterResult(theorem, not found, found)


def first_violation(g: SimpleGraph, theorem: str) -> Witness | CycleWitness | None:
    """Cheaper than :func:`hypothesis_filter` when only one witness is needed."""
    if theorem == "LL":
        return generic_predicates(g)["four_cycle_adjacent_to_two_triangles"]
    for pid in THEOREM_PATTERNS[theorem]:
        w = contains(g, pid)
        if w is not None:
            return w
    return None
