"""Discharging ledgers for the three DP-4-coloring rule systems.

All charges are integers in quarter units (4 == one unit of charge), so the
arithmetic is exact.  Elements are keyed as ``("v", id)``, ``("f", id)`` and
``("e", (u, v))``; special edges only ever pass charge through.

Rule systems:

``MRA``  R1a-d for internal 4-vertices, R2 for internal 5+-vertices, R3
         boundary routing, R4 from sources to sinks.
``MRB``  R1a-b, R2, R3.
``MRC``  R1a-c, R2, R3, then TOD: every inner face hands its surplus to the
         outer face.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .plane_graph import (
    Classification,
    PlaneGraph,
    classify,
    edge_key,
    separating_cycles,
    sinks_and_sources,
)

Q = 4  # quarter units per unit of charge
RULESETS = ("MRA", "MRB", "MRC")
OUTER_BOUND = {"MRA": 6, "MRB": 6, "MRC": 7}

Element = tuple


class EulerSumNonzero(ArithmeticError):
    pass


class RuleAmbiguity(RuntimeError):
    def __init__(self, rule: str, element: Element, detail: str):
        super().__init__(f"{rule} is ambiguous at {element}: {detail}")
        self.rule = rule
        self.element = element


def V(v: int) -> Element:
    return ("v", v)


def F(f: int) -> Element:
    return ("f", f)


def E(u: int, v: int) -> Element:
    return ("e", edge_key(u, v))


def quarters(q: int) -> str:
    return f"{q}/4"


@dataclass(frozen=True)
class Transfer:
    rule: str
    src: Element
    dst: Element
    amount: int  # quarter units; R3 may carry a negative vertex charge
    via: Element | None = None


@dataclass
class ChargeLedger:
    theorem: str | None
    outer: Element
    initial: dict[Element, int]
    transfers: list[Transfer] = field(default_factory=list)
    final: dict[Element, int] = field(default_factory=dict)
    before_tod: dict[Element, int] | None = None
    surplus_to_D: int | None = None
    rule_totals: list[tuple[str, int]] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def elements(self) -> list[Element]:
        return sorted(self.initial, key=_element_order)

    def total(self, charges: dict[Element, int] | None = None) -> int:
        return sum((self.final if charges is None else charges).values())

    def replay(self, rules: Iterable[str] | None = None) -> dict[Element, int]:
        """Recompute balances from the initial charges and the transfer log."""
        keep = None if rules is None else set(rules)
        bal = dict(self.initial)
        for t in self.transfers:
            if keep is None or t.rule in keep:
                bal[t.src] -= t.amount
                bal[t.dst] += t.amount
        return bal

    def special_edge_flows(self) -> dict[tuple[int, int], tuple[int, int]]:
        """Per special edge: (received, sent) in quarter units."""
        flows: dict[tuple[int, int], list[int]] = {
            el[1]: [0, 0] for el in self.initial if el[0] == "e"
        }
        for t in self.transfers:
            if t.dst[0] == "e":
                flows[t.dst[1]][0] += t.amount
            if t.src[0] == "e":
                flows[t.src[1]][1] += t.amount
        return {e: (a, b) for e, (a, b) in flows.items()}

    def received_via_special_edges(self) -> dict[Element, int]:
        got: dict[Element, int] = {}
        for t in self.transfers:
            if t.src[0] == "e":
                got[t.dst] = got.get(t.dst, 0) + t.amount
        return got

    def transfers_into(self, el: Element, rule: str | None = None) -> int:
        return sum(t.amount for t in self.transfers if t.dst == el and (rule is None or t.rule == rule))

    def transfers_from(self, el: Element, rule: str | None = None) -> int:
        return sum(t.amount for t in self.transfers if t.src == el and (rule is None or t.rule == rule))


def _element_order(el: Element):
    kind, key = el
    return ("vfe".index(kind), key)


# -- initial charges ---------------------------------------------------------------


def initial_charges(g: PlaneGraph) -> ChargeLedger:
    """Vertex 2d-6, inner face d-6, outer face d+6; special edges start at 0."""
    if g.outer_face_id is None:
        raise ValueError("initial charges need a graph with a designated outer face")
    init: dict[Element, int] = {}
    for v in g.vertices:
        init[V(v)] = Q * (2 * g.degree(v) - 6)
    for f in g.faces:
        init[F(f.id)] = Q * (f.degree + 6 if f.id == g.outer_face_id else f.degree - 6)
    for e in g.special_edges():
        init[E(*e)] = 0
    s = sum(init.values())
    if s != 0:
        raise EulerSumNonzero(f"initial charges sum to {quarters(s)}")
    led = ChargeLedger(None, F(g.outer_face_id), init)
    led.final = dict(init)
    return led


# -- rules ---------------------------------------------------------------------------


class _Run:
    def __init__(self, g: PlaneGraph, cls: Classification, theorem: str):
        self.g, self.cls, self.theorem = g, cls, theorem
        self.led = initial_charges(g)
        self.led.theorem = theorem
        self.bal = dict(self.led.initial)
        self.D = self.led.outer

    def send(self, rule: str, src: Element, dst: Element, q: int, via: Element | None = None) -> None:
        if q == 0:
            return
        self.led.transfers.append(Transfer(rule, src, dst, q, via))
        self.bal[src] -= q
        self.bal[dst] += q

    def checkpoint(self, rule: str) -> None:
        self.led.rule_totals.append((rule, sum(self.bal.values())))

    def fdeg(self, f: int) -> int:
        return self.g.faces[f].degree

    def internal(self, degree_at_least: int, degree_at_most: int | None = None):
        for v, vc in self.cls.vertices.items():
            if vc.is_internal and vc.degree >= degree_at_least and (
                degree_at_most is None or vc.degree <= degree_at_most
            ):
                yield v, vc

    def one_triangle_split(self, rule: str, v: int, tri: int) -> dict[int, int]:
        """For a 4-vertex with a single 3-face ``tri``: the opposite face and the
        faces sharing an edge with ``tri`` at ``v``."""
        corners = self.g.corners(v)
        at = [i for i, (_, _, f) in enumerate(corners) if f == tri]
        if len(at) != 1:
            raise RuleAmbiguity(rule, V(v), f"3-face {tri} occupies {len(at)} corners")
        j = at[0]
        n = len(corners)
        opposite = corners[(j + 2) % n][2]
        beside = {corners[(j - 1) % n][2], corners[(j + 1) % n][2]}
        plan = {tri: 4}
        plan.setdefault(opposite, 2)
        for f in sorted(beside):
            if f in plan:
                if f != tri:
                    self.led.flags.append(f"{rule}: face {f} is both opposite and beside the 3-face at vertex {v}")
                continue
            if self.fdeg(f) >= 4:
                plan[f] = 1
        if set(self.g.faces[opposite].edge_set) & self.g.faces[tri].edge_set:
            self.led.flags.append(f"{rule}: face {opposite} opposite vertex {v} still shares an edge with face {tri}")
        return plan

    # shared rules

    def boundary_routing(self, rule: str = "R3") -> None:
        g = self.g
        for v in sorted(g.outer_vertices):
            self.send(rule, V(v), self.D, self.led.initial[V(v)])
        for u, v in g.special_edges():
            e = E(u, v)
            self.send(rule, self.D, e, 2 * Q)
            for f in g.edge_faces(u, v):
                self.send(rule, e, F(f), Q)


def _tri_faces(run: _Run, v: int) -> list[int]:
    return [f for f in run.g.faces_at(v) if run.fdeg(f) == 3]


def _rules_mra(run: _Run) -> None:
    fcls = run.cls.faces
    for v, vc in run.internal(4, 4):
        faces = run.g.faces_at(v)
        tris = _tri_faces(run, v)
        t = len(tris)
        if t == 2:
            for f in tris:
                run.send("R1a", V(v), F(f), Q)
        elif t == 1:
            t2 = [f for f in tris if fcls[f].t_class == 2]
            if len(t2) > 1:
                raise RuleAmbiguity("R1b", V(v), "several incident T2-faces")
            if t2:
                for f, q in run.one_triangle_split("R1b", v, t2[0]).items():
                    run.send("R1b", V(v), F(f), q)
            else:
                for f in faces:
                    run.send("R1c", V(v), F(f), 2)
        elif t == 0:
            for f in faces:
                run.send("R1d", V(v), F(f), 2)
        else:
            run.led.flags.append(f"R1: internal 4-vertex {v} meets {t} 3-faces; no case applies")
    run.checkpoint("R1")
    for v, vc in run.internal(5):
        for f in run.g.faces_at(v):
            if run.fdeg(f) == 3:
                run.send("R2", V(v), F(f), 5 if fcls[f].is_special else 4)
            else:
                run.send("R2", V(v), F(f), 2)
    run.checkpoint("R2")
    run.boundary_routing()
    run.checkpoint("R3")
    vcls = run.cls.vertices
    for sink in sinks_and_sources(run.g, run.cls):
        for tri, x in sink.via:
            if vcls[x].is_internal and vcls[x].degree >= 5:
                if fcls[tri].is_special:
                    run.led.flags.append(f"R4: vertex {x} pays R2 and R4 through special face {tri}")
                run.send("R4", V(x), F(sink.face_id), 1, via=F(tri))
    run.checkpoint("R4")


def _rules_mrb(run: _Run) -> None:
    fcls = run.cls.faces
    for v, vc in run.internal(4, 4):
        tris = _tri_faces(run, v)
        t = len(tris)
        if t == 2:
            for f in tris:
                run.send("R1a", V(v), F(f), Q)
        elif t <= 1:
            for f in run.g.faces_at(v):
                fc = fcls[f]
                if fc.degree == 3:
                    q = 4 if fc.t_class == 2 else 2
                elif fc.is_internal and fc.degree in (4, 5):
                    q = 2
                elif fc.in_N:
                    q = 1
                else:
                    q = 0
                run.send("R1b", V(v), F(f), q)
        else:
            run.led.flags.append(f"R1: internal 4-vertex {v} meets {t} 3-faces; no case applies")
    run.checkpoint("R1")
    for v, vc in run.internal(5):
        for f in run.g.faces_at(v):
            run.send("R2", V(v), F(f), 5 if run.fdeg(f) == 3 else 2)
    run.checkpoint("R2")
    run.boundary_routing()
    run.checkpoint("R3")


def _rules_mrc(run: _Run) -> None:
    for v, vc in run.internal(4, 4):
        faces = run.g.faces_at(v)
        tris = _tri_faces(run, v)
        t = len(tris)
        if t == 2:
            for f in tris:
                run.send("R1a", V(v), F(f), Q)
        elif t == 1:
            for f, q in run.one_triangle_split("R1b", v, tris[0]).items():
                run.send("R1b", V(v), F(f), q)
        elif t == 0:
            for f in faces:
                run.send("R1c", V(v), F(f), 2)
        else:
            run.led.flags.append(f"R1: internal 4-vertex {v} meets {t} 3-faces; no case applies")
    run.checkpoint("R1")
    for v, vc in run.internal(5):
        for f in run.g.faces_at(v):
            run.send("R2", V(v), F(f), 4 if run.fdeg(f) == 3 else 2)
    run.checkpoint("R2")
    run.boundary_routing()
    run.checkpoint("R3")
    run.led.before_tod = dict(run.bal)
    p = 0
    for f in run.g.inner_faces:
        surplus = max(run.bal[F(f.id)], 0)
        run.send("TOD", F(f.id), run.D, surplus)
        p += surplus
    run.led.surplus_to_D = p
    run.checkpoint("TOD")


_RULES = {"MRA": _rules_mra, "MRB": _rules_mrb, "MRC": _rules_mrc}


def apply_rules(g: PlaneGraph, ruleset: str, cls: Classification | None = None) -> ChargeLedger:
    if ruleset not in _RULES:
        raise ValueError(f"unknown rule set {ruleset!r}; expected one of {RULESETS}")
    run = _Run(g, cls if cls is not None else classify(g), ruleset)
    _RULES[ruleset](run)
    run.led.final = run.bal
    return run.led


# -- verdicts --------------------------------------------------------------------


@dataclass
class Verdict:
    theorem: str
    all_nonnegative: bool
    positive_witness: Element | None
    violations: list[tuple[Element, int]]  # element, deficit (quarters, positive)

    @property
    def passed(self) -> bool:
        return self.all_nonnegative and self.positive_witness is not None


def verdict(ledger: ChargeLedger, g: PlaneGraph, theorem: str | None = None) -> Verdict:
    theorem = theorem or ledger.theorem
    D = ledger.outer
    if theorem == "MRC":
        if ledger.before_tod is None:
            raise ValueError("MRC verdict needs a ledger produced by the MRC rules")
        violations = [(el, -q) for el, q in sorted(ledger.before_tod.items(), key=lambda x: _element_order(x[0]))
                      if el != D and q < 0]
        d_final = ledger.final[D]
        if d_final < 0:
            violations.append((D, -d_final))
        witness = D if d_final > 0 else None
        return Verdict(theorem, not violations, witness, violations)
    violations = [(el, -q) for el in ledger.elements if (q := ledger.final[el]) < 0]
    special = set(g.special_edges())
    preferred, fallback = None, None
    for f in g.faces:
        q = ledger.final[F(f.id)]
        if q <= 0:
            continue
        if fallback is None:
            fallback = F(f.id)
        if preferred is None and f.id != g.outer_face_id and f.degree >= 4 and f.edge_set & special:
            preferred = F(f.id)
    return Verdict(theorem, not violations, preferred or fallback, violations)


# -- structural preconditions ---------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witnesses: tuple = ()


@dataclass
class PreconditionReport:
    theorem: str
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        bad = [c.name for c in self.failures]
        return "pass" if not bad else "fail(" + ",".join(bad) + ")"


def _outer_cycle_order(g: PlaneGraph) -> list[int]:
    return list(g.outer_face.vertices) if g.outer_face is not None else []


def check_preconditions(g: PlaneGraph, theorem: str, cls: Classification | None = None,
                        cycle_cap: int = 200_000) -> PreconditionReport:
    """Evaluate the structural properties the discharging argument relies on."""
    if theorem not in RULESETS:
        raise ValueError(f"unknown theorem {theorem!r}")
    cls = cls if cls is not None else classify(g)
    vcls, fcls = cls.vertices, cls.faces
    checks: list[Check] = []

    def add(name: str, witnesses: list) -> None:
        checks.append(Check(name, not witnesses, tuple(witnesses)))

    outer = g.outer_face
    ocycle = _outer_cycle_order(g)
    ov = g.outer_vertices
    add("outer_boundary_is_cycle", [] if outer is not None and outer.is_cycle() else [tuple(ocycle)])
    bound = OUTER_BOUND[theorem]
    add("outer_length_bound", [] if outer is not None and outer.degree <= bound else [len(ocycle)])
    oe = g.outer_edges
    add("outer_cycle_induced", [e for e in g.edges if e[0] in ov and e[1] in ov and e not in oe])
    add("has_internal_vertex", [] if any(v not in ov for v in g.vertices) else [tuple(g.vertices)])
    if theorem == "MRA":
        add("two_connected", [] if g.is_biconnected() else [tuple(g.vertices)])
    add("internal_min_degree_4", [v for v in g.vertices if v not in ov and g.degree(v) < 4])
    hi = 7 if theorem == "MRC" else 6
    add(f"no_separating_3_to_{hi}_cycle", [r.cycle for r in separating_cycles(g, 3, hi, cap=cycle_cap)])

    if theorem in ("MRA", "MRC"):
        bad = []
        n = len(ocycle)
        if outer is not None and outer.is_cycle():
            for i in range(n):
                for j in range(i + 2, n):
                    if i == 0 and j == n - 1:
                        continue
                    x, y = ocycle[i], ocycle[j]
                    for z in sorted(g.neighbors(x) & g.neighbors(y)):
                        if z not in ov:
                            bad.append((x, y, z))
        add("no_common_internal_neighbor", bad)

    if theorem == "MRA":
        sinks = sinks_and_sources(g, cls)
        add("sink_outer_sources_at_most_one",
            [s.face_id for s in sinks if sum(1 for x in s.sources if x in ov) > 1])
        add("sink_internal_sources_5plus",
            [(s.face_id, x) for s in sinks for x in s.sources if x not in ov and g.degree(x) < 5])

    if theorem in ("MRA", "MRB"):
        four_faces = {f.id for f in g.faces if f.degree == 4}
        add("no_4_2_vertex_on_4_face",
            [(v, f) for v, vc in vcls.items() if vc.is_4k(2) for f in g.faces_at(v) if f in four_faces])

    if theorem == "MRB":
        add("at_most_two_3_faces_per_vertex",
            [v for v, vc in vcls.items() if vc.degree >= 4 and vc.incident_triangle_count > 2])

    if theorem == "MRC":
        bad = []
        for f in g.inner_faces:
            if f.degree != 4:
                continue
            for u, v in f.darts:
                other = g.face_of_dart[(v, u)]
                if g.faces[other].degree < 4:
                    bad.append((f.id, other))
        add("four_faces_adjacent_to_4plus_faces", bad)

    if theorem in ("MRA", "MRB"):
        bad = []
        for f, fc in fcls.items():
            if fc.is_special:
                degs = sorted(g.degree(x) for x in g.faces[f].vertex_set)
                if not (degs[0] == 4 and degs[1] >= 5):
                    bad.append(f)
        add("special_faces_are_4_5plus_5plus", bad)
        special = set(g.special_edges())
        ok = any(f.degree >= 4 and f.edge_set & special for f in g.inner_faces)
        add("special_edge_on_4plus_face", [] if ok else [tuple(sorted(special))])
    return PreconditionReport(theorem, checks)


# -- displayed arithmetic ---------------------------------------------------------------


@dataclass(frozen=True)
class ArithmeticCheck:
    name: str
    value: Fraction
    relation: str  # "==", ">=", ">"
    target: Fraction

    @property
    def passed(self) -> bool:
        if self.relation == "==":
            return self.value == self.target
        if self.relation == ">=":
            return self.value >= self.target
        return self.value > self.target


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def lemma_arithmetic_suite(max_degree: int = 64, samples: int = 200, seed: int = 0) -> list[ArithmeticCheck]:
    """Exact re-evaluation of every closed-form charge computation."""
    import random

    fr = Fraction
    q4, h = fr(1, 4), fr(1, 2)
    out: list[ArithmeticCheck] = []

    def chk(name, value, rel, target=0):
        out.append(ArithmeticCheck(name, fr(value), rel, fr(target)))

    # MRA
    chk("MRA internal 4_2-vertex", 2 - 2 * 1, "==")
    chk("MRA internal 4_1-vertex with T2-face", 2 - 1 - h - 2 * q4, "==")
    chk("MRA internal 4_1-vertex without T2-face", 2 - 4 * h, "==")
    chk("MRA internal 4_0-vertex", 2 - 4 * h, "==")
    for d in range(5, max_degree + 1):
        chk(f"MRA internal {d}-vertex", 2 * d - 6 - _floor_div(d, 2) * fr(5, 4) - _ceil_div(d, 2) * h, ">=")
    chk("MRA T2-face", -3 + 1 + 2, "==")
    chk("MRA T1-face", -3 + 2 * h + 2, "==")
    chk("MRA internal non-special 3-face", -3 + 3 * 1, "==")
    chk("MRA special face", -3 + h + 2 * fr(5, 4), "==")
    chk("MRA 4+-face in N", -2 + 2, "==")
    chk("MRA internal 4-face", -2 + 4 * h, "==")
    chk("MRA internal 5-face with two 5+-vertices", -1 + 2 * h, "==")
    chk("MRA 5-face next to a 4+-face", -1 + 2 * h, "==")
    chk("MRA sink", -1 + 4 * q4, "==")
    chk("MRA f* as 5+-face", -1 + 2, ">")
    chk("MRA f* as 4-face", -2 + 2 + q4, ">")
    # MRB
    chk("MRB internal 4_2-vertex", 2 - 2 * 1, "==")
    chk("MRB internal 4_1-vertex with T2-face", 2 - 1 - h - 2 * q4, "==")
    chk("MRB internal 4_1-vertex without T2-face", 2 - 4 * h, "==")
    chk("MRB internal 4_0-vertex", 2 - 4 * h, "==")
    for d in range(5, max_degree + 1):
        lhs = 2 * d - 6 - 2 * fr(5, 4) - (d - 2) * h
        chk(f"MRB internal {d}-vertex identity", lhs, "==", fr(3, 2) * (d - 5))
        chk(f"MRB internal {d}-vertex", lhs, ">=")
    chk("MRB T2-face", -3 + 1 + 2, "==")
    chk("MRB T1-face", -3 + 2 * h + 2, "==")
    chk("MRB internal non-special 3-face", -3 + 3 * 1, "==")
    chk("MRB special face", -3 + h + 2 * fr(5, 4), "==")
    chk("MRB 4+-face in N", -2 + 2, "==")
    chk("MRB internal 4-face", -2 + 4 * h, "==")
    chk("MRB internal 5-face", -1 + 3 * h, ">")
    chk("MRB f* as 5+-face", -1 + 2, ">")
    chk("MRB f* as 4-face next to a 4-vertex", -2 + 2 + q4, ">")
    chk("MRB f* as 4-face next to a 5+-vertex", -2 + 2 + h, ">")
    # MRC
    chk("MRC internal 4_2-vertex", 2 - 2 * 1, "==")
    chk("MRC internal 4_1-vertex", 2 - 1 - h - 2 * q4, "==")
    chk("MRC internal 4_0-vertex", 2 - 4 * h, "==")
    for d in range(5, max_degree + 1):
        chk(f"MRC internal {d}-vertex", 2 * d - 6 - _floor_div(2 * d, 3) * 1 - _ceil_div(d, 3) * h, ">=")
    chk("MRC 3-face in N", -3 + 2 + 1, "==")
    chk("MRC 4-face in N", -2 + 2, "==")
    chk("MRC 5+-face in N", -1 + 2, "==", 1)
    chk("MRC internal 3-face", -3 + 3 * 1, "==")
    chk("MRC internal 4-face", -2 + 4 * h, "==")
    chk("MRC internal 5-face", -1 + h + 2 * q4, "==")
    chk("MRC 4-face in N sends at least 1", 4 - 6 + 2 + 2 * h, "==", 1)
    chk("MRC 6+-face in N sends at least 2", 6 - 6 + 2, "==", 2)
    for d in (6, 7):
        chk(f"MRC outer {d}-face with a 6+-face in N", 6 - d + 2, ">")
        chk(f"MRC outer {d}-face with two 4+-faces in N", 6 - d + 2 * 1, ">")
    # outer face bookkeeping on sampled boundary degree sequences
    rng = random.Random(seed)
    for i in range(samples):
        n = rng.randint(3, 7)
        degs = [rng.randint(2, 12) for _ in range(n)]
        p = fr(rng.randint(0, 40), 4)
        mu_d = (n + 6) + sum(2 * d - 6 for d in degs) - 2 * sum(d - 2 for d in degs)
        chk(f"outer face identity sample {i}", mu_d, "==", 6 - n)
        chk(f"MRC outer face with surplus sample {i}", mu_d + p, "==", 6 - n + p)
    return out
