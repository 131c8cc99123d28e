"""End-to-end acceptance checks, one test per criterion.

Run ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""

import functools
import itertools
import random
import time

import pytest

from dpcolor.discharging import RULESETS, apply_rules, check_preconditions, initial_charges, verdict
from dpcolor.dp_core import (
    PreconditionViolated,
    edge_predicates,
    identify,
    is_consistent,
    lift_coloring,
    random_assignment,
    straighten,
)
from dpcolor.harness.campaign import CampaignSpec, run_campaign
from dpcolor.harness.generators import generate, named
from dpcolor.patterns import PATTERNS, contains
from dpcolor.plane_graph import SimpleGraph, classify, edge_key
from dpcolor.solver import SearchProblem, Status, adversarial_chi_dp, find_mcoloring

from oracles import all_colorings, contains_pattern, simple_cycles

STRESS_INSTANCES = 300


@functools.lru_cache(maxsize=None)
def euler_corpus():
    out = []
    for s in range(1000):
        n = 4 + s % 21
        profile = ["triangulation", "triangulation(0.4)", f"outer-cycle({min(n, 3 + s % 5)})"][s % 3]
        out.append(generate(profile, n, s))
    return out


@functools.lru_cache(maxsize=None)
def stress(theorem):
    spec = CampaignSpec(theorem, STRESS_INSTANCES, size_range=(8, 20), seed=2024)
    return run_campaign(spec)


def _induced_outer(g):
    ov = g.outer_vertices
    return g.outer_face.is_cycle() and all(e in g.outer_edges for e in g.edges if e[0] in ov and e[1] in ov)


def test_criterion_01_euler_charge_identity(note):
    start = time.perf_counter()
    corpus = euler_corpus()
    sizes = [len(g.vertices) for g in corpus]
    assert len(corpus) == 1000 and min(sizes) >= 4 and max(sizes) <= 24
    for g in corpus:
        assert sum(initial_charges(g).initial.values()) == 0
    elapsed = time.perf_counter() - start
    note(f"1000 graphs, {min(sizes)}-{max(sizes)} vertices, {elapsed:.1f}s including generation")
    assert elapsed < 10


def test_criterion_02_case_arithmetic(note):
    # the individual cases live in test_discharging.py; this re-runs them as one gate
    import test_discharging as td

    cases = [
        td.test_mra_4_2_vertex_ends_at_zero,
        td.test_mra_4_1_vertex_with_t2_face_ends_at_zero,
        td.test_mra_special_face_ends_at_zero,
        td.test_mra_sink_with_one_outer_source_ends_at_zero,
        functools.partial(td.test_outer_face_ends_at_six_minus_degree, "MRA"),
        functools.partial(td.test_outer_face_ends_at_six_minus_degree, "MRB"),
        td.test_mrb_five_face_with_three_half_senders,
        td.test_mrb_big_vertex_with_two_triangles,
        td.test_mrc_4_1_vertex_ends_at_zero,
        td.test_mrc_outer_face_identity,
        td.test_mrc_four_face_in_n_sends_at_least_one,
        td.test_mrc_six_face_in_n_pushes_d_positive,
        td.test_lemma_suite_passes,
    ]
    for case in cases:
        case()
    note(f"{len(cases)} displayed computations reproduced exactly")


def test_criterion_03_conservation(note):
    checked = 0
    for g in euler_corpus():
        for th in RULESETS:
            led = apply_rules(g, th)
            bal = dict(led.initial)
            total = sum(bal.values())
            for t in led.transfers:
                bal[t.src] -= t.amount
                bal[t.dst] += t.amount
                assert sum(bal.values()) == total == 0
            assert bal == led.final
            checked += 1
    note(f"{checked} ledgers, every single transfer")


def test_criterion_04_special_edge_fidelity(note):
    edges_checked = faces_checked = skipped = 0
    for g in euler_corpus():
        induced = _induced_outer(g) and len(g.outer_vertices) < len(g.vertices)
        cls = classify(g)
        for th in RULESETS:
            led = apply_rules(g, th, cls)
            for e, (got, sent) in led.special_edge_flows().items():
                assert got == sent and led.final[("e", e)] == 0
                edges_checked += 1
            if not induced:
                skipped += 1
                continue
            via = led.received_via_special_edges()
            for f, c in cls.faces.items():
                if c.in_N:
                    assert via.get(("f", f), 0) >= 8
                    faces_checked += 1
    note(f"{edges_checked} special edges net 0; {faces_checked} faces in N got >=2; "
         f"{skipped} ledgers without an induced outer cycle skipped for the N check")


@pytest.mark.parametrize("theorem", ["MRA", "MRB", "MRC"])
def test_criterion_05_extension_stress(theorem, note):
    res = stress(theorem)
    c = res.counters
    assert c["filter_pass"] >= STRESS_INSTANCES and c["errors"] == 0
    per_instance = {}
    for r in res.records:
        assert r.n <= 20
        cyc = [s for s in r.searches if "/p" in s.search_id]
        assert len({s.search_id.split("/")[1] for s in cyc}) >= 4
        per_instance[r.instance_id] = len(cyc)
    assert min(per_instance.values()) >= 4 * 8
    assert c[str(Status.NO_EXTENSION)] == 0
    assert c[str(Status.BUDGET_EXHAUSTED)] == 0
    assert c["revalidation_failures"] == 0
    assert res.max_search_seconds < 1.0
    single = sum(1 for r in res.records for s in r.searches if "/v" in s.search_id)
    note(f"{theorem}: {c['instances']} instances, {c['searches']} searches ({single} single-vertex), "
         f"all Extended, slowest {res.max_search_seconds * 1000:.1f} ms")


def test_criterion_06_verdict_on_clean_instances(note):
    clean = 0
    failures = []
    nearly = 0
    for th in RULESETS:
        for r in stress(th).records:
            if r.filter_passed and r.preconditions_passed:
                clean += 1
                if not r.verdict_passed:
                    failures.append(r.instance_id)
            elif r.filter_passed and r.preconditions.count(",") == 0:
                nearly += 1
    assert not failures, failures
    note(f"{clean} instances satisfy filter and all preconditions; "
         f"{nearly} fail exactly one precondition; zero violations")


def test_criterion_07_solver_oracle_equivalence(note):
    rng = random.Random(7)
    agree = colorable = 0
    profiles = ["full-random-perfect", "identity-with-twists(0.5)", "sparse(0.7)"]
    for i in range(200):
        n = rng.randint(3, 9)
        g = generate(rng.choice(["triangulation", "triangulation(0.4)"]), n, i)
        k = rng.choice([2, 3])
        m = random_assignment(g, k, i, profiles[i % 3])
        pre = {}
        if i % 4 == 0:
            v = rng.choice(g.vertices)
            pre = {v: rng.randint(1, k)}
        sols = all_colorings(g.vertices, g.edges, k, m.pairs, pre)
        out = find_mcoloring(SearchProblem(g, m, pre))
        assert (out.status is Status.EXTENDED) == bool(sols)
        if out.coloring is not None:
            assert out.coloring in sols
        agree += 1
        colorable += bool(sols)
    note(f"{agree}/200 agree ({colorable} colorable, {agree - colorable} not)")


def test_criterion_08_dp_chromatic_ground_truths(note):
    cases = [(f"C{n}", named(f"C{n}"), 3) for n in range(3, 9)]
    cases.append(("K4", named("K4"), 4))
    cases.append(("tree", SimpleGraph(range(6), [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]), 2))
    cases.append(("K2", SimpleGraph([0, 1], [(0, 1)]), 2))
    slowest = 0.0
    for name, g, want in cases:
        start = time.perf_counter()
        assert adversarial_chi_dp(g, symmetry_reduction=True).chi == want, name
        slowest = max(slowest, time.perf_counter() - start)
        assert slowest < 5
    note(f"{len(cases)} graphs, slowest {slowest:.2f}s")


def _cycles_consistent(m, edges):
    vs = sorted({x for e in edges for x in e})
    for c in simple_cycles(vs, edges, len(vs)):
        closed = list(c) + [c[0]]
        if not is_consistent(m, closed)[0]:
            return False
    return True


def test_criterion_09_straightening(note):
    rng = random.Random(9)
    ok = violated = 0
    for i in range(500):
        n = rng.randint(3, 8)
        g = generate("triangulation(0.3)", n, 10_000 + i)
        k = rng.choice([2, 3])
        m = random_assignment(g, k, i, "identity-with-twists(0.25)")
        h = rng.sample(list(g.edges), rng.randint(1, len(g.edges)))
        holds = _cycles_consistent(m, h)
        try:
            res = straighten(g, m, h)
        except PreconditionViolated as exc:
            assert not holds
            cyc = list(exc.cycle)
            hset = {edge_key(*e) for e in h}
            assert all(edge_key(cyc[j], cyc[(j + 1) % len(cyc)]) in hset for j in range(len(cyc)))
            assert not is_consistent(m, cyc + [cyc[0]])[0]
            violated += 1
            continue
        assert holds
        assert all(edge_predicates(res.assignment, e).is_straight for e in h)
        before = all_colorings(g.vertices, g.edges, k, m.pairs)
        after = all_colorings(g.vertices, g.edges, k, res.assignment.pairs)
        assert len(before) == len(after)
        assert sorted(sorted(res.map_coloring(c).items()) for c in before) == sorted(sorted(c.items()) for c in after)
        ok += 1
    assert ok > 0 and violated > 0
    note(f"{ok} triples straightened with counts preserved, {violated} violating cycles reported")


def _bipartite_hosts(rng, count):
    out = []
    for i in range(count):
        g = generate("triangulation(0.2)", rng.randint(4, 10), 20_000 + i)
        side = {g.vertices[0]: 0}
        stack = [g.vertices[0]]
        while stack:
            x = stack.pop()
            for y in sorted(g.neighbors(x)):
                if y not in side:
                    side[y] = 1 - side[x]
                    stack.append(y)
        out.append(SimpleGraph(g.vertices, [e for e in g.edges if side[e[0]] != side[e[1]]]))
    return out


def test_criterion_10_pattern_detection(note):
    rng = random.Random(10)
    hosts = [generate(rng.choice(["triangulation", "triangulation(0.3)"]), rng.randint(4, 10), 30_000 + i)
             for i in range(80)]
    planted = [named("K4"), named("bowtie"), named("house")]
    bipartite = _bipartite_hosts(rng, 17)
    corpus = hosts + planted + bipartite
    assert len(corpus) == 100
    pairs = positives = 0
    for g in corpus:
        for p in PATTERNS.values():
            got = contains(g, p) is not None
            assert got == contains_pattern(g.vertices, g.edges, len(p.labels), p.edges), (p.pattern_id, g)
            pairs += 1
            positives += got
    assert contains(planted[0], "FIG2_A") is not None
    assert contains(planted[1], "FIG3_A") is not None
    assert contains(planted[2], "FIG4_A") is not None
    for g in bipartite:
        assert all(contains(g, p) is None for p in PATTERNS)
    note(f"{pairs} (pattern, host) pairs agree with the oracle, {positives} positives")


def _four_shaped(rng, seed, kind):
    """A graph with a 4-vertex w whose neighbours w1..w4 are arranged as in the
    identification arguments; returns (graph, removed, w2, w4, lift order)."""
    while True:
        base = generate("triangulation(0.5)", rng.randint(4, 6), seed)
        seed += 7919
        vs = list(base.vertices)
        pairs = [(a, b) for a, b in itertools.combinations(vs, 2)
                 if not base.has_edge(a, b) and not (base.neighbors(a) & base.neighbors(b))]
        if pairs:
            break
    w2, w4 = rng.choice(pairs)
    nxt = max(vs) + 1
    w, w1, w3 = nxt, nxt + 1, nxt + 2
    edges = list(base.edges) + [(w, w1), (w, w2), (w, w3), (w, w4)]
    others = [x for x in vs if x not in (w2, w4)] or vs
    edges += [(w1, x) for x in rng.sample(vs, min(3, len(vs)))]
    if kind == "FOUR1":
        edges += [(w3, x) for x in rng.sample(vs, min(3, len(vs)))]
        removed, order = [w, w1, w3], [w1, w3, w]
    else:
        edges += [(w3, rng.choice(others))]
        removed, order = [w, w1], [w1, w]
    g = SimpleGraph(vs + [w, w1, w3], edges)
    return g, w, removed, w2, w4, order


def test_criterion_11_identification_lift(note):
    rng = random.Random(11)
    lifted = 0
    for i in range(50):
        kind = "FOUR1" if i % 2 == 0 else "FOUR2"
        g, w, removed, w2, w4, order = _four_shaped(rng, 40_000 + i, kind)
        m0 = random_assignment(g, 4, i)
        m = straighten(g, m0, [(w, x) for x in sorted(g.neighbors(w))]).assignment
        g2, m2 = identify(g, m, removed, w2, w4)
        sols = all_colorings(g2.vertices, g2.edges, 4, m2.pairs)
        assert sols
        for col in sols:
            full = lift_coloring(g, m, col, w2, w4, order)
            assert full is not None
            assert set(full) == set(g.vertices)
            for u, v in g.edges:
                assert (full[u], full[v]) not in m.pairs(u, v)
            lifted += 1
    note(f"50 instances, {lifted} identified-graph colorings lifted and verified")
