from fractions import Fraction

import pytest

from dpcolor.discharging import (
    RULESETS,
    E,
    EulerSumNonzero,
    F,
    V,
    apply_rules,
    check_preconditions,
    initial_charges,
    lemma_arithmetic_suite,
    verdict,
)
from dpcolor.harness.formats import ledger_report
from dpcolor.harness.generators import GenerationFailed, generate, named
from dpcolor.plane_graph import classify, from_coordinates, sinks_and_sources


def _corpus():
    out = []
    for s in range(150):
        k = 3 + s % 5
        for prof in (f"outer-cycle({k})", f"outer-cycle({k},0.3)"):
            try:
                out.append(generate(prof, 10 + s % 10, s))
            except GenerationFailed:
                pass
    return out


CORPUS = _corpus()


def _induced_outer(g):
    ov = g.outer_vertices
    return g.outer_face.is_cycle() and all(
        e in g.outer_edges for e in g.edges if e[0] in ov and e[1] in ov
    )


def _clean_corners(g, v):
    """All corners at v lie in distinct faces."""
    return len(g.faces_at(v)) == g.degree(v)


def _cases(pred):
    for g in CORPUS:
        cls = classify(g)
        for item in pred(g, cls):
            yield g, cls, item


# -- initial charges -----------------------------------------------------------------


def test_c6_initial_charges():
    led = initial_charges(named("C6"))
    assert [led.initial[V(v)] for v in range(6)] == [-8] * 6
    inner = next(f for f in named("C6").inner_faces)
    assert led.initial[F(inner.id)] == 0
    assert led.initial[led.outer] == 48
    assert sum(led.initial.values()) == 0


def test_k4_initial_charges():
    g = named("K4")
    led = initial_charges(g)
    assert all(led.initial[V(v)] == 0 for v in g.vertices)
    assert sorted(led.initial[F(f.id)] for f in g.faces) == [-12, -12, -12, 36]


def test_euler_sum_guard(monkeypatch):
    g = named("K4")
    monkeypatch.setattr(g, "special_edges", lambda: ((0, 3),))
    led = initial_charges(g)
    assert led.initial[E(0, 3)] == 0
    monkeypatch.setattr(type(g.faces[0]), "degree", property(lambda f: 4))
    with pytest.raises(EulerSumNonzero):
        initial_charges(g)


# -- the displayed final charges ----------------------------------------------------


def test_mra_4_2_vertex_ends_at_zero():
    def pick(g, cls):
        return [v for v, c in cls.vertices.items() if c.is_internal and c.is_4k(2) and _clean_corners(g, v)]

    seen = 0
    for g, cls, v in _cases(pick):
        led = apply_rules(g, "MRA", cls)
        out = [t for t in led.transfers if t.src == V(v)]
        assert sorted(t.amount for t in out) == [4, 4]
        assert all(g.faces[t.dst[1]].degree == 3 for t in out)
        assert led.final[V(v)] == 8 - 2 * 4 == 0
        seen += 1
    assert seen > 0


def test_mra_4_1_vertex_with_t2_face_ends_at_zero():
    def pick(g, cls):
        out = []
        for v, c in cls.vertices.items():
            if c.is_internal and c.is_4k(1) and _clean_corners(g, v) and g.is_biconnected():
                tri = [f for f in g.faces_at(v) if g.faces[f].degree == 3][0]
                if cls.faces[tri].t_class == 2:
                    out.append(v)
        return out

    seen = 0
    for g, cls, v in _cases(pick):
        led = apply_rules(g, "MRA", cls)
        sent = sorted(t.amount for t in led.transfers if t.src == V(v))
        assert sent == [1, 1, 2, 4]  # 1/4, 1/4, 1/2, 1
        assert led.final[V(v)] == 8 - 4 - 2 - 2 * 1 == 0
        seen += 1
    assert seen > 0


def test_mra_special_face_ends_at_zero():
    def pick(g, cls):
        out = []
        for f, c in cls.faces.items():
            if c.is_special:
                degs = sorted(g.degree(x) for x in g.faces[f].vertices)
                if degs[0] == 4 and degs[1] >= 5:
                    out.append(f)
        return out

    seen = 0
    for g, cls, f in _cases(pick):
        led = apply_rules(g, "MRA", cls)
        got = sorted(t.amount for t in led.transfers if t.dst == F(f))
        assert got == [2, 5, 5]
        assert led.final[F(f)] == -12 + 2 + 2 * 5 == 0
        seen += 1
    assert seen > 0


def test_mra_sink_with_one_outer_source_ends_at_zero():
    g = named("sink-patch")
    led = apply_rules(g, "MRA")
    sink = sinks_and_sources(g)[0]
    r4 = [t for t in led.transfers if t.rule == "R4"]
    assert len(r4) == 4 and all(t.amount == 1 and t.dst == F(sink.face_id) for t in r4)
    assert {t.src for t in r4} == {V(x) for x in (1, 2, 3, 4)}
    assert led.final[F(sink.face_id)] == -4 + 4 * 1 == 0


@pytest.mark.parametrize("theorem", ["MRA", "MRB"])
def test_outer_face_ends_at_six_minus_degree(theorem):
    seen = 0
    for g in CORPUS:
        if not _induced_outer(g):
            continue
        led = apply_rules(g, theorem)
        assert led.final[led.outer] == 4 * (6 - g.outer_face.degree)
        seen += 1
    assert seen > 50


def test_mrb_five_face_with_three_half_senders():
    seen = 0
    for g in CORPUS:
        cls = classify(g)
        led = apply_rules(g, "MRB", cls)
        for f, c in cls.faces.items():
            if c.is_internal and c.degree == 5:
                into = [t.amount for t in led.transfers if t.dst == F(f)]
                if sorted(into) == [2, 2, 2]:
                    assert led.final[F(f)] == -4 + 3 * 2 == 2
                    seen += 1
    assert seen > 0


def test_mrb_big_vertex_with_two_triangles():
    seen = 0
    for g in CORPUS:
        cls = classify(g)
        led = apply_rules(g, "MRB", cls)
        for v, c in cls.vertices.items():
            if c.is_internal and c.degree >= 5 and c.incident_triangle_count == 2 and _clean_corners(g, v):
                d = c.degree
                assert Fraction(led.final[V(v)], 4) == Fraction(3, 2) * (d - 5)
                seen += 1
    assert seen > 0


def test_mrc_4_1_vertex_ends_at_zero():
    seen = 0
    for g in CORPUS:
        if not g.is_biconnected():
            continue
        cls = classify(g)
        led = apply_rules(g, "MRC", cls)
        for v, c in cls.vertices.items():
            if c.is_internal and c.is_4k(1) and _clean_corners(g, v):
                assert led.final[V(v)] == 8 - 4 - 2 - 1 - 1 == 0
                seen += 1
    assert seen > 0


def test_mrc_outer_face_identity():
    seen = 0
    for g in CORPUS:
        if not _induced_outer(g):
            continue
        led = apply_rules(g, "MRC")
        assert led.final[led.outer] == 4 * (6 - g.outer_face.degree) + led.surplus_to_D
        assert led.surplus_to_D == sum(t.amount for t in led.transfers if t.rule == "TOD")
        seen += 1
    assert seen > 50


def test_mrc_four_face_in_n_sends_at_least_one():
    seen = 0
    for g in CORPUS:
        cls = classify(g)
        led = apply_rules(g, "MRC", cls)
        via = led.received_via_special_edges()
        for f, c in cls.faces.items():
            if c.in_N and c.degree == 4 and via.get(F(f), 0) == 8:
                from_vertices = sorted(t.amount for t in led.transfers if t.dst == F(f) and t.src[0] == "v")
                if from_vertices == [2, 2]:
                    assert led.transfers_from(F(f), "TOD") == 4 * (4 - 6) + 8 + 2 * 2 == 4
                    seen += 1
    assert seen > 0


def test_mrc_six_face_in_n_pushes_d_positive():
    seen = 0
    for g in CORPUS:
        if not _induced_outer(g):
            continue
        cls = classify(g)
        big = [f for f, c in cls.faces.items() if c.in_N and c.degree >= 6]
        if not big:
            continue
        led = apply_rules(g, "MRC", cls)
        assert all(led.transfers_from(F(f), "TOD") >= 8 for f in big)
        assert led.final[led.outer] >= 4 * (6 - g.outer_face.degree + 2) > 0
        seen += 1
    assert seen > 0


# -- invariants ---------------------------------------------------------------------


@pytest.mark.parametrize("theorem", RULESETS)
def test_conservation_and_replay(theorem):
    for g in CORPUS[::3]:
        led = apply_rules(g, theorem)
        assert all(total == 0 for _, total in led.rule_totals)
        assert led.replay() == led.final
        assert sum(led.final.values()) == 0


@pytest.mark.parametrize("theorem", RULESETS)
def test_special_edges_pass_through(theorem):
    for g in CORPUS[::3]:
        led = apply_rules(g, theorem)
        for e, (got, sent) in led.special_edge_flows().items():
            assert got == sent == 8
            assert led.final[("e", e)] == 0


def test_faces_in_n_receive_two_when_outer_is_induced():
    for g in CORPUS:
        if not _induced_outer(g) or len(g.outer_vertices) == len(g.vertices):
            continue
        cls = classify(g)
        led = apply_rules(g, "MRA", cls)
        via = led.received_via_special_edges()
        for f, c in cls.faces.items():
            if c.in_N:
                assert via.get(F(f), 0) >= 8


def test_rule_amounts_are_quarter_multiples_from_the_allowed_set():
    allowed = {1, 2, 4, 5, 8}
    for g in CORPUS[::5]:
        for th in RULESETS:
            for t in apply_rules(g, th).transfers:
                if t.rule in ("R3", "TOD") and t.src[0] != "e" and t.dst[0] != "e":
                    continue  # vertex charges and surpluses routed to D
                assert t.amount in allowed, t


# -- preconditions and verdicts -------------------------------------------------------


def test_common_internal_neighbor_is_reported():
    import math

    pos = {i: (math.cos(math.pi * i / 3), math.sin(math.pi * i / 3)) for i in range(6)}
    pos[6] = (0.0, 0.0)
    edges = [(i, (i + 1) % 6) for i in range(6)] + [(0, 6), (3, 6)]
    g = from_coordinates(pos, edges)
    rep = check_preconditions(g, "MRA")
    bad = {c.name: c for c in rep.failures}
    assert (0, 3, 6) in bad["no_common_internal_neighbor"].witnesses
    assert 6 in bad["internal_min_degree_4"].witnesses


def test_internal_three_vertex_breaks_the_verdict():
    g = named("K4")
    rep = check_preconditions(g, "MRA")
    assert 3 in {c.name: c for c in rep.failures}["internal_min_degree_4"].witnesses
    led = apply_rules(g, "MRA")
    ver = verdict(led, g)
    assert not ver.all_nonnegative
    # each T2-face gets only its two special-edge units: -3 + 2
    assert sorted(q for el, q in ver.violations) == [4, 4, 4]


def test_wheel_checks():
    g = named("W6")
    rep = check_preconditions(g, "MRB")
    names = {c.name for c in rep.failures}
    assert "at_most_two_3_faces_per_vertex" in names
    assert "outer_cycle_induced" not in names


def test_mrc_verdict_uses_pre_tod_charges():
    g = named("W7")
    led = apply_rules(g, "MRC")
    ver = verdict(led, g)
    assert led.before_tod is not None
    assert ver.positive_witness in (None, led.outer)


def test_verdict_needs_mrc_ledger():
    g = named("W5")
    led = apply_rules(g, "MRA")
    with pytest.raises(ValueError):
        verdict(led, g, "MRC")


def test_unknown_ruleset():
    with pytest.raises(ValueError):
        apply_rules(named("K4"), "MRD")


def test_ledger_report_lines():
    g = named("sink-patch")
    led = apply_rules(g, "MRA")
    lines = ledger_report(led, verdict(led, g))
    assert any(line.startswith("charge D init=") for line in lines)
    assert any(line.startswith("xfer R4 v1 -> f") and line.endswith("via f" + str(led.transfers[-4].via[1])) for line in lines)
    assert lines[-1].startswith("verdict MRA ")


# -- closed-form arithmetic ----------------------------------------------------------


def test_lemma_suite_passes():
    checks = lemma_arithmetic_suite()
    assert checks and all(c.passed for c in checks)


def test_lemma_suite_spot_values():
    checks = {c.name: c for c in lemma_arithmetic_suite()}
    assert checks["MRB internal 5-vertex identity"].value == 0
    assert checks["MRA internal 5-vertex"].value == 0  # 4 - 2*5/4 - 3*1/2
    assert checks["MRC 4-face in N sends at least 1"].value == 1
