import pytest
from hypothesis import given, settings, strategies as st

from dpcolor.harness.generators import generate, named
from dpcolor.patterns import (
    PATTERNS,
    THEOREM_PATTERNS,
    contains,
    first_violation,
    generic_predicates,
    hypothesis_filter,
    iter_embeddings,
)
from dpcolor.plane_graph import SimpleGraph

from oracles import contains_pattern


def test_every_pattern_is_connected_and_planar_sized():
    for p in PATTERNS.values():
        assert p.graph.is_connected()
        assert len(p.edges) <= 3 * len(p.labels) - 6


def test_pattern_shapes():
    assert [len(PATTERNS[p].labels) for p in THEOREM_PATTERNS["MRA"]] == [4, 6, 8]
    assert PATTERNS["FIG1_A"].edges == PATTERNS["FIG4_A"].edges
    # the bowtie: two triangles meeting in one vertex
    bowtie = PATTERNS["FIG3_A"].graph
    assert sorted(bowtie.degree(v) for v in bowtie.vertices) == [2, 2, 2, 2, 4]


def test_planted_positives():
    assert contains(named("K4"), "FIG2_A") is not None
    assert contains(named("bowtie"), "FIG3_A") is not None
    assert contains(named("house"), "FIG4_A") is not None
    assert contains(named("house"), "FIG1_A") is not None


def test_witness_maps_edges_to_edges():
    g = named("W6")
    for pid in PATTERNS:
        w = contains(g, pid)
        if w is not None:
            assert len(set(w.mapping.values())) == len(w.mapping)
            assert all(g.has_edge(*e) for e in w.image_edges())


def test_bipartite_hosts_are_negative():
    grid = SimpleGraph(range(9), [(i, i + 1) for i in range(9) if i % 3 != 2] + [(i, i + 3) for i in range(6)])
    for pid in PATTERNS:
        assert contains(grid, pid) is None
    for th in THEOREM_PATTERNS:
        assert hypothesis_filter(grid, th).passed


def test_filter_verdicts():
    bowtie = named("bowtie")
    assert not hypothesis_filter(bowtie, "MRB").passed
    assert hypothesis_filter(bowtie, "MRA").passed
    assert not hypothesis_filter(named("house"), "MRC").passed
    assert first_violation(named("K4"), "MRA").pattern_id == "FIG2_A"
    with pytest.raises(ValueError):
        hypothesis_filter(bowtie, "XYZ")


def test_generic_predicates():
    k4 = generic_predicates(named("K4"))
    assert all(w is not None for w in k4.values())
    bt = generic_predicates(named("bowtie"))
    assert bt["intersecting_triangles"] is not None
    assert bt["adjacent_triangles"] is None
    assert bt["triangle_adjacent_to_4cycle"] is None


def test_ll_filter_uses_four_cycle_with_two_triangles():
    # K4 minus nothing: 4-cycle 0-1-3-2 is adjacent to several triangles
    assert not hypothesis_filter(named("K4"), "LL").passed
    assert hypothesis_filter(named("C6"), "LL").passed


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 10), st.integers(0, 10**6))
def test_matcher_agrees_with_oracle(n, seed):
    g = generate("triangulation(0.35)", n, seed)
    for p in PATTERNS.values():
        found = contains(g, p) is not None
        assert found == contains_pattern(g.vertices, g.edges, len(p.labels), p.edges), p.pattern_id


def test_embedding_count_of_triangle_in_k4():
    tri = SimpleGraph(range(3), [(0, 1), (1, 2), (0, 2)])
    # 4 triangles, 6 automorphisms each
    assert sum(1 for _ in iter_embeddings(named("K4"), tri)) == 24
