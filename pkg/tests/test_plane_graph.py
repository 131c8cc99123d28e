import math

import pytest
from hypothesis import given, settings, strategies as st

from dpcolor.harness.generators import generate, named
from dpcolor.plane_graph import (
    DisconnectedInput,
    InvalidRotation,
    LimitExceeded,
    LoopOrParallelEdge,
    NonPlanarRotation,
    PlaneGraph,
    UnknownId,
    classify,
    cycle_region,
    enumerate_cycles,
    from_coordinates,
    separating_cycles,
    sinks_and_sources,
)

from oracles import separates_geometrically, simple_cycles


def test_triangle_has_two_faces():
    g = PlaneGraph({0: [1, 2], 1: [2, 0], 2: [0, 1]})
    assert sorted(f.degree for f in g.faces) == [3, 3]
    assert g.outer_face.degree == 3


def test_k4_faces_and_classification():
    g = named("K4")
    assert len(g.faces) == 4
    assert all(f.degree == 3 for f in g.faces)
    vcls, fcls = classify(g)
    inner = [v for v, c in vcls.items() if c.is_internal]
    assert inner == [3]
    assert vcls[3].degree == 3 and vcls[3].incident_triangle_count == 3
    # every inner face shares two vertices with the outer triangle
    assert sorted(c.t_class for c in fcls.values() if c.kind == "inner") == [2, 2, 2]
    assert sum(c.in_N for c in fcls.values()) == 3


def test_cycle_whole_graph():
    g = named("C6")
    assert len(g.faces) == 2
    assert g.outer_face.is_cycle()
    assert g.special_edges() == ()


def test_wheel_special_edges_are_spokes():
    g = named("W5")
    assert sorted(g.special_edges()) == [(i, 5) for i in range(5)]


def test_rotation_errors():
    with pytest.raises(LoopOrParallelEdge):
        PlaneGraph({0: [0]})
    with pytest.raises(LoopOrParallelEdge):
        PlaneGraph({0: [1, 1], 1: [0, 0]})
    with pytest.raises(InvalidRotation):
        PlaneGraph({0: [1], 1: []})
    with pytest.raises(DisconnectedInput):
        PlaneGraph({0: [1], 1: [0], 2: [3], 3: [2]})
    with pytest.raises(InvalidRotation):
        PlaneGraph({0: [1, 2], 1: [2, 0], 2: [0, 1]}, outer_face_hint=[0, 1])
    with pytest.raises(UnknownId):
        named("K4").face(99)


def test_k4_bad_rotation_is_nonplanar():
    # K4 with one rotation reversed no longer traces a sphere
    rot = dict(named("K4").rotation)
    rot[3] = tuple(reversed(rot[3]))
    with pytest.raises(NonPlanarRotation):
        PlaneGraph(rot)


def test_corners_and_edge_faces_agree():
    g = named("prism")
    for v in g.vertices:
        for a, b, f in g.corners(v):
            assert v in g.faces[f].vertex_set
            assert f in g.edge_faces(v, b) and f in g.edge_faces(v, a)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 24), st.integers(0, 10**6))
def test_euler_and_dart_partition(size, seed):
    g = generate("triangulation", size, seed)
    assert len(g.vertices) - len(g.edges) + len(g.faces) == 2
    darts = [d for f in g.faces for d in f.darts]
    assert len(darts) == len(set(darts)) == 2 * len(g.edges)


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 7), st.integers(0, 10**6))
def test_cycles_match_bruteforce(n, seed):
    g = generate("triangulation(0.3)", n, seed)
    assert enumerate_cycles(g, 6) == simple_cycles(g.vertices, g.edges, 6)


def test_cycle_guard():
    with pytest.raises(LimitExceeded):
        enumerate_cycles(named("K4"), 9)
    with pytest.raises(LimitExceeded):
        enumerate_cycles(named("W8"), 8, cap=5)


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 12), st.integers(0, 10**6))
def test_separating_matches_geometry(n, seed):
    g = generate("triangulation(0.2)", n, seed)
    for c in enumerate_cycles(g, 5):
        assert cycle_region(g, c).is_separating == separates_geometrically(g.positions, c)


def test_separating_triangle_in_k4_with_outer_vertex():
    # a triangle drawn around a center vertex, plus a far vertex outside it
    pos = {0: (0, 0), 1: (1, 0), 2: (0.5, 1), 3: (0.5, 0.35), 4: (3, 3)}
    edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3), (2, 4), (1, 4)]
    g = from_coordinates(pos, edges)
    seps = separating_cycles(g, 3, 3)
    assert [r.cycle for r in seps] == [(0, 1, 2)]
    assert seps[0].interior_vertices == {3}


def test_sink_patch_has_one_sink():
    g = named("sink-patch")
    sinks = sinks_and_sources(g)
    assert len(sinks) == 1
    assert sinks[0].sources == (0, 1, 2, 3, 4)
    assert g.faces[sinks[0].face_id].degree == 5


def test_from_coordinates_outer_is_unbounded():
    n = 7
    pos = {i: (math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n)) for i in range(n)}
    pos[n] = (0.0, 0.0)
    edges = [(i, (i + 1) % n) for i in range(n)] + [(0, n), (3, n)]
    g = from_coordinates(pos, edges)
    assert g.outer_vertices == set(range(n))
