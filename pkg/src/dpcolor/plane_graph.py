"""Combinatorial plane graphs.

A plane graph is given by a rotation system: for every vertex, the
counterclockwise cyclic order of its neighbours.  Faces are never supplied
by the caller; they are traced from the rotation system, and one of them is
designated as the outer face.

Besides construction, this module holds the vertex/face vocabulary used by
the discharging rules (internal vertices, ``4_k``-vertices, ``T_k``-faces,
special faces and edges, the set ``N``), short-cycle enumeration and the
interior/exterior split of a cycle.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Mapping, NamedTuple, Sequence

Edge = tuple[int, int]
Dart = tuple[int, int]


class PlaneGraphError(ValueError):
    """Base class for rejected plane-graph inputs."""


class NonPlanarRotation(PlaneGraphError):
    pass


class DisconnectedInput(PlaneGraphError):
    pass


class LoopOrParallelEdge(PlaneGraphError):
    pass


class InvalidRotation(PlaneGraphError):
    """Rotation table is not symmetric, or the outer-face hint matches no face."""


class UnknownId(KeyError):
    pass


class LimitExceeded(RuntimeError):
    pass


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class SimpleGraph:
    """Undirected simple graph on integer vertices.

    Used directly for abstract graphs (e.g. the result of a vertex
    identification) and as the base of :class:`PlaneGraph`.
    """

    def __init__(self, vertices: Iterable[int], edges: Iterable[Edge]):
        self.vertices: tuple[int, ...] = tuple(sorted(set(vertices)))
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        keys = set()
        for u, v in edges:
            if u == v:
                raise LoopOrParallelEdge(f"loop at vertex {u}")
            if u not in adj or v not in adj:
                raise UnknownId(f"edge {u}-{v} uses an unknown vertex")
            adj[u].add(v)
            adj[v].add(u)
            keys.add(edge_key(u, v))
        self.edges: tuple[Edge, ...] = tuple(sorted(keys))
        self._adj = {v: frozenset(ns) for v, ns in adj.items()}

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownId(f"unknown vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def is_connected(self) -> bool:
        return len(self.vertices) <= 1 or len(_component(self, self.vertices[0])) == len(self.vertices)

    def is_biconnected(self) -> bool:
        if len(self.vertices) < 3:
            return len(self.edges) == 1
        if not self.is_connected():
            return False
        for cut in self.vertices:
            rest = [v for v in self.vertices if v != cut]
            if len(_component(self, rest[0], banned={cut})) != len(rest):
                return False
        return True

    def subgraph(self, keep: Iterable[int]) -> "SimpleGraph":
        keep = set(keep)
        return SimpleGraph(keep, [(u, v) for u, v in self.edges if u in keep and v in keep])

    def __repr__(self) -> str:
        return f"{type(self).__name__}(|V|={len(self.vertices)}, |E|={len(self.edges)})"


def _component(g: SimpleGraph, start: int, banned: frozenset[int] | set[int] = frozenset()) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if y not in seen and y not in banned:
                seen.add(y)
                queue.append(y)
    return seen


@dataclass(frozen=True)
class Face:
    id: int
    darts: tuple[Dart, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        """Facial walk as a vertex sequence (tails of the darts)."""
        return tuple(d[0] for d in self.darts)

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    @property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(edge_key(*d) for d in self.darts)

    def is_cycle(self) -> bool:
        return self.degree >= 3 and len(self.vertex_set) == self.degree


class PlaneGraph(SimpleGraph):
    """A connected simple graph with a rotation system and a chosen outer face.

    ``rotation[v]`` lists the neighbours of ``v`` in counterclockwise order.
    The face to the left of dart ``(u, v)`` continues with ``(v, w)`` where
    ``w`` precedes ``u`` in the rotation at ``v``.
    """

    def __init__(
        self,
        rotation: Mapping[int, Sequence[int]],
        outer_face_hint: Sequence[int] | None = None,
        positions: Mapping[int, tuple[float, float]] | None = None,
    ):
        rot = {int(v): tuple(int(x) for x in ns) for v, ns in rotation.items()}
        edges = []
        for v, ns in rot.items():
            if v in ns:
                raise LoopOrParallelEdge(f"loop at vertex {v}")
            if len(set(ns)) != len(ns):
                raise LoopOrParallelEdge(f"parallel edges at vertex {v}")
            for w in ns:
                if w not in rot or v not in rot[w]:
                    raise InvalidRotation(f"edge {v}-{w} missing from the rotation of {w}")
                edges.append((v, w))
        super().__init__(rot, edges)
        if not self.is_connected():
            raise DisconnectedInput("plane graph input must be connected")
        self.rotation: dict[int, tuple[int, ...]] = {v: rot[v] for v in self.vertices}
        self.positions = dict(positions) if positions is not None else None
        self._pos_in_rot = {v: {w: i for i, w in enumerate(ns)} for v, ns in self.rotation.items()}
        self.faces: tuple[Face, ...] = self._trace_faces()
        if self.edges and len(self.vertices) - len(self.edges) + len(self.faces) != 2:
            raise NonPlanarRotation(
                f"Euler check failed: |V|-|E|+|F| = {len(self.vertices)}-{len(self.edges)}+{len(self.faces)}"
            )
        self.face_of_dart: dict[Dart, int] = {d: f.id for f in self.faces for d in f.darts}
        self.outer_face_id: int | None = self._pick_outer(outer_face_hint)

    # -- construction helpers -------------------------------------------------

    def _next_dart(self, d: Dart) -> Dart:
        u, v = d
        ns = self.rotation[v]
        return (v, ns[self._pos_in_rot[v][u] - 1])

    def _trace_faces(self) -> tuple[Face, ...]:
        darts = sorted((v, w) for v in self.vertices for w in self.rotation[v])
        seen: set[Dart] = set()
        faces = []
        for start in darts:
            if start in seen:
                continue
            walk = []
            d = start
            while d not in seen:
                seen.add(d)
                walk.append(d)
                d = self._next_dart(d)
            faces.append(Face(len(faces), tuple(walk)))
        return tuple(faces)

    def _pick_outer(self, hint: Sequence[int] | None) -> int | None:
        if not self.faces:
            return None
        if hint is None:
            best = max(self.faces, key=lambda f: (f.degree, -f.id))
            return best.id
        hint = [int(x) for x in hint]
        for f in self.faces:
            if _same_cyclic(f.vertices, hint):
                return f.id
        raise InvalidRotation(f"outer face hint {hint} does not match a traced face")

    # -- basic queries -------------------------------------------------------

    @property
    def outer_face(self) -> Face | None:
        return None if self.outer_face_id is None else self.faces[self.outer_face_id]

    @property
    def inner_faces(self) -> tuple[Face, ...]:
        return tuple(f for f in self.faces if f.id != self.outer_face_id)

    @property
    def outer_vertices(self) -> frozenset[int]:
        f = self.outer_face
        return frozenset() if f is None else f.vertex_set

    @property
    def outer_edges(self) -> frozenset[Edge]:
        f = self.outer_face
        return frozenset() if f is None else f.edge_set

    def face(self, face_id: int) -> Face:
        if not 0 <= face_id < len(self.faces):
            raise UnknownId(f"unknown face {face_id}")
        return self.faces[face_id]

    def edge_faces(self, u: int, v: int) -> tuple[int, int]:
        """Faces on the two sides of edge uv (left of u->v, left of v->u)."""
        if not self.has_edge(u, v):
            raise UnknownId(f"unknown edge {u}-{v}")
        return self.face_of_dart[(u, v)], self.face_of_dart[(v, u)]

    def corners(self, v: int) -> list[tuple[int, int, int]]:
        """Angles at ``v`` in rotation order as ``(n_i, n_{i+1}, face_id)``."""
        ns = self.rotation[v]
        d = len(ns)
        # the face left of (v, n_{i+1}) ... is bounded by v n_i and v n_{i+1}
        return [(ns[i], ns[(i + 1) % d], self.face_of_dart[(ns[(i + 1) % d], v)]) for i in range(d)]

    def faces_at(self, v: int) -> list[int]:
        """Distinct faces incident with ``v``, in rotation order."""
        out: list[int] = []
        for _, _, f in self.corners(v):
            if f not in out:
                out.append(f)
        return out

    def special_edges(self) -> tuple[Edge, ...]:
        """Edges touching the outer boundary that are not on it."""
        ov, oe = self.outer_vertices, self.outer_edges
        return tuple(e for e in self.edges if (e[0] in ov or e[1] in ov) and e not in oe)

    def with_outer_face(self, face_id: int) -> "PlaneGraph":
        return PlaneGraph(self.rotation, self.face(face_id).vertices, self.positions)

    def without_edge(self, u: int, v: int) -> "PlaneGraph":
        """The same embedding with edge uv removed; keeps the outer face if it survives."""
        rot = {x: tuple(y for y in ns if not {x, y} == {u, v}) for x, ns in self.rotation.items()}
        g = PlaneGraph(rot, None, self.positions)
        outer = self.outer_face
        if outer is not None and edge_key(u, v) not in outer.edge_set:
            return g.with_outer_face(_find_face(g, outer.vertices))
        return g

    def signed_area(self, face_id: int) -> float:
        if self.positions is None:
            raise ValueError("graph has no coordinates")
        pts = [self.positions[v] for v in self.face(face_id).vertices]
        return 0.5 * sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]))


def _same_cyclic(walk: Sequence[int], target: Sequence[int]) -> bool:
    if len(walk) != len(target):
        return False
    n = len(walk)
    doubled = list(walk) + list(walk)
    rev = list(reversed(walk))
    doubled_rev = rev + rev
    t = list(target)
    return any(doubled[i:i + n] == t or doubled_rev[i:i + n] == t for i in range(n))


def _find_face(g: PlaneGraph, walk: Sequence[int]) -> int:
    for f in g.faces:
        if _same_cyclic(f.vertices, walk):
            return f.id
    raise InvalidRotation(f"no face with boundary {list(walk)}")


def build(
    rotation_table: Mapping[int, Sequence[int]],
    outer_face_hint: Sequence[int] | None = None,
) -> PlaneGraph:
    return PlaneGraph(rotation_table, outer_face_hint)


def from_coordinates(
    positions: Mapping[int, tuple[float, float]],
    edges: Iterable[Edge],
    outer_face_hint: Sequence[int] | None = None,
) -> PlaneGraph:
    """Build the embedding induced by a straight-line drawing.

    Without a hint the outer face is the unbounded face of the drawing.
    """
    nbrs: dict[int, list[int]] = {v: [] for v in positions}
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    rot = {}
    for v, ns in nbrs.items():
        x0, y0 = positions[v]
        rot[v] = sorted(ns, key=lambda w: math.atan2(positions[w][1] - y0, positions[w][0] - x0))
    g = PlaneGraph(rot, outer_face_hint, positions)
    if outer_face_hint is None and len(g.faces) > 1:
        unbounded = min(g.faces, key=lambda f: g.signed_area(f.id))
        g = g.with_outer_face(unbounded.id)
    return g


# -- classification -------------------------------------------------------------


@dataclass(frozen=True)
class VertexClass:
    vertex_id: int
    is_internal: bool
    degree: int
    incident_triangle_count: int

    def is_4k(self, k: int) -> bool:
        return self.degree == 4 and self.incident_triangle_count == k


@dataclass(frozen=True)
class FaceClass:
    face_id: int
    kind: str  # "outer" or "inner"
    degree: int
    common_outer_vertices: int
    is_internal: bool
    is_special: bool
    in_N: bool

    @property
    def t_class(self) -> int | None:
        """k for an inner T_k 3-face, else None."""
        if self.kind == "inner" and self.degree == 3:
            return self.common_outer_vertices
        return None


@dataclass(frozen=True)
class Classification:
    vertices: Mapping[int, VertexClass]
    faces: Mapping[int, FaceClass]

    def __iter__(self):
        return iter((self.vertices, self.faces))


def classify(g: PlaneGraph) -> Classification:
    if len(g.vertices) <= 2 or g.outer_face is None:
        return Classification({}, {})
    outer = g.outer_vertices
    tri = {f.id for f in g.faces if f.degree == 3}
    vclass = {}
    for v in g.vertices:
        t = sum(1 for f in g.faces_at(v) if f in tri)
        vclass[v] = VertexClass(v, v not in outer, g.degree(v), t)
    fclass = {}
    for f in g.faces:
        if f.id == g.outer_face_id:
            fclass[f.id] = FaceClass(f.id, "outer", f.degree, len(f.vertex_set), False, False, False)
            continue
        common = len(f.vertex_set & outer)
        internal = common == 0
        special = internal and f.degree == 3 and any(vclass[x].is_4k(1) for x in f.vertex_set)
        fclass[f.id] = FaceClass(f.id, "inner", f.degree, common, internal, special, common >= 1)
    return Classification(vclass, fclass)


# -- cycles --------------------------------------------------------------------


def enumerate_cycles(
    g: SimpleGraph,
    max_len: int,
    *,
    cap: int = 200_000,
    max_len_guard: int = 8,
) -> list[tuple[int, ...]]:
    """All simple cycles with at most ``max_len`` vertices.

    Each cycle is reported once, starting at its smallest vertex and oriented
    so that the second vertex is smaller than the last.  Sorted by length,
    then lexicographically.
    """
    if max_len > max_len_guard:
        raise LimitExceeded(f"max_len {max_len} exceeds the guard {max_len_guard}")
    found: list[tuple[int, ...]] = []
    for s in g.vertices:
        path = [s]
        on_path = {s}

        def extend(x: int) -> None:
            for y in sorted(g.neighbors(x)):
                if y == s and len(path) >= 3 and path[1] < path[-1]:
                    found.append(tuple(path))
                    if len(found) > cap:
                        raise LimitExceeded(f"more than {cap} cycles")
                elif y > s and y not in on_path and len(path) < max_len:
                    path.append(y)
                    on_path.add(y)
                    extend(y)
                    path.pop()
                    on_path.discard(y)

        extend(s)
    found.sort(key=lambda c: (len(c), c))
    return found


def cycle_edges(cycle: Sequence[int]) -> frozenset[Edge]:
    return frozenset(edge_key(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle)))


@dataclass(frozen=True)
class CycleRegion:
    cycle: tuple[int, ...]
    interior_vertices: frozenset[int]
    exterior_vertices: frozenset[int]

    @property
    def is_separating(self) -> bool:
        return bool(self.interior_vertices) and bool(self.exterior_vertices)


def cycle_region(g: PlaneGraph, cycle: Sequence[int]) -> CycleRegion:
    """Split the vertices off ``cycle`` into the bounded and unbounded side.

    Faces are glued across every edge not on the cycle; the class containing
    the outer face is the exterior.
    """
    cyc = tuple(cycle)
    ce = cycle_edges(cyc)
    for e in ce:
        if not g.has_edge(*e):
            raise UnknownId(f"cycle uses a non-edge {e}")
    parent = list(range(len(g.faces)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        if (u, v) not in ce:
            a, b = find(g.face_of_dart[(u, v)]), find(g.face_of_dart[(v, u)])
            if a != b:
                parent[a] = b
    outside = find(g.outer_face_id)
    on_cycle = set(cyc)
    interior, exterior = set(), set()
    for v in g.vertices:
        if v in on_cycle:
            continue
        f = g.face_of_dart[(v, g.rotation[v][0])]
        (exterior if find(f) == outside else interior).add(v)
    return CycleRegion(cyc, frozenset(interior), frozenset(exterior))


def separating_cycles(g: PlaneGraph, lo: int, hi: int, **kw) -> list[CycleRegion]:
    if lo < 3:
        raise ValueError("lo must be at least 3")
    out = []
    for c in enumerate_cycles(g, hi, **kw):
        if len(c) < lo:
            continue
        r = cycle_region(g, c)
        if r.is_separating:
            out.append(r)
    return out


# -- adjacency predicates ----------------------------------------------------------


def faces_share_edge(g: PlaneGraph, f1: int, f2: int) -> bool:
    return bool(g.face(f1).edge_set & g.face(f2).edge_set)


def edge_on_face(g: PlaneGraph, e: Edge, f: int) -> bool:
    if not g.has_edge(*e):
        raise UnknownId(f"unknown edge {e}")
    return edge_key(*e) in g.face(f).edge_set


def cycles_intersect(c1: Sequence[int], c2: Sequence[int]) -> bool:
    return bool(set(c1) & set(c2))


def cycles_adjacent(c1: Sequence[int], c2: Sequence[int]) -> bool:
    return bool(cycle_edges(c1) & cycle_edges(c2))


class FaceAdjacency(NamedTuple):
    faces_share_edge: object
    cycles_intersect: object
    edge_on_face: object


def face_adjacency_queries(g: PlaneGraph) -> FaceAdjacency:
    return FaceAdjacency(partial(faces_share_edge, g), cycles_intersect, partial(edge_on_face, g))


# -- sinks -----------------------------------------------------------------------


class Sink(NamedTuple):
    face_id: int
    sources: tuple[int, ...]
    via: tuple[tuple[int, int], ...]  # (3-face id, source vertex)


def sinks_and_sources(g: PlaneGraph, cls: Classification | None = None) -> list[Sink]:
    """Internal (4,4,4,4,4+)-faces whose five edges all border 3-faces."""
    if cls is None:
        cls = classify(g)
    vcls, fcls = cls.vertices, cls.faces
    out = []
    for f in g.inner_faces:
        fc = fcls.get(f.id)
        if fc is None or not fc.is_internal or f.degree != 5 or not f.is_cycle():
            continue
        degs = [vcls[x].degree for x in f.vertices]
        if min(degs) < 4 or sum(1 for d in degs if d == 4) < 4:
            continue
        via = []
        for u, v in f.darts:
            other = g.face_of_dart[(v, u)]
            if other == g.outer_face_id or g.faces[other].degree != 3:
                break
            for x in g.faces[other].vertices:
                if x not in f.vertex_set:
                    via.append((other, x))
        else:
            out.append(Sink(f.id, tuple(sorted({x for _, x in via})), tuple(via)))
    return out
