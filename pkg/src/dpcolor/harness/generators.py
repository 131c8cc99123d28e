"""Random and named plane-graph instances.

Profiles accepted by :func:`generate`:

``triangulation`` / ``triangulation(p)``
    Delaunay triangulation of random points in the unit disk, then each edge
    is deleted with probability ``p`` (default 0.2) while the graph stays
    connected.
``outer-cycle(k)`` / ``outer-cycle(k,triangle-free)`` / ``outer-cycle(k,p)``
    A convex k-gon as the outer face around random interior points.  Chords
    of the k-gon are removed so the outer boundary is an induced cycle, then
    interior edges are deleted with probability ``p`` (default 0.1).
``named:<name>``
    A fixed library graph, see :data:`NAMED`.

With ``theorem`` set, configurations excluded by that theorem are removed by
deleting an edge of each witness that is not on the outer boundary.
"""

from __future__ import annotations

import math
import random
import re

import numpy as np
from scipy.spatial import Delaunay

from ..patterns import first_violation
from ..patterns import Witness
from ..plane_graph import PlaneGraph, edge_key, enumerate_cycles, from_coordinates

MAX_SIZE = 24
MAX_RETRIES = 40


class GenerationFailed(RuntimeError):
    pass


def _circle(n: int, r: float = 1.0, phase: float = 0.0) -> list[tuple[float, float]]:
    return [(r * math.cos(phase + 2 * math.pi * i / n), r * math.sin(phase + 2 * math.pi * i / n)) for i in range(n)]


def _cycle(n: int) -> PlaneGraph:
    pos = dict(enumerate(_circle(n)))
    return from_coordinates(pos, [(i, (i + 1) % n) for i in range(n)])


def _wheel(n: int) -> PlaneGraph:
    pos = dict(enumerate(_circle(n)))
    pos[n] = (0.0, 0.0)
    edges = [(i, (i + 1) % n) for i in range(n)] + [(i, n) for i in range(n)]
    return from_coordinates(pos, edges)


def _k4() -> PlaneGraph:
    pos = dict(enumerate(_circle(3)))
    pos[3] = (0.0, 0.0)
    return from_coordinates(pos, [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)])


def _bowtie() -> PlaneGraph:
    pos = {0: (0.0, 0.0), 1: (-1.0, 1.0), 2: (-1.0, -1.0), 3: (1.0, 1.0), 4: (1.0, -1.0)}
    return from_coordinates(pos, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])


def _house() -> PlaneGraph:
    pos = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (1.0, 1.0), 3: (0.0, 1.0), 4: (0.5, 1.8)}
    return from_coordinates(pos, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)])


def _prism() -> PlaneGraph:
    pos = dict(enumerate(_circle(3, 2.0) + _circle(3, 1.0)))
    edges = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]
    return from_coordinates(pos, edges)


def _theta() -> PlaneGraph:
    pos = {0: (0.0, 2.0), 1: (0.0, -2.0), 2: (-1.0, 0.0), 3: (0.0, 0.0), 4: (1.0, 0.0)}
    return from_coordinates(pos, [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)])


def _sink_patch() -> PlaneGraph:
    """Internal 5-face of 4-vertices ringed by five 3-faces.

    Source 0 lies on the outer cycle; the other four sources are internal
    vertices of degree at least 5.
    """
    pos: dict[int, tuple[float, float]] = {}
    for i, p in enumerate(_circle(5, 1.0)):
        pos[10 + i] = p  # sink vertices v_i
    for i, p in enumerate(_circle(5, 2.0, math.pi / 5)):
        pos[i] = p  # sources x_i, between v_i and v_{i+1}
    for i in range(1, 5):
        pos[20 + i] = (4.0 * math.cos(math.pi / 5 + 2 * math.pi * i / 5),
                       4.0 * math.sin(math.pi / 5 + 2 * math.pi * i / 5))
    edges = [(10 + i, 10 + (i + 1) % 5) for i in range(5)]
    edges += [(i, 10 + i) for i in range(5)] + [(i, 10 + (i + 1) % 5) for i in range(5)]
    edges += [(i, (i + 1) % 5) for i in range(5)]
    edges += [(20 + i, i) for i in range(1, 5)] + [(20 + i, 20 + i + 1) for i in range(1, 4)]
    edges += [(20 + i, i + 1) for i in range(1, 4)] + [(24, 0), (21, 0)]
    return from_coordinates(pos, edges)


NAMED = {
    "K3": lambda: _cycle(3),
    "K4": _k4,
    "bowtie": _bowtie,
    "house": _house,
    "prism": _prism,
    "theta": _theta,
    "sink-patch": _sink_patch,
}


def named(name: str) -> PlaneGraph:
    m = re.fullmatch(r"([CW])(\d+)", name)
    if m:
        n = int(m.group(2))
        if n < 3 or n > MAX_SIZE:
            raise ValueError(f"{name}: size out of range")
        return _cycle(n) if m.group(1) == "C" else _wheel(n)
    try:
        return NAMED[name]()
    except KeyError:
        raise ValueError(f"unknown named graph {name!r}; known: C<n>, W<n>, {', '.join(sorted(NAMED))}") from None


# -- random profiles -----------------------------------------------------------------


def _delaunay(points: np.ndarray) -> PlaneGraph:
    tri = Delaunay(points)
    edges = set()
    for a, b, c in tri.simplices:
        for x, y in ((a, b), (b, c), (c, a)):
            edges.add(edge_key(int(x), int(y)))
    pos = {i: (float(x), float(y)) for i, (x, y) in enumerate(points)}
    return from_coordinates(pos, sorted(edges))


def _try_delete(g: PlaneGraph, e, keep: frozenset) -> PlaneGraph | None:
    if e in keep:
        return None
    u, v = e
    if g.degree(u) == 1 or g.degree(v) == 1:
        return None
    try:
        return g.without_edge(u, v)
    except ValueError:  # disconnected
        return None


def _random_deletions(g: PlaneGraph, p: float, rng: random.Random, keep: frozenset) -> PlaneGraph:
    for e in rng.sample(sorted(g.edges), len(g.edges)):
        if rng.random() < p:
            h = _try_delete(g, e, keep)
            if h is not None:
                g = h
    return g


def _triangulation(size: int, p: float, seed: int) -> PlaneGraph:
    rs = np.random.default_rng(seed)
    r = np.sqrt(rs.random(size))
    t = rs.random(size) * 2 * np.pi
    g = _delaunay(np.column_stack([r * np.cos(t), r * np.sin(t)]))
    return _random_deletions(g, p, random.Random(seed), frozenset())


def _outer_cycle(size: int, k: int, p: float, triangle_free: bool, seed: int) -> PlaneGraph:
    if size < k:
        raise ValueError(f"outer-cycle({k}) needs at least {k} vertices")
    rs = np.random.default_rng(seed)
    m = size - k
    rmax = 0.9 * math.cos(math.pi / k)
    r = rmax * np.sqrt(rs.random(m))
    t = rs.random(m) * 2 * np.pi
    pts = np.vstack([np.array(_circle(k)), np.column_stack([r * np.cos(t), r * np.sin(t)])])
    g = _delaunay(pts)
    ring = frozenset(edge_key(i, (i + 1) % k) for i in range(k))
    for u, v in sorted(g.edges):
        if u < k and v < k and (u, v) not in ring:
            g = g.without_edge(u, v)
    rng = random.Random(seed)
    g = _random_deletions(g, p, rng, ring)
    if triangle_free:
        while True:
            tris = [c for c in enumerate_cycles(g, 3) if len(c) == 3]
            if not tris:
                break
            changed = False
            for c in tris:
                es = [edge_key(c[i], c[(i + 1) % 3]) for i in range(3)]
                rng.shuffle(es)
                for e in es:
                    h = _try_delete(g, e, ring)
                    if h is not None:
                        g, changed = h, True
                        break
                if changed:
                    break
            if not changed:
                raise GenerationFailed("could not remove every triangle")
    return g


def _repair(g: PlaneGraph, theorem: str, rng: random.Random) -> PlaneGraph:
    keep = g.outer_edges
    for _ in range(4 * len(g.edges) + 1):
        w = first_violation(g, theorem)
        if w is None:
            return g
        if isinstance(w, Witness):
            es = w.image_edges()
        else:
            es = sorted({edge_key(c[i], c[(i + 1) % len(c)]) for c in w.cycles for i in range(len(c))})
        rng.shuffle(es)
        for e in es:
            h = _try_delete(g, e, keep)
            if h is not None:
                g = h
                break
        else:
            raise GenerationFailed(f"{theorem} witness uses only protected edges")
    raise GenerationFailed(f"repair for {theorem} did not converge")


_PROFILE = re.compile(r"^(triangulation|outer-cycle)(?:\(([^)]*)\))?$")


def parse_profile(profile: str) -> tuple[str, dict]:
    if profile.startswith("named:"):
        return "named", {"name": profile[6:]}
    m = _PROFILE.match(profile.strip())
    if not m:
        raise ValueError(f"unknown generator profile {profile!r}")
    kind, args = m.group(1), [a.strip() for a in (m.group(2) or "").split(",") if a.strip()]
    opts: dict = {}
    if kind == "outer-cycle":
        if not args:
            raise ValueError("outer-cycle needs the cycle length, e.g. outer-cycle(6)")
        opts["k"] = int(args.pop(0))
        if opts["k"] < 3:
            raise ValueError("outer cycle length must be at least 3")
    for a in args:
        if a == "triangle-free":
            opts["triangle_free"] = True
        else:
            opts["p"] = float(a)
    return kind, opts


def generate(profile: str, size: int, seed: int, theorem: str | None = None,
             max_size: int = MAX_SIZE) -> PlaneGraph:
    kind, opts = parse_profile(profile)
    if kind == "named":
        g = named(opts["name"])
        return g if theorem is None else _repair(g, theorem, random.Random(seed))
    if not 3 <= size <= max_size:
        raise ValueError(f"size {size} outside 3..{max_size}")
    last: Exception | None = None
    for attempt in range(MAX_RETRIES):
        s = seed * 1_000_003 + attempt
        try:
            if kind == "triangulation":
                g = _triangulation(size, opts.get("p", 0.2), s)
            else:
                g = _outer_cycle(size, opts["k"], opts.get("p", 0.1), opts.get("triangle_free", False), s)
            if theorem is not None:
                g = _repair(g, theorem, random.Random(s))
            return g
        except GenerationFailed as exc:
            last = exc
    raise GenerationFailed(f"{profile} size={size} seed={seed}: {last}")
