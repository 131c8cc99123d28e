"""DP-coloring (correspondence coloring) primitives.

Colors are small positive integers.  A :class:`MatchingAssignment` carries
the list of every vertex together with, for every edge ``uv`` (stored as
``u < v``), a set of matched color pairs ``(c_u, c_v)`` meaning that
``(u, c_u)`` and ``(v, c_v)`` are adjacent in the cover.  An M-coloring picks
one color per vertex so that no edge uses a matched pair.
"""

from __future__ import annotations

import itertools
import random
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .plane_graph import Edge, SimpleGraph, UnknownId, edge_key

Pair = tuple[int, int]


class CoverError(ValueError):
    pass


class NotAMatching(CoverError):
    def __init__(self, edge: Edge, color: int | None = None):
        super().__init__(f"pairs on edge {edge} do not form a matching (color {color} repeats)")
        self.edge = edge
        self.color = color


class ColorOutsideList(CoverError):
    def __init__(self, edge: Edge, pair: Pair):
        super().__init__(f"pair {pair} on edge {edge} uses a color outside the endpoint lists")
        self.edge = edge
        self.pair = pair


class UnknownEdge(UnknownId):
    pass


class PreconditionViolated(CoverError):
    def __init__(self, cycle: Sequence[int], reason: str):
        super().__init__(f"cycle {list(cycle)} violates the straightening precondition: {reason}")
        self.cycle = tuple(cycle)
        self.reason = reason


class LoopCreated(CoverError):
    pass


class MatchingConflict(CoverError):
    def __init__(self, neighbor: int):
        super().__init__(f"merged matchings towards common neighbour {neighbor} are not a matching")
        self.neighbor = neighbor


def uniform_lists(vertices: Iterable[int], k: int) -> dict[int, frozenset[int]]:
    colors = frozenset(range(1, k + 1))
    return {v: colors for v in vertices}


class MatchingAssignment:
    """Lists plus per-edge matchings; immutable after construction.

    Construction only normalises orientation; use :func:`validate_cover`
    to check the matching property.
    """

    def __init__(
        self,
        lists: Mapping[int, Iterable[int]],
        matchings: Mapping[Edge, Iterable[Pair]],
        edges: Iterable[Edge] | None = None,
    ):
        self.lists: dict[int, frozenset[int]] = {int(v): frozenset(cs) for v, cs in lists.items()}
        norm: dict[Edge, frozenset[Pair]] = {}
        for (u, v), pairs in matchings.items():
            key = edge_key(u, v)
            ps = frozenset((a, b) if u < v else (b, a) for a, b in pairs)
            norm[key] = norm.get(key, frozenset()) | ps
        self.edges: frozenset[Edge] = (
            frozenset(edge_key(*e) for e in edges) if edges is not None else frozenset(norm)
        )
        for e in norm:
            if e not in self.edges:
                raise UnknownEdge(f"matching given for non-edge {e}")
        self._m = {e: norm.get(e, frozenset()) for e in self.edges}
        self._partner: dict[tuple[int, int, int], int] = {}
        for (u, v), ps in self._m.items():
            for a, b in ps:
                self._partner.setdefault((u, v, a), b)
                self._partner.setdefault((v, u, b), a)

    @property
    def k(self) -> int:
        return max((max(cs) for cs in self.lists.values() if cs), default=0)

    def pairs(self, u: int, v: int) -> frozenset[Pair]:
        """Matched pairs of edge uv oriented as ``(color at u, color at v)``."""
        key = edge_key(u, v)
        if key not in self._m:
            raise UnknownEdge(f"unknown edge {u}-{v}")
        ps = self._m[key]
        return ps if u < v else frozenset((b, a) for a, b in ps)

    def partner(self, u: int, v: int, c: int) -> int | None:
        """Color of ``v`` matched with ``(u, c)``, if any."""
        return self._partner.get((u, v, c))

    def items(self):
        return sorted(self._m.items())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatchingAssignment)
            and self.lists == other.lists
            and self._m == other._m
        )

    def __repr__(self) -> str:
        return f"MatchingAssignment(|V|={len(self.lists)}, |E|={len(self.edges)}, pairs={sum(map(len, self._m.values()))})"


@dataclass(frozen=True)
class CoverReport:
    cover_vertices: int
    cover_edges: int


def validate_cover(g: SimpleGraph, lists: Mapping[int, Iterable[int]] | None, m: MatchingAssignment) -> CoverReport:
    lists = m.lists if lists is None else {v: frozenset(cs) for v, cs in lists.items()}
    for v in g.vertices:
        if v not in lists:
            raise CoverError(f"vertex {v} has no list")
    for e in m.edges:
        if not g.has_edge(*e):
            raise UnknownEdge(f"assignment edge {e} is not in the graph")
    n_edges = 0
    for e in g.edges:
        u, v = e
        ps = m.pairs(u, v) if e in m.edges else frozenset()
        left, right = set(), set()
        for a, b in sorted(ps):
            if a not in lists[u] or b not in lists[v]:
                raise ColorOutsideList(e, (a, b))
            if a in left:
                raise NotAMatching(e, a)
            if b in right:
                raise NotAMatching(e, b)
            left.add(a)
            right.add(b)
        n_edges += len(ps)
    return CoverReport(sum(len(lists[v]) for v in g.vertices), n_edges)


@dataclass(frozen=True)
class EdgePredicates:
    is_straight: bool
    is_full: bool


def edge_predicates(m: MatchingAssignment, edge: Edge) -> EdgePredicates:
    u, v = edge
    ps = m.pairs(u, v)
    straight = all(a == b for a, b in ps)
    lu, lv = m.lists[u], m.lists[v]
    full = len(lu) == len(lv) and len(ps) == len(lu) and {a for a, _ in ps} == lu and {b for _, b in ps} == lv
    return EdgePredicates(straight, full)


def is_consistent(m: MatchingAssignment, walk: Sequence[int]) -> tuple[bool, list[int] | None]:
    """Check a closed walk ``w_1 ... w_m`` (with ``w_m == w_1``).

    Returns ``(False, chain)`` when some chain of matched pairs along the
    walk returns to ``w_1`` with a different color, else ``(True, None)``.
    """
    if len(walk) < 4 or walk[0] != walk[-1]:
        raise ValueError("closed walk must have length >= 3 and end where it starts")
    for x, y in zip(walk, walk[1:]):
        m.pairs(x, y)  # raises on non-edges
    for c1 in sorted(m.lists[walk[0]]):
        chain = [c1]
        for x, y in zip(walk, walk[1:]):
            nxt = m.partner(x, y, chain[-1])
            if nxt is None:
                break
            chain.append(nxt)
        else:
            if chain[-1] != c1:
                return False, chain
    return True, None


def is_mcoloring(g: SimpleGraph, m: MatchingAssignment, coloring: Mapping[int, int]) -> bool:
    if set(coloring) != set(g.vertices):
        return False
    if any(coloring[v] not in m.lists[v] for v in g.vertices):
        return False
    return all((coloring[u], coloring[v]) not in m.pairs(u, v) for u, v in g.edges)


def conflicts(g: SimpleGraph, m: MatchingAssignment, coloring: Mapping[int, int]) -> list[Edge]:
    """Edges of ``g`` with both ends colored by a matched pair."""
    out = []
    for u, v in g.edges:
        if u in coloring and v in coloring and (coloring[u], coloring[v]) in m.pairs(u, v):
            out.append((u, v))
    return out


# -- encodings and random assignments -------------------------------------------


def encode_list_coloring(g: SimpleGraph, lists: Mapping[int, Iterable[int]]) -> MatchingAssignment:
    lists = {v: frozenset(lists[v]) for v in g.vertices}
    matchings = {(u, v): [(c, c) for c in lists[u] & lists[v]] for u, v in g.edges}
    return MatchingAssignment(lists, matchings, g.edges)


def encode_proper_coloring(g: SimpleGraph, k: int) -> MatchingAssignment:
    return encode_list_coloring(g, uniform_lists(g.vertices, k))


_PROFILE_RE = re.compile(r"^\s*([a-z-]+)\s*(?:\(\s*([0-9.eE+-]+)\s*\))?\s*$")


def parse_profile(profile: str) -> tuple[str, float]:
    match = _PROFILE_RE.match(profile)
    if not match:
        raise ValueError(f"bad assignment profile {profile!r}")
    name, arg = match.group(1), match.group(2)
    if name not in ("full-random-perfect", "identity-with-twists", "sparse"):
        raise ValueError(f"unknown assignment profile {name!r}")
    if name != "full-random-perfect" and arg is None:
        raise ValueError(f"profile {name} needs a probability argument")
    p = float(arg) if arg is not None else 1.0
    if not 0.0 <= p <= 1.0:
        raise ValueError("profile probability must lie in [0, 1]")
    return name, p


def random_assignment(
    g: SimpleGraph, k: int, seed: int, profile: str = "full-random-perfect"
) -> MatchingAssignment:
    """Random k-matching assignment.

    ``full-random-perfect`` draws a uniform permutation per edge;
    ``identity-with-twists(p)`` replaces the identity by a uniform permutation
    with probability p; ``sparse(p)`` keeps each pair of a uniform permutation
    with probability p.
    """
    if k < 1:
        raise ValueError("k must be positive")
    name, p = parse_profile(profile)
    rng = random.Random(seed)
    colors = list(range(1, k + 1))
    matchings = {}
    for e in g.edges:
        if name == "identity-with-twists" and rng.random() >= p:
            perm = colors
        else:
            perm = rng.sample(colors, k)
        pairs = list(zip(colors, perm))
        if name == "sparse":
            pairs = [pr for pr in pairs if rng.random() < p]
        matchings[e] = pairs
    return MatchingAssignment(uniform_lists(g.vertices, k), matchings, g.edges)


# -- straightening ---------------------------------------------------------------


@dataclass(frozen=True)
class StraightenResult:
    assignment: MatchingAssignment
    permutations: dict[int, dict[int, int]]  # vertex -> old color -> new color

    def map_coloring(self, coloring: Mapping[int, int]) -> dict[int, int]:
        """Translate an M-coloring into the renamed assignment."""
        return {v: self.permutations.get(v, {}).get(c, c) for v, c in coloring.items()}

    def unmap_coloring(self, coloring: Mapping[int, int]) -> dict[int, int]:
        inv = {v: {b: a for a, b in p.items()} for v, p in self.permutations.items()}
        return {v: inv.get(v, {}).get(c, c) for v, c in coloring.items()}


def rename(m: MatchingAssignment, permutations: Mapping[int, Mapping[int, int]]) -> MatchingAssignment:
    def sig(v: int, c: int) -> int:
        return permutations[v][c] if v in permutations else c

    matchings = {(u, v): [(sig(u, a), sig(v, b)) for a, b in m.pairs(u, v)] for u, v in m.edges}
    return MatchingAssignment(m.lists, matchings, m.edges)


def _complete_matching(pairs: Iterable[Pair], left: Iterable[int], right: Iterable[int]) -> dict[int, int]:
    """Extend a partial matching to a bijection by pairing leftovers in order."""
    mp = dict(pairs)
    free_l = sorted(set(left) - set(mp))
    free_r = sorted(set(right) - set(mp.values()))
    mp.update(zip(free_l, free_r))
    return mp


def straighten(g: SimpleGraph, m: MatchingAssignment, h: Iterable[Edge]) -> StraightenResult:
    """Rename colors on V(h) so that every edge of the subgraph ``h`` is straight.

    Breadth-first spanning forest of ``h``; each child's colors are renamed
    through the tree edge to its parent.  Every fundamental cycle is then
    checked for fullness and straightness, which covers all cycles of ``h``.
    """
    h_edges = sorted({edge_key(*e) for e in h})
    adj: dict[int, list[int]] = {}
    for u, v in h_edges:
        if not g.has_edge(u, v):
            raise UnknownEdge(f"subgraph edge {u}-{v} is not in the graph")
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    base = None
    for v in adj:
        if base is None:
            base = m.lists[v]
        elif m.lists[v] != base:
            raise CoverError("straightening needs equal lists on the subgraph (a k-matching assignment)")

    perms: dict[int, dict[int, int]] = {}
    parent: dict[int, int | None] = {}
    tree: set[Edge] = set()
    for root in sorted(adj):
        if root in parent:
            continue
        parent[root] = None
        perms[root] = {c: c for c in m.lists[root]}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x]):
                if y in parent:
                    continue
                parent[y] = x
                tree.add(edge_key(x, y))
                through = _complete_matching(m.pairs(y, x), m.lists[y], m.lists[x])
                perms[y] = {c: perms[x][through[c]] for c in m.lists[y]}
                queue.append(y)

    renamed = rename(m, perms)
    for u, v in h_edges:
        if (u, v) in tree:
            continue
        cycle = _tree_cycle(parent, u, v)
        closed = list(cycle) + [cycle[0]]
        for a, b in zip(closed, closed[1:]):
            if not edge_predicates(m, (a, b)).is_full:
                raise PreconditionViolated(cycle, f"edge {edge_key(a, b)} is not full")
        if not edge_predicates(renamed, (u, v)).is_straight:
            raise PreconditionViolated(cycle, "assignment is inconsistent on the cycle")
    return StraightenResult(renamed, perms)


def _tree_cycle(parent: Mapping[int, int | None], u: int, v: int) -> tuple[int, ...]:
    """Cycle formed by non-tree edge uv and the tree path between u and v."""

    def up(x: int) -> list[int]:
        path = [x]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return path

    pu, pv = up(u), up(v)
    common = set(pu) & set(pv)
    lca = next(x for x in pu if x in common)
    left = pu[: pu.index(lca) + 1]
    right = pv[: pv.index(lca)]
    return tuple(left + list(reversed(right)))


# -- vertex identification -------------------------------------------------------


def identify(
    g: SimpleGraph,
    m: MatchingAssignment,
    removed: Iterable[int],
    u: int,
    v: int,
) -> tuple[SimpleGraph, MatchingAssignment]:
    """Delete ``removed`` and merge ``v`` into ``u``.

    The merged vertex keeps the id ``u``.  Edges formerly at ``v`` are
    re-anchored at ``u`` with their color pairs unchanged.
    """
    removed = set(removed)
    if u in removed or v in removed or u == v:
        raise ValueError("identified vertices must be distinct and not removed")
    if g.has_edge(u, v):
        raise LoopCreated(f"{u} and {v} are adjacent")
    if m.lists[u] != m.lists[v]:
        raise CoverError("identified vertices must carry the same list")
    keep = [x for x in g.vertices if x not in removed and x != v]
    merged: dict[Edge, set[Pair]] = {}
    for a, b in g.edges:
        if a in removed or b in removed:
            continue
        ps = m.pairs(a, b)
        a2, b2 = (u if a == v else a), (u if b == v else b)
        key = edge_key(a2, b2)
        oriented = {(p, q) if a2 < b2 else (q, p) for p, q in ps}
        if key in merged:
            union = merged[key] | oriented
            if len({p for p, _ in union}) != len(union) or len({q for _, q in union}) != len(union):
                raise MatchingConflict(key[0] if key[1] == u else key[1])
            merged[key] = union
        else:
            merged[key] = oriented
    g2 = SimpleGraph(keep, merged)
    m2 = MatchingAssignment({x: m.lists[x] for x in keep}, merged, g2.edges)
    return g2, m2


def lift_coloring(
    g: SimpleGraph,
    m: MatchingAssignment,
    coloring: Mapping[int, int],
    u: int,
    v: int,
    order: Sequence[int],
) -> dict[int, int] | None:
    """Undo :func:`identify` for one coloring of the identified graph.

    ``v`` takes the color of ``u``; the removed vertices are then colored
    greedily in ``order``.  Returns None if some removed vertex is stuck.
    """
    col = dict(coloring)
    col[v] = col[u]
    for x in order:
        banned = {m.partner(y, x, col[y]) for y in g.neighbors(x) if y in col}
        free = sorted(m.lists[x] - banned)
        if not free:
            return None
        col[x] = free[0]
    return col


def iter_perfect_assignments(g: SimpleGraph, k: int, fixed: Iterable[Edge] = ()):
    """All k-matching assignments with perfect matchings; ``fixed`` edges stay straight."""
    colors = tuple(range(1, k + 1))
    fixed = {edge_key(*e) for e in fixed}
    free = [e for e in g.edges if e not in fixed]
    lists = uniform_lists(g.vertices, k)
    identity = list(zip(colors, colors))
    for perms in itertools.product(itertools.permutations(colors), repeat=len(free)):
        matchings = {e: identity for e in fixed}
        matchings.update({e: list(zip(colors, p)) for e, p in zip(free, perms)})
        yield MatchingAssignment(lists, matchings, g.edges)
