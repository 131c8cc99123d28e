"""Exact M-coloring search.

Backtracking over vertices with forward checking.  Variable order is the
smallest remaining candidate set (ties by vertex id), value order ascending.
Candidate sets are bitmasks over the color universe.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .dp_core import MatchingAssignment, conflicts, uniform_lists
from .plane_graph import SimpleGraph, edge_key

DEFAULT_BUDGET = 10**7

THEOREM_BOUNDS = {
    # theorem id -> (single vertex allowed, max cycle length)
    "MRA": (True, 6),
    "MRB": (False, 6),
    "MRC": (False, 7),
}


class Status(str, enum.Enum):
    EXTENDED = "Extended"
    NO_EXTENSION = "NoExtension"
    BUDGET_EXHAUSTED = "BudgetExhausted"

    def __str__(self) -> str:
        return self.value


class BadS(ValueError):
    pass


class BadPrecoloring(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass
class SearchProblem:
    graph: SimpleGraph
    assignment: MatchingAssignment
    precolored: Mapping[int, int] = field(default_factory=dict)
    budget: int = DEFAULT_BUDGET


@dataclass
class SearchOutcome:
    status: Status
    coloring: dict[int, int] | None
    nodes: int
    max_depth: int
    elapsed: float
    theorem: str | None = None

    @property
    def extended(self) -> bool:
        return self.status is Status.EXTENDED


class _Compiled:
    """Index-based view of (graph, assignment) for the search loop."""

    __slots__ = ("order", "index", "colors", "nbrs", "partner", "full")

    def __init__(self, g: SimpleGraph, m: MatchingAssignment):
        self.order = list(g.vertices)
        self.index = {v: i for i, v in enumerate(self.order)}
        universe = sorted(set().union(*(m.lists[v] for v in self.order))) if self.order else []
        self.colors = universe
        bit = {c: i for i, c in enumerate(universe)}
        n = len(self.order)
        self.full = [sum(1 << bit[c] for c in m.lists[v]) for v in self.order]
        self.nbrs: list[list[int]] = [[] for _ in range(n)]
        # partner[i][j][b] = bitmask to clear at j when i takes color bit b
        self.partner: list[dict[int, list[int]]] = [dict() for _ in range(n)]
        for u, v in g.edges:
            i, j = self.index[u], self.index[v]
            self.nbrs[i].append(j)
            self.nbrs[j].append(i)
            fw = [0] * len(universe)
            bw = [0] * len(universe)
            for a, b in m.pairs(u, v):
                fw[bit[a]] |= 1 << bit[b]
                bw[bit[b]] |= 1 << bit[a]
            self.partner[i][j] = fw
            self.partner[j][i] = bw


def _search(comp: _Compiled, domains: list[int], assigned: list[int], budget: int):
    """Depth-first search; returns (status, nodes, max_depth)."""
    n = len(domains)
    nodes = 0
    max_depth = 0
    nbrs, partner = comp.nbrs, comp.partner
    exhausted = False

    def rec(depth: int) -> bool:
        nonlocal nodes, max_depth, exhausted
        best, best_size = -1, 1 << 30
        for i in range(n):
            if assigned[i] < 0:
                size = domains[i].bit_count()
                if size < best_size:
                    best, best_size = i, size
                    if size <= 1:
                        break
        if best < 0:
            return True
        dom = domains[best]
        b = 0
        while dom:
            if dom & 1:
                nodes += 1
                if nodes > budget:
                    exhausted = True
                    return False
                if depth + 1 > max_depth:
                    max_depth = depth + 1
                assigned[best] = b
                saved = []
                ok = True
                for j in nbrs[best]:
                    if assigned[j] < 0:
                        mask = partner[best][j][b]
                        if domains[j] & mask:
                            saved.append((j, domains[j]))
                            domains[j] &= ~mask
                            if not domains[j]:
                                ok = False
                                break
                if ok and rec(depth + 1):
                    return True
                for j, d in saved:
                    domains[j] = d
                assigned[best] = -1
                if exhausted:
                    return False
            dom >>= 1
            b += 1
        return False

    found = rec(0)
    if found:
        return Status.EXTENDED, nodes, max_depth
    return (Status.BUDGET_EXHAUSTED if exhausted else Status.NO_EXTENSION), nodes, max_depth


def find_mcoloring(p: SearchProblem) -> SearchOutcome:
    start = time.perf_counter()
    g, m = p.graph, p.assignment
    bad = conflicts(g, m, p.precolored)
    if bad:
        raise BadPrecoloring(f"precoloring uses matched pairs on edges {bad}")
    comp = _Compiled(g, m)
    bit = {c: i for i, c in enumerate(comp.colors)}
    domains = list(comp.full)
    assigned = [-1] * len(domains)
    for v, c in p.precolored.items():
        i = comp.index[v]
        if c not in m.lists[v]:
            raise BadPrecoloring(f"color {c} is not in the list of {v}")
        assigned[i] = bit[c]
        domains[i] = 1 << bit[c]
    dead = False
    for v, c in p.precolored.items():
        i = comp.index[v]
        for j in comp.nbrs[i]:
            if assigned[j] < 0:
                domains[j] &= ~comp.partner[i][j][bit[c]]
                dead = dead or not domains[j]
    if dead:
        return SearchOutcome(Status.NO_EXTENSION, None, 0, 0, time.perf_counter() - start)
    status, nodes, depth = _search(comp, domains, assigned, p.budget)
    coloring = None
    if status is Status.EXTENDED:
        coloring = {v: comp.colors[assigned[i]] for i, v in enumerate(comp.order)}
    return SearchOutcome(status, coloring, nodes, depth, time.perf_counter() - start)


def validate_S(g: SimpleGraph, S: Sequence[int], theorem: str | None = None) -> str:
    """Check the shape of S; returns "vertex" or "cycle"."""
    S = list(S)
    single_ok, max_len = THEOREM_BOUNDS.get(theorem, (True, None)) if theorem else (True, None)
    if theorem is not None and theorem not in THEOREM_BOUNDS:
        raise BadS(f"unknown theorem {theorem!r}")
    if len(S) == 1:
        if S[0] not in g.vertices:
            raise BadS(f"unknown vertex {S[0]}")
        if not single_ok:
            raise BadS(f"{theorem} needs S to be a cycle")
        return "vertex"
    if len(S) < 3 or len(set(S)) != len(S):
        raise BadS("S must be a single vertex or the vertex sequence of a cycle")
    for a, b in zip(S, S[1:] + S[:1]):
        if not g.has_edge(a, b):
            raise BadS(f"S is not a cycle: {a}-{b} is not an edge")
    if max_len is not None and len(S) > max_len:
        raise BadS(f"{theorem} allows cycles of length at most {max_len}, got {len(S)}")
    return "cycle"


def extend_precolored(
    g: SimpleGraph,
    m: MatchingAssignment,
    S: Sequence[int],
    phi: Mapping[int, int],
    theorem: str | None = None,
    budget: int = DEFAULT_BUDGET,
) -> SearchOutcome:
    """Extend an M-coloring of G[S] to all of G."""
    validate_S(g, S, theorem)
    if set(phi) != set(S):
        raise BadPrecoloring("phi must color exactly the vertices of S")
    for v, c in phi.items():
        if c not in m.lists[v]:
            raise BadPrecoloring(f"color {c} is not in the list of {v}")
    bad = conflicts(g, m, phi)
    if bad:
        raise BadPrecoloring(f"phi uses matched pairs on edges {bad}")
    out = find_mcoloring(SearchProblem(g, m, dict(phi), budget))
    out.theorem = theorem
    return out


# -- adversarial DP-chromatic number -------------------------------------------------


@dataclass
class ChiDPResult:
    chi: int | None  # None: not DP-k_max-colorable
    witness: MatchingAssignment | None  # uncolorable assignment for chi - 1 (or k_max)
    checked: dict[int, int]  # k -> assignments examined


def _spanning_forest(g: SimpleGraph) -> list[tuple[int, int]]:
    seen: set[int] = set()
    tree = []
    for r in g.vertices:
        if r in seen:
            continue
        seen.add(r)
        stack = [r]
        while stack:
            x = stack.pop()
            for y in sorted(g.neighbors(x)):
                if y not in seen:
                    seen.add(y)
                    tree.append(edge_key(x, y))
                    stack.append(y)
    return tree


def adversarial_chi_dp(
    g: SimpleGraph,
    k_max: int = 4,
    symmetry_reduction: bool = True,
    max_edges: int = 12,
    max_assignments: int = 2_000_000,
) -> ChiDPResult:
    """Least k such that every perfect k-matching assignment admits a coloring.

    Perfect matchings suffice: removing pairs never destroys a coloring.  With
    ``symmetry_reduction`` a spanning forest is fixed straight, which is
    without loss of generality because forests have no cycles to obstruct a
    renaming.
    """
    if k_max > 4 or len(g.edges) > max_edges:
        raise TooLarge(f"graph too large for exhaustive search (|E|={len(g.edges)}, k_max={k_max})")
    tree = _spanning_forest(g) if symmetry_reduction else []
    free = [e for e in g.edges if e not in set(tree)]
    checked: dict[int, int] = {}
    witness = None
    for k in range(1, k_max + 1):
        perms = list(itertools.permutations(range(k)))
        total = len(perms) ** len(free)
        if total > max_assignments:
            raise TooLarge(f"{total} assignments at k={k} exceed the cap {max_assignments}")
        hard = _first_uncolorable(g, k, tree, free, perms)
        checked[k] = hard[1]
        if hard[0] is None:
            return ChiDPResult(k, witness, checked)
        witness = hard[0]
    return ChiDPResult(None, witness, checked)


def _first_uncolorable(g, k, tree, free, perms):
    """Scan assignments at k; returns (uncolorable assignment or None, count examined)."""
    n = len(g.vertices)
    index = {v: i for i, v in enumerate(g.vertices)}
    ident = tuple(range(k))
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in g.edges:
        nbrs[index[u]].append(index[v])
        nbrs[index[v]].append(index[u])
    comp = _Compiled.__new__(_Compiled)
    comp.order = list(g.vertices)
    comp.index = index
    comp.colors = list(range(1, k + 1))
    comp.full = [(1 << k) - 1] * n
    comp.nbrs = nbrs
    count = 0
    for choice in itertools.product(perms, repeat=len(free)):
        count += 1
        partner: list[dict[int, list[int]]] = [dict() for _ in range(n)]
        perm_of = {e: ident for e in tree}
        perm_of.update(zip(free, choice))
        for (u, v), p in perm_of.items():
            i, j = index[u], index[v]
            partner[i][j] = [1 << p[a] for a in range(k)]
            back = [0] * k
            for a in range(k):
                back[p[a]] = 1 << a
            partner[j][i] = back
        comp.partner = partner
        status, _, _ = _search(comp, list(comp.full), [-1] * n, DEFAULT_BUDGET)
        if status is not Status.EXTENDED:
            lists = uniform_lists(g.vertices, k)
            matchings = {e: [(a + 1, p[a] + 1) for a in range(k)] for e, p in perm_of.items()}
            return MatchingAssignment(lists, matchings, g.edges), count
    return None, count
