"""Extension stress campaigns.

For every instance: generate -> hypothesis filter -> (if it passes) sample
matching assignments and valid precolorings of S -> extension search ->
structural preconditions and discharging verdict.  Everything is derived
from ``(spec, seed)``, and the text log carries no timings, so reruns are
byte-identical.
"""

from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..discharging import OUTER_BOUND, apply_rules, check_preconditions, verdict
from ..dp_core import is_mcoloring, random_assignment
from ..patterns import hypothesis_filter
from ..plane_graph import PlaneGraph, enumerate_cycles
from ..solver import DEFAULT_BUDGET, THEOREM_BOUNDS, Status, extend_precolored
from .formats import canonical_hash, result_record
from .generators import GenerationFailed, generate

K = 4


@dataclass
class CampaignSpec:
    theorem: str
    count: int
    size_range: tuple[int, int] = (8, 20)
    seed: int = 0
    profile: str | None = None  # None: outer-cycle(k) with k drawn from 3..bound
    assignment_profile: str = "full-random-perfect"
    assignments: int = 4
    precolorings: int = 8
    strategy: str = "sampled"  # or "all" (every valid phi, up to precoloring_cap)
    precoloring_cap: int = 5000
    repair: bool = True
    budget: int = DEFAULT_BUDGET
    workers: int = 1

    def __post_init__(self):
        if self.theorem not in THEOREM_BOUNDS:
            raise ValueError(f"unknown theorem {self.theorem!r}")
        if self.strategy not in ("sampled", "all"):
            raise ValueError("strategy must be 'sampled' or 'all'")
        lo, hi = self.size_range
        if not 3 <= lo <= hi:
            raise ValueError(f"bad size range {self.size_range}")


@dataclass
class SearchRecord:
    search_id: str
    status: Status
    nodes: int
    depth: int
    elapsed: float
    revalidated: bool


@dataclass
class InstanceRecord:
    instance_id: str
    seed: int
    hash: str = ""
    n: int = 0
    edges: int = 0
    cycle: tuple[int, ...] = ()
    filter_passed: bool = False
    filter_witnesses: tuple[str, ...] = ()
    searches: list[SearchRecord] = field(default_factory=list)
    preconditions: str = ""
    preconditions_passed: bool = False
    verdict_passed: bool = False
    verdict_nonnegative: bool = False
    verdict_witness: str = "none"
    error: str | None = None

    def log_lines(self) -> list[str]:
        if self.error is not None:
            return [f"instance {self.instance_id} seed={self.seed} error={self.error}"]
        filt = "pass" if self.filter_passed else "fail(" + ",".join(self.filter_witnesses) + ")"
        s = ",".join(map(str, self.cycle)) or "none"
        out = [f"instance {self.instance_id} seed={self.seed} hash={self.hash} n={self.n} e={self.edges} S={s} filter={filt}"]
        out += [result_record(r.search_id, r.status, r.nodes, r.depth) for r in self.searches]
        if self.filter_passed:
            out.append(
                f"ledger {self.instance_id} preconditions={self.preconditions} "
                f"verdict={'pass' if self.verdict_passed else 'fail'} "
                f"nonnegative={str(self.verdict_nonnegative).lower()} witness={self.verdict_witness}"
            )
        return out


@dataclass
class CampaignResult:
    spec: CampaignSpec
    records: list[InstanceRecord]

    @property
    def counters(self) -> Counter:
        c: Counter = Counter(instances=len(self.records))
        hashes: Counter = Counter()
        for r in self.records:
            if r.error is not None:
                c["errors"] += 1
                continue
            hashes[r.hash] += 1
            c["filter_pass" if r.filter_passed else "filter_fail"] += 1
            for s in r.searches:
                c["searches"] += 1
                c[str(s.status)] += 1
                if s.status is Status.EXTENDED and not s.revalidated:
                    c["revalidation_failures"] += 1
            if r.preconditions_passed:
                c["preconditions_pass"] += 1
                c["clean_verdict_pass" if r.verdict_passed else "clean_verdict_fail"] += 1
        c["duplicates"] = sum(n - 1 for n in hashes.values())
        return c

    @property
    def max_search_seconds(self) -> float:
        return max((s.elapsed for r in self.records for s in r.searches), default=0.0)

    def log_lines(self) -> list[str]:
        out = []
        for r in self.records:
            out += r.log_lines()
        c = self.counters
        out.append("summary " + " ".join(f"{k}={c[k]}" for k in sorted(c)))
        return out


def instance_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def choose_cycle(g: PlaneGraph, theorem: str, rng: random.Random) -> tuple[int, ...] | None:
    """The outer face if it is a short enough cycle, else a random short cycle."""
    bound = THEOREM_BOUNDS[theorem][1]
    outer = g.outer_face
    if outer is not None and outer.is_cycle() and outer.degree <= bound:
        return tuple(outer.vertices)
    cycles = enumerate_cycles(g, bound, cap=20_000)
    return tuple(rng.choice(cycles)) if cycles else None


def sample_precolorings(g, m, S, rng: random.Random, count: int, attempts: int = 20_000):
    """Up to ``count`` distinct valid M-colorings of G[S], by rejection sampling."""
    sub = [e for e in g.edges if e[0] in S and e[1] in S]
    found, seen = [], set()
    for _ in range(attempts):
        phi = {v: rng.choice(sorted(m.lists[v])) for v in S}
        key = tuple(sorted(phi.items()))
        if key in seen:
            continue
        if all(m.partner(u, v, phi[u]) != phi[v] for u, v in sub):
            seen.add(key)
            found.append(phi)
            if len(found) == count:
                break
    return found


def all_precolorings(g, m, S, cap: int):
    sub = [e for e in g.edges if e[0] in S and e[1] in S]
    out = []
    order = list(S)

    def rec(i, phi):
        if len(out) >= cap:
            return
        if i == len(order):
            out.append(dict(phi))
            return
        v = order[i]
        for c in sorted(m.lists[v]):
            phi[v] = c
            if all(m.partner(a, b, phi[a]) != phi[b] for a, b in sub if a in phi and b in phi):
                rec(i + 1, phi)
            del phi[v]

    rec(0, {})
    return out


def _search(g, m, S, phi, theorem, budget, sid) -> SearchRecord:
    out = extend_precolored(g, m, S, phi, theorem, budget)
    ok = out.status is not Status.EXTENDED or (
        is_mcoloring(g, m, out.coloring) and all(out.coloring[v] == c for v, c in phi.items())
    )
    return SearchRecord(sid, out.status, out.nodes, out.max_depth, out.elapsed, ok)


def run_instance(spec: CampaignSpec, index: int) -> InstanceRecord:
    seed = instance_seed(spec.seed, index)
    rec = InstanceRecord(f"{spec.theorem}-{index:04d}", seed)
    rng = random.Random(seed)
    try:
        lo, hi = spec.size_range
        size = rng.randint(lo, hi)
        profile = spec.profile
        if profile is None:
            k = rng.randint(3, min(OUTER_BOUND[spec.theorem], size))
            profile = f"outer-cycle({k})"
        g = generate(profile, size, seed, spec.theorem if spec.repair else None)
        rec.hash, rec.n, rec.edges = canonical_hash(g), len(g.vertices), len(g.edges)
        filt = hypothesis_filter(g, spec.theorem)
        rec.filter_passed = filt.passed
        rec.filter_witnesses = tuple(getattr(w, "pattern_id", getattr(w, "predicate", "?")) for w in filt.witnesses)
        if not filt.passed:
            return rec
        S = choose_cycle(g, spec.theorem, rng)
        rec.cycle = S or ()
        single_ok = THEOREM_BOUNDS[spec.theorem][0]
        for a in range(spec.assignments):
            m = random_assignment(g, K, rng.getrandbits(32), spec.assignment_profile)
            if S:
                if spec.strategy == "all":
                    phis = all_precolorings(g, m, S, spec.precoloring_cap)
                else:
                    phis = sample_precolorings(g, m, S, rng, spec.precolorings)
                for p, phi in enumerate(phis):
                    rec.searches.append(_search(g, m, S, phi, spec.theorem, spec.budget, f"{rec.instance_id}/a{a}/p{p}"))
            if single_ok:
                v = rng.choice(g.vertices)
                phi = {v: rng.choice(sorted(m.lists[v]))}
                rec.searches.append(_search(g, m, [v], phi, spec.theorem, spec.budget, f"{rec.instance_id}/a{a}/v{v}"))
        report = check_preconditions(g, spec.theorem)
        rec.preconditions, rec.preconditions_passed = report.summary(), report.passed
        led = apply_rules(g, spec.theorem)
        ver = verdict(led, g, spec.theorem)
        rec.verdict_passed, rec.verdict_nonnegative = ver.passed, ver.all_nonnegative
        if ver.positive_witness is not None:
            kind, key = ver.positive_witness
            rec.verdict_witness = "D" if ver.positive_witness == led.outer else f"{kind}{key}"
    except (GenerationFailed, ValueError, RuntimeError) as exc:
        rec.error = f"{type(exc).__name__}:{str(exc).replace(' ', '_')}"
    return rec


def _run_star(args):
    return run_instance(*args)


def run_campaign(spec: CampaignSpec) -> CampaignResult:
    jobs = [(spec, i) for i in range(spec.count)]
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            records = list(pool.map(_run_star, jobs, chunksize=4))
    else:
        records = [run_instance(*j) for j in jobs]
    return CampaignResult(spec, records)
