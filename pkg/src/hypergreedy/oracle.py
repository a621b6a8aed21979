"""Exact maximum matching and independence number for tiny hypergraphs.

Both searches are plain branch-and-bound over Python-int bitmasks, seeded with
a greedy incumbent. They exist to give ground truth for the greedy processes,
so clarity wins over speed; anything past a few dozen vertices will exhaust
the node budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, InvalidParameters
from .hypergraph import Hypergraph
from .reference import is_independent, is_matching, run_reference

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class ExactResult:
    value: int
    witness: tuple[int, ...]
    nodes: int

    def to_dict(self) -> dict:
        return {"value": self.value, "witness": list(self.witness), "nodes": self.nodes}


@dataclass(frozen=True)
class GreedyStats:
    mean: float
    stderr: float
    values: tuple[int, ...]


class _Counter:
    def __init__(self, budget: int):
        if budget < 1:
            raise InvalidParameters("budget must be positive")
        self.budget = budget
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted(f"search exceeded {self.budget} nodes")


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def exact_max_matching(h: Hypergraph, budget: int = DEFAULT_BUDGET) -> ExactResult:
    """Maximum number of pairwise disjoint edges, with one optimal witness."""
    ctr = _Counter(budget)
    emask = [sum(1 << v for v in set(e)) for e in h.edges]
    smallest = min((bin(x).count("1") for x in emask), default=1)
    through = [[] for _ in range(h.n)]
    for j, x in enumerate(emask):
        for v in _bits(x):
            through[v].append(j)
    # high-conflict edges first within each branching vertex
    conflicts = [sum(1 for y in emask if y & x) for x in emask]
    for lst in through:
        lst.sort(key=lambda j: -conflicts[j])

    # greedy incumbent: repeatedly take the edge with the fewest conflicts
    best: list[int] = []
    used = 0
    for j in sorted(range(h.m), key=lambda j: conflicts[j]):
        if not emask[j] & used:
            best.append(j)
            used |= emask[j]

    def search(free: int, chosen: list[int]) -> None:
        nonlocal best
        ctr.tick()
        # vertices that still lie in some usable edge
        live = 0
        for x in emask:
            if x & free == x:
                live |= x
        if len(chosen) + bin(live).count("1") // smallest <= len(best):
            return
        if not live:
            best = list(chosen)
            return
        # branch on the live vertex with the fewest usable edges
        v = min(_bits(live), key=lambda u: sum(1 for j in through[u] if emask[j] & free == emask[j]))
        for j in through[v]:
            x = emask[j]
            if x & free == x:
                chosen.append(j)
                search(free & ~x, chosen)
                chosen.pop()
        search(free & ~(1 << v), chosen)

    search((1 << h.n) - 1, [])
    assert is_matching(h, best)
    return ExactResult(len(best), tuple(sorted(best)), ctr.nodes)


def exact_max_independent(h: Hypergraph, budget: int = DEFAULT_BUDGET) -> ExactResult:
    """Largest vertex set containing no edge, found as n minus a minimum transversal."""
    ctr = _Counter(budget)
    emask = sorted({sum(1 << v for v in set(e)) for e in h.edges})
    deg = [0] * h.n
    for x in emask:
        for v in _bits(x):
            deg[v] += 1

    # greedy transversal: hit each unhit edge with its highest-degree vertex
    hit = 0
    for x in emask:
        if not x & hit:
            hit |= 1 << max(_bits(x), key=lambda v: deg[v])
    best = hit

    def packing_bound(unhit: list[int]) -> int:
        used, count = 0, 0
        for x in unhit:
            if not x & used:
                used |= x
                count += 1
        return count

    def search(chosen: int, banned: int) -> None:
        nonlocal best
        ctr.tick()
        unhit = [x for x in emask if not x & chosen]
        if not unhit:
            if bin(chosen).count("1") < bin(best).count("1"):
                best = chosen
            return
        size = bin(chosen).count("1")
        if size + packing_bound(unhit) >= bin(best).count("1"):
            return
        # branch on the unhit edge with the fewest admissible vertices
        edge = min(unhit, key=lambda x: bin(x & ~banned).count("1"))
        cand = sorted(_bits(edge & ~banned), key=lambda v: -deg[v])
        for v in cand:
            search(chosen | (1 << v), banned)
            banned |= 1 << v  # later branches must avoid v

    search(0, 0)
    witness = tuple(v for v in range(h.n) if not best >> v & 1)
    assert is_independent(h, witness)
    return ExactResult(len(witness), witness, ctr.nodes)


def greedy_mean(h: Hypergraph, kind: str, reps: int, seed=None) -> GreedyStats:
    """Mean and standard error of the degree-greedy output size on the fixed instance ``h``."""
    if reps < 1:
        raise InvalidParameters("reps must be >= 1")
    children = np.random.SeedSequence(seed).spawn(reps)
    values = tuple(run_reference(h, kind, c).size for c in children)
    arr = np.asarray(values, dtype=float)
    stderr = float(arr.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return GreedyStats(float(arr.mean()), stderr, values)
