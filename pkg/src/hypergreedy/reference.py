"""Degree-greedy matching and independent-set algorithms on explicit hypergraphs.

These run the hypergraph-level algorithms directly (vertex deletion removes
every edge through the vertex) rather than the lazily revealed pairing model.
They are slow but transparent and serve as a cross-check for the pairing
simulation and as the greedy side of the exact-oracle comparisons.

Degrees count edge slots, so an edge holding a vertex twice contributes two,
the same convention as :meth:`Hypergraph.degrees` and the pairing model. For
the independent algorithm an edge is the set of its vertices that have not yet
joined ``I``: once a single vertex remains, that vertex is closed and deleted.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameters
from .hypergraph import Hypergraph
from .pairing import INDEPENDENT, KINDS, MATCHING, SimResult


class _Buckets:
    """Vertices grouped by degree with O(1) uniform draws and moves."""

    def __init__(self, degrees: list[int], top: int):
        self.lists: list[list[int]] = [[] for _ in range(top + 1)]
        self.pos = [0] * len(degrees)
        self.deg = list(degrees)
        for v, c in enumerate(degrees):
            self.pos[v] = len(self.lists[c])
            self.lists[c].append(v)

    def remove(self, v: int) -> None:
        lst = self.lists[self.deg[v]]
        i = self.pos[v]
        last = lst.pop()
        if last != v:
            lst[i] = last
            self.pos[last] = i

    def move(self, v: int, c: int) -> None:
        self.remove(v)
        self.deg[v] = c
        self.pos[v] = len(self.lists[c])
        self.lists[c].append(v)

    def draw_min(self, rng, lo: int) -> int | None:
        for c in range(lo, len(self.lists)):
            if self.lists[c]:
                lst = self.lists[c]
                return lst[int(rng.integers(len(lst)))]
        return None

    def sizes(self) -> list[int]:
        return [len(lst) for lst in self.lists]


def _incidence(h: Hypergraph):
    """Distinct vertex sets, distinct edges through each vertex, slot multiplicities."""
    sets = [set(e) for e in h.edges]
    through: list[list[int]] = [[] for _ in range(h.n)]
    mult = [dict() for _ in range(h.m)]
    for j, e in enumerate(h.edges):
        for v in e:
            mult[j][v] = mult[j].get(v, 0) + 1
        for v in sets[j]:
            through[v].append(j)
    return sets, through, mult


def _row(step, n, hint, ysizes, d, zc, k, frac):
    y = [ysizes[j] / n if j < len(ysizes) else 0.0 for j in range(1, d + 1)]
    z = [zc[j] / n for j in range(1, k + 1)]
    return [step / n, hint] + y + z + [frac]


def _run_matching(h: Hypergraph, rng, top: int, d: int):
    sets, through, mult = _incidence(h)
    alive = [True] * h.m
    deleted = [False] * h.n
    b = _Buckets(h.degrees(), top)
    zc = [0] * (h.k + 1)
    zc[h.k] = h.m
    matched: list[int] = []
    rows = []

    def kill(j):
        alive[j] = False
        zc[h.k] -= 1
        for u in sets[j]:
            if not deleted[u]:
                b.move(u, b.deg[u] - mult[j][u])

    while True:
        v = b.draw_min(rng, 1)
        if v is None:
            break
        r = b.deg[v]
        live = [j for j in through[v] if alive[j]]
        e = live[int(rng.integers(len(live)))]
        matched.append(e)
        for u in sets[e]:
            deleted[u] = True
            b.remove(u)
        for u in sets[e]:
            for j in through[u]:
                if alive[j]:
                    kill(j)
        rows.append(_row(len(matched), h.n, d - r, b.sizes(), d, zc, h.k, len(matched) / h.n))

    covered = set().union(*(sets[j] for j in matched)) if matched else set()
    return tuple(matched), h.n - len(covered), rows


def _run_independent(h: Hypergraph, rng, top: int, d: int):
    sets, through, mult = _incidence(h)
    rem = [set(e) for e in sets]  # vertices of each edge not yet in I
    alive = [True] * h.m
    gone = [False] * h.n  # selected or closed
    b = _Buckets(h.degrees(), top)
    zc = [0] * (h.k + 1)
    for e in rem:
        zc[len(e)] += 1
    chosen: list[int] = []
    rows = []

    def kill(j):
        alive[j] = False
        zc[len(rem[j])] -= 1
        for u in rem[j]:
            if not gone[u]:
                b.move(u, b.deg[u] - mult[j][u])

    def close(w):
        gone[w] = True
        b.remove(w)
        for j in through[w]:
            if alive[j]:
                kill(j)

    # an edge with a single distinct vertex can never be completed by I
    for j, e in enumerate(rem):
        if len(e) == 1 and alive[j]:
            (w,) = e
            if not gone[w]:
                close(w)

    while True:
        v = b.draw_min(rng, 0)
        if v is None:
            break
        r = b.deg[v]
        chosen.append(v)
        gone[v] = True
        b.remove(v)
        pending = []
        for j in through[v]:
            if alive[j]:
                zc[len(rem[j])] -= 1
                rem[j].discard(v)
                zc[len(rem[j])] += 1
                if len(rem[j]) == 1:
                    pending.append(j)
        for j in pending:
            if alive[j]:
                (w,) = rem[j]
                if not gone[w]:
                    close(w)
        rows.append(_row(len(chosen), h.n, d - r, b.sizes(), d, zc, h.k, len(chosen) / h.n))

    return tuple(chosen), rows


def is_matching(h: Hypergraph, edge_ids) -> bool:
    seen: set[int] = set()
    for j in edge_ids:
        e = set(h.edges[j])
        if e & seen:
            return False
        seen |= e
    return len(set(edge_ids)) == len(edge_ids)


def is_independent(h: Hypergraph, vertices) -> bool:
    s = set(vertices)
    return not any(set(e) <= s for e in h.edges)


def run_reference(h: Hypergraph, kind: str, seed=None) -> SimResult:
    """Run the degree-greedy algorithm on ``h``; ``members`` holds the output.

    For matchings ``members`` are edge indices, for independent sets vertex
    indices. The output is checked before returning.
    """
    if kind not in KINDS:
        raise InvalidParameters(f"unknown process {kind!r}")
    rng = np.random.default_rng(seed)
    degs = h.degrees()
    top = max(degs, default=0)
    d = h.d if h.d is not None else top
    width = 3 + d + h.k
    if kind == MATCHING:
        members, unmatched, rows = _run_matching(h, rng, top, d)
        assert is_matching(h, members)
    else:
        members, rows = _run_independent(h, rng, top, d)
        unmatched = None
        assert is_independent(h, members)
    traj = np.asarray(rows, dtype=float).reshape(-1, width)
    size = len(members)
    return SimResult(process=kind, k=h.k, d=d, n=h.n, size=size,
                     fraction=size / h.n if h.n else 0.0, unmatched=unmatched, seed=seed,
                     steps=size, trajectory=traj, members=members)


__all__ = ["run_reference", "is_matching", "is_independent", "MATCHING", "INDEPENDENT"]
