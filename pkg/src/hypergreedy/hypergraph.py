"""Uniform regular hypergraphs: pairing-model generation and structural utilities.

Edges are stored as ordered tuples of vertex indices. Repeated entries are
allowed so that every outcome of the pairing model is representable; use
:func:`is_simple` to test for loops and multi-edges.

Randomness comes from numpy's PCG64 bit generator (``np.random.default_rng``),
so a given seed yields the same hypergraph on every platform.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AttemptsExhausted, ConsistencyError, InvalidParameters, ParseError

ACYCLIC = None  # girth of a hypergraph without cycles


@dataclass(frozen=True)
class Hypergraph:
    """A k-uniform hypergraph on vertices ``0..n-1``.

    ``d`` is the common vertex degree (slot count with multiplicity) or
    ``None`` when the hypergraph is not regular.
    """

    n: int
    k: int
    d: int | None
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0 or self.k < 1:
            raise ConsistencyError(f"bad sizes n={self.n}, k={self.k}")
        deg = [0] * self.n
        for idx, e in enumerate(self.edges):
            if len(e) != self.k:
                raise ConsistencyError(f"edge {idx} has {len(e)} entries, expected {self.k}")
            for v in e:
                if not 0 <= v < self.n:
                    raise ConsistencyError(f"edge {idx} has vertex {v} outside [0, {self.n})")
                deg[v] += 1
        if self.d is not None:
            bad = [v for v, c in enumerate(deg) if c != self.d]
            if bad:
                raise ConsistencyError(
                    f"vertex {bad[0]} lies in {deg[bad[0]]} edge slots, expected d={self.d}"
                )

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]], n: int | None = None,
                   k: int | None = None) -> "Hypergraph":
        """Build a hypergraph, inferring ``n``, ``k`` and regularity when omitted."""
        edges = tuple(tuple(int(v) for v in e) for e in edges)
        if k is None:
            if not edges:
                raise ConsistencyError("cannot infer k from an empty edge list")
            k = len(edges[0])
        if n is None:
            n = 1 + max((v for e in edges for v in e), default=-1)
        deg = Counter(v for e in edges for v in e)
        degrees = {deg.get(v, 0) for v in range(n)}
        d = degrees.pop() if len(degrees) == 1 else None
        if n == 0:
            d = 0
        return cls(n=n, k=k, d=d, edges=edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_regular(self) -> bool:
        return self.d is not None

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def relabel(self, perm: Sequence[int]) -> "Hypergraph":
        """Return a copy with vertex ``v`` renamed to ``perm[v]``."""
        return Hypergraph(self.n, self.k, self.d,
                          tuple(tuple(perm[v] for v in e) for e in self.edges))


@dataclass(frozen=True)
class IncidenceGraph:
    """Bipartite incidence multigraph: one link per (vertex, edge-slot) incidence.

    ``links`` is kept sorted so two incidence graphs compare equal exactly when
    they have the same link multiset.
    """

    n_a: int
    n_b: int
    links: tuple[tuple[int, int], ...]

    def degrees_a(self) -> list[int]:
        deg = [0] * self.n_a
        for a, _ in self.links:
            deg[a] += 1
        return deg

    def degrees_b(self) -> list[int]:
        deg = [0] * self.n_b
        for _, b in self.links:
            deg[b] += 1
        return deg

    def transposed(self) -> "IncidenceGraph":
        return IncidenceGraph(self.n_b, self.n_a, tuple(sorted((b, a) for a, b in self.links)))


def _check_params(k: int, d: int, n: int) -> None:
    if k < 2 or d < 1 or n < 1:
        raise InvalidParameters(f"need k >= 2, d >= 1, n >= 1 (got k={k}, d={d}, n={n})")
    if (d * n) % k:
        raise InvalidParameters(f"k={k} does not divide d*n={d * n}")


def generate_configuration(k: int, d: int, n: int, seed=None) -> Hypergraph:
    """Hypergraph induced by a uniformly random pairing of vertex- and edge-points.

    Vertex-point ``i`` belongs to vertex ``i // d`` and edge-point ``j`` to edge
    ``j // k``; edge-point ``j`` is paired with vertex-point ``perm[j]``.
    ``seed`` may be anything accepted by ``np.random.default_rng``.
    """
    _check_params(k, d, n)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n * d)
    slots = (perm // d).reshape(-1, k)
    edges = tuple(map(tuple, slots.tolist()))
    return Hypergraph(n=n, k=k, d=d, edges=edges)


def is_simple(h: Hypergraph) -> bool:
    """True iff there are no loops (repeated vertex in an edge) and no multi-edges."""
    seen = set()
    for e in h.edges:
        if len(set(e)) != len(e):
            return False
        key = tuple(sorted(e))
        if key in seen:
            return False
        seen.add(key)
    return True


def generate_simple(k: int, d: int, n: int, seed=None, max_attempts: int = 1000) -> Hypergraph:
    """Rejection-sample the pairing model until a simple hypergraph comes out.

    Attempt ``i`` uses the ``i``-th child of ``SeedSequence(seed)``.
    """
    _check_params(k, d, n)
    if max_attempts < 1:
        raise InvalidParameters("max_attempts must be >= 1")
    ss = np.random.SeedSequence(seed)
    for _ in range(max_attempts):
        (child,) = ss.spawn(1)
        h = generate_configuration(k, d, n, child)
        if is_simple(h):
            return h
    raise AttemptsExhausted(
        f"no simple (k={k}, d={d}, n={n}) hypergraph in {max_attempts} attempts"
    )


def incidence_graph(h: Hypergraph) -> IncidenceGraph:
    links = sorted((v, j) for j, e in enumerate(h.edges) for v in e)
    return IncidenceGraph(h.n, h.m, tuple(links))


def dual(h: Hypergraph) -> Hypergraph:
    """Swap the roles of vertices and edges.

    Edge ``j`` of ``h`` becomes vertex ``j`` of the dual and vertex ``v`` of
    ``h`` becomes edge ``v``, listing (with multiplicity, ascending) the edges
    of ``h`` that contain ``v``.
    """
    if h.d is None:
        raise ConsistencyError("the dual is only defined here for regular hypergraphs")
    members: list[list[int]] = [[] for _ in range(h.n)]
    for j, e in enumerate(h.edges):
        for v in e:
            members[v].append(j)
    return Hypergraph(n=h.m, k=h.d, d=h.k, edges=tuple(tuple(sorted(x)) for x in members))


def girth(h: Hypergraph) -> int | None:
    """Length of the shortest Berge cycle, or ``None`` (:data:`ACYCLIC`).

    Computed as half the shortest cycle of the incidence multigraph, so a loop
    (vertex repeated inside an edge) has length 1 and two edges sharing two
    vertices have length 2.
    """
    # nodes 0..n-1 are vertices, n..n+m-1 are edges; links carry ids so
    # parallel links register as 2-cycles
    n_nodes = h.n + h.m
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
    lid = 0
    for j, e in enumerate(h.edges):
        for v in e:
            adj[v].append((h.n + j, lid))
            adj[h.n + j].append((v, lid))
            lid += 1

    best = None
    dist = [-1] * n_nodes
    via = [-1] * n_nodes
    for root in range(n_nodes):
        if not adj[root]:
            continue
        touched = [root]
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if best is not None and 2 * dist[u] >= best:
                break
            for w, link in adj[u]:
                if link == via[u]:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    via[w] = link
                    touched.append(w)
                    queue.append(w)
                else:
                    length = dist[u] + dist[w] + 1
                    if best is None or length < best:
                        best = length
        for t in touched:
            dist[t] = -1
            via[t] = -1
    return None if best is None else best // 2


def encode(h: Hypergraph) -> str:
    """Serialize to the text format: header ``k d n m`` then one edge per line."""
    if h.d is None:
        raise ConsistencyError("only regular hypergraphs have a file encoding")
    lines = [f"{h.k} {h.d} {h.n} {h.m}"]
    lines.extend(" ".join(map(str, e)) for e in h.edges)
    return "\n".join(lines) + "\n"


def decode(text: str) -> Hypergraph:
    if not text.endswith("\n"):
        raise ParseError("missing trailing newline", line=text.count("\n") + 1)
    rows = []
    for lineno, raw in enumerate(text.split("\n")[:-1], start=1):
        if raw.lstrip().startswith("#"):
            continue
        try:
            rows.append((lineno, [int(tok) for tok in raw.split()]))
        except ValueError:
            raise ParseError(f"non-integer token in {raw!r}", line=lineno) from None
    if not rows:
        raise ParseError("missing header line", line=1)
    lineno, header = rows[0]
    if len(header) != 4:
        raise ParseError("header must be 'k d n m'", line=lineno)
    k, d, n, m = header
    if k < 1 or d < 0 or n < 0 or m < 0:
        raise ParseError("header values out of range", line=lineno)
    edges = []
    for lineno, vals in rows[1:]:
        if len(vals) != k:
            raise ParseError(f"edge line has {len(vals)} entries, expected k={k}", line=lineno)
        edges.append(tuple(vals))
    if len(edges) != m:
        raise ConsistencyError(f"header declares m={m} edges but {len(edges)} were given")
    if m * k != n * d:
        raise ConsistencyError(f"m*k={m * k} differs from n*d={n * d}")
    return Hypergraph(n=n, k=k, d=d, edges=tuple(edges))


def fano_plane() -> Hypergraph:
    """The Fano plane: 7 points, 7 lines, 3-uniform and 3-regular."""
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return Hypergraph(n=7, k=3, d=3, edges=tuple(lines))
