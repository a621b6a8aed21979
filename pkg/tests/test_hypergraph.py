import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hypergreedy.errors import AttemptsExhausted, ConsistencyError, InvalidParameters, ParseError
from hypergreedy.hypergraph import (
    ACYCLIC, Hypergraph, IncidenceGraph, decode, dual, encode, fano_plane, generate_configuration,
    generate_simple, girth, incidence_graph, is_simple,
)


def edges(*es):
    return Hypergraph.from_edges(es)


def brute_girth(h):
    """Shortest closed walk in the incidence multigraph that reuses no node, by DFS."""
    n_nodes = h.n + h.m
    adj = [[] for _ in range(n_nodes)]
    lid = 0
    for j, e in enumerate(h.edges):
        for v in e:
            adj[v].append((h.n + j, lid))
            adj[h.n + j].append((v, lid))
            lid += 1
    best = None

    def dfs(start, u, used_nodes, used_links, length):
        nonlocal best
        for w, link in adj[u]:
            if link in used_links:
                continue
            if w == start and length + 1 >= 2:
                if best is None or length + 1 < best:
                    best = length + 1
            elif w not in used_nodes and w > start:
                if best is None or length + 1 < best:
                    dfs(start, w, used_nodes | {w}, used_links | {link}, length + 1)

    for s in range(n_nodes):
        dfs(s, s, {s}, frozenset(), 0)
    return None if best is None else best // 2


class TestConstruction:
    def test_regular_edge_list_is_accepted(self):
        h = Hypergraph(n=3, k=3, d=1, edges=((0, 1, 2),))
        assert h.m == 1 and h.is_regular

    def test_wrong_edge_size(self):
        with pytest.raises(ConsistencyError):
            Hypergraph(n=3, k=3, d=1, edges=((0, 1),))

    def test_vertex_out_of_range(self):
        with pytest.raises(ConsistencyError):
            Hypergraph(n=3, k=3, d=1, edges=((0, 1, 3),))

    def test_irregular_with_declared_d(self):
        with pytest.raises(ConsistencyError):
            Hypergraph(n=4, k=3, d=1, edges=((0, 1, 2),))

    def test_from_edges_infers_irregular(self):
        h = edges((0, 1, 2), (0, 1, 3))
        assert h.d is None and h.degrees() == [2, 2, 1, 1]

    def test_relabel(self):
        h = edges((0, 1, 2))
        assert h.relabel([2, 0, 1]).edges == ((2, 0, 1),)


class TestGenerateConfiguration:
    def test_counts_for_three_vertices(self):
        for seed in range(20):
            h = generate_configuration(3, 2, 3, seed)
            assert h.m == 2
            assert all(len(e) == 3 for e in h.edges)
            assert sum(h.degrees()) == 6

    def test_single_edge(self):
        h = generate_configuration(2, 1, 2, seed=5)
        assert sorted(h.edges[0]) == [0, 1]

    @pytest.mark.parametrize("k,d,n", [(3, 3, 30), (4, 2, 50), (5, 5, 20), (2, 3, 10)])
    def test_regularity_after_generation(self, k, d, n):
        h = generate_configuration(k, d, n, seed=3)
        assert h.degrees() == [d] * n
        assert h.m == n * d // k

    def test_deterministic(self):
        assert generate_configuration(3, 3, 30, 11) == generate_configuration(3, 3, 30, 11)
        assert generate_configuration(3, 3, 30, 11) != generate_configuration(3, 3, 30, 12)

    @pytest.mark.parametrize("args", [(3, 2, 4), (1, 2, 3), (3, 0, 3), (3, 3, 0)])
    def test_invalid(self, args):
        with pytest.raises(InvalidParameters):
            generate_configuration(*args, seed=0)

    def test_simple_with_positive_probability(self):
        hits = sum(is_simple(generate_configuration(3, 3, 300, seed=s)) for s in range(100))
        assert hits / 100 >= 0.05

    def test_pairing_is_uniform_on_tiny_case(self):
        # (k=2, d=1, n=4): three perfect matchings on 4 points, each with probability 1/3
        counts = {}
        for s in range(3000):
            key = tuple(sorted(tuple(sorted(e)) for e in generate_configuration(2, 1, 4, s).edges))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 3
        for c in counts.values():
            assert abs(c / 3000 - 1 / 3) < 0.04


class TestSimplicity:
    def test_disjoint(self):
        assert is_simple(edges((0, 1, 2), (3, 4, 5)))

    def test_loop(self):
        assert not is_simple(edges((0, 0, 1), (2, 3, 4)))

    def test_multi_edge(self):
        assert not is_simple(edges((0, 1, 2), (2, 1, 0)))

    def test_generate_simple(self):
        h = generate_simple(3, 2, 30, seed=7, max_attempts=1000)
        assert is_simple(h) and h.degrees() == [2] * 30

    def test_three_vertices_never_simple(self):
        # every (3,2,3) outcome: two 3-edges over three vertices; enumerate all 6! pairings
        for perm in itertools.permutations(range(6)):
            slots = [p // 2 for p in perm]
            h = Hypergraph(3, 3, 2, (tuple(slots[:3]), tuple(slots[3:])))
            assert not is_simple(h)
        with pytest.raises(AttemptsExhausted):
            generate_simple(3, 2, 3, seed=1, max_attempts=10**5)

    def test_single_attempt(self):
        h = generate_simple(2, 1, 2, seed=0, max_attempts=1)
        assert sorted(h.edges[0]) == [0, 1]

    def test_bad_attempts(self):
        with pytest.raises(InvalidParameters):
            generate_simple(3, 2, 30, seed=0, max_attempts=0)


class TestIncidence:
    def test_star(self):
        g = incidence_graph(edges((0, 1, 2)))
        assert g == IncidenceGraph(3, 1, ((0, 0), (1, 0), (2, 0)))

    def test_three_vertex_instance(self):
        g = incidence_graph(generate_configuration(3, 2, 3, seed=2))
        assert (g.n_a, g.n_b, len(g.links)) == (3, 2, 6)

    @pytest.mark.parametrize("seed", range(5))
    def test_biregular(self, seed):
        g = incidence_graph(generate_configuration(4, 3, 40, seed))
        assert set(g.degrees_a()) == {3} and set(g.degrees_b()) == {4}
        assert len(g.links) == 120


class TestDual:
    def test_star_transpose(self):
        h = Hypergraph(n=3, k=3, d=1, edges=((0, 1, 2),))
        g = dual(h)
        assert (g.n, g.k, g.d) == (1, 1, 3)
        assert g.edges == ((0,), (0,), (0,))

    def test_involution(self):
        for seed in range(10):
            h = generate_configuration(3, 2, 6, seed)
            assert incidence_graph(dual(dual(h))) == incidence_graph(h)

    def test_incidence_is_transposed(self):
        h = generate_configuration(3, 3, 12, 4)
        assert incidence_graph(dual(h)) == incidence_graph(h).transposed()

    def test_fano_self_dual_parameters(self):
        g = dual(fano_plane())
        assert (g.n, g.k, g.d, g.m) == (7, 3, 3, 7)
        assert is_simple(g) and girth(g) == 3

    def test_irregular_rejected(self):
        with pytest.raises(ConsistencyError):
            dual(edges((0, 1, 2), (0, 1, 3)))


class TestGirth:
    def test_loop(self):
        assert girth(edges((0, 0, 1))) == 1

    def test_double_intersection(self):
        assert girth(edges((0, 1, 2), (0, 1, 3))) == 2

    def test_fano(self):
        assert girth(fano_plane()) == 3
        assert brute_girth(fano_plane()) == 3

    def test_acyclic(self):
        assert girth(edges((0, 1, 2), (2, 3, 4))) is ACYCLIC
        assert girth(Hypergraph(n=2, k=2, d=0, edges=())) is ACYCLIC

    def test_long_cycle(self):
        # a Berge 4-cycle of 3-edges, each with a private vertex
        h = edges((0, 1, 4), (1, 2, 5), (2, 3, 6), (3, 0, 7))
        assert girth(h) == 4

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_brute_force(self, seed):
        h = generate_configuration(3, 2, [3, 6, 9][seed % 3], seed)
        assert girth(h) == brute_girth(h)

    @pytest.mark.parametrize("seed", range(40))
    def test_girth_three_implies_simple(self, seed):
        h = generate_configuration(3, 2, 12, seed)
        g = girth(h)
        if g is None or g >= 3:
            assert is_simple(h)
        if not is_simple(h):
            assert g is not None and g <= 2

    @pytest.mark.parametrize("seed", range(40))
    def test_graphs_simple_iff_girth_three(self, seed):
        h = generate_configuration(2, 3, 10, seed)
        g = girth(h)
        assert is_simple(h) == (g is None or g >= 3)

    def test_simple_hypergraph_with_two_cycle(self):
        # for k >= 3 two edges can share two vertices without being equal
        h = edges((0, 1, 2), (0, 1, 3))
        assert is_simple(h) and girth(h) == 2

    @pytest.mark.parametrize("seed", range(20))
    def test_dual_preserves_girth(self, seed):
        h = generate_configuration([3, 4][seed % 2], 2, 12, seed)
        assert girth(dual(h)) == girth(h)


class TestEncoding:
    def test_format(self):
        h = Hypergraph(n=3, k=3, d=1, edges=((0, 1, 2),))
        assert encode(h) == "3 1 3 1\n0 1 2\n"

    def test_short_edge_line(self):
        with pytest.raises(ParseError) as info:
            decode("3 1 3 1\n0 1\n")
        assert info.value.line == 2

    def test_round_trip_generated(self):
        h = generate_configuration(3, 3, 30, seed=9)
        assert decode(encode(h)) == h

    def test_comments_are_skipped(self):
        h = decode("# header next\n3 1 3 1\n# the edge\n0 1 2\n")
        assert h.edges == ((0, 1, 2),)

    def test_missing_trailing_newline(self):
        with pytest.raises(ParseError):
            decode("3 1 3 1\n0 1 2")

    def test_bad_token(self):
        with pytest.raises(ParseError) as info:
            decode("3 1 3 1\n0 x 2\n")
        assert info.value.line == 2

    def test_bad_header(self):
        with pytest.raises(ParseError):
            decode("3 1 3\n0 1 2\n")

    def test_edge_count_mismatch(self):
        with pytest.raises(ConsistencyError):
            decode("3 1 3 2\n0 1 2\n")

    def test_degree_mismatch(self):
        with pytest.raises(ConsistencyError):
            decode("3 2 3 2\n0 1 2\n0 1 1\n")

    def test_counting_identity(self):
        with pytest.raises(ConsistencyError):
            decode("3 2 3 1\n0 1 2\n")


@settings(max_examples=60, deadline=None)
@given(k=st.integers(2, 5), d=st.integers(1, 4), mult=st.integers(1, 4), seed=st.integers(0, 2**32))
def test_round_trip_property(k, d, mult, seed):
    h = generate_configuration(k, d, k * mult, seed)
    assert decode(encode(h)) == h
    assert incidence_graph(dual(dual(h))) == incidence_graph(h)
    assert girth(dual(h)) == girth(h)
