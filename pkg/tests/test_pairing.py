import itertools
import json

import numpy as np
import pytest

from hypergreedy.errors import InvalidParameters, ProcessTerminated
from hypergreedy.hypergraph import Hypergraph, is_simple
from hypergreedy.oracle import exact_max_matching
from hypergreedy.pairing import (
    C_EXHAUSTED, C_SELECTED, CLOSED, INDEPENDENT, MATCHED, MATCHING, init_pairing_state,
    replicate, run_process, simulate, step_independent, step_matching,
)


def revealed(state):
    """The full hypergraph once every point has been paired."""
    edges = state.revealed_edges()
    return Hypergraph.from_edges([edges[j] for j in range(state.m)], n=state.n, k=state.k)


class TestInit:
    def test_three_regular(self):
        s = init_pairing_state(3, 3, 9, seed=0)
        assert s.unpaired_vertex_points() == s.unpaired_edge_points() == 27
        assert s.m == 9

    def test_small(self):
        s = init_pairing_state(3, 2, 3, seed=0)
        assert s.unpaired_vertex_points() == 6 and s.m == 2

    def test_initial_classes(self):
        s = init_pairing_state(2, 2, 4, seed=0)
        assert list(s.y_counts()) == [0, 0, 4]
        assert list(s.z_counts()) == [0, 0, 4]

    @pytest.mark.parametrize("args", [(3, 2, 4), (1, 2, 2), (3, 0, 3)])
    def test_invalid(self, args):
        with pytest.raises(InvalidParameters):
            init_pairing_state(*args, seed=0)


class TestSteps:
    @pytest.mark.parametrize("kind", [MATCHING, INDEPENDENT])
    def test_first_step_has_full_degree(self, kind):
        s = init_pairing_state(4, 3, 40, seed=3)
        step = step_matching if kind == MATCHING else step_independent
        rep = step(s, check=True)
        assert rep.degree == 3 and rep.step == 1

    def test_first_independent_step_has_no_closures(self):
        s = init_pairing_state(3, 3, 300, seed=1)
        rep = step_independent(s, check=True)
        assert rep.removed_vertices == 0 and rep.pairings == 3

    def test_step_after_termination(self):
        s = init_pairing_state(3, 2, 3, seed=1)
        step_matching(s)
        with pytest.raises(ProcessTerminated):
            step_matching(s)

    def test_state_is_bound_to_one_process(self):
        s = init_pairing_state(3, 3, 30, seed=1)
        step_matching(s)
        with pytest.raises(InvalidParameters):
            step_independent(s)

    @pytest.mark.parametrize("seed", range(5))
    def test_points_stay_balanced_stepwise(self, seed):
        s = init_pairing_state(3, 3, 60, seed=seed)
        while True:
            try:
                rep = step_independent(s, check=True)
            except ProcessTerminated:
                break
            assert rep.degree >= 0
            assert s.unpaired_vertex_points() == s.unpaired_edge_points()
            assert s.z_counts()[1] == 0


class TestTinyCases:
    def test_every_pairing_has_matching_number_one(self):
        for perm in set(itertools.permutations(range(6))):
            slots = [p // 2 for p in perm]
            h = Hypergraph(3, 3, 2, (tuple(slots[:3]), tuple(slots[3:])))
            assert exact_max_matching(h).value == 1

    def test_matching_size_forced(self):
        for seed in range(300):
            res = simulate(3, 2, 3, MATCHING, seed)
            assert res.size == 1 and res.fraction == pytest.approx(1 / 3)

    def test_independent_with_full_support(self):
        seen = 0
        for seed in range(400):
            s = init_pairing_state(3, 2, 3, seed)
            res = run_process(s, INDEPENDENT)
            h = revealed(s)
            assert res.fraction <= 2 / 3
            if all(len(set(e)) == 3 for e in h.edges):
                seen += 1
                assert res.size == 2
        assert seen > 0


@pytest.mark.parametrize("k,d", [(3, 2), (3, 3), (4, 3), (5, 4), (2, 3)])
@pytest.mark.parametrize("seed", [1, 2])
def test_matching_run_invariants(k, d, seed):
    n = 60 * k
    s = init_pairing_state(k, d, n, seed)
    res = run_process(s, MATCHING, check=True)
    a = s.arrays
    assert a.ctr[C_SELECTED] + a.ctr[C_EXHAUSTED] == n
    assert s.unpaired_vertex_points() == s.unpaired_edge_points() == 0
    h = revealed(s)
    matched = np.flatnonzero(a.estat == MATCHED)
    assert len(matched) == res.size
    if is_simple(h):
        assert k * res.size + res.unmatched == n
        verts = [v for j in matched for v in h.edges[j]]
        assert len(verts) == len(set(verts))


@pytest.mark.parametrize("k,d", [(3, 2), (3, 3), (4, 3), (5, 4)])
@pytest.mark.parametrize("seed", [1, 2])
def test_independent_run_invariants(k, d, seed):
    n = 60 * k
    s = init_pairing_state(k, d, n, seed)
    res = run_process(s, INDEPENDENT, check=True)
    assert res.fraction <= 1 - 1 / k
    h = revealed(s)
    if not is_simple(h):
        return
    chosen = set(np.flatnonzero(s.arrays.vstat == 1).tolist())
    assert len(chosen) == res.size
    assert not any(set(e) <= chosen for e in h.edges)
    # every closed vertex is forced out by an edge whose other vertices are all in I
    for w in np.flatnonzero(s.arrays.vstat == CLOSED).tolist():
        assert any(w in e and set(e) - {w} <= chosen for e in h.edges)


def test_determinism():
    a = simulate(4, 3, 4000, INDEPENDENT, seed=17)
    b = simulate(4, 3, 4000, INDEPENDENT, seed=17)
    assert a == b
    assert np.array_equal(a.trajectory, b.trajectory)
    assert a.trajectory_csv() == b.trajectory_csv()


def test_trajectory_csv_shape():
    res = simulate(3, 3, 3000, MATCHING, seed=2)
    lines = res.trajectory_csv().splitlines()
    assert lines[0] == "x,phase_hint,y1,y2,y3,z1,z2,z3,frac"
    assert all(len(line.split(",")) == 9 for line in lines[1:])
    assert len(lines) > 100
    x = res.trajectory[:, 0]
    assert np.all(np.diff(x) > 0)


class TestReplicate:
    def test_forced_outcome(self):
        s = replicate(3, 2, 3, MATCHING, 100, base_seed=5)
        assert s.mean == pytest.approx(1 / 3) and s.std == 0.0
        assert s.seeds == tuple(range(6, 106))

    def test_workers_do_not_change_result(self):
        a = replicate(3, 3, 3000, INDEPENDENT, 4, base_seed=2)
        b = replicate(3, 3, 3000, INDEPENDENT, 4, base_seed=2, workers=3)
        assert a == b

    def test_json(self):
        s = replicate(3, 3, 300, MATCHING, 3, base_seed=0)
        data = json.loads(s.to_json())
        assert set(data) == {"process", "k", "d", "n", "reps", "mean", "std", "seeds", "values"}
        assert data["seeds"] == [1, 2, 3]

    def test_bad_reps(self):
        with pytest.raises(InvalidParameters):
            replicate(3, 3, 30, MATCHING, 0)

    def test_matching_mean_at_1e5(self):
        s = replicate(3, 3, 100_000, MATCHING, 10, base_seed=100)
        assert abs(s.mean - 0.284) <= 0.005

    def test_independent_mean_at_1e5(self):
        s = replicate(5, 2, 100_000, INDEPENDENT, 10, base_seed=100)
        assert abs(s.mean - 0.799) <= 0.005


class TestLargeRuns:
    def test_matching_three_three(self):
        res = simulate(3, 3, 1_000_000, MATCHING, seed=1)
        assert abs(res.fraction - 0.284) <= 0.003

    def test_independent_three_three(self):
        res = simulate(3, 3, 1_000_000, INDEPENDENT, seed=1)
        assert abs(res.fraction - 0.626) <= 0.003

    def test_matching_four_two(self):
        res = simulate(4, 2, 1_000_000, MATCHING, seed=1)
        assert abs(res.fraction - 0.179) <= 0.003
