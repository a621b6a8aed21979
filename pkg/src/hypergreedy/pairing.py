"""Degree-greedy matching and independent processes on the lazily revealed pairing model.

The pairing between the ``n*d`` vertex-points and ``n*d`` edge-points is
revealed one pair at a time, exactly when the process needs it, so a run never
materializes the hypergraph. Vertex-point ``p`` belongs to vertex ``p // d``
and edge-point ``q`` to edge ``q // k``.

Loops (a vertex occupying several slots of one edge) are possible in the
pairing model. If the independent process pairs a selected vertex into the
last two or more points of an alive edge, that edge would lie inside ``I``;
the vertex is closed instead, as the hypergraph-level rule demands. Simple
outcomes never trigger this.

Hot loops are numba kernels operating on a namedtuple of flat arrays; the
``np.random.Generator`` (PCG64) held by the state is passed straight into them
and advanced in place, so a seed fixes the run bit-for-bit.
"""
from __future__ import annotations

import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numba
import numpy as np

from .errors import InvalidParameters, InvariantViolation, ProcessTerminated

MATCHING = "matching"
INDEPENDENT = "independent"
KINDS = (MATCHING, INDEPENDENT)

# vertex status
OPEN, SELECTED, CLOSED, EXHAUSTED = 0, 1, 2, 3
# edge status
ALIVE, MATCHED, DEAD = 0, 1, 2

# counter slots in _Arrays.ctr
C_STEP, C_OUT, C_NVP, C_NEP, C_EXHAUSTED, C_CLOSED, C_SELECTED, C_PAIRS, C_TOKEN = range(9)
N_CTR = 9

# kernel status codes
ST_OK = 0
ST_DONE = 1
ST_POOL_MISMATCH = 2
ST_POINT_COUNT = 3
ST_ALIVE_COUNT = 4
ST_BUCKETS = 5
ST_ZCOUNT = 6

_STATUS_TEXT = {
    ST_POOL_MISMATCH: "unpaired vertex-point total differs from unpaired edge-point total",
    ST_POINT_COUNT: "per-vertex/per-edge unpaired counts disagree with the point pools",
    ST_ALIVE_COUNT: "an alive edge has a forbidden unpaired count",
    ST_BUCKETS: "degree buckets disagree with vertex counts",
    ST_ZCOUNT: "edge class counters disagree with edge counts",
}


class _Arrays(NamedTuple):
    vcnt: np.ndarray     # int32[n]   unpaired points per vertex
    vstat: np.ndarray    # int8[n]
    ecnt: np.ndarray     # int32[m]   unpaired points per edge
    estat: np.ndarray    # int8[m]
    vpool: np.ndarray    # int32[nd]  unpaired vertex-points, first ctr[C_NVP] live
    vpos: np.ndarray     # int32[nd]  index into vpool, -1 once paired
    epool: np.ndarray
    epos: np.ndarray
    vmate: np.ndarray    # int32[nd]  edge-point paired with each vertex-point
    emate: np.ndarray    # int32[nd]  vertex-point paired with each edge-point
    bucket: np.ndarray   # int32[d+1, n] open vertices grouped by unpaired count
    bsize: np.ndarray    # int64[d+1]
    bpos: np.ndarray     # int32[n]   index inside its bucket, -1 if not bucketed
    zc: np.ndarray       # int64[k+1] alive edges grouped by unpaired count
    emark: np.ndarray    # int64[m]   dedupe token per edge
    scratch: np.ndarray  # int32[5, S] per-step work lists
    ctr: np.ndarray      # int64[N_CTR]


@dataclass
class PairingState:
    """Mutable state of one run. Confine each instance to a single thread."""

    k: int
    d: int
    n: int
    seed: object
    arrays: _Arrays
    rng: np.random.Generator
    kind: str | None = None

    @property
    def m(self) -> int:
        return self.n * self.d // self.k

    @property
    def step(self) -> int:
        return int(self.arrays.ctr[C_STEP])

    @property
    def output_size(self) -> int:
        return int(self.arrays.ctr[C_OUT])

    def unpaired_vertex_points(self) -> int:
        return int(self.arrays.ctr[C_NVP])

    def unpaired_edge_points(self) -> int:
        return int(self.arrays.ctr[C_NEP])

    def y_counts(self) -> np.ndarray:
        """Open vertices by unpaired-point count, index 0..d."""
        return self.arrays.bsize.copy()

    def z_counts(self) -> np.ndarray:
        """Alive edges by unpaired-point count, index 0..k."""
        return self.arrays.zc.copy()

    def revealed_edges(self) -> dict[int, list[int]]:
        """Vertices revealed so far for each edge (only edges with a paired point)."""
        a = self.arrays
        out: dict[int, list[int]] = {}
        for q in np.flatnonzero(a.emate >= 0):
            out.setdefault(int(q) // self.k, []).append(int(a.emate[q]) // self.d)
        return out


@dataclass(frozen=True)
class StepReport:
    step: int
    vertex: int
    degree: int
    pairings: int
    # matching: vertices removed (selected or exhausted) / edges removed (matched or dead)
    # independent: vertices closed / edges killed
    removed_vertices: int
    removed_edges: int


@dataclass(frozen=True)
class SimResult:
    process: str
    k: int
    d: int
    n: int
    size: int
    fraction: float
    unmatched: int | None
    seed: object
    steps: int
    trajectory: np.ndarray = field(repr=False, compare=False)
    members: tuple[int, ...] | None = field(default=None, repr=False)

    def trajectory_header(self) -> list[str]:
        return (["x", "phase_hint"] + [f"y{j}" for j in range(1, self.d + 1)]
                + [f"z{j}" for j in range(1, self.k + 1)] + ["frac"])

    def trajectory_csv(self) -> str:
        lines = [",".join(self.trajectory_header())]
        for row in self.trajectory:
            vals = [repr(float(row[0])), str(int(row[1]))] + [repr(float(v)) for v in row[2:]]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReplicateSummary:
    process: str
    k: int
    d: int
    n: int
    reps: int
    mean: float
    std: float
    seeds: tuple[int, ...]
    values: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"process": self.process, "k": self.k, "d": self.d, "n": self.n,
                "reps": self.reps, "mean": self.mean, "std": self.std,
                "seeds": list(self.seeds), "values": list(self.values)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_params(k: int, d: int, n: int) -> None:
    if k < 2 or d < 1 or n < 1:
        raise InvalidParameters(f"need k >= 2, d >= 1, n >= 1 (got k={k}, d={d}, n={n})")
    if (d * n) % k:
        raise InvalidParameters(f"k={k} does not divide d*n={d * n}")


def init_pairing_state(k: int, d: int, n: int, seed=None) -> PairingState:
    _check_params(k, d, n)
    m = n * d // k
    npts = n * d
    width = (k + 2) * (d + 2) + k + d
    a = _Arrays(
        vcnt=np.full(n, d, dtype=np.int32),
        vstat=np.zeros(n, dtype=np.int8),
        ecnt=np.full(m, k, dtype=np.int32),
        estat=np.zeros(m, dtype=np.int8),
        vpool=np.arange(npts, dtype=np.int32),
        vpos=np.arange(npts, dtype=np.int32),
        epool=np.arange(npts, dtype=np.int32),
        epos=np.arange(npts, dtype=np.int32),
        vmate=np.full(npts, -1, dtype=np.int32),
        emate=np.full(npts, -1, dtype=np.int32),
        bucket=np.zeros((d + 1, n), dtype=np.int32),
        bsize=np.zeros(d + 1, dtype=np.int64),
        bpos=np.arange(n, dtype=np.int32),
        zc=np.zeros(k + 1, dtype=np.int64),
        emark=np.full(m, -1, dtype=np.int64),
        scratch=np.zeros((5, width), dtype=np.int32),
        ctr=np.zeros(N_CTR, dtype=np.int64),
    )
    a.bucket[d, :] = np.arange(n, dtype=np.int32)
    a.bsize[d] = n
    a.zc[k] = m
    a.ctr[C_NVP] = npts
    a.ctr[C_NEP] = npts
    return PairingState(k=k, d=d, n=n, seed=seed, arrays=a, rng=np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# numba kernels

_jit = numba.njit(cache=True, nogil=True)


@_jit
def _bucket_remove(a, v):
    c = a.vcnt[v]
    pos = a.bpos[v]
    last = a.bucket[c, a.bsize[c] - 1]
    a.bucket[c, pos] = last
    a.bpos[last] = pos
    a.bsize[c] -= 1
    a.bpos[v] = -1


@_jit
def _bucket_add(a, v):
    c = a.vcnt[v]
    a.bucket[c, a.bsize[c]] = v
    a.bpos[v] = a.bsize[c]
    a.bsize[c] += 1


@_jit
def _pool_remove(pool, pos, p, ctr, slot):
    i = pos[p]
    last = pool[ctr[slot] - 1]
    pool[i] = last
    pos[last] = i
    ctr[slot] -= 1
    pos[p] = -1


@_jit
def _kill_edge(a, e, status):
    if a.estat[e] == ALIVE:
        a.zc[a.ecnt[e]] -= 1
    a.estat[e] = status


@_jit
def _pair(a, vp, ep, k, d, check):
    a.vmate[vp] = ep
    a.emate[ep] = vp
    _pool_remove(a.vpool, a.vpos, vp, a.ctr, C_NVP)
    _pool_remove(a.epool, a.epos, ep, a.ctr, C_NEP)
    a.ctr[C_PAIRS] += 1
    v = vp // d
    if a.bpos[v] >= 0:
        _bucket_remove(a, v)
        a.vcnt[v] -= 1
        _bucket_add(a, v)
    else:
        a.vcnt[v] -= 1
    e = ep // k
    if a.estat[e] == ALIVE:
        a.zc[a.ecnt[e]] -= 1
        a.ecnt[e] -= 1
        a.zc[a.ecnt[e]] += 1
    else:
        a.ecnt[e] -= 1
    if check and a.ctr[C_NVP] != a.ctr[C_NEP]:
        return False
    return True


@_jit
def _pair_vertex(a, v, k, d, rng, out, n_out, check):
    """Pair every unpaired point of ``v`` with a uniform edge-point; append hit edges."""
    ok = True
    base = v * d
    for s in range(d):
        vp = base + s
        if a.vpos[vp] >= 0:
            ep = a.epool[rng.integers(0, a.ctr[C_NEP])]
            ok &= _pair(a, vp, ep, k, d, check)
            out[n_out] = ep // k
            n_out += 1
    return n_out, ok


@_jit
def _pair_edge(a, e, k, d, rng, out, n_out, check):
    """Pair every unpaired point of ``e`` with a uniform vertex-point; append hit vertices."""
    ok = True
    base = e * k
    for s in range(k):
        ep = base + s
        if a.epos[ep] >= 0:
            vp = a.vpool[rng.integers(0, a.ctr[C_NVP])]
            ok &= _pair(a, vp, ep, k, d, check)
            out[n_out] = vp // d
            n_out += 1
    return n_out, ok


@_jit
def _distinct_edges(a, src, n_src, dst):
    a.ctr[C_TOKEN] += 1
    tok = a.ctr[C_TOKEN]
    nd = 0
    for i in range(n_src):
        e = src[i]
        if a.emark[e] != tok:
            a.emark[e] = tok
            dst[nd] = e
            nd += 1
    return nd


@_jit
def _select_vertex(a, v):
    _bucket_remove(a, v)
    a.vstat[v] = SELECTED
    a.ctr[C_SELECTED] += 1


@_jit
def _audit(a, k, d, is_matching):
    """Full O(n + m) consistency scan; returns a status code."""
    n = a.vcnt.size
    m = a.ecnt.size
    if a.ctr[C_NVP] != a.ctr[C_NEP]:
        return ST_POOL_MISMATCH
    tot = 0
    for v in range(n):
        tot += a.vcnt[v]
    if tot != a.ctr[C_NVP]:
        return ST_POINT_COUNT
    tot = 0
    for e in range(m):
        tot += a.ecnt[e]
    if tot != a.ctr[C_NEP]:
        return ST_POINT_COUNT
    zc = np.zeros(k + 1, dtype=np.int64)
    for e in range(m):
        if a.estat[e] == ALIVE:
            c = a.ecnt[e]
            zc[c] += 1
            if is_matching and c != k:
                return ST_ALIVE_COUNT
            if not is_matching and c == 1:
                return ST_ALIVE_COUNT
        elif a.ecnt[e] != 0:
            return ST_POINT_COUNT
    for c in range(k + 1):
        if zc[c] != a.zc[c]:
            return ST_ZCOUNT
    n_open = 0
    for v in range(n):
        if a.vstat[v] == OPEN:
            n_open += 1
            if a.bpos[v] < 0 or a.bucket[a.vcnt[v], a.bpos[v]] != v:
                return ST_BUCKETS
            if is_matching and a.vcnt[v] == 0:
                return ST_BUCKETS
        elif a.bpos[v] >= 0 or a.vcnt[v] != 0:
            return ST_BUCKETS
    tot = 0
    for c in range(d + 1):
        tot += a.bsize[c]
    if tot != n_open:
        return ST_BUCKETS
    return ST_OK


@_jit
def _step_matching(a, k, d, rng, check):
    """One pass of the matching step. Returns (status, v, r, pairings, rm_vertices, rm_edges)."""
    r = 0
    for c in range(1, d + 1):
        if a.bsize[c] > 0:
            r = c
            break
    if r == 0:
        return ST_DONE, -1, 0, 0, 0, 0
    ok = True
    pairs0 = a.ctr[C_PAIRS]
    sel0 = a.ctr[C_SELECTED]
    exh0 = a.ctr[C_EXHAUSTED]
    hit1 = a.scratch[0]
    dist = a.scratch[1]
    hit3 = a.scratch[2]
    hit5 = a.scratch[3]
    tmp = a.scratch[4]

    v = a.bucket[r, rng.integers(0, a.bsize[r])]
    _select_vertex(a, v)
    # pair all points of v
    n1, o = _pair_vertex(a, v, k, d, rng, hit1, 0, check)
    ok &= o
    # the matched edge: uniform among the distinct edges just hit
    nd = _distinct_edges(a, hit1, n1, dist)
    ei = dist[rng.integers(0, nd)]
    _kill_edge(a, ei, MATCHED)
    a.ctr[C_OUT] += 1
    removed_e = 1
    # complete the matched edge; every vertex it reaches is matched
    n3, o = _pair_edge(a, ei, k, d, rng, hit3, 0, check)
    ok &= o
    for i in range(n3):
        u = hit3[i]
        if a.vstat[u] == OPEN:
            _select_vertex(a, u)
    # complete those vertices; collect the edges they hit, v's own edges first
    n5 = 0
    for i in range(nd):
        if dist[i] != ei:
            hit5[n5] = dist[i]
            n5 += 1
    for i in range(n3):
        n5, o = _pair_vertex(a, hit3[i], k, d, rng, hit5, n5, check)
        ok &= o
    # complete every such edge; vertices drained to zero are left unmatched
    for i in range(n5):
        e = hit5[i]
        if a.estat[e] != ALIVE:
            continue
        _kill_edge(a, e, DEAD)
        removed_e += 1
        nt, o = _pair_edge(a, e, k, d, rng, tmp, 0, check)
        ok &= o
        for t in range(nt):
            u = tmp[t]
            if a.vstat[u] == OPEN and a.vcnt[u] == 0:
                _bucket_remove(a, u)
                a.vstat[u] = EXHAUSTED
                a.ctr[C_EXHAUSTED] += 1
    a.ctr[C_STEP] += 1
    status = ST_OK
    if not ok:
        status = ST_POOL_MISMATCH
    elif check:
        status = _audit(a, k, d, True)
    removed_v = (a.ctr[C_SELECTED] - sel0) + (a.ctr[C_EXHAUSTED] - exh0)
    return status, v, r, a.ctr[C_PAIRS] - pairs0, removed_v, removed_e


@_jit
def _step_independent(a, k, d, rng, check):
    """One pass of the independent step. Returns (status, v, r, pairings, closed, killed)."""
    r = -1
    for c in range(0, d + 1):
        if a.bsize[c] > 0:
            r = c
            break
    if r < 0:
        return ST_DONE, -1, 0, 0, 0, 0
    ok = True
    pairs0 = a.ctr[C_PAIRS]
    hit1 = a.scratch[0]
    dist = a.scratch[1]
    hitw = a.scratch[2]
    tmp = a.scratch[3]

    v = a.bucket[r, rng.integers(0, a.bsize[r])]
    _select_vertex(a, v)
    # pair all points of v
    n1, o = _pair_vertex(a, v, k, d, rng, hit1, 0, check)
    ok &= o
    nd = _distinct_edges(a, hit1, n1, dist)
    closed = 0
    killed = 0
    blocked = False
    for i in range(nd):
        if a.estat[dist[i]] == ALIVE and a.ecnt[dist[i]] == 0:
            blocked = True
    if blocked:
        # a loop put the last two or more points of an alive edge on v, so that
        # edge lies inside I + v: v was never eligible and is closed instead
        a.vstat[v] = CLOSED
        a.ctr[C_SELECTED] -= 1
        a.ctr[C_CLOSED] += 1
        closed = 1
        for i in range(nd):
            e = dist[i]
            if a.estat[e] != ALIVE:
                continue
            _kill_edge(a, e, DEAD)
            killed += 1
            nt, o = _pair_edge(a, e, k, d, rng, tmp, 0, check)
            ok &= o
        nd = 0
    else:
        a.ctr[C_OUT] += 1
    for i in range(nd):
        e = dist[i]
        if a.estat[e] != ALIVE:
            continue
        if a.ecnt[e] != 1:
            continue
        # reveal the last vertex of e
        _kill_edge(a, e, DEAD)
        killed += 1
        nt, o = _pair_edge(a, e, k, d, rng, tmp, 0, check)
        ok &= o
        w = tmp[0]
        if a.vstat[w] != OPEN:
            continue
        # close w
        _bucket_remove(a, w)
        a.vstat[w] = CLOSED
        a.ctr[C_CLOSED] += 1
        closed += 1
        nw, o = _pair_vertex(a, w, k, d, rng, hitw, 0, check)
        ok &= o
        # every edge met by w dies
        for j in range(nw):
            f = hitw[j]
            if a.estat[f] != ALIVE:
                continue
            _kill_edge(a, f, DEAD)
            killed += 1
            nt, o = _pair_edge(a, f, k, d, rng, tmp, 0, check)
            ok &= o
    a.ctr[C_STEP] += 1
    status = ST_OK
    if not ok:
        status = ST_POOL_MISMATCH
    elif check:
        status = _audit(a, k, d, False)
    return status, v, r, a.ctr[C_PAIRS] - pairs0, closed, killed


@_jit
def _record(a, traj, row, n, k, d, phase_hint):
    traj[row, 0] = a.ctr[C_STEP] / n
    traj[row, 1] = phase_hint
    for j in range(1, d + 1):
        traj[row, 1 + j] = a.bsize[j] / n
    for j in range(1, k + 1):
        traj[row, 1 + d + j] = a.zc[j] / n
    traj[row, 2 + d + k] = a.ctr[C_OUT] / n


@_jit
def _run(a, is_matching, k, d, rng, check, stride, traj):
    """Step to termination, sampling every ``stride`` steps. Returns (status, rows)."""
    n = a.vcnt.size
    rows = 0
    max_r = 0
    _record(a, traj, rows, n, k, d, 0)
    rows += 1
    status = ST_OK
    while True:
        if is_matching:
            res = _step_matching(a, k, d, rng, check)
        else:
            res = _step_independent(a, k, d, rng, check)
        status = res[0]
        if status == ST_DONE:
            status = ST_OK
            break
        if status != ST_OK:
            break
        if res[2] > max_r:
            max_r = res[2]
        if a.ctr[C_STEP] % stride == 0 and rows < traj.shape[0] - 1:
            _record(a, traj, rows, n, k, d, d - max_r)
            rows += 1
            max_r = 0
    if traj[rows - 1, 0] != a.ctr[C_STEP] / n:
        _record(a, traj, rows, n, k, d, d - max_r if max_r > 0 else traj[rows - 1, 1])
        rows += 1
    return status, rows


# ---------------------------------------------------------------------------
# public API

def _claim(state: PairingState, kind: str) -> None:
    if state.kind is None:
        state.kind = kind
    elif state.kind != kind:
        raise InvalidParameters(f"state already driven by the {state.kind} process")


def _raise_status(status: int, state: PairingState) -> None:
    if status not in (ST_OK, ST_DONE):
        raise InvariantViolation(f"step {state.step}: {_STATUS_TEXT[status]}")


def _report(res, step: int) -> StepReport:
    _, v, r, pairs, rv, re = res
    return StepReport(step=step, vertex=int(v), degree=int(r), pairings=int(pairs),
                      removed_vertices=int(rv), removed_edges=int(re))


def step_matching(state: PairingState, check: bool = False) -> StepReport:
    """Run one full matching step (select, match an edge, delete its vertices).

    With ``check`` the state is audited after every pairing and at step end.
    """
    _claim(state, MATCHING)
    res = _step_matching(state.arrays, state.k, state.d, state.rng, check)
    if res[0] == ST_DONE:
        raise ProcessTerminated("no open vertex with a positive unpaired count")
    _raise_status(res[0], state)
    return _report(res, state.step)


def step_independent(state: PairingState, check: bool = False) -> StepReport:
    """Run one full independent step (select, close, kill) to quiescence."""
    _claim(state, INDEPENDENT)
    res = _step_independent(state.arrays, state.k, state.d, state.rng, check)
    if res[0] == ST_DONE:
        raise ProcessTerminated("no open vertex left")
    _raise_status(res[0], state)
    return _report(res, state.step)


def default_stride(n: int) -> int:
    return max(1, n // 1000)


def run_process(state: PairingState, kind: str, sample_stride: int | None = None,
                check: bool = False) -> SimResult:
    """Iterate the step operation until the process terminates."""
    if kind not in KINDS:
        raise InvalidParameters(f"unknown process {kind!r}")
    _claim(state, kind)
    stride = sample_stride or default_stride(state.n)
    if stride < 1:
        raise InvalidParameters("sample_stride must be >= 1")
    traj = np.zeros((state.n // stride + 3, 3 + state.d + state.k))
    status, rows = _run(state.arrays, kind == MATCHING, state.k, state.d, state.rng,
                        check, stride, traj)
    _raise_status(status, state)
    return _result(state, kind, traj[:rows].copy())


def _result(state: PairingState, kind: str, traj: np.ndarray) -> SimResult:
    size = state.output_size
    unmatched = int(state.arrays.ctr[C_EXHAUSTED]) if kind == MATCHING else None
    return SimResult(process=kind, k=state.k, d=state.d, n=state.n, size=size,
                     fraction=size / state.n, unmatched=unmatched, seed=state.seed,
                     steps=state.step, trajectory=traj)


def simulate(k: int, d: int, n: int, kind: str, seed=None, sample_stride: int | None = None,
             check: bool = False) -> SimResult:
    return run_process(init_pairing_state(k, d, n, seed), kind, sample_stride, check)


def replicate(k: int, d: int, n: int, kind: str, reps: int, base_seed: int = 0,
              workers: int = 1) -> ReplicateSummary:
    """Run ``reps`` pairing-model simulations with seeds ``base_seed+1 .. base_seed+reps``.

    Runs may execute on ``workers`` threads (the kernels release the GIL);
    results are merged in rep order, so the summary does not depend on ``workers``.
    """
    if reps < 1:
        raise InvalidParameters("reps must be >= 1")
    if kind not in KINDS:
        raise InvalidParameters(f"unknown process {kind!r}")
    _check_params(k, d, n)
    seeds = [base_seed + i for i in range(1, reps + 1)]

    def one(seed):
        return simulate(k, d, n, kind, seed, sample_stride=n).fraction

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, seeds))
    else:
        values = [one(s) for s in seeds]
    # statistics works in exact arithmetic, so identical runs give std exactly 0
    std = statistics.stdev(values) if reps > 1 else 0.0
    return ReplicateSummary(process=kind, k=k, d=d, n=n, reps=reps, mean=statistics.mean(values),
                            std=std, seeds=tuple(seeds), values=tuple(values))
