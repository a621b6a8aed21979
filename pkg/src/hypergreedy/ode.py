"""Phase-blended ODE systems for the degree-greedy processes.

State layout used by the kernels: a flat float vector ``s`` of length
``d + 1 + k`` with ``s[j] = y_j`` (j = 0..d) and ``s[d + j] = z_j``
(j = 1..k). The matching system ignores ``y_0`` and the ``z`` block.

Phase ``p`` processes vertices of degree ``d - p`` ("high") and ``d - p - 1``
("low"). With ``alpha = f[low, high]`` and ``tau = -f[low, low]`` the drift
is ``(tau * rates(high) + alpha * rates(low)) / (tau + alpha)``, which holds
``y[low]`` constant; the phase ends when ``tau`` reaches zero. The last
matching phase runs on unblended degree-1 rates. The last independent phase
blends degree-1 steps with free selections of degree-0 vertices, whose rates
are ``f[j, 0] = -[j == 0]`` and ``g = 0``.

Integration is classical fixed-step RK4; phase ends and exhaustion of the
remaining points (``l1 < eps_end``) are located by bisection on the step
length. Near exhaustion a step is shortened so that it never consumes more
than half of the remaining points, which keeps the final approach accurate
where the rates steepen. The paper-literal independent rates do not conserve
``l1 = m1``; there the edge side can run dry first, reported as
``m1-exhausted``. Every step adds exactly one matched edge or one independent
vertex, so the constant is the elapsed scaled time.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DegenerateBlend, DegenerateState, InvalidParameters, StepFailure

MATCHING = "matching"
INDEPENDENT = "independent"
CORRECTED = "corrected"
PAPER_LITERAL = "paper-literal"
MODES = (CORRECTED, PAPER_LITERAL)

TAU_ZERO = "tau-zero"
L1_EXHAUSTED = "l1-exhausted"
M1_EXHAUSTED = "m1-exhausted"  # only reachable with the paper-literal rates
DEGENERATE_SKIP = "degenerate-skip"

# kernel status / cause codes
_K_RUNNING, _K_TAU, _K_L1, _K_DEGEN_STATE, _K_DEGEN_BLEND, _K_FAIL, _K_MAXSTEPS, _K_M1 = range(8)

# diagnostics slots filled by the phase kernel
D_MAX_GAP, D_MAX_Z1, D_W_MIN, D_W_MAX, D_MIN_TAU, D_MIN_COMPONENT, D_STEPS = range(7)
N_DIAG = 7

SAMPLE_DX = 1e-3


@dataclass(frozen=True)
class RateConfig:
    k: int
    d: int
    process: str = MATCHING
    mode: str = CORRECTED
    h: float = 1e-5
    eps_end: float = 1e-6
    eps_evt: float = 1e-10

    def __post_init__(self):
        if self.process not in (MATCHING, INDEPENDENT):
            raise InvalidParameters(f"unknown process {self.process!r}")
        if self.mode not in MODES:
            raise InvalidParameters(f"unknown rate mode {self.mode!r}")
        if self.d < 2:
            raise InvalidParameters("d must be >= 2")
        if self.process == INDEPENDENT and self.k < 3:
            raise InvalidParameters("the independent system needs k >= 3")
        if self.process == MATCHING and self.k < 2:
            raise InvalidParameters("k must be >= 2")
        if not (self.h > 0 and self.eps_end > 0 and self.eps_evt > 0):
            raise InvalidParameters("h, eps_end and eps_evt must be positive")

    @property
    def kind(self) -> int:
        return 0 if self.process == MATCHING else 1

    @property
    def corrected(self) -> bool:
        return self.mode == CORRECTED

    @property
    def phases(self) -> range:
        return range(1, self.d) if self.process == MATCHING else range(0, self.d)


@dataclass(frozen=True)
class StateVec:
    """Scaled state: ``y[j]`` for j = 0..d and ``z[j]`` for j = 1..k (``z[0]`` unused)."""

    x: float
    y: np.ndarray
    z: np.ndarray

    @property
    def d(self) -> int:
        return len(self.y) - 1

    @property
    def k(self) -> int:
        return len(self.z) - 1

    def flat(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.y, float), np.asarray(self.z, float)[1:]])

    @classmethod
    def from_flat(cls, x: float, s: np.ndarray, k: int, d: int) -> "StateVec":
        z = np.zeros(k + 1)
        z[1:] = s[d + 1:d + 1 + k]
        return cls(float(x), np.array(s[:d + 1], dtype=float), z)

    @classmethod
    def initial(cls, cfg: RateConfig) -> "StateVec":
        y = np.zeros(cfg.d + 1)
        z = np.zeros(cfg.k + 1)
        y[cfg.d] = 1.0
        if cfg.process == INDEPENDENT:
            z[cfg.k] = cfg.d / cfg.k
        return cls(0.0, y, z)


@dataclass(frozen=True)
class PhaseOutcome:
    p: int
    entry: StateVec = field(repr=False)
    exit: StateVec = field(repr=False)
    cause: str
    diagnostics: dict = field(default_factory=dict, repr=False)
    trajectory: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def x_start(self) -> float:
        return self.entry.x

    @property
    def x_end(self) -> float:
        return self.exit.x


@dataclass(frozen=True)
class SolveResult:
    value: float
    phases: tuple[PhaseOutcome, ...]
    config: RateConfig

    @property
    def trajectory(self) -> np.ndarray:
        """Rows ``x, phase, y0..yd, z1..zk, alpha, tau`` across all phases."""
        parts = [ph.trajectory for ph in self.phases if ph.trajectory is not None]
        if not parts:
            return np.zeros((0, 5 + self.config.d + self.config.k))
        return np.vstack(parts)

    def diagnostics(self) -> dict:
        """Worst-case diagnostics over every accepted step of every phase."""
        out = {"max_l1_m1_gap": 0.0, "max_abs_z1": 0.0, "min_weight": 1.0,
               "max_weight": 0.0, "min_tau": math.inf, "min_component": 0.0, "steps": 0}
        for ph in self.phases:
            dg = ph.diagnostics
            if not dg:
                continue
            out["max_l1_m1_gap"] = max(out["max_l1_m1_gap"], dg["max_l1_m1_gap"])
            out["max_abs_z1"] = max(out["max_abs_z1"], dg["max_abs_z1"])
            out["min_weight"] = min(out["min_weight"], dg["min_weight"])
            out["max_weight"] = max(out["max_weight"], dg["max_weight"])
            out["min_tau"] = min(out["min_tau"], dg["min_tau"])
            out["min_component"] = min(out["min_component"], dg["min_component"])
            out["steps"] += dg["steps"]
        return out

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "process": cfg.process,
            "k": cfg.k,
            "d": cfg.d,
            "mode": cfg.mode if cfg.process == INDEPENDENT else None,
            "value": self.value,
            "phases": [{"p": ph.p, "x_start": ph.x_start, "x_end": ph.x_end, "cause": ph.cause}
                       for ph in self.phases],
            "solver": {"h": cfg.h, "eps_end": cfg.eps_end, "eps_evt": cfg.eps_evt},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def trajectory_csv(self) -> str:
        cfg = self.config
        header = (["x", "phase"] + [f"y{j}" for j in range(cfg.d + 1)]
                  + [f"z{j}" for j in range(1, cfg.k + 1)] + ["alpha", "tau"])
        lines = [",".join(header)]
        matching = cfg.process == MATCHING
        for row in self.trajectory:
            vals = [repr(float(row[0])), str(int(row[1]))]
            for j in range(cfg.d + 1):
                vals.append("" if matching and j == 0 else repr(float(row[2 + j])))
            for j in range(1, cfg.k + 1):
                vals.append("" if matching else repr(float(row[2 + cfg.d + j])))
            vals += [repr(float(row[-2])), repr(float(row[-1]))]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# numba kernels

_jit = numba.njit(cache=True, nogil=True)


@_jit
def _moments(s, k, d):
    l1 = 0.0
    l2 = 0.0
    for j in range(1, d + 1):
        l1 += j * s[j]
        l2 += j * (j - 1) * s[j]
    m1 = 0.0
    m2 = 0.0
    for j in range(1, k + 1):
        zj = s[d + j]
        m1 += j * zj
        m2 += j * (j - 1) * zj
    return l1, l2, m1, m2


@_jit
def _rates(kind, r, s, k, d, corrected, out):
    """Fill ``out`` with f[j, r] (j = 0..d) and g[j, r] (slots d+1..d+k). False if degenerate."""
    for i in range(out.size):
        out[i] = 0.0
    l1, l2, m1, m2 = _moments(s, k, d)
    if kind == 0:
        if l1 <= 0.0:
            return False
        c = (r - 1 + (k - 1) * l2 / l1) * (k - 1) / l1
        for j in range(1, d + 1):
            nxt = (j + 1) * s[j + 1] if j < d else 0.0
            out[j] = -(k - 1) * j * s[j] / l1 + c * (nxt - j * s[j])
        out[r] -= 1.0
        return True
    if r == 0:
        out[0] = -1.0
        return True
    if m1 <= 0.0:
        return False
    closures = r * 2.0 * s[d + 2] / m1
    kills = closures * m2 * l2 / (m1 * m1 * m1)
    for j in range(0, d + 1):
        nxt = (j + 1) * s[j + 1] if j < d else 0.0
        out[j] = -closures * j * s[j] / m1 + kills * (nxt - j * s[j])
    out[r] -= 1.0
    for j in range(1, k + 1):
        zj = s[d + j]
        nxt = (j + 1) * s[d + j + 1] if j < k else 0.0
        out[d + j] = r * (nxt - j * zj) / m1 - closures * j * zj * l2 / (m1 * m1)
    if corrected:
        out[d + 1] -= closures
    return True


@_jit
def _blend(kind, p, s, k, d, corrected, out, w_hi, w_lo):
    """Blended drift into ``out``. Returns (code, weight_hi, weight_lo, alpha, tau)."""
    hi = d - p
    lo = hi - 1
    if kind == 0 and p == d - 1:
        if not _rates(0, 1, s, k, d, corrected, out):
            return _K_DEGEN_STATE, 1.0, 0.0, 0.0, 1.0
        return _K_RUNNING, 1.0, 0.0, 0.0, 1.0
    if not _rates(kind, hi, s, k, d, corrected, w_hi):
        return _K_DEGEN_STATE, 0.0, 0.0, 0.0, 0.0
    if not _rates(kind, lo, s, k, d, corrected, w_lo):
        return _K_DEGEN_STATE, 0.0, 0.0, 0.0, 0.0
    alpha = w_hi[lo]
    tau = -w_lo[lo]
    a = alpha if alpha > 0.0 else 0.0
    t = tau if tau > 0.0 else 0.0
    tot = a + t
    if tot <= 0.0:
        return _K_DEGEN_BLEND, 0.0, 0.0, alpha, tau
    wh = t / tot
    wl = a / tot
    for i in range(out.size):
        out[i] = wh * w_hi[i] + wl * w_lo[i]
    return _K_RUNNING, wh, wl, alpha, tau


@_jit
def _rk4(kind, p, s, step, k, d, corrected, out, k1, k2, k3, k4, tmp, w_hi, w_lo):
    code = _blend(kind, p, s, k, d, corrected, k1, w_hi, w_lo)[0]
    if code != _K_RUNNING:
        return code
    for i in range(s.size):
        tmp[i] = s[i] + 0.5 * step * k1[i]
    code = _blend(kind, p, tmp, k, d, corrected, k2, w_hi, w_lo)[0]
    if code != _K_RUNNING:
        return code
    for i in range(s.size):
        tmp[i] = s[i] + 0.5 * step * k2[i]
    code = _blend(kind, p, tmp, k, d, corrected, k3, w_hi, w_lo)[0]
    if code != _K_RUNNING:
        return code
    for i in range(s.size):
        tmp[i] = s[i] + step * k3[i]
    code = _blend(kind, p, tmp, k, d, corrected, k4, w_hi, w_lo)[0]
    if code != _K_RUNNING:
        return code
    for i in range(s.size):
        out[i] = s[i] + step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return _K_RUNNING


@_jit
def _l1(s, d):
    v = 0.0
    for j in range(1, d + 1):
        v += j * s[j]
    return v


@_jit
def _m1(s, k, d):
    v = 0.0
    for j in range(1, k + 1):
        v += j * s[d + j]
    return v


@_jit
def _exhausted(kind, s, k, d, eps_end):
    if _l1(s, d) < eps_end:
        return True
    return kind == 1 and _m1(s, k, d) < eps_end


@_jit
def _tau(kind, p, s, k, d, corrected, buf):
    """tau_p at ``s``; +1 for phases that never end on tau."""
    if (kind == 0 and p == d - 1) or (kind == 1 and p == d - 1):
        return 1.0
    lo = d - p - 1
    if not _rates(kind, lo, s, k, d, corrected, buf):
        return math.nan
    return -buf[lo]


@_jit
def _record(traj, row, x, p, s, alpha, tau):
    traj[row, 0] = x
    traj[row, 1] = p
    for i in range(s.size):
        traj[row, 2 + i] = s[i]
    traj[row, 2 + s.size] = alpha
    traj[row, 3 + s.size] = tau


@_jit
def _integrate(kind, p, s0, x0, k, d, corrected, h, eps_end, eps_evt, max_steps,
               stride, traj, diag):
    """Advance one phase. Returns (code, x, state, rows)."""
    dim = s0.size
    s = s0.copy()
    new = np.empty(dim)
    trial = np.empty(dim)
    drift = np.empty(dim)
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    tmp = np.empty(dim)
    w_hi = np.empty(dim)
    w_lo = np.empty(dim)
    x = x0
    rows = 0
    diag[D_MAX_GAP] = 0.0
    diag[D_MAX_Z1] = 0.0
    diag[D_W_MIN] = 1.0
    diag[D_W_MAX] = 0.0
    diag[D_MIN_TAU] = math.inf
    diag[D_MIN_COMPONENT] = 0.0
    diag[D_STEPS] = 0.0
    steps = 0
    while True:
        res = _blend(kind, p, s, k, d, corrected, drift, w_hi, w_lo)
        code = res[0]
        if code != _K_RUNNING:
            return code, x, s, rows
        wh = res[1]
        wl = res[2]
        alpha = res[3]
        tau = res[4]
        # diagnostics at the accepted state
        l1, l2, m1, m2 = _moments(s, k, d)
        if kind == 1:
            gap = abs(l1 - m1)
            if gap > diag[D_MAX_GAP]:
                diag[D_MAX_GAP] = gap
            if abs(s[d + 1]) > diag[D_MAX_Z1]:
                diag[D_MAX_Z1] = abs(s[d + 1])
        for w in (wh, wl):
            if w < diag[D_W_MIN]:
                diag[D_W_MIN] = w
            if w > diag[D_W_MAX]:
                diag[D_W_MAX] = w
        tau_now = _tau(kind, p, s, k, d, corrected, tmp)
        if tau_now < diag[D_MIN_TAU]:
            diag[D_MIN_TAU] = tau_now
        if steps % stride == 0 and rows < traj.shape[0]:
            _record(traj, rows, x, p, s, alpha, tau)
            rows += 1
        if steps >= max_steps:
            return _K_MAXSTEPS, x, s, rows

        # final approach: never consume more than half of the remaining points in one step
        step = h
        l1_now = _l1(s, d)
        dl1 = _l1(drift, d)
        if dl1 < 0.0 and l1_now + step * dl1 < 0.5 * l1_now:
            step = -0.5 * l1_now / dl1
        if kind == 1:
            m1_now = _m1(s, k, d)
            dm1 = _m1(drift, k, d)
            if dm1 < 0.0 and m1_now + step * dm1 < 0.5 * m1_now:
                step = -0.5 * m1_now / dm1
        code = _rk4(kind, p, s, step, k, d, corrected, new, k1, k2, k3, k4, tmp, w_hi, w_lo)
        failed = code != _K_RUNNING
        if not failed:
            for i in range(dim):
                if not math.isfinite(new[i]):
                    return _K_FAIL, x, s, rows
            if _l1(new, d) > _l1(s, d) + 1e-12:
                return _K_FAIL, x, s, rows
        # an RK stage running out of points means l1 crosses zero inside the step
        if (failed or _exhausted(kind, new, k, d, eps_end)
                or _tau(kind, p, new, k, d, corrected, tmp) <= 0.0):
            lo_step = 0.0
            hi_step = step
            while hi_step - lo_step > eps_evt:
                mid = 0.5 * (lo_step + hi_step)
                code = _rk4(kind, p, s, mid, k, d, corrected, trial, k1, k2, k3, k4, tmp,
                            w_hi, w_lo)
                if (code != _K_RUNNING or _exhausted(kind, trial, k, d, eps_end)
                        or _tau(kind, p, trial, k, d, corrected, tmp) <= 0.0):
                    hi_step = mid
                else:
                    lo_step = mid
            code = _rk4(kind, p, s, hi_step, k, d, corrected, trial, k1, k2, k3, k4, tmp,
                        w_hi, w_lo)
            ev_tau = code == _K_RUNNING and not _exhausted(kind, trial, k, d, eps_end)
            if ev_tau or code != _K_RUNNING:
                # tau events stay on the admissible side (tau > 0)
                _rk4(kind, p, s, lo_step, k, d, corrected, trial, k1, k2, k3, k4, tmp,
                     w_hi, w_lo)
                x += lo_step
            else:
                x += hi_step
            for i in range(dim):
                v = trial[i]
                if v < diag[D_MIN_COMPONENT]:
                    diag[D_MIN_COMPONENT] = v
                s[i] = v if v > 0.0 else 0.0
            steps += 1
            diag[D_STEPS] = steps
            res = _blend(kind, p, s, k, d, corrected, drift, w_hi, w_lo)
            if rows < traj.shape[0]:
                _record(traj, rows, x, p, s, res[3], res[4])
                rows += 1
            if ev_tau:
                return _K_TAU, x, s, rows
            if kind == 1 and _m1(s, k, d) < _l1(s, d):
                return _K_M1, x, s, rows
            return _K_L1, x, s, rows
        for i in range(dim):
            v = new[i]
            if v < diag[D_MIN_COMPONENT]:
                diag[D_MIN_COMPONENT] = v
            s[i] = v if v > 0.0 else 0.0
        x += step
        steps += 1
        diag[D_STEPS] = steps


# ---------------------------------------------------------------------------
# public API

def _kind_and_mode(s: StateVec, process: str, mode: str):
    if process not in (MATCHING, INDEPENDENT):
        raise InvalidParameters(f"unknown process {process!r}")
    if mode not in MODES:
        raise InvalidParameters(f"unknown rate mode {mode!r}")
    return (0 if process == MATCHING else 1), mode == CORRECTED


def moments(s: StateVec) -> tuple[float, float, float, float]:
    """``(l1, l2, m1, m2)``: first and second factorial moments of the y and z classes."""
    return _moments(s.flat(), s.k, s.d)


def _rate_vector(kind: int, r: int, s: StateVec, corrected: bool) -> np.ndarray:
    out = np.zeros(s.d + 1 + s.k)
    if not _rates(kind, r, s.flat(), s.k, s.d, corrected, out):
        raise DegenerateState("no unpaired points left (l1 or m1 <= 0)")
    return out


def rate_matching(j: int, r: int, s: StateVec) -> float:
    """Expected scaled change of ``y_j`` in one matching step that selects degree ``r``."""
    if not 1 <= j <= s.d or not 1 <= r <= s.d:
        raise InvalidParameters(f"need 1 <= j, r <= d (got j={j}, r={r})")
    return float(_rate_vector(0, r, s, False)[j])


def rate_independent(j: int, r: int, s: StateVec, mode: str = CORRECTED):
    """``(f[j, r], g[j, r])`` for the independent process.

    ``f`` is ``None`` when ``j > d`` and ``g`` is ``None`` unless ``1 <= j <= k``.
    """
    if not 0 <= r <= s.d or j < 0:
        raise InvalidParameters(f"need 0 <= r <= d and j >= 0 (got j={j}, r={r})")
    _, corrected = _kind_and_mode(s, INDEPENDENT, mode)
    vec = _rate_vector(1, r, s, corrected)
    f = float(vec[j]) if j <= s.d else None
    g = float(vec[s.d + j]) if 1 <= j <= s.k else None
    return f, g


def _check_phase(p: int, cfg: RateConfig) -> None:
    if p not in cfg.phases:
        raise InvalidParameters(f"phase {p} is not valid for the {cfg.process} system with d={cfg.d}")


def _check_state(s: StateVec, cfg: RateConfig) -> None:
    if s.d != cfg.d or s.k != cfg.k:
        raise InvalidParameters("state dimensions do not match the configuration")


def phase_coefficients(p: int, s: StateVec, cfg: RateConfig) -> tuple[float, float]:
    """``(alpha_p, tau_p)`` before clamping.

    The final matching phase never processes degree 0, so it reports ``(0, 1)``.
    """
    _check_phase(p, cfg)
    _check_state(s, cfg)
    if cfg.process == MATCHING and p == cfg.d - 1:
        return 0.0, 1.0
    hi, lo = cfg.d - p, cfg.d - p - 1
    alpha = _rate_vector(cfg.kind, hi, s, cfg.corrected)[lo]
    tau = -_rate_vector(cfg.kind, lo, s, cfg.corrected)[lo]
    return float(alpha), float(tau)


def blend_weights(p: int, s: StateVec, cfg: RateConfig) -> tuple[float, float]:
    """Fractions of steps spent on degree ``d-p`` and ``d-p-1`` vertices."""
    _check_phase(p, cfg)
    _check_state(s, cfg)
    dim = cfg.d + 1 + cfg.k
    code, wh, wl, _, _ = _blend(cfg.kind, p, s.flat(), cfg.k, cfg.d, cfg.corrected,
                                np.empty(dim), np.empty(dim), np.empty(dim))
    _raise_code(code, p)
    return wh, wl


def blended_derivative(p: int, s: StateVec, cfg: RateConfig) -> StateVec:
    """Drift of the phase-``p`` system at ``s``, as a StateVec with ``x = 1``."""
    _check_phase(p, cfg)
    _check_state(s, cfg)
    dim = cfg.d + 1 + cfg.k
    out = np.empty(dim)
    code = _blend(cfg.kind, p, s.flat(), cfg.k, cfg.d, cfg.corrected,
                  out, np.empty(dim), np.empty(dim))[0]
    _raise_code(code, p)
    return StateVec.from_flat(1.0, out, cfg.k, cfg.d)


def _raise_code(code: int, p: int) -> None:
    if code == _K_DEGEN_STATE:
        raise DegenerateState(f"phase {p}: no unpaired points left")
    if code == _K_DEGEN_BLEND:
        raise DegenerateBlend(f"phase {p}: alpha + tau <= 0")
    if code == _K_FAIL:
        raise StepFailure(f"phase {p}: state left the admissible region")
    if code == _K_MAXSTEPS:
        raise StepFailure(f"phase {p}: step budget exhausted")


def _diag_dict(diag: np.ndarray) -> dict:
    return {"max_l1_m1_gap": float(diag[D_MAX_GAP]), "max_abs_z1": float(diag[D_MAX_Z1]),
            "min_weight": float(diag[D_W_MIN]), "max_weight": float(diag[D_W_MAX]),
            "min_tau": float(diag[D_MIN_TAU]), "min_component": float(diag[D_MIN_COMPONENT]),
            "steps": int(diag[D_STEPS])}


def integrate_phase(p: int, entry: StateVec, cfg: RateConfig,
                    sample_dx: float = SAMPLE_DX) -> PhaseOutcome:
    """Integrate phase ``p`` from ``entry`` until ``tau_p`` hits zero or ``l1`` runs out."""
    _check_phase(p, cfg)
    _check_state(entry, cfg)
    alpha, tau = phase_coefficients(p, entry, cfg)
    if _l1(entry.flat(), cfg.d) < cfg.eps_end:
        return PhaseOutcome(p, entry, entry, L1_EXHAUSTED)
    if tau <= cfg.eps_evt:
        return PhaseOutcome(p, entry, entry, DEGENERATE_SKIP)
    stride = max(1, int(round(sample_dx / cfg.h)))
    max_steps = int(math.ceil(2.0 / cfg.h)) + 10
    traj = np.zeros((max_steps // stride + 3, 4 + cfg.d + 1 + cfg.k))
    diag = np.zeros(N_DIAG)
    code, x, s, rows = _integrate(cfg.kind, p, entry.flat(), entry.x, cfg.k, cfg.d,
                                  cfg.corrected, cfg.h, cfg.eps_end, cfg.eps_evt,
                                  max_steps, stride, traj, diag)
    if code not in (_K_TAU, _K_L1, _K_M1):
        _raise_code(code, p)
    cause = {_K_TAU: TAU_ZERO, _K_L1: L1_EXHAUSTED, _K_M1: M1_EXHAUSTED}[code]
    return PhaseOutcome(p, entry, StateVec.from_flat(x, s, cfg.k, cfg.d), cause,
                        _diag_dict(diag), traj[:rows].copy())


def solve(cfg: RateConfig, sample_dx: float = SAMPLE_DX) -> SolveResult:
    """Chain the phases from the initial state; the constant is the final time."""
    state = StateVec.initial(cfg)
    phases = []
    for p in cfg.phases:
        try:
            out = integrate_phase(p, state, cfg, sample_dx)
        except (DegenerateState, StepFailure) as exc:
            raise type(exc)(f"{cfg.process} k={cfg.k} d={cfg.d}: {exc}") from exc
        phases.append(out)
        state = out.exit
        if out.cause in (L1_EXHAUSTED, M1_EXHAUSTED):
            break
    if phases[-1].cause not in (L1_EXHAUSTED, M1_EXHAUSTED):
        raise StepFailure(f"{cfg.process} k={cfg.k} d={cfg.d}: phases ran out before l1 was exhausted")
    return SolveResult(value=state.x, phases=tuple(phases), config=cfg)
