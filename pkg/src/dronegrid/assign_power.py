"""Association, subchannel assignment and minimum-power allocation.

For one time block the radio side of the problem is: pick which drone
serves each user, hand each user at least one subchannel on that drone,
and set per-subchannel transmit powers so every user clears its rate floor
with the least total radiated power.

The binary layer is combinatorial; small instances are enumerated
outright, larger ones get a greedy assignment refined by a move/swap local
search. For fixed binaries the power problem has concave-minus-concave
rate constraints, handled by successive convex approximation: the
interference log-term is replaced with its first-order Taylor expansion at
a reference point, which upper-bounds it everywhere (the log is concave),
so each convexified problem is conservative: any feasible point of the
approximation meets the true rate floors. Re-anchoring at each solution
gives a non-increasing objective sequence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .channel import interference_table

LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateConstraintParams:
    """Radio-resource constants for the allocation problem.

    rate_floor: minimum spectral efficiency per user, bps/Hz.
    backhaul_cap: total rate the shared backhaul can carry, bps/Hz.
    subchannels: number of orthogonal subchannels per drone.
    max_power: per-drone (and per-subchannel) transmit power budget, watts.
    """

    rate_floor: float = 0.5
    backhaul_cap: float = 10.0
    subchannels: int = 12
    max_power: float = 1.0

    def __post_init__(self):
        if self.rate_floor < 0:
            raise ValueError("rate_floor must be nonnegative")
        if self.backhaul_cap <= 0 or self.max_power <= 0:
            raise ValueError("backhaul_cap and max_power must be positive")
        if self.subchannels < 1:
            raise ValueError("subchannels must be at least 1")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the allocation solver."""

    init_power: float = 0.1
    sca_tol: float = 1e-4
    max_sca_iters: int = 50
    inner_tol: float = 1e-6
    swap_passes: int = 1
    exhaustive_cap: int = 100
    probe_iters: int = 80
    polish: bool = True
    search_budget: int = 6


@dataclass
class ScaState:
    """Trace of one successive-convex-approximation run."""

    ref_power: np.ndarray
    iteration: int
    objective_trace: list = field(default_factory=list)
    converged: bool = False

    @property
    def objective(self) -> float:
        """Final summed transmit power, watts."""
        return self.objective_trace[-1] if self.objective_trace else 0.0


@dataclass
class Allocation:
    """One block's radio decisions.

    assoc: (U, D) user-to-drone indicators, one drone per user.
    chan: (U, D, M) subchannel indicators on the serving drone.
    power: (U, D, M) transmit watts, zero off the assigned triples.
    charge: (D,) charging indicators, at most one set.
    """

    assoc: np.ndarray
    chan: np.ndarray
    power: np.ndarray
    charge: np.ndarray

    def violations(self, rcp: RateConstraintParams, tol: float = 1e-9) -> list:
        """Hard-constraint audit; returns human-readable violation strings."""
        out = []
        U = self.assoc.shape[0]
        p = self.power
        pm = rcp.max_power
        for u in range(U):
            if self.assoc[u].sum() != 1:
                out.append(f"user {u} associated with {int(self.assoc[u].sum())} drones (need exactly 1)")
            if (self.assoc[u][:, None] * self.chan[u]).sum() < 1:
                out.append(f"user {u} holds no subchannel")
        if np.any(p < -tol):
            out.append("negative transmit power")
        box = coupling_upper_bound(self.assoc, self.chan, pm)
        if np.any(p > box + tol * pm):
            out.append("power on an unassigned triple or above the per-subchannel cap")
        drone_tot = p.sum(axis=(0, 2))
        for d, tot in enumerate(drone_tot):
            if tot > pm + tol * pm:
                out.append(f"drone {d} total power {tot:.6g} exceeds cap {pm}")
        if self.charge.sum() > 1:
            out.append("more than one drone charged in a single block")
        return out


class RateInfeasibleError(Exception):
    """No power profile can satisfy every rate floor for these binaries."""

    def __init__(self, users, detail: str):
        self.users = tuple(sorted(set(int(u) for u in users)))
        self.detail = detail
        super().__init__(f"rate floor unreachable for users {list(self.users)}: {detail}")


# ---------------------------------------------------------------------------
# linearized coupling between binaries and powers
# ---------------------------------------------------------------------------

def coupling_upper_bound(assoc: np.ndarray, chan: np.ndarray, max_power: float) -> np.ndarray:
    """(U, D, M) upper bound assoc * chan * max_power (the product form)."""
    return np.asarray(assoc, dtype=float)[:, :, None] * np.asarray(chan, dtype=float) * max_power


def coupling_admits(power, assoc, chan, max_power: float, tol: float = 0.0) -> np.ndarray:
    """Elementwise membership in the product-form set 0 <= p <= assoc*chan*Pmax."""
    p = np.asarray(power, dtype=float)
    ub = coupling_upper_bound(assoc, chan, max_power)
    return (p >= -tol) & (p <= ub + tol)


def linearization_admits(power, assoc, chan, max_power: float, tol: float = 0.0) -> np.ndarray:
    """Elementwise membership in the linearized set.

    The pair of caps p <= assoc*Pmax and p <= chan*Pmax (with p >= 0) pins
    p to zero unless both indicators are set, and frees it up to Pmax when
    they are: exactly the product-form set, with no extra lower bound. A
    lower bound of (assoc + chan - 1)*Pmax would instead weld assigned
    powers to Pmax and break the per-drone budget, so it has no place here.
    """
    p = np.asarray(power, dtype=float)
    a = np.asarray(assoc, dtype=float)[:, :, None] * max_power
    c = np.asarray(chan, dtype=float) * max_power
    return (p >= -tol) & (p <= a + tol) & (p <= c + tol)


# ---------------------------------------------------------------------------
# rate expressions
# ---------------------------------------------------------------------------

def rate_split(u: int, m: int, power: np.ndarray, gains: np.ndarray, noise_power: float):
    """User u's rate on subchannel m written as a difference of two logs.

    R1 takes every transmission on m (user u's included), R2 only the
    interference; both are log2 of an affine function of the powers, so
    R1 is the concave side and R2 the side the solver linearizes.
    R1 - R2 equals the plain log2(1 + SINR) rate identically.
    """
    gains = np.asarray(gains, dtype=float)
    power = np.asarray(power, dtype=float)
    inr = interference_table(power, gains, noise_power)[u, m]
    own = float(power[u, :, m] @ gains[u, :])
    return math.log2(own + inr), math.log2(inr)


def sca_rate_upper_bound(
    u: int,
    m: int,
    power: np.ndarray,
    ref_power: np.ndarray,
    gains: np.ndarray,
    noise_power: float,
) -> float:
    """First-order expansion of the interference log-term around ref_power.

    Returns R2(ref) + sum_{i != u, j} gains[u, j] * (p - p_ref)[i, j, m]
    / (ln2 * (interference at ref + noise)). Concavity of log2 makes this
    a global upper bound on R2, tight at ref_power.
    """
    gains = np.asarray(gains, dtype=float)
    power = np.asarray(power, dtype=float)
    ref_power = np.asarray(ref_power, dtype=float)
    inr_ref = interference_table(ref_power, gains, noise_power)[u, m]
    diff = power[:, :, m] - ref_power[:, :, m]
    diff[u, :] = 0.0  # own transmissions are not interference
    slope = float(np.sum(gains[u, :] * diff.sum(axis=0))) / (LN2 * inr_ref)
    return math.log2(inr_ref) + slope


# ---------------------------------------------------------------------------
# fixed-binary power solver (successive convex approximation)
# ---------------------------------------------------------------------------

@dataclass
class _Struct:
    """Dense per-active-triple view of one fixed-binary instance.

    Active triple r is user tu[r] on drone td[r], subchannel tm[r]; its own
    power is variable r. den[r, v] is the gain with which variable v lands
    as interference in triple r's subchannel (zero for v belonging to the
    same user or another subchannel), g_own[r] the direct gain. user_of
    maps triple -> row of agg, the per-user summing matrix.
    """

    triples: list
    g_own: np.ndarray
    den: np.ndarray
    agg: np.ndarray
    cap_mat: np.ndarray
    users: np.ndarray
    shape: tuple

    @property
    def n(self) -> int:
        return len(self.triples)

    def scatter(self, x: np.ndarray) -> np.ndarray:
        full = np.zeros(self.shape)
        for r, (u, d, m) in enumerate(self.triples):
            full[u, d, m] = x[r]
        return full

    def user_rates(self, x: np.ndarray) -> np.ndarray:
        """True per-user rates at the packed power vector x."""
        inr = self.den @ x + self._noise
        return self.agg @ np.log2(1.0 + self.g_own * x / inr)

    _noise: float = 0.0


def _build_struct(assoc, chan, gains, noise_power: float):
    assoc = np.asarray(assoc)
    chan = np.asarray(chan)
    gains = np.asarray(gains, dtype=float)
    U, D = assoc.shape
    M = chan.shape[2]
    triples = [
        (u, d, m)
        for u in range(U)
        for d in range(D)
        for m in range(M)
        if assoc[u, d] and chan[u, d, m]
    ]
    n = len(triples)
    tu = np.array([t[0] for t in triples], dtype=int)
    td = np.array([t[1] for t in triples], dtype=int)
    tm = np.array([t[2] for t in triples], dtype=int)
    g_own = gains[tu, td] if n else np.zeros(0)
    den = np.zeros((n, n))
    for r in range(n):
        same_m = tm == tm[r]
        other_user = tu != tu[r]
        den[r, same_m & other_user] = gains[tu[r], td[same_m & other_user]]
    users = np.unique(tu) if n else np.zeros(0, dtype=int)
    agg = np.zeros((len(users), n))
    for row, u in enumerate(users):
        agg[row, tu == u] = 1.0
    cap_mat = np.zeros((D, n))
    for d in range(D):
        cap_mat[d, td == d] = 1.0
    st = _Struct(triples, g_own, den, agg, cap_mat, users, (U, D, M))
    st._noise = noise_power
    return st


def _subproblem(st: _Struct, y: np.ndarray, rcp: RateConstraintParams, cfg: SolverConfig):
    """Solve one convexified problem anchored at y. Returns (x, ok)."""
    n = st.n
    noise = st._noise
    den_ref = st.den @ y + noise
    w = 1.0 / (LN2 * den_ref)
    lin = st.agg @ (st.den * w[:, None])  # per-user gradient of the linearized term
    const = st.agg @ np.log2(den_ref) - lin @ y + rcp.rate_floor

    def rate_slack(x):
        num = st.den @ x + st.g_own * x + noise
        return st.agg @ np.log2(num) - lin @ x - const

    def rate_jac(x):
        num = st.den @ x + st.g_own * x + noise
        inv = 1.0 / (LN2 * num)
        j1 = st.agg @ ((st.den + np.diag(st.g_own)) * inv[:, None])
        return j1 - lin

    def cap_slack(x):
        return rcp.max_power - st.cap_mat @ x

    res = minimize(
        lambda x: float(np.sum(x)),
        y,
        jac=lambda x: np.ones(n),
        bounds=[(0.0, rcp.max_power)] * n,
        constraints=[
            {"type": "ineq", "fun": rate_slack, "jac": rate_jac},
            {"type": "ineq", "fun": cap_slack, "jac": lambda x: -st.cap_mat},
        ],
        method="SLSQP",
        options={"maxiter": 200, "ftol": 1e-12},
    )
    x = np.clip(res.x, 0.0, rcp.max_power)
    tol = cfg.inner_tol
    ok = (
        np.all(rate_slack(x) >= -tol)
        and np.all(cap_slack(x) >= -tol * rcp.max_power)
    )
    return x, ok


def _probe_start(st: _Struct, rcp: RateConstraintParams, cfg: SolverConfig):
    """Fixed-point feasibility probe.

    Splits each user's floor evenly over its subchannels and repeatedly
    inverts the SINR requirement under the current interference. The map is
    monotone from zero, so divergence or a cap/box breach flags the floor
    as unreachable and names the users that demand the excess power.
    """
    noise = st._noise
    k_u = st.agg.sum(axis=1)  # subchannels per user
    per_user_need = 2.0 ** (rcp.rate_floor / k_u) - 1.0
    need = (st.agg.T @ per_user_need)  # per triple
    x = np.zeros(st.n)
    for _ in range(cfg.probe_iters):
        x_new = need * (st.den @ x + noise) / st.g_own
        if np.allclose(x_new, x, rtol=1e-12, atol=0.0):
            x = x_new
            break
        x = x_new
        if np.any(x > rcp.max_power * 1e3):
            break
    box_bad = x > rcp.max_power
    cap_bad = st.cap_mat @ x > rcp.max_power
    if not box_bad.any() and not cap_bad.any():
        return x, True, []
    tu = np.array([t[0] for t in st.triples])
    td = np.array([t[1] for t in st.triples])
    violators = set(tu[box_bad].tolist())
    for d in np.nonzero(cap_bad)[0]:
        violators.update(tu[td == d].tolist())
    return x, False, sorted(violators)


def _polish(x: np.ndarray, st: _Struct, rcp: RateConstraintParams) -> np.ndarray:
    """Scale the profile up minimally until every true rate floor holds.

    Conservativeness of the convexified constraints keeps any deficit at
    solver-tolerance scale, so the multiplier stays within rounding of 1.
    """
    def ok(t):
        return np.all(st.user_rates(x * t) >= rcp.rate_floor)

    if x.size == 0 or ok(1.0):
        return x
    headroom = [rcp.max_power / max(x.max(), 1e-300)]
    caps = st.cap_mat @ x
    headroom += [rcp.max_power / c for c in caps if c > 0]
    t_max = min(headroom)
    t_hi = 1.0
    while t_hi < t_max and not ok(t_hi):
        t_hi = min(t_hi * 1.5, t_max)
    if not ok(t_hi):
        return x  # cannot be fixed by scaling; caller's tolerance decides
    t_lo = 1.0
    for _ in range(80):
        mid = 0.5 * (t_lo + t_hi)
        if ok(mid):
            t_hi = mid
        else:
            t_lo = mid
    return x * t_hi


def solve_power_given_binaries(
    assoc: np.ndarray,
    chan: np.ndarray,
    gains: np.ndarray,
    rcp: RateConstraintParams,
    cfg: SolverConfig = SolverConfig(),
    noise_power: float = 1e-10,
):
    """Minimum-total-power profile for fixed binaries.

    Returns (power, state): power is the (U, D, M) tensor, state the SCA
    trace. Raises RateInfeasibleError when no profile within the caps can
    clear every floor, naming the violating users.
    """
    assoc = np.asarray(assoc)
    chan = np.asarray(chan)
    gains = np.asarray(gains, dtype=float)
    U, D = assoc.shape
    M = chan.shape[2]
    st = _build_struct(assoc, chan, gains, noise_power)

    uncovered = [u for u in range(U) if u not in set(st.users.tolist())]
    if uncovered and rcp.rate_floor > 0:
        raise RateInfeasibleError(uncovered, "user holds no subchannel")
    if st.n == 0 or rcp.rate_floor == 0.0:
        state = ScaState(np.zeros((U, D, M)), 0, [0.0], converged=True)
        return np.zeros((U, D, M)), state

    # reference point: flat init_power, shrunk where a drone's triple count
    # would already break its cap
    base = min(cfg.init_power, rcp.max_power)
    y = np.full(st.n, base)
    loads = st.cap_mat @ np.ones(st.n)
    for d in range(D):
        if loads[d] * base > 0.9 * rcp.max_power:
            y[st.cap_mat[d] > 0] = 0.9 * rcp.max_power / loads[d]

    trace = []
    accepted = None
    obj_prev = math.inf
    probed = False
    it = 0
    while it < cfg.max_sca_iters:
        it += 1
        x, ok = _subproblem(st, y, rcp, cfg)
        if not ok:
            if not probed:
                probed = True
                px, feas, violators = _probe_start(st, rcp, cfg)
                if not feas:
                    raise RateInfeasibleError(violators, "power demand exceeds the drone budget")
                y = px
                continue
            if accepted is None:
                slack = st.user_rates(x) - rcp.rate_floor
                bad = st.users[np.asarray(slack) < 0]
                raise RateInfeasibleError(bad, "convexified subproblem unsolvable within tolerance")
            break
        obj = float(np.sum(x))
        if obj > obj_prev + 1e-15 * max(1.0, obj_prev):
            break  # anchor is already a fixed point; keep the incumbent
        accepted = x
        improvement = obj_prev - obj
        trace.append(obj)
        obj_prev = obj
        y = x
        if improvement < cfg.sca_tol * max(obj, 1e-300):
            break

    if accepted is None:
        raise RateInfeasibleError(list(st.users), "no feasible iterate found")
    if cfg.polish:
        # nudge marginal floors back over the line; the trace keeps the
        # pre-polish optima so its monotone property is untouched
        accepted = _polish(accepted, st, rcp)
    state = ScaState(st.scatter(y), it, trace, converged=it < cfg.max_sca_iters)
    return st.scatter(accepted), state


# ---------------------------------------------------------------------------
# binary assignment
# ---------------------------------------------------------------------------

def _deal_channels(assoc: np.ndarray, M: int) -> np.ndarray:
    """Spread each drone's subchannels evenly over its users.

    Distinct subchannels within a drone (co-channel users of one drone jam
    each other at full signal strength, which is never power-efficient);
    all M handed out round-robin in user-index order since spreading a
    fixed rate over more subchannels always lowers the power bill.
    """
    U, D = assoc.shape
    chan = np.zeros((U, D, M), dtype=np.int8)
    for d in range(D):
        users_d = np.nonzero(assoc[:, d])[0]
        if users_d.size == 0:
            continue
        for m in range(M):
            chan[users_d[m % users_d.size], d, m] = 1
    return chan


def _greedy_binaries(gains: np.ndarray, rcp: RateConstraintParams):
    U, D = gains.shape
    M = rcp.subchannels
    assoc = np.zeros((U, D), dtype=np.int8)
    load = np.zeros(D, dtype=int)
    for u in range(U):
        order = np.argsort(-gains[u], kind="stable")  # ties -> lowest drone index
        d = next(d for d in order if load[d] < M)
        assoc[u, d] = 1
        load[d] += 1
    return assoc, _deal_channels(assoc, M)


def _enumerate_binaries(U: int, D: int, M: int):
    """All (assoc, chan) combinations: one drone per user, any nonempty
    subchannel set, no subchannel handed out twice within a drone."""
    options = [(d, mask) for d in range(D) for mask in range(1, 1 << M)]
    for combo in itertools.product(options, repeat=U):
        used = {}
        clash = False
        for u, (d, mask) in enumerate(combo):
            if used.get(d, 0) & mask:
                clash = True
                break
            used[d] = used.get(d, 0) | mask
        if clash:
            continue
        assoc = np.zeros((U, D), dtype=np.int8)
        chan = np.zeros((U, D, M), dtype=np.int8)
        for u, (d, mask) in enumerate(combo):
            assoc[u, d] = 1
            for m in range(M):
                if mask >> m & 1:
                    chan[u, d, m] = 1
        yield assoc, chan


def _objective_for(assoc, chan, gains, rcp, cfg, noise_power):
    try:
        power, state = solve_power_given_binaries(assoc, chan, gains, rcp, cfg, noise_power)
    except RateInfeasibleError:
        return None, None
    return state.objective, power


def _probe_objective(assoc, chan, gains, rcp, cfg, noise_power):
    """Cheap stand-in for the full solve, used only to rank neighbourhood
    candidates: total power of the equal-split fixed point, inf when that
    point breaches a box or per-drone cap."""
    st = _build_struct(assoc, chan, gains, noise_power)
    x, feasible, _ = _probe_start(st, rcp, cfg)
    return float(np.sum(x)) if feasible else np.inf


def _move_swap_candidates(assoc: np.ndarray, M: int):
    """Deterministic neighbourhood: single-user re-associations first, then
    pairwise drone exchanges between users on different drones."""
    U, D = assoc.shape
    load = assoc.sum(axis=0)
    cur = assoc.argmax(axis=1)
    for u in range(U):
        for d2 in range(D):
            if d2 != cur[u] and load[d2] < M:
                yield ("move", u, d2)
    for u1 in range(U):
        for u2 in range(u1 + 1, U):
            if cur[u1] != cur[u2]:
                yield ("swap", u1, u2)


def _apply_candidate(assoc: np.ndarray, cand, M: int):
    out = assoc.copy()
    if cand[0] == "move":
        _, u, d2 = cand
        out[u] = 0
        out[u, d2] = 1
    else:
        _, u1, u2 = cand
        d1, d2 = out[u1].argmax(), out[u2].argmax()
        out[u1], out[u2] = 0, 0
        out[u1, d2] = 1
        out[u2, d1] = 1
    return out, _deal_channels(out, M)


def assign_binaries(
    gains: np.ndarray,
    rcp: RateConstraintParams,
    cfg: SolverConfig = SolverConfig(),
    noise_power: float = 1e-10,
):
    """Choose association and subchannel indicators for the given gains.

    Small instances (option count within cfg.exhaustive_cap) are solved by
    enumeration, larger ones by the greedy + local-search path. Returns
    (assoc, chan). Raises RateInfeasibleError if no assignment admits a
    feasible power profile, and ValueError when U > D*M (some user could
    never hold a subchannel).
    """
    gains = np.asarray(gains, dtype=float)
    U, D = gains.shape
    M = rcp.subchannels
    if U == 0:
        return np.zeros((0, D), dtype=np.int8), np.zeros((0, D, M), dtype=np.int8)
    if U > D * M:
        raise ValueError(f"{U} users cannot each hold a subchannel with {D} drones x {M} subchannels")

    n_options = D * ((1 << M) - 1)
    if n_options**U <= cfg.exhaustive_cap:
        best = None
        infeasible_users = set()
        for assoc, chan in _enumerate_binaries(U, D, M):
            obj, _ = _objective_for(assoc, chan, gains, rcp, cfg, noise_power)
            if obj is None:
                continue
            if best is None or obj < best[0]:
                best = (obj, assoc, chan)
        if best is None:
            try:
                solve_power_given_binaries(*_greedy_binaries(gains, rcp), gains, rcp, cfg, noise_power)
            except RateInfeasibleError as err:
                infeasible_users.update(err.users)
            raise RateInfeasibleError(infeasible_users or range(U), "every assignment is power-infeasible")
        return best[1], best[2]

    assoc, chan = _greedy_binaries(gains, rcp)
    if cfg.swap_passes <= 0:
        # no local search: skip the baseline solve here, the caller's power
        # solve performs the same feasibility check on these binaries
        return assoc, chan
    obj, _ = _objective_for(assoc, chan, gains, rcp, cfg, noise_power)
    feasible_found = obj is not None
    if obj is None:
        obj = math.inf  # let the local search try to rescue the corner
    for _ in range(cfg.swap_passes):
        # rank the whole neighbourhood with the cheap probe, then spend the
        # expensive full solves only on the most promising few; a candidate
        # is accepted only if its re-solved powers beat the incumbent
        scored = []
        for k, cand in enumerate(_move_swap_candidates(assoc, M)):
            a2, c2 = _apply_candidate(assoc, cand, M)
            scored.append((_probe_objective(a2, c2, gains, rcp, cfg, noise_power), k, a2, c2))
        scored.sort(key=lambda s: (s[0], s[1]))
        best_cand = None
        for score, _, a2, c2 in scored[: max(cfg.search_budget, 1)]:
            if not np.isfinite(score) and feasible_found:
                break
            obj2, _ = _objective_for(a2, c2, gains, rcp, cfg, noise_power)
            if obj2 is not None and obj2 < obj * (1 - 1e-9):
                if best_cand is None or obj2 < best_cand[0]:
                    best_cand = (obj2, a2, c2)
        if best_cand is None:
            break
        obj, assoc, chan = best_cand
        feasible_found = True
    if not feasible_found:
        # report through the power solver so the error names the users
        solve_power_given_binaries(assoc, chan, gains, rcp, cfg, noise_power)
    return assoc, chan


def solve_allocation(
    gains: np.ndarray,
    rcp: RateConstraintParams,
    cfg: SolverConfig = SolverConfig(),
    noise_power: float = 1e-10,
):
    """Full radio solve for one block: binaries, then powers.

    Returns (Allocation, ScaState). Charging indicators are left cleared;
    the scheduler fills them from battery state, not from the radio problem.
    """
    assoc, chan = assign_binaries(gains, rcp, cfg, noise_power)
    power, state = solve_power_given_binaries(assoc, chan, gains, rcp, cfg, noise_power)
    alloc = Allocation(assoc, chan, power, np.zeros(gains.shape[1], dtype=np.int8))
    return alloc, state


# ---------------------------------------------------------------------------
# charging and backhaul
# ---------------------------------------------------------------------------

def charge_decisions(batteries: np.ndarray, bp, rng: np.random.Generator) -> np.ndarray:
    """Pick this block's charge recipient.

    A drone qualifies when its battery is at or below the threshold; the
    powering drone can top up one drone per block, so when several qualify
    one is drawn uniformly at random. Returns (D,) indicators with at most
    a single 1.
    """
    batteries = np.asarray(batteries, dtype=float)
    beta = np.zeros(batteries.shape[0], dtype=np.int8)
    qualifying = np.nonzero(batteries <= bp.threshold)[0]
    if qualifying.size:
        beta[qualifying[rng.integers(qualifying.size)]] = 1
    return beta


def check_backhaul(user_rate_values: np.ndarray, rcp: RateConstraintParams):
    """Whether the summed user rates fit the shared backhaul link."""
    total = float(np.sum(user_rate_values))
    return total <= rcp.backhaul_cap + 1e-12, total
