"""Independent brute-force reference for small allocation instances.

Everything here is computed from first principles with plain numpy so the
package under test shares no code with its referee: binaries by explicit
enumeration, powers by grid search over per-user totals and split
fractions, rates by direct evaluation of log2(1 + signal/interference).
Only the two-user, two-subchannel shape is supported; that is the largest
shape where the grid stays exhaustive at useful resolution.
"""

import itertools

import numpy as np


def direct_rates(p0, p1, d0, d1, gains, noise):
    """Rates for two users with per-subchannel powers p0, p1 (each (..., 2))
    served by drones d0, d1. Interference on a subchannel is the other
    user's power there, through the victim's gain toward the serving drone."""
    r0 = np.zeros(p0.shape[:-1])
    r1 = np.zeros(p1.shape[:-1])
    for m in range(2):
        i0 = p1[..., m] * gains[0, d1] + noise
        i1 = p0[..., m] * gains[1, d0] + noise
        r0 = r0 + np.log2(1.0 + p0[..., m] * gains[0, d0] / i0)
        r1 = r1 + np.log2(1.0 + p1[..., m] * gains[1, d1] / i1)
    return r0, r1


def _power_menu(subset, totals, splits):
    """(n, 2) per-subchannel powers for one user: every total, and for a
    two-subchannel holding every split fraction of that total."""
    if len(subset) == 1:
        menu = np.zeros((totals.size, 2))
        menu[:, subset[0]] = totals
        return menu
    t = np.repeat(totals, len(splits))
    f = np.tile(splits, totals.size)
    menu = np.column_stack([t * f, t * (1.0 - f)])
    return menu


def grid_oracle(gains, rate_floor, max_power, noise, steps=200,
                splits=(0.0, 0.25, 0.5, 0.75, 1.0)):
    """Minimum total power over every binary choice and a power grid.

    gains: (2, 2) user-by-drone gains. Enumerates, for each user, a serving
    drone and a nonempty subchannel subset of {0, 1}; powers come from a
    grid of per-user totals with step max_power/steps. Returns the best
    objective, or None when no grid point is feasible.
    """
    gains = np.asarray(gains, dtype=float)
    totals = np.linspace(0.0, max_power, steps + 1)
    splits = np.asarray(splits, dtype=float)
    subsets = [(0,), (1,), (0, 1)]
    options = list(itertools.product(range(2), subsets))
    best = None
    for (d0, s0), (d1, s1) in itertools.product(options, options):
        menu0 = _power_menu(s0, totals, splits)
        menu1 = _power_menu(s1, totals, splits)
        p0 = menu0[:, None, :]
        p1 = menu1[None, :, :]
        t0 = menu0.sum(axis=1)[:, None]
        t1 = menu1.sum(axis=1)[None, :]
        if d0 == d1:
            ok = t0 + t1 <= max_power + 1e-12
        else:
            ok = np.broadcast_to((t0 <= max_power + 1e-12) & (t1 <= max_power + 1e-12),
                                 (menu0.shape[0], menu1.shape[0]))
        r0, r1 = direct_rates(p0, p1, d0, d1, gains, noise)
        ok = ok & (r0 >= rate_floor - 1e-12) & (r1 >= rate_floor - 1e-12)
        if not ok.any():
            continue
        obj = np.where(ok, t0 + t1, np.inf).min()
        if best is None or obj < best:
            best = float(obj)
    return best


def draw_tight_instance(seed, rcp_cls, solve, max_power=1.0, noise=1e-7):
    """Random two-user geometry whose optimum is well inside the grid's
    resolution: redraws until the package's own solve succeeds with a total
    above 0.25 W so a max_power/200 grid quantizes below the 5% band.
    Returns (gains, rcp, solver_objective, allocation)."""
    from dronegrid import ChannelParams, gain_table

    for k in itertools.count():
        rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
        cp = ChannelParams(noise_power=noise)
        drones = rng.uniform(-250, 250, (2, 2))
        users = rng.uniform(-350, 350, (2, 2))
        floor = float(rng.uniform(1.5, 2.5))
        gains = gain_table(drones, users, cp)
        rcp = rcp_cls(rate_floor=floor, backhaul_cap=1e9, subchannels=2,
                      max_power=max_power)
        try:
            alloc, state = solve(gains, rcp, noise)
        except Exception:
            continue
        if state.objective >= 0.25:
            return gains, rcp, state.objective, alloc
