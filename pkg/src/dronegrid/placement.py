"""Per-block drone placement search.

The service area is tiled into one rectangular sector per drone and each
drone starts at its sector's center. Every block, candidate joint
placements ("particles") are sampled around anchor points, scored by the
block's full energy bill (transmit + motion + hover, with the radio
subproblem re-solved at the candidate positions), and the best is refined
by repeatedly shrinking the sampling radius around the incumbent and
realigning the swarm there. Candidates always respect the area bounds and
each drone's per-block reachability disc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assign_power import RateConstraintParams, RateInfeasibleError, SolverConfig, solve_allocation
from .channel import ChannelParams, gain_table
from .energy import EnergyParams, TimeGrid, hardware_energy, hover_energy


@dataclass(frozen=True)
class AreaBounds:
    """Axis-aligned rectangle, meters."""

    x_min: float = -400.0
    x_max: float = 400.0
    y_min: float = -400.0
    y_max: float = 400.0

    def __post_init__(self):
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError("degenerate area bounds")

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2])

    @property
    def diagonal(self) -> float:
        return math.hypot(self.x_max - self.x_min, self.y_max - self.y_min)

    def contains(self, xy, tol: float = 1e-9) -> bool:
        x, y = float(xy[0]), float(xy[1])
        return (
            self.x_min - tol <= x <= self.x_max + tol
            and self.y_min - tol <= y <= self.y_max + tol
        )


@dataclass(frozen=True)
class SearchConfig:
    """Particle-search knobs.

    particles: candidates sampled per round.
    shrink_factor: radius multiplier between refinement rounds.
    max_refines: refinement rounds after the initial scatter.
    init_radius: initial sampling radius; None means "half the sector
    diagonal", filled in by the caller that knows the sectors (falls back
    to half the area diagonal).
    tol: stop refining once a round improves the incumbent by less than
    this relative amount.
    seed: optional seed for standalone use; orchestrated runs pass their
    own generator instead.
    """

    particles: int = 20
    shrink_factor: float = 0.5
    max_refines: int = 4
    init_radius: float | None = None
    tol: float = 1e-3
    seed: int | None = None

    def __post_init__(self):
        if self.particles < 1 or self.max_refines < 0:
            raise ValueError("particles must be >= 1 and max_refines >= 0")
        if not 0 < self.shrink_factor < 1:
            raise ValueError("shrink_factor must lie in (0, 1)")
        if self.init_radius is not None and self.init_radius < 0:
            raise ValueError("init_radius must be nonnegative")


def sector_partition(bounds: AreaBounds, count: int) -> list:
    """Tile the area into `count` rectangles on a ceil(sqrt)-column grid.

    Rows fill top to bottom, left to right. When count does not fill the
    grid, the last row's sectors widen to span the full area, so the tiles
    always cover the whole rectangle (equal areas whenever count fits the
    grid exactly).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    cols = math.isqrt(count)
    if cols * cols < count:
        cols += 1
    rows = math.ceil(count / cols)
    width = bounds.x_max - bounds.x_min
    height = bounds.y_max - bounds.y_min
    row_h = height / rows
    sectors = []
    for r in range(rows):
        in_row = min(cols, count - r * cols)
        col_w = width / in_row
        y1 = bounds.y_max - r * row_h
        for c in range(in_row):
            sectors.append(
                AreaBounds(
                    bounds.x_min + c * col_w,
                    bounds.x_min + (c + 1) * col_w,
                    y1 - row_h,
                    y1,
                )
            )
    return sectors


def generate_particles(
    anchors: np.ndarray,
    radius: float,
    count: int,
    rng: np.random.Generator,
    bounds: AreaBounds,
    prev_positions: np.ndarray,
    reach_radius: float,
    max_tries: int = 200,
) -> np.ndarray:
    """Sample `count` joint placements around per-drone anchor points.

    Each drone's candidate is drawn uniformly from the disc of the given
    radius around its anchor, rejecting draws that leave the area or the
    drone's reachability disc (reach_radius around its previous position).
    A drone whose sampler keeps missing the feasible intersection falls
    back to staying where it was, which is always feasible.
    Returns (count, D, 2).
    """
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    prev_positions = np.atleast_2d(np.asarray(prev_positions, dtype=float))
    D = anchors.shape[0]
    out = np.empty((count, D, 2))
    for p in range(count):
        for d in range(D):
            pos = None
            for _ in range(max_tries):
                rho = radius * math.sqrt(rng.uniform())
                theta = rng.uniform(0.0, 2.0 * math.pi)
                cand = anchors[d] + rho * np.array([math.cos(theta), math.sin(theta)])
                if not bounds.contains(cand):
                    continue
                if np.hypot(*(cand - prev_positions[d])) > reach_radius + 1e-9:
                    continue
                pos = cand
                break
            out[p, d] = prev_positions[d] if pos is None else pos
    return out


def evaluate_particle(
    positions: np.ndarray,
    prev_positions: np.ndarray,
    user_positions: np.ndarray,
    cp: ChannelParams,
    ep: EnergyParams,
    tg: TimeGrid,
    rcp: RateConstraintParams,
    solver_cfg: SolverConfig = SolverConfig(),
    noise_power: float | None = None,
) -> float:
    """Energy bill (joules) of serving one block from these positions.

    Re-solves the radio subproblem at the candidate placement; the score is
    transmit energy plus each drone's motion energy (at the speed implied
    by its displacement from the previous block) plus hover energy.
    Infeasible placements score +inf so the search simply avoids them.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    prev_positions = np.atleast_2d(np.asarray(prev_positions, dtype=float))
    noise = cp.noise_power if noise_power is None else noise_power
    gains = gain_table(positions, user_positions, cp)
    try:
        alloc, _ = solve_allocation(gains, rcp, solver_cfg, noise)
    except RateInfeasibleError:
        return math.inf
    total = float(alloc.power.sum()) * tg.block_s
    for d in range(positions.shape[0]):
        disp = float(np.hypot(*(positions[d] - prev_positions[d])))
        speed = min(disp / tg.move_s, ep.v_max) if tg.move_s > 0 else 0.0
        total += hardware_energy(speed, ep, tg.move_s) + hover_energy(ep, tg)
    return total


def shrink_and_realign(
    incumbent: np.ndarray,
    incumbent_value: float,
    radius: float,
    evaluator,
    cfg: SearchConfig,
    rng: np.random.Generator,
    bounds: AreaBounds,
    prev_positions: np.ndarray,
    reach_radius: float,
):
    """One refinement round: shrink the radius, rescatter around the
    incumbent, keep the best of old and new. Returns (positions, value,
    new_radius, evaluations)."""
    new_radius = radius * cfg.shrink_factor
    parts = generate_particles(
        incumbent, new_radius, cfg.particles, rng, bounds, prev_positions, reach_radius
    )
    best = np.asarray(incumbent, dtype=float)
    best_val = incumbent_value
    for cand in parts:
        val = evaluator(cand)
        if val < best_val:
            best, best_val = cand, val
    return best, best_val, new_radius, len(parts)


def search_positions(
    prev_positions: np.ndarray,
    sector_centers: np.ndarray,
    evaluator,
    cfg: SearchConfig,
    bounds: AreaBounds,
    reach_radius: float,
    rng: np.random.Generator | None = None,
):
    """Full per-block placement search.

    Starts from the zero-motion incumbent (staying put is always feasible),
    scatters an initial swarm around the sector centers, then runs up to
    cfg.max_refines shrink-and-realign rounds around the running best.
    Returns (positions, value, evaluations).
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    prev_positions = np.atleast_2d(np.asarray(prev_positions, dtype=float))
    sector_centers = np.atleast_2d(np.asarray(sector_centers, dtype=float))
    radius = cfg.init_radius if cfg.init_radius is not None else bounds.diagonal / 2
    best = prev_positions.copy()
    best_val = evaluator(best)
    evals = 1
    parts = generate_particles(
        sector_centers, radius, cfg.particles, rng, bounds, prev_positions, reach_radius
    )
    for cand in parts:
        val = evaluator(cand)
        if val < best_val:
            best, best_val = cand, val
    evals += len(parts)
    for _ in range(cfg.max_refines):
        before = best_val
        best, best_val, radius, n = shrink_and_realign(
            best, best_val, radius, evaluator, cfg, rng, bounds, prev_positions, reach_radius
        )
        evals += n
        if before - best_val < cfg.tol * max(abs(before), 1e-300):
            break
    return best, best_val, evals
