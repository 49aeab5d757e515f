"""
Sectored particle search for drone positions
============================================

One drone per sector, users piled into two corners. The search starts from
the previous block's positions (here: the sector centroids), scatters
candidate placements, and repeatedly shrinks the sampling radius around
the best one. Moving costs real energy, so improvements must buy more in
transmit power than they spend in propulsion.
"""

import numpy as np

from dronegrid import (
    SearchConfig,
    evaluate_particle,
    load_scenario,
    search_positions,
    sector_partition,
)

sc = load_scenario({
    "drones": 2,
    "users": [[-350.0, -350.0], [-320.0, -360.0], [-340.0, -310.0],
              [350.0, 350.0], [330.0, 320.0]],
})
users = np.array([ue.xy for ue in sc.users])
centers = np.array([s.center for s in sector_partition(sc.bounds, sc.drones)])
reach = sc.energy.v_max * sc.time.move_s


def evaluator(cand):
    return evaluate_particle(cand, centers, users, sc.channel, sc.energy,
                             sc.time, sc.rates, sc.solver)


stay_cost = evaluator(centers)
cfg = SearchConfig(particles=12, max_refines=3, seed=0)
best, best_val, evals = search_positions(
    centers, centers, evaluator, cfg, sc.bounds, reach,
    np.random.default_rng(0),
)

print("sector centroids:")
print(np.round(centers, 1))
print(f"cost of staying put: {stay_cost / 1e3:.3f} kJ")
print(f"\nbest found after {evals} evaluations:")
print(np.round(best, 1))
print(f"cost: {best_val / 1e3:.3f} kJ")
moved = np.linalg.norm(best - centers, axis=1)
for d, m in enumerate(moved):
    print(f"drone {d} moved {m:.1f} m")
print("\npropulsion dominates at this scale, so placements move only when"
      "\nthe transmit-power savings repay the trip")
