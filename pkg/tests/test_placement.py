import numpy as np
import pytest

from dronegrid import (
    AreaBounds,
    ChannelParams,
    EnergyParams,
    RateConstraintParams,
    SearchConfig,
    SolverConfig,
    TimeGrid,
    evaluate_particle,
    generate_particles,
    hover_energy,
    search_positions,
    sector_partition,
)

BOUNDS = AreaBounds()


def test_sector_partition_quadrants():
    secs = sector_partition(BOUNDS, 4)
    centers = sorted(tuple(np.round(s.center, 9)) for s in secs)
    assert centers == [(-200.0, -200.0), (-200.0, 200.0), (200.0, -200.0), (200.0, 200.0)]


def test_sector_partition_single_is_whole_area():
    (sec,) = sector_partition(BOUNDS, 1)
    assert (sec.x_min, sec.x_max, sec.y_min, sec.y_max) == (-400.0, 400.0, -400.0, 400.0)


@pytest.mark.parametrize("count", [1, 2, 3, 4, 5, 6, 7, 9])
def test_sector_partition_tiles_the_area(count):
    secs = sector_partition(BOUNDS, count)
    assert len(secs) == count
    area = sum((s.x_max - s.x_min) * (s.y_max - s.y_min) for s in secs)
    whole = (BOUNDS.x_max - BOUNDS.x_min) * (BOUNDS.y_max - BOUNDS.y_min)
    assert area == pytest.approx(whole, rel=1e-12)
    for s in secs:
        assert s.x_min >= BOUNDS.x_min - 1e-9 and s.x_max <= BOUNDS.x_max + 1e-9
        assert s.y_min >= BOUNDS.y_min - 1e-9 and s.y_max <= BOUNDS.y_max + 1e-9


def test_generate_particles_respect_all_discs():
    rng = np.random.default_rng(51)
    anchors = np.array([[350.0, 350.0], [-200.0, 0.0]])
    prev = np.array([[300.0, 300.0], [-150.0, 0.0]])
    reach = 120.0
    parts = generate_particles(anchors, 200.0, 30, rng, BOUNDS, prev, reach)
    assert len(parts) == 30
    for cand in parts:
        for d in range(2):
            assert BOUNDS.contains(cand[d])
            assert np.linalg.norm(cand[d] - anchors[d]) <= 200.0 + 1e-9
            assert np.linalg.norm(cand[d] - prev[d]) <= reach + 1e-9


def test_generate_particles_zero_radius_sits_on_anchor():
    rng = np.random.default_rng(52)
    anchors = np.array([[10.0, 20.0]])
    prev = anchors.copy()
    parts = generate_particles(anchors, 0.0, 5, rng, BOUNDS, prev, 600.0)
    for cand in parts:
        np.testing.assert_allclose(cand, anchors, atol=1e-9)


def test_generate_particles_unreachable_anchor_falls_back_to_prev():
    # anchor disc and reachability disc are disjoint: sampling cannot
    # succeed, the drone stays where it was
    rng = np.random.default_rng(53)
    anchors = np.array([[300.0, 0.0]])
    prev = np.array([[-300.0, 0.0]])
    parts = generate_particles(anchors, 50.0, 8, rng, BOUNDS, prev, 100.0)
    for cand in parts:
        np.testing.assert_allclose(cand[0], prev[0], atol=1e-9)


def test_generate_particles_deterministic_per_seed():
    anchors = np.array([[0.0, 0.0], [100.0, 100.0]])
    prev = anchors.copy()
    a = generate_particles(anchors, 150.0, 10, np.random.default_rng(99), BOUNDS, prev, 600.0)
    b = generate_particles(anchors, 150.0, 10, np.random.default_rng(99), BOUNDS, prev, 600.0)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_search_finds_synthetic_optimum():
    # convex bowl with a known bottom, no motion term: the shrink rounds
    # must land within 10 m
    target = np.array([[123.0, -77.0]])

    def ev(pos):
        return float(np.sum((pos - target) ** 2))

    cfg = SearchConfig(particles=20, max_refines=4, seed=9)
    best, val, evals = search_positions(
        np.array([[0.0, 0.0]]), np.array([[0.0, 0.0]]), ev, cfg, BOUNDS, 600.0
    )
    assert np.linalg.norm(best - target) < 10.0
    assert val == pytest.approx(ev(best))
    assert evals >= cfg.particles + 1


def test_search_keeps_incumbent_when_it_is_best():
    # previous position already optimal: nothing sampled may displace it
    prev = np.array([[42.0, -17.0]])

    def ev(pos):
        return float(np.sum((pos - prev) ** 2))

    cfg = SearchConfig(particles=10, max_refines=2, seed=4)
    best, val, _ = search_positions(prev, np.array([[0.0, 0.0]]), ev, cfg, BOUNDS, 600.0)
    np.testing.assert_array_equal(best, prev)
    assert val == 0.0


def test_search_deterministic_per_seed():
    target = np.array([[50.0, 50.0], [-60.0, 10.0]])

    def ev(pos):
        return float(np.sum((pos - target) ** 2))

    cfg = SearchConfig(particles=8, max_refines=2, seed=7)
    centers = np.array([[0.0, 0.0], [0.0, 0.0]])
    prev = centers.copy()
    a = search_positions(prev, centers, ev, cfg, BOUNDS, 600.0, np.random.default_rng(1))
    b = search_positions(prev, centers, ev, cfg, BOUNDS, 600.0, np.random.default_rng(1))
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1] == b[1]


def test_evaluate_particle_hover_plus_transmit():
    # one drone parked right over its single user: value must equal hover
    # energy plus the closed-form transmit energy for an even split over
    # every subchannel, with zero motion cost
    cp = ChannelParams()
    ep = EnergyParams()
    tg = TimeGrid()
    rcp = RateConstraintParams(rate_floor=0.5, subchannels=4)
    pos = np.array([[0.0, 0.0]])
    users = np.array([[0.0, 0.0]])
    val = evaluate_particle(pos, pos, users, cp, ep, tg, rcp, SolverConfig())
    gain = cp.ref_gain * cp.ref_dist**2 / cp.altitude**2
    m = rcp.subchannels
    tx = m * (2.0 ** (rcp.rate_floor / m) - 1.0) * cp.noise_power / gain
    expect = hover_energy(ep, tg) + tx * tg.block_s
    assert val == pytest.approx(expect, rel=1e-4)


def test_evaluate_particle_charges_for_motion():
    cp = ChannelParams()
    ep = EnergyParams()
    tg = TimeGrid()
    rcp = RateConstraintParams(rate_floor=0.5, subchannels=4)
    users = np.array([[0.0, 0.0]])
    home = np.array([[0.0, 0.0]])
    away = np.array([[300.0, 0.0]])
    stay = evaluate_particle(home, home, users, cp, ep, tg, rcp, SolverConfig())
    came_back = evaluate_particle(home, away, users, cp, ep, tg, rcp, SolverConfig())
    # same radio cost, but the second one pays for a 300 m repositioning
    assert came_back > stay
    assert came_back - stay == pytest.approx(
        (ep.power_full - ep.power_idle) / ep.v_max * (300.0 / tg.move_s) * tg.move_s, rel=1e-6
    )


def test_evaluate_particle_infeasible_is_infinite():
    cp = ChannelParams(noise_power=1e-2)  # drowning noise
    ep = EnergyParams()
    tg = TimeGrid()
    rcp = RateConstraintParams(rate_floor=6.0, subchannels=1, max_power=1.0)
    pos = np.array([[0.0, 0.0]])
    users = np.array([[350.0, 350.0]])
    val = evaluate_particle(pos, pos, users, cp, ep, tg, rcp, SolverConfig())
    assert val == np.inf
