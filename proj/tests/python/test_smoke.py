"""Smoke tests for the python bindings."""


import pytest

import spanchain as sc


def make_placement(n=40, extent=30.0, seed=7, distribution="uniform"):
    spec = sc.DeploymentSpec()
    spec.n = n
    spec.plane_w = extent
    spec.plane_h = extent
    spec.seed = seed
    spec.distribution = distribution
    return sc.NodePlacement.generate(spec)


def test_placement_generation_is_deterministic():
    a = make_placement()
    b = make_placement()
    assert a.n == 40
    assert a.positions == b.positions
    assert a.gamma == b.gamma
    assert a.gamma >= 1.0

    # min spacing after normalization, in the placement's own metric
    lo = min(
        a.distance(i, j) for i in range(a.n) for j in range(i + 1, a.n)
    )
    assert lo >= 1.0
    assert lo == pytest.approx(1.0, abs=1e-9)


def test_placement_round_trip_and_queries():
    p = make_placement(n=25, seed=3)
    q = sc.NodePlacement.loads(p.dumps())
    assert q.n == p.n
    assert q.gamma == pytest.approx(p.gamma, rel=1e-9)
    assert p.distance(0, 0) == 0.0
    assert p.distance(0, 1) == p.distance(1, 0)
    assert p.neighbors_within(0, 0.0) == []


def test_resolve_slot_matches_by_hand_evaluation():
    p = make_placement(n=10, seed=11)
    s = sc.SinrParams()
    out = sc.resolve_slot(p, s, [(0, 5000.0), (1, 5000.0)], list(range(10)))

    for v in range(2, 10):
        total = sum(5000.0 * p.distance(u, v) ** -s.alpha for u in (0, 1))
        assert out["sensed_energy"][v] == pytest.approx(total, rel=1e-9)
        decoded = {u for u, _ in out["received"][v]}
        for u in (0, 1):
            rx = 5000.0 * p.distance(u, v) ** -s.alpha
            expected = rx / (s.noise + total - rx) >= s.beta
            assert (u in decoded) == expected
    # transmitters never listen
    assert 0 not in out["received"]


def test_spanner_invariants_and_collection():
    p = make_placement(n=30, seed=5)
    spanner = sc.build_spanner(p, list(range(30)), seed=5)
    levels = spanner.levels
    assert levels[0] == list(range(30))
    assert len(levels[-1]) == 1
    assert levels[-1][0] == spanner.collector
    for i in range(1, len(levels)):
        r = 2.0**i
        for a in levels[i]:
            for b in levels[i]:
                if a != b:
                    assert p.distance(a, b) > r
    assert sc.density_check(spanner, p) <= 25

    result = sc.collect(
        p, spanner, sc.SinrParams(), sigma=2.0, certified=False, seed=1,
        payloads={v: f"d{v}" for v in range(30)},
    )
    signers = {u for u, _ in result["collector_queue"]}
    assert signers == set(range(30))


def test_run_experiment_and_tps_identity():
    cfg = sc.ExperimentConfig()
    for key, value in [
        ("n", "21"), ("plane_w", "20"), ("plane_h", "20"),
        ("param_mode", "empirical"), ("sigma", "2"), ("crash_rate", "0"),
        ("epochs", "2"), ("seeds", "1,2"),
    ]:
        cfg.apply(key, value)
    cfg.validate()
    r = sc.run_experiment(cfg)
    assert r["commits"] == 4
    assert r["abandons"] == 0
    assert r["committed_txs"] == 4 * 21
    assert r["tps"] == pytest.approx(
        r["committed_txs"] / (r["total_slots"] * 50e-6), rel=1e-9
    )
    # trials come back in seed order with their own epoch detail
    assert [t["seed"] for t in r["trials"]] == [1, 2]
    assert all(len(t["epoch_slots"]) == 2 for t in r["trials"])

    again = sc.run_experiment(cfg)
    assert again == r
