import math

import pytest

import ergolab


def test_version():
    assert ergolab.__version__


def test_grandfather_graph_basics():
    g = ergolab.grandfather_graph()
    assert g.degree(g.root) == 8
    ball = g.ball(g.root, 1)
    assert ball.vertex_count() == 9
    # vertex-transitive: every neighbor shares the root's signature
    sig = g.signature(g.root, 2)
    for to, mult in g.neighbors(g.root):
        assert mult == 1
        assert g.signature(to, 2) == sig


def test_lattice_distance_and_ball():
    z2 = ergolab.lattice(2)
    assert z2.ball(z2.root, 2).vertex_count() == 13
    verts = z2.ball_vertices(z2.root, 3)
    for v, d in verts:
        assert z2.distance(z2.root, v) == d


def test_entropy_series_exact():
    series = ergolab.entropy_series(ergolab.grandfather_ensemble(), n_max=4)
    assert series["exact"]
    assert series["h"][0] == 0.0
    assert series["h"][1] == pytest.approx(math.log(8.0), abs=1e-12)
    assert series["rate"]["monotone_ok"]


def test_joint_entropy_chain_rule():
    g = ergolab.grandfather_graph()
    for k in (1, 2, 3):
        assert ergolab.joint_entropy(g, g.root, 1, k) == pytest.approx(k * math.log(8.0), abs=1e-10)


def test_grandfather_cocycle():
    table = ergolab.cocycle(ergolab.grandfather_ensemble(), r=2)
    assert table["exact"]
    deltas = sorted(c["delta"] for c in table["classes"])
    assert deltas == pytest.approx([0.25, 0.5, 2.0, 4.0], abs=1e-10)
    assert table["elog_delta"]["value"] == pytest.approx(-(7 / 8) * math.log(2), abs=1e-10)
    assert table["ballistic_bound"] == pytest.approx(7 / 24, abs=1e-10)


def test_stationarity_battery_small():
    gf = ergolab.grandfather_ensemble()
    st = ergolab.stationarity(gf, n=1, r=2)
    assert st["exact"] and st["pass"] and st["tv"] < 1e-10
    rev = ergolab.reversibility(gf, r=2)
    assert rev["exact"] and not rev["pass"]
    assert rev["tv"] == pytest.approx(0.5, abs=1e-10)


def test_speed_beats_ballistic_bound():
    s = ergolab.speed(ergolab.grandfather_ensemble(), n=100, samples=500, seed=3)
    assert s["value"] >= 7 / 24 - 3 * s["se"]


def test_lattice_liouville_verdict():
    rep = ergolab.fundamental_inequality(
        ergolab.lattice_ensemble(2), n_entropy=32, n_speed=400, n_growth=32, samples=300, seed=5
    )
    assert rep["liouville"]
    assert rep["lower_ok"] and rep["upper_ok"]


def test_epsilon_sequence_and_root_depth():
    seq = ergolab.epsilon_sequence(100)
    assert seq["epsilons"][0] == 1
    assert seq["xis"][18] == 2**17
    rd = ergolab.root_depth_distribution(3)
    assert rd["oriented_edge_mass"] == [4, 20, 34, 18]
    assert rd["total_oriented_edges"] == 76


def test_spine_resistance_and_canopy():
    assert ergolab.spine_resistance(1, 10**6) < math.pi**2 / 6
    # B(sigma_0, 3) = {sigma_0..sigma_3} plus the second child of sigma_2
    assert ergolab.canopy_ball_size(50, 0, 3) == 5
    t = ergolab.canopy_tree(3)
    assert t.vertex_count() == 11
    tr = ergolab.reinforce_edges(t)
    assert sum(tr.degree(v) for v in range(tr.vertex_count())) == 76


def test_ensemble_replay():
    agw = ergolab.augmented_galton_watson([0.0, 0.5, 0.5])
    g1 = agw.sample(11, 4)
    g2 = agw.sample(11, 4)
    assert g1.signature(g1.root, 4) == g2.signature(g2.root, 4)


def test_run_config_roundtrip():
    out = ergolab.run("operation = entropy\nensemble = lattice\nd = 1\nn_max = 8\nseed = 2\n")
    assert out["exit_code"] == 0
    assert len(out["record"]["series"]["h_n"]) == 9


def test_horizon_error_surfaces():
    t = ergolab.canopy_tree_infinite(4, 0)
    with pytest.raises(ergolab.HorizonExceeded):
        t.ball_vertices(t.root, 10)
