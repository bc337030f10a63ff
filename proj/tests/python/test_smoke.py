"""Smoke tests for the python bindings."""

import fractions

import pytest

import toposim


def test_builtin_profiles_match_the_table():
    profiles = toposim.builtin_profiles()
    assert set(profiles) == {"geth", "parity", "nethermind", "besu", "aleth"}
    geth = profiles["geth"]
    assert fractions.Fraction(geth["R"]) == fractions.Fraction(1, 10)
    assert geth["U"] == 4096
    assert geth["P"] == 0
    assert geth["L"] == 5120
    assert profiles["besu"]["U"] is None


def test_profile_battery_round_trips():
    measured = toposim.profile_policy({"R": "0.1", "U": 12, "P": 3, "L": 64})
    assert fractions.Fraction(measured["R"]) == fractions.Fraction(1, 10)
    assert measured["U"] == 12
    assert measured["P"] == 3
    assert measured["L"] == 64


def test_generators_are_seeded():
    a = toposim.gen_er(50, 120, seed=7)
    b = toposim.gen_er(50, 120, seed=7)
    c = toposim.gen_er(50, 120, seed=8)
    assert a == b
    assert a != c
    assert len(a) == 120

    tree = toposim.gen_ba(5, 1, seed=2)
    assert len(tree) == 4


def test_metrics_closed_forms():
    triangle = [(0, 1), (1, 2), (0, 2)]
    m = toposim.graph_metrics(3, triangle)
    assert m["clustering_coefficient"] == pytest.approx(1.0)
    assert m["transitivity"] == pytest.approx(1.0)
    assert m["diameter"] == 1
    assert m["clique_number"] == 1

    square = [(0, 1), (1, 2), (2, 3), (0, 3)]
    assert toposim.graph_metrics(4, square)["degree_assortativity"] is None


def test_louvain_splits_two_cliques():
    edges = []
    for block in (0, 5):
        for i in range(5):
            for j in range(i + 1, 5):
                edges.append((block + i, block + j))
    edges.append((4, 5))
    part = toposim.louvain(10, edges, seed=3)
    assert len(part["communities"]) == 2
    assert sorted(c["size"] for c in part["communities"]) == [5, 5]


def test_schedule_instances():
    assert len(toposim.schedule_iterations(8, 3)) == 4
    assert len(toposim.schedule_iterations(500, 4)) == 127
    covered = set()
    for it in toposim.schedule_iterations(12, 3):
        for s, t in it["edges"]:
            pair = (min(s, t), max(s, t))
            assert pair not in covered
            covered.add(pair)
    assert len(covered) == 12 * 11 // 2


def test_cost_arithmetic_is_exact():
    one = toposim.account_cost(1)
    assert one["ether_cost"] == "71/100000"
    mesh = toposim.account_cost(8000 * 7999 // 2, unit_pair_cost="4569/6399200")
    assert mesh["ether_cost"] == "22845"


def test_verify_blocks():
    blocks = [
        {"height": h, "time": 15.0 * h, "gas_used_fraction": "1", "prices": ["50", "100"]}
        for h in range(1, 40)
    ]
    result = toposim.verify_blocks(blocks, t1=30, t2=60, expiry=300, y0="0.1")
    assert result["status"] == "pass"

    blocks[10]["gas_used_fraction"] = "9/10"
    result = toposim.verify_blocks(blocks, t1=30, t2=60, expiry=300, y0="0.1")
    assert result["status"] == "fail"
    assert result["non_full_heights"] == [11]


SCENARIO = """
seed = 9
topology.model = er
topology.nodes = 6
topology.edges = 8
latency.lo_ms = 20
latency.hi_ms = 60
default_profile = toy
profile.toy.R = 0.1
profile.toy.U = 16
profile.toy.P = 0
profile.toy.L = 32
background.rate = 16
background.duration = 2.5
measurement.mode = serial
measurement.x_wait_s = 2
measurement.z_futures = 32
measurement.timeout_s = 3
"""


def test_end_to_end_scenario():
    run = toposim.run_scenario_text(SCENARIO)
    assert run["precision"] == pytest.approx(1.0)
    assert run["recall"] == pytest.approx(1.0)
    assert run["isolation_violations"] == []
    assert len(run["measured_edges"]) == 8

    rerun = toposim.run_scenario_text(SCENARIO)
    assert rerun["report_json"] == run["report_json"]
