from __future__ import annotations

import json
import math

import numpy as np
import pytest

import naive
from rig.errors import CapacityError, ParameterError
from rig.ham import run_ham
from rig.model import (BipartiteIncidence, ModelParams, W_prime, derived_params, incidence_queries,
                       intersection_of, one_minus_q_pow, sample_bipartite, sparsify)
from rig.properties import (B1, NO_VIOLATION, VERIFIED, VIOLATED, Partition, check_p0, check_p1,
                            check_p2, check_p3, check_p4, check_p5, check_vr, is_deletable,
                            p0_star_degree, partition, psi, run_checks)

from conftest import graph_from_edges, star_graph


def manual_params(n, m, p):
    """ModelParams without the (0, 1) restriction on p, for toy constructions."""
    d0 = m * p * one_minus_q_pow(p, n - 1)
    d1 = n * m * p * p
    return ModelParams(n, m, p, d0, d1, d1, 2, "nmp2", "np<=40", "m>=n^(1-eps)")


def small_instances(seed, count, n_hi=14):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(3, n_hi + 1))
        m = int(rng.integers(2, 15))
        p = float(rng.uniform(0.08, 0.6))
        B = sample_bipartite(n, m, p, int(rng.integers(2**31)))
        yield B, intersection_of(B), derived_params(n, m, p)


# ---- psi ----------------------------------------------------------------------

def test_psi_values():
    assert psi(1.0) == 0.0
    assert psi(0.1) == pytest.approx(0.66974, abs=5e-6)
    assert psi(0.5) == pytest.approx(0.5 * math.log(0.5) + 0.5, rel=1e-15)
    assert psi(0.5) == pytest.approx(0.15343, abs=5e-6)


@pytest.mark.parametrize("bad", [0.0, -0.5, 1.01])
def test_psi_domain(bad):
    with pytest.raises(ParameterError):
        psi(bad)


def test_psi_decreasing():
    grid = np.linspace(1e-6, 1, 2001)
    vals = [psi(float(x)) for x in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert min(vals) >= 0


# ---- partition ----------------------------------------------------------------

def test_edgeless_all_small():
    B = BipartiteIncidence.from_feature_sets(4, [[0], [1], [2], [3]])
    part = partition(intersection_of(B), manual_params(4, 4, 0.25), "plain")
    assert part.small == frozenset(range(4)) and part.large == frozenset()


def test_complete_incidence_no_small():
    n, m = 5, 40
    B = sample_bipartite(n, m, 1.0, 0)
    part = partition(intersection_of(B), manual_params(n, m, 1.0), "plain")
    assert part.small == frozenset()


def test_partition_against_naive():
    for B, G, P in small_instances(1, 100, 20):
        for variant, thr in (("plain", 0.1 * P.d0), ("starred", 6e-3 * P.mp)):
            part = partition(G, P, variant)
            assert part.small == naive.small_set(B, thr)
            assert part.small | part.large == set(range(B.n)) and not part.small & part.large
            assert partition(G, P, variant) == part
        wp = W_prime(B)
        s = incidence_queries(B, G, S={0})
        assert wp[0] == len(s.W1_S)


def test_partition_needs_source():
    with pytest.raises(ParameterError):
        partition(graph_from_edges(3, [(0, 1)]), manual_params(3, 3, 0.3))


# ---- P0 ---------------------------------------------------------------------

def test_p0_examples():
    tri = graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert check_p0(tri, 2).verdict == VERIFIED
    r = check_p0(star_graph(3), 2)
    assert r.verdict == VIOLATED and r.witness["vertex"] in (1, 2, 3) and r.witness["degree"] == 1


def test_p0_against_scan():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        n = int(rng.integers(2, 30))
        B = sample_bipartite(n, int(rng.integers(1, 30)), float(rng.uniform(0, 0.5)),
                             int(rng.integers(2**31)))
        G = intersection_of(B)
        k = int(rng.integers(0, 4))
        r = check_p0(G, k)
        assert (r.verdict == VERIFIED) == naive.p0(B, k)
        if r.verdict == VIOLATED:
            assert G.degree(r.witness["vertex"]) < k


def test_p0_star_degree():
    P = derived_params(100, 100, 0.05)
    assert p0_star_degree(P) == math.ceil(2.5)


# ---- P1 ---------------------------------------------------------------------

def test_p1_examples():
    part = Partition(frozenset(), frozenset(range(10)), "plain", 0.1)
    assert check_p1(part, 10, 1.0).verdict == VERIFIED
    heavy = Partition(frozenset(range(8)), frozenset({8, 9}), "plain", 0.1)
    r = check_p1(heavy, 10, 1.0)
    assert r.verdict == VIOLATED and r.witness == {"clause": "size", "small_size": 8}
    one = Partition(frozenset({0}), frozenset(range(1, 1000)), "plain", 0.1)
    r = check_p1(one, 1000, 2 * math.log(1000))
    assert r.verdict == VIOLATED and r.witness["clause"] == "empty"
    star = Partition(frozenset({0}), frozenset(range(1, 10)), "starred", 0.1)
    with pytest.raises(ParameterError):
        check_p1(star, 10, 1.0)


def test_p1_against_naive():
    for B, G, P in small_instances(3, 200, 30):
        for variant in ("plain", "starred"):
            part = partition(G, P, variant)
            r = check_p1(part, B.n, P.d0, P.mp)
            if variant == "plain":
                ok = naive.p1(part.small, B.n, B.n ** (1 / 3), P.d0)
            else:
                ok = naive.p1(part.small, B.n, B.n ** (1 / 25), P.mp)
            assert (r.verdict == VERIFIED) == ok


# ---- P2 ---------------------------------------------------------------------

def test_p2_examples():
    G = graph_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    empty = Partition(frozenset(), frozenset(range(4)), "plain", 0)
    assert check_p2(G, empty).verdict == VERIFIED
    adj = Partition(frozenset({0, 1}), frozenset({2, 3}), "plain", 0)
    r = check_p2(G, adj)
    assert r.verdict == VIOLATED and r.witness == {"pair": [0, 1], "distance": 1}
    far = graph_from_edges(6, [(i, i + 1) for i in range(5)])
    ends = Partition(frozenset({0, 5}), frozenset(range(1, 5)), "plain", 0)
    assert check_p2(far, ends).verdict == VERIFIED
    with pytest.raises(ParameterError):
        check_p2(G, Partition(frozenset(), frozenset(range(4)), "starred", 0))


def test_p2_against_floyd_warshall():
    rng = np.random.default_rng(4)
    for _ in range(150):
        n = int(rng.integers(3, 31))
        B = sample_bipartite(n, int(rng.integers(n // 2, 2 * n)), float(rng.uniform(0.02, 0.15)),
                             int(rng.integers(2**31)))
        G = intersection_of(B)
        small = frozenset(v for v in range(n) if rng.random() < 0.25)
        part = Partition(small, frozenset(range(n)) - small, "plain", 0)
        r = check_p2(G, part)
        assert (r.verdict == VERIFIED) == naive.p2(B, small)


# ---- P3 ---------------------------------------------------------------------

def test_p3_vacuous_and_degree_case():
    B = BipartiteIncidence.from_feature_sets(3, [[0, 1], [0], [1, 2], [2]])
    G = intersection_of(B)
    P = manual_params(4, 3, 0.5)
    empty = Partition(frozenset(range(4)), frozenset(), "plain", 0)
    assert check_p3(G, empty, P).verdict == VERIFIED
    # vertex 3 has degree 1; with b1*d1 > 1 the singleton {3} violates
    part = Partition(frozenset(), frozenset(range(4)), "plain", 0)
    r = check_p3(G, part, P, b1=2.0 / P.d1 + 1e-9)
    assert r.verdict == VIOLATED
    assert naive.p3_violates(B, r.witness["S"], 2.0 / P.d1 + 1e-9, P.d1)


def test_p3_capacity():
    B = sample_bipartite(30, 30, 0.05, 1)
    G = intersection_of(B)
    P = derived_params(30, 30, 0.05)
    part = Partition(frozenset(), frozenset(range(30)), "plain", 0)
    with pytest.raises(CapacityError, match="sampled"):
        check_p3(G, part, P, cap=100)
    assert check_p3(G, part, P, mode="sampled", trials=200, seed=1).verdict in (NO_VIOLATION, VIOLATED)


def test_p3_exhaustive_against_naive_and_sampled_sound():
    for B, G, P in small_instances(5, 200):
        for b1 in (B1, 0.3):
            part = partition(G, P, "plain")
            ex = check_p3(G, part, P, b1=b1)
            assert (ex.verdict == VERIFIED) == naive.p3(B, part.large, b1, P.d1)
            sm = check_p3(G, part, P, b1=b1, mode="sampled", trials=300, seed=9)
            if ex.verdict == VERIFIED:
                assert sm.verdict != VIOLATED
            if sm.verdict == VIOLATED:
                assert naive.p3_violates(B, sm.witness["S"], b1, P.d1)


# ---- P4, P5 -----------------------------------------------------------------

def test_p4_examples():
    B = BipartiteIncidence.from_feature_sets(3, [[], [], []])
    assert check_p4(intersection_of(B), manual_params(3, 3, 0.1)).verdict == VERIFIED
    n, m = 3, 10
    Bc = sample_bipartite(n, m, 1.0, 0)
    # every W(v) = m; hand-built parameters with 4 mp = 8 < m
    P = ModelParams(n, m, 0.2, 2.0, 1.2, 1.2, 2, "nmp2", "np<=40", "m>=n^(1-eps)")
    r = check_p4(intersection_of(Bc), P)
    assert r.verdict == VIOLATED and r.witness == {"vertex": 0, "bound": "W", "value": 10}


def test_p5_examples():
    B = BipartiteIncidence.from_feature_sets(2, [[]] * 20)
    assert check_p5(intersection_of(B), manual_params(20, 2, 0.1)).verdict == VERIFIED
    Bf = sample_bipartite(100, 1, 1.0, 0)
    r = check_p5(intersection_of(Bf), manual_params(100, 1, 0.01))
    assert r.verdict == VIOLATED and r.witness == {"feature": 0, "V": 100}
    with pytest.raises(ParameterError):
        check_p5(intersection_of(sample_bipartite(2, 2, 0.5, 0)), manual_params(2, 2, 0.5))


def test_p4_p5_against_naive():
    for B, G, P in small_instances(6, 300, 40):
        assert (check_p4(G, P).verdict == VERIFIED) == naive.p4(B, P.mp, P.d0, P.d1)
        assert (check_p5(G, P).verdict == VERIFIED) == naive.p5(B, P.p)


# ---- VR -----------------------------------------------------------------------

def test_vr_examples():
    n, m = 10, 3
    Bc = sample_bipartite(n, m, 1.0, 0)
    assert check_vr(Bc, manual_params(n, m, 0.5)).verdict == VERIFIED
    Bz = BipartiteIncidence.from_feature_sets(3, [[0, 1]] * 10)   # feature 2 unused
    r = check_vr(Bz, manual_params(10, 3, 0.5))
    assert r.verdict == VIOLATED
    assert naive.vr_violates(Bz, r.witness["R"], 0.5)


def test_vr_against_naive_and_sampled_sound():
    for B, G, P in small_instances(7, 200):
        ex = check_vr(B, P, mode="exhaustive")
        assert (ex.verdict == VERIFIED) == naive.vr(B, P.p)
        sm = check_vr(B, P, mode="sampled", trials=300, seed=3)
        if ex.verdict == VERIFIED:
            assert sm.verdict != VIOLATED
        if sm.verdict == VIOLATED:
            assert naive.vr_violates(B, sm.witness["R"], P.p)


# ---- deletable sets ------------------------------------------------------------

def test_empty_x_deletable():
    G = star_graph(3)
    part = Partition(frozenset({1}), frozenset({0, 2, 3}), "plain", 0)
    assert is_deletable(G, part, [(0, 1)], set(), 0.1, 5.0).deletable


def test_small_incident_edge_fails_d1():
    G = star_graph(3)
    part = Partition(frozenset({1}), frozenset({0, 2, 3}), "plain", 0)
    v = is_deletable(G, part, [], {(1, 0)}, 10.0, 5.0)
    assert not v.deletable and v.clause == "D1" and v.witness == {"edge": [0, 1]}


def test_d2_and_d3():
    G = star_graph(3)
    part = Partition(frozenset(), frozenset(range(4)), "plain", 0)
    v = is_deletable(G, part, [], {(0, 1), (0, 2)}, 0.1, 10.0)
    assert v.clause == "D2" and v.witness["vertex"] == 0
    v = is_deletable(G, part, [(0, 2)], {(0, 2)}, 1.0, 10.0)
    assert v.clause == "D3"


def test_x_outside_graph_rejected():
    G = star_graph(3)
    part = Partition(frozenset(), frozenset(range(4)), "plain", 0)
    with pytest.raises(ParameterError):
        is_deletable(G, part, [], {(1, 2)}, 1.0, 1.0)


def test_deletable_against_recount():
    rng = np.random.default_rng(8)
    seen = 0
    while seen < 150:
        n = int(rng.integers(6, 40))
        B = sample_bipartite(n, int(rng.integers(n // 2, n + 1)), float(rng.uniform(0.05, 0.25)),
                             int(rng.integers(2**31)))
        G = intersection_of(B)
        P = derived_params(n, B.m, B.p)
        out = run_ham(G, max(P.d, 1.01), max_queue=20_000)
        if out.status != "failure":
            continue
        trip = sparsify(B, float(rng.uniform(0.5, 3)), int(rng.integers(2**31)))
        for variant in ("plain", "starred"):
            part = partition(G, P, variant)
            b2 = float(rng.choice([0.5 * B1, 0.05, 0.5]))
            v = is_deletable(G, part, out.trace, trip.deleted_edges, b2, P.d, P, variant)
            ref = naive.deletable(trip.deleted_edges, part.small, part.large, out.trace.h_set,
                                  variant, b2, P.d, P.d0, P.d1)
            assert v.clause == ref and v.deletable == (ref is None)
        seen += 1


def test_properties_hold_and_ham_fails_then_empty_x_deletable():
    for B, G, P in small_instances(10, 200, 20):
        out = run_ham(G, max(P.d, 1.01), max_queue=20_000)
        reports = run_checks(G, P, "plain")
        if out.status == "failure" and all(r.ok for r in reports):
            part = partition(G, P, "plain")
            assert is_deletable(G, part, out.trace, set(), 0.5 * B1, P.d).deletable


# ---- reports ------------------------------------------------------------------

def test_report_json_shape():
    B = sample_bipartite(12, 12, 0.2, 5)
    G = intersection_of(B)
    for r in run_checks(G, derived_params(12, 12, 0.2), "starred", samples=50, seed=1):
        d = json.loads(r.to_json())
        assert set(d) == {"property", "verdict", "samples", "witness", "constants"}
        assert d["verdict"] in (VERIFIED, NO_VIOLATION, VIOLATED)


def test_run_checks_names():
    B = sample_bipartite(12, 12, 0.2, 5)
    G = intersection_of(B)
    P = derived_params(12, 12, 0.2)
    assert [r.property for r in run_checks(G, P)] == ["P0", "P1", "P2", "P3", "P4", "P5"]
    assert [r.property for r in run_checks(G, P, "starred")] == ["P0*", "P1*", "P3*", "P4", "P5", "VR"]
    with pytest.raises(ParameterError):
        run_checks(G, P, checks=["P9"])
