from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rig.model import BipartiteIncidence, IntersectionGraph, intersection_of, sample_bipartite

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def graph_from_edges(n, edges):
    return IntersectionGraph.from_edges(n, edges)


def star_graph(leaves=3):
    """K_{1,leaves} realised as an intersection graph: center shares one feature per leaf."""
    sets = [list(range(leaves))] + [[i] for i in range(leaves)]
    return intersection_of(BipartiteIncidence.from_feature_sets(leaves, sets))


def random_instance(rng, n_lo=3, n_hi=20, m_lo=1, m_hi=20, p=None):
    n = int(rng.integers(n_lo, n_hi + 1))
    m = int(rng.integers(m_lo, m_hi + 1))
    if p is None:
        p = float(rng.uniform(0.05, 0.6))
    B = sample_bipartite(n, m, p, int(rng.integers(2**31)))
    return B, intersection_of(B)


def permutation_hamiltonian(G):
    """O(n!) reference: fix vertex 0 and try every ordering of the rest."""
    n = G.n
    if n < 3:
        return False
    for perm in itertools.permutations(range(1, n)):
        cyc = (0,) + perm
        if all(G.has_edge(cyc[i - 1], cyc[i]) for i in range(n)):
            return True
    return False


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[tuple[float, str]] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
