"""Sampling a random intersection graph and reading off its basic statistics.

Each of n vertices picks every one of m features independently with
probability p; two vertices are adjacent when they share a feature.
"""
import numpy as np

from rig.model import (derived_params, degree_sequence, format_graph, intersection_of,
                       parse_graph, sample_bipartite, sparsify)

n, m, p = 400, 400, 0.015
B = sample_bipartite(n, m, p, seed=1)
G = intersection_of(B)
P = derived_params(n, m, p)

print(f"n={n} m={m} p={p}")
print(f"expected degree d0 = {P.d0:.2f}, d1 = n m p^2 = {P.d1:.2f}, budget degree d = {P.d:.2f}")
degs = degree_sequence(B)
print(f"observed mean degree {degs.mean():.2f}, min {degs.min()}, max {degs.max()}")
print("degree histogram (first 8 bins):", np.bincount(degs)[:8])

# the text format round-trips exactly
assert parse_graph(format_graph(B)) == B

# sparsification: keep each incidence with probability q = lam / n
trip = sparsify(B, lam=100.0, seed=2)
print(f"sparsified with q = {trip.q:.3f}: |E| = {len(trip.original.edge_set())}, "
      f"|E_q| = {len(trip.sparse.edge_set())}, deleted = {len(trip.deleted_edges)}")
