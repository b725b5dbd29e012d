"""Structural property checks on a small instance.

Exhaustive mode enumerates every candidate set; sampled mode draws random
candidates and can only refute, never certify.
"""
from rig.model import derived_params, intersection_of, sample_bipartite
from rig.properties import run_checks

n, m, p = 60, 60, 0.07
B = sample_bipartite(n, m, p, seed=11)
G = intersection_of(B)
params = derived_params(n, m, p)

for variant in ("plain", "starred"):
    print(f"-- {variant}")
    for rep in run_checks(G, params, variant, samples=2000, seed=5):
        print(f"{rep.property:<4} {rep.verdict:<20} samples={rep.samples} witness={rep.witness}")
